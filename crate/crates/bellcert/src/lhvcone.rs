//! Extremal generators of the local hidden variable cone.
//!
//! For a fixed configuration, a hidden variable value assigns probability
//! 0 or 1 to every outcome slot on each side. Ranging over all such
//! Boolean patterns gives the extremal rays of the cone of LHV-reachable
//! event vectors: each generator is `(bitsA (x) bitsB, bitsA, bitsB)` in
//! the event-vector layout. The patterns are deliberately unnormalized:
//! per-measurement outcome sums are not constrained to one.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measurements::{EventLayout, MeasurementConfig};
use crate::qcore::ComplexMatrix;

/// Hard cap on the total Boolean slot count for lazy enumeration.
pub const ENUMERATION_GUARD_BITS: usize = 30;
/// Cap for materializing the full generator set (2^20 columns).
pub const BUILD_GUARD_BITS: usize = 20;

#[derive(Debug, Error)]
pub enum ConeError {
    #[error("scenario too large: {bits} assignment bits exceeds the {guard}-bit guard")]
    TooLarge { bits: usize, guard: usize },
    #[error("assignment shape does not match the configuration layout")]
    ShapeMismatch,
}

/// One deterministic outcome pattern: a Boolean value per outcome slot on
/// each side, identified by its index in A-major binary counting order
/// (Alice's first slot is the most significant bit).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanAssignment {
    pub lambda_index: u64,
    pub bits_a: Vec<bool>,
    pub bits_b: Vec<bool>,
}

impl BooleanAssignment {
    /// Decode an index back into bit patterns for the given layout.
    pub fn decode(lambda_index: u64, layout: &EventLayout) -> Self {
        let na = layout.a_len();
        let nb = layout.b_len();
        let bits_a = (0..na)
            .map(|i| (lambda_index >> (na + nb - 1 - i)) & 1 == 1)
            .collect();
        let bits_b = (0..nb)
            .map(|j| (lambda_index >> (nb - 1 - j)) & 1 == 1)
            .collect();
        Self {
            lambda_index,
            bits_a,
            bits_b,
        }
    }

    /// Inverse of [`BooleanAssignment::decode`].
    pub fn encode(&self) -> u64 {
        let na = self.bits_a.len();
        let nb = self.bits_b.len();
        let mut index = 0u64;
        for (i, &bit) in self.bits_a.iter().enumerate() {
            if bit {
                index |= 1 << (na + nb - 1 - i);
            }
        }
        for (j, &bit) in self.bits_b.iter().enumerate() {
            if bit {
                index |= 1 << (nb - 1 - j);
            }
        }
        index
    }
}

/// Lazy iterator over all `2^(a_len + b_len)` assignments in increasing
/// `lambda_index` order.
pub fn enumerate_assignments(
    config: &MeasurementConfig,
) -> Result<impl Iterator<Item = BooleanAssignment>, ConeError> {
    enumerate_for_layout(config.layout())
}

/// Layout-level variant of [`enumerate_assignments`].
pub fn enumerate_for_layout(
    layout: EventLayout,
) -> Result<impl Iterator<Item = BooleanAssignment>, ConeError> {
    let bits = layout.a_len() + layout.b_len();
    if bits > ENUMERATION_GUARD_BITS {
        return Err(ConeError::TooLarge {
            bits,
            guard: ENUMERATION_GUARD_BITS,
        });
    }
    let count = 1u64 << bits;
    Ok((0..count).map(move |idx| BooleanAssignment::decode(idx, &layout)))
}

/// Generator column for one assignment, in the event-vector layout:
/// joint block `bitsA (x) bitsB`, then the two marginal blocks.
pub fn generator_vector(
    assignment: &BooleanAssignment,
    layout: &EventLayout,
) -> Result<Vec<f64>, ConeError> {
    if assignment.bits_a.len() != layout.a_len() || assignment.bits_b.len() != layout.b_len() {
        return Err(ConeError::ShapeMismatch);
    }
    let mut v = Vec::with_capacity(layout.total_len());
    for &a in &assignment.bits_a {
        for &b in &assignment.bits_b {
            v.push(if a && b { 1.0 } else { 0.0 });
        }
    }
    v.extend(assignment.bits_a.iter().map(|&a| if a { 1.0 } else { 0.0 }));
    v.extend(assignment.bits_b.iter().map(|&b| if b { 1.0 } else { 0.0 }));
    Ok(v)
}

/// The full generator set for a configuration, stored as bit patterns
/// (one pair of masks per column) and expanded on demand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeGenerators {
    layout: EventLayout,
    masks: Vec<(u32, u32)>,
}

impl ConeGenerators {
    pub fn layout(&self) -> &EventLayout {
        &self.layout
    }

    /// Number of generator columns.
    pub fn count(&self) -> usize {
        self.masks.len()
    }

    /// Event-vector length (rows of the generator matrix).
    pub fn rows(&self) -> usize {
        self.layout.total_len()
    }

    pub fn assignment(&self, column: usize) -> BooleanAssignment {
        let (ma, mb) = self.masks[column];
        let na = self.layout.a_len();
        let nb = self.layout.b_len();
        BooleanAssignment {
            lambda_index: ((ma as u64) << nb) | mb as u64,
            bits_a: (0..na).map(|i| (ma >> (na - 1 - i)) & 1 == 1).collect(),
            bits_b: (0..nb).map(|j| (mb >> (nb - 1 - j)) & 1 == 1).collect(),
        }
    }

    /// Write generator `column` into `out` (length `rows()`).
    pub fn write_column(&self, column: usize, out: &mut [f64]) {
        let assignment = self.assignment(column);
        let v = generator_vector(&assignment, &self.layout).expect("stored masks match layout");
        out.copy_from_slice(&v);
    }

    /// Dot product of a layout-length vector with generator `column`,
    /// skipping the dense expansion.
    pub fn dot_column(&self, f: &[f64], column: usize) -> f64 {
        let (ma, mb) = self.masks[column];
        let na = self.layout.a_len();
        let nb = self.layout.b_len();
        let joint_len = self.layout.joint_len();
        let mut acc = 0.0;
        for i in 0..na {
            if (ma >> (na - 1 - i)) & 1 == 0 {
                continue;
            }
            for j in 0..nb {
                if (mb >> (nb - 1 - j)) & 1 == 1 {
                    acc += f[i * nb + j];
                }
            }
        }
        for i in 0..na {
            if (ma >> (na - 1 - i)) & 1 == 1 {
                acc += f[joint_len + i];
            }
        }
        for j in 0..nb {
            if (mb >> (nb - 1 - j)) & 1 == 1 {
                acc += f[joint_len + na + j];
            }
        }
        acc
    }

    /// Minimum of `f . B_lambda` over all generators.
    pub fn min_dot(&self, f: &[f64]) -> f64 {
        (0..self.count())
            .map(|c| self.dot_column(f, c))
            .fold(f64::INFINITY, f64::min)
    }

    /// Dense 0/1 matrix (rows = event-vector entries, columns = generators)
    /// in the crate's JSON matrix format.
    pub fn to_dense_matrix(&self) -> ComplexMatrix {
        let rows = self.rows();
        let mut buf = vec![0.0; rows];
        let mut m = ComplexMatrix::zeros(rows, self.count());
        for c in 0..self.count() {
            self.write_column(c, &mut buf);
            for (r, &v) in buf.iter().enumerate() {
                if v != 0.0 {
                    m.set(r, c, crate::qcore::C64::new(v, 0.0));
                }
            }
        }
        m
    }
}

/// Materialize all generators for a configuration, columns in increasing
/// `lambda_index` order.
pub fn build_generators(config: &MeasurementConfig) -> Result<ConeGenerators, ConeError> {
    build_for_layout(config.layout())
}

/// Layout-level variant of [`build_generators`].
pub fn build_for_layout(layout: EventLayout) -> Result<ConeGenerators, ConeError> {
    let na = layout.a_len();
    let nb = layout.b_len();
    let bits = na + nb;
    if bits > BUILD_GUARD_BITS {
        return Err(ConeError::TooLarge {
            bits,
            guard: BUILD_GUARD_BITS,
        });
    }
    let count = 1usize << bits;
    let masks = (0..count as u64)
        .map(|idx| (((idx >> nb) as u32), (idx & ((1 << nb) - 1)) as u32))
        .collect();
    Ok(ConeGenerators { layout, masks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::{event_vector, projective_from_bloch, MeasurementConfig};
    use crate::qcore::{ComplexMatrix, DensityMatrix, C64};
    use std::collections::HashSet;

    fn shape(alice: Vec<usize>, bob: Vec<usize>) -> EventLayout {
        EventLayout {
            alice_outcomes: alice,
            bob_outcomes: bob,
        }
    }

    #[test]
    fn alice_patterns_for_three_measurements() {
        // three 2-outcome measurements on one side: 2^6 distinct patterns
        let layout = shape(vec![2, 2, 2], vec![1]);
        let mut seen = HashSet::new();
        for a in enumerate_for_layout(layout).unwrap() {
            seen.insert(a.bits_a.clone());
        }
        assert_eq!(seen.len(), 64);
    }

    #[test]
    fn chsh_scenario_counts() {
        let layout = shape(vec![2, 2], vec![2, 2]);
        let gens = build_for_layout(layout.clone()).unwrap();
        assert_eq!(gens.count(), 256);
        assert_eq!(gens.rows(), 24);

        let total = enumerate_for_layout(layout).unwrap().count();
        assert_eq!(total, 256);
    }

    #[test]
    fn minimal_scenario_has_four_assignments() {
        let layout = shape(vec![1], vec![1]);
        assert_eq!(enumerate_for_layout(layout).unwrap().count(), 4);
    }

    #[test]
    fn config_enumeration_is_ordered_and_unique() {
        let z = projective_from_bloch([0.0, 0.0, 1.0]).unwrap();
        let config = MeasurementConfig::new(vec![z.clone(), z.clone()], vec![z]).unwrap();
        let mut expected = 0u64;
        let mut seen = HashSet::new();
        for a in enumerate_assignments(&config).unwrap() {
            assert_eq!(a.lambda_index, expected);
            assert!(seen.insert((a.bits_a.clone(), a.bits_b.clone())));
            expected += 1;
        }
        assert_eq!(expected, 64); // 2^(4 + 2)
    }

    #[test]
    fn worked_example_generator() {
        // bitsA = (1,0,0,1) over two 2-outcome measurements,
        // bitsB = (0,1,0) over one 3-outcome measurement
        let layout = shape(vec![2, 2], vec![3]);
        let assignment = BooleanAssignment {
            lambda_index: 0,
            bits_a: vec![true, false, false, true],
            bits_b: vec![false, true, false],
        };
        let v = generator_vector(&assignment, &layout).unwrap();
        assert_eq!(v.len(), 19);
        let expected_joint = [
            0.0, 1.0, 0.0, // 1 * (0,1,0)
            0.0, 0.0, 0.0, // 0
            0.0, 0.0, 0.0, // 0
            0.0, 1.0, 0.0, // 1 * (0,1,0)
        ];
        assert_eq!(&v[..12], &expected_joint);
        assert_eq!(&v[12..16], &[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(&v[16..], &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn zero_and_ones_assignments() {
        let layout = shape(vec![2], vec![2]);
        let zero = BooleanAssignment::decode(0, &layout);
        assert!(generator_vector(&zero, &layout)
            .unwrap()
            .iter()
            .all(|&x| x == 0.0));
        let ones = BooleanAssignment::decode(0b1111, &layout);
        assert!(generator_vector(&ones, &layout)
            .unwrap()
            .iter()
            .all(|&x| x == 1.0));
    }

    #[test]
    fn encode_decode_roundtrip() {
        use proptest::prelude::*;
        let layout = shape(vec![2, 2], vec![2, 2]);
        proptest!(ProptestConfig::with_cases(64), |(idx in 0u64..256)| {
            let a = BooleanAssignment::decode(idx, &layout);
            prop_assert_eq!(a.encode(), idx);
            prop_assert_eq!(a.lambda_index, idx);
        });
    }

    #[test]
    fn columns_are_distinct_and_factor() {
        let layout = shape(vec![2, 2], vec![2, 2]);
        let gens = build_for_layout(layout.clone()).unwrap();
        let mut seen = HashSet::new();
        let mut col = vec![0.0; gens.rows()];
        for c in 0..gens.count() {
            gens.write_column(c, &mut col);
            let key: Vec<u8> = col.iter().map(|&x| x as u8).collect();
            assert!(seen.insert(key), "duplicate column {c}");
            // joint block factors as the outer product of the marginals
            for a in 0..layout.a_len() {
                for b in 0..layout.b_len() {
                    let lhs = col[layout.joint_slot(a, b)];
                    let rhs =
                        col[layout.joint_len() + a] * col[layout.joint_len() + layout.a_len() + b];
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn contradictory_basis_pattern_is_present() {
        // the pattern that answers +1 for the z basis and -1 for the x
        // basis on the same hidden value: unreachable quantumly, but a
        // legitimate cone generator
        let layout = shape(vec![2, 2], vec![2]);
        let gens = build_for_layout(layout).unwrap();
        let target = vec![true, false, false, true];
        assert!((0..gens.count()).any(|c| gens.assignment(c).bits_a == target));
    }

    #[test]
    fn deterministic_product_event_vector_is_a_generator_column() {
        // |00><00| measured in the z basis on both sides
        let mut m = ComplexMatrix::zeros(4, 4);
        m.set(0, 0, C64::new(1.0, 0.0));
        let rho = DensityMatrix::from_matrix(2, 2, m).unwrap();
        let z = projective_from_bloch([0.0, 0.0, 1.0]).unwrap();
        let config = MeasurementConfig::new(vec![z.clone()], vec![z]).unwrap();
        let p = event_vector(&rho, &config).unwrap().full_vector();

        let gens = build_generators(&config).unwrap();
        // bitsA = (1,0), bitsB = (1,0): lambda = 0b10_10
        let expected = BooleanAssignment {
            lambda_index: 0,
            bits_a: vec![true, false],
            bits_b: vec![true, false],
        }
        .encode();
        let mut col = vec![0.0; gens.rows()];
        gens.write_column(expected as usize, &mut col);
        for (x, y) in p.iter().zip(&col) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn guards_reject_oversized_scenarios() {
        let layout = shape(vec![2; 6], vec![2; 5]); // 22 bits
        assert!(matches!(
            build_for_layout(layout.clone()),
            Err(ConeError::TooLarge { .. })
        ));
        // still fine to enumerate lazily
        assert!(enumerate_for_layout(layout).is_ok());

        let huge = shape(vec![2; 8], vec![2; 8]); // 32 bits
        assert!(enumerate_for_layout(huge).is_err());
    }

    #[test]
    fn dense_export_matches_columns() {
        let layout = shape(vec![2], vec![2]);
        let gens = build_for_layout(layout).unwrap();
        let dense = gens.to_dense_matrix();
        assert_eq!((dense.rows(), dense.cols()), (8, 16));
        let mut col = vec![0.0; 8];
        for c in 0..16 {
            gens.write_column(c, &mut col);
            for (r, &v) in col.iter().enumerate() {
                assert_eq!(dense.get(r, c).re, v);
            }
        }
    }
}
