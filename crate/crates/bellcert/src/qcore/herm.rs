//! Hermitian operators and density matrices.

use serde::{Deserialize, Serialize};

use super::eigen::{jacobi_hermitian, Eigensystem};
use super::matrix::{ComplexMatrix, C64};
use super::{QcoreError, Side, DEFAULT_TOL, HERMITICITY_TOL};

/// A square matrix accepted as Hermitian. Construction symmetrizes
/// `(M + M†)/2` when the deviation is inside tolerance and rejects
/// the input otherwise, so downstream spectral code never sees drift.
///
/// Serializes as the bare matrix (validation reruns on deserialization).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct HermitianOperator {
    #[serde(skip)]
    dim: usize,
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, QcoreError> {
        Self::with_tolerance(matrix, HERMITICITY_TOL)
    }

    /// `tol` is relative to the largest entry magnitude.
    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self, QcoreError> {
        if !matrix.is_square() {
            return Err(QcoreError::DimensionMismatch(format!(
                "Hermitian operator must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_finite() {
            return Err(QcoreError::NonFinite);
        }
        let scale = matrix.max_abs().max(1.0);
        let dev = matrix.hermiticity_deviation();
        if dev > tol * scale {
            return Err(QcoreError::NotHermitian {
                deviation: dev,
                tol: tol * scale,
            });
        }
        Ok(Self {
            dim: matrix.rows(),
            matrix: matrix.symmetrize(),
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr(self · other)`, real for Hermitian pairs; the imaginary residue
    /// is asserted negligible.
    pub fn hs_inner(&self, other: &Self) -> f64 {
        let t = self.matrix.trace_product(&other.matrix);
        debug_assert!(t.im.abs() <= 1e-10 * (1.0 + t.re.abs()));
        t.re
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.add_matrix(&other.matrix),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.sub_matrix(&other.matrix),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.scale_re(factor),
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            dim: self.dim * other.dim,
            matrix: self.matrix.kron(&other.matrix),
        }
    }

    /// Eigenvalues descending, deterministic orthonormal eigenvectors.
    pub fn eigensystem(&self) -> Eigensystem {
        jacobi_hermitian(&self.matrix)
    }

    /// PSD test: true iff the minimum eigenvalue is at least `-tol`.
    /// The minimum eigenvalue is always reported.
    pub fn is_positive_semidefinite(&self, tol: f64) -> (bool, f64) {
        let min = self.eigensystem().min_value();
        (min >= -tol, min)
    }
}

impl<'de> Deserialize<'de> for HermitianOperator {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let matrix = ComplexMatrix::deserialize(deserializer)?;
        HermitianOperator::new(matrix).map_err(serde::de::Error::custom)
    }
}

/// Unit-trace positive semidefinite operator on a bipartite space,
/// with the split `dim_a * dim_b` recorded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityMatrix {
    #[serde(rename = "dimA")]
    dim_a: usize,
    #[serde(rename = "dimB")]
    dim_b: usize,
    #[serde(rename = "matrix")]
    op: HermitianOperator,
}

impl DensityMatrix {
    pub fn new(dim_a: usize, dim_b: usize, op: HermitianOperator) -> Result<Self, QcoreError> {
        if op.dim() != dim_a * dim_b {
            return Err(QcoreError::DimensionMismatch(format!(
                "operator dim {} does not match {}x{}",
                op.dim(),
                dim_a,
                dim_b
            )));
        }
        let tr = op.trace();
        if (tr - 1.0).abs() > 1e-12 {
            return Err(QcoreError::NotDensity(format!("trace {} is not 1", tr)));
        }
        let min = op.eigensystem().min_value();
        if min < -DEFAULT_TOL {
            return Err(QcoreError::NotDensity(format!(
                "minimum eigenvalue {min:.3e} is negative"
            )));
        }
        Ok(Self { dim_a, dim_b, op })
    }

    pub fn from_matrix(dim_a: usize, dim_b: usize, m: ComplexMatrix) -> Result<Self, QcoreError> {
        Self::new(dim_a, dim_b, HermitianOperator::new(m)?)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.op.matrix()
    }

    /// Reduced state on A (`Tr_B`).
    pub fn reduced_a(&self) -> ComplexMatrix {
        self.matrix()
            .partial_trace((self.dim_a, self.dim_b), Side::B)
            .expect("dims validated at construction")
    }

    /// Reduced state on B (`Tr_A`).
    pub fn reduced_b(&self) -> ComplexMatrix {
        self.matrix()
            .partial_trace((self.dim_a, self.dim_b), Side::A)
            .expect("dims validated at construction")
    }

    /// Expectation `Tr(H rho)`; the imaginary residue must be negligible.
    pub fn expectation(&self, h: &HermitianOperator) -> f64 {
        let t = h.matrix().trace_product(self.matrix());
        assert!(
            t.im.abs() <= 1e-12 * (1.0 + t.re.abs()),
            "expectation has imaginary residue {}",
            t.im
        );
        t.re
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(rename = "dimA")]
            dim_a: usize,
            #[serde(rename = "dimB")]
            dim_b: usize,
            matrix: HermitianOperator,
        }
        let raw = Raw::deserialize(deserializer)?;
        DensityMatrix::new(raw.dim_a, raw.dim_b, raw.matrix).map_err(serde::de::Error::custom)
    }
}

/// Pauli matrices in the conventional order (x, y, z).
pub(crate) fn pauli(k: usize) -> ComplexMatrix {
    let (a, b, c, d) = match k {
        0 => (
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ),
        1 => (
            C64::new(0.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
        ),
        2 => (
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(-1.0, 0.0),
        ),
        _ => panic!("pauli index out of range"),
    };
    ComplexMatrix::new(2, 2, vec![a, b, c, d]).unwrap()
}

/// `v . sigma` for a real 3-vector.
pub(crate) fn bloch_dot_sigma(v: [f64; 3]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    for (k, &vk) in v.iter().enumerate() {
        m = m.add_matrix(&pauli(k).scale_re(vk));
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_symmetrizes_small_drift() {
        let mut m = ComplexMatrix::identity(2);
        m.set(0, 1, C64::new(0.5, 1e-14));
        m.set(1, 0, C64::new(0.5, 1e-14)); // conj would be -1e-14
        let h = HermitianOperator::new(m).unwrap();
        assert_eq!(h.matrix().get(0, 1), h.matrix().get(1, 0).conj());
    }

    #[test]
    fn construction_rejects_non_hermitian() {
        let mut m = ComplexMatrix::identity(2);
        m.set(0, 1, C64::new(0.3, 0.0));
        assert!(matches!(
            HermitianOperator::new(m),
            Err(QcoreError::NotHermitian { .. })
        ));
    }

    #[test]
    fn psd_examples() {
        let (ok, min) = HermitianOperator::identity(2).is_positive_semidefinite(1e-10);
        assert!(ok);
        assert!((min - 1.0).abs() < 1e-14);

        let z = HermitianOperator::new(pauli(2)).unwrap();
        let (ok, min) = z.is_positive_semidefinite(1e-10);
        assert!(!ok);
        assert!((min + 1.0).abs() < 1e-14);
    }

    #[test]
    fn density_matrix_validation() {
        let m = ComplexMatrix::identity(4).scale_re(0.25);
        let rho = DensityMatrix::from_matrix(2, 2, m).unwrap();
        assert_eq!(rho.dims(), (2, 2));

        let bad = ComplexMatrix::identity(4); // trace 4
        assert!(DensityMatrix::from_matrix(2, 2, bad).is_err());
    }

    #[test]
    fn density_json_roundtrip() {
        let rho =
            DensityMatrix::from_matrix(2, 2, ComplexMatrix::identity(4).scale_re(0.25)).unwrap();
        let text = serde_json::to_string(&rho).unwrap();
        assert!(text.contains("\"dimA\":2"));
        let back: DensityMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(rho, back);
    }
}
