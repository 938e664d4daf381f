//! Reference states, seeded random states, and the PPT separability test.
//!
//! Random sampling uses ChaCha8 seeded with a caller-supplied `u64`. Each
//! sampler documents its draw order, so a fixed seed yields bitwise
//! identical output on every platform and run.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::qcore::{ComplexMatrix, DensityMatrix, HermitianOperator, QcoreError, Side};

#[derive(Debug, Error)]
pub enum StateError {
    #[error("werner parameter must lie in [0, 1], got {0}")]
    WernerParameter(f64),
    #[error("ensemble needs at least one term")]
    EmptyEnsemble,
    #[error(transparent)]
    Qcore(#[from] QcoreError),
}

/// Explicit convex decomposition of a separable state into pure product
/// terms: weights summing to one, and per-term unit vectors on A and B.
#[derive(Debug, Clone)]
pub struct SeparableEnsemble {
    weights: Vec<f64>,
    factors: Vec<(Vec<C64>, Vec<C64>)>,
}

impl SeparableEnsemble {
    pub fn new(weights: Vec<f64>, factors: Vec<(Vec<C64>, Vec<C64>)>) -> Self {
        assert_eq!(weights.len(), factors.len());
        let total: f64 = weights.iter().sum();
        assert!((total - 1.0).abs() <= 1e-12, "weights sum to {total}");
        assert!(weights.iter().all(|&w| w >= 0.0));
        for (a, b) in &factors {
            let na: f64 = a.iter().map(|z| z.norm_sqr()).sum();
            let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
            assert!((na - 1.0).abs() <= 1e-12 && (nb - 1.0).abs() <= 1e-12);
        }
        Self { weights, factors }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn factors(&self) -> &[(Vec<C64>, Vec<C64>)] {
        &self.factors
    }

    /// Assemble the mixed state `sum_i p_i |a_i><a_i| (x) |b_i><b_i|`.
    pub fn to_density(&self) -> Result<DensityMatrix, StateError> {
        let (da, db) = (self.factors[0].0.len(), self.factors[0].1.len());
        let mut m = ComplexMatrix::zeros(da * db, da * db);
        for (w, (a, b)) in self.weights.iter().zip(&self.factors) {
            let pa = ComplexMatrix::outer(a, a);
            let pb = ComplexMatrix::outer(b, b);
            m = m.add_matrix(&pa.kron(&pb).scale_re(*w));
        }
        Ok(DensityMatrix::from_matrix(da, db, m)?)
    }
}

/// Projector onto the singlet `(|01> - |10>)/sqrt(2)`.
pub fn singlet() -> DensityMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = [
        C64::new(0.0, 0.0),
        C64::new(s, 0.0),
        C64::new(-s, 0.0),
        C64::new(0.0, 0.0),
    ];
    DensityMatrix::from_matrix(2, 2, ComplexMatrix::outer(&v, &v))
        .expect("singlet projector is a valid state")
}

/// Werner line `p * singlet + (1-p) * I/4`.
pub fn werner(p: f64) -> Result<DensityMatrix, StateError> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(StateError::WernerParameter(p));
    }
    let m = singlet()
        .matrix()
        .scale_re(p)
        .add_matrix(&ComplexMatrix::identity(4).scale_re((1.0 - p) / 4.0));
    Ok(DensityMatrix::from_matrix(2, 2, m)?)
}

/// Maximally mixed state `I/(dA*dB)`.
pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> DensityMatrix {
    let d = dim_a * dim_b;
    DensityMatrix::from_matrix(
        dim_a,
        dim_b,
        ComplexMatrix::identity(d).scale_re(1.0 / d as f64),
    )
    .expect("maximally mixed state is valid")
}

/// Haar-random unit vector: `2*dim` standard normals, `(re, im)` per
/// amplitude in index order, then normalized.
fn haar_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re, im)
        })
        .collect();
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

/// Seeded random separable state with an explicit ensemble.
///
/// Draw order: `terms` uniform deviates for the Dirichlet(1) weights
/// (via exponentials), then per term a Haar vector on A followed by a
/// Haar vector on B.
pub fn random_separable(
    dim_a: usize,
    dim_b: usize,
    terms: usize,
    seed: u64,
) -> Result<(DensityMatrix, SeparableEnsemble), StateError> {
    if terms == 0 {
        return Err(StateError::EmptyEnsemble);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights: Vec<f64> = (0..terms)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let factors: Vec<(Vec<C64>, Vec<C64>)> = (0..terms)
        .map(|_| {
            let a = haar_vector(&mut rng, dim_a);
            let b = haar_vector(&mut rng, dim_b);
            (a, b)
        })
        .collect();
    let ensemble = SeparableEnsemble::new(weights, factors);
    let rho = ensemble.to_density()?;
    Ok((rho, ensemble))
}

/// Seeded random density matrix `G G† / Tr(G G†)` with complex Gaussian `G`.
///
/// Draw order: the `(dA*dB)^2` entries of `G` row-major, two standard
/// normals (re, im) per entry.
pub fn random_density(dim_a: usize, dim_b: usize, seed: u64) -> Result<DensityMatrix, StateError> {
    let d = dim_a * dim_b;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries: Vec<C64> = (0..d * d)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re, im)
        })
        .collect();
    let g = ComplexMatrix::new(d, d, entries)?;
    let w = g.matmul(&g.adjoint());
    let m = w.scale_re(1.0 / w.trace().re);
    Ok(DensityMatrix::from_matrix(dim_a, dim_b, m)?)
}

/// The five-member Tiles unextendible product basis on 3x3, written as
/// product amplitudes per member.
pub fn tiles_upb_vectors() -> Vec<Vec<C64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let t = 1.0 / 3.0;
    let pairs: [([f64; 3], [f64; 3]); 5] = [
        ([1.0, 0.0, 0.0], [s, -s, 0.0]),
        ([s, -s, 0.0], [0.0, 0.0, 1.0]),
        ([0.0, 0.0, 1.0], [0.0, s, -s]),
        ([0.0, s, -s], [1.0, 0.0, 0.0]),
        ([t, t, t], [1.0, 1.0, 1.0]),
    ];
    pairs
        .iter()
        .map(|(a, b)| {
            let mut v = Vec::with_capacity(9);
            for &x in a {
                for &y in b {
                    v.push(C64::new(x * y, 0.0));
                }
            }
            v
        })
        .collect()
}

/// PPT bound entangled state built from the Tiles basis:
/// `(I - sum_i |psi_i><psi_i|) / 4`.
pub fn tiles_upb_state() -> DensityMatrix {
    let mut m = ComplexMatrix::identity(9);
    for v in tiles_upb_vectors() {
        m = m.sub_matrix(&ComplexMatrix::outer(&v, &v));
    }
    DensityMatrix::from_matrix(3, 3, m.scale_re(0.25))
        .expect("tiles complement projector is a valid state")
}

/// Partial-transpose test: `is_ppt` iff the minimum eigenvalue of the
/// partial transpose over B is at least `-1e-10`. At dimensions (2,2)
/// and (2,3) this doubles as an exact separability verdict.
pub fn ppt_test(rho: &DensityMatrix) -> (bool, f64) {
    let pt = rho
        .matrix()
        .partial_transpose(rho.dims(), Side::B)
        .expect("density matrix dims are consistent");
    let h = HermitianOperator::new(pt).expect("partial transpose preserves Hermiticity");
    let (is_ppt, min) = h.is_positive_semidefinite(1e-10);
    (is_ppt, min)
}
