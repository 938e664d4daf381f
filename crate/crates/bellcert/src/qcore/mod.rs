//! Dense complex linear algebra and bipartite operator primitives.
//!
//! Everything above this module manipulates operators on small Hilbert
//! spaces (dimensions stay below ~16), so all storage is dense row-major
//! and all algorithms are direct. Types are immutable after construction
//! and all operations are pure functions.

mod basis;
mod eigen;
mod herm;
mod matrix;

pub use basis::{hermitian_basis, HermitianBasis};
pub use eigen::Eigensystem;
pub use herm::{DensityMatrix, HermitianOperator};
pub use matrix::{ComplexMatrix, C64};

pub(crate) use herm::bloch_dot_sigma;

use thiserror::Error;

/// Default relative tolerance for spectral checks (PSD tests, trace checks).
pub const DEFAULT_TOL: f64 = 1e-10;

/// Relative tolerance for accepting a matrix as Hermitian on construction.
pub const HERMITICITY_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum QcoreError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("matrix is not Hermitian: max |M - M†| = {deviation:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { deviation: f64, tol: f64 },
    #[error("not a density matrix: {0}")]
    NotDensity(String),
    #[error("basis dimension must be at least 2, got {0}")]
    BasisDimension(usize),
}

/// Which tensor factor of a bipartite operator an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Side {
    A,
    B,
}
