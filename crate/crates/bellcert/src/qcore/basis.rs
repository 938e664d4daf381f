//! Generalized Gell-Mann basis for Hermitian operators.

use super::herm::HermitianOperator;
use super::matrix::{ComplexMatrix, C64};
use super::QcoreError;

/// Ordered operator basis for the Hermitian matrices on a `dim`-dimensional
/// space: `dim^2 - 1` traceless generalized Gell-Mann matrices followed by
/// the identity. All members are pairwise Hilbert-Schmidt orthogonal; the
/// traceless members satisfy `Tr(G^2) = 2`.
#[derive(Debug, Clone)]
pub struct HermitianBasis {
    dim: usize,
    operators: Vec<HermitianOperator>,
}

impl HermitianBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[HermitianOperator] {
        &self.operators
    }

    /// The traceless members, i.e. everything except the trailing identity.
    pub fn traceless(&self) -> &[HermitianOperator] {
        &self.operators[..self.operators.len() - 1]
    }

    pub fn identity(&self) -> &HermitianOperator {
        self.operators.last().expect("basis is nonempty")
    }

    /// `Tr(G_k^2)` for each member, used for expansion coefficients.
    pub fn norms_sq(&self) -> Vec<f64> {
        self.operators.iter().map(|g| g.hs_inner(g)).collect()
    }
}

/// Build the generalized Gell-Mann basis: the symmetric, antisymmetric and
/// diagonal families in that order (each indexed lexicographically), with
/// the identity appended last.
pub fn hermitian_basis(dim: usize) -> Result<HermitianBasis, QcoreError> {
    if dim < 2 {
        return Err(QcoreError::BasisDimension(dim));
    }
    let mut operators = Vec::with_capacity(dim * dim);

    // symmetric: |j><k| + |k><j|
    for j in 0..dim {
        for k in (j + 1)..dim {
            let mut m = ComplexMatrix::zeros(dim, dim);
            m.set(j, k, C64::new(1.0, 0.0));
            m.set(k, j, C64::new(1.0, 0.0));
            operators.push(HermitianOperator::new(m).expect("symmetric member"));
        }
    }
    // antisymmetric: -i|j><k| + i|k><j|
    for j in 0..dim {
        for k in (j + 1)..dim {
            let mut m = ComplexMatrix::zeros(dim, dim);
            m.set(j, k, C64::new(0.0, -1.0));
            m.set(k, j, C64::new(0.0, 1.0));
            operators.push(HermitianOperator::new(m).expect("antisymmetric member"));
        }
    }
    // diagonal: sqrt(2/(l(l+1))) (sum_{m<l} |m><m| - l |l><l|)
    for l in 1..dim {
        let norm = (2.0 / (l as f64 * (l as f64 + 1.0))).sqrt();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for j in 0..l {
            m.set(j, j, C64::new(norm, 0.0));
        }
        m.set(l, l, C64::new(-norm * l as f64, 0.0));
        operators.push(HermitianOperator::new(m).expect("diagonal member"));
    }
    operators.push(HermitianOperator::identity(dim));

    Ok(HermitianBasis { dim, operators })
}
