//! POVMs, measurement configurations, event vectors, and tomography.
//!
//! # Event-vector layout
//!
//! An event vector stacks three blocks of outcome probabilities for a fixed
//! configuration: the joint block, Alice's marginals, Bob's marginals.
//! Within a party, outcome slots are flattened measurement-major: slot
//! `(i, k)` (measurement `i`, outcome `k`) sits at `sum_{i'<i} k(i') + k`.
//! The joint block is ordered lexicographically in `(i, k, j, l)`, Alice
//! slot major and Bob slot minor, so the joint block of any product vector is
//! the flattened outer product of the two marginal blocks. This fixed
//! ordering is what makes certificates exchangeable between runs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qcore::{
    hermitian_basis, ComplexMatrix, DensityMatrix, HermitianBasis, HermitianOperator, QcoreError,
    C64,
};

#[derive(Debug, Error)]
pub enum MeasurementError {
    #[error("a POVM needs at least one element")]
    EmptyPovm,
    #[error("POVM elements must share one dimension")]
    MixedDimensions,
    #[error("POVM element is not positive semidefinite: min eigenvalue {min:.3e}")]
    NegativeElement { min: f64 },
    #[error("POVM elements do not sum to the identity: deviation {deviation:.3e}")]
    Completeness { deviation: f64 },
    #[error("Bloch vector must have unit norm, got {norm}")]
    NonUnitBloch { norm: f64 },
    #[error("configuration needs at least one measurement per side")]
    EmptyConfig,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("event vector layout does not match the configuration")]
    LayoutMismatch,
    #[error("probabilities are inconsistent with this configuration: residual {residual:.3e}")]
    InconsistentProbabilities { residual: f64 },
    #[error("reconstruction is not positive semidefinite: min eigenvalue {min:.3e}")]
    NotPositive { min: f64 },
    #[error("measurement map is singular; the configuration does not determine the state")]
    SingularSystem,
    #[error(transparent)]
    Qcore(#[from] QcoreError),
}

/// A validated measurement: positive operators summing to the identity,
/// one per outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Povm {
    elements: Vec<HermitianOperator>,
    #[serde(skip)]
    has_zero_element: bool,
}

impl Povm {
    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn outcomes(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    /// True when some element is the zero operator; allowed but worth
    /// surfacing, since a zero outcome can never occur.
    pub fn has_zero_element(&self) -> bool {
        self.has_zero_element
    }
}

impl<'de> Deserialize<'de> for Povm {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let elements = Vec::<HermitianOperator>::deserialize(deserializer)?;
        validate_povm(elements).map_err(serde::de::Error::custom)
    }
}

/// Check the POVM constraints: every element PSD within `1e-10`, elements
/// summing to the identity within `1e-10`. Zero elements are permitted but
/// flagged on the returned value.
pub fn validate_povm(candidate: Vec<HermitianOperator>) -> Result<Povm, MeasurementError> {
    let first = candidate.first().ok_or(MeasurementError::EmptyPovm)?;
    let dim = first.dim();
    if candidate.iter().any(|e| e.dim() != dim) {
        return Err(MeasurementError::MixedDimensions);
    }
    let mut has_zero_element = false;
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for e in &candidate {
        let (ok, min) = e.is_positive_semidefinite(1e-10);
        if !ok {
            return Err(MeasurementError::NegativeElement { min });
        }
        if e.matrix().max_abs() <= 1e-14 {
            has_zero_element = true;
        }
        sum = sum.add_matrix(e.matrix());
    }
    let deviation = sum.max_deviation(&ComplexMatrix::identity(dim));
    if deviation > 1e-10 {
        return Err(MeasurementError::Completeness { deviation });
    }
    Ok(Povm {
        elements: candidate,
        has_zero_element,
    })
}

/// Two-outcome qubit measurement along a Bloch direction, `+1` outcome
/// first: `{(I + a.sigma)/2, (I - a.sigma)/2}`.
pub fn projective_from_bloch(a: [f64; 3]) -> Result<Povm, MeasurementError> {
    let norm = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(MeasurementError::NonUnitBloch { norm });
    }
    let dot = crate::qcore::bloch_dot_sigma(a);
    let plus = ComplexMatrix::identity(2).add_matrix(&dot).scale_re(0.5);
    let minus = ComplexMatrix::identity(2).sub_matrix(&dot).scale_re(0.5);
    validate_povm(vec![
        HermitianOperator::new(plus)?,
        HermitianOperator::new(minus)?,
    ])
}

/// Projective measurement from an orthonormal frame (the columns of a
/// unitary): one rank-one projector per column.
pub fn projective_from_frame(frame: &ComplexMatrix) -> Result<Povm, MeasurementError> {
    let dim = frame.rows();
    let mut elements = Vec::with_capacity(dim);
    for k in 0..dim {
        let col: Vec<C64> = (0..dim).map(|r| frame.get(r, k)).collect();
        elements.push(HermitianOperator::new(ComplexMatrix::outer(&col, &col))?);
    }
    validate_povm(elements)
}

/// Alice's and Bob's measurement lists. Dimensions are uniform per side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementConfig {
    alice: Vec<Povm>,
    bob: Vec<Povm>,
}

impl MeasurementConfig {
    pub fn new(alice: Vec<Povm>, bob: Vec<Povm>) -> Result<Self, MeasurementError> {
        if alice.is_empty() || bob.is_empty() {
            return Err(MeasurementError::EmptyConfig);
        }
        let da = alice[0].dim();
        let db = bob[0].dim();
        if alice.iter().any(|m| m.dim() != da) || bob.iter().any(|m| m.dim() != db) {
            return Err(MeasurementError::MixedDimensions);
        }
        Ok(Self { alice, bob })
    }

    pub fn alice(&self) -> &[Povm] {
        &self.alice
    }

    pub fn bob(&self) -> &[Povm] {
        &self.bob
    }

    pub fn dim_a(&self) -> usize {
        self.alice[0].dim()
    }

    pub fn dim_b(&self) -> usize {
        self.bob[0].dim()
    }

    pub fn layout(&self) -> EventLayout {
        EventLayout {
            alice_outcomes: self.alice.iter().map(Povm::outcomes).collect(),
            bob_outcomes: self.bob.iter().map(Povm::outcomes).collect(),
        }
    }
}

impl<'de> Deserialize<'de> for MeasurementConfig {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            alice: Vec<Povm>,
            bob: Vec<Povm>,
        }
        let raw = Raw::deserialize(deserializer)?;
        MeasurementConfig::new(raw.alice, raw.bob).map_err(serde::de::Error::custom)
    }
}

/// Outcome counts per measurement, fixing the event-vector index layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventLayout {
    pub alice_outcomes: Vec<usize>,
    pub bob_outcomes: Vec<usize>,
}

impl EventLayout {
    pub fn a_len(&self) -> usize {
        self.alice_outcomes.iter().sum()
    }

    pub fn b_len(&self) -> usize {
        self.bob_outcomes.iter().sum()
    }

    pub fn joint_len(&self) -> usize {
        self.a_len() * self.b_len()
    }

    pub fn total_len(&self) -> usize {
        self.joint_len() + self.a_len() + self.b_len()
    }

    /// Flat Alice slot for measurement `i`, outcome `k`.
    pub fn a_slot(&self, i: usize, k: usize) -> usize {
        debug_assert!(k < self.alice_outcomes[i]);
        self.alice_outcomes[..i].iter().sum::<usize>() + k
    }

    /// Flat Bob slot for measurement `j`, outcome `l`.
    pub fn b_slot(&self, j: usize, l: usize) -> usize {
        debug_assert!(l < self.bob_outcomes[j]);
        self.bob_outcomes[..j].iter().sum::<usize>() + l
    }

    /// Joint index from flat party slots (Alice major).
    pub fn joint_slot(&self, a_slot: usize, b_slot: usize) -> usize {
        a_slot * self.b_len() + b_slot
    }
}

/// The stacked probability vector `(joint, margA, margB)` of a
/// configuration applied to a state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventVector {
    pub joint: Vec<f64>,
    #[serde(rename = "margA")]
    pub marg_a: Vec<f64>,
    #[serde(rename = "margB")]
    pub marg_b: Vec<f64>,
    pub layout: EventLayout,
}

impl EventVector {
    pub fn total_len(&self) -> usize {
        self.joint.len() + self.marg_a.len() + self.marg_b.len()
    }

    /// Concatenated `(joint, margA, margB)` in the canonical order.
    pub fn full_vector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.total_len());
        v.extend_from_slice(&self.joint);
        v.extend_from_slice(&self.marg_a);
        v.extend_from_slice(&self.marg_b);
        v
    }

    pub fn validate_shape(&self) -> bool {
        self.joint.len() == self.layout.joint_len()
            && self.marg_a.len() == self.layout.a_len()
            && self.marg_b.len() == self.layout.b_len()
    }
}

/// Compute the event vector of `rho` under `config`: joint entries
/// `Tr(E^A_{i,k} (x) E^B_{j,l} rho)` and the two marginal blocks.
pub fn event_vector(
    rho: &DensityMatrix,
    config: &MeasurementConfig,
) -> Result<EventVector, MeasurementError> {
    if rho.dim_a() != config.dim_a() || rho.dim_b() != config.dim_b() {
        return Err(MeasurementError::DimensionMismatch(format!(
            "state dims ({}, {}) vs config dims ({}, {})",
            rho.dim_a(),
            rho.dim_b(),
            config.dim_a(),
            config.dim_b()
        )));
    }
    let layout = config.layout();
    let rho_a = rho.reduced_a();
    let rho_b = rho.reduced_b();

    let marg_a: Vec<f64> = config
        .alice
        .iter()
        .flat_map(|m| {
            m.elements()
                .iter()
                .map(|e| e.matrix().trace_product(&rho_a).re)
        })
        .collect();
    let marg_b: Vec<f64> = config
        .bob
        .iter()
        .flat_map(|m| {
            m.elements()
                .iter()
                .map(|e| e.matrix().trace_product(&rho_b).re)
        })
        .collect();

    let mut joint = vec![0.0; layout.joint_len()];
    let mut a_slot = 0;
    for ma in &config.alice {
        for ea in ma.elements() {
            let mut b_slot = 0;
            for mb in &config.bob {
                for eb in mb.elements() {
                    let p = ea.matrix().kron(eb.matrix()).trace_product(rho.matrix()).re;
                    joint[layout.joint_slot(a_slot, b_slot)] = p;
                    b_slot += 1;
                }
            }
            a_slot += 1;
        }
    }

    Ok(EventVector {
        joint,
        marg_a,
        marg_b,
        layout,
    })
}

/// One von Neumann measurement per traceless basis operator: the rank-one
/// projectors onto its eigenvectors, in descending-eigenvalue order. The
/// outcome probabilities of this set determine the state uniquely.
pub fn complete_config(dim_a: usize, dim_b: usize) -> Result<MeasurementConfig, MeasurementError> {
    let side = |dim: usize| -> Result<Vec<Povm>, MeasurementError> {
        let basis = hermitian_basis(dim)?;
        basis
            .traceless()
            .iter()
            .map(|op| projective_from_frame(&op.eigensystem().vectors))
            .collect()
    };
    MeasurementConfig::new(side(dim_a)?, side(dim_b)?)
}

/// Real coefficients of a bipartite Hermitian operator over product bases:
/// `H = sum_ij mu_ij S_i (x) T_j + sum_i a_i S_i (x) 1 + sum_j b_j 1 (x) T_j
/// + c 1 (x) 1` with `S`, `T` the traceless basis members.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisExpansion {
    pub dim_a: usize,
    pub dim_b: usize,
    /// `mu_ij`, row-major over (i, j).
    pub joint: Vec<f64>,
    pub alice: Vec<f64>,
    pub bob: Vec<f64>,
    pub constant: f64,
}

impl BasisExpansion {
    /// Rebuild the operator from the coefficients.
    pub fn resum(&self, basis_a: &HermitianBasis, basis_b: &HermitianBasis) -> HermitianOperator {
        let da = self.dim_a;
        let db = self.dim_b;
        let nb = basis_b.traceless().len();
        let mut m = ComplexMatrix::identity(da * db).scale_re(self.constant);
        for (i, s) in basis_a.traceless().iter().enumerate() {
            for (j, t) in basis_b.traceless().iter().enumerate() {
                let mu = self.joint[i * nb + j];
                if mu != 0.0 {
                    m = m.add_matrix(&s.matrix().kron(t.matrix()).scale_re(mu));
                }
            }
        }
        for (i, s) in basis_a.traceless().iter().enumerate() {
            if self.alice[i] != 0.0 {
                m = m.add_matrix(
                    &s.matrix()
                        .kron(&ComplexMatrix::identity(db))
                        .scale_re(self.alice[i]),
                );
            }
        }
        for (j, t) in basis_b.traceless().iter().enumerate() {
            if self.bob[j] != 0.0 {
                m = m.add_matrix(
                    &ComplexMatrix::identity(da)
                        .kron(t.matrix())
                        .scale_re(self.bob[j]),
                );
            }
        }
        HermitianOperator::new(m).expect("resummed operator is Hermitian")
    }
}

/// Unique expansion coefficients via Hilbert-Schmidt inner products.
pub fn expand_in_basis(
    h: &HermitianOperator,
    basis_a: &HermitianBasis,
    basis_b: &HermitianBasis,
) -> Result<BasisExpansion, MeasurementError> {
    let da = basis_a.dim();
    let db = basis_b.dim();
    if h.dim() != da * db {
        return Err(MeasurementError::DimensionMismatch(format!(
            "operator dim {} vs basis dims {}x{}",
            h.dim(),
            da,
            db
        )));
    }
    let nb = basis_b.traceless().len();
    let mut joint = vec![0.0; basis_a.traceless().len() * nb];
    for (i, s) in basis_a.traceless().iter().enumerate() {
        let ns = s.hs_inner(s);
        for (j, t) in basis_b.traceless().iter().enumerate() {
            let nt = t.hs_inner(t);
            let overlap = s.matrix().kron(t.matrix()).trace_product(h.matrix()).re;
            joint[i * nb + j] = overlap / (ns * nt);
        }
    }
    let alice: Vec<f64> = basis_a
        .traceless()
        .iter()
        .map(|s| {
            let overlap = s
                .matrix()
                .kron(&ComplexMatrix::identity(db))
                .trace_product(h.matrix())
                .re;
            overlap / (s.hs_inner(s) * db as f64)
        })
        .collect();
    let bob: Vec<f64> = basis_b
        .traceless()
        .iter()
        .map(|t| {
            let overlap = ComplexMatrix::identity(da)
                .kron(t.matrix())
                .trace_product(h.matrix())
                .re;
            overlap / (da as f64 * t.hs_inner(t))
        })
        .collect();
    let constant = h.trace() / (da * db) as f64;
    Ok(BasisExpansion {
        dim_a: da,
        dim_b: db,
        joint,
        alice,
        bob,
        constant,
    })
}

/// Solve `min ||A x - b||_2` through the normal equations with partial
/// pivoting. `a` is row-major, `rows x cols`.
fn least_squares(a: &[f64], rows: usize, cols: usize, b: &[f64]) -> Option<Vec<f64>> {
    assert_eq!(a.len(), rows * cols);
    assert_eq!(b.len(), rows);
    let mut ata = vec![0.0; cols * cols];
    let mut atb = vec![0.0; cols];
    for r in 0..rows {
        let row = &a[r * cols..(r + 1) * cols];
        for i in 0..cols {
            if row[i] == 0.0 {
                continue;
            }
            atb[i] += row[i] * b[r];
            for j in 0..cols {
                ata[i * cols + j] += row[i] * row[j];
            }
        }
    }
    let n = cols;
    let scale = ata.iter().fold(0.0f64, |m, &v| m.max(v.abs())).max(1e-300);
    for col in 0..n {
        let mut pivot = col;
        for r in (col + 1)..n {
            if ata[r * n + col].abs() > ata[pivot * n + col].abs() {
                pivot = r;
            }
        }
        if ata[pivot * n + col].abs() < 1e-12 * scale {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                ata.swap(col * n + j, pivot * n + j);
            }
            atb.swap(col, pivot);
        }
        let d = ata[col * n + col];
        for r in (col + 1)..n {
            let f = ata[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                ata[r * n + j] -= f * ata[col * n + j];
            }
            atb[r] -= f * atb[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = atb[col];
        for j in (col + 1)..n {
            acc -= ata[col * n + j] * x[j];
        }
        x[col] = acc / ata[col * n + col];
    }
    Some(x)
}

/// Reconstruct the unique state matching an event vector produced under
/// `config`, by least squares over the product operator basis.
///
/// The probability map is overdetermined (joint block plus marginals), so
/// inconsistent input shows up as a residual: anything above `1e-8` is
/// rejected rather than silently projected. Likewise a reconstruction with
/// an eigenvalue below `-1e-8` is rejected; smaller negative rounding is
/// clipped and the trace renormalized.
pub fn reconstruct_state(
    p: &EventVector,
    config: &MeasurementConfig,
) -> Result<DensityMatrix, MeasurementError> {
    if p.layout != config.layout() || !p.validate_shape() {
        return Err(MeasurementError::LayoutMismatch);
    }
    let da = config.dim_a();
    let db = config.dim_b();
    let basis_a = hermitian_basis(da)?;
    let basis_b = hermitian_basis(db)?;
    let ga = basis_a.operators();
    let gb = basis_b.operators();
    let na = ga.len();
    let nb = gb.len();
    let cols = na * nb;

    // per-side overlap tables: Tr(E^A_{i,k} G_alpha), Tr(E^B_{j,l} G_beta)
    let ta: Vec<Vec<f64>> = config
        .alice
        .iter()
        .flat_map(|m| m.elements().iter())
        .map(|e| ga.iter().map(|g| e.hs_inner(g)).collect())
        .collect();
    let tb: Vec<Vec<f64>> = config
        .bob
        .iter()
        .flat_map(|m| m.elements().iter())
        .map(|e| gb.iter().map(|g| e.hs_inner(g)).collect())
        .collect();
    let tr_ga: Vec<f64> = ga.iter().map(HermitianOperator::trace).collect();
    let tr_gb: Vec<f64> = gb.iter().map(HermitianOperator::trace).collect();

    let layout = &p.layout;
    let rows = layout.total_len();
    let mut a = vec![0.0; rows * cols];
    let mut rhs = vec![0.0; rows];
    let mut row = 0;
    for sa in &ta {
        for sb in &tb {
            for alpha in 0..na {
                for beta in 0..nb {
                    a[row * cols + alpha * nb + beta] = sa[alpha] * sb[beta];
                }
            }
            row += 1;
        }
    }
    rhs[..layout.joint_len()].copy_from_slice(&p.joint);
    for sa in &ta {
        for alpha in 0..na {
            for beta in 0..nb {
                a[row * cols + alpha * nb + beta] = sa[alpha] * tr_gb[beta];
            }
        }
        row += 1;
    }
    rhs[layout.joint_len()..layout.joint_len() + layout.a_len()].copy_from_slice(&p.marg_a);
    for sb in &tb {
        for alpha in 0..na {
            for beta in 0..nb {
                a[row * cols + alpha * nb + beta] = tr_ga[alpha] * sb[beta];
            }
        }
        row += 1;
    }
    rhs[layout.joint_len() + layout.a_len()..].copy_from_slice(&p.marg_b);
    debug_assert_eq!(row, rows);

    let x = least_squares(&a, rows, cols, &rhs).ok_or(MeasurementError::SingularSystem)?;

    let mut residual: f64 = 0.0;
    for r in 0..rows {
        let mut acc = 0.0;
        for c in 0..cols {
            acc += a[r * cols + c] * x[c];
        }
        residual = residual.max((acc - rhs[r]).abs());
    }
    if residual > 1e-8 {
        return Err(MeasurementError::InconsistentProbabilities { residual });
    }

    let mut m = ComplexMatrix::zeros(da * db, da * db);
    for alpha in 0..na {
        for beta in 0..nb {
            let coeff = x[alpha * nb + beta];
            if coeff != 0.0 {
                m = m.add_matrix(&ga[alpha].matrix().kron(gb[beta].matrix()).scale_re(coeff));
            }
        }
    }
    let m = m.symmetrize();
    let tr = m.trace().re;
    let m = m.scale_re(1.0 / tr);
    let h = HermitianOperator::new(m)?;
    let eig = h.eigensystem();
    let min = eig.min_value();
    if min < -1e-8 {
        return Err(MeasurementError::NotPositive { min });
    }
    // clip rounding-level negatives and renormalize
    let clipped: Vec<f64> = eig.values.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let eigfixed = crate::qcore::Eigensystem {
        values: clipped.iter().map(|v| v / total).collect(),
        vectors: eig.vectors,
    };
    Ok(DensityMatrix::from_matrix(da, db, eigfixed.reconstruct())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::Side;
    use crate::states::{maximally_mixed, random_density, singlet};

    fn z_basis() -> Povm {
        projective_from_bloch([0.0, 0.0, 1.0]).unwrap()
    }

    fn x_basis() -> Povm {
        projective_from_bloch([1.0, 0.0, 0.0]).unwrap()
    }

    /// Three-outcome qubit POVM from trine directions, elements `2/3 * P`.
    fn trine_povm() -> Povm {
        let elements = (0..3)
            .map(|k| {
                let angle = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                let dot = crate::qcore::bloch_dot_sigma([angle.cos(), 0.0, angle.sin()]);
                let p = ComplexMatrix::identity(2).add_matrix(&dot).scale_re(0.5);
                HermitianOperator::new(p.scale_re(2.0 / 3.0)).unwrap()
            })
            .collect();
        validate_povm(elements).unwrap()
    }

    #[test]
    fn validate_povm_cases() {
        let proj = z_basis();
        assert_eq!(proj.outcomes(), 2);
        assert!(!proj.has_zero_element());

        let single = validate_povm(vec![HermitianOperator::identity(2)]).unwrap();
        assert_eq!(single.outcomes(), 1);

        let p0 = proj.elements()[0].clone();
        let err = validate_povm(vec![p0.clone(), p0]);
        assert!(matches!(err, Err(MeasurementError::Completeness { .. })));
    }

    #[test]
    fn zero_element_is_flagged() {
        let zero = HermitianOperator::new(ComplexMatrix::zeros(2, 2)).unwrap();
        let povm = validate_povm(vec![HermitianOperator::identity(2), zero]).unwrap();
        assert!(povm.has_zero_element());
    }

    #[test]
    fn bloch_projectors() {
        let z = z_basis();
        assert!((z.elements()[0].matrix().get(0, 0).re - 1.0).abs() < 1e-15);
        assert!((z.elements()[1].matrix().get(1, 1).re - 1.0).abs() < 1e-15);

        let x = x_basis();
        // projectors onto (|0> +- |1>)/sqrt(2)
        assert!((x.elements()[0].matrix().get(0, 1).re - 0.5).abs() < 1e-15);
        assert!((x.elements()[1].matrix().get(0, 1).re + 0.5).abs() < 1e-15);

        assert!(projective_from_bloch([0.5, 0.0, 0.0]).is_err());
    }

    #[test]
    fn bloch_elements_sum_to_identity() {
        use proptest::prelude::*;
        proptest!(ProptestConfig::with_cases(30), |(theta in 0.0..std::f64::consts::PI, phi in 0.0..(2.0*std::f64::consts::PI))| {
            let a = [theta.sin()*phi.cos(), theta.sin()*phi.sin(), theta.cos()];
            let povm = projective_from_bloch(a).unwrap();
            let sum = povm.elements()[0].matrix().add_matrix(povm.elements()[1].matrix());
            prop_assert!(sum.max_deviation(&ComplexMatrix::identity(2)) < 1e-12);
        });
    }

    #[test]
    fn event_vector_paper_shape() {
        // two 2-outcome measurements against one 3-outcome measurement
        let config =
            MeasurementConfig::new(vec![z_basis(), x_basis()], vec![trine_povm()]).unwrap();
        let p = event_vector(&singlet(), &config).unwrap();
        assert_eq!(p.joint.len(), 12);
        assert_eq!(p.marg_a.len(), 4);
        assert_eq!(p.marg_b.len(), 3);
        assert_eq!(p.total_len(), 19);
    }

    #[test]
    fn event_vector_deterministic_state() {
        let rho = {
            let mut m = ComplexMatrix::zeros(4, 4);
            m.set(0, 0, C64::new(1.0, 0.0));
            DensityMatrix::from_matrix(2, 2, m).unwrap()
        };
        let config = MeasurementConfig::new(vec![z_basis()], vec![z_basis()]).unwrap();
        let p = event_vector(&rho, &config).unwrap();
        assert_eq!(p.joint.len(), 4);
        assert!((p.joint[0] - 1.0).abs() < 1e-14);
        assert!(p.joint[1].abs() < 1e-14);
        assert!(p.joint[2].abs() < 1e-14);
        assert!(p.joint[3].abs() < 1e-14);
        assert!((p.marg_a[0] - 1.0).abs() < 1e-14 && p.marg_a[1].abs() < 1e-14);
        assert!((p.marg_b[0] - 1.0).abs() < 1e-14 && p.marg_b[1].abs() < 1e-14);
    }

    #[test]
    fn singlet_correlations_closed_form() {
        use proptest::prelude::*;
        proptest!(ProptestConfig::with_cases(25), |(ta in 0.0..std::f64::consts::PI, pa in 0.0..(2.0*std::f64::consts::PI), tb in 0.0..std::f64::consts::PI, pb in 0.0..(2.0*std::f64::consts::PI))| {
            let a = [ta.sin()*pa.cos(), ta.sin()*pa.sin(), ta.cos()];
            let b = [tb.sin()*pb.cos(), tb.sin()*pb.sin(), tb.cos()];
            let config = MeasurementConfig::new(
                vec![projective_from_bloch(a).unwrap()],
                vec![projective_from_bloch(b).unwrap()],
            ).unwrap();
            let p = event_vector(&singlet(), &config).unwrap();
            let dot = a[0]*b[0] + a[1]*b[1] + a[2]*b[2];
            prop_assert!((p.joint[0] - (1.0 - dot)/4.0).abs() < 1e-12);
        });
    }

    #[test]
    fn event_vector_is_affine_and_no_signalling() {
        let r1 = random_density(2, 2, 3).unwrap();
        let r2 = random_density(2, 2, 4).unwrap();
        let lam = 0.3;
        let mix = DensityMatrix::from_matrix(
            2,
            2,
            r1.matrix()
                .scale_re(lam)
                .add_matrix(&r2.matrix().scale_re(1.0 - lam)),
        )
        .unwrap();
        let config = complete_config(2, 2).unwrap();
        let p1 = event_vector(&r1, &config).unwrap().full_vector();
        let p2 = event_vector(&r2, &config).unwrap().full_vector();
        let pm = event_vector(&mix, &config).unwrap().full_vector();
        for i in 0..pm.len() {
            assert!((pm[i] - (lam * p1[i] + (1.0 - lam) * p2[i])).abs() < 1e-12);
        }

        // per-measurement normalization and marginal consistency
        let p = event_vector(&r1, &config).unwrap();
        let layout = &p.layout;
        for i in 0..layout.alice_outcomes.len() {
            let total: f64 = (0..layout.alice_outcomes[i])
                .map(|k| p.marg_a[layout.a_slot(i, k)])
                .sum();
            assert!((total - 1.0).abs() < 1e-10);
        }
        for (i, &ka) in layout.alice_outcomes.iter().enumerate() {
            for k in 0..ka {
                let a_slot = layout.a_slot(i, k);
                // sum over any fixed Bob measurement recovers the A marginal
                let total: f64 = (0..layout.bob_outcomes[0])
                    .map(|l| p.joint[layout.joint_slot(a_slot, layout.b_slot(0, l))])
                    .sum();
                assert!((total - p.marg_a[a_slot]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn quantum_event_vectors_stay_in_unit_range() {
        for seed in 0..10u64 {
            let rho = random_density(2, 3, 40 + seed).unwrap();
            let config = complete_config(2, 3).unwrap();
            let p = event_vector(&rho, &config).unwrap();
            for v in p.full_vector() {
                assert!(
                    (-1e-12..=1.0 + 1e-12).contains(&v),
                    "entry {v} out of range"
                );
            }
        }
    }

    #[test]
    fn complete_config_shapes() {
        let c22 = complete_config(2, 2).unwrap();
        assert_eq!(c22.alice().len(), 3);
        assert!(c22.alice().iter().all(|m| m.outcomes() == 2));

        let c33 = complete_config(3, 3).unwrap();
        assert_eq!(c33.alice().len(), 8);
        assert!(c33.alice().iter().all(|m| m.outcomes() == 3));
    }

    #[test]
    fn tomography_roundtrip_dims_22_23() {
        for seed in 0..100u64 {
            let (da, db) = if seed % 2 == 0 { (2, 2) } else { (2, 3) };
            let rho = random_density(da, db, seed).unwrap();
            let config = complete_config(da, db).unwrap();
            let p = event_vector(&rho, &config).unwrap();
            let back = reconstruct_state(&p, &config).unwrap();
            let dev = back.matrix().max_deviation(rho.matrix());
            assert!(dev <= 1e-10, "seed {seed}: roundtrip deviation {dev}");
        }
    }

    #[test]
    fn tomography_roundtrip_dims_33() {
        for seed in 0..5u64 {
            let rho = random_density(3, 3, seed).unwrap();
            let config = complete_config(3, 3).unwrap();
            let p = event_vector(&rho, &config).unwrap();
            let back = reconstruct_state(&p, &config).unwrap();
            assert!(back.matrix().max_deviation(rho.matrix()) <= 1e-10);
        }
    }

    #[test]
    fn product_marginal_data_reconstructs_product_state() {
        for seed in 0..20u64 {
            let rho = random_density(2, 2, 1000 + seed).unwrap();
            let config = complete_config(2, 2).unwrap();
            let p = event_vector(&rho, &config).unwrap();
            // joint entries replaced by products of the true marginals
            let layout = p.layout.clone();
            let mut prod = p.clone();
            for a in 0..layout.a_len() {
                for b in 0..layout.b_len() {
                    prod.joint[layout.joint_slot(a, b)] = p.marg_a[a] * p.marg_b[b];
                }
            }
            let back = reconstruct_state(&prod, &config).unwrap();
            let expected = rho.reduced_a().kron(&rho.reduced_b());
            assert!(back.matrix().max_deviation(&expected) <= 1e-10);
        }
    }

    #[test]
    fn singlet_roundtrip_exact() {
        let config = complete_config(2, 2).unwrap();
        let p = event_vector(&singlet(), &config).unwrap();
        let back = reconstruct_state(&p, &config).unwrap();
        assert!(back.matrix().max_deviation(singlet().matrix()) <= 1e-10);
    }

    #[test]
    fn inconsistent_probabilities_rejected() {
        let config = complete_config(2, 2).unwrap();
        let mut p = event_vector(&maximally_mixed(2, 2), &config).unwrap();
        p.joint[0] += 0.1;
        assert!(matches!(
            reconstruct_state(&p, &config),
            Err(MeasurementError::InconsistentProbabilities { .. })
        ));
    }

    #[test]
    fn deterministic_boolean_pattern_is_unphysical() {
        // assigning certain outcomes to every basis at once over-commits
        // the Bloch vector; the solved operator is consistent but not PSD
        let config = complete_config(2, 2).unwrap();
        let layout = config.layout();
        let bits_a = [1.0, 0.0, 0.0, 1.0, 1.0, 0.0];
        let bits_b = [1.0, 0.0, 1.0, 0.0, 1.0, 0.0];
        let mut joint = vec![0.0; layout.joint_len()];
        for a in 0..6 {
            for b in 0..6 {
                joint[layout.joint_slot(a, b)] = bits_a[a] * bits_b[b];
            }
        }
        let p = EventVector {
            joint,
            marg_a: bits_a.to_vec(),
            marg_b: bits_b.to_vec(),
            layout,
        };
        assert!(matches!(
            reconstruct_state(&p, &config),
            Err(MeasurementError::NotPositive { .. })
        ));
    }

    #[test]
    fn expansion_examples_and_roundtrip() {
        let ba = hermitian_basis(2).unwrap();
        let bb = hermitian_basis(2).unwrap();

        let ident = HermitianOperator::identity(4);
        let e = expand_in_basis(&ident, &ba, &bb).unwrap();
        assert!((e.constant - 1.0).abs() < 1e-14);
        assert!(e.joint.iter().all(|&v| v.abs() < 1e-14));
        assert!(e.alice.iter().all(|&v| v.abs() < 1e-14));
        assert!(e.bob.iter().all(|&v| v.abs() < 1e-14));

        // sigma_z (x) sigma_z is a single joint basis member
        let sz = ba.traceless()[2].clone();
        let zz = sz.kron(&sz);
        let e = expand_in_basis(&zz, &ba, &bb).unwrap();
        assert!((e.joint[2 * 3 + 2] - 1.0).abs() < 1e-14);
        assert!((e.joint.iter().map(|v| v.abs()).sum::<f64>() - 1.0).abs() < 1e-14);

        let h = random_density(2, 2, 31).unwrap().op().clone();
        let e = expand_in_basis(&h, &ba, &bb).unwrap();
        assert!(e.resum(&ba, &bb).matrix().max_deviation(h.matrix()) < 1e-12);
    }

    #[test]
    fn marginals_match_full_operators() {
        // Tr(E (x) 1 rho) via the reduced state equals the direct trace
        let rho = random_density(2, 3, 8).unwrap();
        let e = z_basis().elements()[0].clone();
        let direct = e
            .matrix()
            .kron(&ComplexMatrix::identity(3))
            .trace_product(rho.matrix())
            .re;
        let via_reduced = e
            .matrix()
            .trace_product(&rho.matrix().partial_trace((2, 3), Side::B).unwrap())
            .re;
        assert!((direct - via_reduced).abs() < 1e-13);
    }
}
