//! Entanglement witnesses and their correspondence with Farkas vectors.
//!
//! A separating vector `F` over a measurement configuration assembles into
//! a Hermitian operator `H` whose expectation reproduces the dot product:
//! `Tr(H rho) = F . P(rho)` for every state. Nonnegativity of `F` on the
//! LHV generators then forces `Tr(H sigma) >= 0` on all separable states,
//! so a strict violation certifies entanglement. The reverse direction
//! decomposes a given witness over a complete measurement configuration,
//! recovering a vector `F` and an identity offset `c`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::FarkasCertificate;
use crate::measurements::{
    expand_in_basis, projective_from_bloch, EventLayout, MeasurementConfig, MeasurementError,
};
use crate::qcore::{
    bloch_dot_sigma, hermitian_basis, ComplexMatrix, DensityMatrix, HermitianOperator, QcoreError,
    C64,
};
use crate::states::random_separable;

/// Canonical CHSH directions: `b` and `b'` orthogonal axes, `a` and `a'`
/// the diagonal directions that maximize the singlet violation.
pub const CANONICAL_A: [f64; 3] = [
    -std::f64::consts::FRAC_1_SQRT_2,
    0.0,
    -std::f64::consts::FRAC_1_SQRT_2,
];
pub const CANONICAL_A_PRIME: [f64; 3] = [
    std::f64::consts::FRAC_1_SQRT_2,
    0.0,
    -std::f64::consts::FRAC_1_SQRT_2,
];
pub const CANONICAL_B: [f64; 3] = [1.0, 0.0, 0.0];
pub const CANONICAL_B_PRIME: [f64; 3] = [0.0, 0.0, 1.0];

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("F vector length {got} does not match the configuration layout ({expected})")]
    LayoutMismatch { got: usize, expected: usize },
    #[error("direction must be a unit vector, norm {0}")]
    NonUnitVector(f64),
    #[error("configuration is not a complete measurement set: rebuild deviation {deviation:.3e}")]
    NotComplete { deviation: f64 },
    #[error(transparent)]
    Measurement(#[from] MeasurementError),
    #[error(transparent)]
    Qcore(#[from] QcoreError),
}

/// Where a witness came from; farkas provenance keeps enough to rebuild
/// the operator and re-check the construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Provenance {
    Farkas {
        #[serde(rename = "F")]
        f: Vec<f64>,
        config: MeasurementConfig,
    },
    Chsh {
        a: [f64; 3],
        #[serde(rename = "aPrime")]
        a_prime: [f64; 3],
        b: [f64; 3],
        #[serde(rename = "bPrime")]
        b_prime: [f64; 3],
    },
    External,
}

/// Hermitian operator on `A (x) B` used as an entanglement test, with an
/// explicit identity offset `c` (kept separate so the vector part stays
/// layout-compatible with certificates).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    #[serde(rename = "H")]
    op: HermitianOperator,
    #[serde(rename = "dimA")]
    dim_a: usize,
    #[serde(rename = "dimB")]
    dim_b: usize,
    #[serde(rename = "c")]
    offset: f64,
    provenance: Provenance,
}

impl Witness {
    pub fn external(
        op: HermitianOperator,
        dim_a: usize,
        dim_b: usize,
    ) -> Result<Self, WitnessError> {
        if op.dim() != dim_a * dim_b {
            return Err(WitnessError::DimensionMismatch(format!(
                "operator dim {} vs {}x{}",
                op.dim(),
                dim_a,
                dim_b
            )));
        }
        Ok(Self {
            op,
            dim_a,
            dim_b,
            offset: 0.0,
            provenance: Provenance::External,
        })
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// The identity offset `c` carried alongside the operator.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }
}

impl<'de> Deserialize<'de> for Witness {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(rename = "H")]
            op: HermitianOperator,
            #[serde(rename = "dimA")]
            dim_a: usize,
            #[serde(rename = "dimB")]
            dim_b: usize,
            #[serde(rename = "c", default)]
            offset: f64,
            #[serde(default = "external")]
            provenance: Provenance,
        }
        fn external() -> Provenance {
            Provenance::External
        }
        let raw = Raw::deserialize(deserializer)?;
        let op = raw.op;
        if op.dim() != raw.dim_a * raw.dim_b {
            return Err(serde::de::Error::custom(
                "witness dims do not match the matrix",
            ));
        }
        // farkas provenance must rebuild to the stored operator
        if let Provenance::Farkas { f, config } = &raw.provenance {
            let rebuilt = witness_from_farkas(f, config).map_err(serde::de::Error::custom)?;
            let dev = rebuilt.op().matrix().max_deviation(op.matrix());
            if dev > 1e-12 * op.matrix().max_abs().max(1.0) {
                return Err(serde::de::Error::custom(format!(
                    "farkas provenance does not rebuild the witness (deviation {dev:.3e})"
                )));
            }
        }
        Ok(Witness {
            op,
            dim_a: raw.dim_a,
            dim_b: raw.dim_b,
            offset: raw.offset,
            provenance: raw.provenance,
        })
    }
}

/// Assemble the witness of a separating vector over a configuration:
/// joint terms `F_{ik,jl} E^A_{ik} (x) E^B_{jl}`, marginal terms against
/// the identity on the other side. By construction
/// `Tr(H rho) = F . P(rho)` for every state of matching dimensions.
pub fn witness_from_farkas(f: &[f64], config: &MeasurementConfig) -> Result<Witness, WitnessError> {
    let layout = config.layout();
    if f.len() != layout.total_len() {
        return Err(WitnessError::LayoutMismatch {
            got: f.len(),
            expected: layout.total_len(),
        });
    }
    let da = config.dim_a();
    let db = config.dim_b();
    let d = da * db;
    let mut m = ComplexMatrix::zeros(d, d);

    let alice_elems: Vec<&HermitianOperator> = config
        .alice()
        .iter()
        .flat_map(|p| p.elements().iter())
        .collect();
    let bob_elems: Vec<&HermitianOperator> = config
        .bob()
        .iter()
        .flat_map(|p| p.elements().iter())
        .collect();

    for (a_slot, ea) in alice_elems.iter().enumerate() {
        for (b_slot, eb) in bob_elems.iter().enumerate() {
            let coeff = f[layout.joint_slot(a_slot, b_slot)];
            if coeff != 0.0 {
                m = m.add_matrix(&ea.matrix().kron(eb.matrix()).scale_re(coeff));
            }
        }
    }
    let marg_a_base = layout.joint_len();
    for (a_slot, ea) in alice_elems.iter().enumerate() {
        let coeff = f[marg_a_base + a_slot];
        if coeff != 0.0 {
            m = m.add_matrix(
                &ea.matrix()
                    .kron(&ComplexMatrix::identity(db))
                    .scale_re(coeff),
            );
        }
    }
    let marg_b_base = layout.joint_len() + layout.a_len();
    for (b_slot, eb) in bob_elems.iter().enumerate() {
        let coeff = f[marg_b_base + b_slot];
        if coeff != 0.0 {
            m = m.add_matrix(
                &ComplexMatrix::identity(da)
                    .kron(eb.matrix())
                    .scale_re(coeff),
            );
        }
    }

    let op = HermitianOperator::new(m)?;
    Ok(Witness {
        op,
        dim_a: da,
        dim_b: db,
        offset: 0.0,
        provenance: Provenance::Farkas {
            f: f.to_vec(),
            config: config.clone(),
        },
    })
}

/// Convenience wrapper for certificates.
pub fn witness_from_certificate(
    certificate: &FarkasCertificate,
    config: &MeasurementConfig,
) -> Result<Witness, WitnessError> {
    if certificate.layout != config.layout() {
        return Err(WitnessError::LayoutMismatch {
            got: certificate.f.len(),
            expected: config.layout().total_len(),
        });
    }
    witness_from_farkas(&certificate.f, config)
}

/// `Tr(H rho)`.
pub fn witness_value(w: &Witness, rho: &DensityMatrix) -> Result<f64, WitnessError> {
    if rho.dims() != (w.dim_a, w.dim_b) {
        return Err(WitnessError::DimensionMismatch(format!(
            "state dims {:?} vs witness dims ({}, {})",
            rho.dims(),
            w.dim_a,
            w.dim_b
        )));
    }
    Ok(rho.expectation(w.op()))
}

/// The CHSH separating vector in the 2x2-setting layout: the inequality
/// `p_a - p_ab + p_b' - p_a'b' + p_a'b - p_ab' >= 0` written over `(+,+)`
/// joint outcomes and `+` marginals; zero everywhere else.
pub fn chsh_farkas_vector() -> Vec<f64> {
    let layout = EventLayout {
        alice_outcomes: vec![2, 2],
        bob_outcomes: vec![2, 2],
    };
    let mut f = vec![0.0; layout.total_len()];
    let a_plus = layout.a_slot(0, 0);
    let a_prime_plus = layout.a_slot(1, 0);
    let b_plus = layout.b_slot(0, 0);
    let b_prime_plus = layout.b_slot(1, 0);
    f[layout.joint_slot(a_plus, b_plus)] = -1.0; // -p_ab
    f[layout.joint_slot(a_prime_plus, b_prime_plus)] = -1.0; // -p_a'b'
    f[layout.joint_slot(a_prime_plus, b_plus)] = 1.0; // +p_a'b
    f[layout.joint_slot(a_plus, b_prime_plus)] = -1.0; // -p_ab'
    f[layout.joint_len() + a_plus] = 1.0; // +p_a
    f[layout.joint_len() + layout.a_len() + b_prime_plus] = 1.0; // +p_b'
    f
}

/// Projective configuration from four Bloch directions: Alice measures
/// along `a` then `a'`, Bob along `b` then `b'`, `+1` outcome first.
pub fn chsh_config(
    a: [f64; 3],
    a_prime: [f64; 3],
    b: [f64; 3],
    b_prime: [f64; 3],
) -> Result<MeasurementConfig, WitnessError> {
    Ok(MeasurementConfig::new(
        vec![projective_from_bloch(a)?, projective_from_bloch(a_prime)?],
        vec![projective_from_bloch(b)?, projective_from_bloch(b_prime)?],
    )?)
}

/// The canonical-angle CHSH configuration.
pub fn chsh_canonical_config() -> MeasurementConfig {
    chsh_config(
        CANONICAL_A,
        CANONICAL_A_PRIME,
        CANONICAL_B,
        CANONICAL_B_PRIME,
    )
    .expect("canonical directions are unit vectors")
}

fn check_unit(v: [f64; 3]) -> Result<(), WitnessError> {
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(WitnessError::NonUnitVector(norm));
    }
    Ok(())
}

/// The CHSH Bell operator
/// `a.sigma (x) (b + b').sigma + a'.sigma (x) (b' - b).sigma`;
/// traceless, and the operator subtracted from `2*1` in the witness form.
pub fn chsh_bell_operator(
    a: [f64; 3],
    a_prime: [f64; 3],
    b: [f64; 3],
    b_prime: [f64; 3],
) -> Result<HermitianOperator, WitnessError> {
    for v in [a, a_prime, b, b_prime] {
        check_unit(v)?;
    }
    let sum_b = [b[0] + b_prime[0], b[1] + b_prime[1], b[2] + b_prime[2]];
    let diff_b = [b_prime[0] - b[0], b_prime[1] - b[1], b_prime[2] - b[2]];
    let m = bloch_dot_sigma(a)
        .kron(&bloch_dot_sigma(sum_b))
        .add_matrix(&bloch_dot_sigma(a_prime).kron(&bloch_dot_sigma(diff_b)));
    Ok(HermitianOperator::new(m)?)
}

/// The CHSH witness `(2*1 - B)/4`. Equality with the operator assembled
/// from the separating vector over the same angles is checked on every
/// call; the two constructions must agree elementwise.
pub fn chsh_witness(
    a: [f64; 3],
    a_prime: [f64; 3],
    b: [f64; 3],
    b_prime: [f64; 3],
) -> Result<Witness, WitnessError> {
    let bell = chsh_bell_operator(a, a_prime, b, b_prime)?;
    let m = ComplexMatrix::identity(4)
        .scale_re(2.0)
        .sub_matrix(bell.matrix())
        .scale_re(0.25);
    let op = HermitianOperator::new(m)?;

    let config = chsh_config(a, a_prime, b, b_prime)?;
    let from_vector = witness_from_farkas(&chsh_farkas_vector(), &config)?;
    let deviation = from_vector.op().matrix().max_deviation(op.matrix());
    assert!(
        deviation <= 1e-12,
        "CHSH operator form deviates from the vector form by {deviation:.3e}"
    );

    Ok(Witness {
        op,
        dim_a: 2,
        dim_b: 2,
        offset: 0.0,
        provenance: Provenance::Chsh {
            a,
            a_prime,
            b,
            b_prime,
        },
    })
}

/// Upper bound on `min Tr(H |a><a| (x) |b><b|)` over product states.
#[derive(Debug, Clone, Serialize)]
pub struct ProductMinReport {
    pub value: f64,
    /// Argmin factors (unit vectors on A and B).
    pub state_a: Vec<[f64; 2]>,
    pub state_b: Vec<[f64; 2]>,
    /// True when the 2x2 Bloch-grid bracket also ran.
    pub grid_checked: bool,
}

fn contract_b(h: &ComplexMatrix, dims: (usize, usize), b: &[C64]) -> HermitianOperator {
    let (da, db) = dims;
    let mut m = ComplexMatrix::zeros(da, da);
    for i in 0..da {
        for i2 in 0..da {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..db {
                for j2 in 0..db {
                    acc += b[j].conj() * h.get(i * db + j, i2 * db + j2) * b[j2];
                }
            }
            m.set(i, i2, acc);
        }
    }
    HermitianOperator::with_tolerance(m, 1e-9).expect("contraction of Hermitian is Hermitian")
}

fn contract_a(h: &ComplexMatrix, dims: (usize, usize), a: &[C64]) -> HermitianOperator {
    let (da, db) = dims;
    let mut m = ComplexMatrix::zeros(db, db);
    for j in 0..db {
        for j2 in 0..db {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..da {
                for i2 in 0..da {
                    acc += a[i].conj() * h.get(i * db + j, i2 * db + j2) * a[i2];
                }
            }
            m.set(j, j2, acc);
        }
    }
    HermitianOperator::with_tolerance(m, 1e-9).expect("contraction of Hermitian is Hermitian")
}

fn bottom_eigenvector(op: &HermitianOperator) -> (f64, Vec<C64>) {
    let eig = op.eigensystem();
    let last = eig.values.len() - 1;
    let v = (0..eig.values.len())
        .map(|r| eig.vectors.get(r, last))
        .collect();
    (eig.values[last], v)
}

fn product_value(h: &ComplexMatrix, dims: (usize, usize), a: &[C64], b: &[C64]) -> f64 {
    let (da, db) = dims;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..da {
        for j in 0..db {
            for i2 in 0..da {
                for j2 in 0..db {
                    acc +=
                        a[i].conj() * b[j].conj() * h.get(i * db + j, i2 * db + j2) * a[i2] * b[j2];
                }
            }
        }
    }
    acc.re
}

/// See-saw minimization over product states: alternately fix one side and
/// take the bottom eigenvector of the contracted operator on the other,
/// multi-started from seeded Haar-random B-side vectors. For 2x2 witnesses
/// a Bloch-sphere grid sweep (128x128 points per side, exact optimization
/// of the opposite side at each point) brackets the minimum within 1e-3.
/// The result is a certified upper bound on the true product minimum.
pub fn min_over_products(w: &Witness, restarts: usize, seed: u64) -> ProductMinReport {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    let dims = (w.dim_a, w.dim_b);
    let h = w.op().matrix();
    let mut best_value = f64::INFINITY;
    let mut best_pair: Option<(Vec<C64>, Vec<C64>)> = None;

    for r in 0..restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64 + 1);
        let mut b: Vec<C64> = (0..dims.1)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                C64::new(re, im)
            })
            .collect();
        let norm = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        b.iter_mut().for_each(|z| *z /= norm);

        let mut value = f64::INFINITY;
        let mut a: Vec<C64> = Vec::new();
        for _ in 0..200 {
            let (_, next_a) = bottom_eigenvector(&contract_b(h, dims, &b));
            a = next_a;
            let (vb, next_b) = bottom_eigenvector(&contract_a(h, dims, &a));
            b = next_b;
            if (value - vb).abs() < 1e-12 {
                value = vb;
                break;
            }
            value = vb;
        }
        if value < best_value {
            best_value = value;
            best_pair = Some((a, b));
        }
    }

    let mut grid_checked = false;
    if dims == (2, 2) {
        grid_checked = true;
        let steps = 128;
        for swap_sides in [false, true] {
            for it in 0..steps {
                let theta = std::f64::consts::PI * (it as f64 + 0.5) / steps as f64;
                for ip in 0..steps {
                    let phi = 2.0 * std::f64::consts::PI * ip as f64 / steps as f64;
                    let v = vec![
                        C64::new((theta / 2.0).cos(), 0.0),
                        C64::new(
                            (theta / 2.0).sin() * phi.cos(),
                            (theta / 2.0).sin() * phi.sin(),
                        ),
                    ];
                    let (value, other) = if swap_sides {
                        bottom_eigenvector(&contract_b(h, dims, &v))
                    } else {
                        bottom_eigenvector(&contract_a(h, dims, &v))
                    };
                    if value < best_value {
                        best_value = value;
                        best_pair = Some(if swap_sides {
                            (other, v.clone())
                        } else {
                            (v.clone(), other)
                        });
                    }
                }
            }
        }
    }

    let (a, b) = best_pair.expect("at least one restart ran");
    debug_assert!((product_value(h, dims, &a, &b) - best_value).abs() < 1e-8);
    ProductMinReport {
        value: best_value,
        state_a: a.iter().map(|z| [z.re, z.im]).collect(),
        state_b: b.iter().map(|z| [z.re, z.im]).collect(),
        grid_checked,
    }
}

/// Decompose a witness over a complete configuration: expand in the
/// orthogonal operator bases, then push each basis operator onto its own
/// eigenprojectors (which are exactly the configuration's measurement
/// elements). Returns the separating vector and the identity offset `c`;
/// `F . P(rho) = Tr((H - c 1) rho)` for every state.
pub fn witness_to_farkas(
    w: &Witness,
    complete: &MeasurementConfig,
) -> Result<(Vec<f64>, f64), WitnessError> {
    let da = w.dim_a;
    let db = w.dim_b;
    if complete.dim_a() != da || complete.dim_b() != db {
        return Err(WitnessError::DimensionMismatch(format!(
            "config dims ({}, {}) vs witness dims ({}, {})",
            complete.dim_a(),
            complete.dim_b(),
            da,
            db
        )));
    }
    let basis_a = hermitian_basis(da)?;
    let basis_b = hermitian_basis(db)?;
    let layout = complete.layout();
    if complete.alice().len() != basis_a.traceless().len()
        || complete.bob().len() != basis_b.traceless().len()
        || layout.alice_outcomes.iter().any(|&k| k != da)
        || layout.bob_outcomes.iter().any(|&l| l != db)
    {
        return Err(WitnessError::NotComplete {
            deviation: f64::INFINITY,
        });
    }

    let expansion = expand_in_basis(w.op(), &basis_a, &basis_b)?;

    // eigenvalue of basis operator i on the k-th projector of measurement i
    let spectra = |basis_ops: &[HermitianOperator], povms: &[crate::measurements::Povm]| {
        basis_ops
            .iter()
            .zip(povms)
            .map(|(op, povm)| {
                povm.elements()
                    .iter()
                    .map(|proj| op.hs_inner(proj))
                    .collect::<Vec<f64>>()
            })
            .collect::<Vec<Vec<f64>>>()
    };
    let s = spectra(basis_a.traceless(), complete.alice());
    let t = spectra(basis_b.traceless(), complete.bob());

    let nb = basis_b.traceless().len();
    let mut f = vec![0.0; layout.total_len()];
    for (i, si) in s.iter().enumerate() {
        for (k, &sik) in si.iter().enumerate() {
            let a_slot = layout.a_slot(i, k);
            for (j, tj) in t.iter().enumerate() {
                let mu = expansion.joint[i * nb + j];
                for (l, &tjl) in tj.iter().enumerate() {
                    f[layout.joint_slot(a_slot, layout.b_slot(j, l))] = mu * sik * tjl;
                }
            }
            f[layout.joint_len() + a_slot] = expansion.alice[i] * sik;
        }
    }
    for (j, tj) in t.iter().enumerate() {
        for (l, &tjl) in tj.iter().enumerate() {
            f[layout.joint_len() + layout.a_len() + layout.b_slot(j, l)] = expansion.bob[j] * tjl;
        }
    }
    let c = expansion.constant;

    // the decomposition must rebuild the witness; anything else means the
    // supplied configuration was not the complete set for these dims
    let rebuilt = witness_from_farkas(&f, complete)?;
    let with_offset = rebuilt
        .op()
        .matrix()
        .add_matrix(&ComplexMatrix::identity(da * db).scale_re(c));
    let deviation = with_offset.max_deviation(w.op().matrix());
    if deviation > 1e-10 * w.op().matrix().max_abs().max(1.0) {
        return Err(WitnessError::NotComplete { deviation });
    }
    Ok((f, c))
}

/// Full witness check against a state.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    /// `Tr(H rho)`.
    pub value: f64,
    /// Bound on the product-state minimum.
    pub product_min: ProductMinReport,
    /// Smallest `Tr(H sigma)` over sampled random separable states.
    pub separable_sample_min: Option<f64>,
    /// `value < -1e-9` and `product_min >= -1e-6`.
    pub pass: bool,
}

/// Evaluate the two witness conditions numerically: a strictly negative
/// value on `rho`, and a nonnegative minimum over product states (within
/// `1e-6`). Optionally also samples seeded random separable states.
pub fn verify_witness(
    w: &Witness,
    rho: &DensityMatrix,
    samples: usize,
    restarts: usize,
    seed: u64,
) -> Result<WitnessReport, WitnessError> {
    let value = witness_value(w, rho)?;
    let product_min = min_over_products(w, restarts, seed);
    let separable_sample_min = if samples > 0 {
        let mut min = f64::INFINITY;
        for i in 0..samples {
            let (sigma, _) = random_separable(w.dim_a, w.dim_b, 3, seed.wrapping_add(i as u64))
                .expect("separable sampling with positive terms");
            min = min.min(rho_value(w, &sigma)?);
        }
        Some(min)
    } else {
        None
    };
    let pass = value < -1e-9 && product_min.value >= -1e-6;
    Ok(WitnessReport {
        value,
        product_min,
        separable_sample_min,
        pass,
    })
}

fn rho_value(w: &Witness, rho: &DensityMatrix) -> Result<f64, WitnessError> {
    witness_value(w, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{cone_membership, DEFAULT_FEASIBILITY_TOL};
    use crate::lhvcone::build_generators;
    use crate::measurements::{event_vector, validate_povm};
    use crate::qcore::Side;
    use crate::states::{random_density, singlet, werner};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const HALF_ONE_MINUS_SQRT2: f64 = (1.0 - std::f64::consts::SQRT_2) / 2.0;

    fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
        let theta = rng.random::<f64>() * std::f64::consts::PI;
        let phi = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
        [
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        ]
    }

    #[test]
    fn identity_povm_farkas_sums_identities() {
        let ident = validate_povm(vec![HermitianOperator::identity(2)]).unwrap();
        let config = MeasurementConfig::new(vec![ident.clone()], vec![ident]).unwrap();
        let w = witness_from_farkas(&[1.0, 1.0, 1.0], &config).unwrap();
        let expected = ComplexMatrix::identity(4).scale_re(3.0);
        assert!(w.op().matrix().max_deviation(&expected) < 1e-14);
    }

    #[test]
    fn bridge_identity_over_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for trial in 0..100u64 {
            let config = chsh_config(
                random_unit(&mut rng),
                random_unit(&mut rng),
                random_unit(&mut rng),
                random_unit(&mut rng),
            )
            .unwrap();
            let f: Vec<f64> = (0..config.layout().total_len())
                .map(|_| rng.random::<f64>() * 2.0 - 1.0)
                .collect();
            let w = witness_from_farkas(&f, &config).unwrap();
            let rho = random_density(2, 2, trial).unwrap();
            let p = event_vector(&rho, &config).unwrap().full_vector();
            let dot: f64 = f.iter().zip(&p).map(|(x, y)| x * y).sum();
            let value = witness_value(&w, &rho).unwrap();
            assert!(
                (dot - value).abs() <= 1e-10,
                "trial {trial}: F.P = {dot}, Tr(H rho) = {value}"
            );
        }
    }

    #[test]
    fn farkas_construction_is_linear() {
        let config = chsh_canonical_config();
        let n = config.layout().total_len();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f1: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        let f2: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        let (alpha, beta) = (0.7, -1.3);
        let combo: Vec<f64> = f1
            .iter()
            .zip(&f2)
            .map(|(x, y)| alpha * x + beta * y)
            .collect();
        let w1 = witness_from_farkas(&f1, &config).unwrap();
        let w2 = witness_from_farkas(&f2, &config).unwrap();
        let wc = witness_from_farkas(&combo, &config).unwrap();
        let expected = w1
            .op()
            .matrix()
            .scale_re(alpha)
            .add_matrix(&w2.op().matrix().scale_re(beta));
        assert!(wc.op().matrix().max_deviation(&expected) < 1e-12);
    }

    #[test]
    fn chsh_farkas_is_nonnegative_on_all_generators_exactly() {
        let f = chsh_farkas_vector();
        let fi: Vec<i64> = f.iter().map(|&x| x as i64).collect();
        assert!(f.iter().zip(&fi).all(|(&x, &i)| x == i as f64));
        let config = chsh_canonical_config();
        let gens = build_generators(&config).unwrap();
        assert_eq!(gens.count(), 256);
        let mut col = vec![0.0; gens.rows()];
        let mut attains_zero = false;
        for c in 0..gens.count() {
            gens.write_column(c, &mut col);
            let dot: i64 = fi.iter().zip(&col).map(|(&a, &b)| a * b as i64).sum();
            assert!(dot >= 0, "generator {c} gives {dot}");
            attains_zero |= dot == 0;
        }
        assert!(attains_zero);
    }

    #[test]
    fn chsh_vector_passes_certificate_verification() {
        let config = chsh_canonical_config();
        let gens = build_generators(&config).unwrap();
        let p = event_vector(&singlet(), &config).unwrap();
        let cert = crate::certify::FarkasCertificate {
            f: chsh_farkas_vector(),
            layout: config.layout(),
            violation: 0.0,
            min_generator_value: 0.0,
        };
        let check = crate::certify::verify_certificate(&cert, &gens, &p);
        assert!(check.valid);
        assert!((check.violation - HALF_ONE_MINUS_SQRT2).abs() < 1e-12);
        assert!(check.min_generator_value >= 0.0);
    }

    #[test]
    fn chsh_witness_nonnegative_on_sampled_separable_states() {
        let config = chsh_canonical_config();
        let w = witness_from_farkas(&chsh_farkas_vector(), &config).unwrap();
        for seed in 0..100u64 {
            let (sigma, _) = random_separable(2, 2, 3, seed).unwrap();
            let value = witness_value(&w, &sigma).unwrap();
            assert!(value >= -1e-9, "seed {seed}: value {value}");
        }
    }

    #[test]
    fn chsh_values_at_canonical_angles() {
        let config = chsh_canonical_config();
        let f = chsh_farkas_vector();
        let p = event_vector(&singlet(), &config).unwrap().full_vector();
        let dot: f64 = f.iter().zip(&p).map(|(x, y)| x * y).sum();
        assert!((dot - HALF_ONE_MINUS_SQRT2).abs() < 1e-12);

        // separable state stays nonnegative
        let mut m = ComplexMatrix::zeros(4, 4);
        m.set(0, 0, C64::new(1.0, 0.0));
        let product = DensityMatrix::from_matrix(2, 2, m).unwrap();
        let p0 = event_vector(&product, &config).unwrap().full_vector();
        let dot0: f64 = f.iter().zip(&p0).map(|(x, y)| x * y).sum();
        assert!(dot0 >= -1e-12);

        let bell = chsh_bell_operator(
            CANONICAL_A,
            CANONICAL_A_PRIME,
            CANONICAL_B,
            CANONICAL_B_PRIME,
        )
        .unwrap();
        assert!(bell.trace().abs() < 1e-14);
        assert!((singlet().expectation(&bell) - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-12);

        let w = chsh_witness(
            CANONICAL_A,
            CANONICAL_A_PRIME,
            CANONICAL_B,
            CANONICAL_B_PRIME,
        )
        .unwrap();
        let value = witness_value(&w, &singlet()).unwrap();
        assert!((value - (2.0 - 2.0 * std::f64::consts::SQRT_2) / 4.0).abs() < 1e-12);

        // maximally mixed state: Tr(H I/4) = 1/2 since the Bell part is traceless
        let value_mixed = witness_value(&w, &crate::states::maximally_mixed(2, 2)).unwrap();
        assert!((value_mixed - 0.5).abs() < 1e-14);

        // identity witness has value 1 on every state
        let ident = Witness::external(HermitianOperator::identity(4), 2, 2).unwrap();
        assert!((witness_value(&ident, &singlet()).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn chsh_operator_and_vector_routes_agree_for_random_angles() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..20 {
            // constructor asserts the elementwise agreement internally
            let w = chsh_witness(
                random_unit(&mut rng),
                random_unit(&mut rng),
                random_unit(&mut rng),
                random_unit(&mut rng),
            )
            .unwrap();
            assert_eq!(w.dim_a(), 2);
        }
    }

    #[test]
    fn degenerate_bob_angles_collapse_to_single_term() {
        let b = [0.0, 1.0, 0.0];
        let a = [1.0, 0.0, 0.0];
        let a_p = [0.0, 0.0, 1.0];
        let bell = chsh_bell_operator(a, a_p, b, b).unwrap();
        let expected = bloch_dot_sigma(a).kron(&bloch_dot_sigma([0.0, 2.0, 0.0]));
        assert!(bell.matrix().max_deviation(&expected) < 1e-14);
        assert!(chsh_bell_operator([2.0, 0.0, 0.0], a_p, b, b).is_err());
    }

    #[test]
    fn product_minimum_identity_and_chsh() {
        let ident = Witness::external(HermitianOperator::identity(4), 2, 2).unwrap();
        let report = min_over_products(&ident, 2, 9);
        assert!((report.value - 1.0).abs() < 1e-9);

        // canonical angles: a ⊥ a' and b ⊥ b' give product maximum sqrt(2)
        // for the Bell part, so the witness minimum is (2 - sqrt(2))/4
        let w = chsh_witness(
            CANONICAL_A,
            CANONICAL_A_PRIME,
            CANONICAL_B,
            CANONICAL_B_PRIME,
        )
        .unwrap();
        let report = min_over_products(&w, 8, 13);
        let expected = (2.0 - std::f64::consts::SQRT_2) / 4.0;
        assert!(report.grid_checked);
        assert!(
            (report.value - expected).abs() < 1e-6,
            "product min {} vs expected {expected}",
            report.value
        );

        // degenerate angles (b = b'): the product maximum of the Bell part
        // reaches 2, so the witness minimum is exactly 0
        let w0 = chsh_witness(
            [1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
        )
        .unwrap();
        let report0 = min_over_products(&w0, 8, 13);
        assert!(report0.value.abs() < 1e-6, "product min {}", report0.value);
    }

    #[test]
    fn swap_operator_witness_detects_singlet() {
        // partial transpose of the projector onto the PT-negative
        // eigenvector of the singlet: equals SWAP/2
        let pt = singlet()
            .matrix()
            .partial_transpose((2, 2), Side::B)
            .unwrap();
        let eig = HermitianOperator::new(pt).unwrap().eigensystem();
        let neg: Vec<C64> = (0..4).map(|r| eig.vectors.get(r, 3)).collect();
        assert!(eig.values[3] < -0.49);
        let proj = ComplexMatrix::outer(&neg, &neg);
        let h = HermitianOperator::new(proj.partial_transpose((2, 2), Side::B).unwrap()).unwrap();
        let w = Witness::external(h, 2, 2).unwrap();

        let value = witness_value(&w, &singlet()).unwrap();
        assert!((value + 0.5).abs() < 1e-12);
        let report = min_over_products(&w, 8, 3);
        assert!(report.value.abs() < 1e-6, "product min {}", report.value);
    }

    #[test]
    fn decompose_rebuild_roundtrip() {
        let complete = crate::measurements::complete_config(2, 2).unwrap();
        for seed in 0..20u64 {
            let h = random_density(2, 2, 500 + seed).unwrap().op().clone();
            let w = Witness::external(h, 2, 2).unwrap();
            let (f, c) = witness_to_farkas(&w, &complete).unwrap();
            let rebuilt = witness_from_farkas(&f, &complete).unwrap();
            let total = rebuilt
                .op()
                .matrix()
                .add_matrix(&ComplexMatrix::identity(4).scale_re(c));
            assert!(total.max_deviation(w.op().matrix()) <= 1e-10);
        }
    }

    #[test]
    fn identity_witness_decomposes_to_pure_offset() {
        let complete = crate::measurements::complete_config(2, 2).unwrap();
        let w = Witness::external(HermitianOperator::identity(4), 2, 2).unwrap();
        let (f, c) = witness_to_farkas(&w, &complete).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
        assert!(f.iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn decomposition_satisfies_dot_product_contract() {
        let complete = crate::measurements::complete_config(2, 2).unwrap();
        let h = {
            let w = chsh_witness(
                CANONICAL_A,
                CANONICAL_A_PRIME,
                CANONICAL_B,
                CANONICAL_B_PRIME,
            )
            .unwrap();
            w.op().clone()
        };
        let w = Witness::external(h, 2, 2).unwrap();
        let (f, c) = witness_to_farkas(&w, &complete).unwrap();
        for seed in 0..50u64 {
            let rho = random_density(2, 2, 900 + seed).unwrap();
            let p = event_vector(&rho, &complete).unwrap().full_vector();
            let dot: f64 = f.iter().zip(&p).map(|(x, y)| x * y).sum();
            let expected = witness_value(&w, &rho).unwrap() - c;
            assert!((dot - expected).abs() <= 1e-10, "seed {seed}");
        }
    }

    #[test]
    fn canonical_vectors_are_fixed_points_of_decomposition() {
        // decompose-then-rebuild is the identity on vectors already in the
        // image of the decomposition (per-measurement spectral form)
        let complete = crate::measurements::complete_config(2, 2).unwrap();
        let h = random_density(2, 2, 4242).unwrap().op().clone();
        let w = Witness::external(h, 2, 2).unwrap();
        let (f1, _c1) = witness_to_farkas(&w, &complete).unwrap();
        // rebuilding without the offset and decomposing again must return
        // the same vector with a zero offset
        let w1 = witness_from_farkas(&f1, &complete).unwrap();
        let (f2, c2) = witness_to_farkas(&w1, &complete).unwrap();
        assert!(c2.abs() < 1e-12);
        for (a, b) in f1.iter().zip(&f2) {
            assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn certificate_witness_matches_violation_and_stays_nonnegative() {
        let config = chsh_canonical_config();
        let gens = build_generators(&config).unwrap();
        let p = event_vector(&singlet(), &config).unwrap();
        let result = cone_membership(&p, &gens, DEFAULT_FEASIBILITY_TOL).unwrap();
        let cert = result.certificate.expect("singlet is infeasible");
        let w = witness_from_certificate(&cert, &config).unwrap();
        let value = witness_value(&w, &singlet()).unwrap();
        assert!((value - cert.violation).abs() <= 1e-10);
        let report = min_over_products(&w, 8, 17);
        assert!(report.value >= -1e-6);
    }

    #[test]
    fn witness_report_cases() {
        let w = chsh_witness(
            CANONICAL_A,
            CANONICAL_A_PRIME,
            CANONICAL_B,
            CANONICAL_B_PRIME,
        )
        .unwrap();
        let report = verify_witness(&w, &singlet(), 20, 6, 31).unwrap();
        assert!(report.pass);
        assert!(report.separable_sample_min.unwrap() >= -1e-9);

        let half = werner(0.5).unwrap();
        let report = verify_witness(&w, &half, 0, 6, 31).unwrap();
        assert!(!report.pass);
        assert!(report.value > 0.0);

        let ident = Witness::external(HermitianOperator::identity(4), 2, 2).unwrap();
        let report = verify_witness(&ident, &singlet(), 0, 4, 31).unwrap();
        assert!(!report.pass);
    }

    #[test]
    fn offset_roundtrips_through_json() {
        let w = Witness::external(HermitianOperator::identity(4), 2, 2)
            .unwrap()
            .with_offset(0.5);
        assert_eq!(w.offset(), 0.5);
        let text = serde_json::to_string(&w).unwrap();
        assert!(text.contains("\"c\":0.5"));
        let back: Witness = serde_json::from_str(&text).unwrap();
        assert_eq!(back.offset(), 0.5);
    }

    #[test]
    fn witness_json_roundtrip_checks_provenance() {
        let config = chsh_canonical_config();
        let w = witness_from_farkas(&chsh_farkas_vector(), &config).unwrap();
        let text = serde_json::to_string(&w).unwrap();
        let back: Witness = serde_json::from_str(&text).unwrap();
        assert!(back.op().matrix().max_deviation(w.op().matrix()) < 1e-14);

        // corrupt the stored operator: deserialization must reject it
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc["H"][0][0] = serde_json::json!([0.5, 0.0]);
        let bad: Result<Witness, _> = serde_json::from_value(doc);
        assert!(bad.is_err());
    }
}
