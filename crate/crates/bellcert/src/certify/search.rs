//! Seeded derivative-free search for Bell-inequality violations.
//!
//! The objective over measurement angles is the membership verdict turned
//! into a scalar: the certificate violation when the point leaves the cone
//! (negative, lower is better), the phase-I slack otherwise (nonnegative).
//! That function is piecewise and not smooth, so the search is plain
//! Nelder-Mead over the stacked angle vector with seeded random restarts.
//! Restarts are merged deterministically (best value, ties by restart
//! index), so results do not depend on thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{cone_membership, verify_certificate, CertifyError, FarkasCertificate};
use super::{MembershipStatus, DEFAULT_FEASIBILITY_TOL};
use crate::lhvcone::{build_for_layout, ConeGenerators, BUILD_GUARD_BITS};
use crate::measurements::{
    event_vector, projective_from_bloch, projective_from_frame, EventLayout, MeasurementConfig,
    Povm,
};
use crate::optim::nelder_mead;
use crate::qcore::{ComplexMatrix, DensityMatrix, C64};

/// Measurement counts and outcome counts per side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchShape {
    pub alice_measurements: usize,
    pub alice_outcomes: usize,
    pub bob_measurements: usize,
    pub bob_outcomes: usize,
}

impl SearchShape {
    fn layout(&self) -> EventLayout {
        EventLayout {
            alice_outcomes: vec![self.alice_outcomes; self.alice_measurements],
            bob_outcomes: vec![self.bob_outcomes; self.bob_measurements],
        }
    }

    fn params_per_measurement(outcomes: usize) -> usize {
        match outcomes {
            2 => 2, // Bloch angles (theta, phi)
            3 => 6, // three Givens rotations, one angle and one phase each
            _ => 0,
        }
    }

    fn param_count(&self) -> usize {
        self.alice_measurements * Self::params_per_measurement(self.alice_outcomes)
            + self.bob_measurements * Self::params_per_measurement(self.bob_outcomes)
    }
}

/// Restart and iteration budget. `threads` caps concurrent restarts; the
/// merged result is identical for any positive value.
#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    pub restarts: usize,
    pub max_iters: usize,
    pub threads: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iters: 400,
            threads: 1,
        }
    }
}

/// Best-effort search result. `NoneFound` is not a proof that an LHV model
/// exists, only that no violation surfaced within the budget.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum SearchOutcome {
    Found {
        certificate: FarkasCertificate,
        config: MeasurementConfig,
        violation: f64,
    },
    NoneFound {
        best_residual: f64,
    },
}

fn bloch_from_angles(theta: f64, phi: f64) -> [f64; 3] {
    [
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ]
}

/// Complex Givens rotation in plane `(p, q)`.
fn givens(dim: usize, p: usize, q: usize, theta: f64, phi: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(dim);
    let (c, s) = (theta.cos(), theta.sin());
    let phase = C64::new(phi.cos(), phi.sin());
    m.set(p, p, C64::new(c, 0.0));
    m.set(p, q, -phase * s);
    m.set(q, p, phase.conj() * s);
    m.set(q, q, C64::new(c, 0.0));
    m
}

fn measurement_from_params(dim: usize, outcomes: usize, params: &[f64]) -> Option<Povm> {
    match (dim, outcomes) {
        (2, 2) => projective_from_bloch(bloch_from_angles(params[0], params[1])).ok(),
        (3, 3) => {
            let u = givens(3, 0, 1, params[0], params[1])
                .matmul(&givens(3, 0, 2, params[2], params[3]))
                .matmul(&givens(3, 1, 2, params[4], params[5]));
            projective_from_frame(&u).ok()
        }
        _ => None,
    }
}

fn config_from_params(
    shape: &SearchShape,
    dims: (usize, usize),
    params: &[f64],
) -> Option<MeasurementConfig> {
    let pa = SearchShape::params_per_measurement(shape.alice_outcomes);
    let pb = SearchShape::params_per_measurement(shape.bob_outcomes);
    let mut cursor = 0;
    let mut alice = Vec::with_capacity(shape.alice_measurements);
    for _ in 0..shape.alice_measurements {
        alice.push(measurement_from_params(
            dims.0,
            shape.alice_outcomes,
            &params[cursor..cursor + pa],
        )?);
        cursor += pa;
    }
    let mut bob = Vec::with_capacity(shape.bob_measurements);
    for _ in 0..shape.bob_measurements {
        bob.push(measurement_from_params(
            dims.1,
            shape.bob_outcomes,
            &params[cursor..cursor + pb],
        )?);
        cursor += pb;
    }
    MeasurementConfig::new(alice, bob).ok()
}

fn objective(
    rho: &DensityMatrix,
    shape: &SearchShape,
    gens: &ConeGenerators,
    params: &[f64],
) -> f64 {
    let Some(config) = config_from_params(shape, rho.dims(), params) else {
        return f64::INFINITY;
    };
    let Ok(p) = event_vector(rho, &config) else {
        return f64::INFINITY;
    };
    match cone_membership(&p, gens, DEFAULT_FEASIBILITY_TOL) {
        Ok(result) => match result.status {
            MembershipStatus::Infeasible => {
                result.certificate.map_or(result.residual, |c| c.violation)
            }
            _ => result.residual,
        },
        Err(_) => f64::INFINITY,
    }
}

/// Search measurement space for a verified violation on `rho`.
///
/// Returns the best verified certificate (with the configuration that
/// produced it) or `NoneFound` with the smallest slack seen. Deterministic
/// for a fixed seed: restart `r` draws its starting point from ChaCha8
/// stream `r + 1` of the given seed.
pub fn violation_search(
    rho: &DensityMatrix,
    shape: SearchShape,
    budget: SearchBudget,
    seed: u64,
) -> Result<SearchOutcome, CertifyError> {
    if shape.alice_measurements == 0 || shape.bob_measurements == 0 {
        return Err(CertifyError::InvalidShape(
            "measurement counts must be positive".into(),
        ));
    }
    if SearchShape::params_per_measurement(shape.alice_outcomes) == 0
        || SearchShape::params_per_measurement(shape.bob_outcomes) == 0
    {
        return Err(CertifyError::InvalidShape(
            "only 2-outcome qubit and 3-outcome qutrit measurements are searchable".into(),
        ));
    }
    if shape.alice_outcomes != rho.dim_a() || shape.bob_outcomes != rho.dim_b() {
        return Err(CertifyError::InvalidShape(format!(
            "shape outcomes ({}, {}) must match state dims ({}, {})",
            shape.alice_outcomes,
            shape.bob_outcomes,
            rho.dim_a(),
            rho.dim_b()
        )));
    }
    let layout = shape.layout();
    let bits = layout.a_len() + layout.b_len();
    if bits > BUILD_GUARD_BITS {
        return Err(CertifyError::InvalidShape(format!(
            "{bits} assignment bits exceeds the {BUILD_GUARD_BITS}-bit guard"
        )));
    }
    let gens = build_for_layout(layout)?;
    let dim = shape.param_count();
    let restarts = budget.restarts.max(1);

    let run_restart = |r: usize| -> (f64, usize, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64 + 1);
        let start: Vec<f64> = (0..dim)
            .map(|k| {
                if k % 2 == 0 {
                    rng.random::<f64>() * std::f64::consts::PI
                } else {
                    rng.random::<f64>() * 2.0 * std::f64::consts::PI
                }
            })
            .collect();
        let mut f = |x: &[f64]| objective(rho, &shape, &gens, x);
        let (best_x, best_f) = nelder_mead(&mut f, &start, 0.45, budget.max_iters, 1e-12);
        (best_f, r, best_x)
    };

    let threads = budget.threads.max(1).min(restarts);
    let mut results: Vec<(f64, usize, Vec<f64>)> = if threads == 1 {
        (0..restarts).map(run_restart).collect()
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads)
                .map(|t| {
                    let run = &run_restart;
                    scope.spawn(move || (t..restarts).step_by(threads).map(run).collect::<Vec<_>>())
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("restart panicked"))
                .collect()
        })
    };
    results.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let (best_value, _, best_params) = results.into_iter().next().expect("at least one restart");

    // re-derive the certificate at the winning parameters
    if best_value < -CERT_SEARCH_MARGIN {
        let config = config_from_params(&shape, rho.dims(), &best_params)
            .expect("winning parameters produced a config during the search");
        let p = event_vector(rho, &config)?;
        let result = cone_membership(&p, &gens, DEFAULT_FEASIBILITY_TOL)?;
        if result.status == MembershipStatus::Infeasible {
            let certificate = result
                .certificate
                .expect("infeasible carries a certificate");
            let check = verify_certificate(&certificate, &gens, &p);
            if check.valid {
                let violation = certificate.violation;
                return Ok(SearchOutcome::Found {
                    certificate,
                    config,
                    violation,
                });
            }
        }
    }
    Ok(SearchOutcome::NoneFound {
        best_residual: best_value.max(0.0),
    })
}

const CERT_SEARCH_MARGIN: f64 = 1e-9;
