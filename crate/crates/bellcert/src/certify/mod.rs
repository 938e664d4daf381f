//! Conic feasibility for event vectors and Farkas certificates.
//!
//! Membership asks whether an event vector is a nonnegative combination of
//! the cone generators. The phase-I simplex answers it; whichever way it
//! answers, the witness is re-checked independently of the solver: a
//! feasible verdict must reconstruct the vector from the returned weights,
//! an infeasible verdict must come with a separating vector whose margins
//! are recomputed by direct dot products. Verdicts too close to the
//! feasibility threshold are reported as numerically marginal instead of
//! being forced into a boolean.

mod search;
mod simplex;

pub use search::{violation_search, SearchBudget, SearchOutcome, SearchShape};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lhvcone::{ConeError, ConeGenerators};
use crate::measurements::{EventLayout, EventVector, MeasurementError};

/// Strict margin for certificate validity: the violation must be below
/// `-CERT_MARGIN` and every generator product above `-CERT_MARGIN`.
pub const CERT_MARGIN: f64 = 1e-9;

/// Default feasibility tolerance (scaled by `||P||_1` inside membership).
pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-9;

/// Verdicts within a factor 11 above the feasibility threshold are
/// reported marginal rather than infeasible.
const MARGINAL_BAND: f64 = 11.0;

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error("event vector and generators use different layouts")]
    LayoutMismatch,
    #[error("invalid search shape: {0}")]
    InvalidShape(String),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Measurement(#[from] MeasurementError),
}

/// Separating vector in the event-vector layout, normalized to
/// `||F||_inf = 1`: nonnegative on every generator, strictly negative on
/// the target vector. The margins stored here are always recomputed by
/// direct multiplication, never copied out of the solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarkasCertificate {
    #[serde(rename = "F")]
    pub f: Vec<f64>,
    pub layout: EventLayout,
    pub violation: f64,
    pub min_generator_value: f64,
}

/// Direct re-verification of a certificate against a vector and the
/// generator set, independent of how the certificate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateCheck {
    pub valid: bool,
    pub violation: f64,
    pub min_generator_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MembershipStatus {
    Feasible,
    Infeasible,
    NumericallyMarginal,
}

/// Outcome of a membership test.
#[derive(Debug, Clone, Serialize)]
pub struct MembershipResult {
    pub status: MembershipStatus,
    /// Generator weights reconstructing the vector; present iff feasible.
    pub weights: Option<Vec<f64>>,
    /// Feasible: reconstruction error `||G q - P||_inf`.
    /// Otherwise: the optimal phase-I slack.
    pub residual: f64,
    /// Present iff infeasible.
    pub certificate: Option<FarkasCertificate>,
}

/// Decide `P in cone(generators)` by phase-I simplex. Feasible iff the
/// optimal slack is at most `tol * ||P||_1`; slack beyond eleven times the
/// threshold with a verified certificate is infeasible; everything in
/// between, a failed re-verification, or hitting the iteration cap is
/// numerically marginal.
pub fn cone_membership(
    p: &EventVector,
    gens: &ConeGenerators,
    tol: f64,
) -> Result<MembershipResult, CertifyError> {
    if p.layout != *gens.layout() || !p.validate_shape() {
        return Err(CertifyError::LayoutMismatch);
    }
    let pvec = p.full_vector();
    let norm1: f64 = pvec.iter().map(|v| v.abs()).sum();
    let threshold = tol * norm1.max(1.0);

    let sol = simplex::phase_one(gens.count(), &pvec, |j, out| gens.write_column(j, out));
    if !sol.converged {
        return Ok(MembershipResult {
            status: MembershipStatus::NumericallyMarginal,
            weights: None,
            residual: sol.objective,
            certificate: None,
        });
    }

    if sol.objective <= threshold {
        let q = sol.primal(gens.count());
        let min_q = q.iter().copied().fold(0.0f64, f64::min);
        // re-verify the feasibility witness by direct reconstruction
        let mut rebuilt = vec![0.0; pvec.len()];
        let mut col = vec![0.0; pvec.len()];
        for (j, &w) in q.iter().enumerate() {
            if w != 0.0 {
                gens.write_column(j, &mut col);
                for (acc, &c) in rebuilt.iter_mut().zip(&col) {
                    *acc += w * c;
                }
            }
        }
        let residual = pvec
            .iter()
            .zip(&rebuilt)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if residual <= threshold.max(1e-12) && min_q >= -1e-12 {
            return Ok(MembershipResult {
                status: MembershipStatus::Feasible,
                weights: Some(q),
                residual,
                certificate: None,
            });
        }
        return Ok(MembershipResult {
            status: MembershipStatus::NumericallyMarginal,
            weights: None,
            residual,
            certificate: None,
        });
    }

    // infeasible branch: extract the separating vector from the dual
    let y = sol.dual();
    let mut f: Vec<f64> = y.iter().map(|&v| -v).collect();
    let fmax = f.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if fmax <= 1e-300 {
        return Ok(MembershipResult {
            status: MembershipStatus::NumericallyMarginal,
            weights: None,
            residual: sol.objective,
            certificate: None,
        });
    }
    for v in &mut f {
        *v /= fmax;
    }

    let violation: f64 = f.iter().zip(&pvec).map(|(a, b)| a * b).sum();
    let min_generator_value = gens.min_dot(&f);
    let certificate = FarkasCertificate {
        f,
        layout: p.layout.clone(),
        violation,
        min_generator_value,
    };
    let check = verify_certificate(&certificate, gens, p);
    let clearly_infeasible = sol.objective >= MARGINAL_BAND * threshold;
    if check.valid && clearly_infeasible {
        Ok(MembershipResult {
            status: MembershipStatus::Infeasible,
            weights: None,
            residual: sol.objective,
            certificate: Some(certificate),
        })
    } else {
        Ok(MembershipResult {
            status: MembershipStatus::NumericallyMarginal,
            weights: None,
            residual: sol.objective,
            certificate: None,
        })
    }
}

/// Recompute `F . P` and `min_lambda F . B_lambda` by direct
/// multiplication. Valid iff the violation is strictly below
/// `-1e-9` and every generator product is above `-1e-9`.
pub fn verify_certificate(
    certificate: &FarkasCertificate,
    gens: &ConeGenerators,
    p: &EventVector,
) -> CertificateCheck {
    if certificate.layout != *gens.layout() || certificate.f.len() != gens.rows() {
        return CertificateCheck {
            valid: false,
            violation: f64::NAN,
            min_generator_value: f64::NAN,
        };
    }
    let pvec = p.full_vector();
    let violation: f64 = certificate.f.iter().zip(&pvec).map(|(a, b)| a * b).sum();
    let min_generator_value = gens.min_dot(&certificate.f);
    CertificateCheck {
        valid: violation < -CERT_MARGIN && min_generator_value >= -CERT_MARGIN,
        violation,
        min_generator_value,
    }
}
