//! LHV-cone membership along the Werner line.
//!
//! For the canonical CHSH configuration, tests whether the event vector of
//! `p * singlet + (1-p) * I/4` admits a local hidden variable model, then
//! bisects the feasibility flip and compares it to `1/sqrt(2)`.
//!
//! Run: `cargo run --release -p bellcert --example cone_membership`

use bellcert::certify::{cone_membership, MembershipStatus, DEFAULT_FEASIBILITY_TOL};
use bellcert::lhvcone::build_generators;
use bellcert::measurements::event_vector;
use bellcert::states::werner;
use bellcert::witness::chsh_canonical_config;

fn main() {
    let config = chsh_canonical_config();
    let gens = build_generators(&config).unwrap();

    let status_at = |p_val: f64| {
        let p = event_vector(&werner(p_val).unwrap(), &config).unwrap();
        cone_membership(&p, &gens, DEFAULT_FEASIBILITY_TOL).unwrap()
    };

    println!("Werner line membership (canonical CHSH configuration):");
    for p_val in [0.0, 0.3, 0.5, 0.7, 0.71, 0.75, 0.9, 1.0] {
        let result = status_at(p_val);
        match result.status {
            MembershipStatus::Feasible => {
                let support = result
                    .weights
                    .unwrap()
                    .iter()
                    .filter(|&&w| w > 1e-12)
                    .count();
                println!(
                    "  p = {p_val:.3}: feasible ({support} active generators, residual {:.1e})",
                    result.residual
                );
            }
            MembershipStatus::Infeasible => {
                let cert = result.certificate.unwrap();
                println!("  p = {p_val:.3}: infeasible (certificate violation {:+.6}, min over generators {:+.1e})",
                    cert.violation, cert.min_generator_value);
            }
            MembershipStatus::NumericallyMarginal => {
                println!("  p = {p_val:.3}: marginal (slack {:.3e})", result.residual);
            }
        }
    }

    // locate the flip
    let mut lo = 0.5;
    let mut hi = 1.0;
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if status_at(mid).status == MembershipStatus::Feasible {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let flip = 0.5 * (lo + hi);
    println!(
        "\nfeasibility flip at p = {flip:.6} (1/sqrt(2) = {:.6})",
        std::f64::consts::FRAC_1_SQRT_2
    );
}
