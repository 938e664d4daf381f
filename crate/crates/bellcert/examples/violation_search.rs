//! Derivative-free search for Bell violations over measurement angles.
//!
//! Runs the seeded multi-start Nelder-Mead search on the singlet (which
//! should find a verified certificate near the Tsirelson optimum) and on a
//! weakly mixed Werner state (which has no violation in this scenario).
//!
//! Run: `cargo run --release -p bellcert --example violation_search`

use bellcert::certify::{violation_search, SearchBudget, SearchOutcome, SearchShape};
use bellcert::states::{singlet, werner};
use bellcert::witness::{witness_from_farkas, witness_value};

fn main() {
    let shape = SearchShape {
        alice_measurements: 2,
        alice_outcomes: 2,
        bob_measurements: 2,
        bob_outcomes: 2,
    };
    let budget = SearchBudget {
        restarts: 16,
        max_iters: 400,
        threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
    };

    println!("searching 2x2,2x2 measurement space on the singlet (seed 42)...");
    match violation_search(&singlet(), shape, budget, 42).unwrap() {
        SearchOutcome::Found {
            certificate,
            config,
            violation,
        } => {
            println!("  violation found: F.P = {violation:.6}");
            println!(
                "  certificate margin over generators: {:+.2e}",
                certificate.min_generator_value
            );
            // the certificate doubles as an entanglement witness
            let w = witness_from_farkas(&certificate.f, &config).unwrap();
            println!(
                "  witness value on the singlet: {:.6}",
                witness_value(&w, &singlet()).unwrap()
            );
        }
        SearchOutcome::NoneFound { best_residual } => {
            println!("  unexpectedly found nothing (best residual {best_residual:.3e})");
        }
    }

    println!("\nsame search on werner(p = 0.2)...");
    match violation_search(&werner(0.2).unwrap(), shape, budget, 42).unwrap() {
        SearchOutcome::Found { violation, .. } => {
            println!("  unexpected violation {violation:.6}");
        }
        SearchOutcome::NoneFound { best_residual } => {
            println!(
                "  none found, best slack {best_residual:.3e} (the state sits inside the cone)"
            );
        }
    }
}
