//! The Tiles bound-entangled fixture.
//!
//! The complement of the five-member Tiles product basis is entangled but
//! has a positive partial transpose, so the PPT test cannot flag it and no
//! witness of the partial-transpose form can either. Whether some
//! measurement configuration reveals a Bell violation for it is an open
//! experiment; the short search below is an interface to that experiment,
//! not a result.
//!
//! Run: `cargo run --release -p bellcert --example tiles_upb`

use bellcert::certify::{violation_search, SearchBudget, SearchOutcome, SearchShape};
use bellcert::states::{ppt_test, tiles_upb_state, tiles_upb_vectors};

fn main() {
    let rho = tiles_upb_state();
    println!(
        "tiles state: dims {:?}, trace {:.6}",
        rho.dims(),
        rho.op().trace()
    );

    let (is_ppt, min) = ppt_test(&rho);
    println!("partial transpose minimum eigenvalue: {min:+.3e} -> PPT = {is_ppt}");

    let mut worst: f64 = 0.0;
    for v in tiles_upb_vectors() {
        let image = rho.matrix().matvec(&v);
        let residual: f64 = image.iter().map(|z| z.norm()).fold(0.0, f64::max);
        worst = worst.max(residual);
    }
    println!("max |rho psi_i| over the five basis members: {worst:.3e}");

    // a small qutrit-frame search; no violation is expected here, and none
    // found is not evidence that an LHV model exists
    let shape = SearchShape {
        alice_measurements: 2,
        alice_outcomes: 3,
        bob_measurements: 2,
        bob_outcomes: 3,
    };
    let budget = SearchBudget {
        restarts: 4,
        max_iters: 120,
        threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    println!("\nshort violation search over 2x3,2x3 frames (budget-limited)...");
    match violation_search(&rho, shape, budget, 99).unwrap() {
        SearchOutcome::Found { violation, .. } => {
            println!("  found a violation of {violation:.6} - worth a longer look");
        }
        SearchOutcome::NoneFound { best_residual } => {
            println!("  none found (best slack {best_residual:.3e})");
        }
    }
}
