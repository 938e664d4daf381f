//! Decomposing a witness back into a separating vector.
//!
//! Any Hermitian operator splits over the complete measurement
//! configuration into outcome coefficients `F` plus an identity offset
//! `c`, with `F . P(rho) = Tr((H - c 1) rho)` for every state. This is the
//! reverse of building a witness from a certificate, and composing the two
//! reproduces the operator.
//!
//! Run: `cargo run --release -p bellcert --example witness_decompose`

use bellcert::measurements::{complete_config, event_vector};
use bellcert::qcore::ComplexMatrix;
use bellcert::states::random_density;
use bellcert::witness::{
    chsh_witness, witness_from_farkas, witness_to_farkas, witness_value, CANONICAL_A,
    CANONICAL_A_PRIME, CANONICAL_B, CANONICAL_B_PRIME,
};

fn main() {
    let w = chsh_witness(
        CANONICAL_A,
        CANONICAL_A_PRIME,
        CANONICAL_B,
        CANONICAL_B_PRIME,
    )
    .unwrap();
    let complete = complete_config(2, 2).unwrap();

    let (f, c) = witness_to_farkas(&w, &complete).unwrap();
    let nonzero = f.iter().filter(|v| v.abs() > 1e-12).count();
    println!(
        "decomposed the CHSH witness over complete:2,2 -> {} coefficients ({} nonzero), c = {:.6}",
        f.len(),
        nonzero,
        c
    );

    // rebuild and compare
    let rebuilt = witness_from_farkas(&f, &complete).unwrap();
    let total = rebuilt
        .op()
        .matrix()
        .add_matrix(&ComplexMatrix::identity(4).scale_re(c));
    println!(
        "rebuild deviation: {:.3e}",
        total.max_deviation(w.op().matrix())
    );

    // the dot-product contract against fresh states
    let mut worst: f64 = 0.0;
    for seed in 0..50 {
        let rho = random_density(2, 2, seed).unwrap();
        let p = event_vector(&rho, &complete).unwrap().full_vector();
        let dot: f64 = f.iter().zip(&p).map(|(a, b)| a * b).sum();
        let direct = witness_value(&w, &rho).unwrap() - c;
        worst = worst.max((dot - direct).abs());
    }
    println!("max |F.P - Tr((H - c 1) rho)| over 50 random states: {worst:.3e}");
}
