//! The CHSH worked example, both directions.
//!
//! Builds the CHSH separating vector, checks it against every generator of
//! the 2x2-setting LHV cone (exact integer arithmetic), assembles the
//! witness operator from it, and confirms the operator route
//! `(2*1 - B)/4` gives the same matrix. Then evaluates the witness on the
//! singlet and down the Werner line.
//!
//! Run: `cargo run --release -p bellcert --example chsh_pipeline`

use bellcert::lhvcone::build_generators;
use bellcert::measurements::event_vector;
use bellcert::states::{singlet, werner};
use bellcert::witness::{
    chsh_bell_operator, chsh_canonical_config, chsh_farkas_vector, chsh_witness, witness_value,
    CANONICAL_A, CANONICAL_A_PRIME, CANONICAL_B, CANONICAL_B_PRIME,
};

fn main() {
    let config = chsh_canonical_config();
    let f = chsh_farkas_vector();

    // the Bell inequality itself: F nonnegative on all 256 Boolean patterns
    let gens = build_generators(&config).expect("CHSH scenario is small");
    let f_int: Vec<i64> = f.iter().map(|&x| x as i64).collect();
    let mut col = vec![0.0; gens.rows()];
    let mut min_dot = i64::MAX;
    for c in 0..gens.count() {
        gens.write_column(c, &mut col);
        let dot: i64 = f_int.iter().zip(&col).map(|(&a, &b)| a * b as i64).sum();
        min_dot = min_dot.min(dot);
    }
    println!("generators checked: {} (min F.B = {min_dot})", gens.count());
    assert!(min_dot >= 0);

    // quantum side: the singlet violates it
    let p = event_vector(&singlet(), &config).unwrap();
    let fp: f64 = f.iter().zip(&p.full_vector()).map(|(a, b)| a * b).sum();
    println!(
        "F.P on the singlet  = {fp:.9}  (exact: (1 - sqrt(2))/2 = {:.9})",
        (1.0 - std::f64::consts::SQRT_2) / 2.0
    );

    // witness forms: vector route vs operator route
    let w = chsh_witness(
        CANONICAL_A,
        CANONICAL_A_PRIME,
        CANONICAL_B,
        CANONICAL_B_PRIME,
    )
    .unwrap();
    let bell = chsh_bell_operator(
        CANONICAL_A,
        CANONICAL_A_PRIME,
        CANONICAL_B,
        CANONICAL_B_PRIME,
    )
    .unwrap();
    println!(
        "Tr(B singlet)       = {:.9}  (Tsirelson bound 2*sqrt(2))",
        singlet().expectation(&bell)
    );
    println!(
        "Tr(H singlet)       = {:.9}",
        witness_value(&w, &singlet()).unwrap()
    );

    println!("\nWerner line p -> Tr(H rho_p):");
    for p_val in [0.0, 0.25, 0.5, std::f64::consts::FRAC_1_SQRT_2, 0.75, 1.0] {
        let value = witness_value(&w, &werner(p_val).unwrap()).unwrap();
        let marker = if value < -1e-9 { "  <- detected" } else { "" };
        println!("  p = {p_val:.6}: {value:+.6}{marker}");
    }
}
