//! Every distance between density matrices, and the inequality chain
//! `(1/4)||.||_1^2 <= H^2 <= K ∧ ||.||_1` that ties them together.
//!
//! ```bash
//! cargo run --example distance_zoo
//! ```

use lowrank_qst::metrics::{
    bures_hellinger_sq, check_distance_inequalities, kl_bound_after_smoothing, l2_pi_distance,
    quantum_kl, schatten_distance, KlDivergence,
};
use lowrank_qst::state::{haar_random_state, smooth_state};

fn main() -> lowrank_qst::Result<()> {
    let s1 = haar_random_state(4, 2, 1)?;
    let s2 = haar_random_state(4, 4, 2)?;

    for q in [1.0, 2.0, f64::INFINITY] {
        println!("schatten q = {q:>3}: {:.5}", schatten_distance(&s1, &s2, q)?);
    }
    println!("l2(design):     {:.5}", l2_pi_distance(s1.matrix(), s2.matrix(), 4)?);
    println!("hellinger^2:    {:.5}", bures_hellinger_sq(&s1, &s2)?);
    match quantum_kl(&s1, &s2, false)? {
        KlDivergence::Finite(k) => println!("kl(s1 || s2):   {k:.5}"),
        KlDivergence::Infinite => println!("kl(s1 || s2):   inf"),
    }
    // s1 is rank 2, so the reverse direction diverges
    match quantum_kl(&s2, &s1, false)? {
        KlDivergence::Finite(k) => println!("kl(s2 || s1):   {k:.5}"),
        KlDivergence::Infinite => println!("kl(s2 || s1):   inf (s1 is rank deficient)"),
    }

    let report = check_distance_inequalities(&s1, &s2)?;
    println!("\ninequality chain:\n{}", serde_json::to_string_pretty(&report)?);

    // smoothing a state costs little in relative entropy, and the cost is
    // explicitly invertible
    let delta = 1e-4;
    let smoothed = smooth_state(&s1, delta)?;
    if let KlDivergence::Finite(k) = quantum_kl(&smoothed, &s2, false)? {
        println!(
            "\nK(smoothed || s2) = {k:.5}; bound for the unsmoothed state: {:.5}",
            kl_bound_after_smoothing(k, delta)?
        );
    }
    Ok(())
}
