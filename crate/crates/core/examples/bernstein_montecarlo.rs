//! Matrix Bernstein concentration, empirically: the operator norm of the
//! Rademacher design average almost never exceeds the tail bound.
//!
//! ```bash
//! cargo run --example bernstein_montecarlo
//! ```

use lowrank_qst::basis::pauli_basis;
use lowrank_qst::rates::{bernstein_bound, bernstein_expectation_bound};
use lowrank_qst::sampler::rademacher_design_matrix;

fn main() -> lowrank_qst::Result<()> {
    let basis = pauli_basis(3)?; // m = 8
    let m = basis.dim();
    let n = 256;
    let reps = 500;
    // for uniform sampling from an orthonormal basis, ||E X^2||_inf = 1/m
    let sigma_x = 1.0 / (m as f64).sqrt();
    let u_x = basis.u_bound();

    let norms: Vec<f64> = (0..reps)
        .map(|s| {
            rademacher_design_matrix(&basis, n, s as u64)
                .unwrap()
                .operator_norm()
                .unwrap()
        })
        .collect();
    let mean = norms.iter().sum::<f64>() / reps as f64;
    println!(
        "mean ||Xi||_inf over {reps} draws: {mean:.5} (expectation bound {:.5})",
        bernstein_expectation_bound(sigma_x, u_x, n, m)
    );

    for t in [1.0f64, 3.0, 5.0] {
        let bound = bernstein_bound(sigma_x, u_x, n, t, m);
        let exceed = norms.iter().filter(|&&x| x > bound).count();
        println!(
            "t = {t}: bound {bound:.5}, exceeded {exceed}/{reps} times (tail budget e^-t = {:.4})",
            (-t).exp()
        );
    }
    Ok(())
}
