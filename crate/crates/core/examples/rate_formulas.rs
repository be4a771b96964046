//! Closed-form lower and upper error rates on an n-grid, effective rank for
//! nearly-low-rank classes, and the packed-state separation weight.
//!
//! ```bash
//! cargo run --example rate_formulas
//! ```

use lowrank_qst::rates::{
    effective_rank, kappa_choice, minimax_lower_rate, upper_rate, DistanceKind, NoiseScale,
    RateParams, UpperTheorem,
};

fn main() -> lowrank_qst::Result<()> {
    let (m, r, sigma) = (8usize, 2usize, 0.05);
    println!("m = {m}, rank {r}, sigma = {sigma}; Frobenius-distance rates\n");
    println!("{:>8} {:>12} {:>12} {:>8}", "n", "lower", "upper", "ratio");
    let mut n = 1024usize;
    while n <= 65536 {
        let params = RateParams {
            m,
            r,
            n,
            scale: NoiseScale::Sigma(sigma),
        };
        let low = minimax_lower_rate(DistanceKind::Schatten(2.0), &params)?;
        let up = upper_rate(UpperTheorem::Gauss, DistanceKind::Schatten(2.0), &params)?;
        println!("{n:>8} {low:>12.5} {up:>12.5} {:>8.2}", up / low);
        n *= 2;
    }

    println!("\nPauli measurements absorb U = 1/sqrt(m) into the scale:");
    let params = RateParams {
        m,
        r,
        n: 4096,
        scale: NoiseScale::Pauli,
    };
    println!(
        "  nuclear lower rate at n = 4096: {:.4} (= m r / sqrt(n), capped at 1)",
        minimax_lower_rate(DistanceKind::Schatten(1.0), &params)?
    );

    // a power-law spectrum behaves like a low-rank state of effective rank
    // d tau^{-p} once eigenvalues fall below the resolution tau
    let tau = sigma * (m as f64).powf(1.5) / (4096f64).sqrt();
    println!(
        "\neffective rank of B_p(d=2, p=0.5) at tau = {tau:.4}: {:.2}",
        effective_rank(0.5, 2.0, tau, m)?
    );

    // weight for the separated-state construction behind the lower bounds
    let kappa = kappa_choice(sigma, m, r, 4096, 0.1)?;
    println!("packing weight kappa at n = 4096: {kappa:.5} (must stay below 1)");
    Ok(())
}
