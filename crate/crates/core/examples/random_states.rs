//! Seeded state generators: exact low rank, power-law spectra, smoothing.
//!
//! ```bash
//! cargo run --example random_states
//! ```

use lowrank_qst::state::{haar_random_state, power_law_state, smooth_state};

fn main() -> lowrank_qst::Result<()> {
    let m = 8;

    let pure = haar_random_state(m, 1, 1)?;
    println!(
        "rank-1 state: Frobenius norm {:.6} (pure states have norm 1)",
        pure.matrix().frobenius_norm()
    );

    let low = haar_random_state(m, 3, 2)?;
    println!("rank-3 state spectrum: {:?}", low.eigenvalues());

    // nearly low rank: eigenvalues ∝ j^{-2}, so Σ√λ stays small
    let p = 0.5;
    let nearly = power_law_state(m, p, 4.0, 3)?;
    let membership: f64 = nearly.eigenvalues().iter().map(|l| l.powf(p)).sum();
    println!(
        "power-law state spectrum: {:?}\n  sum lambda^p = {membership:.4} (class radius d = 4)",
        nearly.eigenvalues()
    );

    // smoothing pushes a singular state strictly inside the spectahedron
    let delta = 0.05;
    let smoothed = smooth_state(&pure, delta)?;
    println!(
        "smoothed pure state: min eigenvalue {:.3e} (floor delta/m = {:.3e}), nuclear shift {:.4}",
        smoothed.min_eigenvalue(),
        delta / m as f64,
        (smoothed.matrix() - pure.matrix()).schatten_norm(1.0)?
    );
    Ok(())
}
