//! Build the Pauli tensor basis, validate it, and poke at its structure.
//!
//! ```bash
//! cargo run --example pauli_basis
//! ```

use lowrank_qst::basis::{fourier_coefficients, pauli_basis, validate_basis};
use lowrank_qst::state::haar_random_state;

fn main() -> lowrank_qst::Result<()> {
    let basis = pauli_basis(2)?;
    println!(
        "basis {}: {} elements of dimension {}, U = {}",
        basis.label(),
        basis.len(),
        basis.dim(),
        basis.u_bound()
    );

    let report = validate_basis(&basis, 0.1)?;
    println!("{}", serde_json::to_string_pretty(&report)?);

    // every element squares to I/m (eigenvalues are ±1/√m)
    let e5 = basis.element(5);
    let eig = e5.eigh()?;
    println!("element 6 eigenvalues: {:?}", eig.eigenvalues);
    println!("element 6 trace: {:.3e}", e5.trace());

    // Fourier expansion of a random rank-2 state reconstructs it
    let rho = haar_random_state(4, 2, 7)?;
    let coeffs = fourier_coefficients(&rho, &basis)?;
    let back = basis.expand(&coeffs)?;
    println!(
        "expansion residual for a random state: {:.2e}",
        (&back - rho.matrix()).frobenius_norm()
    );
    println!(
        "sum of squared coefficients = {:.6} (purity tr rho^2 = {:.6})",
        coeffs.iter().map(|c| c * c).sum::<f64>(),
        rho.matrix().frobenius_norm().powi(2)
    );
    Ok(())
}
