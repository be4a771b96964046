//! Born-rule outcome distributions and the three measurement data models.
//!
//! ```bash
//! cargo run --example measure_and_sample
//! ```

use lowrank_qst::basis::{fourier_coefficients, pauli_basis};
use lowrank_qst::sampler::{outcome_distribution, sample_dataset, NoiseModel};
use lowrank_qst::state::haar_random_state;

fn main() -> lowrank_qst::Result<()> {
    let basis = pauli_basis(2)?;
    let rho = haar_random_state(4, 2, 5)?;

    // measuring one observable: eigenvalue outcomes with Born probabilities
    let dist = outcome_distribution(&rho, &basis.element(3))?;
    println!("outcome distribution of element 4:");
    for (value, prob) in &dist {
        println!("  value {value:+.4} with probability {prob:.4}");
    }
    let mean: f64 = dist.iter().map(|(v, p)| v * p).sum();
    println!("  mean {mean:+.4} = <rho, E_4>");

    // one dataset per model, same seed machinery
    for model in [
        NoiseModel::StandardQst { k: 4 },
        NoiseModel::Gaussian { sigma: 0.05 },
        NoiseModel::BoundedBinary { u_bar: 0.5 },
    ] {
        let data = sample_dataset(&rho, &basis, &model, 20_000, 11)?;
        // conditional means reproduce the Fourier coefficients
        let coeffs = fourier_coefficients(&rho, &basis)?;
        let j = 3usize;
        let (mut sum, mut count) = (0.0, 0usize);
        for rec in &data.records {
            if rec.index as usize == j + 1 {
                sum += rec.outcome;
                count += 1;
            }
        }
        println!(
            "{:<14} E(Y | index 4) = {:+.4} from {count} records (exact {:+.4})",
            model.to_spec_string(),
            sum / count as f64,
            coeffs[j]
        );
    }
    Ok(())
}
