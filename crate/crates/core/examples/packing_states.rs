//! The lower-bound construction, made concrete: pack well-separated
//! projectors, lift them to rank-r states, and check that the data
//! distributions they induce stay close in relative entropy while the
//! states stay far apart.
//!
//! ```bash
//! cargo run --example packing_states
//! ```

use lowrank_qst::basis::pauli_basis;
use lowrank_qst::metrics::schatten_distance;
use lowrank_qst::rates::{fano_kl_between_data_laws, find_flat_vector, kappa_choice};
use lowrank_qst::sampler::NoiseModel;
use lowrank_qst::state::{packing_state, sample_projector_packing, PackingConfig};

fn main() -> lowrank_qst::Result<()> {
    let (m, r, n, sigma) = (8usize, 3usize, 4096usize, 0.5);
    let kappa = kappa_choice(sigma, m, r, n, 0.1)?;
    println!("separation weight kappa = {kappa:.4}");
    assert!(kappa < 1.0, "construction needs kappa < 1");

    let cfg = PackingConfig {
        m,
        r,
        kappa,
        count: 6,
        q: 1.0,
        min_separation: 0.8 * (r - 1) as f64, // nuclear distance between projectors
        max_attempts: 5000,
    };
    let packing = sample_projector_packing(&cfg, 9)?;
    println!(
        "found {} projectors in {} attempts (complete: {})",
        packing.projectors.len(),
        packing.attempts_used,
        packing.complete
    );

    let states: Vec<_> = packing
        .projectors
        .iter()
        .map(|q| packing_state(q, kappa))
        .collect::<lowrank_qst::Result<Vec<_>>>()?;
    println!("each packed state has spectrum {:?}", states[0].eigenvalues());

    // pairwise state separation inherits the projector separation scaled by
    // kappa/(r-1); the data-law divergence stays much smaller, which is the
    // whole point of the construction
    let basis = pauli_basis(3)?;
    let model = NoiseModel::Gaussian { sigma };
    println!("\npair  ||S_i - S_j||_1   KL(data_i || data_j)");
    for i in 0..states.len().min(3) {
        for j in (i + 1)..states.len().min(3) {
            let d = schatten_distance(&states[i], &states[j], 1.0)?;
            let kl = fano_kl_between_data_laws(&model, &states[i], &states[j], &basis, n)?;
            println!("({i},{j})     {d:>8.4}        {:>8.4}", kl.as_f64());
        }
    }

    // the flat-vector search feeds the bounded-outcome variant of the same
    // argument: a unit vector with uniformly small quadratic forms
    let search = find_flat_vector(&basis, 0.5, 64, 13)?;
    match search.vector {
        Some(_) => println!(
            "\nflat vector found in {} tries (exempt elements: {:?})",
            search.tries_used, search.exempt
        ),
        None => println!("\nno flat vector within budget; best max {:.4}", search.best_max),
    }
    Ok(())
}
