//! Frozen Monte Carlo fixtures: values first measured by a calibration run
//! and then pinned here so regressions show up as test failures.

use lowrank_qst::basis::pauli_basis;
use lowrank_qst::rates::find_flat_vector;

/// Calibration run (100 seeds): the flat-vector search at b = 3, γ = 0.5
/// succeeded within 64 tries for 100/100 seeds. Pin the documented floor of
/// 95 out of 100.
#[test]
fn flat_vector_search_succeeds_for_most_seeds() {
    let basis = pauli_basis(3).unwrap();
    let seeds = 100u64;
    let mut found = 0usize;
    for seed in 0..seeds {
        let search = find_flat_vector(&basis, 0.5, 64, seed).unwrap();
        if let Some(v) = search.vector {
            found += 1;
            let norm: f64 = v.iter().map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < 1e-12);
            // every exempt element is reported; for Pauli that is exactly
            // the scaled identity
            assert_eq!(search.exempt, vec![1]);
            assert!(search.best_max <= search.threshold);
        }
    }
    assert!(
        found >= 95,
        "flat vector found for only {found}/{seeds} seeds"
    );
}

/// The same search must degrade gracefully: an impossible threshold returns
/// the best attempt rather than an error.
#[test]
fn flat_vector_search_reports_best_attempt() {
    let basis = pauli_basis(2).unwrap();
    // gamma close to 1 makes the acceptance threshold (1-γ/2)U ≈ U/2,
    // while every sign vector hits |⟨E v,v⟩| = U on some diagonal element
    let search = find_flat_vector(&basis, 0.999, 16, 3).unwrap();
    assert!(search.vector.is_none());
    assert_eq!(search.tries_used, 16);
    assert!(search.best_max.is_finite());
    assert!(search.best_max > search.threshold);
}
