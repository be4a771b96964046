//! Shared test oracles. Everything here deliberately avoids the library's
//! eigensolver and optimizers: 2×2 states are handled through the Bloch
//! parametrization `S(v) = (I + v·σ)/2` with closed-form eigenvalues
//! `(1 ± ‖v‖)/2`, and minimization is plain grid search.

use lowrank_qst::hermitian::HermitianMatrix;
use num_complex::Complex64;

/// Bloch-vector state `S(v) = (I + v·σ)/2`, valid for `‖v‖ ≤ 1`.
pub fn bloch_matrix(v: [f64; 3]) -> HermitianMatrix {
    let [x, y, z] = v;
    HermitianMatrix::new(
        2,
        vec![
            Complex64::new(0.5 * (1.0 + z), 0.0),
            Complex64::new(0.5 * x, -0.5 * y),
            Complex64::new(0.5 * x, 0.5 * y),
            Complex64::new(0.5 * (1.0 - z), 0.0),
        ],
    )
    .unwrap()
}

/// Entrywise Frobenius distance `‖S(v) − A‖₂` without any decomposition.
pub fn bloch_frobenius_to(a: &HermitianMatrix, v: [f64; 3]) -> f64 {
    let s = bloch_matrix(v);
    let mut acc = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            acc += (s.get(i, j) - a.get(i, j)).norm_sqr();
        }
    }
    acc.sqrt()
}

/// Closed-form eigenvalues of a Bloch state, `(1 ± ‖v‖)/2`.
pub fn bloch_eigenvalues(v: [f64; 3]) -> (f64, f64) {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    (0.5 * (1.0 + r), 0.5 * (1.0 - r))
}

/// `tr(S log S)` of a Bloch state via the closed-form spectrum.
pub fn bloch_trace_s_log_s(v: [f64; 3]) -> f64 {
    let (a, b) = bloch_eigenvalues(v);
    let mut acc = 0.0;
    if a > 0.0 {
        acc += a * a.ln();
    }
    if b > 0.0 {
        acc += b * b.ln();
    }
    acc
}

/// Exhaustive minimization over a `points³` cube grid restricted to the
/// Bloch ball. Returns the best value and its grid point.
pub fn grid_min(
    f: &dyn Fn([f64; 3]) -> f64,
    center: [f64; 3],
    half_width: f64,
    points: usize,
) -> (f64, [f64; 3]) {
    let mut best = (f64::INFINITY, [0.0; 3]);
    let step = 2.0 * half_width / (points - 1) as f64;
    for ix in 0..points {
        let x = center[0] - half_width + ix as f64 * step;
        for iy in 0..points {
            let y = center[1] - half_width + iy as f64 * step;
            for iz in 0..points {
                let z = center[2] - half_width + iz as f64 * step;
                if x * x + y * y + z * z > 1.0 {
                    continue;
                }
                let val = f([x, y, z]);
                if val < best.0 {
                    best = (val, [x, y, z]);
                }
            }
        }
    }
    best
}

/// Single-stage million-point ball grid (100 points per axis over [-1,1]³).
pub fn grid_min_million(f: &dyn Fn([f64; 3]) -> f64) -> (f64, [f64; 3]) {
    grid_min(f, [0.0; 3], 1.0, 100)
}

/// Three-stage refined grid search: a coarse million-point pass followed by
/// two zoomed passes around the incumbent. Still pure grid evaluation.
pub fn grid_min_refined(f: &dyn Fn([f64; 3]) -> f64) -> (f64, [f64; 3]) {
    let coarse_step = 2.0 / 99.0;
    let (_, mut center) = grid_min_million(f);
    let mut half = 2.0 * coarse_step;
    let mut best = (f64::INFINITY, center);
    for _ in 0..2 {
        let stage = grid_min(f, center, half, 41);
        if stage.0 < best.0 {
            best = stage;
        }
        center = best.1;
        half = 2.0 * (2.0 * half / 40.0);
    }
    best
}
