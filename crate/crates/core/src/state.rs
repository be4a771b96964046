//! Density matrices and generators.
//!
//! A density matrix is a PSD Hermitian matrix of unit trace; the set of all
//! of them (the spectahedron) is the feasible set of every estimator in this
//! crate. Besides validation and Frobenius projection onto that set, this
//! module provides seeded generators: Haar-style low-rank states, power-law
//! (nearly low rank) spectra, convex smoothing towards the maximally mixed
//! state, and the block construction that turns a packing of projectors into
//! a packing of rank-r states.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, SubspaceProjector};

/// Trace deviation beyond which validation fails.
const TRACE_ERROR_TOL: f64 = 1e-8;
/// Eigenvalue below this is a positivity failure; in (-tol, 0) it is clamped.
const POSITIVITY_ERROR_TOL: f64 = -1e-8;
/// Inputs already within these exact-arithmetic tolerances are kept verbatim.
const TRACE_EXACT_TOL: f64 = 1e-10;

/// A validated density matrix with its spectrum cached (non-increasing).
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: HermitianMatrix,
    eigenvalues: Vec<f64>,
}

impl DensityMatrix {
    /// Validate a Hermitian matrix as a density matrix.
    ///
    /// Fails if the trace deviates from 1 by more than `1e-8` or an
    /// eigenvalue is below `-1e-8`. Tiny defects inside those tolerances are
    /// repaired (negative eigenvalues clamped to zero, spectrum rescaled to
    /// unit trace); inputs that are already exact are kept bit-for-bit.
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        let trace = matrix.trace();
        if (trace - 1.0).abs() > TRACE_ERROR_TOL {
            return Err(Error::Trace(trace));
        }
        let eig = matrix.eigh()?;
        let min = *eig
            .eigenvalues
            .last()
            .ok_or_else(|| Error::argument("empty matrix"))?;
        if min < POSITIVITY_ERROR_TOL {
            return Err(Error::Positivity(min));
        }
        if min >= 0.0 && (trace - 1.0).abs() <= TRACE_EXACT_TOL {
            return Ok(DensityMatrix {
                matrix,
                eigenvalues: eig.eigenvalues,
            });
        }
        // Clamp and renormalize within the validation tolerance.
        let clamped: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
        let sum: f64 = clamped.iter().sum();
        let fixed: Vec<f64> = clamped.iter().map(|&l| l / sum).collect();
        let rebuilt = eig.rebuild_with_spectrum(&fixed);
        Ok(DensityMatrix {
            matrix: rebuilt,
            eigenvalues: fixed,
        })
    }

    /// The maximally mixed state `I_m / m`.
    pub fn maximally_mixed(m: usize) -> Self {
        DensityMatrix {
            matrix: HermitianMatrix::identity(m).scale(1.0 / m as f64),
            eigenvalues: vec![1.0 / m as f64; m],
        }
    }

    pub(crate) fn from_spectrum_unchecked(
        matrix: HermitianMatrix,
        eigenvalues: Vec<f64>,
    ) -> Self {
        DensityMatrix {
            matrix,
            eigenvalues,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    /// Cached eigenvalues, non-increasing.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    /// Count of eigenvalues above the tolerance.
    pub fn numerical_rank(&self, tol: f64) -> usize {
        self.eigenvalues.iter().filter(|&&l| l > tol).count()
    }

    /// `tr(S log S)` with the `0·log 0 = 0` convention (the negative of the
    /// von Neumann entropy).
    pub fn trace_s_log_s(&self) -> f64 {
        self.eigenvalues
            .iter()
            .filter(|&&l| l > 0.0)
            .map(|&l| l * l.ln())
            .sum()
    }

    /// Serialize as the Hermitian JSON form plus a `kind` tag.
    pub fn to_json(&self, kind: &str) -> serde_json::Value {
        let mut v = self.matrix.to_json();
        v.as_object_mut()
            .expect("object")
            .insert("kind".into(), serde_json::Value::String(kind.into()));
        v
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        DensityMatrix::new(HermitianMatrix::from_json(value)?)
    }
}

/// Euclidean projection of a real vector onto the probability simplex,
/// by the sort-and-threshold rule: find the largest k with
/// `u_(k) − (Σ_{i≤k} u_(i) − 1)/k > 0`, subtract that threshold, clamp at 0.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut css = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        css += uk;
        let candidate = (css - 1.0) / (k + 1) as f64;
        if uk - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Frobenius projection of a Hermitian matrix onto the spectahedron:
/// eigendecompose and project the spectrum onto the probability simplex.
/// Idempotent on density matrices.
pub fn project_to_spectahedron(a: &HermitianMatrix) -> Result<DensityMatrix> {
    let eig = a.eigh()?;
    let projected = project_to_simplex(&eig.eigenvalues);
    let matrix = eig.rebuild_with_spectrum(&projected);
    Ok(DensityMatrix::from_spectrum_unchecked(matrix, projected))
}

fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Rank-r state from an m×r complex Gaussian factor `G`: `ρ = GG*/tr(GG*)`.
/// Unitarily invariant in distribution and deterministic per seed.
pub fn haar_random_state(m: usize, r: usize, seed: u64) -> Result<DensityMatrix> {
    if r < 1 || r > m {
        return Err(Error::argument(format!(
            "rank must be in [1, {m}], got {r}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: Vec<Complex64> = (0..m * r).map(|_| complex_gaussian(&mut rng)).collect();
    let mut w = vec![Complex64::new(0.0, 0.0); m * m];
    for i in 0..m {
        for j in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..r {
                acc += g[i * r + k] * g[j * r + k].conj();
            }
            w[i * m + j] = acc;
        }
    }
    let w = HermitianMatrix::from_raw_symmetrize(m, w);
    DensityMatrix::new(w.scale(1.0 / w.trace()))
}

/// Haar-distributed orthonormal frame of `r` columns in dimension `m`,
/// via modified Gram–Schmidt on a complex Gaussian matrix. The diagonal of
/// the implicit R factor is positive by construction, which fixes the phase
/// ambiguity and makes the draw deterministic per RNG state.
pub fn haar_frame(m: usize, r: usize, rng: &mut impl Rng) -> Vec<Vec<Complex64>> {
    let mut cols: Vec<Vec<Complex64>> = (0..r)
        .map(|_| (0..m).map(|_| complex_gaussian(rng)).collect())
        .collect();
    for k in 0..r {
        for prev in 0..k {
            let proj: Complex64 = (0..m)
                .map(|i| cols[prev][i].conj() * cols[k][i])
                .sum();
            for i in 0..m {
                let sub = proj * cols[prev][i];
                cols[k][i] -= sub;
            }
        }
        let norm: f64 = cols[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[k].iter_mut() {
            *z /= norm;
        }
    }
    cols
}

/// Haar-random rank-r orthogonal projector in dimension m.
pub fn haar_random_projector(m: usize, r: usize, rng: &mut impl Rng) -> SubspaceProjector {
    let cols = haar_frame(m, r, rng);
    SubspaceProjector::from_orthonormal_columns(m, &cols)
}

/// State with eigenvalues `λ_j ∝ j^{-1/p}` (renormalized to unit trace) in a
/// Haar-random eigenbasis. The result is checked to satisfy `Σ λ_j^p ≤ d`;
/// a profile violating that bound is an infeasible `(p, d)` pair.
pub fn power_law_state(m: usize, p: f64, d: f64, seed: u64) -> Result<DensityMatrix> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::argument(format!("p must be in (0, 1], got {p}")));
    }
    if d <= 0.0 {
        return Err(Error::argument("d must be positive"));
    }
    let raw: Vec<f64> = (1..=m).map(|j| (j as f64).powf(-1.0 / p)).collect();
    let z: f64 = raw.iter().sum();
    let spectrum: Vec<f64> = raw.iter().map(|l| l / z).collect();
    let membership: f64 = spectrum.iter().map(|l| l.powf(p)).sum();
    if membership > d + 1e-12 {
        return Err(Error::argument(format!(
            "power-law profile has Σλ^p = {membership:.6}, exceeding d = {d}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frame = haar_frame(m, m, &mut rng);
    let mut data = vec![Complex64::new(0.0, 0.0); m * m];
    for (k, col) in frame.iter().enumerate() {
        for i in 0..m {
            let w = col[i] * spectrum[k];
            for j in 0..m {
                data[i * m + j] += w * col[j].conj();
            }
        }
    }
    DensityMatrix::new(HermitianMatrix::from_raw_symmetrize(m, data))
}

/// Convex smoothing towards the maximally mixed state:
/// `S = (1-δ)S' + δ·I_m/m`. The result is full rank with every eigenvalue at
/// least `δ/m`, and `‖S − S'‖₁ = δ‖S' − I/m‖₁ ≤ 2δ`.
pub fn smooth_state(s_prime: &DensityMatrix, delta: f64) -> Result<DensityMatrix> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::argument(format!(
            "delta must be in (0, 1), got {delta}"
        )));
    }
    let m = s_prime.dim();
    let matrix = &s_prime.matrix().scale(1.0 - delta)
        + &HermitianMatrix::identity(m).scale(delta / m as f64);
    let eigenvalues = s_prime
        .eigenvalues()
        .iter()
        .map(|&l| (1.0 - delta) * l + delta / m as f64)
        .collect();
    Ok(DensityMatrix::from_spectrum_unchecked(matrix, eigenvalues))
}

/// Default smoothing parameter `δ = 1/(m²n²)` used before taking relative
/// entropies of estimates fitted on n samples.
pub fn default_smoothing_delta(m: usize, n: usize) -> f64 {
    1.0 / ((m * m) as f64 * (n * n) as f64)
}

/// Configuration for a packing of rank-(r-1) projectors in dimension m-1,
/// used to build well-separated rank-r states.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PackingConfig {
    /// Ambient state dimension m.
    pub m: usize,
    /// Target state rank r (projectors have rank r-1).
    pub r: usize,
    /// Weight of the projector block, in (0,1).
    pub kappa: f64,
    /// How many projectors to look for.
    pub count: usize,
    /// Schatten index used for the separation distance.
    pub q: f64,
    /// Required pairwise separation `‖Q_i − Q_j‖_q`.
    pub min_separation: f64,
    /// Rejection-sampling attempt budget.
    pub max_attempts: usize,
}

impl PackingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa < 1.0) {
            return Err(Error::argument("kappa must be in (0, 1)"));
        }
        // Packings need the projector rank to fit its complement:
        // r-1 <= (m-1)-(r-1), i.e. 2r <= m+1. Ranks above that have no
        // packing construction here.
        if self.r < 2 || 2 * self.r > self.m + 1 {
            return Err(Error::argument(format!(
                "need 2 <= r and 2r <= m+1, got r = {}, m = {}",
                self.r, self.m
            )));
        }
        if self.q < 1.0 {
            return Err(Error::argument("q must be at least 1"));
        }
        if self.count == 0 || self.max_attempts == 0 {
            return Err(Error::argument("count and max_attempts must be positive"));
        }
        Ok(())
    }
}

/// Result of rejection-sampled packing: as many projectors as the budget
/// allowed, with `complete` telling whether the requested count was reached.
#[derive(Debug)]
pub struct PackingSample {
    pub projectors: Vec<SubspaceProjector>,
    pub attempts_used: usize,
    pub complete: bool,
}

/// Rejection-sample rank-(r-1) projectors in dimension m-1 with pairwise
/// Schatten-q separation above `min_separation`. Returns what was found
/// within the budget; falling short is reported, not an error.
pub fn sample_projector_packing(cfg: &PackingConfig, seed: u64) -> Result<PackingSample> {
    cfg.validate()?;
    let dim = cfg.m - 1;
    let rank = cfg.r - 1;
    let mut projectors: Vec<SubspaceProjector> = Vec::with_capacity(cfg.count);
    let mut attempts = 0usize;
    while projectors.len() < cfg.count && attempts < cfg.max_attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempts as u64);
        attempts += 1;
        let candidate = haar_random_projector(dim, rank, &mut rng);
        let mut ok = true;
        for existing in &projectors {
            let diff = candidate.matrix() - existing.matrix();
            if diff.schatten_norm(cfg.q)? <= cfg.min_separation {
                ok = false;
                break;
            }
        }
        if ok {
            projectors.push(candidate);
        }
    }
    let complete = projectors.len() >= cfg.count;
    Ok(PackingSample {
        projectors,
        attempts_used: attempts,
        complete,
    })
}

/// Rank-r state from a rank-(r-1) projector `Q` in dimension m-1:
/// block-diagonal `diag(1-κ, κ·Q/(r-1))`. Its spectrum is `{1-κ}` together
/// with `κ/(r-1)` repeated r-1 times.
pub fn packing_state(q: &SubspaceProjector, kappa: f64) -> Result<DensityMatrix> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::argument(format!(
            "kappa must be in (0, 1), got {kappa}"
        )));
    }
    let r_minus_1 = q.rank();
    if r_minus_1 < 1 {
        return Err(Error::argument("projector must have rank at least 1"));
    }
    let inner = q.dim();
    let m = inner + 1;
    let w = kappa / r_minus_1 as f64;
    let mut out = HermitianMatrix::zeros(m);
    out.set(0, 0, Complex64::new(1.0 - kappa, 0.0));
    for i in 0..inner {
        for j in i..inner {
            out.set(i + 1, j + 1, q.matrix().get(i, j) * w);
        }
    }
    DensityMatrix::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::random_hermitian;

    #[test]
    fn validate_maximally_mixed() {
        let m = 4;
        let rho = DensityMatrix::new(HermitianMatrix::identity(m).scale(0.25)).unwrap();
        assert!((rho.matrix().trace() - 1.0).abs() < 1e-12);
        assert_eq!(rho.numerical_rank(1e-12), 4);
    }

    #[test]
    fn validate_trace_error() {
        let a = HermitianMatrix::from_diag(&[0.5, 0.6]);
        assert!(matches!(DensityMatrix::new(a), Err(Error::Trace(_))));
    }

    #[test]
    fn validate_positivity_error() {
        let a = HermitianMatrix::from_diag(&[1.2, -0.2]);
        assert!(matches!(DensityMatrix::new(a), Err(Error::Positivity(_))));
    }

    #[test]
    fn validate_repairs_tiny_defects() {
        let a = HermitianMatrix::from_diag(&[1.0 + 3e-9, -2e-9]);
        let rho = DensityMatrix::new(a).unwrap();
        assert!((rho.matrix().trace() - 1.0).abs() < 1e-12);
        assert!(rho.min_eigenvalue() >= 0.0);
    }

    #[test]
    fn simplex_projection_zero_vector_is_uniform() {
        let p = project_to_simplex(&[0.0, 0.0, 0.0, 0.0]);
        for x in p {
            assert!((x - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn spectahedron_projection_idempotent() {
        let rho = haar_random_state(3, 2, 5).unwrap();
        let again = project_to_spectahedron(rho.matrix()).unwrap();
        assert!((again.matrix() - rho.matrix()).frobenius_norm() < 1e-10);
    }

    #[test]
    fn spectahedron_projection_diag_example() {
        // diag(2, 0): brute force over diagonal states diag(x, 1-x).
        let a = HermitianMatrix::from_diag(&[2.0, 0.0]);
        let proj = project_to_spectahedron(&a).unwrap();
        let mut best = (f64::INFINITY, 0.0);
        let grid = 1_000_000usize;
        for k in 0..=grid {
            let x = k as f64 / grid as f64;
            let obj = (x - 2.0).powi(2) + (1.0 - x).powi(2);
            if obj < best.0 {
                best = (obj, x);
            }
        }
        assert!((proj.matrix().get(0, 0).re - best.1).abs() < 2e-6);
        assert!((proj.matrix().get(0, 0).re - 1.0).abs() < 1e-9);
        assert!(proj.matrix().get(1, 1).re.abs() < 1e-9);
    }

    #[test]
    fn spectahedron_projection_nonexpansive() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..1000 {
            let a = random_hermitian(3, &mut rng);
            let b = random_hermitian(3, &mut rng);
            let pa = project_to_spectahedron(&a).unwrap();
            let pb = project_to_spectahedron(&b).unwrap();
            let lhs = (pa.matrix() - pb.matrix()).frobenius_norm();
            let rhs = (&a - &b).frobenius_norm();
            assert!(lhs <= rhs + 1e-10);
        }
    }

    #[test]
    fn haar_state_rank_and_purity() {
        let rho = haar_random_state(4, 4, 1).unwrap();
        assert_eq!(rho.numerical_rank(1e-12), 4);
        assert!((rho.matrix().trace() - 1.0).abs() < 1e-10);

        let pure = haar_random_state(4, 1, 2).unwrap();
        assert!((pure.matrix().frobenius_norm() - 1.0).abs() < 1e-10);
        assert_eq!(pure.numerical_rank(1e-12), 1);
    }

    #[test]
    fn haar_state_mean_is_maximally_mixed() {
        let m = 2;
        let draws = 10_000usize;
        let mut mean = HermitianMatrix::zeros(m);
        for s in 0..draws {
            mean = &mean + &haar_random_state(m, m, 1000 + s as u64).unwrap().matrix().clone();
        }
        mean = mean.scale(1.0 / draws as f64);
        let target = HermitianMatrix::identity(m).scale(1.0 / m as f64);
        let tol = 3.0 / (draws as f64).sqrt();
        for i in 0..m {
            for j in 0..m {
                assert!((mean.get(i, j) - target.get(i, j)).norm() < tol);
            }
        }
    }

    #[test]
    fn haar_state_deterministic_per_seed() {
        let a = haar_random_state(3, 2, 99).unwrap();
        let b = haar_random_state(3, 2, 99).unwrap();
        assert!((a.matrix() - b.matrix()).frobenius_norm() == 0.0);
    }

    #[test]
    fn power_law_profile() {
        // p = 0.5: pre-normalization decay j^{-2}.
        let rho = power_law_state(8, 0.5, 4.0, 3).unwrap();
        let lambda = rho.eigenvalues();
        for j in 1..8 {
            let ratio = lambda[j] * ((j + 1) as f64).powi(2);
            let ratio0 = lambda[0];
            assert!((ratio - ratio0).abs() < 1e-9);
        }
        // membership bound λ_j ≤ d^{1/p}/j^{1/p}
        let (p, d) = (0.5f64, 4.0f64);
        for (j, &l) in lambda.iter().enumerate() {
            assert!(l <= d.powf(1.0 / p) / ((j + 1) as f64).powf(1.0 / p) + 1e-12);
        }
    }

    #[test]
    fn power_law_p_one_is_always_feasible() {
        let rho = power_law_state(5, 1.0, 1.0, 7).unwrap();
        assert!((rho.matrix().trace() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn power_law_infeasible_pair() {
        // For m = 8, p = 0.5 the profile has Σλ^p ≈ 2.02; d = 1.5 is infeasible.
        assert!(power_law_state(8, 0.5, 1.5, 1).is_err());
    }

    #[test]
    fn smoothing_examples() {
        let m = 3;
        let mixed = DensityMatrix::maximally_mixed(m);
        let s = smooth_state(&mixed, 0.3).unwrap();
        assert!((s.matrix() - mixed.matrix()).frobenius_norm() < 1e-12);

        let pure = DensityMatrix::new(HermitianMatrix::from_diag(&[1.0, 0.0])).unwrap();
        let s = smooth_state(&pure, 0.5).unwrap();
        assert!((s.matrix().get(0, 0).re - 0.75).abs() < 1e-12);
        assert!((s.matrix().get(1, 1).re - 0.25).abs() < 1e-12);

        // ‖S − S'‖₁ = δ‖S' − I/m‖₁ ≤ 2δ and min eigenvalue ≥ δ/m
        let rho = haar_random_state(4, 2, 11).unwrap();
        let delta = 0.1;
        let sm = smooth_state(&rho, delta).unwrap();
        let lhs = (sm.matrix() - rho.matrix()).schatten_norm(1.0).unwrap();
        let rhs = delta
            * (rho.matrix() - &HermitianMatrix::identity(4).scale(0.25))
                .schatten_norm(1.0)
                .unwrap();
        assert!((lhs - rhs).abs() < 1e-10);
        assert!(lhs <= 2.0 * delta + 1e-12);
        assert!(sm.min_eigenvalue() >= delta / 4.0 - 1e-12);
    }

    #[test]
    fn smoothing_rejects_bad_delta() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(smooth_state(&rho, 0.0).is_err());
        assert!(smooth_state(&rho, 1.0).is_err());
    }

    #[test]
    fn default_smoothing_delta_value() {
        assert!((default_smoothing_delta(4, 100) - 1.0 / 160_000.0).abs() < 1e-18);
    }

    #[test]
    fn packing_state_two_dim_example() {
        let q = SubspaceProjector::full(1);
        let s = packing_state(&q, 0.5).unwrap();
        assert!((s.matrix().get(0, 0).re - 0.5).abs() < 1e-12);
        assert!((s.matrix().get(1, 1).re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn packing_state_spectrum() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let q = haar_random_projector(7, 2, &mut rng); // r - 1 = 2, m = 8
        let kappa = 0.4;
        let s = packing_state(&q, kappa).unwrap();
        assert!((s.matrix().trace() - 1.0).abs() < 1e-10);
        let eig = s.matrix().eigh().unwrap().eigenvalues;
        assert!((eig[0] - (1.0 - kappa)).abs() < 1e-10);
        for k in 1..3 {
            assert!((eig[k] - kappa / 2.0).abs() < 1e-10);
        }
        for &l in &eig[3..] {
            assert!(l.abs() < 1e-10);
        }
    }

    #[test]
    fn projector_packing_single_always_succeeds() {
        let cfg = PackingConfig {
            m: 6,
            r: 2,
            kappa: 0.3,
            count: 1,
            q: 2.0,
            min_separation: 0.5,
            max_attempts: 10,
        };
        let sample = sample_projector_packing(&cfg, 1).unwrap();
        assert!(sample.complete);
        assert_eq!(sample.projectors.len(), 1);
        assert_eq!(sample.projectors[0].rank(), 1);
        assert_eq!(sample.projectors[0].dim(), 5);
    }

    #[test]
    fn projector_packing_pairwise_separation() {
        // rank-1 projectors in dimension 2 with Schatten-2 separation 0.5
        let cfg = PackingConfig {
            m: 3,
            r: 2,
            kappa: 0.3,
            count: 4,
            q: 2.0,
            min_separation: 0.5,
            max_attempts: 2000,
        };
        let sample = sample_projector_packing(&cfg, 5).unwrap();
        assert!(sample.complete, "budget exhausted at {}", sample.attempts_used);
        for i in 0..sample.projectors.len() {
            for j in (i + 1)..sample.projectors.len() {
                let d = (sample.projectors[i].matrix() - sample.projectors[j].matrix())
                    .schatten_norm(2.0)
                    .unwrap();
                assert!(d > cfg.min_separation);
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn simplex_projection_properties(v in proptest::collection::vec(-5.0f64..5.0, 1..12)) {
            let p = project_to_simplex(&v);
            let sum: f64 = p.iter().sum();
            proptest::prop_assert!((sum - 1.0).abs() < 1e-9);
            proptest::prop_assert!(p.iter().all(|&x| x >= 0.0));
            // idempotence
            let again = project_to_simplex(&p);
            for (a, b) in again.iter().zip(p.iter()) {
                proptest::prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn simplex_points_are_fixed(mut v in proptest::collection::vec(0.0f64..1.0, 2..8)) {
            let total: f64 = v.iter().sum();
            proptest::prop_assume!(total > 1e-6);
            for x in v.iter_mut() {
                *x /= total;
            }
            let p = project_to_simplex(&v);
            for (a, b) in p.iter().zip(v.iter()) {
                proptest::prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn projector_packing_reports_partial() {
        // Impossible separation: only one projector fits.
        let cfg = PackingConfig {
            m: 3,
            r: 2,
            kappa: 0.3,
            count: 5,
            q: 2.0,
            min_separation: 10.0,
            max_attempts: 50,
        };
        let sample = sample_projector_packing(&cfg, 2).unwrap();
        assert!(!sample.complete);
        assert_eq!(sample.projectors.len(), 1);
        assert_eq!(sample.attempts_used, 50);
    }
}
