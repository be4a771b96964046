//! Density-matrix estimators for trace-regression data.
//!
//! Three estimators over the spectahedron `S_m` (unit-trace PSD matrices):
//!
//! - [`least_squares`] — minimize the empirical squared loss
//!   `n^{-1} Σ (Y_i − ⟨S, X_i⟩)²` by projected gradient descent. On `S_m`
//!   the nuclear norm is constant, so this already carries an implicit
//!   nuclear penalty of arbitrary weight.
//! - [`modified_least_squares`] — replace the empirical design norm with its
//!   population value; the minimizer has the closed form
//!   `project_to_spectahedron((m²/n) Σ Y_i X_i)`.
//! - [`vn_penalized`] — add `ε·tr(S log S)` (negative von Neumann entropy)
//!   and minimize by entropy mirror descent (matrix exponentiated gradient):
//!   `S ← exp(log S − η g) / tr(exp(log S − η g))`. Multiplicative updates
//!   keep every iterate strictly positive definite, so the entropy gradient
//!   `log S + I` is always defined and the output is full rank.
//!
//! Both iterative solvers use Armijo backtracking, so objective traces are
//! non-increasing. Uniform-design structure lets the loss be compressed to
//! per-index counts and outcome sums; iteration cost is then independent of
//! the number of records.

use serde::Serialize;

use crate::basis::ObservableBasis;
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::sampler::{weighted_basis_sum, Dataset, NoiseModel};
use crate::state::{project_to_spectahedron, DensityMatrix};

/// Step-size rule for the iterative solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    /// Fixed step; no backtracking (useful for reproducing exact traces).
    Fixed(f64),
    /// Armijo backtracking: shrink by `beta` until
    /// `f(S⁺) ≤ f(S) + c·⟨∇f(S), S⁺−S⟩`.
    Backtracking { beta: f64, c: f64 },
}

/// Initial iterate.
#[derive(Debug, Clone)]
pub enum Init {
    MaximallyMixed,
    Custom(DensityMatrix),
}

/// Solver configuration shared by both iterative estimators.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub step_rule: StepRule,
    /// Relative objective-decrease threshold; convergence is declared after
    /// it holds for 5 consecutive iterations.
    pub tol_objective: f64,
    /// Alternative stop: step-normalized movement below this.
    pub tol_gradient: f64,
    pub init: Init,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 5000,
            step_rule: StepRule::Backtracking { beta: 0.5, c: 1e-4 },
            tol_objective: 1e-10,
            tol_gradient: 1e-9,
            init: Init::MaximallyMixed,
        }
    }
}

/// Fit outcome: the estimate plus the solve diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    #[serde(skip)]
    pub estimate: DensityMatrix,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub min_eigenvalue: f64,
}

/// Uniform-design sufficient statistics: per-index record counts and outcome
/// sums. The empirical loss and its gradient depend on the data only
/// through these.
struct CompressedData {
    n: usize,
    counts: Vec<f64>,
    outcome_sums: Vec<f64>,
    mean_outcome_sq: f64,
}

impl CompressedData {
    fn build(data: &Dataset, basis: &ObservableBasis) -> Result<Self> {
        data.check_basis(basis)?;
        let m2 = basis.len();
        let mut counts = vec![0.0; m2];
        let mut outcome_sums = vec![0.0; m2];
        let mut sq = 0.0;
        for rec in &data.records {
            let j = (rec.index - 1) as usize;
            counts[j] += 1.0;
            outcome_sums[j] += rec.outcome;
            sq += rec.outcome * rec.outcome;
        }
        let n = data.records.len();
        Ok(CompressedData {
            n,
            counts,
            outcome_sums,
            mean_outcome_sq: if n > 0 { sq / n as f64 } else { 0.0 },
        })
    }

    /// `n^{-1} Σ (Y_i − ⟨S,X_i⟩)²` from the per-index coefficients of S.
    fn loss(&self, coeffs: &[f64]) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for (j, &c) in coeffs.iter().enumerate() {
            acc += self.counts[j] * c * c - 2.0 * self.outcome_sums[j] * c;
        }
        self.mean_outcome_sq + acc / self.n as f64
    }

    /// Loss gradient `(2/n) Σ_j (c_j·count_j − Y-sum_j) E_j`.
    fn loss_gradient(&self, coeffs: &[f64], basis: &ObservableBasis) -> HermitianMatrix {
        let mut out = HermitianMatrix::zeros(basis.dim());
        if self.n == 0 {
            return out;
        }
        let w = 2.0 / self.n as f64;
        for j in 0..coeffs.len() {
            let g = w * (self.counts[j] * coeffs[j] - self.outcome_sums[j]);
            if g != 0.0 {
                out = &out + &basis.element(j).scale(g);
            }
        }
        out
    }
}

/// The penalized objective `n^{-1} Σ (Y_i − ⟨S,X_i⟩)² + ε·tr(S log S)`,
/// with `0·log 0 = 0` so any state is admissible. An empty dataset
/// contributes zero loss.
pub fn objective_value(
    data: &Dataset,
    basis: &ObservableBasis,
    s: &DensityMatrix,
    eps: f64,
) -> Result<f64> {
    if eps < 0.0 {
        return Err(Error::argument("eps must be nonnegative"));
    }
    let compressed = CompressedData::build(data, basis)?;
    let coeffs = basis.coefficients(s.matrix())?;
    Ok(compressed.loss(&coeffs) + eps * s.trace_s_log_s())
}

/// Analytic gradient of the penalized objective at a full-rank state:
/// `−(2/n) Σ (Y_i − ⟨S,X_i⟩) X_i + ε(log S + I)`.
pub fn objective_gradient(
    data: &Dataset,
    basis: &ObservableBasis,
    s: &DensityMatrix,
    eps: f64,
) -> Result<HermitianMatrix> {
    let compressed = CompressedData::build(data, basis)?;
    let coeffs = basis.coefficients(s.matrix())?;
    let mut grad = compressed.loss_gradient(&coeffs, basis);
    if eps > 0.0 {
        let log_s = s.matrix().apply_spectral_fn(crate::hermitian::SpectralFn::Log)?;
        grad = &grad + &(&log_s + &HermitianMatrix::identity(s.dim())).scale(eps);
    }
    Ok(grad)
}

fn initial_state(init: &Init, m: usize) -> DensityMatrix {
    match init {
        Init::MaximallyMixed => DensityMatrix::maximally_mixed(m),
        Init::Custom(s) => s.clone(),
    }
}

struct StepControl {
    eta: f64,
    beta: f64,
    c: f64,
    backtracking: bool,
}

impl StepControl {
    fn new(rule: StepRule) -> Self {
        match rule {
            StepRule::Fixed(eta) => StepControl {
                eta,
                beta: 0.5,
                c: 0.0,
                backtracking: false,
            },
            StepRule::Backtracking { beta, c } => StepControl {
                eta: 1.0,
                beta,
                c,
                backtracking: true,
            },
        }
    }
}

/// Shared solver loop. `step(s, grad, eta)` proposes the next iterate for a
/// given step size; `objective(s)` evaluates the target. Armijo
/// backtracking also retries on non-finite proposals, which covers overflow
/// in the mirror-descent exponential.
fn minimize(
    m: usize,
    cfg: &SolverConfig,
    objective: &dyn Fn(&DensityMatrix) -> Result<f64>,
    gradient: &dyn Fn(&DensityMatrix) -> Result<HermitianMatrix>,
    step: &dyn Fn(&DensityMatrix, &HermitianMatrix, f64) -> Result<DensityMatrix>,
) -> Result<FitReport> {
    let mut s = initial_state(&cfg.init, m);
    let mut f = objective(&s)?;
    let mut trace = vec![f];
    let mut ctrl = StepControl::new(cfg.step_rule);
    let mut converged = false;
    let mut iterations = 0;
    let mut flat_streak = 0usize;

    'outer: for _ in 0..cfg.max_iters {
        let grad = gradient(&s)?;
        let mut eta = ctrl.eta;
        let mut halvings = 0usize;
        let (next, f_next) = loop {
            let candidate = step(&s, &grad, eta)?;
            let f_cand = objective(&candidate)?;
            let descent = candidate.matrix() - s.matrix();
            let slope = grad.hs_inner(&descent)?;
            let ok = f_cand.is_finite()
                && (!ctrl.backtracking || f_cand <= f + ctrl.c * slope + 1e-15);
            if ok {
                break (candidate, f_cand);
            }
            eta *= ctrl.beta;
            halvings += 1;
            if halvings > 40 {
                // cannot make progress at any representable step
                break 'outer;
            }
        };
        iterations += 1;
        let moved = (next.matrix() - s.matrix()).frobenius_norm();
        let rel_decrease = (f - f_next).abs() / f.abs().max(1.0);
        s = next;
        f = f_next;
        trace.push(f);
        if ctrl.backtracking {
            // grow the trial step after clean accepts, shrink after fights
            ctrl.eta = if halvings == 0 {
                (eta * 2.0).min(1e6)
            } else {
                eta
            };
        }
        if moved / eta <= cfg.tol_gradient {
            converged = true;
            break;
        }
        if rel_decrease < cfg.tol_objective {
            flat_streak += 1;
            if flat_streak >= 5 {
                converged = true;
                break;
            }
        } else {
            flat_streak = 0;
        }
    }

    let min_eigenvalue = s.min_eigenvalue();
    Ok(FitReport {
        estimate: s,
        objective_trace: trace,
        iterations,
        converged,
        min_eigenvalue,
    })
}

/// Constrained least squares by projected gradient descent over the
/// spectahedron. An empty dataset returns the initial state untouched.
pub fn least_squares(
    data: &Dataset,
    basis: &ObservableBasis,
    cfg: &SolverConfig,
) -> Result<FitReport> {
    let m = basis.dim();
    if data.records.is_empty() {
        let s = initial_state(&cfg.init, m);
        let min_eigenvalue = s.min_eigenvalue();
        return Ok(FitReport {
            estimate: s,
            objective_trace: vec![0.0],
            iterations: 0,
            converged: true,
            min_eigenvalue,
        });
    }
    let compressed = CompressedData::build(data, basis)?;
    let objective = |s: &DensityMatrix| -> Result<f64> {
        Ok(compressed.loss(&basis.coefficients(s.matrix())?))
    };
    let gradient = |s: &DensityMatrix| -> Result<HermitianMatrix> {
        Ok(compressed.loss_gradient(&basis.coefficients(s.matrix())?, basis))
    };
    let step = |s: &DensityMatrix, grad: &HermitianMatrix, eta: f64| -> Result<DensityMatrix> {
        project_to_spectahedron(&(s.matrix() - &grad.scale(eta)))
    };
    minimize(m, cfg, &objective, &gradient, &step)
}

/// Modified least squares: closed form
/// `project_to_spectahedron((m²/n) Σ Y_i X_i)`.
pub fn modified_least_squares(data: &Dataset, basis: &ObservableBasis) -> Result<DensityMatrix> {
    if data.records.is_empty() {
        return Err(Error::argument(
            "modified least squares needs at least one record",
        ));
    }
    let m2 = basis.len() as f64;
    let a = weighted_basis_sum(data, basis, m2)?;
    project_to_spectahedron(&a)
}

/// Minimum eigenvalue floor for mirror-descent iterates; keeps the next
/// `log S` finite when the exponential underflows.
const MIRROR_EIGENVALUE_FLOOR: f64 = 1e-300;

/// Von Neumann entropy penalized least squares by entropy mirror descent.
/// Iterates stay strictly inside the spectahedron and so does the output;
/// the report records its smallest eigenvalue.
pub fn vn_penalized(
    data: &Dataset,
    basis: &ObservableBasis,
    eps: f64,
    cfg: &SolverConfig,
) -> Result<FitReport> {
    if eps <= 0.0 {
        return Err(Error::argument("eps must be positive; use least_squares for eps = 0"));
    }
    let m = basis.dim();
    let compressed = CompressedData::build(data, basis)?;
    let objective = |s: &DensityMatrix| -> Result<f64> {
        Ok(compressed.loss(&basis.coefficients(s.matrix())?) + eps * s.trace_s_log_s())
    };
    let gradient = |s: &DensityMatrix| -> Result<HermitianMatrix> {
        let loss_grad = compressed.loss_gradient(&basis.coefficients(s.matrix())?, basis);
        let eig = s.matrix().eigh()?;
        let log_s = eig.rebuild(|l| l.max(MIRROR_EIGENVALUE_FLOOR).ln());
        Ok(&loss_grad + &(&log_s + &HermitianMatrix::identity(m)).scale(eps))
    };
    let step = |s: &DensityMatrix, grad: &HermitianMatrix, eta: f64| -> Result<DensityMatrix> {
        let eig = s.matrix().eigh()?;
        let log_s = eig.rebuild(|l| l.max(MIRROR_EIGENVALUE_FLOOR).ln());
        let w = &log_s - &grad.scale(eta);
        let weig = w.eigh()?;
        let top = weig.eigenvalues[0];
        // shift by the top eigenvalue so the exponential cannot overflow
        let mut probs: Vec<f64> = weig
            .eigenvalues
            .iter()
            .map(|&l| (l - top).exp())
            .collect();
        let z: f64 = probs.iter().sum();
        for p in probs.iter_mut() {
            *p = (*p / z).max(MIRROR_EIGENVALUE_FLOOR);
        }
        let total: f64 = probs.iter().sum();
        for p in probs.iter_mut() {
            *p /= total;
        }
        let matrix = weig.rebuild_with_spectrum(&probs);
        Ok(DensityMatrix::from_spectrum_unchecked(matrix, probs))
    };
    minimize(m, cfg, &objective, &gradient, &step)
}

/// Theorem-prescribed regularization weight.
///
/// For the bounded-response models it evaluates
/// `(1/log(mn)) · [U√((t+log 2m)/(nm)) ∨ U²(t+log 2m)/n]`, and for Gaussian
/// noise the simplified choice `D₁σ/log(mn) · √((t+log 2m)/(nm))`; `t = 0`
/// recovers the fixed-confidence forms. `D₁` defaults to 1; the theory only
/// pins the shape, not the constant.
pub fn epsilon_choice(model: &NoiseModel, u: f64, m: usize, n: usize, t: f64) -> f64 {
    epsilon_choice_with(model, u, m, n, t, 1.0)
}

pub fn epsilon_choice_with(
    model: &NoiseModel,
    u: f64,
    m: usize,
    n: usize,
    t: f64,
    d1: f64,
) -> f64 {
    let mf = m as f64;
    let nf = n as f64;
    let log_mn = (mf * nf).ln();
    let log_2m = t + (2.0 * mf).ln();
    match model {
        NoiseModel::Gaussian { sigma } => {
            d1 * sigma / log_mn * (log_2m / (nf * mf)).sqrt()
        }
        NoiseModel::StandardQst { .. } | NoiseModel::BoundedBinary { .. } => {
            let a = u * (log_2m / (nf * mf)).sqrt();
            let b = u * u * log_2m / nf;
            a.max(b) / log_mn
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{fourier_coefficients, pauli_basis};
    use crate::sampler::{sample_dataset, DataRecord};
    use crate::state::haar_random_state;

    fn full_sweep_dataset(
        rho: &DensityMatrix,
        basis: &ObservableBasis,
    ) -> Dataset {
        let coeffs = fourier_coefficients(rho, basis).unwrap();
        Dataset {
            basis_label: basis.label().to_string(),
            m: basis.dim(),
            records: coeffs
                .iter()
                .enumerate()
                .map(|(j, &c)| DataRecord {
                    index: (j + 1) as u32,
                    outcome: c,
                })
                .collect(),
            model: NoiseModel::Gaussian { sigma: 0.0 },
            seed: 0,
        }
    }

    fn empty_dataset(basis: &ObservableBasis) -> Dataset {
        Dataset {
            basis_label: basis.label().to_string(),
            m: basis.dim(),
            records: vec![],
            model: NoiseModel::Gaussian { sigma: 0.0 },
            seed: 0,
        }
    }

    #[test]
    fn objective_entropy_of_maximally_mixed() {
        let basis = pauli_basis(2).unwrap();
        let data = empty_dataset(&basis);
        let s = DensityMatrix::maximally_mixed(4);
        let obj = objective_value(&data, &basis, &s, 1.0).unwrap();
        assert!((obj + 4.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn objective_zero_at_truth_on_noiseless_sweep() {
        let basis = pauli_basis(2).unwrap();
        let rho = haar_random_state(4, 2, 1).unwrap();
        let data = full_sweep_dataset(&rho, &basis);
        let obj = objective_value(&data, &basis, &rho, 0.0).unwrap();
        assert!(obj.abs() < 1e-15);
    }

    #[test]
    fn objective_redundant_path_oracle() {
        // recompute loss by looping records and entropy from eigenvalues
        let basis = pauli_basis(2).unwrap();
        let rho = haar_random_state(4, 4, 3).unwrap();
        let s = haar_random_state(4, 4, 4).unwrap();
        let data = sample_dataset(&rho, &basis, &NoiseModel::Gaussian { sigma: 0.2 }, 100, 5)
            .unwrap();
        let eps = 0.3;
        let got = objective_value(&data, &basis, &s, eps).unwrap();
        let mut loss = 0.0;
        for rec in &data.records {
            let c = basis
                .element((rec.index - 1) as usize)
                .hs_inner(s.matrix())
                .unwrap();
            loss += (rec.outcome - c) * (rec.outcome - c);
        }
        loss /= data.records.len() as f64;
        let entropy_term: f64 = s
            .eigenvalues()
            .iter()
            .filter(|&&l| l > 0.0)
            .map(|&l| l * l.ln())
            .sum();
        assert!((got - (loss + eps * entropy_term)).abs() < 1e-10);
    }

    #[test]
    fn least_squares_recovers_noiseless_sweep() {
        for b in [1usize, 2] {
            let basis = pauli_basis(b).unwrap();
            let m = basis.dim();
            let rho = haar_random_state(m, m / 2 + 1, 7).unwrap();
            let data = full_sweep_dataset(&rho, &basis);
            let report = least_squares(&data, &basis, &SolverConfig::default()).unwrap();
            let err = (report.estimate.matrix() - rho.matrix()).frobenius_norm();
            assert!(err <= 1e-6, "b={b}: error {err}");
        }
    }

    #[test]
    fn least_squares_empty_dataset_returns_init() {
        let basis = pauli_basis(1).unwrap();
        let data = empty_dataset(&basis);
        let report = least_squares(&data, &basis, &SolverConfig::default()).unwrap();
        assert_eq!(report.iterations, 0);
        assert_eq!(report.objective_trace, vec![0.0]);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!((report.estimate.matrix() - mixed.matrix()).frobenius_norm() < 1e-15);
    }

    #[test]
    fn objective_traces_non_increasing() {
        let basis = pauli_basis(2).unwrap();
        let rho = haar_random_state(4, 2, 11).unwrap();
        let data = sample_dataset(&rho, &basis, &NoiseModel::Gaussian { sigma: 0.1 }, 300, 13)
            .unwrap();
        let ls = least_squares(&data, &basis, &SolverConfig::default()).unwrap();
        for w in ls.objective_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        let vn = vn_penalized(&data, &basis, 1e-3, &SolverConfig::default()).unwrap();
        for w in vn.objective_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        assert!(vn.min_eigenvalue > 0.0);
    }

    #[test]
    fn least_squares_first_order_optimality() {
        let basis = pauli_basis(1).unwrap();
        let rho = haar_random_state(2, 2, 17).unwrap();
        let data = sample_dataset(&rho, &basis, &NoiseModel::Gaussian { sigma: 0.1 }, 200, 19)
            .unwrap();
        let report = least_squares(&data, &basis, &SolverConfig::default()).unwrap();
        assert!(report.converged);
        let grad = objective_gradient(&data, &basis, &report.estimate, 0.0).unwrap();
        for s in 0..20u64 {
            let dir = haar_random_state(2, 2, 100 + s).unwrap();
            let diff = dir.matrix() - report.estimate.matrix();
            assert!(grad.hs_inner(&diff).unwrap() >= -1e-6);
        }
    }

    #[test]
    fn modified_ls_examples() {
        let basis = pauli_basis(2).unwrap();
        let rho = haar_random_state(4, 2, 23).unwrap();
        // noiseless full sweep → exact recovery
        let data = full_sweep_dataset(&rho, &basis);
        let est = modified_least_squares(&data, &basis).unwrap();
        assert!((est.matrix() - rho.matrix()).frobenius_norm() < 1e-10);

        // all-zero outcomes → maximally mixed
        let zeros = Dataset {
            records: data
                .records
                .iter()
                .map(|r| DataRecord {
                    index: r.index,
                    outcome: 0.0,
                })
                .collect(),
            ..data.clone()
        };
        let est = modified_least_squares(&zeros, &basis).unwrap();
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!((est.matrix() - mixed.matrix()).frobenius_norm() < 1e-12);

        assert!(modified_least_squares(&empty_dataset(&basis), &basis).is_err());
    }

    #[test]
    fn ls_and_mls_agree_on_full_sweep() {
        let basis = pauli_basis(1).unwrap();
        let rho = haar_random_state(2, 2, 29).unwrap();
        let data = full_sweep_dataset(&rho, &basis);
        let ls = least_squares(&data, &basis, &SolverConfig::default()).unwrap();
        let mls = modified_least_squares(&data, &basis).unwrap();
        assert!((ls.estimate.matrix() - mls.matrix()).frobenius_norm() < 1e-6);
    }

    #[test]
    fn vn_no_data_maximizes_entropy() {
        let basis = pauli_basis(2).unwrap();
        let data = empty_dataset(&basis);
        let report = vn_penalized(&data, &basis, 0.7, &SolverConfig::default()).unwrap();
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!((report.estimate.matrix() - mixed.matrix()).frobenius_norm() < 1e-8);
        // also from a custom, non-uniform start
        let start = haar_random_state(4, 4, 31).unwrap();
        let cfg = SolverConfig {
            init: Init::Custom(start),
            ..SolverConfig::default()
        };
        let report = vn_penalized(&data, &basis, 0.7, &cfg).unwrap();
        assert!((report.estimate.matrix() - mixed.matrix()).frobenius_norm() < 1e-6);
    }

    #[test]
    fn vn_small_eps_tracks_least_squares() {
        let basis = pauli_basis(1).unwrap();
        let rho = haar_random_state(2, 2, 37).unwrap();
        let data = sample_dataset(&rho, &basis, &NoiseModel::Gaussian { sigma: 0.1 }, 200, 41)
            .unwrap();
        let ls = least_squares(&data, &basis, &SolverConfig::default()).unwrap();
        let vn = vn_penalized(&data, &basis, 1e-8, &SolverConfig::default()).unwrap();
        let gap = (ls.estimate.matrix() - vn.estimate.matrix()).frobenius_norm();
        assert!(gap < 1e-3, "gap {gap}");
        assert!(vn.min_eigenvalue > 0.0);
    }

    #[test]
    fn nuclear_penalty_shift_is_constant_on_states() {
        // On S_m, adding ε̂‖S‖₁ shifts every objective by exactly ε̂, so
        // objective differences (hence argmins) are unchanged.
        let basis = pauli_basis(2).unwrap();
        let rho = haar_random_state(4, 2, 43).unwrap();
        let data = sample_dataset(&rho, &basis, &NoiseModel::Gaussian { sigma: 0.1 }, 150, 47)
            .unwrap();
        let eps_hat = 0.37;
        let s1 = haar_random_state(4, 3, 49).unwrap();
        let s2 = haar_random_state(4, 1, 53).unwrap();
        let with_pen = |s: &DensityMatrix| -> f64 {
            objective_value(&data, &basis, s, 0.0).unwrap()
                + eps_hat * s.matrix().schatten_norm(1.0).unwrap()
        };
        let without = |s: &DensityMatrix| -> f64 { objective_value(&data, &basis, s, 0.0).unwrap() };
        assert!(((with_pen(&s1) - with_pen(&s2)) - (without(&s1) - without(&s2))).abs() < 1e-10);
        assert!((with_pen(&s1) - without(&s1) - eps_hat).abs() < 1e-10);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let basis = pauli_basis(1).unwrap();
        let rho = haar_random_state(2, 2, 59).unwrap();
        let data = sample_dataset(&rho, &basis, &NoiseModel::Gaussian { sigma: 0.1 }, 100, 61)
            .unwrap();
        let eps = 0.05;
        let s = crate::state::smooth_state(&haar_random_state(2, 2, 67).unwrap(), 0.3).unwrap();
        let grad = objective_gradient(&data, &basis, &s, eps).unwrap();
        let h = 1e-5;
        for k in 0..10u64 {
            // random traceless Hermitian direction
            let g = crate::hermitian::random_hermitian(
                2,
                &mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(70 + k),
            );
            let dir = &g - &HermitianMatrix::identity(2).scale(g.trace() / 2.0);
            let dir = dir.scale(1.0 / dir.frobenius_norm());
            let plus = DensityMatrix::new(s.matrix() + &dir.scale(h)).unwrap();
            let minus = DensityMatrix::new(s.matrix() - &dir.scale(h)).unwrap();
            let fd = (objective_value(&data, &basis, &plus, eps).unwrap()
                - objective_value(&data, &basis, &minus, eps).unwrap())
                / (2.0 * h);
            let an = grad.hs_inner(&dir).unwrap();
            assert!(
                (fd - an).abs() <= 1e-5 * an.abs().max(1.0),
                "direction {k}: fd {fd} vs analytic {an}"
            );
        }
    }

    #[test]
    fn fixed_step_rule_still_converges() {
        let basis = pauli_basis(1).unwrap();
        let rho = haar_random_state(2, 2, 79).unwrap();
        let data = full_sweep_dataset(&rho, &basis);
        let cfg = SolverConfig {
            step_rule: StepRule::Fixed(1.0),
            max_iters: 2000,
            ..SolverConfig::default()
        };
        let report = least_squares(&data, &basis, &cfg).unwrap();
        assert!(report.converged);
        assert!((report.estimate.matrix() - rho.matrix()).frobenius_norm() < 1e-6);
    }

    #[test]
    fn outputs_are_valid_density_matrices() {
        let basis = pauli_basis(2).unwrap();
        let rho = haar_random_state(4, 3, 71).unwrap();
        let data = sample_dataset(&rho, &basis, &NoiseModel::Gaussian { sigma: 0.2 }, 400, 73)
            .unwrap();
        let ls = least_squares(&data, &basis, &SolverConfig::default()).unwrap();
        let mls = modified_least_squares(&data, &basis).unwrap();
        let vn = vn_penalized(&data, &basis, 1e-3, &SolverConfig::default()).unwrap();
        for est in [&ls.estimate, &mls, &vn.estimate] {
            assert!((est.matrix().trace() - 1.0).abs() <= 1e-10);
            assert!(est.min_eigenvalue() >= -1e-10);
        }
    }

    #[test]
    fn epsilon_choice_values() {
        // bounded model at U = 1/2 (two qubits), m = 4, n = 1024, t = 0:
        // (1/log 4096)·max(½√(log8/4096), log8/4096) = √(log 8)/128/log(4096)
        let eps = epsilon_choice(&NoiseModel::StandardQst { k: 1 }, 0.5, 4, 1024, 0.0);
        let expect = (8.0f64.ln()).sqrt() / 128.0 / 4096.0f64.ln();
        assert!((eps - expect).abs() < 1e-15);

        let zero = epsilon_choice(&NoiseModel::Gaussian { sigma: 0.0 }, 0.5, 4, 1024, 0.0);
        assert_eq!(zero, 0.0);

        // monotone decreasing in n
        let mut prev = f64::INFINITY;
        for n in [256usize, 1024, 4096, 16384] {
            let e = epsilon_choice(&NoiseModel::Gaussian { sigma: 0.1 }, 0.5, 4, n, 0.0);
            assert!(e < prev);
            prev = e;
        }
    }
}
