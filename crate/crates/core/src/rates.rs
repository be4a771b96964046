//! Closed-form rate expressions and lower-bound construction helpers.
//!
//! The estimation-error theory for rank-r states measured against an
//! orthonormal basis revolves around the scale `τ = s·m^{3/2}/√n`, where `s`
//! is the noise scale (Gaussian σ, outcome bound Ū, or basis bound U; for
//! the Pauli basis `U = m^{-1/2}` absorbs into `τ = m/√n`). Lower rates are
//! `τ·r^{1/q} ∧ τ^{1-1/q} ∧ 1` for Schatten-q error and `τ·r ∧ 1` for
//! squared Hellinger and relative entropy; the matching upper rates carry
//! explicit logarithmic factors. Absolute constants are not identifiable,
//! so every formula here is evaluated with constants set to 1 (exposed when
//! configurable) — only scalings are meant to be compared.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::basis::ObservableBasis;
use crate::error::{Error, Result};
use crate::metrics::KlDivergence;
use crate::sampler::{outcome_distribution, NoiseModel};
use crate::state::DensityMatrix;

/// Which distance a rate formula refers to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistanceKind {
    Schatten(f64),
    Hellinger,
    Kl,
}

/// Noise scale entering `τ = scale·m^{3/2}/√n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseScale {
    /// Gaussian noise standard deviation σ.
    Sigma(f64),
    /// Outcome bound Ū of the bounded-response model.
    UBar(f64),
    /// Basis operator-norm bound U.
    U(f64),
    /// Pauli measurements: U = m^{-1/2} absorbed into the scale.
    Pauli,
}

impl NoiseScale {
    pub fn value(&self, m: usize) -> f64 {
        match self {
            NoiseScale::Sigma(s) | NoiseScale::UBar(s) | NoiseScale::U(s) => *s,
            NoiseScale::Pauli => 1.0 / (m as f64).sqrt(),
        }
    }
}

/// Parameters shared by the rate formulas.
#[derive(Debug, Clone, Copy)]
pub struct RateParams {
    pub m: usize,
    pub r: usize,
    pub n: usize,
    pub scale: NoiseScale,
}

impl RateParams {
    /// `τ = scale·m^{3/2}/√n`.
    pub fn tau(&self) -> f64 {
        self.scale.value(self.m) * (self.m as f64).powf(1.5) / (self.n as f64).sqrt()
    }

    fn validate(&self) -> Result<()> {
        if self.m < 2 || self.n < 1 {
            return Err(Error::argument("need m >= 2 and n >= 1"));
        }
        if self.r < 1 || self.r > self.m {
            return Err(Error::argument(format!(
                "rank must be in [1, m], got {} with m = {}",
                self.r, self.m
            )));
        }
        Ok(())
    }
}

/// Minimax lower rate (constants set to 1):
/// Schatten-q `τ·r^{1/q} ∧ τ^{1−1/q} ∧ 1`; Hellinger/KL `τ·r ∧ 1`.
pub fn minimax_lower_rate(kind: DistanceKind, params: &RateParams) -> Result<f64> {
    params.validate()?;
    let tau = params.tau();
    let r = params.r as f64;
    match kind {
        DistanceKind::Schatten(q) => {
            if !(q >= 1.0) {
                return Err(Error::argument(format!("q must be >= 1, got {q}")));
            }
            let inv_q = if q.is_infinite() { 0.0 } else { 1.0 / q };
            let first = tau * r.powf(inv_q);
            let second = tau.powf(1.0 - inv_q);
            Ok(first.min(second).min(1.0))
        }
        DistanceKind::Hellinger | DistanceKind::Kl => Ok((tau * r).min(1.0)),
    }
}

/// Theorem family for the upper rates; the formulas share one shape, with
/// the noise scale read from `params.scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpperTheorem {
    /// Gaussian-noise model (scale = σ).
    Gauss,
    /// Bounded-response model (scale = U).
    Bounded,
}

/// Upper rate attained by the entropy-penalized estimator, up to constants:
/// Schatten-q (q ∈ [1,2])
/// `τ·r^{1/q}·√(log m)·log^{(2−q)/q}(mn) ∧ τ^{1−1/q}·(log m)^{½−1/(2q)} ∧ 2`;
/// Hellinger `τ·r·√(log m)·log(mn) ∧ 2`; KL the same without the cap.
pub fn upper_rate(theorem: UpperTheorem, kind: DistanceKind, params: &RateParams) -> Result<f64> {
    params.validate()?;
    match (theorem, params.scale) {
        (UpperTheorem::Gauss, NoiseScale::Sigma(_)) => {}
        (UpperTheorem::Bounded, NoiseScale::Sigma(_)) => {
            return Err(Error::argument(
                "bounded-response rates take a U/Ū/Pauli scale, not sigma",
            ))
        }
        (UpperTheorem::Gauss, _) => {
            return Err(Error::argument("Gaussian rates take a sigma scale"))
        }
        (UpperTheorem::Bounded, _) => {}
    }
    let tau = params.tau();
    let r = params.r as f64;
    let m = params.m as f64;
    let mn = m * params.n as f64;
    let log_m = m.ln();
    let log_mn = mn.ln();
    match kind {
        DistanceKind::Schatten(q) => {
            if !(1.0..=2.0).contains(&q) {
                return Err(Error::argument(format!(
                    "upper rates cover q in [1, 2], got {q}"
                )));
            }
            let first = tau * r.powf(1.0 / q) * log_m.sqrt() * log_mn.powf((2.0 - q) / q);
            let second = tau.powf(1.0 - 1.0 / q) * log_m.powf(0.5 - 0.5 / q);
            Ok(first.min(second).min(2.0))
        }
        DistanceKind::Hellinger => Ok((tau * r * log_m.sqrt() * log_mn).min(2.0)),
        DistanceKind::Kl => Ok(tau * r * log_m.sqrt() * log_mn),
    }
}

/// Effective rank `r̄ = d·τ^{−p} ∧ m` of the nearly-low-rank class with
/// power decay exponent p and radius d, at noise resolution τ.
pub fn effective_rank(p: f64, d: f64, tau: f64, m: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::argument(format!("p must be in [0, 1], got {p}")));
    }
    if tau <= 0.0 {
        return Err(Error::argument("tau must be positive"));
    }
    Ok((d * tau.powf(-p)).min(m as f64))
}

/// Matrix Bernstein tail bound for `‖n^{-1}ΣX_j‖_∞` at confidence `e^{-t}`:
/// `2[σ_X√((t+log 2m)/n) ∨ U_X(t+log 2m)/n]`.
pub fn bernstein_bound(sigma_x: f64, u_x: f64, n: usize, t: f64, m: usize) -> f64 {
    let w = (t + (2.0 * m as f64).ln()) / n as f64;
    2.0 * (sigma_x * w.sqrt()).max(u_x * w)
}

/// Expectation version, from integrating the exponential tails:
/// `4[σ_X√(log(2m)/n) ∨ U_X·log(2m)/n]`.
pub fn bernstein_expectation_bound(sigma_x: f64, u_x: f64, n: usize, m: usize) -> f64 {
    let w = (2.0 * m as f64).ln() / n as f64;
    4.0 * (sigma_x * w.sqrt()).max(u_x * w)
}

/// Separation weight for the packed states:
/// `κ = c₁·σ·m^{3/2}(r−1)/√n`. The caller must check κ < 1 before building
/// states from it.
pub fn kappa_choice(sigma: f64, m: usize, r: usize, n: usize, c1: f64) -> Result<f64> {
    if r < 2 {
        return Err(Error::argument("kappa needs r >= 2"));
    }
    Ok(c1 * sigma * (m as f64).powf(1.5) * (r - 1) as f64 / (n as f64).sqrt())
}

fn bernoulli_kl_term(a: f64, b: f64) -> KlDivergence {
    if a <= 0.0 {
        return KlDivergence::Finite(0.0);
    }
    if b <= 0.0 {
        return KlDivergence::Infinite;
    }
    KlDivergence::Finite(a * (a / b).ln())
}

fn add_kl(acc: KlDivergence, term: KlDivergence) -> KlDivergence {
    match (acc, term) {
        (KlDivergence::Finite(x), KlDivergence::Finite(y)) => KlDivergence::Finite(x + y),
        _ => KlDivergence::Infinite,
    }
}

/// Relative entropy between the full data distributions of `n` records
/// drawn under two states (the information-theoretic ingredient of the
/// lower-bound argument).
///
/// - Gaussian: exactly `(n/2σ²)·‖ρ₁−ρ₂‖²_{L₂(Π)}`; infinite when σ = 0 and
///   the states differ.
/// - BoundedBinary: the exact sum
///   `n·E_X[p₁log(p₁/p₂) + q₁log(q₁/q₂)]` over the uniform design.
/// - StandardQst{k}: `n·k·E_X KL(single-outcome laws)` — valid because the
///   k-average is a sufficient statistic for two-point outcome spectra;
///   multi-valued spectra are refused rather than approximated.
pub fn fano_kl_between_data_laws(
    model: &NoiseModel,
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    basis: &ObservableBasis,
    n: usize,
) -> Result<KlDivergence> {
    if rho1.dim() != rho2.dim() || rho1.dim() != basis.dim() {
        return Err(Error::DimensionMismatch(rho1.dim(), basis.dim()));
    }
    let m2 = basis.len();
    let nf = n as f64;
    match model {
        NoiseModel::Gaussian { sigma } => {
            let l2 = crate::metrics::l2_pi_distance(rho1.matrix(), rho2.matrix(), basis.dim())?;
            if *sigma == 0.0 {
                return Ok(if l2 <= 1e-12 {
                    KlDivergence::Finite(0.0)
                } else {
                    KlDivergence::Infinite
                });
            }
            Ok(KlDivergence::Finite(nf / (2.0 * sigma * sigma) * l2 * l2))
        }
        NoiseModel::BoundedBinary { u_bar } => {
            let mut acc = KlDivergence::Finite(0.0);
            for j in 0..m2 {
                let e = basis.element(j);
                let c1 = e.hs_inner(rho1.matrix())?;
                let c2 = e.hs_inner(rho2.matrix())?;
                for c in [c1, c2] {
                    if c.abs() > *u_bar + 1e-12 {
                        return Err(Error::Model(format!(
                            "u_bar = {u_bar} is below |<rho, E_{}>| = {}",
                            j + 1,
                            c.abs()
                        )));
                    }
                }
                let (p1, p2) = (0.5 + c1 / (2.0 * u_bar), 0.5 + c2 / (2.0 * u_bar));
                let term = add_kl(
                    bernoulli_kl_term(p1, p2),
                    bernoulli_kl_term(1.0 - p1, 1.0 - p2),
                );
                acc = add_kl(acc, term);
            }
            Ok(match acc {
                KlDivergence::Finite(x) => KlDivergence::Finite(nf / m2 as f64 * x),
                KlDivergence::Infinite => KlDivergence::Infinite,
            })
        }
        NoiseModel::StandardQst { k } => {
            let mut acc = KlDivergence::Finite(0.0);
            for j in 0..m2 {
                let e = basis.element(j);
                let d1 = outcome_distribution(rho1, &e)?;
                let d2 = outcome_distribution(rho2, &e)?;
                if d1.len() > 2 || d2.len() > 2 {
                    return Err(Error::argument(
                        "exact data-law divergence for averaged outcomes needs two-point spectra",
                    ));
                }
                // align by outcome value (spectra of the same observable)
                for (v1, p1) in &d1 {
                    let p2 = d2
                        .iter()
                        .find(|(v2, _)| (v1 - v2).abs() <= 1e-9)
                        .map(|&(_, p)| p)
                        .unwrap_or(0.0);
                    acc = add_kl(acc, bernoulli_kl_term(*p1, p2));
                }
            }
            Ok(match acc {
                KlDivergence::Finite(x) => {
                    KlDivergence::Finite(nf * *k as f64 / m2 as f64 * x)
                }
                KlDivergence::Infinite => KlDivergence::Infinite,
            })
        }
    }
}

/// Result of the randomized search for a sign vector with uniformly small
/// quadratic forms against a basis.
#[derive(Debug, Clone, Serialize)]
pub struct FlatVectorSearch {
    /// `m^{-1/2}(ε₁,…,ε_m)` when found.
    pub vector: Option<Vec<f64>>,
    /// 1-based indices exempt from the check because their trace violates
    /// `|tr(E_k)| ≤ (1−γ)Um` (for the Pauli basis: exactly the identity).
    pub exempt: Vec<usize>,
    pub tries_used: usize,
    /// Smallest max |⟨E_k v, v⟩| over non-exempt elements seen so far.
    pub best_max: f64,
    /// The acceptance threshold `(1−γ/2)U`.
    pub threshold: f64,
}

/// Search for a flat unit vector `v = m^{-1/2}(±1,…,±1)` with
/// `|⟨E_k v, v⟩| ≤ (1−γ/2)U` for every basis element satisfying the trace
/// condition `|tr(E_k)| ≤ (1−γ)Um`. Elements violating the trace condition
/// are exempt and reported. Random sign choices, deterministic per seed.
pub fn find_flat_vector(
    basis: &ObservableBasis,
    gamma: f64,
    max_tries: usize,
    seed: u64,
) -> Result<FlatVectorSearch> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::argument(format!(
            "gamma must be in (0, 1), got {gamma}"
        )));
    }
    let m = basis.dim();
    let u = basis.u_bound();
    let trace_threshold = (1.0 - gamma) * u * m as f64;
    let exempt: Vec<usize> = (0..basis.len())
        .filter(|&j| basis.element(j).trace().abs() > trace_threshold)
        .map(|j| j + 1)
        .collect();
    let active: Vec<usize> = (0..basis.len())
        .filter(|j| !exempt.contains(&(j + 1)))
        .collect();
    let threshold = (1.0 - gamma / 2.0) * u;
    let scale = 1.0 / (m as f64).sqrt();

    let mut best_max = f64::INFINITY;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for tries in 1..=max_tries {
        let signs: Vec<f64> = (0..m)
            .map(|_| if rng.gen::<bool>() { scale } else { -scale })
            .collect();
        let v: Vec<Complex64> = signs.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        let mut max_form: f64 = 0.0;
        for &j in &active {
            let q = basis.element(j).quadratic_form(&v).abs();
            max_form = max_form.max(q);
            if max_form > threshold {
                break;
            }
        }
        best_max = best_max.min(max_form);
        if max_form <= threshold {
            return Ok(FlatVectorSearch {
                vector: Some(signs),
                exempt,
                tries_used: tries,
                best_max,
                threshold,
            });
        }
    }
    Ok(FlatVectorSearch {
        vector: None,
        exempt,
        tries_used: max_tries,
        best_max,
        threshold,
    })
}
