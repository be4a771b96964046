//! Distances between density matrices.
//!
//! Besides Schatten norm distances this covers the two genuinely quantum
//! functionals (see Nielsen & Chuang for background):
//!
//! - squared Bures/Hellinger distance
//!   `H²(S₁,S₂) = 2 − 2·tr√(S₁^{1/2} S₂ S₁^{1/2})`, always in `[0, 2]`;
//! - quantum relative entropy `K(S₁‖S₂) = ⟨S₁, log S₁ − log S₂⟩`, which is
//!   `+∞` as soon as S₂ has no support where S₁ does.
//!
//! They are tied together by the chain
//! `¼‖S₁−S₂‖₁² ≤ H²(S₁,S₂) ≤ K(S₁‖S₂) ∧ ‖S₁−S₂‖₁`, and
//! [`check_distance_inequalities`] evaluates every link with its slack.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, SpectralFn};
use crate::state::DensityMatrix;

/// Eigenvalues of the second argument below this count as zero support.
const KL_SUPPORT_EIGENVALUE_TOL: f64 = 1e-14;
/// First-argument mass on the kernel above this certifies an infinite
/// divergence.
const KL_KERNEL_MASS_TOL: f64 = 1e-12;

/// A relative entropy value: finite or certified infinite. A tagged value,
/// not a floating-point sentinel; `as_f64` collapses it when a column of
/// numbers is needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KlDivergence {
    Finite(f64),
    Infinite,
}

impl KlDivergence {
    pub fn is_finite(&self) -> bool {
        matches!(self, KlDivergence::Finite(_))
    }

    pub fn finite_value(&self) -> Option<f64> {
        match self {
            KlDivergence::Finite(x) => Some(*x),
            KlDivergence::Infinite => None,
        }
    }

    /// Collapse to an f64, mapping the infinite case to `f64::INFINITY`.
    pub fn as_f64(&self) -> f64 {
        match self {
            KlDivergence::Finite(x) => *x,
            KlDivergence::Infinite => f64::INFINITY,
        }
    }
}

impl Serialize for KlDivergence {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            KlDivergence::Finite(x) => serializer.serialize_f64(*x),
            KlDivergence::Infinite => serializer.serialize_str("inf"),
        }
    }
}

fn check_dims(s1: &DensityMatrix, s2: &DensityMatrix) -> Result<()> {
    if s1.dim() != s2.dim() {
        return Err(Error::DimensionMismatch(s1.dim(), s2.dim()));
    }
    Ok(())
}

/// Schatten-q norm of the difference, `‖S₁ − S₂‖_q`.
pub fn schatten_distance(s1: &DensityMatrix, s2: &DensityMatrix, q: f64) -> Result<f64> {
    check_dims(s1, s2)?;
    (s1.matrix() - s2.matrix()).schatten_norm(q)
}

/// Squared Bures/Hellinger distance `2 − 2·tr√(S₁^{1/2} S₂ S₁^{1/2})`,
/// clamped to `[0, 2]`. Computed as `2 − 2Σ√μ_j` over the eigenvalues of
/// the sandwiched product, which saves one spectral square root.
pub fn bures_hellinger_sq(s1: &DensityMatrix, s2: &DensityMatrix) -> Result<f64> {
    check_dims(s1, s2)?;
    let root1 = s1.matrix().apply_spectral_fn(SpectralFn::Sqrt)?;
    let inner = root1.sandwich(s2.matrix())?;
    let eig = inner.eigh()?;
    let affinity: f64 = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok((2.0 - 2.0 * affinity).clamp(0.0, 2.0))
}

fn kl_directed(s1: &DensityMatrix, s2: &DensityMatrix) -> Result<KlDivergence> {
    let eig2 = s2.matrix().eigh()?;
    let m = s2.dim();
    let mut kernel_mass = 0.0;
    let mut cross = 0.0;
    for k in 0..m {
        let lam = eig2.eigenvalues[k];
        let v = eig2.eigenvectors.column(k);
        let mass = s1.matrix().quadratic_form(&v);
        if lam < KL_SUPPORT_EIGENVALUE_TOL {
            kernel_mass += mass.max(0.0);
        } else {
            cross += lam.ln() * mass;
        }
    }
    if kernel_mass > KL_KERNEL_MASS_TOL {
        return Ok(KlDivergence::Infinite);
    }
    Ok(KlDivergence::Finite(s1.trace_s_log_s() - cross))
}

/// Quantum Kullback–Leibler divergence. With `symmetrized` set this is
/// `K(S₁‖S₂) + K(S₂‖S₁) = ⟨S₁−S₂, log S₁ − log S₂⟩`; infinite if either
/// direction is.
pub fn quantum_kl(s1: &DensityMatrix, s2: &DensityMatrix, symmetrized: bool) -> Result<KlDivergence> {
    check_dims(s1, s2)?;
    let forward = kl_directed(s1, s2)?;
    if !symmetrized {
        return Ok(forward);
    }
    let backward = kl_directed(s2, s1)?;
    Ok(match (forward, backward) {
        (KlDivergence::Finite(a), KlDivergence::Finite(b)) => KlDivergence::Finite(a + b),
        _ => KlDivergence::Infinite,
    })
}

/// Design-averaged L₂ distance for uniform sampling from an orthonormal
/// basis: `‖A − B‖_{L₂(Π)} = ‖A − B‖₂ / m`.
pub fn l2_pi_distance(a: &HermitianMatrix, b: &HermitianMatrix, m: usize) -> Result<f64> {
    if a.dim() != m || b.dim() != m {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok((a - b).frobenius_norm() / m as f64)
}

/// Slack report for the distance inequality chain
/// `¼‖S₁−S₂‖₁² ≤ H² ≤ K(S₁‖S₂) ∧ ‖S₁−S₂‖₁`.
#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub trace_distance: f64,
    pub hellinger_sq: f64,
    pub kl: KlDivergence,
    /// `H² − ¼‖S₁−S₂‖₁²` (must be ≥ −tol)
    pub lower_slack: f64,
    /// `‖S₁−S₂‖₁ − H²` (must be ≥ −tol)
    pub trace_slack: f64,
    /// `K − H²` when K is finite (must be ≥ −tol); skipped when infinite
    pub kl_slack: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

/// Evaluate every inequality in the chain with slack `1e-8`; the KL link is
/// skipped exactly when the divergence is certified infinite.
pub fn check_distance_inequalities(s1: &DensityMatrix, s2: &DensityMatrix) -> Result<InequalityReport> {
    let tol = 1e-8;
    let t1 = schatten_distance(s1, s2, 1.0)?;
    let h2 = bures_hellinger_sq(s1, s2)?;
    let kl = quantum_kl(s1, s2, false)?;
    let lower_slack = h2 - 0.25 * t1 * t1;
    let trace_slack = t1 - h2;
    let kl_slack = kl.finite_value().map(|k| k - h2);
    let passed = lower_slack >= -tol
        && trace_slack >= -tol
        && kl_slack.map_or(true, |s| s >= -tol);
    Ok(InequalityReport {
        trace_distance: t1,
        hellinger_sq: h2,
        kl,
        lower_slack,
        trace_slack,
        kl_slack,
        tolerance: tol,
        passed,
    })
}

/// Binary entropy `h(δ) = δ·log(1/δ) + (1−δ)·log(1/(1−δ))` (natural log).
pub fn binary_entropy(delta: f64) -> f64 {
    let mut h = 0.0;
    if delta > 0.0 {
        h += delta * (1.0 / delta).ln();
    }
    if delta < 1.0 {
        h += (1.0 - delta) * (1.0 / (1.0 - delta)).ln();
    }
    h
}

/// Undo smoothing in a relative entropy bound: if `S = (1−δ)S' + δ·I/m`,
/// then `K(S'‖U) ≤ (K(S‖U) + h(δ)) / (1−δ)` for any state `U`.
pub fn kl_bound_after_smoothing(k_smoothed: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::argument(format!(
            "delta must be in (0, 1), got {delta}"
        )));
    }
    if k_smoothed < 0.0 {
        return Err(Error::argument("divergence bound must be nonnegative"));
    }
    Ok((k_smoothed + binary_entropy(delta)) / (1.0 - delta))
}
