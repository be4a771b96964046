//! Orthonormal observable bases, chiefly the Pauli tensor basis.
//!
//! An observable basis is an ordered orthonormal family `{E_1, …, E_{m²}}`
//! of Hermitian matrices under the Hilbert–Schmidt inner product, together
//! with the operator-norm bound `U = max_j ‖E_j‖_∞`. Uniform sampling from
//! such a basis is the measurement design of the whole crate; the Pauli
//! basis is the canonical choice because its `U = m^{-1/2}` is as small as
//! an orthonormal basis allows.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::state::DensityMatrix;

/// Orthonormality tolerance enforced on validated bases.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;
/// Pauli elements are cached densely up to this qubit count; above it they
/// are generated on demand from the index tuple (a dense cache for b = 8
/// would need 4^8 matrices of 256² complex entries).
const PAULI_CACHE_MAX_QUBITS: usize = 5;

#[derive(Debug, Clone)]
enum BasisKind {
    Pauli {
        qubits: usize,
        cache: Option<Arc<Vec<HermitianMatrix>>>,
    },
    Custom {
        elements: Arc<Vec<HermitianMatrix>>,
    },
}

/// Ordered orthonormal observable basis with its operator-norm bound.
#[derive(Debug, Clone)]
pub struct ObservableBasis {
    label: String,
    m: usize,
    u_bound: f64,
    kind: BasisKind,
}

/// The four 2×2 generators `W_i = σ_i/√2`, in the fixed order: scaled
/// identity first, then the antisymmetric, symmetric and diagonal ones.
fn pauli_w(i: usize) -> [[Complex64; 2]; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    match i {
        0 => [[Complex64::new(s, 0.0), z], [z, Complex64::new(s, 0.0)]],
        1 => [
            [z, Complex64::new(0.0, -s)],
            [Complex64::new(0.0, s), z],
        ],
        2 => [[z, Complex64::new(s, 0.0)], [Complex64::new(s, 0.0), z]],
        3 => [
            [Complex64::new(s, 0.0), z],
            [z, Complex64::new(-s, 0.0)],
        ],
        _ => unreachable!(),
    }
}

/// Generate the Pauli tensor element with 0-based index `j` for `b` qubits.
/// The index is read as base-4 digits `(i_1, …, i_b)`, most significant
/// first, and the element is `W_{i_1} ⊗ … ⊗ W_{i_b}`. Each row has exactly
/// one nonzero entry, so generation is O(m·b).
fn pauli_element(qubits: usize, j: usize) -> HermitianMatrix {
    let m = 1usize << qubits;
    let mut digits = vec![0usize; qubits];
    let mut rest = j;
    for k in (0..qubits).rev() {
        digits[k] = rest % 4;
        rest /= 4;
    }
    let tables: Vec<[[Complex64; 2]; 2]> = digits.iter().map(|&d| pauli_w(d)).collect();
    let mut data = vec![Complex64::new(0.0, 0.0); m * m];
    for row in 0..m {
        let mut col = 0usize;
        let mut val = Complex64::new(1.0, 0.0);
        for (k, table) in tables.iter().enumerate() {
            let rb = (row >> (qubits - 1 - k)) & 1;
            // each W is either diagonal or antidiagonal
            let cb = if table[rb][rb] != Complex64::new(0.0, 0.0) {
                rb
            } else {
                1 - rb
            };
            val *= table[rb][cb];
            col = (col << 1) | cb;
        }
        data[row * m + col] = val;
    }
    HermitianMatrix::from_raw_symmetrize(m, data)
}

/// Pauli tensor basis on `b` qubits (`m = 2^b`): `4^b` elements ordered
/// lexicographically in the index tuple, first element the scaled identity.
/// Every element has eigenvalues `±m^{-1/2}` and the bound is `U = m^{-1/2}`.
pub fn pauli_basis(qubits: usize) -> Result<ObservableBasis> {
    if qubits < 1 || qubits > 8 {
        return Err(Error::argument(format!(
            "qubit count must be in [1, 8], got {qubits}"
        )));
    }
    let m = 1usize << qubits;
    let cache = if qubits <= PAULI_CACHE_MAX_QUBITS {
        let elems: Vec<HermitianMatrix> =
            (0..m * m).map(|j| pauli_element(qubits, j)).collect();
        Some(Arc::new(elems))
    } else {
        None
    };
    Ok(ObservableBasis {
        label: format!("pauli:{qubits}"),
        m,
        u_bound: 1.0 / (m as f64).sqrt(),
        kind: BasisKind::Pauli { qubits, cache },
    })
}

impl ObservableBasis {
    /// Build a custom basis from explicit elements, enforcing orthonormality
    /// within `1e-10` and measuring `U`.
    pub fn from_elements(label: impl Into<String>, elements: Vec<HermitianMatrix>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::argument("basis needs at least one element"));
        }
        let m = elements[0].dim();
        if elements.len() != m * m {
            return Err(Error::argument(format!(
                "a basis of H_{m} needs {} elements, got {}",
                m * m,
                elements.len()
            )));
        }
        for e in &elements {
            if e.dim() != m {
                return Err(Error::DimensionMismatch(m, e.dim()));
            }
        }
        let mut u_bound: f64 = 0.0;
        for e in &elements {
            u_bound = u_bound.max(e.operator_norm()?);
        }
        let basis = ObservableBasis {
            label: label.into(),
            m,
            u_bound,
            kind: BasisKind::Custom {
                elements: Arc::new(elements),
            },
        };
        let report = validate_basis(&basis, 0.5)?;
        if report.max_orthonormality_deviation > ORTHONORMALITY_TOL {
            return Err(Error::argument(format!(
                "elements are not orthonormal (max deviation {:e})",
                report.max_orthonormality_deviation
            )));
        }
        Ok(basis)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Matrix dimension m.
    pub fn dim(&self) -> usize {
        self.m
    }

    /// Number of elements, m².
    pub fn len(&self) -> usize {
        self.m * self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Operator-norm bound `U`.
    pub fn u_bound(&self) -> f64 {
        self.u_bound
    }

    /// The j-th element (0-based).
    pub fn element(&self, j: usize) -> HermitianMatrix {
        assert!(j < self.len(), "basis index {j} out of range");
        match &self.kind {
            BasisKind::Pauli { qubits, cache } => match cache {
                Some(c) => c[j].clone(),
                None => pauli_element(*qubits, j),
            },
            BasisKind::Custom { elements } => elements[j].clone(),
        }
    }

    /// Hilbert–Schmidt coefficients `⟨A, E_j⟩` of an arbitrary Hermitian
    /// matrix in this basis.
    pub fn coefficients(&self, a: &HermitianMatrix) -> Result<Vec<f64>> {
        if a.dim() != self.m {
            return Err(Error::DimensionMismatch(self.m, a.dim()));
        }
        (0..self.len()).map(|j| self.element(j).hs_inner(a)).collect()
    }

    /// Reconstruct `Σ_j c_j E_j`.
    pub fn expand(&self, coeffs: &[f64]) -> Result<HermitianMatrix> {
        if coeffs.len() != self.len() {
            return Err(Error::argument(format!(
                "expected {} coefficients, got {}",
                self.len(),
                coeffs.len()
            )));
        }
        let mut out = HermitianMatrix::zeros(self.m);
        for (j, &c) in coeffs.iter().enumerate() {
            if c != 0.0 {
                out = &out + &self.element(j).scale(c);
            }
        }
        Ok(out)
    }
}

/// Fourier coefficients `⟨ρ, E_j⟩` of a density matrix. On the Pauli basis
/// the first coefficient is always `m^{-1/2}`.
pub fn fourier_coefficients(rho: &DensityMatrix, basis: &ObservableBasis) -> Result<Vec<f64>> {
    basis.coefficients(rho.matrix())
}

/// Validation report for an observable basis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub label: String,
    pub dim: usize,
    pub element_count: usize,
    /// `max_{j,k} |⟨E_j,E_k⟩ − δ_{jk}|`
    pub max_orthonormality_deviation: f64,
    /// Measured `max_j ‖E_j‖_∞`.
    pub measured_u: f64,
    pub declared_u: f64,
    /// Gamma used for the trace condition `|tr(E_k)| ≤ (1−γ)Um`.
    pub gamma: f64,
    /// 1-based indices of elements violating the trace condition.
    pub trace_violators: Vec<usize>,
    /// Orthonormality within tolerance and measured U consistent.
    pub passed: bool,
}

/// Check orthonormality, measure `U`, and list the elements whose trace
/// violates `|tr(E_k)| ≤ (1−γ)Um`. Failures are reported, not raised.
pub fn validate_basis(basis: &ObservableBasis, gamma: f64) -> Result<ValidationReport> {
    let count = basis.len();
    let elements: Vec<HermitianMatrix> = (0..count).map(|j| basis.element(j)).collect();
    let mut max_dev: f64 = 0.0;
    for j in 0..count {
        for k in j..count {
            let inner = elements[j].hs_inner(&elements[k])?;
            let target = if j == k { 1.0 } else { 0.0 };
            max_dev = max_dev.max((inner - target).abs());
        }
    }
    let mut measured_u: f64 = 0.0;
    for e in &elements {
        measured_u = measured_u.max(e.operator_norm()?);
    }
    let threshold = (1.0 - gamma) * basis.u_bound() * basis.dim() as f64;
    let trace_violators: Vec<usize> = elements
        .iter()
        .enumerate()
        .filter(|(_, e)| e.trace().abs() > threshold)
        .map(|(j, _)| j + 1)
        .collect();
    let passed = max_dev <= ORTHONORMALITY_TOL
        && (measured_u - basis.u_bound()).abs() <= ORTHONORMALITY_TOL;
    Ok(ValidationReport {
        label: basis.label().to_string(),
        dim: basis.dim(),
        element_count: count,
        max_orthonormality_deviation: max_dev,
        measured_u,
        declared_u: basis.u_bound(),
        gamma,
        trace_violators,
        passed,
    })
}

#[derive(Serialize, Deserialize)]
struct BasisFile {
    label: String,
    elements: Vec<serde_json::Value>,
}

/// Load a custom basis from its JSON file form: a label plus a list of
/// matrices in the Hermitian JSON encoding. Orthonormality is enforced.
pub fn load_basis_json(value: &serde_json::Value) -> Result<ObservableBasis> {
    let parsed: BasisFile = serde_json::from_value(value.clone())?;
    let elements = parsed
        .elements
        .iter()
        .map(HermitianMatrix::from_json)
        .collect::<Result<Vec<_>>>()?;
    ObservableBasis::from_elements(parsed.label, elements)
}

/// Serialize a basis to the JSON file form (materializes every element).
pub fn basis_to_json(basis: &ObservableBasis) -> serde_json::Value {
    let elements: Vec<serde_json::Value> =
        (0..basis.len()).map(|j| basis.element(j).to_json()).collect();
    serde_json::json!({ "label": basis.label(), "elements": elements })
}
