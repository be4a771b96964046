//! Complex Hermitian matrices: arithmetic, eigendecomposition, spectral
//! functions, Schatten norms, and the subspace projector calculus.
//!
//! This is the numeric substrate for everything else in the crate. Matrices
//! are dense, row-major `Vec<Complex64>` and are symmetrized at construction
//! so the Hermitian invariant holds exactly. The eigensolver is a cyclic
//! Jacobi iteration for complex Hermitian matrices (see Numerical Recipes
//! §11.1 for the real symmetric version); intended operating range is
//! m ≤ 256.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Off-diagonal Frobenius threshold for Jacobi convergence, relative to the
/// Frobenius norm of the input.
const JACOBI_REL_TOL: f64 = 1e-13;
/// Hard cap on Jacobi sweeps before reporting non-convergence.
const JACOBI_MAX_SWEEPS: usize = 100;
/// Absolute eigenvalue floor below which a matrix logarithm is refused.
pub const LOG_EIGENVALUE_FLOOR: f64 = 1e-300;
/// Default rank tolerance is this factor times the operator norm.
pub const DEFAULT_RANK_TOL_FACTOR: f64 = 1e-9;

/// Spectral functions that can be applied through an eigendecomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralFn {
    Log,
    Sqrt,
    Exp,
}

/// Dense m×m complex Hermitian matrix.
///
/// The constructor symmetrizes its input (`(A + A*)/2`), so stored entries
/// satisfy `a[i][j] == conj(a[j][i])` exactly and the diagonal is real.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

/// General (not necessarily Hermitian) dense complex matrix. Used for
/// eigenvector collections and intermediate products.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        ComplexMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    /// The j-th column as a vector.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, j)).collect()
    }

    /// `‖M*M − I‖₂` (entrywise Frobenius), used to verify unitarity.
    pub fn unitarity_defect(&self) -> f64 {
        let m = self.dim;
        let mut sum = 0.0;
        for i in 0..m {
            for j in 0..m {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..m {
                    acc += self.get(k, i).conj() * self.get(k, j);
                }
                if i == j {
                    acc -= Complex64::new(1.0, 0.0);
                }
                sum += acc.norm_sqr();
            }
        }
        sum.sqrt()
    }
}

/// Eigendecomposition `A = V diag(λ) V*` with eigenvalues in non-increasing
/// order and eigenvectors as columns of a unitary matrix. Ties keep the order
/// the solver produced (stable sort).
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// Rebuild `V diag(f(λ)) V*`.
    pub fn rebuild(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let vals: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.rebuild_with_spectrum(&vals)
    }

    /// Rebuild `V diag(λ') V*` from a replacement spectrum (matched to the
    /// stored eigenvalue order).
    pub fn rebuild_with_spectrum(&self, vals: &[f64]) -> HermitianMatrix {
        let m = self.eigenvectors.dim();
        assert_eq!(vals.len(), m, "spectrum length mismatch");
        let mut data = vec![Complex64::new(0.0, 0.0); m * m];
        for k in 0..m {
            if vals[k] == 0.0 {
                continue;
            }
            for i in 0..m {
                let vik = self.eigenvectors.get(i, k) * vals[k];
                for j in 0..m {
                    data[i * m + j] += vik * self.eigenvectors.get(j, k).conj();
                }
            }
        }
        HermitianMatrix::from_raw_symmetrize(m, data)
    }

    /// Orthogonal projector onto the span of the eigenvectors whose
    /// eigenvalue satisfies the predicate.
    pub fn projector_where(&self, pred: impl Fn(f64) -> bool) -> HermitianMatrix {
        let m = self.eigenvectors.dim();
        let mut data = vec![Complex64::new(0.0, 0.0); m * m];
        for k in 0..m {
            if !pred(self.eigenvalues[k]) {
                continue;
            }
            for i in 0..m {
                let vik = self.eigenvectors.get(i, k);
                for j in 0..m {
                    data[i * m + j] += vik * self.eigenvectors.get(j, k).conj();
                }
            }
        }
        HermitianMatrix::from_raw_symmetrize(m, data)
    }

    /// Reconstruction residual `‖V diag(λ) V* − A‖₂`.
    pub fn reconstruction_residual(&self, a: &HermitianMatrix) -> f64 {
        (&self.rebuild(|l| l) - a).frobenius_norm()
    }
}

#[derive(Serialize, Deserialize)]
struct HermitianJson {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl HermitianMatrix {
    /// Build from row-major complex entries; the input is symmetrized.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::argument(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(Self::from_raw_symmetrize(dim, entries))
    }

    /// Symmetrize raw storage: `A ← (A + A*)/2`, diagonal made exactly real.
    pub(crate) fn from_raw_symmetrize(dim: usize, mut data: Vec<Complex64>) -> Self {
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(data[i * dim + i].re, 0.0);
            for j in (i + 1)..dim {
                let avg = (data[i * dim + j] + data[j * dim + i].conj()) * 0.5;
                data[i * dim + j] = avg;
                data[j * dim + i] = avg.conj();
            }
        }
        HermitianMatrix { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            out.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        out
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            out.data[i * dim + i] = Complex64::new(diag[i], 0.0);
        }
        out
    }

    /// Build from real row-major entries (symmetrized like any other input).
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            dim,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self::from_raw_symmetrize(dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: Complex64) {
        let d = self.dim;
        self.data[i * d + j] = v;
        self.data[j * d + i] = v.conj();
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    /// Entrywise Frobenius norm (coincides with the Schatten 2-norm).
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    /// Row-major general product `self · other` (not Hermitian in general).
    pub(crate) fn mul_raw(&self, other: &Self) -> Vec<Complex64> {
        let m = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); m * m];
        for i in 0..m {
            for k in 0..m {
                let aik = self.data[i * m + k];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..m {
                    out[i * m + j] += aik * other.data[k * m + j];
                }
            }
        }
        out
    }

    /// `self · other · self`, which is Hermitian whenever both factors are.
    pub fn sandwich(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let tmp = HermitianMatrix {
            dim: self.dim,
            data: self.mul_raw(other),
        };
        let data = HermitianMatrix {
            dim: self.dim,
            data: tmp.mul_raw(self),
        }
        .data;
        Ok(Self::from_raw_symmetrize(self.dim, data))
    }

    /// Hilbert–Schmidt inner product `⟨A,B⟩ = tr(AB)`, real for Hermitian
    /// arguments.
    pub fn hs_inner(&self, other: &Self) -> Result<f64> {
        self.check_dims(other)?;
        // tr(AB) = Σ_ij a_ij b_ji = Σ_ij a_ij conj(b_ij)
        let mut acc = 0.0;
        for (a, b) in self.data.iter().zip(other.data.iter()) {
            acc += a.re * b.re + a.im * b.im;
        }
        Ok(acc)
    }

    /// Quadratic form `v* A v` (real for Hermitian A).
    pub fn quadratic_form(&self, v: &[Complex64]) -> f64 {
        let m = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..m {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..m {
                row += self.data[i * m + j] * v[j];
            }
            acc += v[i].conj() * row;
        }
        acc.re
    }

    /// Cyclic Jacobi eigendecomposition for complex Hermitian matrices.
    ///
    /// Each rotation combines a diagonal phase (making the pivot entry real)
    /// with a real Jacobi rotation that annihilates it. Sweeps run until the
    /// off-diagonal Frobenius norm drops below `1e-13·‖A‖₂`, with a hard cap
    /// of 100 sweeps.
    pub fn eigh(&self) -> Result<EigenDecomposition> {
        let m = self.dim;
        if m == 0 {
            return Err(Error::argument("cannot decompose an empty matrix"));
        }
        let mut a = self.data.clone();
        let mut v = ComplexMatrix::identity(m);
        let fro = self.frobenius_norm();
        let target = JACOBI_REL_TOL * fro;

        let off_norm = |a: &[Complex64]| -> f64 {
            let mut s = 0.0;
            for i in 0..m {
                for j in 0..m {
                    if i != j {
                        s += a[i * m + j].norm_sqr();
                    }
                }
            }
            s.sqrt()
        };

        if m > 1 && fro > 0.0 {
            let mut converged = false;
            let mut sweeps = 0;
            while sweeps < JACOBI_MAX_SWEEPS {
                if off_norm(&a) <= target {
                    converged = true;
                    break;
                }
                for p in 0..m {
                    for q in (p + 1)..m {
                        let apq = a[p * m + q];
                        let absb = apq.norm();
                        if absb == 0.0 {
                            continue;
                        }
                        let app = a[p * m + p].re;
                        let aqq = a[q * m + q].re;
                        let phase = apq / absb; // e^{iφ}
                        let theta = (aqq - app) / (2.0 * absb);
                        let t = if theta.abs() > 1e154 {
                            // avoid overflow in theta^2
                            0.5 / theta
                        } else {
                            theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                        };
                        let c = 1.0 / (1.0 + t * t).sqrt();
                        let s = t * c;

                        // Unitary G = identity except
                        //   G[p][p] = e^{iφ}c, G[p][q] = e^{iφ}s,
                        //   G[q][p] = -s,      G[q][q] = c.
                        // A ← G* A (rows p,q):
                        for j in 0..m {
                            let arp = a[p * m + j];
                            let arq = a[q * m + j];
                            a[p * m + j] = phase.conj() * c * arp - s * arq;
                            a[q * m + j] = phase.conj() * s * arp + c * arq;
                        }
                        // A ← A G (columns p,q):
                        for i in 0..m {
                            let acp = a[i * m + p];
                            let acq = a[i * m + q];
                            a[i * m + p] = phase * c * acp - s * acq;
                            a[i * m + q] = phase * s * acp + c * acq;
                        }
                        // Annihilated entries and real diagonal, exactly.
                        a[p * m + q] = Complex64::new(0.0, 0.0);
                        a[q * m + p] = Complex64::new(0.0, 0.0);
                        a[p * m + p] = Complex64::new(a[p * m + p].re, 0.0);
                        a[q * m + q] = Complex64::new(a[q * m + q].re, 0.0);
                        // V ← V G (columns p,q):
                        for i in 0..m {
                            let vcp = v.data[i * m + p];
                            let vcq = v.data[i * m + q];
                            v.data[i * m + p] = phase * c * vcp - s * vcq;
                            v.data[i * m + q] = phase * s * vcp + c * vcq;
                        }
                    }
                }
                sweeps += 1;
            }
            if !converged && off_norm(&a) > target {
                return Err(Error::NonConvergence {
                    sweeps,
                    residual: off_norm(&a),
                });
            }
        }

        let raw: Vec<f64> = (0..m).map(|i| a[i * m + i].re).collect();
        // Non-increasing eigenvalue order; stable sort keeps tie order.
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&i, &j| raw[j].partial_cmp(&raw[i]).unwrap());
        let eigenvalues: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
        let mut vecs = vec![Complex64::new(0.0, 0.0); m * m];
        for (newcol, &oldcol) in order.iter().enumerate() {
            for i in 0..m {
                vecs[i * m + newcol] = v.data[i * m + oldcol];
            }
        }
        Ok(EigenDecomposition {
            eigenvalues,
            eigenvectors: ComplexMatrix { dim: m, data: vecs },
        })
    }

    /// Apply a spectral function `V diag(fn(λ)) V*`.
    ///
    /// `Log` refuses eigenvalues at or below an absolute floor of `1e-300`;
    /// callers that need safe logarithms must smooth first. `Sqrt` clamps
    /// eigenvalues in `[-1e-10, 0)` to zero and refuses anything lower.
    pub fn apply_spectral_fn(&self, f: SpectralFn) -> Result<HermitianMatrix> {
        let eig = self.eigh()?;
        match f {
            SpectralFn::Log => {
                for &l in &eig.eigenvalues {
                    if l <= LOG_EIGENVALUE_FLOOR {
                        return Err(Error::Domain {
                            message: "matrix log needs strictly positive eigenvalues".into(),
                            eigenvalue: l,
                        });
                    }
                }
                Ok(eig.rebuild(f64::ln))
            }
            SpectralFn::Sqrt => {
                for &l in &eig.eigenvalues {
                    if l < -1e-10 {
                        return Err(Error::Domain {
                            message: "matrix sqrt needs nonnegative eigenvalues".into(),
                            eigenvalue: l,
                        });
                    }
                }
                Ok(eig.rebuild(|l| l.max(0.0).sqrt()))
            }
            SpectralFn::Exp => Ok(eig.rebuild(f64::exp)),
        }
    }

    /// Schatten p-norm `(Σ|λ_j|^p)^{1/p}`; `p = ∞` gives the operator norm.
    pub fn schatten_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::argument(format!("Schatten norm needs p >= 1, got {p}")));
        }
        let eig = self.eigh()?;
        if p.is_infinite() {
            return Ok(eig
                .eigenvalues
                .iter()
                .fold(0.0f64, |acc, &l| acc.max(l.abs())));
        }
        if p == 1.0 {
            return Ok(eig.eigenvalues.iter().map(|l| l.abs()).sum());
        }
        if p == 2.0 {
            return Ok(eig
                .eigenvalues
                .iter()
                .map(|l| l * l)
                .sum::<f64>()
                .sqrt());
        }
        Ok(eig
            .eigenvalues
            .iter()
            .map(|l| l.abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p))
    }

    /// Operator norm, `max_j |λ_j|`.
    pub fn operator_norm(&self) -> Result<f64> {
        self.schatten_norm(f64::INFINITY)
    }

    /// Default rank tolerance `1e-9·‖A‖_∞`.
    pub fn default_rank_tol(&self) -> Result<f64> {
        Ok(DEFAULT_RANK_TOL_FACTOR * self.operator_norm()?)
    }

    /// Projector onto the span of eigenvectors with `|λ| > rank_tol`,
    /// together with the sign matrix `Σ sign(λ_j) P_j` over the same span.
    pub fn support_and_sign(&self, rank_tol: f64) -> Result<(SubspaceProjector, HermitianMatrix)> {
        if rank_tol <= 0.0 {
            return Err(Error::argument("rank_tol must be positive"));
        }
        let eig = self.eigh()?;
        let proj = eig.projector_where(|l| l.abs() > rank_tol);
        let sign = eig.rebuild(|l| {
            if l > rank_tol {
                1.0
            } else if l < -rank_tol {
                -1.0
            } else {
                0.0
            }
        });
        let rank = eig
            .eigenvalues
            .iter()
            .filter(|l| l.abs() > rank_tol)
            .count();
        Ok((SubspaceProjector::new_unchecked(proj, rank), sign))
    }

    /// Serialize to the documented JSON form `{"dim", "re", "im"}`.
    pub fn to_json(&self) -> serde_json::Value {
        let m = self.dim;
        let re: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..m).map(|j| self.get(i, j).re).collect())
            .collect();
        let im: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..m).map(|j| self.get(i, j).im).collect())
            .collect();
        serde_json::to_value(HermitianJson { dim: m, re, im }).expect("json")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let parsed: HermitianJson = serde_json::from_value(value.clone())?;
        let m = parsed.dim;
        if parsed.re.len() != m || parsed.im.len() != m {
            return Err(Error::Parse("re/im row count does not match dim".into()));
        }
        let mut data = Vec::with_capacity(m * m);
        for i in 0..m {
            if parsed.re[i].len() != m || parsed.im[i].len() != m {
                return Err(Error::Parse("re/im column count does not match dim".into()));
            }
            for j in 0..m {
                data.push(Complex64::new(parsed.re[i][j], parsed.im[i][j]));
            }
        }
        Self::new(m, data)
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in add");
        HermitianMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(rhs.data.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sub");
        HermitianMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(rhs.data.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, rhs: f64) -> HermitianMatrix {
        self.scale(rhs)
    }
}

/// Orthogonal projector `P_L` onto a subspace `L`, with `P² = P`.
#[derive(Debug, Clone)]
pub struct SubspaceProjector {
    matrix: HermitianMatrix,
    rank: usize,
}

impl SubspaceProjector {
    pub(crate) fn new_unchecked(matrix: HermitianMatrix, rank: usize) -> Self {
        SubspaceProjector { matrix, rank }
    }

    /// Validate a Hermitian matrix as a projector: idempotent within 1e-9 and
    /// eigenvalues in {0,1} within 1e-9.
    pub fn from_matrix(matrix: HermitianMatrix) -> Result<Self> {
        let eig = matrix.eigh()?;
        let mut rank = 0usize;
        for &l in &eig.eigenvalues {
            if (l - 1.0).abs() <= 1e-9 {
                rank += 1;
            } else if l.abs() > 1e-9 {
                return Err(Error::argument(format!(
                    "not a projector: eigenvalue {l} is neither 0 nor 1"
                )));
            }
        }
        let idem = {
            let sq_data = matrix.mul_raw(&matrix);
            let sq = HermitianMatrix::from_raw_symmetrize(matrix.dim(), sq_data);
            (&sq - &matrix).frobenius_norm()
        };
        if idem > 1e-9 {
            return Err(Error::argument(format!(
                "not a projector: idempotence defect {idem:e}"
            )));
        }
        Ok(SubspaceProjector { matrix, rank })
    }

    /// Projector built from a set of orthonormal columns.
    pub fn from_orthonormal_columns(dim: usize, cols: &[Vec<Complex64>]) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for col in cols {
            for i in 0..dim {
                for j in 0..dim {
                    data[i * dim + j] += col[i] * col[j].conj();
                }
            }
        }
        SubspaceProjector {
            matrix: HermitianMatrix::from_raw_symmetrize(dim, data),
            rank: cols.len(),
        }
    }

    /// Projector onto the whole space.
    pub fn full(dim: usize) -> Self {
        SubspaceProjector {
            matrix: HermitianMatrix::identity(dim),
            rank: dim,
        }
    }

    /// Projector onto the zero subspace.
    pub fn zero(dim: usize) -> Self {
        SubspaceProjector {
            matrix: HermitianMatrix::zeros(dim),
            rank: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    /// Projector onto the orthogonal complement, `I − P`.
    pub fn complement(&self) -> Self {
        SubspaceProjector {
            matrix: &HermitianMatrix::identity(self.dim()) - &self.matrix,
            rank: self.dim() - self.rank,
        }
    }
}

/// Split `A` into the pair `(𝒫_L(A), 𝒫_L^⊥(A))` where
/// `𝒫_L^⊥(A) = P_{L^⊥} A P_{L^⊥}` and `𝒫_L(A) = A − 𝒫_L^⊥(A)`.
///
/// The two parts sum to `A`, are orthogonal in the Hilbert–Schmidt inner
/// product, and the first has rank at most `2·dim(L)`.
pub fn split_by_subspace(
    l: &SubspaceProjector,
    a: &HermitianMatrix,
) -> Result<(HermitianMatrix, HermitianMatrix)> {
    if l.dim() != a.dim() {
        return Err(Error::DimensionMismatch(l.dim(), a.dim()));
    }
    let perp = l.complement();
    let outside = perp.matrix().sandwich(a)?;
    let inside = a - &outside;
    Ok((inside, outside))
}

/// Random Hermitian matrix with independent standard Gaussian entries,
/// symmetrized. Handy as generic test/demo input.
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> HermitianMatrix {
    let data: Vec<Complex64> = (0..dim * dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    HermitianMatrix::from_raw_symmetrize(dim, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigh_diagonal() {
        let a = HermitianMatrix::from_diag(&[3.0, 1.0]);
        let eig = a.eigh().unwrap();
        assert!((eig.eigenvalues[0] - 3.0).abs() < 1e-12);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-12);
        assert!(eig.eigenvectors.unitarity_defect() < 1e-12);
    }

    #[test]
    fn eigh_pauli_x_like() {
        let a = HermitianMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let eig = a.eigh().unwrap();
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((eig.eigenvalues[1] + 1.0).abs() < 1e-12);
        assert!(eig.reconstruction_residual(&a) < 1e-12);
    }

    #[test]
    fn eigh_random_reconstruction() {
        // 1000 matrices across m = 2..16
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for i in 0..1000usize {
            let m = 2 + i % 15;
            let a = random_hermitian(m, &mut rng);
            let eig = a.eigh().unwrap();
            let scale = a.frobenius_norm().max(1.0);
            assert!(eig.reconstruction_residual(&a) <= 1e-9 * scale);
            assert!(eig.eigenvectors.unitarity_defect() <= 1e-9);
            for k in 1..m {
                assert!(eig.eigenvalues[k - 1] >= eig.eigenvalues[k]);
            }
        }
    }

    #[test]
    fn eigh_complex_entries() {
        let a = HermitianMatrix::new(2, vec![c(1.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(1.0, 0.0)])
            .unwrap();
        let eig = a.eigh().unwrap();
        assert!((eig.eigenvalues[0] - 2.0).abs() < 1e-12);
        assert!(eig.eigenvalues[1].abs() < 1e-12);
    }

    #[test]
    fn spectral_log_identity_is_zero() {
        let a = HermitianMatrix::identity(4);
        let l = a.apply_spectral_fn(SpectralFn::Log).unwrap();
        assert!(l.frobenius_norm() < 1e-12);
    }

    #[test]
    fn spectral_sqrt_diagonal() {
        let a = HermitianMatrix::from_diag(&[4.0, 1.0]);
        let s = a.apply_spectral_fn(SpectralFn::Sqrt).unwrap();
        assert!((s.get(0, 0).re - 2.0).abs() < 1e-12);
        assert!((s.get(1, 1).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectral_exp_log_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let g = random_hermitian(4, &mut rng);
            // positive definite via exp
            let s = g.scale(0.3).apply_spectral_fn(SpectralFn::Exp).unwrap();
            let back = s
                .apply_spectral_fn(SpectralFn::Log)
                .unwrap()
                .apply_spectral_fn(SpectralFn::Exp)
                .unwrap();
            assert!((&back - &s).frobenius_norm() <= 1e-8 * s.frobenius_norm().max(1.0));
        }
    }

    #[test]
    fn spectral_log_rejects_singular() {
        let a = HermitianMatrix::from_diag(&[1.0, 0.0]);
        match a.apply_spectral_fn(SpectralFn::Log) {
            Err(Error::Domain { eigenvalue, .. }) => assert!(eigenvalue <= LOG_EIGENVALUE_FLOOR),
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn schatten_basics() {
        let id = HermitianMatrix::identity(5);
        assert!((id.schatten_norm(1.0).unwrap() - 5.0).abs() < 1e-12);
        let s = HermitianMatrix::from_diag(&[1.0, -1.0]);
        assert!((s.schatten_norm(f64::INFINITY).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(s.schatten_norm(0.5), Err(Error::Argument(_))));
    }

    #[test]
    fn schatten_two_matches_frobenius() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = random_hermitian(6, &mut rng);
            assert!((a.schatten_norm(2.0).unwrap() - a.frobenius_norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn schatten_triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let a = random_hermitian(4, &mut rng);
            let b = random_hermitian(4, &mut rng);
            for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
                let lhs = (&a + &b).schatten_norm(p).unwrap();
                let rhs = a.schatten_norm(p).unwrap() + b.schatten_norm(p).unwrap();
                assert!(lhs <= rhs + 1e-9, "triangle failed at p={p}: {lhs} > {rhs}");
            }
        }
    }

    #[test]
    fn schatten_interpolation_inequality() {
        // ‖A‖_q ≤ ‖A‖_p^μ ‖A‖_r^{1−μ} with μ/p + (1−μ)/r = 1/q.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let triples: [(f64, f64, f64); 3] = [(1.0, 1.5, 2.0), (1.0, 2.0, f64::INFINITY), (2.0, 3.0, 6.0)];
        for _ in 0..50 {
            let a = random_hermitian(5, &mut rng);
            for &(p, q, r) in &triples {
                let inv_r = if r.is_infinite() { 0.0 } else { 1.0 / r };
                let mu = (1.0 / q - inv_r) / (1.0 / p - inv_r);
                let lhs = a.schatten_norm(q).unwrap();
                let rhs = a.schatten_norm(p).unwrap().powf(mu)
                    * a.schatten_norm(r).unwrap().powf(1.0 - mu);
                assert!(lhs <= rhs + 1e-9);
            }
        }
    }

    #[test]
    fn hs_inner_identity() {
        let id = HermitianMatrix::identity(2);
        assert!((id.hs_inner(&id).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn hs_inner_entrywise_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let a = random_hermitian(4, &mut rng);
            let b = random_hermitian(4, &mut rng);
            // independent path: Σ_ij Re(conj(a_ij) b_ij)
            let mut oracle = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    oracle += (a.get(i, j).conj() * b.get(i, j)).re;
                }
            }
            assert!((a.hs_inner(&b).unwrap() - oracle).abs() < 1e-10);
            assert!((a.hs_inner(&b).unwrap() - b.hs_inner(&a).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn hs_inner_dim_mismatch() {
        let a = HermitianMatrix::identity(2);
        let b = HermitianMatrix::identity(3);
        assert!(matches!(a.hs_inner(&b), Err(Error::DimensionMismatch(2, 3))));
    }

    #[test]
    fn support_and_sign_examples() {
        let a = HermitianMatrix::from_diag(&[2.0, 0.0]);
        let (p, sign) = a.support_and_sign(1e-9).unwrap();
        assert_eq!(p.rank(), 1);
        assert!((p.matrix().get(0, 0).re - 1.0).abs() < 1e-12);
        assert!(p.matrix().get(1, 1).re.abs() < 1e-12);
        assert!((sign.get(0, 0).re - 1.0).abs() < 1e-12);

        let b = HermitianMatrix::from_diag(&[1.0, -3.0]);
        let (p, sign) = b.support_and_sign(1e-9).unwrap();
        assert_eq!(p.rank(), 2);
        assert!((sign.get(0, 0).re - 1.0).abs() < 1e-12);
        assert!((sign.get(1, 1).re + 1.0).abs() < 1e-12);

        let z = HermitianMatrix::zeros(3);
        let (p, sign) = z.support_and_sign(1e-9).unwrap();
        assert_eq!(p.rank(), 0);
        assert!(sign.frobenius_norm() < 1e-12);
    }

    #[test]
    fn support_and_sign_rejects_bad_tolerance() {
        let a = HermitianMatrix::identity(2);
        assert!(a.support_and_sign(0.0).is_err());
        assert!(a.support_and_sign(-1.0).is_err());
    }

    #[test]
    fn sign_times_matrix_gives_absolute_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let a = random_hermitian(5, &mut rng);
            let tol = a.default_rank_tol().unwrap();
            let (_, sign) = a.support_and_sign(tol).unwrap();
            let prod = HermitianMatrix::from_raw_symmetrize(5, sign.mul_raw(&a));
            let mut got = prod.eigh().unwrap().eigenvalues;
            let mut want: Vec<f64> = a.eigh().unwrap().eigenvalues.iter().map(|l| l.abs()).collect();
            got.sort_by(|x, y| y.partial_cmp(x).unwrap());
            want.sort_by(|x, y| y.partial_cmp(x).unwrap());
            for (g, w) in got.iter().zip(want.iter()) {
                assert!((g - w).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn split_full_and_zero_subspace() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let a = random_hermitian(4, &mut rng);
        let (inside, outside) = split_by_subspace(&SubspaceProjector::full(4), &a).unwrap();
        assert!((&inside - &a).frobenius_norm() < 1e-12);
        assert!(outside.frobenius_norm() < 1e-12);
        let (inside, outside) = split_by_subspace(&SubspaceProjector::zero(4), &a).unwrap();
        assert!(inside.frobenius_norm() < 1e-12);
        assert!((&outside - &a).frobenius_norm() < 1e-12);
    }

    #[test]
    fn split_parts_are_orthogonal_and_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let a = random_hermitian(6, &mut rng);
            // random rank-2 subspace from a random Hermitian's top eigenvectors
            let b = random_hermitian(6, &mut rng);
            let eig = b.eigh().unwrap();
            let cols: Vec<Vec<Complex64>> = (0..2).map(|k| eig.eigenvectors.column(k)).collect();
            let l = SubspaceProjector::from_orthonormal_columns(6, &cols);
            let (inside, outside) = split_by_subspace(&l, &a).unwrap();
            assert!((&(&inside + &outside) - &a).frobenius_norm() < 1e-10);
            assert!(inside.hs_inner(&outside).unwrap().abs() < 1e-9);
            // rank bound 2·dim(L) via eigenvalue count
            let rank_tol = 1e-9 * a.operator_norm().unwrap().max(1.0);
            let rank = inside
                .eigh()
                .unwrap()
                .eigenvalues
                .iter()
                .filter(|l| l.abs() > rank_tol)
                .count();
            assert!(rank <= 2 * l.rank());
        }
    }

    #[test]
    fn projector_validation() {
        let p = HermitianMatrix::from_diag(&[1.0, 0.0, 1.0]);
        let sp = SubspaceProjector::from_matrix(p).unwrap();
        assert_eq!(sp.rank(), 2);
        assert_eq!(sp.complement().rank(), 1);
        let not_p = HermitianMatrix::from_diag(&[0.5, 0.0]);
        assert!(SubspaceProjector::from_matrix(not_p).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let a = random_hermitian(3, &mut rng);
        let back = HermitianMatrix::from_json(&a.to_json()).unwrap();
        assert!((&back - &a).frobenius_norm() < 1e-15);
    }
}
