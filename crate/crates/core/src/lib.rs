//! Low-rank density matrix estimation from trace-regression measurement data.
//!
//! A quantum state on `m` dimensions is a density matrix: a positive
//! semi-definite Hermitian matrix of unit trace. This crate simulates the
//! standard tomography measurement models (uniform sampling from an
//! orthonormal observable basis, e.g. the Pauli tensor basis), estimates the
//! state from the resulting `(observable, outcome)` pairs, and measures how
//! fast the estimation error shrinks with the sample size — with everything
//! seeded and reproducible.
//!
//! The pieces:
//!
//! - [`hermitian`] — complex Hermitian arithmetic, a Jacobi eigensolver,
//!   spectral functions, Schatten norms, subspace projector calculus.
//! - [`state`] — validated density matrices, spectahedron projection, random
//!   state generators (exact low rank, power-law spectra), smoothing, and
//!   packed families of well-separated states.
//! - [`basis`] — observable bases, chiefly the Pauli tensor basis, with
//!   validation and Fourier coefficients.
//! - [`sampler`] — the measurement models: averaged binary tomography
//!   outcomes, Gaussian noise, and bounded binary responses.
//! - [`estimator`] — constrained least squares, its closed-form modified
//!   variant, and von Neumann entropy penalized least squares via entropy
//!   mirror descent.
//! - [`metrics`] — Schatten distances, Bures (squared Hellinger) distance,
//!   quantum relative entropy, and the inequality chain relating them.
//! - [`rates`] — closed-form minimax lower/upper rate expressions, matrix
//!   Bernstein bounds, effective rank, and lower-bound construction helpers.
//! - [`harness`] — the seeded Monte Carlo experiment driver with CSV output
//!   and log–log rate fitting.
//!
//! Start with the runnable examples (`cargo run --example estimate_state`)
//! or the `lowrank-qst` binary, which exposes each capability as a
//! subcommand.

pub mod basis;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod hermitian;
pub mod metrics;
pub mod rates;
pub mod sampler;
pub mod state;

pub use basis::{ObservableBasis, ValidationReport};
pub use error::{Error, Result};
pub use estimator::{FitReport, SolverConfig};
pub use hermitian::{EigenDecomposition, HermitianMatrix, SpectralFn, SubspaceProjector};
pub use metrics::KlDivergence;
pub use sampler::{Dataset, NoiseModel};
pub use state::DensityMatrix;
