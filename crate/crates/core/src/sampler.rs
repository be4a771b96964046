//! Trace-regression measurement simulation.
//!
//! All three data models share the same design: each record draws a basis
//! index uniformly from `[1, m²]` and produces a real outcome `Y` with
//! `E(Y | X = E_j) = ⟨ρ, E_j⟩`. They differ in the conditional law:
//!
//! - `StandardQst { k }` — the outcome of measuring the observable `E_j` is
//!   an eigenvalue drawn with Born-rule probabilities; `k` independent
//!   repetitions at the same index are averaged (variance shrinks as 1/k).
//! - `Gaussian { sigma }` — `Y = ⟨ρ, E_j⟩ + N(0, σ²)`.
//! - `BoundedBinary { u_bar }` — `Y = ±Ū` with probabilities
//!   `½ ± ⟨ρ, E_j⟩/(2Ū)`.
//!
//! Randomness comes from ChaCha8 (rand_chacha 0.3) with one stream per
//! record index derived from the dataset seed, so outputs are identical no
//! matter how sampling work is scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use std::path::Path;

use crate::basis::ObservableBasis;
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::state::DensityMatrix;

/// Relative tolerance for grouping nearly equal eigenvalues into one
/// measurement outcome.
const EIGENVALUE_GROUP_TOL: f64 = 1e-9;

/// Conditional outcome law given the sampled observable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NoiseModel {
    /// Averaged eigenvalue measurements, `k ≥ 1` repetitions per record.
    StandardQst { k: u32 },
    /// Additive centered Gaussian noise with standard deviation `sigma`.
    Gaussian { sigma: f64 },
    /// Two-point outcome `±u_bar` with mean `⟨ρ, X⟩`.
    BoundedBinary { u_bar: f64 },
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            NoiseModel::StandardQst { k } if *k >= 1 => Ok(()),
            NoiseModel::StandardQst { k } => {
                Err(Error::Model(format!("repetition count must be >= 1, got {k}")))
            }
            NoiseModel::Gaussian { sigma } if *sigma >= 0.0 => Ok(()),
            NoiseModel::Gaussian { sigma } => {
                Err(Error::Model(format!("sigma must be >= 0, got {sigma}")))
            }
            NoiseModel::BoundedBinary { u_bar } if *u_bar > 0.0 => Ok(()),
            NoiseModel::BoundedBinary { u_bar } => {
                Err(Error::Model(format!("u_bar must be > 0, got {u_bar}")))
            }
        }
    }

    /// Compact text form, e.g. `gaussian:0.05`, `qst:4`, `binary:0.5`.
    pub fn to_spec_string(&self) -> String {
        match self {
            NoiseModel::StandardQst { k } => format!("qst:{k}"),
            NoiseModel::Gaussian { sigma } => format!("gaussian:{sigma}"),
            NoiseModel::BoundedBinary { u_bar } => format!("binary:{u_bar}"),
        }
    }

    pub fn parse_spec(s: &str) -> Result<Self> {
        let (name, arg) = s.split_once(':').unwrap_or((s, ""));
        let model = match name {
            "qst" => NoiseModel::StandardQst {
                k: if arg.is_empty() {
                    1
                } else {
                    arg.parse()
                        .map_err(|_| Error::Parse(format!("bad repetition count: {arg}")))?
                },
            },
            "gaussian" => NoiseModel::Gaussian {
                sigma: arg
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad sigma: {arg}")))?,
            },
            "binary" => NoiseModel::BoundedBinary {
                u_bar: arg
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad u_bar: {arg}")))?,
            },
            other => return Err(Error::Parse(format!("unknown noise model: {other}"))),
        };
        model.validate()?;
        Ok(model)
    }
}

/// One measurement record: 1-based basis index and the observed outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataRecord {
    pub index: u32,
    pub outcome: f64,
}

/// A simulated (or loaded) measurement data set.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub basis_label: String,
    pub m: usize,
    pub records: Vec<DataRecord>,
    pub model: NoiseModel,
    pub seed: u64,
}

#[derive(Serialize, Deserialize)]
struct DatasetSidecar {
    basis_label: String,
    m: usize,
    model: NoiseModel,
    seed: u64,
    n: usize,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub(crate) fn check_basis(&self, basis: &ObservableBasis) -> Result<()> {
        if self.basis_label != basis.label() {
            return Err(Error::argument(format!(
                "dataset was sampled against basis '{}', got '{}'",
                self.basis_label,
                basis.label()
            )));
        }
        if self.m != basis.dim() {
            return Err(Error::DimensionMismatch(self.m, basis.dim()));
        }
        Ok(())
    }

    /// Write the record CSV (`index,outcome`) and its JSON sidecar, which
    /// carries the basis label, dimension, noise model, and seed. The
    /// sidecar path is the CSV path with the extension replaced by `json`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("index,outcome\n");
        for rec in &self.records {
            out.push_str(&format!("{},{}\n", rec.index, rec.outcome));
        }
        std::fs::write(path, out)?;
        let sidecar = DatasetSidecar {
            basis_label: self.basis_label.clone(),
            m: self.m,
            model: self.model.clone(),
            seed: self.seed,
            n: self.records.len(),
        };
        let sidecar_path = path.with_extension("json");
        std::fs::write(&sidecar_path, serde_json::to_string_pretty(&sidecar)?)?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let sidecar_path = path.with_extension("json");
        let sidecar: DatasetSidecar =
            serde_json::from_str(&std::fs::read_to_string(&sidecar_path)?)?;
        let file = std::fs::File::open(path)?;
        let mut records = Vec::new();
        for (lineno, line) in std::io::BufReader::new(file).lines().enumerate() {
            let line = line?;
            if lineno == 0 {
                if line.trim() != "index,outcome" {
                    return Err(Error::Parse(format!("unexpected dataset header: {line}")));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let (idx, y) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad record line: {line}")))?;
            let index: u32 = idx
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad index: {idx}")))?;
            let outcome: f64 = y
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad outcome: {y}")))?;
            let max = (sidecar.m * sidecar.m) as u32;
            if index < 1 || index > max {
                return Err(Error::Parse(format!("index {index} outside [1, {max}]")));
            }
            records.push(DataRecord { index, outcome });
        }
        Ok(Dataset {
            basis_label: sidecar.basis_label,
            m: sidecar.m,
            records,
            model: sidecar.model,
            seed: sidecar.seed,
        })
    }
}

/// Measurement outcome distribution of the observable `E` in state `ρ`:
/// pairs `(λ_g, tr(ρ P_g))` over eigenvalue groups, in non-increasing
/// eigenvalue order. Eigenvalues within a relative tolerance of `1e-9` are
/// grouped into one outcome.
pub fn outcome_distribution(
    rho: &DensityMatrix,
    observable: &HermitianMatrix,
) -> Result<Vec<(f64, f64)>> {
    if rho.dim() != observable.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), observable.dim()));
    }
    let eig = observable.eigh()?;
    let scale = eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &l| acc.max(l.abs()))
        .max(1e-300);
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut g_start = 0usize;
    let m = rho.dim();
    while g_start < m {
        let mut g_end = g_start + 1;
        while g_end < m
            && (eig.eigenvalues[g_end] - eig.eigenvalues[g_start]).abs()
                <= EIGENVALUE_GROUP_TOL * scale
        {
            g_end += 1;
        }
        let mut prob = 0.0;
        let mut value = 0.0;
        for k in g_start..g_end {
            let v = eig.eigenvectors.column(k);
            prob += rho.matrix().quadratic_form(&v);
            value += eig.eigenvalues[k];
        }
        value /= (g_end - g_start) as f64;
        out.push((value, prob.max(0.0)));
        g_start = g_end;
    }
    Ok(out)
}

/// Per-record RNG stream: ChaCha8 keyed by the dataset seed with the record
/// index as the stream id.
fn record_rng(seed: u64, record: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(record);
    rng
}

fn draw_from_distribution(dist: &[(f64, f64)], rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for &(value, prob) in dist {
        acc += prob;
        if u < acc {
            return value;
        }
    }
    dist.last().map(|&(v, _)| v).unwrap_or(0.0)
}

/// Simulate `n` i.i.d. records from the chosen model. Deterministic per
/// seed, with one RNG stream per record, so the result does not depend on
/// evaluation order.
///
/// For `StandardQst { k }` the k repetitions reuse the record's single
/// sampled basis index and average the k eigenvalue draws.
pub fn sample_dataset(
    rho: &DensityMatrix,
    basis: &ObservableBasis,
    model: &NoiseModel,
    n: usize,
    seed: u64,
) -> Result<Dataset> {
    model.validate()?;
    if n < 1 {
        return Err(Error::argument("need at least one record"));
    }
    if rho.dim() != basis.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), basis.dim()));
    }
    let m2 = basis.len();

    // Per-index caches, filled on first use.
    let mut coeff_cache: Vec<Option<f64>> = vec![None; m2];
    let mut dist_cache: Vec<Option<Vec<(f64, f64)>>> = vec![None; m2];

    if let NoiseModel::BoundedBinary { u_bar } = model {
        // The two-point law only exists if Ū covers every coefficient.
        for (j, slot) in coeff_cache.iter_mut().enumerate() {
            let c = basis.element(j).hs_inner(rho.matrix())?;
            *slot = Some(c);
            if c.abs() > *u_bar + 1e-12 {
                return Err(Error::Model(format!(
                    "u_bar = {u_bar} is below |<rho, E_{}>| = {}",
                    j + 1,
                    c.abs()
                )));
            }
        }
    }

    let mut records = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = record_rng(seed, i as u64);
        let j = rng.gen_range(0..m2);
        let outcome = match model {
            NoiseModel::StandardQst { k } => {
                if dist_cache[j].is_none() {
                    dist_cache[j] = Some(outcome_distribution(rho, &basis.element(j))?);
                }
                let dist = dist_cache[j].as_ref().unwrap();
                let mut acc = 0.0;
                for _ in 0..*k {
                    acc += draw_from_distribution(dist, &mut rng);
                }
                acc / *k as f64
            }
            NoiseModel::Gaussian { sigma } => {
                if coeff_cache[j].is_none() {
                    coeff_cache[j] = Some(basis.element(j).hs_inner(rho.matrix())?);
                }
                let c = coeff_cache[j].unwrap();
                if *sigma == 0.0 {
                    c
                } else {
                    c + sigma * rng.sample::<f64, _>(StandardNormal)
                }
            }
            NoiseModel::BoundedBinary { u_bar } => {
                let c = coeff_cache[j].unwrap();
                let p_plus = 0.5 + c / (2.0 * u_bar);
                let u: f64 = rng.gen();
                if u < p_plus {
                    *u_bar
                } else {
                    -*u_bar
                }
            }
        };
        records.push(DataRecord {
            index: (j + 1) as u32,
            outcome,
        });
    }
    Ok(Dataset {
        basis_label: basis.label().to_string(),
        m: basis.dim(),
        records,
        model: model.clone(),
        seed,
    })
}

/// Noiseless full-sweep dataset: each basis index exactly once, outcome
/// `Y_j = ⟨ρ, E_j⟩`. The information-complete degenerate case every
/// estimator must recover exactly.
pub fn noiseless_full_sweep(rho: &DensityMatrix, basis: &ObservableBasis) -> Result<Dataset> {
    if rho.dim() != basis.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), basis.dim()));
    }
    let records = (0..basis.len())
        .map(|j| -> Result<DataRecord> {
            Ok(DataRecord {
                index: (j + 1) as u32,
                outcome: basis.element(j).hs_inner(rho.matrix())?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        basis_label: basis.label().to_string(),
        m: basis.dim(),
        records,
        model: NoiseModel::Gaussian { sigma: 0.0 },
        seed: 0,
    })
}

/// `scale · n^{-1} Σ_i Y_i E_{j_i}` — with `scale = m²` this is the input to
/// the modified least squares estimator. An empty dataset gives the zero
/// matrix.
pub fn weighted_basis_sum(
    data: &Dataset,
    basis: &ObservableBasis,
    scale: f64,
) -> Result<HermitianMatrix> {
    data.check_basis(basis)?;
    let m2 = basis.len();
    let n = data.records.len();
    let mut totals = vec![0.0f64; m2];
    for rec in &data.records {
        totals[(rec.index - 1) as usize] += rec.outcome;
    }
    let mut out = HermitianMatrix::zeros(basis.dim());
    if n == 0 {
        return Ok(out);
    }
    let w = scale / n as f64;
    for (j, &t) in totals.iter().enumerate() {
        if t != 0.0 {
            out = &out + &basis.element(j).scale(w * t);
        }
    }
    Ok(out)
}

/// `Ξ_ε = n^{-1} Σ ε_i E_{j_i}` with uniform indices and independent
/// Rademacher signs; deterministic per seed.
pub fn rademacher_design_matrix(
    basis: &ObservableBasis,
    n: usize,
    seed: u64,
) -> Result<HermitianMatrix> {
    if n < 1 {
        return Err(Error::argument("need n >= 1"));
    }
    let m2 = basis.len();
    let mut signed_counts = vec![0.0f64; m2];
    for i in 0..n {
        let mut rng = record_rng(seed, i as u64);
        let j = rng.gen_range(0..m2);
        let sign: bool = rng.gen();
        signed_counts[j] += if sign { 1.0 } else { -1.0 };
    }
    let mut out = HermitianMatrix::zeros(basis.dim());
    for (j, &c) in signed_counts.iter().enumerate() {
        if c != 0.0 {
            out = &out + &basis.element(j).scale(c / n as f64);
        }
    }
    Ok(out)
}

/// Write any serializable value as pretty JSON to a path.
pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(serde_json::to_string_pretty(value)?.as_bytes())?;
    f.write_all(b"\n")?;
    Ok(())
}
