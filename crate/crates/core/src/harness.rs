//! Seeded Monte Carlo experiment driver.
//!
//! One experiment sweeps a grid of sample sizes: per trial a fresh state is
//! drawn, per (trial, n) cell a dataset is sampled and each selected
//! estimator fitted, and every row records the full set of distances to the
//! truth. Cells run in parallel with seeds derived by hashing
//! (seed, trial, n), and rows are sorted before output, so the result CSV is
//! byte-identical no matter the thread count.
//!
//! Measured wall-clock time is never byte-reproducible, so timing is off by
//! default: with `timings = off` the `wall_seconds` column holds the
//! sentinel 0. Opt in via `timings = on` when profiling; that run's CSV is
//! no longer byte-identical across repeats.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::io::BufRead;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::basis::{load_basis_json, pauli_basis, ObservableBasis};
use crate::error::{Error, Result};
use crate::estimator::{
    epsilon_choice, least_squares, modified_least_squares, vn_penalized, SolverConfig,
};
use crate::metrics::{bures_hellinger_sq, l2_pi_distance, quantum_kl, schatten_distance};
use crate::rates::{upper_rate, DistanceKind, NoiseScale, RateParams, UpperTheorem};
use crate::sampler::{sample_dataset, NoiseModel};
use crate::state::{haar_random_state, power_law_state, DensityMatrix};

/// CSV schema version written as a comment line above the header.
pub const CSV_VERSION_COMMENT: &str = "# lowrank-qst experiment csv v1";
/// Fixed column list of the experiment CSV.
pub const CSV_HEADER: &str =
    "trial,m,r,n,estimator,eps,err_q1,err_q2,hellinger_sq,kl_rho_to_est,l2_pi,wall_seconds,seed";

/// Which basis to measure against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BasisSpec {
    Pauli(usize),
    File(PathBuf),
}

impl BasisSpec {
    pub fn parse(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("pauli:") {
            return Ok(BasisSpec::Pauli(rest.parse().map_err(|_| {
                Error::Parse(format!("bad qubit count: {rest}"))
            })?));
        }
        Ok(BasisSpec::File(PathBuf::from(s)))
    }

    pub fn build(&self) -> Result<ObservableBasis> {
        match self {
            BasisSpec::Pauli(b) => pauli_basis(*b),
            BasisSpec::File(path) => {
                let text = std::fs::read_to_string(path)?;
                load_basis_json(&serde_json::from_str(&text)?)
            }
        }
    }
}

/// Which true state each trial draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StateSpec {
    /// Haar-style state of exact rank r, fresh per trial.
    LowRank { r: usize },
    /// Power-law spectrum with decay exponent p and radius d, fresh rotation
    /// per trial.
    PowerLaw { p: f64, d: f64 },
    /// The maximally mixed state (fixed).
    MaximallyMixed,
    /// A fixed state loaded from a JSON file.
    File(PathBuf),
}

impl StateSpec {
    pub fn parse(s: &str) -> Result<Self> {
        if s == "mixed" {
            return Ok(StateSpec::MaximallyMixed);
        }
        if let Some(rest) = s.strip_prefix("lowrank:") {
            return Ok(StateSpec::LowRank {
                r: rest
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad rank: {rest}")))?,
            });
        }
        if let Some(rest) = s.strip_prefix("powerlaw:") {
            let (p, d) = rest
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("powerlaw needs p:d, got {rest}")))?;
            return Ok(StateSpec::PowerLaw {
                p: p.parse()
                    .map_err(|_| Error::Parse(format!("bad p: {p}")))?,
                d: d.parse()
                    .map_err(|_| Error::Parse(format!("bad d: {d}")))?,
            });
        }
        Ok(StateSpec::File(PathBuf::from(s)))
    }

    fn draw(&self, m: usize, seed: u64) -> Result<DensityMatrix> {
        match self {
            StateSpec::LowRank { r } => haar_random_state(m, *r, seed),
            StateSpec::PowerLaw { p, d } => power_law_state(m, *p, *d, seed),
            StateSpec::MaximallyMixed => Ok(DensityMatrix::maximally_mixed(m)),
            StateSpec::File(path) => {
                let text = std::fs::read_to_string(path)?;
                DensityMatrix::from_json(&serde_json::from_str(&text)?)
            }
        }
    }
}

/// Estimators the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Ls,
    Mls,
    Vn,
}

impl EstimatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::Ls => "ls",
            EstimatorKind::Mls => "mls",
            EstimatorKind::Vn => "vn",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "ls" => Ok(EstimatorKind::Ls),
            "mls" => Ok(EstimatorKind::Mls),
            "vn" => Ok(EstimatorKind::Vn),
            other => Err(Error::Parse(format!("unknown estimator: {other}"))),
        }
    }
}

/// Regularization choice for the entropy-penalized estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EpsSpec {
    Auto,
    Fixed(f64),
}

impl EpsSpec {
    pub fn parse(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(EpsSpec::Auto);
        }
        Ok(EpsSpec::Fixed(s.parse().map_err(|_| {
            Error::Parse(format!("eps must be 'auto' or a number, got {s}"))
        })?))
    }
}

/// Full experiment description. Parsed from a flat key=value file or JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub basis: BasisSpec,
    pub state: StateSpec,
    pub model: NoiseModel,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub estimators: Vec<EstimatorKind>,
    pub eps: EpsSpec,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Measure per-fit wall time. Off by default: measured time breaks
    /// byte-reproducibility of the CSV.
    #[serde(default)]
    pub timings: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::Config("n_grid must not be empty".into()));
        }
        for w in self.n_grid.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Config(format!(
                    "n_grid must be strictly increasing, got {} after {}",
                    w[1], w[0]
                )));
            }
        }
        if self.trials < 1 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("need at least one estimator".into()));
        }
        self.model.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }
}

/// Parse experiment config text: JSON when it starts with `{`, otherwise a
/// flat `key = value` file (`#` comments allowed). Keys: basis, state,
/// model, n_grid, trials, estimators, eps, seed, out_dir, timings.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        return parse_config_json(trimmed);
    }
    let mut basis = None;
    let mut state = None;
    let mut model = None;
    let mut n_grid: Option<Vec<usize>> = None;
    let mut trials = 20usize;
    let mut estimators = vec![EstimatorKind::Ls, EstimatorKind::Mls, EstimatorKind::Vn];
    let mut eps = EpsSpec::Auto;
    let mut seed = None;
    let mut out_dir = None;
    let mut timings = false;
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key = value, got: {line}")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "basis" => basis = Some(BasisSpec::parse(value)?),
            "state" => state = Some(StateSpec::parse(value)?),
            "model" => model = Some(NoiseModel::parse_spec(value)?),
            "n_grid" => n_grid = Some(parse_n_grid(value)?),
            "trials" => {
                trials = value
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad trials: {value}")))?
            }
            "estimators" => {
                estimators = value
                    .split(',')
                    .map(EstimatorKind::parse)
                    .collect::<Result<Vec<_>>>()?
            }
            "eps" => eps = EpsSpec::parse(value)?,
            "seed" => {
                seed = Some(
                    value
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad seed: {value}")))?,
                )
            }
            "out_dir" => out_dir = Some(PathBuf::from(value)),
            "timings" => timings = matches!(value, "on" | "true" | "1"),
            other => return Err(Error::Parse(format!("unknown config key: {other}"))),
        }
    }
    let cfg = ExperimentConfig {
        basis: basis.ok_or_else(|| Error::Config("missing basis".into()))?,
        state: state.ok_or_else(|| Error::Config("missing state".into()))?,
        model: model.ok_or_else(|| Error::Config("missing model".into()))?,
        n_grid: n_grid.ok_or_else(|| Error::Config("missing n_grid".into()))?,
        trials,
        estimators,
        eps,
        seed: seed.unwrap_or(0),
        out_dir: out_dir.unwrap_or_else(default_out_dir),
        timings,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn parse_config_json(text: &str) -> Result<ExperimentConfig> {
    #[derive(Deserialize)]
    struct Raw {
        basis: String,
        state: String,
        model: String,
        n_grid: Vec<usize>,
        #[serde(default = "default_trials")]
        trials: usize,
        #[serde(default)]
        estimators: Option<Vec<String>>,
        #[serde(default)]
        eps: Option<String>,
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        out_dir: Option<PathBuf>,
        #[serde(default)]
        timings: bool,
    }
    fn default_trials() -> usize {
        20
    }
    let raw: Raw = serde_json::from_str(text)?;
    let estimators = match raw.estimators {
        Some(list) => list
            .iter()
            .map(|s| EstimatorKind::parse(s))
            .collect::<Result<Vec<_>>>()?,
        None => vec![EstimatorKind::Ls, EstimatorKind::Mls, EstimatorKind::Vn],
    };
    let cfg = ExperimentConfig {
        basis: BasisSpec::parse(&raw.basis)?,
        state: StateSpec::parse(&raw.state)?,
        model: NoiseModel::parse_spec(&raw.model)?,
        n_grid: raw.n_grid,
        trials: raw.trials,
        estimators,
        eps: raw.eps.as_deref().map(EpsSpec::parse).transpose()?.unwrap_or(EpsSpec::Auto),
        seed: raw.seed.unwrap_or(0),
        out_dir: raw.out_dir.unwrap_or_else(default_out_dir),
        timings: raw.timings,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Default output directory: `$QST_OUT_DIR` if set, else the current dir.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os("QST_OUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Parse an n-grid: comma list (`1024,2048`) or geometric range
/// (`1024:65536:x2`).
pub fn parse_n_grid(s: &str) -> Result<Vec<usize>> {
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 || !parts[2].starts_with('x') {
            return Err(Error::Parse(format!(
                "range grid must be start:end:x<factor>, got {s}"
            )));
        }
        let start: usize = parts[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad start: {}", parts[0])))?;
        let end: usize = parts[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad end: {}", parts[1])))?;
        let factor: usize = parts[2][1..]
            .parse()
            .map_err(|_| Error::Parse(format!("bad factor: {}", parts[2])))?;
        if factor < 2 || start == 0 {
            return Err(Error::Parse("need factor >= 2 and start >= 1".into()));
        }
        let mut grid = Vec::new();
        let mut n = start;
        while n <= end {
            grid.push(n);
            n *= factor;
        }
        return Ok(grid);
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad grid entry: {p}")))
        })
        .collect()
}

/// One result row; the KL column is the only one allowed to be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub trial: usize,
    pub m: usize,
    pub r: usize,
    pub n: usize,
    pub estimator: EstimatorKind,
    pub eps: f64,
    pub err_q1: f64,
    pub err_q2: f64,
    pub hellinger_sq: f64,
    pub kl_rho_to_est: f64,
    pub l2_pi: f64,
    pub wall_seconds: f64,
    pub seed: u64,
}

/// Experiment output: the rows, the config echo, and any feasibility or
/// consistency warnings gathered along the way.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub rows: Vec<ResultRow>,
    pub warnings: Vec<String>,
}

/// splitmix64 step; the seed-derivation mixer. Explicit so the stream
/// layout is stable across toolchains.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derive a child seed from the master seed and a role/coordinate list.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    let mut acc = splitmix64(master);
    for &p in parts {
        acc = splitmix64(acc ^ p);
    }
    acc
}

fn feasibility_warnings(cfg: &ExperimentConfig, u: f64, m: usize) -> Vec<String> {
    let mut warnings = Vec::new();
    let mf = m as f64;
    let n_min = cfg.n_grid[0] as f64;
    match &cfg.model {
        NoiseModel::Gaussian { sigma } => {
            let a = u * (mf / n_min).sqrt() * mf.ln();
            if a > 1.0 {
                warnings.push(format!(
                    "second-order regime: U*sqrt(m/n)*log m = {a:.3} exceeds 1 at n = {n_min}"
                ));
            }
            let b = u * u * (mf / n_min).sqrt() * mf.ln().powf(2.5) * n_min.ln().powi(2)
                * (mf * n_min).ln();
            if b > *sigma && *sigma > 0.0 {
                warnings.push(format!(
                    "second-order regime: U^2-term {b:.3e} exceeds sigma = {sigma} at n = {n_min}"
                ));
            }
        }
        NoiseModel::StandardQst { .. } | NoiseModel::BoundedBinary { .. } => {
            let a = u * (mf * mf.ln() / n_min).sqrt();
            if a > 1.0 {
                warnings.push(format!(
                    "second-order regime: U*sqrt(m log m / n) = {a:.3} exceeds 1 at n = {n_min}"
                ));
            }
        }
    }
    warnings
}

fn estimator_eps(cfg: &ExperimentConfig, basis: &ObservableBasis, n: usize) -> f64 {
    match cfg.eps {
        EpsSpec::Fixed(e) => e,
        EpsSpec::Auto => {
            let u = match &cfg.model {
                NoiseModel::BoundedBinary { u_bar } => basis.u_bound().max(*u_bar),
                _ => basis.u_bound(),
            };
            epsilon_choice(&cfg.model, u, basis.dim(), n, 0.0)
        }
    }
}

/// Run the full experiment: `trials × n_grid × estimators` rows,
/// deterministic per seed regardless of the rayon thread count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let basis = cfg.basis.build()?;
    let m = basis.dim();
    if let StateSpec::LowRank { r } = cfg.state {
        if r < 1 || r > m {
            return Err(Error::Config(format!(
                "state rank {r} incompatible with basis dimension {m}"
            )));
        }
    }
    let mut warnings = feasibility_warnings(cfg, basis.u_bound(), m);

    // states are drawn per trial and shared across the n-grid
    let states: Vec<DensityMatrix> = (0..cfg.trials)
        .map(|trial| cfg.state.draw(m, derive_seed(cfg.seed, &[1, trial as u64])))
        .collect::<Result<Vec<_>>>()?;
    for state in &states {
        if state.dim() != m {
            return Err(Error::Config(format!(
                "state dimension {} does not match basis dimension {m}",
                state.dim()
            )));
        }
    }

    let cells: Vec<(usize, usize)> = (0..cfg.trials)
        .flat_map(|trial| cfg.n_grid.iter().map(move |&n| (trial, n)))
        .collect();

    let cell_rows: Vec<Result<Vec<ResultRow>>> = cells
        .par_iter()
        .map(|&(trial, n)| -> Result<Vec<ResultRow>> {
            let rho = &states[trial];
            let cell_seed = derive_seed(cfg.seed, &[2, trial as u64, n as u64]);
            let data = sample_dataset(rho, &basis, &cfg.model, n, cell_seed)?;
            let rank_tol = 1e-12;
            let r = rho.numerical_rank(rank_tol);
            let mut rows = Vec::with_capacity(cfg.estimators.len());
            for &est in &cfg.estimators {
                let eps = match est {
                    EstimatorKind::Vn => estimator_eps(cfg, &basis, n),
                    _ => 0.0,
                };
                let started = Instant::now();
                let estimate = match est {
                    EstimatorKind::Ls => {
                        least_squares(&data, &basis, &SolverConfig::default())?.estimate
                    }
                    EstimatorKind::Mls => modified_least_squares(&data, &basis)?,
                    EstimatorKind::Vn => {
                        vn_penalized(&data, &basis, eps.max(1e-14), &SolverConfig::default())?
                            .estimate
                    }
                };
                let wall = if cfg.timings {
                    started.elapsed().as_secs_f64()
                } else {
                    0.0
                };
                rows.push(ResultRow {
                    trial,
                    m,
                    r,
                    n,
                    estimator: est,
                    eps,
                    err_q1: schatten_distance(rho, &estimate, 1.0)?,
                    err_q2: schatten_distance(rho, &estimate, 2.0)?,
                    hellinger_sq: bures_hellinger_sq(rho, &estimate)?,
                    kl_rho_to_est: quantum_kl(rho, &estimate, false)?.as_f64(),
                    l2_pi: l2_pi_distance(rho.matrix(), estimate.matrix(), m)?,
                    wall_seconds: wall,
                    seed: cell_seed,
                });
            }
            Ok(rows)
        })
        .collect();

    let mut rows = Vec::with_capacity(cells.len() * cfg.estimators.len());
    for cell in cell_rows {
        rows.extend(cell?);
    }
    rows.sort_by_key(|row| (row.trial, row.n, row.estimator));

    // consistency re-check: the distance-inequality chain on 1% of rows
    for row in rows.iter().step_by(100) {
        let quarter = 0.25 * row.err_q1 * row.err_q1;
        if row.hellinger_sq < quarter - 1e-8
            || row.hellinger_sq > row.err_q1 + 1e-8
            || (row.kl_rho_to_est.is_finite() && row.hellinger_sq > row.kl_rho_to_est + 1e-8)
        {
            warnings.push(format!(
                "distance chain violated at trial {} n {} {}",
                row.trial,
                row.n,
                row.estimator.name()
            ));
        }
    }

    Ok(ExperimentResult {
        config: cfg.clone(),
        rows,
        warnings,
    })
}

fn format_float(x: f64) -> String {
    if x.is_infinite() {
        "inf".to_string()
    } else {
        format!("{x}")
    }
}

/// Render rows as the versioned CSV (comment line, fixed header,
/// `inf` literal for infinite KL).
pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{CSV_VERSION_COMMENT}");
    let _ = writeln!(out, "{CSV_HEADER}");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.trial,
            r.m,
            r.r,
            r.n,
            r.estimator.name(),
            format_float(r.eps),
            format_float(r.err_q1),
            format_float(r.err_q2),
            format_float(r.hellinger_sq),
            format_float(r.kl_rho_to_est),
            format_float(r.l2_pi),
            format_float(r.wall_seconds),
            r.seed
        );
    }
    out
}

pub fn write_rows_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    std::fs::write(path, rows_to_csv(rows))?;
    Ok(())
}

fn parse_float(s: &str) -> Result<f64> {
    if s == "inf" {
        return Ok(f64::INFINITY);
    }
    s.parse()
        .map_err(|_| Error::Parse(format!("bad float: {s}")))
}

/// Read rows back from the CSV form (comments skipped, header enforced).
pub fn read_rows_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let file = std::fs::File::open(path)?;
    let mut rows = Vec::new();
    let mut saw_header = false;
    for line in std::io::BufReader::new(file).lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != CSV_HEADER {
                return Err(Error::Parse(format!("unexpected CSV header: {line}")));
            }
            saw_header = true;
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 13 {
            return Err(Error::Parse(format!("expected 13 columns, got {}", parts.len())));
        }
        rows.push(ResultRow {
            trial: parts[0].parse().map_err(|_| Error::Parse("bad trial".into()))?,
            m: parts[1].parse().map_err(|_| Error::Parse("bad m".into()))?,
            r: parts[2].parse().map_err(|_| Error::Parse("bad r".into()))?,
            n: parts[3].parse().map_err(|_| Error::Parse("bad n".into()))?,
            estimator: EstimatorKind::parse(parts[4])?,
            eps: parse_float(parts[5])?,
            err_q1: parse_float(parts[6])?,
            err_q2: parse_float(parts[7])?,
            hellinger_sq: parse_float(parts[8])?,
            kl_rho_to_est: parse_float(parts[9])?,
            l2_pi: parse_float(parts[10])?,
            wall_seconds: parse_float(parts[11])?,
            seed: parts[12].parse().map_err(|_| Error::Parse("bad seed".into()))?,
        });
    }
    if !saw_header {
        return Err(Error::Parse("no header row found".into()));
    }
    Ok(rows)
}

/// Error column selector for rate fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorColumn {
    Q1,
    Q2,
    HellingerSq,
    Kl,
    L2Pi,
}

impl ErrorColumn {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "err_q1" => Ok(ErrorColumn::Q1),
            "err_q2" => Ok(ErrorColumn::Q2),
            "hellinger_sq" => Ok(ErrorColumn::HellingerSq),
            "kl_rho_to_est" => Ok(ErrorColumn::Kl),
            "l2_pi" => Ok(ErrorColumn::L2Pi),
            other => Err(Error::Parse(format!("unknown error column: {other}"))),
        }
    }

    fn get(&self, row: &ResultRow) -> f64 {
        match self {
            ErrorColumn::Q1 => row.err_q1,
            ErrorColumn::Q2 => row.err_q2,
            ErrorColumn::HellingerSq => row.hellinger_sq,
            ErrorColumn::Kl => row.kl_rho_to_est,
            ErrorColumn::L2Pi => row.l2_pi,
        }
    }
}

/// Row grouping for rate fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupBy {
    Estimator,
    EstimatorAndRank,
    None,
}

impl GroupBy {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "estimator" => Ok(GroupBy::Estimator),
            "estimator-r" => Ok(GroupBy::EstimatorAndRank),
            "none" => Ok(GroupBy::None),
            other => Err(Error::Parse(format!("unknown group-by: {other}"))),
        }
    }

    fn key(&self, row: &ResultRow) -> String {
        match self {
            GroupBy::Estimator => row.estimator.name().to_string(),
            GroupBy::EstimatorAndRank => format!("{}:r={}", row.estimator.name(), row.r),
            GroupBy::None => "all".to_string(),
        }
    }
}

/// A fitted log–log rate: `log(median error) ≈ intercept + slope·log n`.
#[derive(Debug, Clone, Serialize)]
pub struct RateFit {
    pub group: String,
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub points: usize,
}

pub fn median(values: &mut Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = values.len();
    if k == 0 {
        return f64::NAN;
    }
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

/// Ordinary least squares of log(median error) on log n, per group.
/// Medians across trials keep the heavy tails of the high-probability
/// bounds out of the fit. Groups with fewer than 3 distinct n, or with
/// zero/infinite medians, are skipped with a note.
pub fn fit_rate(
    rows: &[ResultRow],
    column: ErrorColumn,
    group_by: GroupBy,
) -> (Vec<RateFit>, Vec<String>) {
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<String, BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
    for row in rows {
        groups
            .entry(group_by.key(row))
            .or_default()
            .entry(row.n)
            .or_default()
            .push(column.get(row));
    }
    let mut fits = Vec::new();
    let mut notes = Vec::new();
    for (group, by_n) in groups {
        let mut points: Vec<(f64, f64)> = Vec::new();
        let mut degenerate = false;
        for (n, mut errs) in by_n {
            let med = median(&mut errs);
            if !(med.is_finite() && med > 0.0) {
                degenerate = true;
                break;
            }
            points.push(((n as f64).ln(), med.ln()));
        }
        if degenerate {
            notes.push(format!("group {group}: zero or non-finite median, skipped"));
            continue;
        }
        if points.len() < 3 {
            notes.push(format!(
                "group {group}: needs at least 3 distinct n, got {}",
                points.len()
            ));
            continue;
        }
        let k = points.len() as f64;
        let mean_x: f64 = points.iter().map(|p| p.0).sum::<f64>() / k;
        let mean_y: f64 = points.iter().map(|p| p.1).sum::<f64>() / k;
        let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
        let sxy: f64 = points
            .iter()
            .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
            .sum();
        let slope = sxy / sxx;
        let intercept = mean_y - slope * mean_x;
        let ssr: f64 = points
            .iter()
            .map(|p| (p.1 - intercept - slope * p.0).powi(2))
            .sum();
        let stderr = if points.len() > 2 {
            (ssr / (k - 2.0) / sxx).sqrt()
        } else {
            0.0
        };
        fits.push(RateFit {
            group,
            slope,
            intercept,
            stderr,
            points: points.len(),
        });
    }
    (fits, notes)
}

/// One row of an empirical-vs-theory comparison.
#[derive(Debug, Clone, Serialize)]
pub struct TheoryRow {
    pub n: usize,
    pub empirical_median: f64,
    pub theory_rate: f64,
    pub ratio: f64,
}

/// Comparison table plus a drift flag: constants are unknowable, so what is
/// checked is that the ratio stays within a decade across the grid.
#[derive(Debug, Clone, Serialize)]
pub struct TheoryComparison {
    pub kind: String,
    pub rows: Vec<TheoryRow>,
    pub drift_exceeds_decade: bool,
    pub notes: Vec<String>,
}

/// Compare per-n empirical medians (entropy-penalized rows when present)
/// against the closed-form upper rate of the matching model. Rows where the
/// rate cap is active are skipped — a capped rate carries no n-scaling.
pub fn compare_to_theory(result: &ExperimentResult, kind: DistanceKind) -> Result<TheoryComparison> {
    let column = match kind {
        DistanceKind::Schatten(q) if (q - 1.0).abs() < 1e-12 => ErrorColumn::Q1,
        DistanceKind::Schatten(q) if (q - 2.0).abs() < 1e-12 => ErrorColumn::Q2,
        DistanceKind::Schatten(q) => {
            return Err(Error::argument(format!(
                "only q = 1 and q = 2 are recorded as columns, got q = {q}"
            )))
        }
        DistanceKind::Hellinger => ErrorColumn::HellingerSq,
        DistanceKind::Kl => ErrorColumn::Kl,
    };
    let preferred = if result.config.estimators.contains(&EstimatorKind::Vn) {
        EstimatorKind::Vn
    } else {
        *result
            .config
            .estimators
            .first()
            .ok_or_else(|| Error::argument("no estimators in result"))?
    };
    let rows: Vec<&ResultRow> = result
        .rows
        .iter()
        .filter(|r| r.estimator == preferred)
        .collect();
    if rows.is_empty() {
        return Err(Error::argument("no rows for the preferred estimator"));
    }
    let m = rows[0].m;
    let r = rows.iter().map(|row| row.r).max().unwrap();
    let (theorem, scale) = match &result.config.model {
        NoiseModel::Gaussian { sigma } => (UpperTheorem::Gauss, NoiseScale::Sigma(*sigma)),
        NoiseModel::StandardQst { .. } => (UpperTheorem::Bounded, NoiseScale::Pauli),
        NoiseModel::BoundedBinary { u_bar } => (UpperTheorem::Bounded, NoiseScale::UBar(*u_bar)),
    };
    let mut notes = Vec::new();
    let mut out_rows = Vec::new();
    for &n in &result.config.n_grid {
        let mut errs: Vec<f64> = rows
            .iter()
            .filter(|row| row.n == n)
            .map(|row| column.get(row))
            .collect();
        if errs.is_empty() {
            continue;
        }
        let med = median(&mut errs);
        let params = RateParams { m, r, n, scale };
        let theory = upper_rate(theorem, kind, &params)?;
        let capped = match kind {
            DistanceKind::Kl => false,
            _ => theory >= 2.0 - 1e-12,
        };
        if capped {
            notes.push(format!("n = {n}: rate cap active, skipped"));
            continue;
        }
        if !(med.is_finite() && med > 0.0) {
            notes.push(format!("n = {n}: degenerate median, skipped"));
            continue;
        }
        out_rows.push(TheoryRow {
            n,
            empirical_median: med,
            theory_rate: theory,
            ratio: med / theory,
        });
    }
    let drift = if out_rows.len() >= 2 {
        let max = out_rows.iter().map(|r| r.ratio).fold(f64::MIN, f64::max);
        let min = out_rows.iter().map(|r| r.ratio).fold(f64::MAX, f64::min);
        max / min > 10.0
    } else {
        false
    };
    let kind_name = match kind {
        DistanceKind::Schatten(q) => format!("schatten({q})"),
        DistanceKind::Hellinger => "hellinger".to_string(),
        DistanceKind::Kl => "kl".to_string(),
    };
    Ok(TheoryComparison {
        kind: kind_name,
        rows: out_rows,
        drift_exceeds_decade: drift,
        notes,
    })
}
