//! Command-line front end: one thin binary whose subcommands map onto the
//! library capabilities. See the crate examples for API-level usage.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

use lowrank_qst::basis::{load_basis_json, validate_basis};
use lowrank_qst::error::{Error, Result};
use lowrank_qst::estimator::{
    epsilon_choice, least_squares, modified_least_squares, vn_penalized, SolverConfig,
};
use lowrank_qst::harness::{
    default_out_dir, fit_rate, parse_config, parse_n_grid, read_rows_csv, run_experiment,
    write_rows_csv, BasisSpec, ErrorColumn, GroupBy,
};
use lowrank_qst::metrics::{
    bures_hellinger_sq, check_distance_inequalities, l2_pi_distance, quantum_kl,
    schatten_distance,
};
use lowrank_qst::rates::{
    minimax_lower_rate, upper_rate, DistanceKind, NoiseScale, RateParams, UpperTheorem,
};
use lowrank_qst::sampler::{sample_dataset, write_json, Dataset, NoiseModel};
use lowrank_qst::state::DensityMatrix;

#[derive(Parser)]
#[command(
    name = "lowrank-qst",
    about = "Simulate tomography measurements, estimate density matrices, and check error rates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a measurement dataset from a state and noise model.
    Simulate(SimulateArgs),
    /// Fit an estimator to a dataset.
    Estimate(EstimateArgs),
    /// Print every distance between two states as JSON.
    Distance(DistanceArgs),
    /// Evaluate closed-form rate expressions on an n-grid (CSV to stdout).
    Rates(RatesArgs),
    /// Validate an observable basis and print the report as JSON.
    ValidateBasis(ValidateBasisArgs),
    /// Run a seeded Monte Carlo experiment from a config file.
    Experiment(ExperimentArgs),
    /// Fit log-log rate slopes to an experiment CSV.
    FitRate(FitRateArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// State: a JSON file path, `mixed`, `lowrank:<r>:<seed>`, or
    /// `powerlaw:<p>:<d>:<seed>`.
    #[arg(long)]
    state: String,
    /// Basis: `pauli:<b>` or a basis JSON file.
    #[arg(long)]
    basis: String,
    /// Noise model: `gaussian:<sigma>`, `qst:<k>`, or `binary:<u_bar>`.
    #[arg(long)]
    model: String,
    /// Number of records.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    /// Output CSV path (a JSON sidecar is written next to it).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EstimateArgs {
    /// Dataset CSV written by `simulate`.
    #[arg(long)]
    data: PathBuf,
    /// One of `ls`, `mls`, `vn`.
    #[arg(long)]
    estimator: String,
    /// `auto` or an explicit value (used by `vn`).
    #[arg(long, default_value = "auto")]
    eps: String,
    /// Basis JSON file; defaults to the basis named in the dataset sidecar.
    #[arg(long)]
    basis: Option<PathBuf>,
    /// Where to write the estimated state JSON.
    #[arg(long)]
    out: PathBuf,
    /// Optional fit report JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct DistanceArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    /// Print every metric (the default; kept as an explicit flag).
    #[arg(long, default_value_t = true)]
    all: bool,
}

#[derive(Args)]
struct RatesArgs {
    /// thm1 (Gaussian lower), thm2 (bounded lower), thm4 (Pauli lower),
    /// thm7 (Gaussian upper), thm8 (bounded upper).
    #[arg(long)]
    theorem: String,
    /// Schatten index; ignored when --kind is hellinger or kl.
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    /// `schatten`, `hellinger`, or `kl`.
    #[arg(long, default_value = "schatten")]
    kind: String,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    r: usize,
    /// Noise scale (sigma for Gaussian theorems, U/u_bar for bounded ones;
    /// unused for Pauli).
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// n-grid: `start:end:x<factor>` or comma list.
    #[arg(long = "n-grid")]
    n_grid: String,
}

#[derive(Args)]
struct ValidateBasisArgs {
    /// Basis JSON file.
    #[arg(long, conflicts_with = "pauli")]
    file: Option<PathBuf>,
    /// Built-in Pauli basis with this qubit count.
    #[arg(long)]
    pauli: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Config file (flat key = value, or JSON).
    #[arg(long)]
    config: PathBuf,
    /// Master seed (mandatory: no wall-clock seeding).
    #[arg(long)]
    seed: u64,
    /// Rayon thread count (output is identical for any value).
    #[arg(long)]
    threads: Option<usize>,
    /// Result CSV path; defaults to `<out_dir>/results.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitRateArgs {
    /// Experiment CSV.
    #[arg(long)]
    data: PathBuf,
    /// err_q1, err_q2, hellinger_sq, kl_rho_to_est, or l2_pi.
    #[arg(long, default_value = "err_q2")]
    column: String,
    /// estimator, estimator-r, or none.
    #[arg(long = "group-by", default_value = "estimator")]
    group_by: String,
    /// Optional JSON output path (stdout otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_state(spec: &str, m_hint: Option<usize>) -> Result<DensityMatrix> {
    let need_m = || m_hint.ok_or_else(|| Error::argument("generator state needs a basis for its dimension"));
    if spec == "mixed" {
        return Ok(DensityMatrix::maximally_mixed(need_m()?));
    }
    if let Some(rest) = spec.strip_prefix("lowrank:") {
        let (r, seed) = rest
            .split_once(':')
            .ok_or_else(|| Error::Parse("lowrank needs <r>:<seed>".into()))?;
        return lowrank_qst::state::haar_random_state(
            need_m()?,
            r.parse().map_err(|_| Error::Parse(format!("bad rank: {r}")))?,
            seed.parse().map_err(|_| Error::Parse(format!("bad seed: {seed}")))?,
        );
    }
    if let Some(rest) = spec.strip_prefix("powerlaw:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse("powerlaw needs <p>:<d>:<seed>".into()));
        }
        return lowrank_qst::state::power_law_state(
            need_m()?,
            parts[0].parse().map_err(|_| Error::Parse(format!("bad p: {}", parts[0])))?,
            parts[1].parse().map_err(|_| Error::Parse(format!("bad d: {}", parts[1])))?,
            parts[2].parse().map_err(|_| Error::Parse(format!("bad seed: {}", parts[2])))?,
        );
    }
    let text = std::fs::read_to_string(spec)?;
    DensityMatrix::from_json(&serde_json::from_str(&text)?)
}

fn run_simulate(args: SimulateArgs) -> Result<()> {
    let basis = BasisSpec::parse(&args.basis)?.build()?;
    let rho = load_state(&args.state, Some(basis.dim()))?;
    let model = NoiseModel::parse_spec(&args.model)?;
    let data = sample_dataset(&rho, &basis, &model, args.n, args.seed)?;
    data.write_csv(&args.out)?;
    eprintln!(
        "wrote {} records to {} (sidecar {})",
        data.len(),
        args.out.display(),
        args.out.with_extension("json").display()
    );
    Ok(())
}

fn run_estimate(args: EstimateArgs) -> Result<()> {
    let data = Dataset::read_csv(&args.data)?;
    let basis = match &args.basis {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            load_basis_json(&serde_json::from_str(&text)?)?
        }
        None => BasisSpec::parse(&data.basis_label)?.build()?,
    };
    let eps = match args.eps.as_str() {
        "auto" => {
            let u = match &data.model {
                NoiseModel::BoundedBinary { u_bar } => basis.u_bound().max(*u_bar),
                _ => basis.u_bound(),
            };
            epsilon_choice(&data.model, u, basis.dim(), data.len(), 0.0)
        }
        value => value
            .parse()
            .map_err(|_| Error::Parse(format!("eps must be 'auto' or a number, got {value}")))?,
    };
    let cfg = SolverConfig::default();
    let (estimate, report) = match args.estimator.as_str() {
        "ls" => {
            let fit = least_squares(&data, &basis, &cfg)?;
            (fit.estimate.clone(), Some(fit))
        }
        "mls" => (modified_least_squares(&data, &basis)?, None),
        "vn" => {
            let fit = vn_penalized(&data, &basis, eps, &cfg)?;
            (fit.estimate.clone(), Some(fit))
        }
        other => return Err(Error::argument(format!("unknown estimator: {other}"))),
    };
    let kind = format!("estimate:{}", args.estimator);
    write_json(&args.out, &estimate.to_json(&kind))?;
    if let Some(report_path) = args.report {
        match report {
            Some(fit) => write_json(&report_path, &fit)?,
            None => write_json(
                &report_path,
                &serde_json::json!({
                    "estimator": "mls",
                    "closed_form": true,
                    "min_eigenvalue": estimate.min_eigenvalue(),
                }),
            )?,
        }
    }
    eprintln!("wrote estimate to {}", args.out.display());
    Ok(())
}

fn run_distance(args: DistanceArgs) -> Result<()> {
    let a = DensityMatrix::from_json(&serde_json::from_str(&std::fs::read_to_string(&args.a)?)?)?;
    let b = DensityMatrix::from_json(&serde_json::from_str(&std::fs::read_to_string(&args.b)?)?)?;
    let _ = args.all;
    let m = a.dim();
    let record = serde_json::json!({
        "schatten_q1": schatten_distance(&a, &b, 1.0)?,
        "schatten_q2": schatten_distance(&a, &b, 2.0)?,
        "schatten_qinf": schatten_distance(&a, &b, f64::INFINITY)?,
        "hellinger_sq": bures_hellinger_sq(&a, &b)?,
        "kl_a_b": quantum_kl(&a, &b, false)?,
        "kl_b_a": quantum_kl(&b, &a, false)?,
        "kl_symmetrized": quantum_kl(&a, &b, true)?,
        "l2_pi": l2_pi_distance(a.matrix(), b.matrix(), m)?,
        "inequality_chain": check_distance_inequalities(&a, &b)?,
    });
    println!("{}", serde_json::to_string_pretty(&record)?);
    Ok(())
}

fn run_rates(args: RatesArgs) -> Result<()> {
    let kind = match args.kind.as_str() {
        "schatten" => DistanceKind::Schatten(args.q),
        "hellinger" => DistanceKind::Hellinger,
        "kl" => DistanceKind::Kl,
        other => return Err(Error::argument(format!("unknown kind: {other}"))),
    };
    let grid = parse_n_grid(&args.n_grid)?;
    println!("n,rate");
    for n in grid {
        let rate = match args.theorem.as_str() {
            "thm1" => minimax_lower_rate(
                kind,
                &RateParams { m: args.m, r: args.r, n, scale: NoiseScale::Sigma(args.sigma) },
            )?,
            "thm2" | "thm3" => minimax_lower_rate(
                kind,
                &RateParams { m: args.m, r: args.r, n, scale: NoiseScale::UBar(args.sigma) },
            )?,
            "thm4" => minimax_lower_rate(
                kind,
                &RateParams { m: args.m, r: args.r, n, scale: NoiseScale::Pauli },
            )?,
            "thm7" => upper_rate(
                UpperTheorem::Gauss,
                kind,
                &RateParams { m: args.m, r: args.r, n, scale: NoiseScale::Sigma(args.sigma) },
            )?,
            "thm8" => upper_rate(
                UpperTheorem::Bounded,
                kind,
                &RateParams { m: args.m, r: args.r, n, scale: NoiseScale::U(args.sigma) },
            )?,
            other => return Err(Error::argument(format!("unknown theorem: {other}"))),
        };
        println!("{n},{rate}");
    }
    Ok(())
}

fn run_validate_basis(args: ValidateBasisArgs) -> Result<()> {
    let basis = match (&args.file, args.pauli) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)?;
            load_basis_json(&serde_json::from_str(&text)?)?
        }
        (None, Some(b)) => lowrank_qst::basis::pauli_basis(b)?,
        _ => return Err(Error::argument("pass exactly one of --file or --pauli")),
    };
    let report = validate_basis(&basis, args.gamma)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn run_experiment_cmd(args: ExperimentArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)?;
    let mut cfg = parse_config(&text)?;
    cfg.seed = args.seed;
    if cfg.out_dir == PathBuf::from(".") {
        cfg.out_dir = default_out_dir();
    }
    let run = || run_experiment(&cfg);
    let result = match args.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(run),
        None => run(),
    }?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    std::fs::create_dir_all(&cfg.out_dir)?;
    let out = args.out.unwrap_or_else(|| cfg.out_dir.join("results.csv"));
    write_rows_csv(&result.rows, &out)?;
    eprintln!("wrote {} rows to {}", result.rows.len(), out.display());
    Ok(())
}

fn run_fit_rate(args: FitRateArgs) -> Result<()> {
    let rows = read_rows_csv(&args.data)?;
    let column = ErrorColumn::parse(&args.column)?;
    let group_by = GroupBy::parse(&args.group_by)?;
    let (fits, notes) = fit_rate(&rows, column, group_by);
    let payload = serde_json::json!({ "fits": fits, "notes": notes });
    match args.out {
        Some(path) => write_json(&path, &payload)?,
        None => println!("{}", serde_json::to_string_pretty(&payload)?),
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(args) => run_simulate(args),
        Command::Estimate(args) => run_estimate(args),
        Command::Distance(args) => run_distance(args),
        Command::Rates(args) => run_rates(args),
        Command::ValidateBasis(args) => run_validate_basis(args),
        Command::Experiment(args) => run_experiment_cmd(args),
        Command::FitRate(args) => run_fit_rate(args),
    };
    if let Err(err) = outcome {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}
