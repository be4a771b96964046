//! End-to-end runs of the `lowrank-qst` binary: the simulate → estimate →
//! distance pipeline, basis validation, rate tables, and rate fitting.

use std::path::Path;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_lowrank-qst")
}

fn run_ok(args: &[&str]) -> String {
    let output = Command::new(bin()).args(args).output().unwrap();
    assert!(
        output.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout).unwrap()
}

#[test]
fn simulate_estimate_distance_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    run_ok(&[
        "simulate",
        "--state",
        "lowrank:2:42",
        "--basis",
        "pauli:2",
        "--model",
        "gaussian:0.05",
        "--n",
        "4096",
        "--seed",
        "7",
        "--out",
        data.to_str().unwrap(),
    ]);
    assert!(data.exists());
    assert!(dir.path().join("data.json").exists());
    let first_line = std::fs::read_to_string(&data)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string();
    assert_eq!(first_line, "index,outcome");

    let est_vn = dir.path().join("vn.json");
    let report = dir.path().join("vn_report.json");
    run_ok(&[
        "estimate",
        "--data",
        data.to_str().unwrap(),
        "--estimator",
        "vn",
        "--eps",
        "auto",
        "--out",
        est_vn.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    let report_json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(report_json["min_eigenvalue"].as_f64().unwrap() > 0.0);

    let est_mls = dir.path().join("mls.json");
    run_ok(&[
        "estimate",
        "--data",
        data.to_str().unwrap(),
        "--estimator",
        "mls",
        "--out",
        est_mls.to_str().unwrap(),
    ]);

    let out = run_ok(&[
        "distance",
        "--a",
        est_vn.to_str().unwrap(),
        "--b",
        est_mls.to_str().unwrap(),
        "--all",
    ]);
    let record: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(record["schatten_q2"].as_f64().unwrap() < 0.2);
    assert!(record["inequality_chain"]["passed"].as_bool().unwrap());
}

#[test]
fn qst_model_pipeline_with_auto_eps() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("shots.csv");
    run_ok(&[
        "simulate",
        "--state",
        "powerlaw:0.5:4.0:3",
        "--basis",
        "pauli:2",
        "--model",
        "qst:8",
        "--n",
        "2048",
        "--seed",
        "5",
        "--out",
        data.to_str().unwrap(),
    ]);
    let est = dir.path().join("est.json");
    let report = dir.path().join("report.json");
    run_ok(&[
        "estimate",
        "--data",
        data.to_str().unwrap(),
        "--estimator",
        "vn",
        "--eps",
        "auto",
        "--out",
        est.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    let report_json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(report_json["converged"].as_bool().unwrap());
    assert!(report_json["min_eigenvalue"].as_f64().unwrap() > 0.0);
}

#[test]
fn validate_basis_reports_pauli() {
    let out = run_ok(&["validate-basis", "--pauli", "2", "--gamma", "0.1"]);
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(report["passed"].as_bool().unwrap());
    assert_eq!(report["trace_violators"].as_array().unwrap().len(), 1);
    assert!((report["measured_u"].as_f64().unwrap() - 0.5).abs() < 1e-10);
}

#[test]
fn rates_table_shape() {
    let out = run_ok(&[
        "rates", "--theorem", "thm1", "--q", "1", "--m", "8", "--r", "2", "--sigma", "0.1",
        "--n-grid", "1024:65536:x2",
    ]);
    let lines: Vec<&str> = out.trim().lines().collect();
    assert_eq!(lines[0], "n,rate");
    assert_eq!(lines.len(), 8); // header + 7 grid points
    // rate halves when n quadruples
    let rate_at = |line: &str| -> f64 { line.split(',').nth(1).unwrap().parse().unwrap() };
    let r1 = rate_at(lines[1]);
    let r3 = rate_at(lines[3]);
    assert!((r1 / r3 - 2.0).abs() < 1e-9);
}

#[test]
fn experiment_and_fit_rate_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(
        &cfg,
        "basis = pauli:1\nstate = lowrank:1\nmodel = gaussian:0.1\nn_grid = 64,256,1024\ntrials = 4\nestimators = mls\neps = auto\n",
    )
    .unwrap();
    let results = dir.path().join("results.csv");
    run_ok(&[
        "experiment",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "11",
        "--out",
        results.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&results).unwrap();
    assert!(text.starts_with("# lowrank-qst experiment csv v1\n"));
    assert!(text.lines().nth(1).unwrap().starts_with("trial,m,r,n,estimator"));

    let out = run_ok(&[
        "fit-rate",
        "--data",
        results.to_str().unwrap(),
        "--column",
        "err_q2",
        "--group-by",
        "estimator",
    ]);
    let payload: serde_json::Value = serde_json::from_str(&out).unwrap();
    let fits = payload["fits"].as_array().unwrap();
    assert_eq!(fits.len(), 1);
    let slope = fits[0]["slope"].as_f64().unwrap();
    assert!(slope < 0.0, "error should shrink with n, slope {slope}");
}

#[test]
fn experiment_out_dir_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(
        &cfg,
        "basis = pauli:1\nstate = mixed\nmodel = qst:1\nn_grid = 32,64\ntrials = 1\nestimators = mls\n",
    )
    .unwrap();
    let out_dir = dir.path().join("outputs");
    let status = Command::new(bin())
        .args(["experiment", "--config", cfg.to_str().unwrap(), "--seed", "3"])
        .env("QST_OUT_DIR", &out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(Path::new(&out_dir.join("results.csv")).exists());
}
