//! End-to-end checks of the `tlpot` binary: exit codes, output schemas,
//! and byte-level determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tlpot"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should start")
}

fn stdout_of(out: &Output) -> String {
    assert!(
        out.status.success(),
        "expected success, got {:?}; stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).expect("output should be UTF-8")
}

/// Unique scratch path; the test process cleans up after itself.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tlpot-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("scratch dir should be creatable");
    dir.join(name)
}

fn write_csv(name: &str, header: &str, values: &[f64]) -> PathBuf {
    let path = scratch(name);
    let mut body = format!("{header}\n");
    for v in values {
        body.push_str(&format!("{v}\n"));
    }
    std::fs::write(&path, body).expect("fixture should be writable");
    path
}

// ---------------------------------------------------------------- exit codes

#[test]
fn success_exits_zero() {
    let out = run(&["simulate", "--dist", "sp(gamma=2)", "--n", "5", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["--definitely-not-a-flag"]).status.code(), Some(1));
    assert_eq!(run(&["scan"]).status.code(), Some(1), "missing required --input");
    assert_eq!(run(&[]).status.code(), Some(1), "missing subcommand");
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["select", "--help"]).status.code(), Some(0));
}

#[test]
fn input_problems_exit_two() {
    let out = run(&["scan", "--input", "/nonexistent/path.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let path = write_csv("narrow.csv", "x", &[1.0, 2.0, 3.0, 4.0, 5.0]);
    let out = run(&["scan", "--input", path.to_str().unwrap(), "--column", "missing"]);
    assert_eq!(out.status.code(), Some(2), "unknown column name");

    let out = run(&["simulate", "--dist", "sp(gamma=-1)", "--n", "5"]);
    assert_eq!(out.status.code(), Some(2), "invalid parameter");

    let out = run(&["simulate", "--dist", "sp(gamma=2)"]);
    assert_eq!(out.status.code(), Some(2), "plain distribution needs --n");
}

#[test]
fn degenerate_computation_exits_three() {
    // Every observation identical: all excesses are exactly 1, every
    // (gamma, rank) candidate degenerates, and selection has nothing left.
    let path = write_csv("tied.csv", "x", &[5.0; 20]);
    let out = run(&["select", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no feasible grid point"));
}

// -------------------------------------------------------------- schemas

#[test]
fn scan_schema_is_pinned() {
    let path = write_csv(
        "geo.csv",
        "x",
        // Geometric sequence: clean strict-Pareto-like tail, nothing skipped
        // at deep ranks.
        &(0..40).map(|i| 1.5_f64.powi(i)).collect::<Vec<_>>(),
    );
    let out = stdout_of(&run(&[
        "scan",
        "--input",
        path.to_str().unwrap(),
        "--min-rank",
        "30",
        "--max-rank",
        "34",
        "--seed",
        "4",
    ]));
    let mut lines = out.lines();
    assert_eq!(
        lines.next(),
        Some("rank,u,n_exceed,evi_sp,evi_tlpa,alpha_hat")
    );
    for line in lines {
        assert_eq!(line.split(',').count(), 6, "row arity: {line}");
        let rank: usize = line.split(',').next().unwrap().parse().unwrap();
        assert!((30..=34).contains(&rank));
    }
}

#[test]
fn select_schema_is_pinned() {
    let path = write_csv(
        "geo2.csv",
        "x",
        &(0..60).map(|i| 1.3_f64.powi(i)).collect::<Vec<_>>(),
    );
    let out = stdout_of(&run(&["select", "--input", path.to_str().unwrap()]));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("gamma_sharp,rank,u,evi,loss"));
    let row = lines.next().expect("one data row");
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields.len(), 5);
    let gamma: f64 = fields[0].parse().unwrap();
    let evi: f64 = fields[3].parse().unwrap();
    approx::assert_relative_eq!(evi, 1.0 / (2.0 * gamma), max_relative = 1e-12);
    assert!(lines.next().is_none(), "exactly one selection row");

    let profile = run(&[
        "select",
        "--input",
        path.to_str().unwrap(),
        "--strategy",
        "profile",
    ]);
    assert_eq!(profile.status.code(), Some(0));
    let bogus = run(&["select", "--input", path.to_str().unwrap(), "--strategy", "x"]);
    assert_eq!(bogus.status.code(), Some(1), "clap rejects unknown strategy");
}

#[test]
fn fit_and_qq_schemas_are_pinned() {
    // Simulated strict Pareto keeps excesses clustered near 1, which the
    // sampler needs; an exact geometric sequence would push it to ever
    // larger shapes until the excess terms underflow.
    let path = scratch("sp50.csv");
    let gen = run(&[
        "simulate",
        "--dist",
        "sp(gamma=1.5)",
        "--n",
        "50",
        "--seed",
        "8",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    let fit = stdout_of(&run(&[
        "fit",
        "--input",
        path.to_str().unwrap(),
        "--column",
        "value",
        "--rank",
        "40",
        "--seed",
        "2",
    ]));
    assert_eq!(
        fit.lines().next(),
        Some("rank,u,n_exceed,sp_gamma_hat,sp_evi,tlpa_alpha_hat,tlpa_gamma_hat,tlpa_evi")
    );
    assert_eq!(fit.lines().count(), 2);

    let qq = stdout_of(&run(&[
        "qq",
        "--input",
        path.to_str().unwrap(),
        "--column",
        "value",
        "--rank",
        "40",
        "--seed",
        "2",
    ]));
    assert_eq!(qq.lines().next(), Some("log_sorted_obs,log_q_sp,log_q_tlpa"));
    // Rank 40 of 50 observations leaves 10 exceedances.
    assert_eq!(qq.lines().count(), 1 + 10);
    // Observed column ascends: quantile pairs come in plotting order.
    let obs: Vec<f64> = qq
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(obs.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn hist_schema_and_marker() {
    let path = write_csv(
        "geo4.csv",
        "x",
        &(0..80).map(|i| 1.2_f64.powi(i)).collect::<Vec<_>>(),
    );
    let plain = stdout_of(&run(&[
        "hist",
        "--input",
        path.to_str().unwrap(),
        "--bins",
        "6",
    ]));
    assert_eq!(plain.lines().next(), Some("bin_left,bin_right,count,threshold"));
    assert_eq!(plain.lines().count(), 1 + 6);
    let mut total = 0_usize;
    for line in plain.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4);
        assert!(fields[3].is_empty(), "no marker without --mark-selected");
        total += fields[2].parse::<usize>().unwrap();
    }
    assert_eq!(total, 80, "every observation lands in some bin");

    let marked = stdout_of(&run(&[
        "hist",
        "--input",
        path.to_str().unwrap(),
        "--bins",
        "6",
        "--mark-selected",
    ]));
    let threshold_cells: Vec<&str> = marked
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap())
        .collect();
    assert!(threshold_cells.iter().all(|c| !c.is_empty()));
    let u: f64 = threshold_cells[0].parse().unwrap();
    assert!(u.is_finite() && u > 0.0);
}

#[test]
fn experiment_summary_and_raw_schemas() {
    let summary = stdout_of(&run(&[
        "experiment",
        "--preset",
        "table1",
        "--repetitions",
        "2",
        "--seed",
        "9",
    ]));
    let mut lines = summary.lines();
    assert_eq!(
        lines.next(),
        Some("repetitions,mean_rank,mean_u,mean_gamma_sharp,mean_evi,mean_loss")
    );
    let row = lines.next().expect("summary row");
    assert_eq!(row.split(',').next(), Some("2"));

    let raw = stdout_of(&run(&[
        "experiment",
        "--preset",
        "table1",
        "--repetitions",
        "2",
        "--seed",
        "9",
        "--raw",
    ]));
    let mut lines = raw.lines();
    assert_eq!(lines.next(), Some("rep,gamma_sharp,rank,u,evi,loss"));
    assert_eq!(lines.count(), 2);

    let case_raw = stdout_of(&run(&[
        "experiment",
        "--preset",
        "case1",
        "--repetitions",
        "1",
        "--seed",
        "3",
        "--raw",
    ]));
    assert_eq!(
        case_raw.lines().next(),
        Some("rep,rank,u,n_exceed,evi_sp,evi_tlpa,alpha_hat")
    );
}

// --------------------------------------------------------- determinism

#[test]
fn same_seed_same_bytes_simulate() {
    let args = ["simulate", "--dist", "tlpa(alpha=2,gamma=1)", "--n", "64", "--seed", "17"];
    let a = stdout_of(&run(&args));
    let b = stdout_of(&run(&args));
    assert_eq!(a, b);
    let c = stdout_of(&run(&[
        "simulate", "--dist", "tlpa(alpha=2,gamma=1)", "--n", "64", "--seed", "18",
    ]));
    assert_ne!(a, c, "different seed should change the draw");
}

#[test]
fn out_file_matches_stdout_bytes() {
    let path = scratch("mirror.csv");
    let args = ["simulate", "--dist", "burr(lambda=1,tau=2,eta=1)", "--n", "32", "--seed", "5"];
    let streamed = stdout_of(&run(&args));
    let out = bin()
        .args(args)
        .args(["--out", path.to_str().unwrap()])
        .output()
        .expect("binary should start");
    assert!(out.status.success());
    assert!(out.stdout.is_empty(), "data goes to the file, not stdout");
    let written = std::fs::read_to_string(&path).expect("out file should exist");
    assert_eq!(streamed, written);
}

#[test]
fn experiment_bytes_independent_of_thread_count() {
    let base = ["experiment", "--preset", "table2", "--repetitions", "2", "--seed", "6"];
    let serial = stdout_of(&bin().args(base).args(["--threads", "1"]).output().unwrap());
    let parallel = stdout_of(&bin().args(base).args(["--threads", "2"]).output().unwrap());
    let default = stdout_of(&run(&base));
    assert_eq!(serial, parallel);
    assert_eq!(serial, default);
}

#[test]
fn scan_bytes_reproducible() {
    let path = write_csv(
        "geo5.csv",
        "x",
        &(0..45).map(|i| 1.35_f64.powi(i)).collect::<Vec<_>>(),
    );
    let args = [
        "scan",
        "--input",
        path.to_str().unwrap(),
        "--min-rank",
        "35",
        "--max-rank",
        "40",
        "--seed",
        "12",
    ];
    assert_eq!(stdout_of(&run(&args)), stdout_of(&run(&args)));
}
