use std::path::Path;
use std::process::{Command, Output};

use qufti::exact::q_conjecture;
use qufti::output::{read_csv, CSV_HEADER};

fn qufti(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qufti"))
        .args(args)
        .env_remove("QUFTI_WORKERS")
        .output()
        .expect("run qufti")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn conjecture_at_zero_gradient_prints_one() {
    let out = qufti(&["conjecture", "--M", "100", "--phi", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "1.0\n");
}

#[test]
fn exact_matches_conjecture() {
    let out = qufti(&["exact", "--M", "6", "--phi", "0.05"]);
    assert_eq!(out.status.code(), Some(0));
    let value: f64 = stdout(&out).trim().parse().unwrap();
    let expected = q_conjecture(6, 0.05).unwrap();
    assert!((value - expected).abs() < 1e-9 * expected, "{value} vs {expected}");
}

#[test]
fn exact_refuses_beyond_ryser_limit() {
    let out = qufti(&["exact", "--M", "31", "--phi", "0"]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.contains("30") && err.contains("31"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = qufti(&["exact", "--M", "4", "--phi", "0", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("Usage"));
}

#[test]
fn invalid_combinations_exit_one() {
    for args in [
        &["estimate", "--M", "6", "--N", "4", "--phi", "0.1", "--method", "qcp"][..],
        &["estimate", "--M", "6", "--phi", "0.1", "--method", "bogus"],
        &["estimate", "--M", "6", "--phi", "0.1", "--L1", "1"],
        &["conjecture", "--M", "6", "--phi", "0.1", "--noise-sigma", "0.1"],
        &["fringe", "--M", "6", "--format", "xml"],
        &["estimate", "--M", "6", "--phi", "0.1", "--seed", "-3"],
    ] {
        let out = qufti(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", stderr(&out));
        assert!(stderr(&out).starts_with("error:"), "{args:?}");
    }
}

#[test]
fn unwritable_output_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let out = qufti(&["fringe", "--M", "4", "--method", "conjecture", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn bad_worker_env_exits_one() {
    let out = Command::new(env!("CARGO_BIN_EXE_qufti"))
        .args(["conjecture", "--M", "4", "--phi", "0"])
        .env("QUFTI_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("QUFTI_WORKERS"));
}

#[test]
fn estimate_row_carries_resolved_config() {
    let out = qufti(&["estimate", "--M", "8", "--phi", "0.05", "--L1", "10", "--L2", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let records = read_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(records.len(), 1);
    let r = &records[0];
    assert_eq!(r.method.as_str(), "qcp");
    assert_eq!((r.m, r.n, r.d, r.l1, r.l2, r.realizations), (8, 8, 2, 10, 200, 1));
    assert_eq!(r.seed, qufti::rng::DEFAULT_SEED);
    assert!(r.wall_time.is_none());

    let out = qufti(&["estimate", "--M", "8", "--N", "5", "--phi", "0.05", "--L1", "10", "--L2", "200"]);
    let r = &read_csv(out.stdout.as_slice()).unwrap()[0];
    assert_eq!((r.method.as_str(), r.n, r.r), ("vcp", 5, 0.8));
}

#[test]
fn random_seed_is_recorded() {
    let out = qufti(&["estimate", "--M", "4", "--phi", "0", "--L1", "2", "--L2", "10", "--seed", "random"]);
    assert_eq!(out.status.code(), Some(0));
    let seed = read_csv(out.stdout.as_slice()).unwrap()[0].seed;
    let again = qufti(&[
        "estimate",
        "--M",
        "4",
        "--phi",
        "0",
        "--L1",
        "2",
        "--L2",
        "10",
        "--seed",
        &seed.to_string(),
    ]);
    assert_eq!(stdout(&out), stdout(&again));
}

#[test]
fn fringe_default_grid_and_formats() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("f.csv");
    let out = qufti(&["fringe", "--M", "6", "--method", "exact", "--points", "5", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    let records = read_csv(text.as_bytes()).unwrap();
    let phis: Vec<f64> = records.iter().map(|r| r.phi).collect();
    let edge = std::f64::consts::PI / 6.0;
    assert_eq!(phis.len(), 5);
    assert!((phis[0] + edge).abs() < 1e-15 && (phis[4] - edge).abs() < 1e-15);
    assert!((records[2].q_mean - 1.0).abs() < 1e-12);

    let out = qufti(&["fringe", "--M", "6", "--method", "exact", "--phis", "0,0.1", "--format", "jsonl"]);
    let lines: Vec<serde_json::Value> = stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["Q_normalized"], 1.0);
    assert_eq!(lines[1]["phi"], 0.1);
}

#[test]
fn sweeps_emit_one_row_per_setting() {
    let out = qufti(&[
        "noise-sweep",
        "--M",
        "4",
        "--phis",
        "-0.1,0,0.1",
        "--noise-levels",
        "0,0.2",
        "--realizations",
        "3",
        "--L1",
        "4",
        "--L2",
        "50",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let records = read_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(records.len(), 6);
    assert!(records.iter().all(|r| r.realizations == 3));
    assert_eq!(records[3].noise_sigma, 0.2);

    let out = qufti(&["r-sweep", "--M", "5", "--phi", "0.05", "--r-grid", "0.1,0.4,0.9", "--L1", "4", "--L2", "100"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let records = read_csv(out.stdout.as_slice()).unwrap();
    let radii: Vec<f64> = records.iter().map(|r| r.r).collect();
    assert_eq!(radii, [0.1, 0.4, 0.9]);
    assert!(records.iter().all(|r| r.method.as_str() == "vcp"));
}

#[test]
fn record_timing_fills_wall_time() {
    let out = qufti(&["estimate", "--M", "4", "--phi", "0", "--L1", "2", "--L2", "10", "--record-timing"]);
    let r = &read_csv(out.stdout.as_slice()).unwrap()[0];
    assert!(r.wall_time.is_some_and(|t| t >= 0.0));
}

fn fringe_to(path: &Path, m: &str, points: &str, l1: &str, l2: &str, workers: &str) {
    let out = qufti(&[
        "fringe",
        "--method",
        "qcp",
        "--M",
        m,
        "--points",
        points,
        "--L1",
        l1,
        "--L2",
        l2,
        "--seed",
        "7",
        "--workers",
        workers,
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn fringe_output_is_byte_identical_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    fringe_to(&a, "12", "9", "20", "500", "1");
    fringe_to(&b, "12", "9", "20", "500", "3");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
#[ignore = "paper-scale: two 41-point M=100 scans"]
fn paper_scale_fringe_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    fringe_to(&a, "100", "41", "200", "10000", "1");
    fringe_to(&b, "100", "41", "200", "10000", "2");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
