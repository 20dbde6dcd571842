use std::path::Path;

use clap::Parser;
use serde_json::Value;

use crate::config::Cli;
use crate::run;

fn mixlap(args: &[&str], out: &Path) -> (i32, Value) {
    let argv = ["mixlap"]
        .iter()
        .chain(args)
        .copied()
        .chain(["--out", out.to_str().unwrap()]);
    let code = run(Cli::try_parse_from(argv).expect("arguments parse"));
    let record: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("run.json")).unwrap()).unwrap();
    (code, record)
}

#[test]
fn kernel_bounds_pass() {
    let dir = tempfile::tempdir().unwrap();
    let (code, rec) = mixlap(
        &["verify", "kernel-bounds", "--n", "4", "--s", "0.5"],
        dir.path(),
    );
    assert_eq!(code, 0);
    assert_eq!(rec["result"]["pass"], true);
    assert_eq!(rec["status"], "ok");
}

#[test]
fn bad_order_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, rec) = mixlap(&["solve", "--s", "1.2"], dir.path());
    assert_eq!(code, 2);
    assert!(rec["error"]["message"]
        .as_str()
        .unwrap()
        .contains("s = 1.2 out of (0,1)"));
    assert!(rec["config"].is_null());
}

#[test]
fn subcritical_power_bound() {
    let dir = tempfile::tempdir().unwrap();
    let (code, rec) = mixlap(&["solve", "--n", "4", "--p", "5"], dir.path());
    assert_eq!(code, 2);
    assert_eq!(rec["error"]["kind"], "ConstraintViolation");
    assert!(rec["error"]["message"]
        .as_str()
        .unwrap()
        .contains("2*-1 = 3"));
}

#[test]
fn malformed_config_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, "{\n  \"n\": 4,\n  \"lambda\": oops\n}").unwrap();
    let (code, rec) = mixlap(
        &["solve", "--config", cfg.to_str().unwrap()],
        &dir.path().join("o"),
    );
    assert_eq!(code, 2);
    assert_eq!(rec["error"]["kind"], "ParseError");
    assert!(rec["error"]["message"].as_str().unwrap().contains(":3:"));
    std::fs::write(&cfg, "{\"lamda\": 0.1}").unwrap();
    let (code, rec) = mixlap(
        &["solve", "--config", cfg.to_str().unwrap()],
        &dir.path().join("o"),
    );
    assert_eq!(code, 2);
    assert!(rec["error"]["message"].as_str().unwrap().contains("lamda"));
}

#[test]
fn missing_input_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let (code, rec) = mixlap(&["analyze", "decay"], dir.path());
    assert_eq!(code, 2);
    assert!(rec["error"]["message"]
        .as_str()
        .unwrap()
        .contains("--input"));
    let (code, rec) = mixlap(&["solve", "--config", "/nonexistent.json"], dir.path());
    assert_eq!(code, 2);
    assert_eq!(rec["error"]["kind"], "MissingFile");
}

#[test]
fn kernel_profiles_match_grid() {
    let dir = tempfile::tempdir().unwrap();
    let (code, rec) = mixlap(
        &[
            "kernel",
            "heat",
            "--n",
            "3",
            "--grid-size",
            "64",
            "--time",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(code, 0);
    assert_eq!(rec["files"][0], "heat_t1.csv");
    let csv = std::fs::read_to_string(dir.path().join("heat_t1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 65);
    let side: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("heat_t1.json")).unwrap())
            .unwrap();
    assert_eq!(side["rows"], 64);
    assert!((rec["result"]["profiles"][0]["mass"].as_f64().unwrap() - 1.0).abs() < 1e-4);
}

#[test]
fn manufactured_solve_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let (code, rec) = mixlap(&["solve", "--h", "manufactured"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(rec["result"]["report"]["converged"], true);
    assert!(rec["result"]["manufactured_error"].as_f64().unwrap() < 1e-6);
    let input = dir.path().join("u.bin");
    let (code, rec) = mixlap(
        &["analyze", "decay", "--input", input.to_str().unwrap()],
        &dir.path().join("a"),
    );
    assert_eq!(code, 0);
    let slope = rec["result"]["slope"].as_f64().unwrap();
    assert!((-5.5..=-2.5).contains(&slope), "{slope}");
}

#[test]
fn stalled_solve_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let (code, rec) = mixlap(
        &[
            "solve", "--n", "4", "--s", "0.5", "--p", "1", "--lambda", "0.05", "--h", "gaussian",
        ],
        dir.path(),
    );
    assert_eq!(code, 3);
    assert_eq!(rec["error"]["kind"], "NotConverged");
    assert_eq!(rec["result"]["report"]["converged"], false);
    assert!(rec["result"]["report"]["qualitative"].is_object());
}
