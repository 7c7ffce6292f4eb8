use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const DBL: &str = "[system]\nA = [[0.0, 1.0], [0.0, 0.0]]\nB = [[0.0], [1.0]]\n";

fn handsoff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_handsoff")).args(args).output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn run(cmd: &str, body: &str, extra: &[&str]) -> (i32, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), body);
    let out = dir.path().join("out");
    let mut args = vec![cmd, "--config", &cfg, "--output", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let res = handsoff(&args);
    (res.status.code().unwrap(), dir)
}

fn dbl_config(x0: &str, horizon: f64, steps: usize, penalty: &str) -> String {
    format!("T = {horizon}\nN = {steps}\nx0 = {x0}\n{DBL}\n{penalty}\n[dca]\nwarm_start = \"l1\"\n")
}

const L1L2: &str = "[penalty]\nkind = \"l1l2\"\nlambda = 0.1\n";

#[test]
fn solve_writes_trajectory_and_summary() {
    let (code, dir) = run("solve", &dbl_config("[1.0, -1.0]", 5.0, 200, L1L2), &[]);
    assert_eq!(code, 0);
    let out = dir.path().join("out");
    let csv = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,u_1,x_1,x_2");
    assert_eq!(lines.len(), 202);
    assert!(lines[201].split(',').nth(1).unwrap().is_empty());

    let summary: Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["penalty"], "l1l2 lambda=0.1");
    assert!((summary["l0"].as_f64().unwrap() - 1.0).abs() <= 0.05);
    assert_eq!(summary["certificate"]["passed"], true);
    assert!(summary["lp_solves"].as_u64().unwrap() <= 10);
    assert!(summary["wall_time_s"].as_f64().is_some());
}

#[test]
fn solve_penalty_and_warm_start_overrides() {
    let (code, dir) = run(
        "solve",
        &dbl_config("[1.0, -1.0]", 5.0, 200, L1L2),
        &["--penalty", "scad lambda=0.25 alpha=3", "--warm-start", "zero"],
    );
    assert_eq!(code, 0);
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["penalty"], "scad lambda=0.25 alpha=3");
    assert_eq!(summary["warm_start"], "zero");
}

#[test]
fn zero_state_is_trivial() {
    let (code, dir) = run("solve", &dbl_config("[0.0, 0.0]", 5.0, 50, L1L2), &[]);
    assert_eq!(code, 0);
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["l0"], 0.0);
    assert!(summary["iterations"].as_u64().unwrap() <= 2);
}

#[test]
fn exit_codes() {
    assert_eq!(run("solve", &dbl_config("[100.0, 0.0]", 1.0, 50, L1L2), &[]).0, 2);
    assert_eq!(run("solve", "T = 1.0\n", &[]).0, 1);
    let bad = "[penalty]\nkind = \"l1l2\"\nlambda = 1.0\n";
    assert_eq!(run("solve", &dbl_config("[1.0, -1.0]", 5.0, 50, bad), &[]).0, 4);
    let big = format!("T = 1.0\nN = 20\nx0 = [1.0]\n[system]\nA = [[-1.0]]\nB = [[1.0]]\n{L1L2}");
    assert_eq!(run("oracle", &big, &[]).0, 5);
    assert_eq!(run("solve", &dbl_config("[1.0, -1.0]", 5.0, 50, L1L2), &["--penalty", "mcp alpha=-1"]).0, 1);
}

#[test]
fn validate_reports() {
    let ok = handsoff(&["validate", "mcp lambda=1 alpha=0.5"]);
    assert_eq!(ok.status.code(), Some(0));
    let rep: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(rep["passed"], true);

    let bad = handsoff(&["validate", "--penalty", "capped_l1 lambda=0.8 alpha=1.0"]);
    assert_eq!(bad.status.code(), Some(4));
    let rep: Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert_eq!(rep["violated"][0], "A3");

    assert_eq!(handsoff(&["validate", "scad lambda=1.5 alpha=3"]).status.code(), Some(1));
}

#[test]
fn compare_keeps_going_past_a_bad_row() {
    let penalties = "[[penalty]]\nkind = \"mcp\"\nlambda = 1.0\nalpha = 0.5\n\n\
                     [[penalty]]\nkind = \"l1l2\"\nlambda = 1.0\n\n\
                     [[penalty]]\nkind = \"lp\"\np = 0.5\nlambda = 0.8\n";
    let (code, dir) = run("compare", &dbl_config("[1.0, -1.0]", 5.0, 200, penalties), &[]);
    assert_eq!(code, 0);
    let out = dir.path().join("out");
    let table = fs::read_to_string(out.join("comparison.csv")).unwrap();
    let rows: Vec<&str> = table.lines().collect();
    assert_eq!(rows.len(), 5);
    assert!(rows[1].starts_with("l1,ok,"));
    assert!(rows[2].starts_with("mcp lambda=1 alpha=0.5,ok,") && rows[2].ends_with(",pass"));
    assert!(rows[3].starts_with("l1l2 lambda=1,error"));
    assert!(rows[4].starts_with("lp lambda=0.8 p=0.5,ok,"));
    assert!(out.join("trajectory_l1.csv").exists());
    assert!(out.join("trajectory_1_mcp.csv").exists());
    assert!(out.join("trajectory_3_lp.csv").exists());
}

#[test]
fn oracle_brute_force_on_planted_instance() {
    let body = format!(
        "T = 4.0\nN = 8\n{DBL}\n[[penalty]]\nkind = \"mcp\"\nlambda = 1.0\nalpha = 0.5\n\n\
         [oracle]\nplanted = [0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0]\n"
    );
    let (code, dir) = run("oracle", &body, &[]);
    assert_eq!(code, 0);
    let rep: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/oracle.json")).unwrap()).unwrap();
    assert_eq!(rep["mode"], "brute_force");
    assert!(rep["oracle_min_l0"].as_f64().unwrap() <= 1.0 + 1e-12);
    assert!(rep["agreement_rate"].as_f64().is_some());
}

#[test]
fn oracle_certificate_mode_for_long_horizons() {
    let (code, dir) = run("oracle", &dbl_config("[1.0, -1.0]", 5.0, 200, L1L2), &[]);
    assert_eq!(code, 0);
    let rep: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/oracle.json")).unwrap()).unwrap();
    assert_eq!(rep["mode"], "certificate");
    assert_eq!(rep["agreement_rate"], 1.0);
}

#[test]
fn random_planting_follows_seed() {
    let body = format!(
        "T = 4.0\nN = 8\n{DBL}\n{L1L2}\n[oracle]\nplanted_support = 2\n"
    );
    let read = |seed: &str| {
        let (code, dir) = run("oracle", &body, &["--seed", seed]);
        assert_eq!(code, 0);
        let rep: Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("out/oracle.json")).unwrap()).unwrap();
        rep["x0"].clone()
    };
    assert_eq!(read("4"), read("4"));
    assert_ne!(read("4"), read("5"));
}
