use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use entloc::haar::SweepRow;
use entloc::io::{read_csv, write_state};
use entloc::spin_chain::IsingRow;
use entloc::StateVector;
use serde_json::Value;

fn entloc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entloc")).args(args).output().expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = entloc(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn write_path7(dir: &Path) -> String {
    let p = dir.join("path7.txt");
    fs::write(&p, "7\n0 1\n1 2\n2 3\n3 4\n4 5\n5 6\n").unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn measure_ghz_ntangle() {
    let v = json_ok(&["measure", "--preset", "ghz:4", "--kind", "ntangle"]);
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["seed"], 0);
    assert_eq!(v["config"]["command"]["measure"]["state"]["preset"], "ghz:4");
}

#[test]
fn measure_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ghz4.json");
    write_state(&path, &StateVector::ghz(4).unwrap()).unwrap();
    let v = json_ok(&["measure", "--state", path.to_str().unwrap(), "--kind", "ntangle"]);
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn graph_check_path7() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_path7(dir.path());
    let v = json_ok(&["graph", "check", "--graph", &g, "--measured", "1,3,5"]);
    assert_eq!(v["solvable"], true);
    assert_eq!(v["x"], serde_json::json!([1, 0, 1]));
    assert_eq!(v["fast_path"], Value::Null);
    assert_eq!(v["measured"]["one_based"], serde_json::json!([2, 4, 6]));
    let w = json_ok(&["--one-based", "graph", "check", "--graph", &g, "--measured", "2,4,6"]);
    assert_eq!(w["x"], v["x"]);
}

#[test]
fn graph_check_shortcut_and_unsolvable() {
    let dir = tempfile::tempdir().unwrap();
    // square 0-1-2-3 with pendant 4 on vertex 0, measuring the pendant
    let p = dir.path().join("g.txt");
    fs::write(&p, "5\n0 1\n1 2\n2 3\n3 0\n0 4\n").unwrap();
    let v = json_ok(&["graph", "check", "--graph", p.to_str().unwrap(), "--measured", "4"]);
    assert_eq!(v["solvable"], false);
    assert_eq!(v["x"], Value::Null);
    assert_eq!(v["fast_path"], "neighbor_free");
}

#[test]
fn graph_ce_path() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p9.txt");
    fs::write(&p, "9\n0 1\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n7 8\n").unwrap();
    let v = json_ok(&["graph", "ce", "--graph", p.to_str().unwrap(), "--s", "3,4,5"]);
    assert!((v["value"].as_f64().unwrap() - 0.5625).abs() < 1e-12);
}

#[test]
fn bounds_are_ordered() {
    let v = json_ok(&["bounds", "--preset", "haar:4", "--seed", "3", "--measured", "0,1", "--kind", "ce", "--s", "2,3"]);
    let (ub, lb) = (v["ub"].as_f64().unwrap(), v["lb"].as_f64().unwrap());
    assert!(ub >= lb && lb >= 0.0);
}

#[test]
fn localize_respects_upper_bound() {
    let v = json_ok(&["localize", "--preset", "haar:5", "--measured", "0", "--kind", "ntangle", "--swarm", "12", "--iterations", "30"]);
    let lme = v["lme"].as_f64().unwrap();
    assert!(lme <= v["mea_tau"].as_f64().unwrap() + 1e-8);
    assert_eq!(v["angles"].as_array().unwrap().len(), 1);
}

#[test]
fn weighted_commands() {
    let v = json_ok(&["weighted", "protocol", "--pairs", "3", "--phi", "3.141592653589793"]);
    assert!((v["avg_tau"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("edge.txt");
    fs::write(&p, "2\n0 1\n").unwrap();
    let d = json_ok(&["weighted", "distance", "--graph", p.to_str().unwrap(), "--phi", "3.141592653589793", "--chi", "0"]);
    assert!((d["trace_distance"].as_f64().unwrap() - 3f64.sqrt()).abs() < 1e-12);
}

#[test]
fn haar_sweep_csv_is_reproducible_and_parseable() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let args = [
            "haar", "sweep", "--n-a", "1", "--n-b", "3", "--samples", "6", "--kind", "gme", "--swarm", "8", "--iterations", "15",
            "--seed", "11", "--threads", threads, "--out", path.to_str().unwrap(),
        ];
        let out = entloc(&args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        fs::read(path).unwrap()
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "3");
    assert_eq!(a, b);
    let rows: Vec<SweepRow> = read_csv(a.as_slice()).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.lb <= r.lme && r.lme <= r.ub + 1e-8 && r.seconds == 0.0));
}

#[test]
fn haar_sweep_json_format() {
    let v = json_ok(&["haar", "sweep", "--n-a", "1", "--n-b", "2", "--samples", "2", "--kind", "ntangle", "--mode", "computational", "--format", "json"]);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn haar_moments_report_closed_forms() {
    let v = json_ok(&["haar", "moments", "--n-a", "2", "--n-b", "2", "--samples", "500"]);
    let m = v["moments"].as_array().unwrap();
    assert_eq!(m[0]["name"], "purity");
    assert!((m[0]["expected"].as_f64().unwrap() - 8.0 / 17.0).abs() < 1e-15);
}

#[test]
fn ising_sweep_csv() {
    let out = entloc(&["ising", "sweep", "--sites", "4", "--points", "2", "--j-max", "1", "--swarm", "8", "--iterations", "10"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: Vec<IsingRow> = read_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!((rows[0].energy + 4.0).abs() < 1e-10);
    assert!(rows[1].lme_tau.unwrap() <= rows[1].mea_tau.unwrap() + 1e-8);
    assert!(rows[0].lme_ce.is_none());
}

#[test]
fn validation_errors_exit_with_two() {
    for args in [
        &["measure", "--preset", "ghz:4", "--kind", "ce"][..],
        &["measure", "--preset", "nope:3", "--kind", "ntangle"],
        &["measure", "--preset", "ghz:30", "--kind", "ntangle"],
        &["measure", "--state", "/nonexistent.json", "--kind", "ntangle"],
        &["bounds", "--preset", "ghz:4", "--measured", "0,9", "--kind", "ntangle"],
        &["measure", "--preset", "ghz:3", "--kind", "ntangle", "--format", "csv"],
        &["frobnicate"],
    ] {
        let out = entloc(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}
