use std::path::PathBuf;
use std::process::{Command, Output};

fn fractafold(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fractafold")).args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fractafold-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn spectrum_without_cutoff_is_a_usage_error() {
    let out = fractafold(&["spectrum", "--model", "tree"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--cutoff"));
}

#[test]
fn unknown_suite_is_rejected() {
    let out = fractafold(&["verify", "--suite", "nonsense"]);
    assert!(!out.status.success());
}

#[test]
fn single_suite_verify_reports_json() {
    let out = fractafold(&["verify", "--suite", "k4"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["suite"] == "k4"));
}

#[test]
fn spectrum_writes_csv_with_header() {
    let dir = scratch("spectrum");
    let out = fractafold(&["--out", dir.to_str().unwrap(), "spectrum", "--model", "ladder", "--cutoff", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut r = csv::Reader::from_path(dir.join("points.csv")).unwrap();
    assert_eq!(r.headers().unwrap(), vec!["value", "series", "m0", "lower"]);
    let rows: Vec<_> = r.records().map(|x| x.unwrap()).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|x| x[0].parse::<f64>().unwrap().is_finite()));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("spectrum.json")).unwrap()).unwrap();
    assert_eq!(json["points"].as_array().unwrap().len(), rows.len());
}

#[test]
fn data_dir_comes_from_environment() {
    let dir = scratch("env");
    let out = Command::new(env!("CARGO_BIN_EXE_fractafold"))
        .env("FRACTAFOLD_DATA_DIR", &dir)
        .args(["kernel", "--lambda", "2.5", "--radius", "4"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["within_1e-6"], true);
    assert!(dir.join("tree_kernel_2.5.csv").exists());
    assert!(dir.join("measure_density.csv").exists());
}

#[test]
fn e6_round_trip_is_exact() {
    let dir = scratch("e6");
    let out = fractafold(&["--out", dir.to_str().unwrap(), "--seed", "7", "e6"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["exact_round_trip"], true);
}

#[test]
fn bad_tolerance_is_rejected() {
    let out = fractafold(&["--tol", "-1", "julia"]);
    assert_eq!(out.status.code(), Some(2));
}
