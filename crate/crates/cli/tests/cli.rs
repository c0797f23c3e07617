use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_atiyah4"))
        .current_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/../.."))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn error_kind(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    v["error"]["kind"].as_str().unwrap().to_string()
}

#[test]
fn collinear_verifies_with_unit_measure() {
    let out = run(&["--no-meta", "--input", "data/collinear.json", "verify"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["command"], "verify");
    assert!((v["result"]["measure"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["result"]["pass"], true);
}

#[test]
fn point_outside_the_ball_is_an_input_error() {
    let out = run(&["--input", "data/outside.json", "verify"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    assert_eq!(error_kind(&out), "invalid_input");
}

#[test]
fn unknown_flag_is_an_input_error() {
    let out = run(&["--bogus", "verify"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_kind(&out), "invalid_input");
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn axis_endpoints_from_the_origin() {
    let out = run(&["--no-meta", "--input", "data/axes.json", "endpoints"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let eps = v["result"]["endpoints"].as_array().unwrap();
    assert_eq!(eps.len(), 12);
    let e12 = eps.iter().find(|e| e["i"] == 1 && e["j"] == 2).unwrap();
    // from the origin toward 0.3 e_x the ray ends at e_x, whose chart value is 1
    assert_eq!(e12["ideal"], serde_json::json!([1.0, 0.0, 0.0]));
    assert_eq!(e12["affine"], serde_json::json!([1.0, 0.0]));
}

#[test]
fn inline_json_input_is_accepted() {
    let cfg = r#"{"points": [[0,0,-0.6],[0,0,-0.2],[0,0,0.3],[0,0,0.7]]}"#;
    let out = run(&["--no-meta", "--input", cfg, "matrix"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((json(&out)["result"]["measure"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn output_without_meta_is_byte_identical() {
    let args = ["--no-meta", "--seed", "7", "--count", "20", "sample"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn meta_carries_the_version() {
    let v = json(&run(&["--input", "data/collinear.json", "verify"]));
    assert_eq!(v["meta"]["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn tetrahedron_certificate_passes_without_nulls() {
    let out = run(&["--no-meta", "--input", "data/tetrahedron.json", "certify"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(!text.contains("null"));
    assert_eq!(json(&out)["result"]["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true), true);
}

#[test]
fn batch_csv_histogram_accounts_for_every_sample() {
    let out = run(&["--no-meta", "--count", "200", "--format", "csv", "batch"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(rdr.headers().unwrap(), vec!["lower", "upper", "count"]);
    let total: u64 = rdr.records().map(|r| r.unwrap()[2].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 200);
}

#[test]
fn batch_jsonl_ends_with_a_summary() {
    let out = run(&["--no-meta", "--count", "10", "--format", "jsonl", "batch"]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<Value> =
        String::from_utf8(out.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 12);
    assert_eq!(lines[11]["summary"]["count"], 10);
}

#[test]
fn oracle_agrees_on_samples() {
    let out = run(&["--no-meta", "--count", "25", "oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["agree"], true);
    assert_eq!(v["result"]["pairs"], 300);
}

#[test]
fn minimize_is_reproducible() {
    let args = ["--no-meta", "--seed", "3", "minimize", "--restarts", "2", "--iterations", "50"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a)["result"]["best_measure"].as_f64().unwrap() > 0.0);
}

#[test]
fn output_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = run(&["--no-meta", "--input", "data/collinear.json", "--output", path.to_str().unwrap(), "verify"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["result"]["pass"], true);
}
