use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::tempdir;

fn stablepave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stablepave")).args(args).env_remove("SRPAVE_TOL").output().expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_is_byte_identical_for_a_fixed_seed() {
    let dir = tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o = stablepave(&["gen", "--kind", "determinantal", "--n", "4", "--seed", "1", "--out", path_str(out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(json(&a)["n"], 4);
}

#[test]
fn spanning_trees_of_k4() {
    let o = stablepave(&["gen", "--kind", "ust", "--n", "4"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["n"], 6);
    let pmf = v["pmf"].as_array().unwrap();
    assert_eq!(pmf.len(), 16);
    assert!(pmf.iter().all(|e| e["set"].as_array().unwrap().len() == 3));
}

#[test]
fn independent_with_zero_marginals_is_the_empty_set() {
    let o = stablepave(&["gen", "--kind", "independent", "--n", "3", "--p", "0"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let pmf = v["pmf"].as_array().unwrap();
    assert_eq!(pmf.len(), 1);
    assert_eq!(pmf[0]["set"].as_array().unwrap().len(), 0);
    assert_eq!(pmf[0]["p"], 1.0);
}

#[test]
fn verify_size_law_passes_and_writes_csv() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("report.json");
    let csv = dir.path().join("report.csv");
    let o = stablepave(&[
        "verify", "--suite", "size-law", "--n", "6", "--count", "100", "--seed", "7", "--out", path_str(&out), "--csv",
        path_str(&csv),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&out);
    assert_eq!(v["passed"], 100);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["suites"][0]["suite"], "size-law");
    let mut rows = csv::Reader::from_path(&csv).unwrap();
    assert_eq!(rows.headers().unwrap().iter().collect::<Vec<_>>(), ["suite", "index", "seed", "kind", "n", "pass", "metric", "invariant"]);
    assert_eq!(rows.records().count(), 100);
}

#[test]
fn verify_all_suites_pass() {
    let o = stablepave(&["verify", "--count", "10", "--seed", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["suites"].as_array().unwrap().len(), 16);
    assert_eq!(v["failed"], 0);
}

#[test]
fn verify_is_deterministic_apart_from_timings() {
    let run = || {
        let o = stablepave(&["verify", "--suite", "entropy-bound", "--count", "20", "--seed", "11"]);
        let mut v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v.as_object_mut().unwrap().remove("runtime_ms");
        v
    };
    assert_eq!(run(), run());
}

#[test]
fn failures_exit_nonzero_with_invariant_ids() {
    // A tolerance far below rounding error makes the norm comparison fail.
    let o = Command::new(env!("CARGO_BIN_EXE_stablepave"))
        .args(["verify", "--suite", "matrix-paving", "--n", "6", "--count", "3"])
        .env("SRPAVE_TOL", "1e-300")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["failed"].as_u64().unwrap() > 0);
    let inst = v["suites"][0]["instances"].as_array().unwrap().iter().find(|i| i["pass"] == false).unwrap();
    assert_eq!(inst["failures"][0]["invariant"], "matrix-paving/norm-equals-maxroot");
}

#[test]
fn unknown_suite_is_an_error() {
    let o = stablepave(&["verify", "--suite", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown suite"));
}

#[test]
fn pave_matrix_from_file_matches_operator_norms() {
    let dir = tempdir().unwrap();
    let k = dir.path().join("K.json");
    std::fs::write(&k, r#"{"n": 3, "rows": [[0.25, 0.05, 0.0], [0.05, 0.2, 0.1], [0.0, 0.1, 0.25]]}"#).unwrap();
    let o = stablepave(&["pave-matrix", "--r", "2", "--in", path_str(&k)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["method"], "exhaustive");
    let parts: Vec<Vec<u64>> = serde_json::from_value(v["partition"].clone()).unwrap();
    let mut all: Vec<u64> = parts.concat();
    all.sort();
    assert_eq!(all, [0, 1, 2]);
    let roots: Vec<f64> = serde_json::from_value(v["per_part_maxroot"].clone()).unwrap();
    let norms: Vec<f64> = serde_json::from_value(v["norms"].clone()).unwrap();
    assert_eq!(roots.len(), parts.len());
    for (r, n) in roots.iter().zip(&norms) {
        assert!((r - n).abs() < 1e-8);
    }
    assert!(v["certified"].as_bool().unwrap());
}

#[test]
fn pave_matrix_with_four_parts() {
    let dir = tempdir().unwrap();
    let k = dir.path().join("K.json");
    let rows: Vec<Vec<f64>> = (0..5).map(|i| (0..5).map(|j| if i == j { 0.5 } else { 0.05 }).collect()).collect();
    std::fs::write(&k, serde_json::json!({"n": 5, "rows": rows}).to_string()).unwrap();
    let o = stablepave(&["pave-matrix", "--r", "4", "--alpha", "0.5", "--in", path_str(&k)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["partition"].as_array().unwrap().len() <= 4);
    assert!(v["certified"].as_bool().unwrap());
}

#[test]
fn pave_poly_two_stage() {
    let dir = tempdir().unwrap();
    let g = dir.path().join("g.json");
    std::fs::write(&g, r#"{"n": 2, "terms": [{"vars": [], "coeff": -0.25}, {"vars": [0, 1], "coeff": 1.0}]}"#).unwrap();
    let o = stablepave(&["pave-poly", "--method", "two-stage", "--r", "4", "--in", path_str(&g)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["method"], "two-stage");
    assert_eq!(v["lambda"], 1.0);
    assert_eq!(v["partition"].as_array().unwrap().len(), 2);
}

#[test]
fn sr_pave_reports_entropy_gaps_below_delta() {
    let dir = tempdir().unwrap();
    let proc = dir.path().join("proc.json");
    let o = stablepave(&["gen", "--kind", "determinantal", "--n", "5", "--seed", "2", "--out", path_str(&proc)]);
    assert!(o.status.success());
    let o = stablepave(&["sr-pave", "--delta", "0.2", "--in", path_str(&proc)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let gaps: Vec<f64> = serde_json::from_value(v["entropy_gaps"].clone()).unwrap();
    assert_eq!(gaps.len(), v["partition"].as_array().unwrap().len());
    assert!(gaps.iter().all(|&g| g < 0.2));
}

#[test]
fn invalid_parameters_are_rejected() {
    assert_eq!(stablepave(&["verify", "--count", "0"]).status.code(), Some(2));
    assert_eq!(stablepave(&["pave-matrix", "--alpha", "1.5"]).status.code(), Some(2));
    assert_eq!(stablepave(&["gen", "--kind", "ust", "--n", "7"]).status.code(), Some(2));
}
