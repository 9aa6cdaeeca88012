use std::io::Write;
use std::process::{Command, Output};

use mtorus_cli::{AnalyzeReport, SolveReport, VerifyEnvelope};
use serde_json::Value;
use tempfile::NamedTempFile;

fn problem(ext: &str, body: &str) -> NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(ext).tempfile().unwrap();
    f.write_all(body.as_bytes()).unwrap();
    f
}

fn mtorus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtorus")).args(args).output().unwrap()
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let out = mtorus(args);
    let stdout = String::from_utf8(out.stdout).unwrap();
    (out.status.code().unwrap(), serde_json::from_str(&stdout).unwrap_or(Value::Null))
}

const REFLECTION: &str = "A = [[1, 0], [0, 1]]\nB = [[1, 0], [0, -1]]\nc1 = 1\nc2 = 0\nn = 6\n";

#[test]
fn analyze_reflection_is_not_realizable() {
    let f = problem(".toml", REFLECTION);
    let path = f.path().to_str().unwrap();
    let (code, v) = run_json(&["analyze", "--input", path, "--json"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], "mtorus.analyze/1");
    assert_eq!(v["classification"]["case_tag"], "II");
    let rows: Vec<(u64, bool)> = v["deformability"]["divisors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["k"].as_u64().unwrap(), r["deformable"].as_bool().unwrap()))
        .collect();
    assert_eq!(rows, vec![(1, false), (2, true), (3, false), (6, true)]);
    assert_ne!(v["deformability"]["realizable"]["verdict"], "realizable");
    let report: AnalyzeReport = serde_json::from_value(v.clone()).unwrap();
    assert_eq!(serde_json::to_value(&report).unwrap(), v);

    let text = mtorus(&["analyze", "--input", path]);
    assert!(String::from_utf8(text.stdout).unwrap().contains("case II"));
}

#[test]
fn analyze_n_override() {
    let f = problem(".toml", REFLECTION);
    let (code, v) = run_json(&["analyze", "-i", f.path().to_str().unwrap(), "--n", "2", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(v["nielsen"].as_array().unwrap().len(), 2);
}

#[test]
fn non_commuting_pair_exits_two() {
    let f = problem(".json", r#"{"A": [[1, 1], [0, 1]], "B": [[1, 0], [0, 2]], "c1": 1, "c2": 1, "n": 1}"#);
    let out = mtorus(&["analyze", "--input", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stdout).unwrap().contains("VIOLATION"));
    let out = mtorus(&["solve", "--input", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("not a homomorphism"));
}

#[test]
fn malformed_files_exit_two() {
    let f = problem(".json", "{\"A\": [[1, 0], [0, 1]],\n \"B\": ");
    let out = mtorus(&["analyze", "--input", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line"));
    let out = mtorus(&["analyze", "--input", "/nonexistent/problem.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_default_witness_is_proven_empty() {
    let f = problem(".toml", "A = [[1, 0], [0, 1]]\nB = [[1, 0], [0, -1]]\nc1 = 0\nc2 = 0\nn = 2\n");
    let (code, v) = run_json(&["solve", "--input", f.path().to_str().unwrap(), "--json"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], "mtorus.solve/1");
    assert_eq!(v["outcome"]["verdict"], "proven_empty");
    assert_eq!(v["window_check"]["consistent"], true);
    let report: SolveReport = serde_json::from_value(v.clone()).unwrap();
    assert_eq!(serde_json::to_value(&report).unwrap(), v);
}

#[test]
fn solve_reflection_with_sqrt2_has_exact_solution() {
    let f = problem(".toml", "A = [[1, 0], [0, 1]]\nB = [[1, 0], [0, -1]]\nc1 = 1\nc2 = 0\nn = 2\n");
    let (code, v) = run_json(&["solve", "-i", f.path().to_str().unwrap(), "--eps", "sqrt2", "--delta", "0", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(v["outcome"]["verdict"], "solution");
    assert_eq!(v["window_check"]["consistent"], true);
}

#[test]
fn solve_rejects_non_descending_delta() {
    let f = problem(".toml", "A = [[1, 1], [0, 1]]\nB = [[1, 2], [0, 1]]\nc1 = 1\nc2 = 1\nn = 1\n");
    let out = mtorus(&["solve", "-i", f.path().to_str().unwrap(), "--eps", "0", "--delta", "1/2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().to_lowercase().contains("does not descend"));
}

#[test]
fn solve_case_one_rational_translation() {
    let f = problem(".json", r#"{"A": [[1, 0], [0, 1]], "B": [[1, 0], [0, 1]], "c1": 0, "c2": 0, "n": 3, "eps": "1/3", "delta": "1/2"}"#);
    let (code, v) = run_json(&["solve", "-i", f.path().to_str().unwrap(), "--json"]);
    assert_eq!(code, 0);
    assert_eq!(v["case"], "I");
    assert_eq!(v["outcome"]["verdict"], "proven_empty");
    let (code, v) = run_json(&["solve", "-i", f.path().to_str().unwrap(), "--n", "6", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(v["outcome"]["verdict"], "solution");
}

#[test]
fn verify_passes_and_zero_trials_is_empty() {
    let (code, v) = run_json(&["verify", "--seed", "1", "--trials", "100", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], "mtorus.verify/1");
    assert_eq!(v["passed"], true);
    let env: VerifyEnvelope = serde_json::from_value(v.clone()).unwrap();
    assert_eq!(serde_json::to_value(&env).unwrap(), v);

    let (code, v) = run_json(&["verify", "--trials", "0", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(v["checks"], 0);
    let out = mtorus(&["verify", "--trials", "5"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("PASS"));
}
