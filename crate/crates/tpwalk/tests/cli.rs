use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("../../data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tpwalk")).args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tpwalk"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn walk_three_three() {
    let v = json(&run(&["walk", &data("three_three.json"), "--format", "json", "--verify"]));
    assert_eq!(v["pivot_count"], 3);
    assert_eq!(v["hirsch_bound"], 4);
    assert_eq!(v["iteration_count"], 4);
    assert_eq!(v["terminal"], "terminal");
    for it in v["iterations"].as_array().unwrap() {
        assert_eq!(it["checks"]["uno"], "holds");
        assert_eq!(it["checks"]["sin"], true);
    }
}

#[test]
fn walk_table_mentions_pivots() {
    let out = run(&["walk", &data("three_three.json")]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("3 pivots"));
    assert!(text.contains("Hirsch bound 4"));
}

#[test]
fn walk_to_the_same_tree() {
    let v = json(&run(&["walk", &data("three_three.json"), "--final", "O", "--format", "json"]));
    assert_eq!(v["pivot_count"], 0);
}

#[test]
fn exhaustive_walks() {
    let v = json(&run(&["walk", &data("three_three.json"), "--exhaustive", "--format", "json"]));
    assert_eq!(v["min_pivots"], 3);
    assert_eq!(v["runs"].as_array().unwrap().len(), 6);
}

#[test]
fn walk_writes_a_replayable_trace() {
    let path = scratch("three_three.trace");
    let out = run(&["walk", &data("three_three.json"), "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, std::fs::read_to_string(data("three_three.trace")).unwrap());
}

#[test]
fn walk_rejects_missing_and_non_vertex_trees() {
    let out = run(&["walk", &data("three_three.json"), "--origin", "nope"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = r#"{"version": 1, "kind": "transportation", "supplies": [3, 3], "demands": [2, 2, 2],
        "trees": {"O": [[2, 1], [2, 2], [2, 3], [1, 1]], "F": [[1, 2], [1, 3], [2, 1], [2, 2]]}}"#;
    let out = run_stdin(&["walk", "-"], doc);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tree `O`"));
}

#[test]
fn analyze_five_three() {
    let v = json(&run(&["analyze", &data("five_three.json"), "--format", "json"]));
    assert_eq!(v["mu"], 1);
    assert_eq!(v["hirsch_bound"], 3);
    assert_eq!(v["dimension"], 2);
    assert_eq!(v["facet_count"], 5);
    assert_eq!(v["within_bound"], true);
}

#[test]
fn diameter_of_a_single_row() {
    let doc = r#"{"version": 1, "kind": "transportation", "supplies": [6], "demands": [1, 2, 3]}"#;
    let v = json(&run_stdin(&["diameter", "-", "--format", "json"], doc));
    assert_eq!(v["diameter"], 0);
}

#[test]
fn diameter_of_three_three() {
    let v = json(&run(&["diameter", &data("three_three.json"), "--format", "json"]));
    let d = v["diameter"].as_u64().unwrap();
    assert!((3..=4).contains(&d));
}

#[test]
fn analyze_budget_is_enforced() {
    let out = run(&["analyze", &data("three_three.json"), "--budget", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("spanning trees"));
}

#[test]
fn reduce_four_node_network() {
    let v = json(&run(&["reduce", &data("four_node_network.json"), "--format", "json"]));
    assert_eq!(v["supplies"], serde_json::json!([20, 25, 25, 20]));
    assert_eq!(v["demands"], serde_json::json!([10, 20, 5, 30, 15, 10]));
    assert_eq!(v["allowed_edges"].as_array().unwrap().len(), 12);
    assert_eq!(v["diameter_bound"], 9);
}

#[test]
fn reduce_single_arc_writes_a_document() {
    let path = scratch("single_arc_reduced.json");
    let out = run(&["reduce", &data("single_arc.json"), "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["kind"], "transportation");
    assert_eq!(doc["supplies"], serde_json::json!([1, 1]));
    assert_eq!(doc["demands"], serde_json::json!([2]));
}

#[test]
fn reduce_unbounded_network_fails() {
    let out = run(&["reduce", &data("infinite_cycle.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unbounded"));
}

#[test]
fn verify_golden_and_tampered_traces() {
    let out = run(&["verify", &data("three_three.trace"), &data("three_three.json")]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("PASS"));

    let tampered = std::fs::read_to_string(data("three_three.trace")).unwrap().replace("1 insert 1-3 1-2", "1 insert 1-3 1-1");
    let out = run_stdin(&["verify", "-", &data("three_three.json")], &tampered);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL(NotAdjacent"));
}

#[test]
fn gen_is_deterministic_and_walkable() {
    let a = run(&["gen", "--seed", "11", "--dims", "3x4"]);
    let b = run(&["gen", "--seed", "11", "--dims", "3x4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let doc = String::from_utf8(a.stdout).unwrap();
    let v = json(&run_stdin(&["walk", "-", "--verify", "--format", "json"], &doc));
    assert!(v["pivot_count"].as_u64().unwrap() <= v["hirsch_bound"].as_u64().unwrap());
}

#[test]
fn gen_network_reduces() {
    let out = run(&["gen", "--network", "--seed", "2", "--dims", "4x6", "--margin-bound", "9"]);
    assert!(out.status.success());
    let doc = String::from_utf8(out.stdout).unwrap();
    let red = run_stdin(&["reduce", "-"], &doc);
    assert!(red.status.success(), "{}", String::from_utf8_lossy(&red.stderr));
}

#[test]
fn sharp_search_reports_a_diameter() {
    let v = json(&run(&["sharp-search", "--dims", "3x4", "--seed", "1", "--max-instances", "20", "--format", "json"]));
    let d = v["best"]["diameter"].as_u64().unwrap();
    assert!(d <= 6);
    assert_eq!(v["target"], 6);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["walk"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "--dims", "three"]).status.code(), Some(2));
}

#[test]
fn parse_errors_are_domain_errors() {
    let out = run_stdin(&["analyze", "-"], "{\"version\": 1,\n \"kind\": \"transportation\",\n \"supplies\": [4, 3],\n \"demands\": [4, 2, 2]}");
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains("differs from total demand"), "{err}");
}
