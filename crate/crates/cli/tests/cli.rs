use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(rel)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rigcount"))
        .args(args)
        .env_remove("RIGIDITY_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

#[test]
fn rigid_reports_and_exit_codes() {
    let out = run(&["rigid", "--d", "2", &data("graphs/k4.edges"), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["rigid"], true);
    assert_eq!(v["minimal"], false);

    let out = run(&["rigid", "--d", "3", &data("graphs/doublebanana.edges"), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["rigid"], false);

    let out = run(&["rigid", "--d", "2", &data("graphs/c4.edges")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("flexible"));
}

#[test]
fn errors_carry_a_reason() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("loop.edges");
    std::fs::write(&bad, "2; 0 0").unwrap();
    let out = run(&["rigid", bad.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["reason"], "loop_edge");

    let out = run(&["count", "--d", "2", &data("graphs/c4.edges"), "--json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["reason"], "not_rigid");

    let out = run(&["count", "--d", "2", &data("graphs/prism_g2.edges"), "--path-cap", "4", "--json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["reason"], "path_budget_exceeded");

    // without --json the report stream stays empty and the reason goes to stderr
    let out = run(&["count", &data("graphs/c4.edges")]);
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not_rigid"));
}

#[test]
fn count_is_deterministic() {
    let args = ["count", "--d", "2", &data("graphs/k4e.edges"), "--json", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["c"], 2);
    assert_eq!(v["seed"], 7);

    let threaded = Command::new(env!("CARGO_BIN_EXE_rigcount"))
        .args(args)
        .env("RIGIDITY_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(json(&threaded)["c"], 2);
}

#[test]
fn count_prism_and_real_samples() {
    let out = run(&["count", "--d", "2", &data("graphs/prism_g2.edges"), "--json", "--orbit-reduction"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["c"], 45);

    let out = run(&["count", "--d", "2", "--real-samples", "50", &data("graphs/two_reflection.edges"), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["c"], 4);
    assert_eq!(v["r_lower"], 4);
    assert_eq!(v["samples"].as_array().unwrap().len(), 50);
}

#[test]
fn certify_and_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("divides.json");
    let out = run(&[
        "certify",
        "divides",
        "--g",
        &data("graphs/k4.edges"),
        "--h",
        &data("graphs/k4e.edges"),
        "--out",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stored: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(stored["verdict"], "verified");
    assert_eq!(stored["claim"], "divisibility");
    assert_eq!(stored["schema_version"], 1);

    let out = run(&["verify", cert.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["reproduced"], true);

    // a certificate whose stored counts were edited no longer reproduces
    let mut edited = stored.clone();
    edited["evidence"]["counts"][1]["c"] = Value::from(3);
    let bad = dir.path().join("edited.json");
    std::fs::write(&bad, serde_json::to_string(&edited).unwrap()).unwrap();
    let out = run(&["verify", bad.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["reproduced"], false);
}

#[test]
fn certify_sphere_icosahedron() {
    let out = run(&["certify", "sphere", &data("graphs/icosahedron.json"), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["evidence"]["bound"], 256);
    assert_eq!(v["evidence"]["reduction"]["contractions"]["steps"].as_array().unwrap().len(), 8);

    let out = run(&["certify", "sphere", &data("graphs/k4.edges"), "--json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["reason"], "invalid_triangulation");
}

#[test]
fn certify_operations() {
    let out = run(&[
        "certify", "operation", &data("graphs/k4e.edges"), "--kind", "zero-extension", "--neighbors", "2,3", "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "verified");
    assert_eq!(v["step"]["predicted_effect"]["type"], "exact_factor");

    let out = run(&[
        "certify", "operation", &data("graphs/k4e.edges"), "--kind", "vertex-split", "--x", "0", "--n1", "2", "--n2", "3",
        "--w", "1", "--json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert_eq!(v["claim"], "lower_bound");
    assert_eq!(v["verdict"], "verified");

    // a contraction carries no prediction
    let out = run(&[
        "certify", "operation", &data("graphs/k4.edges"), "--kind", "edge-contraction", "--contract", "0-1", "--json",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["reason"], "hypothesis_not_established");
}

#[test]
fn certify_edge_drop_and_augment() {
    let out = run(&["certify", "edge-drop", &data("graphs/k4e.edges"), "--edge", "2-3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "verified");

    let out = run(&["certify", "augment", &data("graphs/k113.edges"), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["evidence"]["counts"][0]["c"], 4);
    assert_eq!(v["evidence"]["added_edges"].as_array().unwrap().len(), 2);
}
