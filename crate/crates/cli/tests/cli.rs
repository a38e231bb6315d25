use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use spectral_switch::graph::decode_graph6;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_spectral-switch"));
    c.env_remove("SPECTRAL_SWITCH_CAP");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn schema_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(format!("{name}.v1.schema.json"))
}

fn assert_schema_valid(doc: &Value, schema: &str) {
    let schema: Value = serde_json::from_str(&fs::read_to_string(schema_path(schema)).unwrap()).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    let msgs: Vec<String> = match compiled.validate(doc) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    assert!(msgs.is_empty(), "schema violations: {msgs:#?}");
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

const THM_WQH: &str = r#"{"wqh": {"c1": ["{1,2,3,4}", "{1,2,3,5}", "{1,2,3,6}"],
                                   "c2": ["{1,4,5,6}", "{2,4,5,6}", "{3,4,5,6}"]}}"#;

#[test]
fn build_reports_counts_and_writes_graph6() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("j.g6");
    let o = run(&["build", "J{2}(8,4)", "--format", "graph6", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "n=70 m=1260 k-regular=36");
    let g = decode_graph6(&fs::read(&out).unwrap()).unwrap();
    assert_eq!((g.n(), g.edge_count()), (70, 1260));

    let o = run(&["build", "Jq{0}(4,2;q=2)"]);
    assert_eq!(stdout(&o).trim(), "n=35 m=280 k-regular=16");

    let json_out = dir.path().join("p.json");
    let o = run(&["build", "J{0}(5,2)", "--format", "json", "--out", json_out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(read_json(&json_out)["edges"].as_array().unwrap().len(), 15);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&run(&["build", "J{}(5,2)"])), 2);
    assert_eq!(code(&run(&["build", "J{2}(8,9)"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["build"])), 1);
    assert_eq!(code(&run(&["recipe", "halfrange"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
    let capped = bin().env("SPECTRAL_SWITCH_CAP", "50").args(["build", "J{2}(8,4)"]).output().unwrap();
    assert_eq!(code(&capped), 4);
    let raised = bin().env("SPECTRAL_SWITCH_CAP", "70").args(["build", "J{2}(8,4)"]).output().unwrap();
    assert_eq!(code(&raised), 0);
}

#[test]
fn verify_accepts_valid_spec_and_names_violations() {
    let dir = TempDir::new().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(&spec, THM_WQH).unwrap();
    let report = dir.path().join("v.json");
    let o = run(&["verify", "--graph", "J{2}(8,4)", "--spec", spec.to_str().unwrap(), "--report", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    let doc = read_json(&report);
    assert_schema_valid(&doc, "verify-report");
    assert_eq!(doc["noniso"]["level"], "edge-lambda");
    assert_eq!(doc["cospectral"]["equal"], true);

    // one vertex moved: {1,2,3,6} -> {1,2,3,7}
    let bad = THM_WQH.replace("{1,2,3,6}", "{1,2,3,7}");
    fs::write(&spec, bad).unwrap();
    let o = run(&["verify", "--graph", "J{2}(8,4)", "--spec", spec.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("condition wqh-"), "{}", stderr(&o));

    fs::write(&spec, r#"{"gm": {"cells": [[0, 1, 2]]}}"#).unwrap();
    assert_eq!(code(&run(&["verify", "--graph", "J{2}(8,4)", "--spec", spec.to_str().unwrap()])), 2);
}

#[test]
fn identity_switch_is_inconclusive() {
    let dir = TempDir::new().unwrap();
    let g6 = dir.path().join("empty.g6");
    fs::write(&g6, "E???\n").unwrap();
    let spec = dir.path().join("id.json");
    fs::write(&spec, r#"{"gm": {"cells": [[0, 1, 2, 3]]}}"#).unwrap();
    let o = run(&["verify", "--graph", g6.to_str().unwrap(), "--spec", spec.to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}{}", stdout(&o), stderr(&o));
    assert!(stderr(&o).contains("isomorphic"));
}

#[test]
fn switch_writes_mate() {
    let dir = TempDir::new().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(&spec, THM_WQH).unwrap();
    let out = dir.path().join("mate.g6");
    let o = run(&["switch", "--graph", "J{2}(8,4)", "--spec", spec.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mate = decode_graph6(&fs::read(&out).unwrap()).unwrap();
    assert_eq!((mate.n(), mate.edge_count()), (70, 1260));

    let o = run(&["spectrum", "--graph", "J{2}(8,4)", "--against", out.to_str().unwrap()]);
    assert!(stdout(&o).contains("cospectral with") && stdout(&o).trim_end().ends_with("true"));
}

#[test]
fn recipes_pass_and_reports_match_schema() {
    let dir = TempDir::new().unwrap();
    for args in [
        vec!["recipe", "j2n4", "--n", "8"],
        vec!["recipe", "qkneser", "--n", "4", "--k", "2"],
        vec!["recipe", "sporadic", "--name", "J24-10-5"],
    ] {
        let report = dir.path().join("r.json");
        let mut full = args.clone();
        full.extend(["--report", report.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]);
        let o = run(&full);
        assert_eq!(code(&o), 0, "{args:?}: {}{}", stdout(&o), stderr(&o));
        let doc = read_json(&report);
        assert_schema_valid(&doc, "recipe-report");
        assert_eq!(doc["passed"], true);
    }
    assert!(dir.path().join("qkneser-n4-k2-mate.g6").exists());
    assert_eq!(code(&run(&["recipe", "sporadic", "--name", "J9-9-9"])), 2);
}

#[test]
fn recipe_reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let mut docs = Vec::new();
    for i in 0..2 {
        let report = dir.path().join(format!("r{i}.json"));
        let o = run(&["--threads", "2", "recipe", "halfrange", "--k", "5", "--seed", "7", "--report", report.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let mut doc = read_json(&report);
        doc.as_object_mut().unwrap().remove("timings_ms");
        docs.push(doc);
    }
    assert_eq!(docs[0], docs[1]);
    assert_eq!(docs[0]["cospectral"]["seed"], 7);
}

#[test]
fn search_gm4_and_wqh33() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("gm4.json");
    let o = run(&["search", "--mode", "gm4", "--graph", "Jq{0}(4,2;q=2)", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc = read_json(&out);
    assert_schema_valid(&doc, "search-report");
    assert_eq!(doc["partial"], false);
    assert_eq!(doc["candidates_examined"], 52360);

    let out = dir.path().join("wqh.json");
    let o = run(&[
        "search", "--mode", "wqh33", "--graph", "J{1}(11,4)", "--pattern", "partition", "--ground", "1-9", "--extras",
        "10,11", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc = read_json(&out);
    assert_schema_valid(&doc, "search-report");
    let want: Value = serde_json::json!([["{1,2,3,10}", "{4,5,6,10}", "{7,8,9,10}"], ["{1,2,3,11}", "{4,5,6,11}", "{7,8,9,11}"]]);
    let hit = doc["results"].as_array().unwrap().iter().any(|r| {
        let l = &r["labels"];
        let sorted = |v: &Value| {
            let mut s: Vec<String> = v.as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect();
            s.sort();
            s
        };
        let (a, b) = (sorted(&l[0]), sorted(&l[1]));
        let (x, y) = (sorted(&want[0]), sorted(&want[1]));
        (a == x && b == y) || (a == y && b == x)
    });
    assert!(hit, "partition pattern missed the known pair");

    let o = run(&["search", "--mode", "wqh33", "--graph", "J{1}(11,4)"]);
    assert_eq!(code(&o), 1);
    let o = run(&["search", "--mode", "gm4", "--graph", "J{1}(11,4)", "--budget", "0"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn search_with_candidate_file_and_limit() {
    let dir = TempDir::new().unwrap();
    let cands = dir.path().join("c.json");
    fs::write(
        &cands,
        r#"[["{1,2,3,4}", "{1,2,3,5}", "{1,2,3,6}"], ["{1,4,5,6}", "{2,4,5,6}", "{3,4,5,6}"], ["{1,2,3,7}", "{1,2,3,8}", "{4,5,6,7}"]]"#,
    )
    .unwrap();
    let out = dir.path().join("w.json");
    let o = run(&[
        "search", "--mode", "wqh33", "--graph", "J{2}(8,4)", "--candidates", cands.to_str().unwrap(), "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc = read_json(&out);
    assert_eq!(doc["results"].as_array().unwrap().len(), 1);

    let o = run(&["search", "--mode", "gm4", "--graph", "J{2}(8,4)", "--limit", "1000"]);
    assert!(stdout(&o).contains("examined 1000 of 916895 candidates (partial)"), "{}", stdout(&o));
}

#[test]
fn spectrum_report() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s.json");
    let o = run(&["spectrum", "--graph", "J{0}(5,2)", "--eigenvalues", "--primes", "2", "--report", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let doc = read_json(&out);
    assert_schema_valid(&doc, "spectrum-report");
    let ev: Vec<f64> = doc["eigenvalues"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    // Petersen: 3, 1^5, (-2)^4
    assert!((ev[9] - 3.0).abs() < 1e-9 && (ev[0] + 2.0).abs() < 1e-9 && (ev[4] - 1.0).abs() < 1e-9);
    assert_eq!(doc["charpoly"].as_array().unwrap().len(), 2);
}

#[test]
fn spec_schema_accepts_cli_inputs() {
    let doc: Value = serde_json::from_str(THM_WQH).unwrap();
    assert_schema_valid(&doc, "switch-spec");
    assert_schema_valid(&serde_json::json!({"gm": {"cells": [[0, 1, 2, 3]]}}), "switch-spec");
}
