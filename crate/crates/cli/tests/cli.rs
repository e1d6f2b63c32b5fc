use std::path::PathBuf;
use std::process::Command;

use serde_json::{json, Value};

fn scenario(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_coboundary")).args(args).output().unwrap();
    let stdout: Value = serde_json::from_slice(&out.stdout).expect("stdout is one JSON document");
    (out.status.code().unwrap(), stdout, String::from_utf8(out.stderr).unwrap())
}

#[test]
fn decide_rotation() {
    let (code, v, _) = run(&["decide", &scenario("rotation_coboundary.json")]);
    assert_eq!(code, 0);
    assert_eq!(v, json!({"verdict": "coboundary"}));

    let (_, v, _) = run(&["decide", "--witness", &scenario("rotation_coboundary.json")]);
    assert_eq!(v["F"], json!({"a": [0], "b": [1], "c": [0]}));
}

#[test]
fn decide_single_atom_obstruction() {
    let (code, v, _) = run(&["decide", &scenario("single_atom_obstruction.json")]);
    assert_eq!(code, 0);
    assert_eq!(
        v,
        json!({"verdict": "not_coboundary", "certificate": {"character": [1], "gamma": "g", "atom": "a", "value": "1/2"}})
    );
    let (code, v, stderr) = run(&["oracle", &scenario("single_atom_obstruction.json")]);
    assert_eq!(code, 0);
    assert_eq!(v, json!({"verdict": "not_coboundary", "certificate": null}));
    assert!(stderr.contains("2 candidate"));
}

#[test]
fn klein_mixed_orbits() {
    let path = scenario("klein_mixed_orbits.json");
    let (_, v, _) = run(&["decide", &path]);
    assert_eq!(v["certificate"], json!({"character": [1, 0], "gamma": "a", "atom": "r", "value": "1/2"}));
    let (_, v, _) = run(&["roundtrip", &path]);
    assert_eq!(v["roundtrip"], "not_applicable");
    let (code, v, _) = run(&["roundtrip", &scenario("rotation_coboundary.json")]);
    assert_eq!((code, &v["roundtrip"]), (0, &json!("ok")));
}

#[test]
fn fuzz_summary() {
    let (code, v, _) = run(&["fuzz", "--trials", "1000", "--seed", "42"]);
    assert_eq!(code, 0);
    assert_eq!((v["agree"].as_u64(), v["disagree"].as_u64()), (Some(1000), Some(0)));

    let (code, v, _) = run(&["fuzz", "--trials", "50", "--group", "s3", "--moduli", "2,3", "--atoms", "6"]);
    assert_eq!(code, 0);
    assert_eq!(v["agree"], 50);
}

#[test]
fn dual_table() {
    let (code, v, _) = run(&["dual", "--moduli", "2,3"]);
    assert_eq!(code, 0);
    assert_eq!(v["elements"].as_array().unwrap().len(), 6);
    // ⟨(1,1), (1,1)⟩ = 1/2 + 1/3
    assert_eq!(v["pairing"][4][4], "5/6");
}

#[test]
fn invalid_inputs_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    let (code, v, _) = run(&["decide", bad.to_str().unwrap()]);
    assert_eq!((code, v["error"]["kind"].as_str()), (1, Some("parse")));

    let mut doc: Value =
        serde_json::from_str(&std::fs::read_to_string(scenario("rotation_coboundary.json")).unwrap()).unwrap();
    doc["group"]["table"][1] = json!([1, 1, 0]);
    std::fs::write(&bad, doc.to_string()).unwrap();
    let (code, v, stderr) = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["ok"], false);
    assert_eq!(v["error"]["pointer"], "/group/table");
    assert!(stderr.contains("/group/table"));

    let (code, _, _) = run(&["validate", "/definitely/missing.json"]);
    assert_eq!(code, 1);
}

#[test]
fn oracle_bound() {
    let (code, v, _) = run(&["oracle", "--max-oracle", "1", &scenario("rotation_coboundary.json")]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "input");
}
