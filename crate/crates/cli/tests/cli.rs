use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn sqrt_cover() -> String {
    corpus().join("covers/sqrt.json").display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fiberscope")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn check_at_good_prime() {
    let out = run(&["check", "--cover", &sqrt_cover(), "--p", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["report"]["good"], true);
}

#[test]
fn composite_prime_is_a_config_error() {
    let out = run(&["check", "--cover", &sqrt_cover(), "--p", "4"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(json(&out)["error"]["kind"], "config");
}

#[test]
fn fiber_over_five() {
    let out = run(&["fiber", "--cover", &sqrt_cover(), "--p", "5", "--t", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let factors = json(&out)["descriptor"]["factors"].clone();
    assert_eq!(factors.as_array().unwrap().len(), 1);
    assert_eq!(factors[0]["e"], 2);
    assert_eq!(factors[0]["f"], 1);
    assert_eq!(factors[0]["tame_class"]["unit_index"], 0);
}

#[test]
fn exit_codes_for_preconditions_and_parsing() {
    assert_eq!(run(&["fiber", "--cover", &sqrt_cover(), "--p", "5", "--t", "0"]).status.code(), Some(2));
    assert_eq!(run(&["fiber", "--cover", "/nonexistent.json", "--p", "5", "--t", "1"]).status.code(), Some(4));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(4));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let wild = run(&["census", "--cover", &sqrt_cover(), "--p", "2", "--tbar", "0"]);
    assert_ne!(wild.status.code(), Some(0));
}

#[test]
fn output_is_stable() {
    let args = ["census", "--cover", &sqrt_cover(), "--p", "5", "--tbar", "0"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["census"]["blocks"][0]["histogram"]["0"], 2);
}

#[test]
fn shipped_corpus_passes() {
    let manifest = corpus().join("manifest.json");
    let out = run(&["corpus", "--manifest", &manifest.display().to_string()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["failures"], 0);
}

#[test]
fn wrong_fixture_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = serde_json::json!({
        "schema": 1,
        "fibers": { "5": { "d": 2, "blocks": [] } }
    });
    std::fs::write(dir.path().join("bad.json"), fixture.to_string()).unwrap();
    let manifest = serde_json::json!({
        "schema": 1,
        "rows": [{ "cover": sqrt_cover(), "p": 5, "t": ["5"], "fixture": "bad.json" }]
    });
    let path = dir.path().join("manifest.json");
    std::fs::write(&path, manifest.to_string()).unwrap();
    let out = run(&["corpus", "--manifest", &path.display().to_string()]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["failures"], 1);
    assert!(v["rows"][0]["problems"][0].as_str().unwrap().contains("differs from fixture"));
}

#[test]
fn missing_fixture_and_empty_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("manifest.json");
    std::fs::write(&path, r#"{"schema": 1, "rows": []}"#).unwrap();
    let out = run(&["corpus", "--manifest", &path.display().to_string()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["rows"].as_array().unwrap().len(), 0);

    let manifest = serde_json::json!({
        "schema": 1,
        "rows": [{ "cover": sqrt_cover(), "p": 5, "t": ["5"], "fixture": "absent.json" }]
    });
    std::fs::write(&path, manifest.to_string()).unwrap();
    assert_eq!(run(&["corpus", "--manifest", &path.display().to_string()]).status.code(), Some(2));
}

#[test]
fn heights_csv_has_header() {
    let out = run(&["heights", "--op", "threshold", "--m", "10", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,classes,threshold,bound,within_bound"));
    assert_eq!(lines.next(), Some("10,18,5,5,true"));
}

#[test]
fn group_operations() {
    let out = run(&["group", "--op", "double-cosets", "--generators", "S4", "--sigma", "(1 2 3)"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["blocks"], "(1,3)");
    let out = run(&["group", "--op", "random-check", "--seed", "7", "--cases", "40"]);
    assert_eq!(json(&out)["mismatches"].as_array().unwrap().len(), 0);
    let out = run(&["group", "--op", "double-cosets", "--generators", "A4", "--sigma", "(1 2)"]);
    assert_eq!(out.status.code(), Some(2));
}
