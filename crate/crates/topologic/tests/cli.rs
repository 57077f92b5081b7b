//! End-to-end checks of the binary: exit-code contract and output shapes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_topologic"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_chain_model(dir: &std::path::Path) -> PathBuf {
    let path = dir.join("chain.json");
    std::fs::write(
        &path,
        r#"{"points":["a","b"],"opens":[[],["a"],["a","b"]],"valuation":{"A":["a"]}}"#,
    )
    .unwrap();
    path
}

#[test]
fn parse_roundtrip_and_errors() {
    let out = run(&["parse", "K A -> A"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "K A -> A");

    let out = run(&["parse", "K & A"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));

    // clap usage errors are also exit 2
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn valid_and_check_exit_codes() {
    let dir = tempdir();
    let model = write_chain_model(&dir);
    let model = model.to_str().unwrap();

    let out = run(&["valid", "--model", model, "K A -> A"]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["valid", "--model", model, "A -> K A"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("fails at"));

    let out = run(&["check", "--model", model, "--point", "a", "--open", "a,b", "<> K A"]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["check", "--model", model, "--point", "b", "--open", "a", "A"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn decide_emits_replayable_countermodel() {
    let dir = tempdir();
    let out = run(&["decide", "--valid", "--max-points", "3", "A -> K A"]);
    assert_eq!(out.status.code(), Some(1));
    // the emitted model re-loads and still refutes the formula
    let path = dir.join("counter.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let out = run(&["valid", "--model", path.to_str().unwrap(), "A -> K A"]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["decide", "--valid", "--max-points", "3", "K A -> A"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn quotient_and_finitize() {
    let dir = tempdir();
    let model = write_chain_model(&dir);
    let model = model.to_str().unwrap();

    let out = run(&["quotient", "--model", model]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.get("model").is_some() && v.get("world_map").is_some());

    let out = run(&["finitize", "--model", model, "<> K A"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn frame_and_algebra_pipelines() {
    let dir = tempdir();
    let model = write_chain_model(&dir);
    let model = model.to_str().unwrap();

    let out = run(&["frame", "export", "--model", model]);
    assert_eq!(out.status.code(), Some(0));
    let frame_path = dir.join("frame.json");
    std::fs::write(&frame_path, &out.stdout).unwrap();
    let frame = frame_path.to_str().unwrap();

    let out = run(&["frame", "check", "--frame", frame]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["frame", "to-space", "--frame", frame]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["algebra", "from-model", "--model", model]);
    assert_eq!(out.status.code(), Some(0));
    let alg_path = dir.join("alg.json");
    std::fs::write(&alg_path, &out.stdout).unwrap();
    let alg = alg_path.to_str().unwrap();

    let out = run(&["algebra", "check", "--algebra", alg]);
    assert_eq!(out.status.code(), Some(0));

    // {w0,w1} is clopen in the chain complex algebra
    let out = run(&["algebra", "eval", "--algebra", alg, "--value", "A=3", "K A -> A"]);
    assert_eq!(out.status.code(), Some(0));

    // non-clopen valuation is an input violation
    let out = run(&["algebra", "eval", "--algebra", alg, "--value", "A=1", "A"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn dnf_command_verifies() {
    let out = run(&["dnf", "K A | K B"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "top & K A | top & K B"
    );

    let out = run(&["dnf", "--json", "[] A"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["blocks"][0]["base"], "A");
}

#[test]
fn budget_exhaustion_is_exit_4() {
    let out = run(&["decide", "--max-seconds", "0", "A & ~A"]);
    assert_eq!(out.status.code(), Some(4));
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("topologic-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
