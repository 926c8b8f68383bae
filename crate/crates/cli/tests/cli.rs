use std::path::Path;
use std::process::{Command, Output};

fn fsmcmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsmcmc")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

const TWIN: &str = r#"{
    "kind": "twin", "seed": 4,
    "prior": {"alpha": 1.0, "modes": 9, "domain": {"kind": "unit-square"}},
    "target": {"model": "darcy", "problem": {"grid_size": 16, "measurement_points": [[0.5, 0.5]]}, "data": {"source": "twin"}}
}"#;

#[test]
fn twin_writes_outputs_and_reports_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "twin.json", TWIN);
    let out = dir.path().join("run");
    let o = fsmcmc(&["twin", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "9"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let result: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(result.is_object());
    for f in ["observations.json", "twin.json", "manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 9);
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", &TWIN.replace("\"seed\": 4,", "\"seed\": 4, \"foo\": 1,"));
    let o = fsmcmc(&["twin", "--config", &bad]);
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "config");
    assert!(err["message"].as_str().unwrap().contains("foo"));

    let missing = dir.path().join("nope.json");
    assert_eq!(fsmcmc(&["sample", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn subcommand_must_match_the_config_kind() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "twin.json", TWIN);
    let o = fsmcmc(&["sample", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_with_code_three() {
    // the output path is an existing regular file, so the run cannot write
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "twin.json", TWIN);
    let blocker = write(dir.path(), "blocker", "");
    let o = fsmcmc(&["twin", "--config", &cfg, "--out", &blocker]);
    assert_eq!(o.status.code(), Some(3));
}
