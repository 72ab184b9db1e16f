use std::fs;
use std::process::{Command, Output};

fn ltdesk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ltdesk")).args(args).output().expect("binary runs")
}

#[test]
fn list_names_every_experiment() {
    let out = ltdesk(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 20);
    assert!(text.lines().any(|l| l.starts_with("kernels")));
}

#[test]
fn run_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = ltdesk(&["run", "j-homomorphism", "--seed", "7", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (ra, rb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ra, rb);
    let report: serde_json::Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["pass"], true);
    assert_eq!(report["config"]["seed"], 7);

    let out = ltdesk(&["emit", a.to_str().unwrap(), "--format", "csv"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("experiment,check_id,anchor,pass,inputs_digest,measured,runtime_ms"));
    assert!(csv.lines().count() > 1);
}

#[test]
fn config_file_selects_the_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"experiment": "vs-stability", "p": 3, "h": 2, "seed": 3}"#).unwrap();
    let out = ltdesk(&["run", "--config", cfg.to_str().unwrap(), "--format", "text"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().contains("vs-stability"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"experiment": "action-law", "p": 4}"#).unwrap();
    assert_eq!(ltdesk(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&cfg, r#"{"experiment": "action-law", "h": 2, "e": 3}"#).unwrap();
    assert_eq!(ltdesk(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&cfg, r#"{"experiment": "action-law", "bogus": 1}"#).unwrap();
    assert_eq!(ltdesk(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(ltdesk(&["run", "no-such-experiment"]).status.code(), Some(2));
}

#[test]
fn known_failure_exits_with_one() {
    let out = ltdesk(&["run", "period-convergence"]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], false);
}
