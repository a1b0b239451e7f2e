//! CLI surface checks against the compiled binary: exit-code contract,
//! scenario/config cross-validation, and the thread-count fallback.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_boundary-lab"))
}

fn write_config(dir: &std::path::Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const COMB_SMALL: &str =
    r#"{"scenario":"comb","comb":{"n_slits":4,"k_max":2,"grid":256}}"#;

#[test]
fn passing_run_exits_zero_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "comb.json", COMB_SMALL);
    let out = dir.path().join("out");
    let status = bin()
        .args(["comb", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("summary.json").is_file());
    assert!(out.join("split_report.json").is_file());
}

#[test]
fn missing_config_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["comb", "--config", "/nonexistent.json", "--out"])
        .arg(dir.path().join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn scenario_config_mismatch_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "comb.json", COMB_SMALL);
    let status = bin()
        .args(["lusin", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn bad_flags_are_usage_errors_and_help_is_not() {
    let status = bin().arg("--definitely-not-a-flag").status().unwrap();
    assert_eq!(status.code(), Some(2));
    let status = bin().arg("--help").status().unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn thread_env_fallback_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "comb.json", COMB_SMALL);
    let status = bin()
        .env("BOUNDARY_LAB_THREADS", "2")
        .args(["comb", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn invalid_config_schema_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        r#"{"scenario":"lusin","probe":{"k_min":0}}"#,
    );
    let status = bin()
        .args(["lusin", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}
