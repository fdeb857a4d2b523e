//! End-to-end runs of the binary: every exit code, the command/config
//! cross-check, report files, and format selection.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn write_config(name: &str, body: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("confmass-cli-{}-{name}", std::process::id()));
    fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_confmass"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn passing_suite_exits_zero_and_prints_the_report() {
    let cfg = write_config(
        "pass.json",
        r#"{"command": "verify", "dimension": 3, "suite": "lemma2.1"}"#,
    );
    let out = run(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    // without --out the report body itself goes to stdout
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.trim_start().starts_with('{'));
    assert!(text.contains("lemma2.1"));
}

#[test]
fn failed_check_exits_one() {
    // decay rate 1 is below the admissible threshold for this end
    let cfg = write_config(
        "fail.json",
        r#"{"command": "validate", "dimension": 3,
            "family": {"name": "ah_conformal", "params": [0.1, 1.0]}}"#,
    );
    let report = std::env::temp_dir().join(format!(
        "confmass-cli-{}-fail.json",
        std::process::id()
    ));
    let out = run(&[
        "validate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("FAIL")));
    fs::remove_file(report).ok();
}

#[test]
fn config_mistakes_exit_two() {
    // misspelled tolerance name
    let cfg = write_config(
        "typo.json",
        r#"{"command": "verify", "dimension": 3, "tolerances": {"identty": 1e-8}}"#,
    );
    let out = run(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("identty"));

    // command line and configuration disagree
    let cfg = write_config(
        "mismatch.json",
        r#"{"command": "verify", "dimension": 3}"#,
    );
    let out = run(&["af-mass", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // unknown report format
    let cfg = write_config(
        "format.json",
        r#"{"command": "verify", "dimension": 3, "suite": "lemma2.1"}"#,
    );
    let out = run(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "yaml",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // missing config file
    let out = run(&["verify", "--config", "/nonexistent/confmass.json"]);
    assert_eq!(out.status.code(), Some(2));

    // missing required argument
    let out = run(&["verify"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("confmass"));
}

#[test]
fn non_convergent_tail_exits_three() {
    // decay 0.6 is admissible but too slow for the default radius schedule
    let cfg = write_config(
        "slow.json",
        r#"{"command": "af-mass", "dimension": 3,
            "family": {"name": "conformally_flat", "params": [0.3, 0.6]}}"#,
    );
    let out = run(&["af-mass", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn out_flag_writes_the_report_and_keeps_the_console_summary() {
    let cfg = write_config(
        "out.json",
        r#"{"command": "constraints", "dimension": 3,
            "family": {"name": "schwarzschild_isotropic", "params": [1.0]}}"#,
    );
    let report = std::env::temp_dir().join(format!(
        "confmass-cli-{}-report.csv",
        std::process::id()
    ));
    let out = run(&[
        "constraints",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let file = fs::read_to_string(&report).unwrap();
    assert!(file.lines().next().unwrap().contains("id"));
    assert!(file.lines().count() > 10);
    // stdout carries the human summary, not the csv body
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().last().unwrap().starts_with("ok:"));
    fs::remove_file(report).ok();
}
