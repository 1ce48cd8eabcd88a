//! End-to-end tests of the binary: exit codes, file outputs, overrides.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ksflow"))
}

fn write_tiny_config(dir: &Path) -> std::path::PathBuf {
    // 8^2 periodic torus, uniform state, a handful of steps
    let config = serde_json::json!({
        "grid": { "dim": 2, "extent": [1.0, 1.0], "cells": [8, 8], "bc": "PeriodicAll" },
        "params": { "m": 1.5, "t_end": 0.01 },
        "ic": { "kind": "UniformPlusPerturbation", "mean": 1.0, "amplitude": 0.2 },
        "output_dir": dir.join("out").to_str().unwrap(),
        "seed": 9
    });
    let path = dir.join("run.json");
    std::fs::write(&path, serde_json::to_string_pretty(&config).unwrap()).unwrap();
    path
}

#[test]
fn check_estimates_prints_table_and_exits_zero() {
    let out = bin().arg("check-estimates").output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("critical_exponent"));
    assert!(stdout.contains("4/3"));
    assert!(stdout.contains("579/194"));
    assert!(stdout.contains("193/191"));
    assert!(stdout.contains("WARN"), "the inadmissible exponent must be warned about");
}

#[test]
fn run_writes_outputs_and_is_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_tiny_config(dir.path());
    let out = bin().args(["run", "--config"]).arg(&config).output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.path().join("out/series.csv");
    assert!(csv.is_file());
    assert!(dir.path().join("out/report.json").is_file());

    // same seed into a fresh directory: identical bytes
    let out2_dir = dir.path().join("out2");
    let out = bin()
        .args(["run", "--config"])
        .arg(&config)
        .args(["--out", out2_dir.to_str().unwrap(), "--threads", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        std::fs::read(&csv).unwrap(),
        std::fs::read(out2_dir.join("series.csv")).unwrap()
    );

    // different seed: different series
    let out3_dir = dir.path().join("out3");
    let out = bin()
        .args(["run", "--config"])
        .arg(&config)
        .args(["--seed", "10", "--out", out3_dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_ne!(
        std::fs::read(&csv).unwrap(),
        std::fs::read(out3_dir.join("series.csv")).unwrap()
    );
}

#[test]
fn output_dir_env_override_applies_without_flag() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_tiny_config(dir.path());
    let env_dir = dir.path().join("from-env");
    let out = bin()
        .args(["run", "--config"])
        .arg(&config)
        .env("KSFLOW_OUTPUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(env_dir.join("series.csv").is_file());
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"grid\": {}}").unwrap();
    let out = bin().args(["run", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin().args(["run", "--config", "/nonexistent.toml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_empty_list_prints_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_tiny_config(dir.path());
    let out = bin()
        .args(["sweep", "--config"])
        .arg(&config)
        .args(["--m", ""])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 1);
    assert!(stdout.starts_with("m,verdict"));
}

#[test]
fn sweep_rejects_m_of_one_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_tiny_config(dir.path());
    let out = bin()
        .args(["sweep", "--config"])
        .arg(&config)
        .args(["--m", "1.0,1.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_runs_rows_and_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_tiny_config(dir.path());
    let out = bin()
        .args(["sweep", "--config"])
        .arg(&config)
        .args(["--m", "2.0,1.5"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 3);
    // rows sorted by m
    assert!(lines[1].starts_with("1.5,"));
    assert!(lines[2].starts_with("2,"));
    assert!(stdout.contains("Bounded"));
    assert!(dir.path().join("out/sweep.csv").is_file());
    // per-m run outputs land in subdirectories
    assert!(dir.path().join("out/m_1.5/series.csv").is_file());
}
