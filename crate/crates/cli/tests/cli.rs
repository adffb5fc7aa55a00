use std::path::{Path, PathBuf};
use std::process::Command;

use wavelab::config::{ExperimentConfig, FsParams};
use wavelab::{registry, run, CliError, Config};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wavelab"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const MOCK2: &str = r#"{"kind": "mock", "l": [[1, 0], [0, 2]],
    "k_basis": [[0.7071067811865476, 0.7071067811865476]], "complement": [[1, 0]], "seed": 1}"#;

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn list_names_every_experiment_with_anchor() {
    let out = bin().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("fs_membership (Theorem 1)"), "{text}");
    assert!(text.contains("duality (Lemma 3)"), "{text}");
    assert_eq!(text.lines().count(), registry::EXPERIMENTS.len());
    let again = bin().arg("list").output().unwrap();
    assert_eq!(text.as_bytes(), again.stdout.as_slice());
}

#[test]
fn every_registered_name_parses() {
    for name in registry::names() {
        let text = format!(r#"{{"model": {{"kind": "interval", "n_modes": 4}}, "experiment": {{"name": "{name}"}}}}"#);
        let cfg = Config::from_json(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(wavelab::report::experiment_name(&cfg), name);
    }
}

#[test]
fn unknown_experiment_lists_valid_names() {
    let dir = scratch("unknown");
    let cfg = write_config(&dir, r#"{"model": {"kind": "interval", "n_modes": 4}, "experiment": {"name": "nope"}}"#);
    let out = bin().arg("run").arg(&cfg).arg("--out").arg(&dir).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("unknown experiment 'nope'"), "{err}");
    assert!(err.contains("fs_membership") && err.contains("green_residual"), "{err}");
}

#[test]
fn sigma_equal_tau_is_rejected_before_computation() {
    let dir = scratch("sigma_tau");
    let cfg = write_config(
        &dir,
        r#"{"model": {"kind": "interval", "n_modes": 4096},
            "experiment": {"name": "fs_membership", "sigma": 0.2, "tau": 0.2}}"#,
    );
    let out_dir = dir.join("out");
    let out = bin().arg("run").arg(&cfg).arg("--out").arg(&out_dir).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("requires 0<σ<τ, Theorem 1"), "{err}");
    assert!(!out_dir.exists());
}

#[test]
fn fs_on_mock_is_rejected_with_explanation() {
    let text = format!(r#"{{"model": {MOCK2}, "experiment": {{"name": "fs_membership"}}}}"#);
    let cfg = Config::from_json(&text).unwrap();
    match run::validate(&cfg) {
        Err(CliError::Precondition { constraint, anchor }) => {
            assert_eq!(constraint, wavelab_core::experiments::TRIVIAL_GROWTH);
            assert_eq!(anchor, "Convention 1");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_fields_are_rejected() {
    let err = Config::from_json(
        r#"{"model": {"kind": "interval", "n_modes": 4}, "experiment": {"name": "duality", "tripels": 3}}"#,
    )
    .unwrap_err();
    assert!(err.to_string().contains("tripels"), "{err}");
}

#[test]
fn config_echo_round_trips() {
    let text = format!(
        r#"{{"model": {MOCK2}, "experiment": {{"name": "green_residual", "pairs": 3, "u": [2, 3], "v": [0, 1]}},
            "output": {{"dir": "x", "formats": ["json"]}}}}"#
    );
    let cfg = Config::from_json(&text).unwrap();
    let echo = serde_json::to_string(&cfg).unwrap();
    assert_eq!(Config::from_json(&echo).unwrap(), cfg);
    let defaults = Config::from_json(r#"{"model": {"kind": "interval", "n_modes": 8}, "experiment": {"name": "fs_membership"}}"#).unwrap();
    assert_eq!(defaults.experiment, ExperimentConfig::FsMembership(FsParams::default()));
}

#[test]
fn green_mock_fixture_passes_and_reports() {
    let dir = scratch("green");
    let text = format!(r#"{{"model": {MOCK2}, "experiment": {{"name": "green_residual", "u": [2, 3], "v": [0, 1]}}}}"#);
    let cfg = write_config(&dir, &text);
    let out = bin().arg("run").arg(&cfg).arg("--out").arg(&dir).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["all_pass"], true);
    assert!(report["results"]["max_residual"].as_f64().unwrap() <= 1e-12);
    assert!((report["results"]["fixture_lhs"].as_f64().unwrap() - 2.0).abs() < 1e-13);
    assert_eq!(report["anchor"], "Green formula");
    let echoed: Config = serde_json::from_value(report["config"].clone()).unwrap();
    assert_eq!(echoed, Config::from_json(&text).unwrap().with_output_dir(&dir));
    let files: Vec<&str> = report["files"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    assert_eq!(files, ["green_residual.csv", "report.json"]);
}

#[test]
fn fs_csv_has_fixed_columns() {
    let dir = scratch("fs_csv");
    let cfg = write_config(
        &dir,
        r#"{"model": {"kind": "interval", "n_modes": 128},
            "experiment": {"name": "fs_membership", "refine": false, "n_cells": 512}}"#,
    );
    let out = bin().arg("run").arg(&cfg).arg("--out").arg(&dir).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("fs_membership.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# wavelab csv v1; experiment=fs_membership"));
    assert_eq!(lines.next().unwrap(), "t,leakage_inner,leakage_outer,total_norm");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 4);
    assert!((rows[0][0] - 0.02).abs() < 1e-15);
}

#[test]
fn failing_verdict_gives_exit_one() {
    let dir = scratch("fail");
    let text = format!(r#"{{"model": {MOCK2}, "experiment": {{"name": "green_residual", "pairs": 5, "tol": -1.0}}}}"#);
    let cfg = write_config(&dir, &text);
    let out = bin().arg("run").arg(&cfg).arg("--out").arg(&dir).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["all_pass"], false);
}

#[test]
fn seed_override_changes_results_and_thread_count_does_not() {
    let dir = scratch("seeds");
    let cfg = write_config(&dir, &format!(r#"{{"model": {MOCK2}, "experiment": {{"name": "green_residual", "pairs": 10}}}}"#));
    let hash = |seed: &str, threads: &str, sub: &str| {
        let out_dir = dir.join(sub);
        let out = bin()
            .args(["run", cfg.to_str().unwrap(), "--seed", seed, "--threads", threads, "--out"])
            .arg(&out_dir)
            .output()
            .unwrap();
        assert!(out.status.success());
        let report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
        assert_eq!(report["seed"].as_u64().unwrap(), seed.parse::<u64>().unwrap());
        report["results_hash"].as_str().unwrap().to_string()
    };
    let a = hash("5", "1", "a");
    assert_eq!(a, hash("5", "2", "b"));
    assert_ne!(a, hash("6", "1", "c"));
}
