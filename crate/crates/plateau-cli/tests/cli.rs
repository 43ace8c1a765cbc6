//! End-to-end tests of the `plateau` binary: exit codes, strict config
//! parsing, artifact emission, and byte-identical reruns.

use std::path::PathBuf;
use std::process::{Command, Output};

fn plateau(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plateau"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("plateau-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn anomaly_total_default_passes_with_target_row() {
    let prefix = tmp("total");
    let out = plateau(&[
        "anomaly-total",
        "--output",
        prefix.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(prefix.with_extension("csv")).unwrap();
    let total = csv
        .lines()
        .find(|l| l.starts_with("total_anomaly_coefficient_magnitude"))
        .expect("total row present");
    assert!(total.contains("0.05066059182"), "{total}");
    assert!(total.trim_end().ends_with("pass"), "{total}");
    std::fs::remove_file(prefix.with_extension("csv")).ok();
}

#[test]
fn missing_config_exits_2_without_output() {
    let prefix = tmp("missing");
    let out = plateau(&[
        "shell",
        "--config",
        "/definitely/not/here.json",
        "--output",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!prefix.with_extension("csv").exists());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cannot read config"), "{err}");
}

#[test]
fn unknown_config_key_exits_2_with_field_diagnostic() {
    let cfg = tmp("badkey.json");
    std::fs::write(&cfg, r#"{"config_version":1,"lambda":10.0,"widht":0.5}"#).unwrap();
    let out = plateau(&["shell", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unknown field `widht`"), "{err}");
    assert!(err.contains("line"), "{err}");
    std::fs::remove_file(&cfg).ok();
}

#[test]
fn testfn_profile_endpoints() {
    let prefix = tmp("profile");
    let out = plateau(&["testfn", "--output", prefix.to_str().unwrap()]);
    assert!(out.status.success());
    let mut profile_path = prefix.into_os_string();
    profile_path.push("_profile.csv");
    let profile_path = PathBuf::from(profile_path);
    let profile = std::fs::read_to_string(&profile_path).unwrap();
    let lines: Vec<&str> = profile.lines().collect();
    assert_eq!(lines[0], "radius,value");
    assert_eq!(lines[1], "0.0,1.0");
    assert_eq!(*lines.last().unwrap(), "10.0,0.0");
    std::fs::remove_file(&profile_path).ok();
}

#[test]
fn rerun_is_byte_identical() {
    let a = tmp("rerun-a");
    let b = tmp("rerun-b");
    for p in [&a, &b] {
        let out = plateau(&[
            "shell",
            "--output",
            p.to_str().unwrap(),
            "--format",
            "json",
            "--samples",
            "20000",
        ]);
        assert!(out.status.success());
    }
    let ja = std::fs::read(a.with_extension("json")).unwrap();
    let jb = std::fs::read(b.with_extension("json")).unwrap();
    assert_eq!(ja, jb);
    for p in [&a, &b] {
        std::fs::remove_file(p.with_extension("json")).ok();
        let mut shell = p.clone().into_os_string();
        shell.push("_shell.csv");
        std::fs::remove_file(PathBuf::from(shell)).ok();
    }
}

#[test]
fn print_default_config_round_trips() {
    let out = plateau(&["anomaly-vector", "--print-default-config"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["config_version"], 1);
    assert_eq!(parsed["lambda"], 10.0);
}

#[test]
fn seed_override_changes_mc_rows() {
    let out1 = plateau(&["shell", "--samples", "20000", "--seed", "1"]);
    let out2 = plateau(&["shell", "--samples", "20000", "--seed", "2"]);
    assert_ne!(out1.stdout, out2.stdout);
    let out1b = plateau(&["shell", "--samples", "20000", "--seed", "1"]);
    assert_eq!(out1.stdout, out1b.stdout);
}
