use std::path::Path;
use std::process::{Command, Output};

fn ssps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssps"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn data_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn construct_sine_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let out = ssps(&["construct", "--model", "sine", "--r", "10", "--samples", "2001", "--format", "csv", "--out", arg(&path)]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("# modulus=8.8907990932342"));
    assert!(text.lines().any(|l| l == "t,x,dx"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 2001);
    assert_eq!(rows[0][1], 0.0);
    assert_eq!(rows[2000][0], 2.0);
}

#[test]
fn construct_json_reports_modulus() {
    let out = ssps(&["construct", "--model", "sine", "--r", "10", "--format", "json", "--samples", "11"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((doc["modulus"].as_f64().unwrap() - 0.889).abs() < 1e-3);
    assert_eq!(doc["x"].as_array().unwrap().len(), 11);
}

#[test]
fn construct_below_threshold_is_exit_2() {
    let out = ssps(&["construct", "--model", "exp", "--r", "4.9"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no SSPS exists: r <= pi^2/2"));
}

#[test]
fn verify_exit_codes() {
    let out = ssps(&["verify", "--model", "exp", "--r", "10", "--tol", "1e-8"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["pass"], true);
    assert_eq!(doc["model"], "exp");
    assert_eq!(doc["grid_points"], 2001);
    assert_eq!(doc["quad_order"], 32);
    assert!((doc["offset_c"].as_f64().unwrap() + 3.99711348735).abs() < 1e-9);
    for key in ["r", "modulus", "period", "residual_max", "antisymmetry_max", "period_defect_max", "tool_version"] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }

    assert_eq!(code(&ssps(&["verify", "--model", "sine", "--r", "4.0"])), 2);

    let out = ssps(&["verify", "--model", "sine", "--r", "10", "--tol", "1e-15"]);
    assert_eq!(code(&out), 3);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["pass"], false);
}

#[test]
fn verify_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = ssps(&["verify", "--model", "sine", "--r", "10", "--out", arg(&path)]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(doc["residual_max"].as_f64().unwrap() <= 1e-8);
    assert!(String::from_utf8_lossy(&out.stdout).contains("pass"));
}

#[test]
fn sweep_exp_is_monotone() {
    let out = ssps(&["sweep", "--model", "exp", "--from", "5", "--to", "100", "--points", "20"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "r,modulus,offset_c,amplitude,residual_max,complement"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 20);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
    // k saturates at 1.0 in double precision; k' carries the strict ordering.
    assert!(rows.windows(2).all(|w| w[1][1] >= w[0][1]));
    assert!(rows.windows(2).all(|w| w[1][5] < w[0][5]));
    assert!(rows.iter().all(|row| row[4] <= 1e-8));
}

#[test]
fn sweep_usage_and_threshold() {
    assert_eq!(code(&ssps(&["sweep", "--model", "sine", "--from", "5", "--to", "5", "--points", "1"])), 1);
    assert_eq!(code(&ssps(&["sweep", "--model", "exp", "--from", "4", "--to", "10"])), 2);
}

#[test]
fn simulate_tracks_closed_form() {
    let out = ssps(&["simulate", "--model", "sine", "--r", "10", "--horizon", "6", "--step", "0.001", "--seed", "closed-form"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let last = text.lines().last().unwrap();
    let err: f64 = last.strip_prefix("# max_abs_err=").unwrap().parse().unwrap();
    assert!(err <= 1e-4);
    assert_eq!(data_rows(&text).len(), 6001);
}

#[test]
fn simulate_zero_seed_stays_zero() {
    let out = ssps(&["simulate", "--seed", "zero", "--model", "sine", "--r", "10"]);
    assert_eq!(code(&out), 0);
    let rows = data_rows(&String::from_utf8(out.stdout).unwrap());
    assert!(rows.iter().all(|row| row[1] == 0.0 && row[2] == 0.0));
}

#[test]
fn simulate_rejects_misaligned_step_and_reports_divergence() {
    assert_eq!(code(&ssps(&["simulate", "--model", "sine", "--r", "10", "--step", "0.0007"])), 1);
    let out = ssps(&["simulate", "--model", "sine", "--r", "10", "--divergence-bound", "1"]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("diverged"));
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(code(&ssps(&["--bogus"])), 1);
    assert_eq!(code(&ssps(&["construct", "--model", "cosine", "--r", "10"])), 1);
    assert_eq!(code(&ssps(&["construct", "--model", "sine"])), 1);
    assert_eq!(code(&ssps(&["construct", "--model", "sine", "--r", "nan"])), 1);
    assert_eq!(code(&ssps(&["--help"])), 0);
    assert_eq!(code(&ssps(&["--version"])), 0);
}

#[test]
fn outputs_are_byte_stable() {
    for args in [
        vec!["construct", "--model", "exp", "--r", "12.5", "--samples", "301"],
        vec!["verify", "--model", "sine", "--r", "7"],
        vec!["sweep", "--model", "sine", "--from", "5", "--to", "30", "--points", "6", "--grid", "201"],
        vec!["simulate", "--model", "exp", "--r", "10", "--horizon", "2", "--step", "0.01"],
    ] {
        let a = ssps(&args);
        let b = ssps(&args);
        assert_eq!(code(&a), 0, "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
