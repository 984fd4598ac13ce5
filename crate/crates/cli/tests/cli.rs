use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn trackperf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trackperf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn perf_classical_limit() {
    let out = trackperf(&["perf", config("classical.toml").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    let total = doc["breakdown"]["total"].as_f64().unwrap();
    assert!((total - 6.0).abs() < 1e-10, "{total}");
}

#[test]
fn perf_terms_sum_to_total() {
    let out = trackperf(&["perf", config("example1.toml").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let b = &stdout_json(&out)["breakdown"];
    let terms: f64 = b
        .as_object()
        .unwrap()
        .iter()
        .filter(|(k, _)| k.starts_with("term_"))
        .map(|(_, v)| v.as_f64().unwrap())
        .sum();
    let total = b["total"].as_f64().unwrap();
    assert!((terms - total).abs() <= 1e-9 * total.abs().max(1.0));
}

#[test]
fn minimum_phase_is_free() {
    let out = trackperf(&["perf", config("minimum_phase.toml").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout_json(&out)["breakdown"]["total"].as_f64().unwrap().abs() < 1e-10);
}

#[test]
fn near_cancellation_is_structural() {
    let out = trackperf(&["perf", config("near_cancellation.toml").to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("performance unbounded"));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[plant]\nnum = [1.0]\nden = [1.0, 1.0]\nbogus = 3\n").unwrap();
    assert_eq!(code(&trackperf(&["perf", bad.to_str().unwrap()])), 2);
    let missing = dir.path().join("missing.toml");
    assert_eq!(code(&trackperf(&["perf", missing.to_str().unwrap()])), 2);
    let cfg = config("example1.toml");
    assert_eq!(code(&trackperf(&["--tol", "2", "perf", cfg.to_str().unwrap()])), 2);
}

#[test]
fn sweep_is_deterministic_csv() {
    let cfg = config("example1.toml");
    let args = [
        "sweep",
        cfg.to_str().unwrap(),
        "--axis",
        "channel_up.f_cutoff:0.1:2:4",
        "--axis",
        "channel_up.h_cutoff:0.1:2:3:log",
        "--fields",
        "total,term_g2",
    ];
    let a = trackperf(&args);
    let b = trackperf(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "channel_up.f_cutoff,channel_up.h_cutoff,total,term_g2,error");
    assert_eq!(lines.len(), 1 + 12);
    assert!(lines[1].starts_with("1.0000000000000001e-1,1.0000000000000001e-1,"));
    assert!(lines[4].starts_with("7.3333333333333328e-1,1.0000000000000001e-1,"));
    assert!(lines.iter().skip(1).all(|l| l.ends_with(',')));
}

#[test]
fn sweep_two_steps_and_bad_axis() {
    let cfg = config("example2.toml");
    let cfg = cfg.to_str().unwrap();
    let out = trackperf(&["sweep", cfg, "--axis", "reference.sigma_r:0.1:1:2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 3);
    for bad in ["reference.sigma_r:0.1:1:1", "reference.sigma_r:0:1:3:log", "plant.nope[3]:0:1:2"] {
        let out = trackperf(&["sweep", cfg, "--axis", bad]);
        assert_eq!(code(&out), 2, "{bad}");
    }
}

#[test]
fn sweep_records_point_errors() {
    let cfg = config("example1.toml");
    let out = trackperf(&["sweep", cfg.to_str().unwrap(), "--axis", "plant.num[0]:-2.0:-1.0:2"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let first = text.lines().nth(1).unwrap();
    assert!(first.contains("performance unbounded"), "{first}");
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn bounds_reports_quadratic_forms() {
    let out = trackperf(&["bounds", config("example3.toml").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    for key in ["sigma_r", "sigma_1", "sigma_2"] {
        assert!(doc["y_coeffs"][key].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn verify_classical_passes_with_skips() {
    let out = trackperf(&["verify", config("classical.toml").to_str().unwrap(), "--order", "8"]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    assert!(doc["relative_gap"].as_f64().unwrap() <= 0.02);
    let skipped = doc["cross_checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "skipped")
        .count();
    assert!(skipped > 0);
}

#[test]
fn verify_gap_exits_1() {
    let out = trackperf(&["verify", config("example3.toml").to_str().unwrap(), "--order", "8"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds"));
}
