use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn xychain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xychain"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn dynamics_writes_header_and_grid() {
    let out = xychain(&[
        "dynamics",
        "--initial",
        "010",
        "--phi-end",
        "0.7853981633974483",
        "--phi-step",
        "0.39269908169872414",
    ]);
    assert!(out.status.success());
    let table = rows(&stdout(&out));
    assert_eq!(table[0], ["phi", "c12", "c13", "c23", "c1_23", "c123"]);
    assert_eq!(table.len(), 4);
    assert_eq!(table[3][2], "1.000000000000");
    assert_eq!(table[2][1], "0.707106781187");
}

#[test]
fn default_dynamics_grid_has_629_rows() {
    let out = xychain(&["dynamics"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 630);
}

#[test]
fn prepare_writes_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ghz.json");
    let out = xychain(&[
        "prepare",
        "ghz",
        "--mode",
        "compiled",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["protocol"], "ghz");
    assert!((report["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert!((report["entanglement"]["c123"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert_eq!(report["density_matrix"]["re"].as_array().unwrap().len(), 8);
    assert!(report.get("total_duration_s").is_none());
}

#[test]
fn noisy_prepare_reports_duration_and_mixed_state() {
    let out = xychain(&["prepare", "bell-010", "--mode", "schedule-noise"]);
    assert!(out.status.success());
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let duration = report["total_duration_s"].as_f64().unwrap();
    assert!(duration > 0.0 && duration < 0.1);
    assert!(report["entanglement"]["c123"].is_null());
    let c = report["attenuated_correlation"].as_f64().unwrap();
    assert!(c > 0.8 && c < 1.0, "{c}");
}

#[test]
fn custom_spin_system_is_loaded() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("system.json");
    let system = xychain::nmr::SpinSystem::default().without_relaxation();
    std::fs::write(&path, system.to_json_string().unwrap()).unwrap();
    let out = xychain(&[
        "prepare",
        "w",
        "--mode",
        "schedule-noise",
        "--spin-system",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((report["attenuated_correlation"].as_f64().unwrap() - 1.0).abs() < 1e-9);

    std::fs::write(&path, "{not json").unwrap();
    let bad = xychain(&["prepare", "w", "--spin-system", path.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
}

fn pauli_values(csv: &str) -> Vec<(String, f64)> {
    let table = rows(csv);
    assert_eq!(table[0], ["label", "value"]);
    table[1..]
        .iter()
        .map(|r| (r[0].clone(), r[1].parse().unwrap()))
        .collect()
}

#[test]
fn pauli_set_from_protocol_and_from_report() {
    let direct = xychain(&["pauli-set", "--protocol", "w"]);
    assert!(direct.status.success());
    let values = pauli_values(&stdout(&direct));
    assert_eq!(values.len(), 64);
    assert_eq!(values[0].0, "III");
    let xxi = values.iter().find(|(l, _)| l == "XXI").unwrap().1;
    assert!((xxi - 2.0 / 3.0).abs() < 1e-9);

    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("w.json");
    assert!(
        xychain(&["prepare", "w", "--out", report.to_str().unwrap()])
            .status
            .success()
    );
    let via_file = xychain(&["pauli-set", "--state", report.to_str().unwrap()]);
    assert!(via_file.status.success());
    for ((la, a), (lb, b)) in values.iter().zip(pauli_values(&stdout(&via_file))) {
        assert_eq!(la, &lb);
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn pauli_set_rejects_malformed_state() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let out = xychain(&["prepare", "ghz"]);
    let mut report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    report["density_matrix"]["re"][0][0] = Value::from(5.0);
    std::fs::write(&path, report.to_string()).unwrap();
    let bad = xychain(&["pauli-set", "--state", path.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(!bad.stderr.is_empty());
}

#[test]
fn correlation_sweep_columns() {
    let step = "0.7853981633974483";
    let ideal = xychain(&["sweep-correlation", "--phi-step", step]);
    let table = rows(&stdout(&ideal));
    assert_eq!(table[0], ["phi", "xx_corr"]);
    assert_eq!(table[2][1], "1.000000000000");
    assert_eq!(table[3][1], "0.000000000000");

    let noisy = xychain(&[
        "sweep-correlation",
        "--phi-step",
        step,
        "--mode",
        "schedule-noise",
    ]);
    let table = rows(&stdout(&noisy));
    assert_eq!(table[0], ["phi", "xx_corr", "xx_corr_noisy"]);
    let damped: f64 = table[2][2].parse().unwrap();
    assert!(damped > 0.8 && damped < 1.0);
}

#[test]
fn verify_passes_and_detects_faults() {
    let ok = xychain(&["verify", "--phi-samples", "10", "--seed", "3"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("overall: PASS"));

    let broken = xychain(&["verify", "--phi-samples", "10", "--inject-fault"]);
    assert_eq!(broken.status.code(), Some(1));
    assert!(stdout(&broken).contains("FAIL"));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["frobnicate"][..],
        &["prepare", "w", "--mode", "quantum"],
        &["dynamics", "--phi-step", "abc"],
        &["pauli-set"],
    ] {
        assert_eq!(xychain(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn validation_errors_exit_with_one() {
    for args in [
        &["prepare", "cluster"][..],
        &["dynamics", "--initial", "01"],
        &["dynamics", "--phi-step", "0"],
        &["verify", "--phi-samples", "0"],
    ] {
        let out = xychain(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
}

#[test]
fn out_flag_creates_file_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    let out = xychain(&[
        "dynamics",
        "--phi-end",
        "0.1",
        "--phi-step",
        "0.05",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(Path::new(&path).exists());
}
