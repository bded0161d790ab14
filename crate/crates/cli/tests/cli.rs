//! End-to-end checks of the installed binary: exit codes, output files and
//! rerun determinism.

use std::path::Path;
use std::process::Command;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fsrswitch"))
}

fn tiny_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(
        &path,
        r#"{
            "wavelength_count": 8,
            "coupler_ports": 4,
            "fsr_values": [1, 2],
            "loads": [0.3, 0.8],
            "runs": 4,
            "modulations": [2, 4]
        }"#,
    )
    .unwrap();
    path
}

#[test]
fn sweep_writes_all_outputs_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let config = tiny_config(dir.path());
    let out = dir.path().join("out");
    let status = binary()
        .args(["--config", config.to_str().unwrap()])
        .args(["--out", out.to_str().unwrap()])
        .arg("sweep")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    for name in [
        "analytic_bp.csv",
        "bp_estimates.csv",
        "bp_deviation.csv",
        "crosslayer.csv",
    ] {
        assert!(out.join(name).is_file(), "{name} missing");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = tiny_config(dir.path());
    let mut outputs = Vec::new();
    for sub in ["a", "b"] {
        let out = dir.path().join(sub);
        let status = binary()
            .args(["--config", config.to_str().unwrap()])
            .args(["--out", out.to_str().unwrap()])
            .args(["--seed", "99"])
            .arg("simulate")
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        outputs.push((
            std::fs::read(out.join("bp_estimates.csv")).unwrap(),
            std::fs::read(out.join("bp_deviation.csv")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn invalid_config_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{ "wavelength_count": 64, "fsr_values": [3] }"#).unwrap();
    let output = binary()
        .args(["--config", path.to_str().unwrap()])
        .args(["--out", dir.path().join("out").to_str().unwrap()])
        .arg("analyze")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("not divisible"), "stderr: {stderr}");
}

#[test]
fn malformed_json_reports_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\n  \"runs\": oops\n}\n").unwrap();
    let output = binary()
        .args(["--config", path.to_str().unwrap()])
        .arg("analyze")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("line 2"), "stderr: {stderr}");
}

#[test]
fn model_errors_exit_with_runtime_code() {
    let dir = tempfile::tempdir().unwrap();
    // Table misses the high-load cells the grid needs.
    let table = dir.path().join("ber.csv");
    std::fs::write(&table, "1,0.1,2,1e-6\n1,0.5,2,1e-5\n").unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        format!(
            r#"{{
                "wavelength_count": 8,
                "coupler_ports": 4,
                "fsr_values": [1],
                "loads": [0.9],
                "runs": 2,
                "modulations": [2],
                "ber_model": {{ "type": "table", "path": {:?} }}
            }}"#,
            table.to_str().unwrap()
        ),
    )
    .unwrap();
    let output = binary()
        .args(["--config", config.to_str().unwrap()])
        .args(["--out", dir.path().join("out").to_str().unwrap()])
        .arg("crosslayer")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn runs_and_seed_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = tiny_config(dir.path());
    let out = dir.path().join("out");
    let status = binary()
        .args(["--config", config.to_str().unwrap()])
        .args(["--out", out.to_str().unwrap()])
        .args(["--runs", "1", "--seed", "5"])
        .arg("simulate")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(out.join("bp_estimates.csv")).unwrap();
    assert!(text.lines().next().unwrap().contains("master_seed=5"));
    let row = text.lines().nth(2).unwrap();
    assert_eq!(row.split(',').nth(2).unwrap(), "1", "runs column: {row}");
}
