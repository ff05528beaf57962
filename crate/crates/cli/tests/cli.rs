//! End-to-end tests of the `soe` binary: outputs, manifests, exit codes.

use std::path::Path;
use std::process::{Command, Output};

use soe_cli::manifest::validate_manifest;

fn soe() -> Command {
    Command::new(env!("CARGO_BIN_EXE_soe"))
}

fn run(args: &[&str]) -> Output {
    soe().args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_manifest(data_path: &Path) -> serde_json::Value {
    let path = format!("{}.manifest.json", data_path.display());
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn scan_writes_csv_and_valid_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let output = run(&[
        "scan",
        "--alpha",
        "0,45",
        "--photons",
        "20000",
        "--seed",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr(&output));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("alpha_deg,theta_deg,ideal_prob,counts\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * 72);

    let manifest = read_manifest(&out);
    validate_manifest(&manifest).unwrap();
    assert_eq!(manifest["command"], "scan");
    assert_eq!(manifest["seed"], 3);
    assert_eq!(manifest["outputs"][0], out.display().to_string());
}

#[test]
fn erased_setting_rows_trace_a_fringe() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let output = run(&[
        "scan",
        "--alpha",
        "45",
        "--photons",
        "100000",
        "--seed",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let scan = soe_core::ScanResult::from_csv(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let max = scan.points.iter().map(|p| p.counts).max().unwrap() as f64;
    let min = scan.points.iter().map(|p| p.counts).min().unwrap() as f64;
    assert!((max - min) / (max + min) > 0.95, "no fringe: {min}..{max}");
}

#[test]
fn env_seed_is_honored_when_flag_absent() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    for (path, env_seed) in [(&a, "77"), (&b, "77"), (&c, "78")] {
        let output = soe()
            .args(["scan", "--alpha", "45", "--photons", "5000", "--out"])
            .arg(path)
            .env("SOE_DEFAULT_SEED", env_seed)
            .output()
            .unwrap();
        assert!(output.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn malformed_env_seed_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let output = soe()
        .args(["scan", "--alpha", "45", "--out"])
        .arg(&out)
        .env("SOE_DEFAULT_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("SOE_DEFAULT_SEED"));
}

#[test]
fn out_of_range_channel_spec_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.json");
    std::fs::write(
        &spec,
        r#"{"label":"bad","epsilon_xt":1.7,"pol_rotation_deg":0.0,"intermodal_phase_deg":0.0,"seed":0}"#,
    )
    .unwrap();
    let out = dir.path().join("x.csv");
    let output = soe()
        .args(["scan", "--channel"])
        .arg(&spec)
        .args(["--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("epsilon_xt"));
}

#[test]
fn unwritable_output_path_exits_3() {
    let output = run(&[
        "scan",
        "--alpha",
        "45",
        "--photons",
        "1000",
        "--out",
        "/nonexistent-dir/deep/scan.csv",
    ]);
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn fit_reports_clean_free_space_channel() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    let json = dir.path().join("report.json");
    assert!(run(&[
        "scan",
        "--alpha",
        "0,45",
        "--photons",
        "100000",
        "--seed",
        "9",
        "--out",
        csv.to_str().unwrap(),
    ])
    .status
    .success());
    let output = run(&[
        "fit",
        "--scan",
        csv.to_str().unwrap(),
        "--out",
        json.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr(&output));
    assert!(stdout(&output).contains("V_max"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(report["v_min"]["value"].as_f64().unwrap() <= 0.02);
    assert!(report["v_max"]["value"].as_f64().unwrap() >= 0.99);
    assert!(report["verdict"]
        .as_str()
        .unwrap()
        .starts_with("clean channel"));
    validate_manifest(&read_manifest(&json)).unwrap();
}

#[test]
fn truncated_csv_exits_2_naming_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("broken.csv");
    std::fs::write(
        &csv,
        "alpha_deg,theta_deg,ideal_prob,counts\n45.000000,0.000000,0.5\n",
    )
    .unwrap();
    let out = dir.path().join("r.json");
    let output = run(&[
        "fit",
        "--scan",
        csv.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("line 2"), "{}", stderr(&output));
}

#[test]
fn fit_without_erased_setting_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    assert!(run(&[
        "scan",
        "--alpha",
        "0,30",
        "--photons",
        "5000",
        "--seed",
        "1",
        "--out",
        csv.to_str().unwrap(),
    ])
    .status
    .success());
    let out = dir.path().join("r.json");
    let output = run(&[
        "fit",
        "--scan",
        csv.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("45"));
}

#[test]
fn render_vector_mode_writes_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tm01.pgm");
    let output = run(&[
        "render",
        "--family",
        "tm01",
        "--grid",
        "64",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr(&output));
    let pgm = std::fs::read_to_string(&out).unwrap();
    assert!(pgm.starts_with("P2\n64 64\n65535\n"));
    validate_manifest(&read_manifest(&out)).unwrap();
}

#[test]
fn render_pair_prints_lobe_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pair10.pgm");
    let output = run(&[
        "render",
        "--ell",
        "10",
        "--grid",
        "256",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr(&output));
    assert!(
        stdout(&output).contains("20 azimuthal lobes"),
        "{}",
        stdout(&output)
    );
}

#[test]
fn render_rejects_bad_grids_and_mode_combos() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.pgm");
    let output = run(&[
        "render",
        "--family",
        "tm01",
        "--grid",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));

    // Exactly one of --family / --ell, enforced by the argument group.
    let output = run(&[
        "render",
        "--family",
        "tm01",
        "--ell",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    let output = run(&["render", "--out", out.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn calibrate_identity_and_infeasible_targets() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("id.json");
    let output = run(&[
        "calibrate",
        "--v-min",
        "0",
        "--v-max",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let spec: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(spec["epsilon_xt"].as_f64().unwrap(), 0.0);

    let output = run(&[
        "calibrate",
        "--v-min",
        "0.9",
        "--v-max",
        "0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(4));
}

#[test]
fn calibrate_scan_fit_round_trip_hits_targets() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("fiber.json");
    let csv = dir.path().join("fiber.csv");
    let json = dir.path().join("report.json");
    assert!(run(&[
        "calibrate",
        "--v-min",
        "0.17",
        "--v-max",
        "0.98",
        "--out",
        spec.to_str().unwrap(),
    ])
    .status
    .success());
    assert!(run(&[
        "scan",
        "--channel",
        spec.to_str().unwrap(),
        "--alpha",
        "45,90",
        "--photons",
        "100000",
        "--seed",
        "11",
        "--out",
        csv.to_str().unwrap(),
    ])
    .status
    .success());
    let output = run(&[
        "fit",
        "--scan",
        csv.to_str().unwrap(),
        "--out",
        json.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr(&output));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let v_min = report["v_min"]["value"].as_f64().unwrap();
    let v_max = report["v_max"]["value"].as_f64().unwrap();
    assert!((v_min - 0.17).abs() < 0.01, "V_min = {v_min}");
    assert!((v_max - 0.98).abs() < 0.01, "V_max = {v_max}");
    assert!(report["verdict"]
        .as_str()
        .unwrap()
        .starts_with("cross-talk detected"));
}

#[test]
fn report_command_prints_and_saves_text() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    let txt = dir.path().join("report.txt");
    assert!(run(&[
        "scan",
        "--alpha",
        "0,45",
        "--photons",
        "20000",
        "--seed",
        "2",
        "--out",
        csv.to_str().unwrap(),
    ])
    .status
    .success());
    let output = run(&[
        "report",
        "--scan",
        csv.to_str().unwrap(),
        "--out",
        txt.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr(&output));
    let text = std::fs::read_to_string(&txt).unwrap();
    assert!(text.contains("verdict: clean channel"));
    assert!(stdout(&output).contains("channel report"));
    validate_manifest(&read_manifest(&txt)).unwrap();
}
