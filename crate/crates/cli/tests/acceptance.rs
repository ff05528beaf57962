//! Acceptance: repeated CLI scans with an identical seed must produce
//! byte-identical CSV output, independent of parallelism settings.

use std::process::Command;

fn soe() -> Command {
    Command::new(env!("CARGO_BIN_EXE_soe"))
}

#[test]
fn criterion_10_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for (run, threads) in [(0, "1"), (1, "8"), (2, "2")] {
        let out = dir.path().join(format!("scan_{run}.csv"));
        let status = soe()
            .args([
                "scan",
                "--alpha",
                "0,45",
                "--photons",
                "50000",
                "--seed",
                "12345",
                "--out",
            ])
            .arg(&out)
            .env("RAYON_NUM_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
        bytes.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
    assert_eq!(bytes[1], bytes[2]);
    println!(
        "[PASS] criterion 10: identical seed gives byte-identical CSV across runs and \
         thread settings ({} bytes)",
        bytes[0].len()
    );
}
