//! End-to-end checks of the command-line surface: exit codes, config
//! handling, and output shapes.

use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_modsmooth"))
}

fn read_rows(path: &Path) -> Vec<String> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("#schema=1"), "schema header");
    lines.skip(1).map(|s| s.to_string()).collect()
}

#[test]
fn modulus_of_constant_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["modulus", "--f", "x^0", "--k", "1", "--r", "0", "--p", "inf", "--t", "0.2"])
        .args(["--output-dir", dir.path().to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let rows = read_rows(&dir.path().join("modulus.csv"));
    assert_eq!(rows.len(), 1);
    let value: f64 = rows[0].split(',').nth(6).unwrap().parse().unwrap();
    assert_eq!(value, 0.0);
}

#[test]
fn unknown_function_exits_2() {
    let out = bin()
        .args(["modulus", "--f", "nonexistent", "--t", "0.1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonexistent"));
}

#[test]
fn bad_p_exits_2() {
    let out = bin()
        .args(["modulus", "--f", "x^2", "--p", "0.5", "--t", "0.1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p must be in [1, inf]"));
}

#[test]
fn unwritable_output_dir_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("blocker");
    fs::write(&blocker, b"file, not a directory").unwrap();
    let status = bin()
        .args(["modulus", "--f", "x^2", "--t", "0.1"])
        .args(["--output-dir", blocker.join("out").to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn config_file_drives_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        format!(
            r#"
function_names = ["x^2"]
k = 2
r = 0
p = "inf"
t_values = [0.1, 0.3]
output_dir = "{}"

[hgrid]
count = 20
"#,
            dir.path().join("out").display()
        ),
    )
    .unwrap();
    let status = bin().args(["modulus"]).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let rows = read_rows(&dir.path().join("out/modulus.csv"));
    assert_eq!(rows.len(), 2);
}

#[test]
fn config_unknown_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "mystery_key = true\n").unwrap();
    let out = bin().args(["modulus"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bestapprox_sequence_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["bestapprox", "--f", "abs_x_1", "--p", "inf", "--sequence", "10"])
        .args(["--output-dir", dir.path().to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let rows = read_rows(&dir.path().join("bestapprox.csv"));
    assert_eq!(rows.len(), 10);
    let errors: Vec<f64> =
        rows.iter().map(|r| r.split(',').nth(3).unwrap().parse().unwrap()).collect();
    for w in errors.windows(2) {
        assert!(w[1] <= w[0] + 1e-9, "not monotone: {errors:?}");
    }
}

#[test]
fn kfunc_emits_terms() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["kfunc", "--f", "exp", "--k", "2", "--r", "0", "--p", "2", "--t", "0.1"])
        .args(["--max-degree", "8"])
        .args(["--output-dir", dir.path().to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let rows = read_rows(&dir.path().join("kfunc.csv"));
    let cols: Vec<&str> = rows[0].split(',').collect();
    let value: f64 = cols[5].parse().unwrap();
    let a: f64 = cols[6].parse().unwrap();
    let d: f64 = cols[7].parse().unwrap();
    assert!((a + d - value).abs() < 1e-14);
}

#[test]
fn verify_small_suite_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["verify", "--suite", "scaling", "--f", "x^2", "--f", "exp"])
        .args(["--output-dir", dir.path().to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("summary.json")).unwrap()).unwrap();
    let entries = summary.as_array().unwrap();
    assert!(!entries.is_empty());
    for e in entries {
        let verdict = e["verdict"].as_str().unwrap();
        assert!(verdict == "pass" || verdict == "degenerate-pass", "{e}");
    }
    // every report csv exists
    let csvs = fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| {
            e.as_ref().unwrap().file_name().to_string_lossy().starts_with("verify_")
        })
        .count();
    assert_eq!(csvs, entries.len());

    let out = bin()
        .args(["report", "--output-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("scaling[f=exp"), "{text}");
}

#[test]
fn membership_suite_runs() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["verify", "--suite", "membership", "--f", "phi_inv_r2"])
        .args(["--output-dir", dir.path().to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let summary = fs::read_to_string(dir.path().join("summary.json")).unwrap();
    assert!(summary.contains("membership[f=phi_inv_r2"), "{summary}");
    assert!(summary.contains("vanishing[f=phi_inv_r2"), "{summary}");
}
