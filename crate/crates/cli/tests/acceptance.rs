//! Acceptance criterion 13: the full verify run with caching on, executed
//! twice into the same output directory, produces byte-identical outputs,
//! and the cached repetition costs under a minute.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        if entry.file_type().unwrap().is_file() {
            out.insert(
                entry.file_name().to_string_lossy().into_owned(),
                fs::read(entry.path()).unwrap(),
            );
        }
    }
    out
}

#[test]
fn criterion_13_determinism() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_modsmooth"))
            .args(["verify", "--suite", "all", "--cache"])
            .args(["--output-dir", dir.path().to_str().unwrap()])
            .status()
            .unwrap()
    };
    let first = run();
    assert_eq!(first.code(), Some(0), "first verify run failed");
    let baseline = snapshot(dir.path());
    assert!(baseline.contains_key("summary.json"));

    let rerun_start = Instant::now();
    let second = run();
    let overhead = rerun_start.elapsed();
    assert_eq!(second.code(), Some(0), "second verify run failed");
    let repeat = snapshot(dir.path());

    assert_eq!(baseline.len(), repeat.len(), "file sets differ");
    for (name, bytes) in &baseline {
        let other = repeat.get(name).unwrap_or_else(|| panic!("{name} missing on rerun"));
        assert!(bytes == other, "{name} changed between runs");
    }
    assert!(overhead.as_secs() < 60, "cached rerun took {overhead:?}");
    println!(
        "ACCEPTANCE 13 (determinism): PASS [{:.2}s total, {:.2}s cached rerun]",
        start.elapsed().as_secs_f64(),
        overhead.as_secs_f64()
    );
}
