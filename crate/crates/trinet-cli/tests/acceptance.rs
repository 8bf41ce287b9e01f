//! Acceptance: byte-identical reruns for every CLI command (criterion on
//! command determinism), plus exit-status behavior.
//!
//! The manifest file is excluded from the byte comparison: it records the
//! wall-clock duration of the run, which legitimately differs. Every data
//! output must match bit for bit.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_trinet"))
}

fn run_ok(args: &[&str]) {
    let output = bin().args(args).output().expect("spawn trinet");
    assert!(
        output.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&output.stderr)
    );
}

/// Map of file name -> bytes for every non-manifest file under `dir`.
fn data_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).expect("read output dir") {
        let entry = entry.expect("dir entry");
        if entry.path().is_dir() {
            continue;
        }
        let name = entry.file_name().to_string_lossy().to_string();
        if name.ends_with("manifest.json") {
            continue;
        }
        out.insert(name, std::fs::read(entry.path()).expect("read output file"));
    }
    out
}

fn assert_identical_dirs(a: &Path, b: &Path, context: &str) {
    let fa = data_files(a);
    let fb = data_files(b);
    assert_eq!(
        fa.keys().collect::<Vec<_>>(),
        fb.keys().collect::<Vec<_>>(),
        "{context}: different file sets"
    );
    assert!(!fa.is_empty(), "{context}: no outputs written");
    for (name, bytes) in &fa {
        assert_eq!(bytes, &fb[name], "{context}: {name} differs between reruns");
    }
}

struct Workspace {
    root: PathBuf,
}

impl Workspace {
    fn new(tag: &str) -> Self {
        let root = std::env::temp_dir().join(format!("trinet-accept-{tag}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&root);
        std::fs::create_dir_all(&root).unwrap();
        Workspace { root }
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    fn arg(&self, rel: &str) -> String {
        self.path(rel).display().to_string()
    }
}

impl Drop for Workspace {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.root);
    }
}

#[test]
fn criterion_10_cli_reruns_are_byte_identical() {
    let ws = Workspace::new("determinism");

    // Two full pipeline passes with identical flags and seeds.
    for round in ["a", "b"] {
        let dir = ws.arg(&format!("round-{round}"));
        std::fs::create_dir_all(ws.path(&format!("round-{round}"))).unwrap();
        run_ok(&[
            "generate",
            "--condition",
            "uti",
            "--n",
            "1200",
            "--seed",
            "7",
            "--out",
            &format!("{dir}/data.ndjson"),
        ]);
        run_ok(&[
            "train",
            "--data",
            &format!("{dir}/data.ndjson"),
            "--condition",
            "uti",
            "--out-dir",
            &format!("{dir}/model"),
            "--seed",
            "7",
            "--epochs",
            "2",
        ]);
        run_ok(&[
            "eval",
            "--model",
            &format!("{dir}/model/model.json"),
            "--encoder",
            &format!("{dir}/model/encoder.json"),
            "--data",
            &format!("{dir}/data.ndjson"),
            "--out-dir",
            &format!("{dir}/eval"),
            "--seed",
            "7",
            "--min-predicted-positives",
            "1",
            "--min-tpr",
            "0",
        ]);
        run_ok(&[
            "predict",
            "--model",
            &format!("{dir}/model/model.json"),
            "--encoder",
            &format!("{dir}/model/encoder.json"),
            "--data",
            &format!("{dir}/data.ndjson"),
            "--out",
            &format!("{dir}/preds.csv"),
        ]);
        run_ok(&[
            "tokens",
            "--data",
            &format!("{dir}/data.ndjson"),
            "--condition",
            "uti",
            "--out",
            &format!("{dir}/tokens.csv"),
            "--min-rel-diff",
            "0.3",
            "--min-support",
            "2",
        ]);
        run_ok(&[
            "pca",
            "--model",
            &format!("{dir}/model/model.json"),
            "--encoder",
            &format!("{dir}/model/encoder.json"),
            "--out",
            &format!("{dir}/pca.csv"),
        ]);
        run_ok(&[
            "features",
            "--data",
            &format!("{dir}/data.ndjson"),
            "--condition",
            "uti",
            "--feature",
            "temp_c",
            "--out",
            &format!("{dir}/features.txt"),
        ]);
        run_ok(&[
            "simulate",
            "--compare",
            "--condition",
            "uti",
            "--seed",
            "3",
            "--horizon",
            "300",
            "--out",
            &format!("{dir}/sim.txt"),
            "--episodes-out",
            &format!("{dir}/episodes.csv"),
        ]);
    }

    // Compare every output of every command, including the checkpoint.
    assert_identical_dirs(&ws.path("round-a"), &ws.path("round-b"), "top-level outputs");
    assert_identical_dirs(&ws.path("round-a/model"), &ws.path("round-b/model"), "train outputs");
    assert_identical_dirs(&ws.path("round-a/eval"), &ws.path("round-b/eval"), "eval outputs");
    println!("[PASS] criterion 10 (CLI determinism): all command outputs byte-identical across reruns");
}

#[test]
fn single_epoch_training_writes_one_curve_row() {
    let ws = Workspace::new("one-epoch");
    run_ok(&[
        "generate",
        "--condition",
        "pneumonia",
        "--n",
        "400",
        "--seed",
        "3",
        "--out",
        &ws.arg("data.ndjson"),
    ]);
    run_ok(&[
        "train",
        "--data",
        &ws.arg("data.ndjson"),
        "--condition",
        "pneumonia",
        "--out-dir",
        &ws.arg("model"),
        "--seed",
        "3",
        "--epochs",
        "1",
    ]);
    let curve = std::fs::read_to_string(ws.path("model/curve.csv")).unwrap();
    // Header plus exactly one epoch row.
    assert_eq!(curve.lines().count(), 2, "curve: {curve}");
    assert!(ws.path("model/model.json").exists());
    assert!(ws.path("model/encoder.json").exists());
}

#[test]
fn usage_errors_exit_with_status_two() {
    // Missing required --out.
    let output = bin()
        .args(["generate", "--condition", "uti", "--n", "100"])
        .output()
        .expect("spawn trinet");
    assert_eq!(output.status.code(), Some(2));

    // Unknown mode value.
    let ws = Workspace::new("usage");
    let output = bin()
        .args(["simulate", "--mode", "warp", "--out", &ws.arg("sim.txt")])
        .output()
        .expect("spawn trinet");
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_with_status_one_and_write_nothing() {
    let ws = Workspace::new("runtime-err");
    // Single-class dataset cannot be split for training.
    let mut lines = String::new();
    for i in 0..40 {
        lines.push_str(&format!(
            "{{\"notes\":\"w{i}\",\"medications\":[],\"symptoms\":[],\"age_months\":24.0,\
             \"weight_kg\":12.0,\"systolic_bp\":100.0,\"diastolic_bp\":60.0,\"resp_rate\":22.0,\
             \"temp_c\":37.0,\"pulse\":120.0,\"ctas\":3,\"arrival_method\":\"walk_in\",\
             \"arrival_hour\":1,\"arrival_weekday\":1,\"arrival_month\":1,\"gender\":\"F\",\
             \"label\":0}}\n"
        ));
    }
    std::fs::write(ws.path("single-class.ndjson"), lines).unwrap();
    let output = bin()
        .args([
            "train",
            "--data",
            &ws.arg("single-class.ndjson"),
            "--condition",
            "uti",
            "--out-dir",
            &ws.arg("model"),
            "--epochs",
            "1",
        ])
        .output()
        .expect("spawn trinet");
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("error:"), "stderr: {stderr}");
    // No partial outputs.
    assert!(!ws.path("model/model.json").exists());
    assert!(!ws.path("model/curve.csv").exists());
}
