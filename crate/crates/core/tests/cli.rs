//! The command-line front end: exit codes, stage-tagged errors and cleanup.

use std::path::Path;
use std::process::{Command, Output};

fn vqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vqc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn small_corpus(dir: &Path) -> std::path::PathBuf {
    let data = dir.join("reviews.tsv");
    let o = vqc(&["generate", "--out", s(&data), "--rows", "120", "--seed", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    data
}

fn small_config(dir: &Path) -> std::path::PathBuf {
    let cfg = dir.join("run.toml");
    std::fs::write(
        &cfg,
        "[split]\ntrain = 60\nval = 20\ntest = 40\n\n[train]\nepochs = 4\n",
    )
    .unwrap();
    cfg
}

#[test]
fn selftest_passes_on_a_clean_build() {
    let o = vqc(&["selftest"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.lines().count() >= 10);
    assert!(out.lines().all(|l| l.starts_with("PASS ")));
}

#[test]
fn missing_data_fails_in_the_load_stage() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = vqc(&["run", "--data", "/nonexistent/reviews.tsv", "--out", s(&out)]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("stage `load` failed"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn bad_config_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let data = small_corpus(dir.path());
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "seed = 1\n\n[train]\nepocs = 3\n").unwrap();
    let o = vqc(&[
        "train",
        "--data",
        s(&data),
        "--config",
        s(&cfg),
        "--out",
        s(&dir.path().join("o")),
    ]);
    assert!(!o.status.success());
    let err = stderr(&o);
    assert!(
        err.contains("stage `config` failed") && err.contains("bad.toml:4"),
        "{err}"
    );
}

#[test]
fn unknown_optimizer_is_rejected() {
    let o = vqc(&["run", "--data", "x", "--out", "y", "--optimizer", "adam"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("adam"));
}

#[test]
fn failed_write_leaves_no_partial_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let data = small_corpus(dir.path());
    let cfg = small_config(dir.path());
    let out = dir.path().join("out");
    // A directory where the result record should go makes the second write fail.
    std::fs::create_dir_all(out.join("result.json")).unwrap();
    let o = vqc(&["run", "--data", s(&data), "--config", s(&cfg), "--out", s(&out)]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("stage `write` failed"), "{}", stderr(&o));
    assert!(!out.join("model.json").exists());
    assert!(!out.join("report.csv").exists());
}

#[test]
fn train_evaluate_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data = small_corpus(dir.path());
    let cfg = small_config(dir.path());
    let train_dir = dir.path().join("train");
    for opt in ["aqgd", "cobyla"] {
        let o = vqc(&[
            "train",
            "--data",
            s(&data),
            "--config",
            s(&cfg),
            "--out",
            s(&train_dir.join(opt)),
            "--optimizer",
            opt,
            "--epochs",
            "45",
            "--seed",
            "2",
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }

    let mut records = Vec::new();
    for opt in ["aqgd", "cobyla"] {
        let eval_dir = dir.path().join("eval").join(opt);
        let model = train_dir.join(opt).join("model.json");
        let o = vqc(&[
            "evaluate",
            "--data",
            s(&data),
            "--model",
            s(&model),
            "--out",
            s(&eval_dir),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(String::from_utf8_lossy(&o.stdout).contains("| Model |"));
        records.push(eval_dir.join("result.json"));
    }

    let report = dir.path().join("report");
    let o = vqc(&["report", "--out", s(&report), s(&records[0]), s(&records[1])]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(report.join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(
        csv.contains("45 Epochs with AQGD") && csv.contains("45 Epochs with COBYLA"),
        "{csv}"
    );

    // Scoring against a different file is refused.
    let other = dir.path().join("other.tsv");
    assert!(vqc(&["generate", "--out", s(&other), "--rows", "120", "--seed", "5"])
        .status
        .success());
    let o = vqc(&[
        "evaluate",
        "--data",
        s(&other),
        "--model",
        s(&train_dir.join("aqgd/model.json")),
        "--out",
        s(&dir.path().join("bad")),
    ]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("stage `evaluate` failed"), "{}", stderr(&o));
}

#[test]
fn preprocess_writes_encoded_splits() {
    let dir = tempfile::tempdir().unwrap();
    let data = small_corpus(dir.path());
    let cfg = small_config(dir.path());
    let out = dir.path().join("pre");
    let o = vqc(&["preprocess", "--data", s(&data), "--config", s(&cfg), "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("features.json")).unwrap()).unwrap();
    assert_eq!(v["train"]["features"].as_array().unwrap().len(), 60);
    assert_eq!(v["test"]["labels"].as_array().unwrap().len(), 40);
    assert!(v["train"]["features"][0].as_array().unwrap().iter().all(|x| {
        let x = x.as_f64().unwrap();
        (0.0..=std::f64::consts::PI).contains(&x)
    }));
}
