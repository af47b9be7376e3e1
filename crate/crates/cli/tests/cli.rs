use std::path::Path;
use std::process::{Command, Output};

fn stegsel(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stegsel"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let out = stegsel(args, cwd);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn full_flow(dir: &Path) {
    ok(&["synth", "--out", "covers", "--count", "10", "--size", "64", "--seed", "4"], dir);
    ok(&["gen", "--covers", "covers", "--method", "lsbm", "--rate", "0.5", "--seed", "4", "--out", "corpus"], dir);
    std::fs::write(
        dir.join("cfg.json"),
        r#"{"mbega": {"max_generations": 5, "pop_size": 10}, "timing_repeats": 1}"#,
    )
    .unwrap();
    ok(&["extract", "--manifest", "corpus/manifest.csv", "--set", "wam", "--out", "wam.csv", "--config", "cfg.json"], dir);
    let line = ok(
        &["run", "--features", "wam.csv", "--config", "cfg.json", "--out", "report.json", "--manifest", "corpus/manifest.csv"],
        dir,
    );
    assert!(line.starts_with("features 27 -> "), "{line}");
}

#[test]
fn pipeline_reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    full_flow(a.path());
    full_flow(b.path());
    for f in ["corpus/manifest.csv", "wam.csv", "report.json"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        assert_eq!(x, std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let header = std::fs::read_to_string(a.path().join("wam.csv")).unwrap();
    assert!(header.starts_with("label,wam_"));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(a.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["n_features_before"], 27);
    let methods: Vec<&str> = report["per_method"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["method"].as_str().unwrap())
        .collect();
    assert_eq!(methods, ["clean", "lsbm"]);
    let timing: serde_json::Value =
        serde_json::from_slice(&std::fs::read(a.path().join("report.timing.json")).unwrap()).unwrap();
    assert!(timing["train_time_before_ms"].as_f64().unwrap() > 0.0);
}

#[test]
fn failures_exit_nonzero_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = stegsel(&["extract", "--manifest", "missing.csv", "--set", "wam", "--out", "x.csv"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("stegsel: ") && err.contains("missing.csv"), "{err}");
    assert!(!dir.path().join("x.csv").exists());

    std::fs::create_dir(dir.path().join("covers")).unwrap();
    let out = stegsel(&["gen", "--covers", "covers", "--method", "lsbm", "--rate", "0.5", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(String::from_utf8(out.stderr).unwrap().lines().count(), 1);

    let out = stegsel(&["gen", "--covers", "covers", "--method", "f5", "--rate", "0.5", "--out", "o"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn run_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["synth", "--out", "covers", "--count", "4", "--size", "64"], dir.path());
    ok(&["gen", "--covers", "covers", "--method", "lsbr", "--rate", "1", "--out", "c"], dir.path());
    ok(&["extract", "--manifest", "c/manifest.csv", "--set", "fridrich", "--out", "f.csv"], dir.path());
    std::fs::write(dir.path().join("bad.json"), r#"{"split": {"train_frac": 1.5}}"#).unwrap();
    let out = stegsel(&["run", "--features", "f.csv", "--config", "bad.json", "--out", "r.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("train_frac"));
    assert!(!dir.path().join("r.json").exists());
}
