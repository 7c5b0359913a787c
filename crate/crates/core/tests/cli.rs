use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exemplars"))
        .args(args)
        .output()
        .expect("running binary")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn json_file(p: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn synth(dir: &TempDir, name: &str, extra: &[&str]) -> String {
    let out = path(dir, name);
    let mut args = vec!["synth", "-o", &out];
    args.extend_from_slice(extra);
    ok(&args);
    out
}

#[test]
fn synth_writes_rows_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let flags = [
        "--D", "5", "--dims", "3,3", "--counts", "10,90", "--seed", "7",
    ];
    let a = synth(&dir, "a.csv", &flags);
    let b = synth(&dir, "b.csv", &flags);
    let text = fs::read(&a).unwrap();
    assert_eq!(text, fs::read(&b).unwrap());
    let rows = String::from_utf8(text).unwrap();
    let lines: Vec<&str> = rows.lines().collect();
    assert_eq!(lines.len(), 101, "header plus 100 points");
    assert!(lines[0].ends_with("label"));
    assert_eq!(lines[1].split(',').count(), 6);
}

#[test]
fn synth_rejects_counts_below_dims() {
    let out = run(&["synth", "--D", "5", "--dims", "3", "--counts", "2"]);
    assert!(!out.status.success());
    let err: Value = serde_json::from_slice(&out.stderr).expect("structured error");
    assert!(err["error"].as_str().unwrap().contains("count"));
}

#[test]
fn eval_identical_labels() {
    let dir = TempDir::new().unwrap();
    let labels = path(&dir, "l.txt");
    fs::write(&labels, "0\n0\n1\n2\n2\n").unwrap();
    let v: Value =
        serde_json::from_str(&ok(&["eval", "--truth", &labels, "--pred", &labels])).unwrap();
    assert_eq!(v["accuracy"], 100.0);
    assert_eq!(v["fscore"], 100.0);
    assert_eq!(v["config"]["subcommand"], "eval");
}

#[test]
fn eval_missing_file_fails() {
    let out = run(&[
        "eval",
        "--truth",
        "/nonexistent/a",
        "--pred",
        "/nonexistent/b",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oracle_gauge_identity() {
    let v: Value =
        serde_json::from_str(&ok(&["oracle", "--check", "gauge", "--trials", "100"])).unwrap();
    assert!(v["max_deviation"].as_f64().unwrap() <= 1e-8);
    assert_eq!(v["trials"], 100);
}

#[test]
fn oracle_chain_agrees() {
    let v: Value =
        serde_json::from_str(&ok(&["oracle", "--check", "chain", "--trials", "10"])).unwrap();
    assert!(v["max_deviation"].as_f64().unwrap() <= 2e-3);
}

#[test]
fn select_then_cluster_and_classify() {
    let dir = TempDir::new().unwrap();
    let data = synth(
        &dir,
        "d.csv",
        &[
            "--D", "10", "--dims", "2,3", "--counts", "20,40", "--seed", "7",
        ],
    );
    let sel = path(&dir, "sel.json");
    ok(&[
        "select", "--data", &data, "--k", "10", "--lambda", "1e4", "--seed", "1", "-o", &sel,
    ]);
    let s = json_file(&sel);
    assert_eq!(s["indices"].as_array().unwrap().len(), 10);
    assert_eq!(s["config"]["method"], "ffs");

    let labels = path(&dir, "labels.txt");
    let metrics = path(&dir, "m.json");
    ok(&[
        "cluster",
        "--data",
        &data,
        "--exemplars",
        &sel,
        "--lambda",
        "1e4",
        "--t",
        "5",
        "--labels-out",
        &labels,
        "--metrics-out",
        &metrics,
    ]);
    let m = json_file(&metrics);
    assert!(m["accuracy"].as_f64().unwrap() >= 99.0, "{m}");
    assert!((m["sp_rate"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    assert_eq!(fs::read_to_string(&labels).unwrap().lines().count(), 60);

    let truth = path(&dir, "truth.txt");
    let rows = fs::read_to_string(&data).unwrap();
    let t: String = rows
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().to_string() + "\n")
        .collect();
    fs::write(&truth, t).unwrap();
    let v: Value =
        serde_json::from_str(&ok(&["eval", "--truth", &truth, "--pred", &labels])).unwrap();
    assert_eq!(v["accuracy"], m["accuracy"]);

    let cm = path(&dir, "cm.json");
    ok(&[
        "classify",
        "--data",
        &data,
        "--exemplars",
        &sel,
        "--lambda",
        "1e4",
        "--metrics-out",
        &cm,
    ]);
    assert_eq!(json_file(&cm)["accuracy"], 100.0);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let data = synth(
        &dir,
        "d.csv",
        &[
            "--D", "6", "--dims", "2,2", "--counts", "20,30", "--seed", "9",
        ],
    );
    let a = ok(&["cluster", "--data", &data, "--k", "6", "--seed", "4"]);
    let b = ok(&[
        "cluster",
        "--data",
        &data,
        "--k",
        "6",
        "--seed",
        "4",
        "--threads",
        "1",
    ]);
    let strip = |s: &str| {
        let mut v: Value = serde_json::from_str(s).unwrap();
        v["config"]["threads"] = Value::Null;
        v
    };
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(
        a,
        ok(&["cluster", "--data", &data, "--k", "6", "--seed", "4"])
    );
}

#[test]
fn intersecting_pair_pipeline_reports_metrics() {
    // Two 3-dim subspaces of R^5 share a line; accuracy here is data dependent.
    let dir = TempDir::new().unwrap();
    let data = synth(
        &dir,
        "d.csv",
        &[
            "--D", "5", "--dims", "3,3", "--counts", "50,50", "--seed", "0",
        ],
    );
    let v: Value = serde_json::from_str(&ok(&[
        "cluster", "--data", &data, "--k", "25", "--lambda", "1e4", "--t", "3",
    ]))
    .unwrap();
    let acc = v["accuracy"].as_f64().unwrap();
    assert!((50.0..=100.0).contains(&acc));
    assert!(v["imbalance"].as_f64().unwrap() <= 1.0);
}

#[test]
fn bad_flags_exit_nonzero() {
    let dir = TempDir::new().unwrap();
    let data = synth(
        &dir,
        "d.csv",
        &["--D", "4", "--dims", "2", "--counts", "10"],
    );
    for args in [
        vec!["select", "--data", &data, "--k", "3", "--lambda", "0.5"],
        vec!["select", "--data", &data, "--k", "50"],
        vec!["select", "--data", "/nonexistent.csv", "--k", "2"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(serde_json::from_slice::<Value>(&out.stderr).is_ok());
    }
    assert!(Path::new(&data).exists());
}
