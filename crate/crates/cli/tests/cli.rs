//! End-to-end tests of the `vqasvm` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn vqasvm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vqasvm")).args(args).env_remove("VQASVM_THREADS").output().expect("binary runs")
}

fn ok(args: &[&str]) -> Value {
    let out = vqasvm(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON object")
}

fn fail(args: &[&str]) -> Value {
    let out = vqasvm(args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    serde_json::from_str(err.trim_end()).expect("stderr is a JSON error object")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn csv_rows(p: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(p).unwrap();
    assert!(text.starts_with("# schema: "), "missing schema line in {}", p.display());
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn toy(dir: &TempDir, seed: &str, extra: &[&str]) {
    let mut args = vec!["generate-toy", "--out-dir", dir.path().to_str().unwrap(), "--seed", seed];
    args.extend_from_slice(extra);
    ok(&args);
}

fn write_dataset(path: &str, points: &str, labels: &str) {
    fs::write(path, format!("{{\"points\": {points}, \"labels\": {labels}, \"scaling\": {{\"min\": [-3.14, -3.14], \"max\": [3.14, 3.14]}}}}")).unwrap();
}

#[test]
fn generate_toy_defaults() {
    let dir = TempDir::new().unwrap();
    toy(&dir, "0", &[]);
    let train = read_json(&dir.path().join("train.json"));
    let test = read_json(&dir.path().join("test.json"));
    assert_eq!(train["points"].as_array().unwrap().len(), 4);
    assert_eq!(test["points"].as_array().unwrap().len(), 30);
    let mut labels: Vec<i64> = train["labels"].as_array().unwrap().iter().map(|v| v.as_i64().unwrap()).collect();
    labels.sort();
    assert_eq!(labels, vec![-1, -1, 1, 1]);
    let manifest = read_json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["config"]["seed"], 0);
    assert!(manifest["center_a"].is_array());

    let unbalanced = TempDir::new().unwrap();
    toy(&unbalanced, "0", &["--balance", "unbalanced"]);
    let l = read_json(&unbalanced.path().join("train.json"))["labels"].clone();
    assert_eq!(l.as_array().unwrap().iter().filter(|v| v.as_i64() == Some(1)).count(), 3);
}

#[test]
fn generate_toy_is_byte_identical() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    toy(&a, "11", &[]);
    toy(&b, "11", &[]);
    for f in ["train.json", "test.json", "manifest.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn train_exact_reports_small_residual_and_classifies() {
    let dir = TempDir::new().unwrap();
    toy(&dir, "2", &[]);
    let report = ok(&[
        "train", "--train", &p(&dir, "train.json"), "--out-dir", dir.path().to_str().unwrap(),
        "--fmap", "bloch", "--layers", "2", "--C", "inf", "--exact", "--max-iter", "4096",
    ]);
    let residual = report["residual"].as_f64().unwrap();
    assert!((-1e-6..=0.05).contains(&residual), "{residual}");
    assert_eq!(report["regularizer_evaluations"], 0);
    assert!(report["loss_evaluations"].as_u64().unwrap() > 0);

    let model = read_json(&dir.path().join("model.json"));
    assert_eq!(model["C"], "inf");
    assert_eq!(model["ansatz"]["m"], 2);
    let trace = csv_rows(&dir.path().join("trace.csv"));
    assert_eq!(trace.len(), report["iterations"].as_u64().unwrap() as usize);

    let cls = ok(&["classify", "--model", &p(&dir, "model.json"), "--test", &p(&dir, "test.json"), "--out", &p(&dir, "pred.csv")]);
    let rows = csv_rows(&dir.path().join("pred.csv"));
    assert_eq!(rows.len(), 30);
    assert_eq!(cls["rows"], 30);
    for (k, r) in rows.iter().enumerate() {
        assert_eq!(r[0], k.to_string());
        let v: f64 = r[1].parse().unwrap();
        assert_eq!(r[2], if v > 0.0 { "1" } else { "-1" });
    }
    assert!(cls["accuracy"].as_f64().unwrap() >= 29.0 / 30.0);
}

#[test]
fn shot_training_trace_is_reproducible() {
    let dir = TempDir::new().unwrap();
    toy(&dir, "4", &[]);
    let run = |out: &str| {
        ok(&[
            "train", "--train", &p(&dir, "train.json"), "--out-dir", &p(&dir, out), "--fmap", "bloch",
            "--layers", "2", "--shots", "8192", "--seed", "17", "--max-iter", "40",
        ]);
    };
    run("a");
    run("b");
    for f in ["model.json", "trace.csv"] {
        assert_eq!(fs::read(dir.path().join("a").join(f)).unwrap(), fs::read(dir.path().join("b").join(f)).unwrap());
    }
}

#[test]
fn thread_count_does_not_change_outputs() {
    let dir = TempDir::new().unwrap();
    toy(&dir, "6", &[]);
    let run = |out: &str, threads: &str| {
        ok(&[
            "--threads", threads, "train", "--train", &p(&dir, "train.json"), "--out-dir", &p(&dir, out),
            "--fmap", "bloch", "--layers", "2", "--shots", "256", "--max-iter", "40",
        ]);
        ok(&[
            "--threads", threads, "classify", "--model", &p(&dir, &format!("{out}/model.json")),
            "--test", &p(&dir, "test.json"), "--out", &p(&dir, &format!("{out}/pred.csv")), "--shots", "128",
        ]);
    };
    run("one", "1");
    run("four", "4");
    for f in ["model.json", "trace.csv", "pred.csv"] {
        assert_eq!(fs::read(dir.path().join("one").join(f)).unwrap(), fs::read(dir.path().join("four").join(f)).unwrap(), "{f}");
    }
}

#[test]
fn classify_rejects_empty_and_mismatched_input() {
    let dir = TempDir::new().unwrap();
    toy(&dir, "1", &[]);
    ok(&["train", "--train", &p(&dir, "train.json"), "--out-dir", dir.path().to_str().unwrap(), "--fmap", "bloch", "--layers", "1", "--max-iter", "40"]);
    fs::write(p(&dir, "empty.json"), r#"{"points": []}"#).unwrap();
    let err = fail(&["classify", "--model", &p(&dir, "model.json"), "--test", &p(&dir, "empty.json"), "--out", &p(&dir, "none.csv")]);
    assert!(err["error"].as_str().unwrap().contains("no points"));
    assert!(!dir.path().join("none.csv").exists());

    fs::write(p(&dir, "wide.json"), r#"{"points": [[0.1, 0.2, 0.3]]}"#).unwrap();
    fail(&["classify", "--model", &p(&dir, "model.json"), "--test", &p(&dir, "wide.json"), "--out", &p(&dir, "w.csv")]);
    assert!(!dir.path().join("w.csv").exists());

    fs::write(p(&dir, "unlabeled.json"), r#"{"points": [[0.1, 0.2], [-1.0, 2.0]]}"#).unwrap();
    let r = ok(&["classify", "--model", &p(&dir, "model.json"), "--test", &p(&dir, "unlabeled.json"), "--out", &p(&dir, "u.csv")]);
    assert!(r["accuracy"].is_null());
    assert_eq!(csv_rows(&dir.path().join("u.csv")).len(), 2);
}

#[test]
fn train_rejects_non_power_of_two() {
    let dir = TempDir::new().unwrap();
    let path = p(&dir, "three.json");
    write_dataset(&path, "[[0.1, 0.2], [0.3, 0.4], [0.5, 0.6]]", "[1, -1, 1]");
    let err = fail(&["train", "--train", &path, "--out-dir", dir.path().to_str().unwrap(), "--fmap", "bloch"]);
    assert!(err["error"].as_str().unwrap().contains("power of two"), "{err}");
}

#[test]
fn reference_solve_symmetric_pair() {
    let dir = TempDir::new().unwrap();
    let path = p(&dir, "pair.json");
    write_dataset(&path, "[[0.5, 0.0], [-0.5, 0.0]]", "[1, -1]");
    let out = p(&dir, "ref.json");
    ok(&["reference-solve", "--train", &path, "--out", &out, "--fmap", "bloch", "--lambda-sweep", "1,10,100"]);
    let doc = read_json(Path::new(&out));
    for a in doc["alpha"].as_array().unwrap() {
        assert!((a.as_f64().unwrap() - 0.5).abs() < 1e-6);
    }
    for a in doc["grid"]["alpha"].as_array().unwrap() {
        assert!((a.as_f64().unwrap() - 0.5).abs() < 1e-6);
    }
    assert!((doc["bridge"].as_f64().unwrap() - 1.0).abs() < 1e-5);
    let sweep = doc["sweep"].as_array().unwrap();
    assert_eq!(sweep.len(), 3);
    assert_eq!(sweep[1]["lambda"], 10.0);
    assert_eq!(doc["schema_version"], 1);
}

#[test]
fn scaling_bench_table() {
    let dir = TempDir::new().unwrap();
    let out = p(&dir, "scaling.csv");
    let timing = p(&dir, "timing.csv");
    let report = ok(&["scaling-bench", "--fmap", "zz", "--qubits", "4", "--out", &out, "--timing-out", &timing]);
    let rows = csv_rows(Path::new(&out));
    assert_eq!(rows.len(), 5);
    let depth: Vec<usize> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(depth.windows(2).all(|w| w[1] > w[0]));
    for r in &rows {
        let m: usize = r[0].parse().unwrap();
        assert_eq!(r[5], (m - 1).to_string());
        assert_eq!(r[6], m.to_string());
    }
    assert!(report["depth_fit"]["r2"].as_f64().unwrap() >= 0.99);
    assert_eq!(csv_rows(Path::new(&timing)).len(), 5);

    let again = p(&dir, "scaling2.csv");
    ok(&["scaling-bench", "--fmap", "zz", "--qubits", "4", "--out", &again, "--timing-reps", "1"]);
    assert_eq!(fs::read(&out).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn prepare_csv_iris() {
    let dir = TempDir::new().unwrap();
    let iris = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/iris.csv");
    let r = ok(&[
        "prepare-csv", "--input", iris.to_str().unwrap(), "--label-column", "species", "--positive", "setosa",
        "--m", "64", "--seed", "3", "--out-dir", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(r["train_rows"], 64);
    assert_eq!(r["test_rows"], 86);
    let train = read_json(&dir.path().join("train.json"));
    assert_eq!(train["scaling"]["min"].as_array().unwrap().len(), 4);
    let err = fail(&[
        "prepare-csv", "--input", iris.to_str().unwrap(), "--label-column", "species", "--positive", "setosa",
        "--m", "48", "--out-dir", dir.path().to_str().unwrap(),
    ]);
    assert!(err["error"].as_str().unwrap().contains("power of two"));
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = TempDir::new().unwrap();
    let path = p(&dir, "pair.json");
    write_dataset(&path, "[[0.5, 0.0], [-0.5, 0.0]]", "[1, -1]");
    let cfg = p(&dir, "run.cfg");
    fs::write(&cfg, "# reference settings\nfmap = bloch\nlambda = 3\nC = inf\n").unwrap();
    let out = p(&dir, "ref.json");
    ok(&["reference-solve", "--config", &cfg, "--train", &path, "--out", &out, "--lambda", "7"]);
    let doc = read_json(Path::new(&out));
    assert_eq!(doc["lambda"], 7.0);
    assert_eq!(doc["C"], "inf");

    fs::write(&cfg, "no_such_key = 1\n").unwrap();
    let err = fail(&["reference-solve", "--config", &cfg, "--train", &path, "--out", &out]);
    assert!(err["error"].as_str().unwrap().contains("no_such_key"), "{err}");
}

#[test]
fn errors_are_single_line_json() {
    let err = fail(&["train", "--bogus"]);
    assert!(err["error"].is_string());
    let err = fail(&["classify", "--model", "/nonexistent/model.json", "--test", "x", "--out", "y"]);
    assert!(err["error"].as_str().unwrap().contains("/nonexistent/model.json"));
}
