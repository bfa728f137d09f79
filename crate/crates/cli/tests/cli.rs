//! Drives the `supbin` binary end to end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_supbin"))
}

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg(config).arg("--out").arg(out).args(extra).output().unwrap()
}

fn write_config(dir: &TempDir, doc: &Value) -> PathBuf {
    let path = dir.path().join("config.json");
    fs::write(&path, doc.to_string()).unwrap();
    path
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn read_csv(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(Result::unwrap).collect()
}

fn uniform_pair() -> Value {
    json!({"cardinalities": [2, 2], "mass": [[0.25, 0.25], [0.25, 0.25]]})
}

#[test]
fn binned_bc_equals_marton() {
    let dir = TempDir::new().unwrap();
    let out = run(&shipped("marton-compare.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let doc = read_json(&dir.path().join("result.json"));
    assert_eq!(doc["status"], "ok");
    assert_eq!(doc["result"]["equal"], true);
    assert!(!dir.path().join("error.json").exists());
}

#[test]
fn covering_sweep_switches_once() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&shipped("covering-sweep.json"), dir.path(), &[]).status.code(), Some(0));
    let rows = read_csv(&dir.path().join("covering.csv"));
    assert_eq!(rows.len(), 9);
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[5].parse().unwrap()))
        .collect();
    assert!(points.windows(2).all(|w| w[1].1 >= w[0].1), "{points:?}");
    for (rate, success) in points {
        if rate <= 0.4 {
            assert!(success <= 0.05, "{rate}: {success}");
        }
        if rate >= 0.5 {
            assert!(success >= 0.95, "{rate}: {success}");
        }
    }
}

#[test]
fn region_rows_keep_their_provenance() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&shipped("mac-capacity.json"), dir.path(), &[]).status.code(), Some(0));
    let rows = read_csv(&dir.path().join("inequalities.csv"));
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| !r[4].is_empty()));
    assert!(rows.iter().any(|r| r[4].contains(" + ")), "no combined rows");
}

#[test]
fn malformed_mass_names_the_field() {
    let dir = TempDir::new().unwrap();
    let out = run(&shipped("malformed-pmf.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = read_json(&dir.path().join("error.json"));
    assert_eq!(err["kind"], "validation");
    assert_eq!(err["field"], "params.p.mass");
    assert!(!dir.path().join("result.json").exists());
}

#[test]
fn missing_seed_and_unknown_fields_are_rejected() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (json!({"version": 1, "kind": "region-build", "params": {"scheme": "bc"}}), "seed"),
        (json!({"version": 1, "seed": 1, "kind": "region-build", "params": {"scheme": "bc", "x": 1}}), "params.x"),
        (json!({"version": 2, "seed": 1, "kind": "region-build", "params": {"scheme": "bc"}}), "version"),
    ];
    for (doc, field) in cases {
        let cfg = write_config(&dir, &doc);
        let out_dir = dir.path().join("out");
        assert_eq!(run(&cfg, &out_dir, &[]).status.code(), Some(2), "{doc}");
        let err = read_json(&out_dir.join("error.json"));
        assert_eq!(err["field"], field, "{err}");
    }
}

#[test]
fn oversized_codebook_is_refused() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        &json!({
            "version": 1, "seed": 1, "kind": "sim-bc-cm",
            "params": {
                "n": 200, "rates": {"r1": 0.5, "r2": 0.0}, "epsilon": 0.3, "trials": 1,
                "pe": uniform_pair(), "channel": {"type": "noiseless", "inputs": 4}
            }
        }),
    );
    let out = run(&cfg, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(read_json(&dir.path().join("error.json"))["kind"], "refused");
}

#[test]
fn failure_replaces_stale_result() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&shipped("info-eval.json"), dir.path(), &[]).status.code(), Some(0));
    assert!(dir.path().join("result.json").exists());
    assert_eq!(run(&shipped("malformed-pmf.json"), dir.path(), &[]).status.code(), Some(2));
    assert!(!dir.path().join("result.json").exists());
    assert_eq!(run(&shipped("info-eval.json"), dir.path(), &[]).status.code(), Some(0));
    assert!(!dir.path().join("error.json").exists());
}

#[test]
fn missing_config_is_an_io_failure() {
    let dir = TempDir::new().unwrap();
    let out = run(&dir.path().join("absent.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(read_json(&dir.path().join("error.json"))["kind"], "io");
}

#[test]
fn zero_threads_is_invalid() {
    let dir = TempDir::new().unwrap();
    let out = run(&shipped("info-eval.json"), dir.path(), &["--threads", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run(&shipped("bc-cm-noiseless.json"), &a, &["--threads", "1"]).status.code(), Some(0));
    assert_eq!(run(&shipped("bc-cm-noiseless.json"), &b, &["--threads", "4"]).status.code(), Some(0));
    for name in ["trials.csv", "summary.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn list_schemes_is_stable() {
    let out = bin().arg("list-schemes").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().map(|l| l.split(':').next().unwrap()).collect();
    assert_eq!(names, ["bc-cm", "mac-cm", "bc", "ifc", "marton", "hk"]);
    let again = bin().arg("list-schemes").output().unwrap();
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);
}

#[test]
fn version_flag() {
    let out = bin().arg("--version").output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("supbin "));
}
