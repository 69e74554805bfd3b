use std::path::PathBuf;

use ffdp_cli::{run, ExperimentConfig};
use serde_json::Value;

fn ffdp(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("ffdp").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = ffdp(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ffdp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

const RING: [&str; 6] = ["--q", "3", "--M", "t", "--Q", "t+1"];

fn with_ring<'a>(cmd: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd];
    v.extend(RING);
    v.extend(extra);
    v
}

#[test]
fn carlitz_printing() {
    assert_eq!(ffdp(&["carlitz", "--q", "2", "--M", "t", "--poly"]).1, "x^2 + t*x\n");
    assert_eq!(ffdp(&["carlitz", "--q", "3", "--M", "t", "--cyclotomic"]).1, "x^2 + t\n");
    let lapin = json(&["carlitz", "--q", "2", "--M", "t^6+t^3+1", "--Q", "t", "--ring"]);
    assert_eq!((lapin["f"].as_u64(), lapin["r"].as_u64(), lapin["n"].as_u64()), (Some(9), Some(7), Some(63)));
    assert_eq!(lapin["components"].as_array().unwrap().len(), 7);
}

#[test]
fn carlitz_errors() {
    let (code, _, err) = ffdp(&["carlitz", "--q", "3", "--M", "t", "--Q", "t", "--ring"]);
    assert_eq!(code, 2);
    assert!(err.contains("ramifies"), "{err}");
    let (code, _, err) = ffdp(&["carlitz", "--q", "3", "--M", "t+", "--poly"]);
    assert_eq!(code, 1);
    assert!(err.contains("position"), "{err}");
    assert_eq!(ffdp(&["carlitz", "--M", "t", "--poly"]).0, 1);
    assert_eq!(ffdp(&["carlitz", "--q", "6", "--M", "t", "--poly"]).0, 1);
    assert_eq!(ffdp(&["frobnicate"]).0, 1);
    assert_eq!(ffdp(&["--help"]).0, 0);
}

#[test]
fn facts_rows() {
    let sweep = json(&["facts", "--qs", "2", "--max-degree", "3"]);
    assert_eq!(sweep["mismatches"], 0);
    let row = &json(&["facts", "--q", "3", "--M", "t", "--Q", "t+1"])["rows"][0];
    assert_eq!((row["f"].as_u64(), row["r"].as_u64()), (Some(1), Some(2)));
    let lapin = &json(&["facts", "--q", "2", "--M", "t^6+t^3+1", "--Q", "t"])["rows"][0];
    assert_eq!((lapin["f"].as_u64(), lapin["r"].as_u64(), lapin["pass"].as_bool()), (Some(9), Some(7), Some(true)));
}

#[test]
fn reduce_outcomes() {
    let report = json(&with_ring("reduce", &["--noise", "bernoulli:0.1", "--seed", "42"]));
    assert_eq!(report["recovered"], true);
    assert_eq!(report["planted"], report["report"]["recovered_secret"].clone().into_array());
    assert!(report["report"].get("wall_time_secs").is_none());

    let exact = json(&with_ring("reduce", &["--noise", "bernoulli:0.0", "--repetitions", "1"]));
    let noisy = json(&with_ring("reduce", &["--noise", "bernoulli:0.0"]));
    assert!(exact["report"]["samples_used"].as_u64() < noisy["report"]["samples_used"].as_u64());

    let (code, out, err) = ffdp(&with_ring("reduce", &["--budget", "10"]));
    assert_eq!(code, 2);
    assert!(out.is_empty() && err.contains("secret not found"), "{err}");

    let timed = json(&with_ring("reduce", &["--timing", "--distinguisher", "planted"]));
    assert!(timed["report"]["wall_time_secs"].is_f64());
    assert_eq!(ffdp(&with_ring("reduce", &["--distinguisher", "oracle"])).0, 1);
    let module = json(&with_ring("reduce", &["--d", "2", "--noise", "bernoulli:0.05"]));
    assert_eq!(module["report"]["secrets"], module["planted"]);
}

trait IntoArray {
    fn into_array(self) -> Value;
}

impl IntoArray for Value {
    fn into_array(self) -> Value {
        Value::Array(vec![self])
    }
}

#[test]
fn normal_basis_and_normal_noise() {
    let path = scratch("basis.json");
    let p = path.to_str().unwrap();
    let args = ["normal-basis", "--q", "2", "--M", "t^2+t+1", "--Q", "t", "--out", p];
    assert_eq!(ffdp(&args).0, 0);
    let art: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(art["predicted_probability"], 0.375);
    assert!((art["empirical_probability"].as_f64().unwrap() - 0.375).abs() < 0.05);
    assert_eq!(art["matrix_invertible"], true);

    let sample = ["sample", "--q", "2", "--M", "t^2+t+1", "--Q", "t", "--noise", "normal:0.1", "--count", "5"];
    let (code, _, err) = ffdp(&sample);
    assert_eq!(code, 1);
    assert!(err.contains("--basis"), "{err}");
    let mut with_basis = sample.to_vec();
    with_basis.extend(["--basis", p]);
    let (code, out, _) = ffdp(&with_basis);
    assert_eq!((code, out.lines().count()), (0, 5));
    let (code, _, err) = ffdp(&["sample", "--q", "3", "--M", "t", "--Q", "t+1", "--noise", "normal:0.1", "--basis", p]);
    assert_eq!(code, 1, "{err}");

    let q3 = json(&["normal-basis", "--q", "3", "--M", "t", "--Q", "t+1", "--trials", "2000"]);
    assert_eq!(q3["predicted_fraction"], "4/9");
}

#[test]
fn sample_streams() {
    let (code, out, _) = ffdp(&with_ring("sample", &["--count", "0"]));
    assert_eq!((code, out.as_str()), (0, ""));
    let first = ffdp(&with_ring("sample", &["--count", "20", "--seed", "3"])).1;
    assert_eq!(first, ffdp(&with_ring("sample", &["--count", "20", "--seed", "3"])).1);
    assert_ne!(first, ffdp(&with_ring("sample", &["--count", "20", "--seed", "4"])).1);
    for line in first.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["a"].as_array().unwrap().len(), 2);
    }
    let module = ffdp(&with_ring("sample", &["--count", "2", "--d", "3"])).1;
    let v: Value = serde_json::from_str(module.lines().next().unwrap()).unwrap();
    assert_eq!(v["a"].as_array().unwrap().len(), 3);
    assert_eq!(ffdp(&with_ring("sample", &["--noise", "weight:3"])).0, 1);
}

#[test]
fn advantage_estimates() {
    let v = json(&with_ring("advantage", &["--trials", "400"]));
    assert!(v["estimate"]["advantage"].as_f64().unwrap() > 0.3);
    assert_eq!(ffdp(&with_ring("advantage", &["--trials", "50"])).0, 1);
    assert_eq!(ffdp(&with_ring("advantage", &["--hybrid", "3"])).0, 1);
}

#[test]
fn config_file_and_flag_precedence() {
    let cfg = ExperimentConfig {
        q: Some(3),
        m: Some("t".into()),
        q_mod: Some("t+1".into()),
        seed: Some(11),
        count: Some(4),
        ..Default::default()
    };
    let path = scratch("run.toml");
    std::fs::write(&path, cfg.to_text()).unwrap();
    let p = path.to_str().unwrap();
    let from_file = ffdp(&["sample", "--config", p]).1;
    assert_eq!(from_file, ffdp(&with_ring("sample", &["--seed", "11", "--count", "4"])).1);
    let overridden = ffdp(&["sample", "--config", p, "--count", "2"]).1;
    assert_eq!(overridden.lines().count(), 2);
    assert_eq!(ffdp(&["sample", "--config", "/nonexistent/run.toml"]).0, 1);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_ffdp");
    let status = |args: &[&str]| std::process::Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["carlitz", "--q", "2", "--M", "t", "--poly"]), Some(0));
    assert_eq!(status(&["carlitz", "--q", "2", "--M", "t^^2", "--poly"]), Some(1));
    assert_eq!(status(&with_ring("reduce", &["--budget", "10"])), Some(2));
}
