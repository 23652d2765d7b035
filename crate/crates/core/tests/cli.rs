//! The `hb` front end: envelopes, exit codes, determinism.

use hbspace::cli::{run_with_env, EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION};
use serde_json::Value;

const HALF_ONE_PLUS_Z: &str = r#"{"num":{"coeffs":[[0.5,0],[0.5,0]]},"den":{"coeffs":[[1,0]]}}"#;

fn hb(args: &[&str]) -> (i32, Value) {
    run_with_env(std::iter::once("hb").chain(args.iter().copied()), None)
}

fn c(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("timing");
            m.remove("elapsed_ms");
            m.values_mut().for_each(strip_timing);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

#[test]
fn mate_half_one_plus_z() {
    let (code, doc) = hb(&["mate", "--b", HALF_ONE_PLUS_Z]);
    assert_eq!(code, EXIT_OK);
    let a = &doc["results"]["a"];
    let num = a["num"]["coeffs"].as_array().unwrap();
    let den = c(&a["den"]["coeffs"][0]).0;
    assert!((c(&num[0]).0 / den - 0.5).abs() < 1e-12);
    assert!((c(&num[1]).0 / den + 0.5).abs() < 1e-12);
    assert!(doc["results"]["residual"].as_f64().unwrap() <= 1e-10);
    assert_eq!(doc["results"]["boundary_zeros"][0]["mult"], 1);
    for key in ["command", "input", "config", "results", "residuals", "timing"] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
    assert_eq!(doc["config"]["seed"], hbspace::config::DEFAULT_SEED);
}

#[test]
fn verify_gives_strict_order_two() {
    let (code, doc) = hb(&["verify", "--b", HALF_ONE_PLUS_Z]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(doc["results"]["strict_order"], 2);
    assert_eq!(doc["input"]["mmax"], 12);
}

#[test]
fn kernel_with_negative_point() {
    let (code, doc) = hb(&["kernel", "--b", HALF_ONE_PLUS_Z, "--lambda", "-0.5,0", "--z", "0,0"]);
    assert_eq!(code, EXIT_OK);
    let (re, im) = c(&doc["results"]["kernel"]);
    assert!((re - 0.875).abs() < 1e-15 && im.abs() < 1e-15);
}

#[test]
fn gram_writes_file() {
    let path = std::env::temp_dir().join(format!("hb_gram_{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let (code, doc) = hb(&["gram", "--b", HALF_ONE_PLUS_Z, "--n", "2", "--out", p]);
    assert_eq!(code, EXIT_OK);
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(file, doc["results"]);
    let expect = [[2.0, 2.0], [2.0, 6.0]];
    for (i, row) in expect.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let (re, im) = c(&file["entries"][i][j]);
            assert!((re - v).abs() < 1e-12 && im.abs() < 1e-12);
        }
    }
}

#[test]
fn extend_and_model() {
    let (code, doc) = hb(&["extend", "--b0", r#"{"coeffs":[[0,0]]}"#, "--omega", "1,0", "--t", "3.141592653589793"]);
    assert_eq!(code, EXIT_OK);
    assert!((doc["results"]["s"].as_f64().unwrap() - 0.5).abs() < 1e-15);

    let steps = r#"[{"omega":[1,0],"t":3.141592653589793},{"omega":[0.5,0.5],"t":2.0}]"#;
    let (code, doc) = hb(&["model", "--steps", steps, "--verify"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(doc["results"]["report"]["strict_order"], 4);
    assert_eq!(doc["results"]["certificates"].as_array().unwrap().len(), 2);
}

#[test]
fn classify_and_cyclic() {
    let f = r#"{"coeffs":[[-1,0],[1,0]]}"#;
    let (code, doc) = hb(&["classify", "--b", HALF_ONE_PLUS_Z, "--f", f, "--oracle", "8"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(doc["results"]["descriptor"]["form"], "classified");
    assert!(doc["results"]["oracle"]["to_canonical"]["distance"].as_f64().unwrap() < 1e-6);
    let (code, doc) = hb(&["cyclic", "--b", HALF_ONE_PLUS_Z, "--f", f]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(doc["results"]["cyclic"], false);
    let (_, doc) = hb(&["cyclic", "--b", HALF_ONE_PLUS_Z, "--f", r#"{"coeffs":[[3,0],[1,0]]}"#]);
    assert_eq!(doc["results"]["cyclic"], true);
}

#[test]
fn file_input() {
    let path = std::env::temp_dir().join(format!("hb_b_{}.json", std::process::id()));
    std::fs::write(&path, HALF_ONE_PLUS_Z).unwrap();
    let (code, doc) = hb(&["mate", "--b", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, EXIT_OK);
    assert_eq!(doc["input"]["b"]["num"]["coeffs"][1][0], 0.5);
}

#[test]
fn validation_errors_exit_two() {
    assert_eq!(hb(&["mate", "--b", "{not json"]).0, EXIT_VALIDATION);
    assert_eq!(hb(&["mate", "--b", HALF_ONE_PLUS_Z, "--bogus"]).0, EXIT_VALIDATION);
    assert_eq!(hb(&["frobnicate"]).0, EXIT_VALIDATION);
    assert_eq!(hb(&["mate", "--b", "/nonexistent/b.json"]).0, EXIT_VALIDATION);
    // sup |b| > 1
    assert_eq!(hb(&["mate", "--b", r#"{"coeffs":[[0,0],[2,0]]}"#]).0, EXIT_VALIDATION);
    assert_eq!(hb(&["kernel", "--b", HALF_ONE_PLUS_Z, "--lambda", "1,x", "--z", "0"]).0, EXIT_VALIDATION);
    let (code, doc) = hb(&["extend", "--b0", r#"{"coeffs":[[0,0]]}"#, "--omega", "0,0", "--t", "1"]);
    assert_eq!(code, EXIT_VALIDATION);
    assert_eq!(doc["error"]["kind"], "validation");
}

#[test]
fn numerical_failure_exits_three() {
    let (code, doc) = hb(&["mate", "--b", HALF_ONE_PLUS_Z, "--tol", "1e-20"]);
    assert_eq!(code, EXIT_NUMERICAL);
    assert_eq!(doc["error"]["kind"], "numerical");
}

#[test]
fn seed_flag_and_env() {
    let (_, doc) = hb(&["--seed", "7", "verify", "--b", HALF_ONE_PLUS_Z]);
    assert_eq!(doc["config"]["seed"], 7);
    let args = ["hb", "verify", "--seed", "7", "--b", HALF_ONE_PLUS_Z];
    let (_, doc) = run_with_env(args, Some("11"));
    assert_eq!(doc["config"]["seed"], 11);
    assert_eq!(run_with_env(args, Some("eleven")).0, EXIT_VALIDATION);
}

#[test]
fn identical_config_gives_identical_json() {
    let b = r#"{"num":{"coeffs":[[0,0],[0.5,0]]},"den":{"coeffs":[[1,0],[-0.5,0]]}}"#;
    for args in [
        vec!["mate", "--b", b],
        vec!["verify", "--b", b, "--mmax", "4"],
        vec!["classify", "--b", b, "--f", r#"{"coeffs":[[-1,0],[1,0]]}"#, "--oracle", "6"],
    ] {
        let (_, mut x) = hb(&args);
        let (_, mut y) = hb(&args);
        strip_timing(&mut x);
        strip_timing(&mut y);
        assert_eq!(serde_json::to_string(&x).unwrap(), serde_json::to_string(&y).unwrap());
    }
}
