use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn docs_job(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/jobs").join(name)
}

fn wco_lab(args: &[&str], job: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wco-lab"))
        .args(args)
        .arg("--job")
        .arg(job)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[test]
fn moebius_unitary_is_unitary_and_self_adjoint() {
    let rep = report(&wco_lab(&["classify"], &docs_job("unitary_moebius_classify.json")));
    assert_eq!(rep["command"], "classify");
    assert_eq!(rep["result"]["verdicts"]["unitary"], true);
    assert_eq!(rep["result"]["verdicts"]["self_adjoint"], true);
    for c in rep["result"]["classifications"].as_array().unwrap() {
        if c["fired"] == true && (c["test"] == "unitary" || c["test"] == "self_adjoint") {
            assert!(c["residual"].as_f64().unwrap() <= 1e-10);
        }
    }
    assert!(rep["timing"]["elapsed_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn diagonal_spectrum_has_fifteen_products() {
    let rep = report(&wco_lab(&["spectrum"], &docs_job("diagonal_spectrum.json")));
    let exact = &rep["result"]["exact"];
    let ev = exact["eigenvalues"].as_array().unwrap();
    let idx = exact["indices"].as_array().unwrap();
    assert_eq!(ev.len(), 15);
    for (m, v) in idx.iter().zip(ev) {
        let (m1, m2) = (m[0].as_u64().unwrap() as i32, m[1].as_u64().unwrap() as i32);
        // (1/2)^m1 (i/3)^m2
        let modulus = 0.5f64.powi(m1) * (1.0 / 3.0f64).powi(m2);
        let angle = std::f64::consts::FRAC_PI_2 * m2 as f64;
        let (re, im) = (v[0].as_f64().unwrap(), v[1].as_f64().unwrap());
        assert!((re - modulus * angle.cos()).abs() < 1e-15 && (im - modulus * angle.sin()).abs() < 1e-15);
    }
    assert!(rep["result"]["matching_distance"].as_f64().unwrap() < 1e-12);
}

#[test]
fn vanishing_denominator_exits_with_domain_code() {
    let out = wco_lab(&["classify"], &docs_job("bad_denominator.json"));
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("denominator may vanish on the closed ball"));
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_job_exits_with_parse_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("job.json");
    std::fs::write(&path, r#"{"space": {"n": 1, "gamma": 1.0}, "operator": {}}"#).unwrap();
    assert_eq!(wco_lab(&["classify"], &path).status.code(), Some(2));
    std::fs::write(&path, "not json").unwrap();
    assert_eq!(wco_lab(&["classify"], &path).status.code(), Some(2));
    assert_eq!(wco_lab(&["classify"], &dir.path().join("missing.json")).status.code(), Some(2));
    std::fs::write(&path, r#"{"space": {"n": 1, "gamma": 0.0}, "operator": {"linear": [[[0.5, 0.0]]]}}"#).unwrap();
    assert_eq!(wco_lab(&["compress"], &path).status.code(), Some(3));
}

#[test]
fn repeated_runs_are_identical_up_to_timing() {
    let job = docs_job("automorphism_verify.json");
    let a = without_timing(report(&wco_lab(&["verify"], &job)));
    let b = without_timing(report(&wco_lab(&["verify"], &job)));
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let c = without_timing(report(&wco_lab(&["verify", "--seed", "18"], &job)));
    assert_ne!(a["result"]["transform_point"], c["result"]["transform_point"]);
}

#[test]
fn overrides_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let out = Command::new(env!("CARGO_BIN_EXE_wco-lab"))
        .args(["compress", "--degree", "2", "--tol-symbol", "1e-7", "--tol-matrix", "1e-6", "--out"])
        .arg(&out_path)
        .arg("--job")
        .arg(docs_job("self_adjoint_compress.json"))
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(rep["result"]["size"], 6);
    assert_eq!(rep["tolerances"]["symbol"], 1e-7);
    assert_eq!(rep["tolerances"]["matrix"], 1e-6);
}

#[test]
fn adjoint_output_composes_to_identity() {
    let dir = tempfile::tempdir().unwrap();
    let job_path = docs_job("unitary_moebius_classify.json");
    let adj = report(&wco_lab(&["adjoint"], &job_path));
    let mut job: Value = serde_json::from_str(&std::fs::read_to_string(&job_path).unwrap()).unwrap();
    job["second_operator"] = adj["result"]["adjoint"].clone();
    let path = dir.path().join("compose.json");
    std::fs::write(&path, job.to_string()).unwrap();
    let comp = report(&wco_lab(&["compose"], &path));
    let next = serde_json::json!({"space": job["space"], "operator": comp["result"]["product"]});
    std::fs::write(&path, next.to_string()).unwrap();
    let cl = report(&wco_lab(&["classify"], &path));
    assert_eq!(cl["result"]["identity"]["is_identity"], true);
}

#[test]
fn unknown_command_is_rejected() {
    let out = wco_lab(&["frobnicate"], &docs_job("diagonal_spectrum.json"));
    assert_eq!(out.status.code(), Some(2));
}
