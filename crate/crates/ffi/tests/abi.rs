use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use wco_lab_ffi::*;

fn c(re: f64, im: f64) -> WcoComplex {
    WcoComplex { re, im }
}

fn last_error() -> String {
    let p = wco_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

#[test]
fn run_job_returns_report() {
    let job = CString::new(
        r#"{"space": {"n": 1, "gamma": 2.0, "degree_cap": 6},
            "operator": {"moebius": [[0.5, 0.0]], "weight": {"normalized_kernel_at_inverse_zero": [1.0, 0.0]}}}"#,
    )
    .unwrap();
    let cmd = CString::new("classify").unwrap();
    let mut out: *mut std::ffi::c_char = ptr::null_mut();
    let st = unsafe { wco_run_job(job.as_ptr(), cmd.as_ptr(), &mut out) };
    assert_eq!(st, WcoStatus::Ok);
    let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    unsafe { wco_string_free(out) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["result"]["verdicts"]["unitary"], true);
    assert_eq!(v["result"]["verdicts"]["self_adjoint"], true);
}

#[test]
fn run_job_error_statuses() {
    let mut out: *mut std::ffi::c_char = ptr::null_mut();
    let bad = CString::new("{ not json").unwrap();
    assert_eq!(unsafe { wco_run_job(bad.as_ptr(), ptr::null(), &mut out) }, WcoStatus::Parse);
    assert!(last_error().starts_with("invalid job"));

    let vanishing = CString::new(
        r#"{"space": {"n": 1, "gamma": 1.0}, "command": "compress",
            "operator": {"map": {"a": [[[1.0, 0.0]]], "b": [[0.0, 0.0]], "c": [[2.0, 0.0]]}}}"#,
    )
    .unwrap();
    assert_eq!(unsafe { wco_run_job(vanishing.as_ptr(), ptr::null(), &mut out) }, WcoStatus::Domain);
    assert_eq!(last_error(), "denominator may vanish on the closed ball");
    assert_eq!(unsafe { wco_run_job(ptr::null(), ptr::null(), &mut out) }, WcoStatus::NullPointer);
}

#[test]
fn handles_classify_and_compress() {
    unsafe {
        let a = [c(0.3, 0.1), c(-0.2, 0.0)];
        let mut map: *mut WcoMap = ptr::null_mut();
        assert_eq!(wco_map_moebius(2, a.as_ptr(), &mut map), WcoStatus::Ok);
        let mut is_aut = false;
        assert_eq!(wco_map_is_automorphism(map, &mut is_aut), WcoStatus::Ok);
        assert!(is_aut);
        let mut img = [c(0.0, 0.0); 2];
        assert_eq!(wco_map_apply(map, [c(0.0, 0.0); 2].as_ptr(), img.as_mut_ptr()), WcoStatus::Ok);
        assert!((img[0].re - 0.3).abs() < 1e-15 && (img[1].re + 0.2).abs() < 1e-15);

        let mut u: *mut WcoOperator = ptr::null_mut();
        assert_eq!(wco_operator_new_unitary(2.0, map, c(0.0, 1.0), &mut u), WcoStatus::Ok);
        let mut bits = 0u32;
        assert_eq!(wco_operator_classify(u, 0.0, 0.0, &mut bits), WcoStatus::Ok);
        assert_ne!(bits & WCO_VERDICT_UNITARY, 0);
        assert_eq!(bits & WCO_VERDICT_SELF_ADJOINT, 0);

        let mut adj: *mut WcoOperator = ptr::null_mut();
        assert_eq!(wco_operator_adjoint(u, &mut adj), WcoStatus::Ok);
        let mut prod: *mut WcoOperator = ptr::null_mut();
        assert_eq!(wco_operator_product(u, adj, &mut prod), WcoStatus::Ok);
        let mut f = c(0.0, 0.0);
        assert_eq!(wco_operator_weight_at(prod, [c(0.1, 0.0), c(0.0, 0.2)].as_ptr(), &mut f), WcoStatus::Ok);
        assert!((f.re - 1.0).abs() < 1e-12 && f.im.abs() < 1e-12);

        let mut size = 0usize;
        assert_eq!(wco_operator_compress(prod, 3, ptr::null_mut(), 0, &mut size), WcoStatus::BufferTooSmall);
        assert_eq!(size, 10);
        let mut buf = vec![c(0.0, 0.0); size * size];
        assert_eq!(wco_operator_compress(prod, 3, buf.as_mut_ptr(), buf.len(), &mut size), WcoStatus::Ok);
        for i in 0..size {
            for j in 0..size {
                let want = if i == j { 1.0 } else { 0.0 };
                let z = buf[i * size + j];
                assert!((z.re - want).abs() < 1e-10 && z.im.abs() < 1e-10);
            }
        }
        let mut len = 0usize;
        assert_eq!(wco_basis_len(2, 3, &mut len), WcoStatus::Ok);
        assert_eq!(len, 10);

        wco_operator_free(prod);
        wco_operator_free(adj);
        wco_operator_free(u);
        wco_map_free(map);
        wco_operator_free(ptr::null_mut());
    }
}

#[test]
fn construction_errors() {
    unsafe {
        let mut map: *mut WcoMap = ptr::null_mut();
        let outside = [c(1.0, 0.0)];
        assert_eq!(wco_map_moebius(1, outside.as_ptr(), &mut map), WcoStatus::Domain);
        let (a, b, cc) = ([c(1.0, 0.0)], [c(0.0, 0.0)], [c(2.0, 0.0)]);
        assert_eq!(wco_map_new(1, a.as_ptr(), b.as_ptr(), cc.as_ptr(), c(1.0, 0.0), &mut map), WcoStatus::Domain);
        assert!(map.is_null());
        let grow = [c(2.0, 0.0)];
        let zero = [c(0.0, 0.0)];
        assert_eq!(wco_map_new(1, grow.as_ptr(), zero.as_ptr(), zero.as_ptr(), c(1.0, 0.0), &mut map), WcoStatus::Ok);
        let mut op: *mut WcoOperator = ptr::null_mut();
        assert_eq!(wco_operator_new_kernel(1.0, map, c(1.0, 0.0), ptr::null(), &mut op), WcoStatus::Domain);
        assert!(last_error().contains("not a self-map"));
        assert_eq!(wco_operator_new_unitary(1.0, map, c(1.0, 0.0), &mut op), WcoStatus::Domain);
        wco_map_free(map);
    }
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/wco_lab.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["wco_run_job", "wco_operator_compress", "WCO_STATUS_BUFFER_TOO_SMALL", "typedef struct WcoOperator WcoOperator"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .output()
    else {
        eprintln!("no C compiler found; syntax check skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
