use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use nu_metric_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(nm_last_error_message()) }.to_string_lossy().into_owned()
}

fn plant(num: &[f64], den: &[f64], delay: f64) -> *mut NmPlant {
    let mut out = ptr::null_mut();
    let status = unsafe { nm_plant_new(num.as_ptr(), num.len(), den.as_ptr(), den.len(), delay, NmDomain::HalfPlane, &mut out) };
    assert_eq!(status, NmStatus::Ok, "{}", last_error());
    out
}

#[test]
fn distance_of_delay_pair() {
    let p1 = plant(&[0.0, 1.0], &[-1.0, 1.0], 1.0);
    let p2 = plant(&[0.0, 1.0], &[-2.0, 1.0], 1.0);
    let mut d = NmDistance { value: -1.0, sup_norm: 0.0, converged: false, condition_holds: false, marginal: true, rho_star: 0.0 };
    let status = unsafe { nm_distance(p1, p2, ptr::null(), &mut d) };
    assert_eq!(status, NmStatus::Ok);
    assert!((d.value - 1.0 / (3.0 * 2f64.sqrt())).abs() < 1e-4);
    assert!(d.converged && d.condition_holds && !d.marginal);
    assert_eq!(d.rho_star, 0.875);
    let cfg = NmScanConfig { k_min: 3, k_max: 8, ..nm_scan_default() };
    let status = unsafe { nm_distance(p1, p1, &cfg, &mut d) };
    assert_eq!(status, NmStatus::Ok);
    assert_eq!(d.value, 0.0);
    unsafe {
        nm_plant_free(p1);
        nm_plant_free(p2);
    }
}

#[test]
fn factorization_round_trip() {
    let json = CString::new(r#"{"num":[0,1],"den":[-1,1],"delay":1.0}"#).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { nm_plant_from_json(json.as_ptr(), &mut p) }, NmStatus::Ok);
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { nm_factorize(p, &mut f) }, NmStatus::Ok);
    assert!(unsafe { nm_factors_residual(f) } < 1e-10);
    assert!(unsafe { nm_factors_corona_gap(f) } > 1e-6);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { nm_factors_to_json(f, &mut s) }, NmStatus::Ok);
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["N"]["delay"], 1.0);
    assert_eq!(v["D"]["num"], serde_json::json!([-1.0, 1.0]));
    unsafe {
        nm_string_free(s);
        nm_factors_free(f);
        nm_plant_free(p);
    }
    assert!(unsafe { nm_factors_residual(ptr::null()) }.is_nan());
}

#[test]
fn eval_and_winding() {
    let mut z = ptr::null_mut();
    let (num, den) = ([0.0, 1.0], [1.0]);
    let status = unsafe { nm_plant_new(num.as_ptr(), 2, den.as_ptr(), 1, 0.0, NmDomain::Disk, &mut z) };
    assert_eq!(status, NmStatus::Ok);
    let mut v = NmComplex { re: 0.0, im: 0.0 };
    assert_eq!(unsafe { nm_plant_eval(z, NmComplex { re: 0.3, im: -0.2 }, &mut v) }, NmStatus::Ok);
    assert_eq!(v, NmComplex { re: 0.3, im: -0.2 });
    let mut w = NmWinding { winding: 0, min_modulus: 0.0, refinement_depth: 0 };
    assert_eq!(unsafe { nm_winding(z, 0.5, 256, 1e-9, &mut w) }, NmStatus::Ok);
    assert_eq!(w.winding, 1);
    assert!((w.min_modulus - 0.5).abs() < 1e-12);
    unsafe { nm_plant_free(z) };
}

#[test]
fn margin_and_classical() {
    let p = plant(&[1.0], &[-1.0, 1.0], 0.0);
    let good = plant(&[-2.0], &[1.0], 0.0);
    let bad = plant(&[2.0], &[1.0], 0.0);
    let mut m = NmMargin { mu: -1.0, h_norm: 0.0, stabilized: false };
    assert_eq!(unsafe { nm_margin(p, good, ptr::null(), &mut m) }, NmStatus::Ok);
    assert!(m.stabilized && m.mu > 0.0 && (m.mu - 1.0 / m.h_norm).abs() < 1e-12);
    assert_eq!(unsafe { nm_margin(p, bad, ptr::null(), &mut m) }, NmStatus::Ok);
    assert!(!m.stabilized && m.mu == 0.0 && m.h_norm.is_nan());
    let mut d = 0.0;
    assert_eq!(unsafe { nm_distance_classical(p, good, 1024, &mut d) }, NmStatus::Ok);
    assert!(d > 0.0 && d <= 1.0);
    unsafe {
        nm_plant_free(p);
        nm_plant_free(good);
        nm_plant_free(bad);
    }
}

#[test]
fn error_codes_and_messages() {
    let mut out = ptr::null_mut();
    let den = [0.0];
    let num = [1.0];
    let status = unsafe { nm_plant_new(num.as_ptr(), 1, den.as_ptr(), 1, 0.0, NmDomain::HalfPlane, &mut out) };
    assert_eq!(status, NmStatus::Validation);
    assert!(!last_error().is_empty());
    assert!(out.is_null());

    let bad = CString::new("{\"num\": [1], \"den\": }").unwrap();
    assert_eq!(unsafe { nm_plant_from_json(bad.as_ptr(), &mut out) }, NmStatus::Parse);
    assert!(last_error().contains("line 1"));
    assert_eq!(unsafe { nm_plant_from_json(ptr::null(), &mut out) }, NmStatus::NullPointer);

    let delayed = plant(&[1.0], &[1.0, 1.0], 1.0);
    let mut d = 0.0;
    assert_eq!(unsafe { nm_distance_classical(delayed, delayed, 1024, &mut d) }, NmStatus::DelayNotAllowed);
    let mut v = NmComplex { re: 0.0, im: 0.0 };
    assert_eq!(unsafe { nm_plant_eval(delayed, NmComplex { re: 1.0, im: 0.0 }, &mut v) }, NmStatus::Domain);
    let cfg = NmScanConfig { samples0: 1000, ..nm_scan_default() };
    let mut dist = NmDistance { value: 0.0, sup_norm: 0.0, converged: false, condition_holds: false, marginal: false, rho_star: 0.0 };
    assert_eq!(unsafe { nm_distance(delayed, delayed, &cfg, &mut dist) }, NmStatus::LengthNotPowerOfTwo);
    assert_eq!(unsafe { nm_distance(delayed, ptr::null(), ptr::null(), &mut dist) }, NmStatus::NullPointer);

    let one = plant(&[1.0], &[1.0], 0.0);
    let mut m = NmMargin { mu: 0.0, h_norm: 0.0, stabilized: false };
    assert_eq!(unsafe { nm_margin(one, one, ptr::null(), &mut m) }, NmStatus::DegeneratePair);

    // a success clears the message
    assert_eq!(unsafe { nm_plant_eval(one, NmComplex { re: 0.0, im: 0.0 }, &mut v) }, NmStatus::Ok);
    assert!(last_error().is_empty());
    unsafe {
        nm_plant_free(delayed);
        nm_plant_free(one);
        nm_plant_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_interface() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/nu_metric.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "nm_plant_new", "nm_plant_from_json", "nm_plant_free", "nm_plant_eval", "nm_factorize",
        "nm_factors_residual", "nm_factors_corona_gap", "nm_factors_to_json", "nm_string_free",
        "nm_factors_free", "nm_scan_default", "nm_distance", "nm_distance_classical", "nm_margin",
        "nm_winding", "nm_last_error_message", "NM_STATUS_OK", "typedef struct NmPlant NmPlant",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
    // compile-check the header when a C compiler is around
    if let Ok(status) = Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"]).arg(&header).status() {
        assert!(status.success());
    }
}
