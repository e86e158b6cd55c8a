use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use censtail_ffi::*;

const Z: [f64; 5] = [1.0, 2.0, 3.0, 4.0, 5.0];
const D: [u8; 5] = [1, 0, 1, 1, 1];

fn tiny() -> *mut CensTailSample {
    let mut h = ptr::null_mut();
    let st = unsafe { censtail_sample_new(Z.as_ptr(), D.as_ptr(), Z.len(), &mut h) };
    assert_eq!(st, CensTailStatus::Ok);
    assert!(!h.is_null());
    h
}

fn last_error() -> String {
    let p = censtail_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn estimates_match_fixture() {
    let h = tiny();
    unsafe {
        assert_eq!(censtail_sample_len(h), 5);
        let mut v = 0.0;
        assert_eq!(
            censtail_estimate(h, CensTailEstimator::New, 3, &mut v),
            CensTailStatus::Ok
        );
        assert!((v - 0.274653).abs() < 1e-6);
        assert!(censtail_last_error_message().is_null());
        let mut p = 0.0;
        assert_eq!(censtail_p_hat(h, 4, &mut p), CensTailStatus::Ok);
        assert_eq!(p, 0.75);
        let (mut val, mut se, mut lo, mut hi) = (0.0, 0.0, 0.0, 0.0);
        let st = censtail_confidence_interval(
            h,
            CensTailEstimator::New,
            3,
            0.95,
            &mut val,
            &mut se,
            &mut lo,
            &mut hi,
        );
        assert_eq!(st, CensTailStatus::Ok);
        assert_eq!(val, v);
        assert!(lo <= val && val < hi && se > 0.0);
        let st = censtail_confidence_interval(
            h,
            CensTailEstimator::Ww1,
            3,
            0.95,
            &mut val,
            &mut se,
            &mut lo,
            &mut hi,
        );
        assert_eq!(st, CensTailStatus::Undefined);
        censtail_sample_free(h);
    }
}

#[test]
fn errors_map_to_codes() {
    let h = tiny();
    unsafe {
        let mut v = 0.0;
        assert_eq!(
            censtail_estimate(h, CensTailEstimator::Hill, 5, &mut v),
            CensTailStatus::KOutOfRange
        );
        assert!(last_error().contains("k=5"));
        assert_eq!(
            censtail_estimate(h, CensTailEstimator::New, 1, &mut v),
            CensTailStatus::KOutOfRange
        );
        assert_eq!(
            censtail_estimate(ptr::null(), CensTailEstimator::New, 3, &mut v),
            CensTailStatus::NullPointer
        );
        assert_eq!(
            censtail_estimate(h, CensTailEstimator::New, 3, ptr::null_mut()),
            CensTailStatus::NullPointer
        );
        assert_eq!(censtail_sample_len(ptr::null()), 0);
        // top observation censored: efg undefined at k = 1
        let z = [1.0, 2.0, 3.0];
        let d = [1u8, 1, 0];
        let mut g = ptr::null_mut();
        assert_eq!(
            censtail_sample_new(z.as_ptr(), d.as_ptr(), 3, &mut g),
            CensTailStatus::Ok
        );
        assert_eq!(
            censtail_estimate(g, CensTailEstimator::Efg, 1, &mut v),
            CensTailStatus::Undefined
        );
        let (mut a, mut b) = (0.0, 0.0);
        assert_eq!(
            censtail_gof_pvalues(g, 2, 10, 0, &mut a, &mut b),
            CensTailStatus::InvalidArgument
        );
        censtail_sample_free(g);
        censtail_sample_free(h);
        censtail_sample_free(ptr::null_mut());
    }
}

#[test]
fn constructor_rejects_bad_input() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(
            censtail_sample_new(Z.as_ptr(), D.as_ptr(), 0, &mut h),
            CensTailStatus::EmptySample
        );
        assert!(h.is_null());
        assert_eq!(
            censtail_sample_new(ptr::null(), D.as_ptr(), 5, &mut h),
            CensTailStatus::NullPointer
        );
        let bad = [1.0, f64::NAN];
        assert_eq!(
            censtail_sample_new(bad.as_ptr(), D.as_ptr(), 2, &mut h),
            CensTailStatus::InvalidArgument
        );
        assert!(h.is_null());
        assert!(!last_error().is_empty());
    }
}

#[test]
fn gof_and_selection() {
    // deterministic Pareto-like sample with every third point censored
    let n = 300;
    let z: Vec<f64> = (1..=n)
        .map(|i| 1.0 / (1.0 - (i as f64 - 0.5) / n as f64))
        .collect();
    let d: Vec<u8> = (0..n).map(|i| u8::from(i % 3 != 0)).collect();
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(
            censtail_sample_new(z.as_ptr(), d.as_ptr(), n, &mut h),
            CensTailStatus::Ok
        );
        let (mut ks, mut cvm) = (0.0, 0.0);
        assert_eq!(
            censtail_gof_statistics(h, 50, &mut ks, &mut cvm),
            CensTailStatus::Ok
        );
        assert!(ks >= 0.0 && cvm >= 0.0);
        let (mut pk, mut pc) = (0.0, 0.0);
        assert_eq!(
            censtail_gof_pvalues(h, 50, 199, 4, &mut pk, &mut pc),
            CensTailStatus::Ok
        );
        assert!(pk > 0.0 && pk <= 1.0 && pc > 0.0 && pc <= 1.0);
        let (mut pk2, mut pc2) = (0.0, 0.0);
        censtail_gof_pvalues(h, 50, 199, 4, &mut pk2, &mut pc2);
        assert_eq!((pk, pc), (pk2, pc2));
        let mut k = 0usize;
        assert_eq!(
            censtail_select_k(h, CensTailEstimator::New, 0.3, 20, 299, &mut k),
            CensTailStatus::Ok
        );
        assert!((20..=299).contains(&k));
        assert_eq!(
            censtail_select_k(h, CensTailEstimator::New, 0.9, 20, 299, &mut k),
            CensTailStatus::InvalidArgument
        );
        censtail_sample_free(h);
    }
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/censtail.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "censtail_sample_new",
        "censtail_sample_free",
        "censtail_estimate",
        "censtail_select_k",
        "censtail_last_error_message",
        "typedef struct CensTailSample CensTailSample",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let src = format!(
        "#include \"{}\"\nint main(void) {{ return CENS_TAIL_STATUS_OK; }}\n",
        header.display()
    );
    let dir = tempfile_dir();
    let c = dir.join("probe.c");
    std::fs::write(&c, src).unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"])
        .arg(&c)
        .status()
        .expect("a C compiler on PATH");
    assert!(status.success());
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("censtail-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
