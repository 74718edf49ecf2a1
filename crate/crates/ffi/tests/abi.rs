use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use fdfv_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(fdfv_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn stencil(name: &str) -> *mut FdfvStencil {
    let name = CString::new(name).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { fdfv_stencil_new(name.as_ptr(), &mut h) }, FdfvStatus::Ok);
    assert!(!h.is_null());
    h
}

#[test]
fn stencil_queries() {
    let h = stencil("2nd-backward");
    let (mut order, mut b0, mut lam) = (0u32, 0.0, 0.0);
    let rk = CString::new("rk3").unwrap();
    unsafe {
        assert_eq!(fdfv_stencil_order(h, &mut order), FdfvStatus::Ok);
        assert_eq!(fdfv_stencil_b0(h, &mut b0), FdfvStatus::Ok);
        assert_eq!(
            fdfv_stencil_max_courant(h, rk.as_ptr(), 1024, 1e-4, &mut lam),
            FdfvStatus::Ok
        );
        fdfv_stencil_free(h);
    }
    assert_eq!(order, 2);
    assert_eq!(b0, 6.0);
    assert!((lam - 0.409).abs() < 0.005, "{lam}");
}

#[test]
fn bad_arguments_report_status_and_message() {
    let bad = CString::new("7th-backward").unwrap();
    let mut h = ptr::NonNull::<FdfvStencil>::dangling().as_ptr();
    assert_eq!(
        unsafe { fdfv_stencil_new(bad.as_ptr(), &mut h) },
        FdfvStatus::InvalidArgument
    );
    assert!(h.is_null());
    assert!(last_error().contains("3rd-B-biased"), "{}", last_error());

    assert_eq!(
        unsafe { fdfv_stencil_new(ptr::null(), &mut h) },
        FdfvStatus::NullArgument
    );
    let invalid = [0xffu8, 0xfe, 0];
    assert_eq!(
        unsafe { fdfv_stencil_new(invalid.as_ptr().cast(), &mut h) },
        FdfvStatus::InvalidUtf8
    );

    let s = stencil("1st-backward");
    let rk = CString::new("rk9").unwrap();
    let mut lam = 0.0;
    assert_eq!(
        unsafe { fdfv_stencil_max_courant(s, rk.as_ptr(), 1024, 1e-4, &mut lam) },
        FdfvStatus::InvalidArgument
    );
    assert!(last_error().contains("rk5"));
    assert_eq!(unsafe { fdfv_stencil_b0(s, ptr::null_mut()) }, FdfvStatus::NullArgument);
    unsafe {
        fdfv_stencil_free(s);
        fdfv_stencil_free(ptr::null_mut());
        fdfv_run_free(ptr::null_mut());
    }
}

#[test]
fn run_from_json() {
    let cfg = CString::new(r#"{"problem": "square-wave", "scheme": "d2up-rk3", "n": 30}"#).unwrap();
    let mut r = ptr::null_mut();
    assert_eq!(
        unsafe { fdfv_run_json(cfg.as_ptr(), &mut r) },
        FdfvStatus::Ok,
        "{}",
        last_error()
    );
    let (mut cells, mut steps, mut cols) = (0, 0, 0);
    unsafe { fdfv_run_info(r, &mut cells, &mut steps, &mut cols) };
    assert_eq!(cells, 30);
    assert!(steps > 0);
    assert!(cols >= 1);
    let mut name = ptr::null();
    assert_eq!(unsafe { fdfv_run_column_name(r, 0, &mut name) }, FdfvStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(name) }.to_str().unwrap(), "u");
    assert_eq!(
        unsafe { fdfv_run_column_name(r, cols, &mut name) },
        FdfvStatus::InvalidArgument
    );

    let (mut x, mut u) = (vec![0.0; cells], vec![0.0; cells]);
    assert_eq!(
        unsafe { fdfv_run_averages(r, 0, x.as_mut_ptr(), u.as_mut_ptr(), cells) },
        FdfvStatus::Ok
    );
    assert!(x.windows(2).all(|w| w[1] > w[0]));
    let mass: f64 = u.iter().sum::<f64>() * 0.1;
    // One unit of the domain at 2, two at 1.
    assert!((mass - 4.0).abs() < 1e-12, "{mass}");
    assert_eq!(
        unsafe { fdfv_run_averages(r, 0, x.as_mut_ptr(), u.as_mut_ptr(), cells - 1) },
        FdfvStatus::InvalidArgument
    );
    let mut drift = 1.0;
    unsafe {
        assert_eq!(fdfv_run_conservation_drift(r, &mut drift), FdfvStatus::Ok);
        fdfv_run_free(r);
    }
    assert!(drift < 1e-12);
}

#[test]
fn run_errors_map_to_status() {
    let mut r = ptr::null_mut();
    let cases = [
        (r#"{"problem": "square-wave""#, FdfvStatus::InvalidArgument),
        (
            r#"{"problem": "nope", "scheme": "d1up-rk2", "n": 10}"#,
            FdfvStatus::InvalidArgument,
        ),
        (
            r#"{"problem": "advection-periodic", "scheme": "d1up-rk2", "n": 40, "cfl": 3.0, "t_final": 200}"#,
            FdfvStatus::BlowUp,
        ),
    ];
    for (json, want) in cases {
        let c = CString::new(json).unwrap();
        assert_eq!(
            unsafe { fdfv_run_json(c.as_ptr(), &mut r) },
            want,
            "{json}: {}",
            last_error()
        );
        assert!(r.is_null());
        assert!(!last_error().is_empty());
    }
}

#[test]
fn errors_are_per_thread() {
    let bad = CString::new("zzz").unwrap();
    let mut h = ptr::null_mut();
    unsafe { fdfv_stencil_new(bad.as_ptr(), &mut h) };
    let here = last_error();
    let there = std::thread::spawn(last_error).join().unwrap();
    assert!(!here.is_empty());
    assert!(there.is_empty());
}

/// Compiles a C program against the generated header and the static library.
#[test]
fn c_program_links_against_header() {
    let target_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = target_dir.join("libfdfv_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "fdfv.h"
int main(void) {
    FdfvStencil *s = NULL;
    if (fdfv_stencil_new("3rd-B-biased", &s) != FDFV_STATUS_OK) return 1;
    double lam = 0.0;
    if (fdfv_stencil_max_courant(s, "rk4", 1024, 1e-4, &lam) != FDFV_STATUS_OK) return 2;
    fdfv_stencil_free(s);
    if (fdfv_stencil_new("bogus", &s) != FDFV_STATUS_INVALID_ARGUMENT) return 3;
    printf("%.3f\n", lam);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("main");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status();
    let Ok(status) = status else {
        eprintln!("skipping: no C compiler");
        return;
    };
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0.808");
}
