use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::path::Path;
use std::process::Command;
use std::ptr;

use bdquant_ffi::*;

fn last_error() -> String {
    let p = bdq_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn take_string(p: *mut c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { bdq_string_free(p) };
    s
}

#[test]
fn psd_roundtrip_and_h2() {
    let spec = CString::new(r#"{"r":3,"n":[1,1,1]}"#).unwrap();
    let mut alg: *mut BdqAlgebra = ptr::null_mut();
    assert_eq!(
        unsafe { bdq_psd_build(spec.as_ptr(), &mut alg) },
        BdqStatus::Ok
    );
    let mut dim = 0usize;
    let mut h2 = 0usize;
    unsafe {
        assert_eq!(bdq_algebra_dim(alg, &mut dim), BdqStatus::Ok);
        assert_eq!(bdq_algebra_h2(alg, &mut h2), BdqStatus::Ok);
    }
    assert_eq!((dim, h2), (6, 3));
    let mut json: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { bdq_algebra_to_json(alg, &mut json) },
        BdqStatus::Ok
    );
    let text = CString::new(take_string(json)).unwrap();
    let mut back: *mut BdqAlgebra = ptr::null_mut();
    assert_eq!(
        unsafe { bdq_algebra_from_json(text.as_ptr(), &mut back) },
        BdqStatus::Ok
    );
    let mut json2: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { bdq_algebra_to_json(back, &mut json2) },
        BdqStatus::Ok
    );
    assert_eq!(take_string(json2), text.to_str().unwrap());
    unsafe {
        bdq_algebra_free(alg);
        bdq_algebra_free(back);
    }
}

#[test]
fn errors_are_reported() {
    let mut alg: *mut BdqAlgebra = ptr::null_mut();
    let bad = CString::new("{not json").unwrap();
    assert_eq!(
        unsafe { bdq_psd_build(bad.as_ptr(), &mut alg) },
        BdqStatus::InvalidInput
    );
    assert!(last_error().contains("json"));
    assert_eq!(
        unsafe { bdq_psd_build(ptr::null(), &mut alg) },
        BdqStatus::NullPointer
    );
    let jac = CString::new(
        r#"{"r":2,"n":[2,1],"cross_actions":[{"j":1,"k":2,"action":[{"source":0,"matrix":[["1","0"],["0","1"]]}]}]}"#,
    )
    .unwrap();
    assert_eq!(
        unsafe { bdq_psd_build(jac.as_ptr(), &mut alg) },
        BdqStatus::Jacobi
    );
    assert!(alg.is_null());
    assert_eq!(
        unsafe { bdq_su1n_build(0, &mut alg) },
        BdqStatus::InvalidInput
    );
    unsafe { bdq_algebra_free(ptr::null_mut()) };
}

#[test]
fn qmm_verify_and_mutation() {
    let alpha = CString::new("1").unwrap();
    let mut t: *mut BdqQmmTable = ptr::null_mut();
    assert_eq!(
        unsafe { bdq_qmm_build(2, alpha.as_ptr(), &mut t) },
        BdqStatus::Ok
    );
    let mut failing = usize::MAX;
    assert_eq!(unsafe { bdq_qmm_verify(t, 0, &mut failing) }, BdqStatus::Ok);
    assert_eq!(failing, 0);
    let mut m: *mut BdqQmmTable = ptr::null_mut();
    assert_eq!(unsafe { bdq_qmm_drop_nu2(t, &mut m) }, BdqStatus::Ok);
    assert_eq!(
        unsafe { bdq_qmm_verify(m, 0, &mut failing) },
        BdqStatus::VerifyFailed
    );
    assert!(failing > 0);
    let mut json: *mut c_char = ptr::null_mut();
    assert_eq!(unsafe { bdq_qmm_to_json(t, &mut json) }, BdqStatus::Ok);
    assert!(take_string(json).contains("\"N\":2"));
    let bad = CString::new("one").unwrap();
    let mut u: *mut BdqQmmTable = ptr::null_mut();
    assert_eq!(
        unsafe { bdq_qmm_build(2, bad.as_ptr(), &mut u) },
        BdqStatus::InvalidInput
    );
    unsafe {
        bdq_qmm_free(t);
        bdq_qmm_free(m);
    }
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/bdquant.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in [
        "bdq_psd_build",
        "bdq_qmm_verify",
        "bdq_last_error",
        "bdq_string_free",
        "BdqStatus",
    ] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", "-std=c99", "-Wall", "-Werror"])
        .arg(&header)
        .output()
    else {
        eprintln!("no C compiler; skipping syntax check");
        return;
    };
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
