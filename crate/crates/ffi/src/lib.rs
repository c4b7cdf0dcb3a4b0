//! C interface. Objects are opaque handles released with their `_free`
//! function; strings returned through out-pointers are released with
//! [`bdq_string_free`]. Every call returns a [`BdqStatus`]; the message of
//! the last failure on the calling thread is available from
//! [`bdq_last_error`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bdquant::ball::{build_qmm, verify_qmm, Conventions, Mutation, QmmTable};
use bdquant::cohomology::h2_report;
use bdquant::lie::{AlgebraJson, LieAlgebra};
use bdquant::psd::{build_psd, PsdSpec};
use bdquant::star::NuSeries;
use bdquant::su1n::build_su1n;
use bdquant::{Error, Scalar};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BdqStatus {
    Ok = 0,
    /// a verification ran and failed
    VerifyFailed = 1,
    /// malformed input or violated precondition
    InvalidInput = 2,
    NullPointer = 3,
    /// the algebra violates the Jacobi identity
    Jacobi = 4,
    Internal = 5,
}

/// Lie algebra with exact rational structure constants.
pub struct BdqAlgebra {
    inner: LieAlgebra,
}

/// Quantum moment map table of su(1,N).
pub struct BdqQmmTable {
    inner: QmmTable,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> BdqStatus {
    match e {
        Error::Jacobi(_) => BdqStatus::Jacobi,
        Error::NotIntegrable(_) | Error::Calibration(_) => BdqStatus::VerifyFailed,
        _ => BdqStatus::InvalidInput,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (BdqStatus, String)>) -> BdqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BdqStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            BdqStatus::Internal
        }
    }
}

fn lib(e: Error) -> (BdqStatus, String) {
    (status_of(&e), e.to_string())
}

fn null() -> (BdqStatus, String) {
    (BdqStatus::NullPointer, "null pointer argument".into())
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, (BdqStatus, String)> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (BdqStatus::InvalidInput, "string is not UTF-8".into()))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), (BdqStatus, String)> {
    let c = CString::new(s).map_err(|_| (BdqStatus::Internal, "nul byte in output".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn json_err(e: serde_json::Error) -> (BdqStatus, String) {
    (BdqStatus::InvalidInput, format!("json error: {e}"))
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bdq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn bdq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an algebra JSON document; fails with `Jacobi` on invalid brackets.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bdq_algebra_from_json(
    json: *const c_char,
    out: *mut *mut BdqAlgebra,
) -> BdqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let j: AlgebraJson = serde_json::from_str(str_arg(json)?).map_err(json_err)?;
        let inner = LieAlgebra::from_json(&j).map_err(lib)?;
        *out = Box::into_raw(Box::new(BdqAlgebra { inner }));
        Ok(())
    })
}

/// Builds a Pyatetskii-Shapiro algebra from a spec JSON document.
///
/// # Safety
/// `spec_json` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bdq_psd_build(
    spec_json: *const c_char,
    out: *mut *mut BdqAlgebra,
) -> BdqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let spec: PsdSpec = serde_json::from_str(str_arg(spec_json)?).map_err(json_err)?;
        let psd = build_psd(&spec).map_err(lib)?;
        *out = Box::into_raw(Box::new(BdqAlgebra { inner: psd.algebra }));
        Ok(())
    })
}

/// Realified su(1,N) in the adapted basis.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bdq_su1n_build(n: usize, out: *mut *mut BdqAlgebra) -> BdqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let model = build_su1n(n).map_err(lib)?;
        *out = Box::into_raw(Box::new(BdqAlgebra {
            inner: model.algebra,
        }));
        Ok(())
    })
}

/// # Safety
/// `alg` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bdq_algebra_dim(alg: *const BdqAlgebra, out: *mut usize) -> BdqStatus {
    guard(|| {
        let alg = alg.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        *out = alg.inner.dim();
        Ok(())
    })
}

/// `dim H²` with trivial coefficients.
///
/// # Safety
/// `alg` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bdq_algebra_h2(alg: *const BdqAlgebra, out: *mut usize) -> BdqStatus {
    guard(|| {
        let alg = alg.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        *out = h2_report(&alg.inner).h2;
        Ok(())
    })
}

/// # Safety
/// `alg` must be a live handle and `out` writable; free the result with
/// [`bdq_string_free`].
#[no_mangle]
pub unsafe extern "C" fn bdq_algebra_to_json(
    alg: *const BdqAlgebra,
    out: *mut *mut c_char,
) -> BdqStatus {
    guard(|| {
        let alg = alg.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        let s = serde_json::to_string(&alg.inner.to_json()).map_err(json_err)?;
        put_string(out, s)
    })
}

/// # Safety
/// `alg` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn bdq_algebra_free(alg: *mut BdqAlgebra) {
    if !alg.is_null() {
        drop(Box::from_raw(alg));
    }
}

/// Quantum moment map table for su(1,N) with constant `alpha` given as a
/// rational string such as `"1"` or `"3/2"`.
///
/// # Safety
/// `alpha` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bdq_qmm_build(
    n: usize,
    alpha: *const c_char,
    out: *mut *mut BdqQmmTable,
) -> BdqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let a: Scalar = str_arg(alpha)?
            .parse()
            .map_err(|e: Error| (BdqStatus::InvalidInput, e.to_string()))?;
        let model = build_su1n(n).map_err(lib)?;
        let nv = 2 * model.layout.n;
        let inner = build_qmm(
            &model,
            &NuSeries::constant(nv, a, 2),
            &Conventions::standard(n),
        )
        .map_err(lib)?;
        *out = Box::into_raw(Box::new(BdqQmmTable { inner }));
        Ok(())
    })
}

/// Copy of the table without the `(N-1)ν²` term.
///
/// # Safety
/// `table` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bdq_qmm_drop_nu2(
    table: *const BdqQmmTable,
    out: *mut *mut BdqQmmTable,
) -> BdqStatus {
    guard(|| {
        let t = table.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        let inner = t.inner.mutate(&Mutation::DropNu2).map_err(lib)?;
        *out = Box::into_raw(Box::new(BdqQmmTable { inner }));
        Ok(())
    })
}

/// Checks the quantum moment map law on all basis pairs through `ν^order`
/// (`0` selects the natural termination order). Returns `VerifyFailed` when
/// some pair has a nonzero residual; `failing` receives their count.
///
/// # Safety
/// `table` must be a live handle; `failing` may be null.
#[no_mangle]
pub unsafe extern "C" fn bdq_qmm_verify(
    table: *const BdqQmmTable,
    order: usize,
    failing: *mut usize,
) -> BdqStatus {
    let mut verdict = BdqStatus::Ok;
    let st = guard(|| {
        let t = table.as_ref().ok_or_else(null)?;
        let k = if order == 0 {
            t.inner.natural_order()
        } else {
            order
        };
        let r = verify_qmm(&t.inner, k).map_err(lib)?;
        let n = r.failures().count();
        if !failing.is_null() {
            *failing = n;
        }
        if n > 0 {
            verdict = BdqStatus::VerifyFailed;
            set_error(format!("{n} basis pairs fail"));
        }
        Ok(())
    });
    if st == BdqStatus::Ok {
        verdict
    } else {
        st
    }
}

/// # Safety
/// `table` must be a live handle and `out` writable; free the result with
/// [`bdq_string_free`].
#[no_mangle]
pub unsafe extern "C" fn bdq_qmm_to_json(
    table: *const BdqQmmTable,
    out: *mut *mut c_char,
) -> BdqStatus {
    guard(|| {
        let t = table.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        let s = serde_json::to_string(&t.inner.to_json()).map_err(json_err)?;
        put_string(out, s)
    })
}

/// # Safety
/// `table` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn bdq_qmm_free(table: *mut BdqQmmTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}
