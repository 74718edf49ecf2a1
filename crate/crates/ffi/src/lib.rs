//! C interface to the stencil analysis and the problem runner.
//!
//! Every function returns an [`FdfvStatus`]; on failure a message is kept
//! per thread and can be read with [`fdfv_last_error`]. Handles are opaque
//! and must be released with their `_free` function. Panics never cross
//! the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fdfv_core::ddo::{self, Stencil};
use fdfv_core::harness::{self, RunConfig, RunResult, RunSpec};
use fdfv_core::stability;
use fdfv_core::time_integration::{RkKind, RkScheme};
use fdfv_core::Error;

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdfvStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// A name, configuration or index was rejected.
    InvalidArgument = 3,
    /// The computation broke down (non-finite or non-physical state).
    BlowUp = 4,
    /// A file could not be read or written.
    Io = 5,
    /// An internal error; the message has details.
    Internal = 6,
}

/// A catalog stencil.
pub struct FdfvStencil {
    stencil: Stencil,
}

/// The final snapshot of a completed run.
pub struct FdfvRun {
    result: RunResult,
    columns: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: FdfvStatus, msg: impl AsRef<str>) -> FdfvStatus {
    set_error(msg.as_ref());
    status
}

fn from_core(e: Error) -> FdfvStatus {
    let status = if e.is_blow_up() {
        FdfvStatus::BlowUp
    } else if matches!(e, Error::Io { .. }) {
        FdfvStatus::Io
    } else {
        FdfvStatus::InvalidArgument
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning a panic into [`FdfvStatus::Internal`].
fn guard(f: impl FnOnce() -> Result<(), FdfvStatus>) -> FdfvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FdfvStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(FdfvStatus::Internal, format!("internal error: {msg}"))
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, FdfvStatus> {
    if p.is_null() {
        return Err(fail(FdfvStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(FdfvStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, FdfvStatus> {
    p.as_ref()
        .ok_or_else(|| fail(FdfvStatus::NullArgument, format!("{what} is null")))
}

unsafe fn write_out<T>(p: *mut T, value: T, what: &str) -> Result<(), FdfvStatus> {
    if p.is_null() {
        return Err(fail(FdfvStatus::NullArgument, format!("{what} is null")));
    }
    p.write(value);
    Ok(())
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fdfv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Looks up a catalog stencil such as `"3rd-B-biased"`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fdfv_stencil_new(name: *const c_char, out: *mut *mut FdfvStencil) -> FdfvStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(FdfvStatus::NullArgument, "out is null"));
        }
        out.write(ptr::null_mut());
        let name = read_str(name, "name")?;
        let stencil = ddo::catalog(name).map_err(|e| fail(FdfvStatus::InvalidArgument, e.to_string()))?;
        out.write(Box::into_raw(Box::new(FdfvStencil { stencil })));
        Ok(())
    })
}

/// Releases a stencil; null is ignored.
///
/// # Safety
/// `s` must come from [`fdfv_stencil_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fdfv_stencil_free(s: *mut FdfvStencil) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Designed order of accuracy.
///
/// # Safety
/// `s` must be a live stencil handle and `order` writable.
#[no_mangle]
pub unsafe extern "C" fn fdfv_stencil_order(s: *const FdfvStencil, order: *mut u32) -> FdfvStatus {
    guard(|| {
        let s = deref(s, "stencil")?;
        let r = ddo::analyze(&s.stencil, ddo::MAX_ANALYZED_ORDER)
            .map_err(|e| fail(FdfvStatus::InvalidArgument, e.to_string()))?;
        write_out(order, r.designed_order as u32, "order")
    })
}

/// `b_0`, the sum of the nodal moments, as a double.
///
/// # Safety
/// `s` must be a live stencil handle and `b0` writable.
#[no_mangle]
pub unsafe extern "C" fn fdfv_stencil_b0(s: *const FdfvStencil, b0: *mut f64) -> FdfvStatus {
    guard(|| {
        let s = deref(s, "stencil")?;
        write_out(b0, ddo::rational_to_f64(s.stencil.b0()), "b0")
    })
}

/// Largest stable Courant number of the stencil with Runge-Kutta scheme
/// `rk` (`"fe"`, `"rk2"` ... `"rk5"`); 0 when no positive value is stable.
///
/// # Safety
/// `s` must be a live stencil handle, `rk` a NUL-terminated string and
/// `courant` writable.
#[no_mangle]
pub unsafe extern "C" fn fdfv_stencil_max_courant(
    s: *const FdfvStencil,
    rk: *const c_char,
    theta_samples: usize,
    tol: f64,
    courant: *mut f64,
) -> FdfvStatus {
    guard(|| {
        let s = deref(s, "stencil")?;
        let kind: RkKind = read_str(rk, "rk")?
            .parse()
            .map_err(|e: fdfv_core::time_integration::UnknownScheme| {
                fail(FdfvStatus::InvalidArgument, e.to_string())
            })?;
        let v = stability::max_courant(&s.stencil, &RkScheme::new(kind), theta_samples, tol)
            .map_err(|e| fail(FdfvStatus::InvalidArgument, e.to_string()))?;
        write_out(courant, v, "courant")
    })
}

/// Runs a problem described by a JSON configuration (the same format the
/// command-line tool reads) to its final time.
///
/// # Safety
/// `config_json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fdfv_run_json(config_json: *const c_char, out: *mut *mut FdfvRun) -> FdfvStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(FdfvStatus::NullArgument, "out is null"));
        }
        out.write(ptr::null_mut());
        let text = read_str(config_json, "config_json")?;
        let cfg = RunConfig::from_json(text).map_err(from_core)?;
        let spec = RunSpec::from_config(&cfg).map_err(from_core)?;
        let result = harness::run(&spec).map_err(from_core)?;
        let columns = result
            .snapshot
            .columns
            .iter()
            .map(|c| CString::new(*c).expect("column names have no NUL"))
            .collect();
        out.write(Box::into_raw(Box::new(FdfvRun { result, columns })));
        Ok(())
    })
}

/// Releases a run; null is ignored.
///
/// # Safety
/// `r` must come from [`fdfv_run_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fdfv_run_free(r: *mut FdfvRun) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Number of cell averages, time steps taken, and output columns.
///
/// # Safety
/// `r` must be a live run handle; each output pointer may be null.
#[no_mangle]
pub unsafe extern "C" fn fdfv_run_info(
    r: *const FdfvRun,
    cells: *mut usize,
    steps: *mut usize,
    columns: *mut usize,
) -> FdfvStatus {
    guard(|| {
        let r = deref(r, "run")?;
        if let Some(c) = cells.as_mut() {
            *c = r.result.snapshot.averages.len();
        }
        if let Some(s) = steps.as_mut() {
            *s = r.result.steps;
        }
        if let Some(c) = columns.as_mut() {
            *c = r.columns.len();
        }
        Ok(())
    })
}

/// Name of output column `index`, owned by the run handle.
///
/// # Safety
/// `r` must be a live run handle and `name` writable.
#[no_mangle]
pub unsafe extern "C" fn fdfv_run_column_name(r: *const FdfvRun, index: usize, name: *mut *const c_char) -> FdfvStatus {
    guard(|| {
        let r = deref(r, "run")?;
        let c = r.columns.get(index).ok_or_else(|| {
            fail(
                FdfvStatus::InvalidArgument,
                format!("column {index} out of range (run has {})", r.columns.len()),
            )
        })?;
        write_out(name, c.as_ptr(), "name")
    })
}

/// Copies the cell-center x coordinates and the averages of column
/// `index` into caller buffers of `len` entries; `len` must equal the cell
/// count. Either buffer may be null.
///
/// # Safety
/// `r` must be a live run handle; non-null buffers must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fdfv_run_averages(
    r: *const FdfvRun,
    index: usize,
    x: *mut f64,
    values: *mut f64,
    len: usize,
) -> FdfvStatus {
    guard(|| {
        let r = deref(r, "run")?;
        let avgs = &r.result.snapshot.averages;
        if index >= r.columns.len() {
            return Err(fail(
                FdfvStatus::InvalidArgument,
                format!("column {index} out of range"),
            ));
        }
        if len != avgs.len() {
            return Err(fail(
                FdfvStatus::InvalidArgument,
                format!("buffer holds {len} values, run has {} cells", avgs.len()),
            ));
        }
        for (k, s) in avgs.iter().enumerate() {
            if !x.is_null() {
                x.add(k).write(s.x);
            }
            if !values.is_null() {
                values.add(k).write(s.values[index]);
            }
        }
        Ok(())
    })
}

/// Largest relative change of a conserved total over the run.
///
/// # Safety
/// `r` must be a live run handle and `drift` writable.
#[no_mangle]
pub unsafe extern "C" fn fdfv_run_conservation_drift(r: *const FdfvRun, drift: *mut f64) -> FdfvStatus {
    guard(|| {
        let r = deref(r, "run")?;
        write_out(drift, r.result.conservation_drift(), "drift")
    })
}
