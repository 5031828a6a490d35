//! C ABI over `qcrb-locc`.
//!
//! Objects are opaque heap handles released with their `_free` function.
//! Every call returns a [`QcrbStatus`]; on failure the message is available
//! from [`qcrb_last_error`] on the same thread. Strings returned by the
//! library are released with [`qcrb_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qcrb_locc::locc::{synthesize_for_family, verify_tree, MeasurementTree};
use qcrb_locc::metrology::{build_saturation_matrices, Thresholds, RANK_TOL};
use qcrb_locc::scenarios::{builtin, Scenario};
use qcrb_locc::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcrbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NonConvergence = 3,
    Panic = 4,
}

/// A named state family with its theta grid.
pub struct QcrbScenario {
    inner: Scenario,
}

/// An adaptive one-way LOCC measurement.
pub struct QcrbTree {
    inner: MeasurementTree,
}

/// Saturation check of a tree at one theta.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct QcrbVerifyReport {
    pub fisher_info: f64,
    pub qfi: f64,
    pub condition_residual: f64,
    pub regularity_residual: f64,
    pub saturating: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(e: Error) -> QcrbStatus {
    let status = if e.is_numerical() { QcrbStatus::NonConvergence } else { QcrbStatus::InvalidArgument };
    set_error(e.to_string());
    status
}

fn guard<F: FnOnce() -> Result<(), QcrbStatus>>(f: F) -> QcrbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QcrbStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            QcrbStatus::Panic
        }
    }
}

fn null(what: &str) -> QcrbStatus {
    set_error(format!("{what} is null"));
    QcrbStatus::NullPointer
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, QcrbStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        QcrbStatus::InvalidArgument
    })
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, QcrbStatus> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, QcrbStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Copies the last error message of this thread into `buf` (NUL
/// terminated, truncated to `cap`). Returns the full message length
/// without the NUL; 0 when there is no error.
///
/// # Safety
/// `buf` must be null or valid for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn qcrb_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| match &*e.borrow() {
        None => {
            if !buf.is_null() && cap > 0 {
                *buf = 0;
            }
            0
        }
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && cap > 0 {
                let n = bytes.len().min(cap - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn qcrb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Looks up a built-in scenario such as `"ghz3"` or `"chain4"`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcrb_scenario_builtin(name: *const c_char, out: *mut *mut QcrbScenario) -> QcrbStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let name = str_arg(name, "name")?;
        let inner = builtin(name).map_err(fail)?;
        *out = Box::into_raw(Box::new(QcrbScenario { inner }));
        Ok(())
    })
}

/// Parses a scenario from its JSON description.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcrb_scenario_from_json(json: *const c_char, out: *mut *mut QcrbScenario) -> QcrbStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let json = str_arg(json, "json")?;
        let inner = Scenario::from_json(json).map_err(fail)?;
        *out = Box::into_raw(Box::new(QcrbScenario { inner }));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qcrb_scenario_free(s: *mut QcrbScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Total Hilbert-space dimension.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcrb_scenario_dimension(s: *const QcrbScenario, out: *mut usize) -> QcrbStatus {
    guard(|| {
        let s = ref_arg(s, "scenario")?;
        *out_arg(out, "out")? = s.inner.family().layout().total();
        Ok(())
    })
}

/// Number of subsystems.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcrb_scenario_subsystems(s: *const QcrbScenario, out: *mut usize) -> QcrbStatus {
    guard(|| {
        let s = ref_arg(s, "scenario")?;
        *out_arg(out, "out")? = s.inner.family().layout().len();
        Ok(())
    })
}

/// Quantum Fisher information at `theta`.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcrb_qfi(s: *const QcrbScenario, theta: f64, out: *mut f64) -> QcrbStatus {
    guard(|| {
        let s = ref_arg(s, "scenario")?;
        let out = out_arg(out, "out")?;
        *out = build_saturation_matrices(s.inner.family(), theta, RANK_TOL).map_err(fail)?.sld.qfi;
        Ok(())
    })
}

/// Synthesizes a saturating tree. `order` lists 0-based subsystems; pass
/// null and 0 for the layout order.
///
/// # Safety
/// `s` must be a live handle; `order` must be null or valid for `order_len`
/// reads; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcrb_synthesize(
    s: *const QcrbScenario,
    theta: f64,
    order: *const usize,
    order_len: usize,
    out: *mut *mut QcrbTree,
) -> QcrbStatus {
    guard(|| {
        let s = ref_arg(s, "scenario")?;
        let out = out_arg(out, "out")?;
        let order: Vec<usize> = if order.is_null() {
            if order_len != 0 {
                return Err(null("order"));
            }
            (0..s.inner.family().layout().len()).collect()
        } else {
            std::slice::from_raw_parts(order, order_len).to_vec()
        };
        let inner = synthesize_for_family(s.inner.family(), theta, &order).map_err(fail)?;
        *out = Box::into_raw(Box::new(QcrbTree { inner }));
        Ok(())
    })
}

/// # Safety
/// `t` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qcrb_tree_free(t: *mut QcrbTree) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of leaves (outcomes) of a tree.
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcrb_tree_outcomes(t: *const QcrbTree, out: *mut usize) -> QcrbStatus {
    guard(|| {
        let t = ref_arg(t, "tree")?;
        *out_arg(out, "out")? = t.inner.leaves().len();
        Ok(())
    })
}

/// Serializes a tree; free the string with [`qcrb_string_free`].
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcrb_tree_to_json(t: *const QcrbTree, out: *mut *mut c_char) -> QcrbStatus {
    guard(|| {
        let t = ref_arg(t, "tree")?;
        let out = out_arg(out, "out")?;
        let json = t.inner.to_json().map_err(fail)?;
        *out = CString::new(json).expect("JSON has no NUL").into_raw();
        Ok(())
    })
}

/// Parses and validates a tree.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcrb_tree_from_json(json: *const c_char, out: *mut *mut QcrbTree) -> QcrbStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let json = str_arg(json, "json")?;
        let inner = MeasurementTree::from_json(json).map_err(fail)?;
        *out = Box::into_raw(Box::new(QcrbTree { inner }));
        Ok(())
    })
}

/// Checks whether a tree saturates the scenario's bound at `theta`.
///
/// # Safety
/// `t` and `s` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcrb_verify(
    t: *const QcrbTree,
    s: *const QcrbScenario,
    theta: f64,
    out: *mut QcrbVerifyReport,
) -> QcrbStatus {
    guard(|| {
        let t = ref_arg(t, "tree")?;
        let s = ref_arg(s, "scenario")?;
        let out = out_arg(out, "out")?;
        let r = verify_tree(&t.inner, s.inner.family(), theta, &Thresholds::default()).map_err(fail)?;
        *out = QcrbVerifyReport {
            fisher_info: r.fi,
            qfi: r.qfi,
            condition_residual: r.condition_residual,
            regularity_residual: r.regularity_residual,
            saturating: r.saturating,
        };
        Ok(())
    })
}
