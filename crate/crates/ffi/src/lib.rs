//! C ABI over `presdist`.
//!
//! Objects cross the boundary as opaque handles created by `*_from_json` and
//! released by the matching `*_free`. Every fallible call returns a
//! [`PdStatus`]; on failure the message is available from
//! [`pd_last_error`] on the same thread. Strings returned through out
//! parameters are owned by the caller and released with [`pd_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_double, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use presdist::gadgets::Instance;
use presdist::ordered::project_x;
use presdist::{rational, Barcode, Error, Exponent, Grade2, MergeTreePresentation, Modulus, TwoParamPresentation};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    LimitExceeded = 5,
    Inconsistent = 6,
    Panic = 7,
}

pub struct PdMergeTree(MergeTreePresentation);

pub struct PdModule(TwoParamPresentation);

pub struct PdBarcode(Barcode);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(PdStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse(_) => PdStatus::Parse,
            Error::SizeLimitExceeded(_) => PdStatus::LimitExceeded,
            _ => PdStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(PdStatus::Parse, e.to_string())
    }
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

/// Runs `body`, recording any failure or panic as the thread's last error.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> PdStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            PdStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            PdStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(PdStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Failure(PdStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(h: *const T, what: &str) -> Result<&'a T, Failure> {
    h.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).expect("JSON output has no nul bytes").into_raw()
}

fn exponent(p: c_double) -> Result<Exponent, Failure> {
    Ok(Exponent::new(p)?)
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn pd_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn pd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` is null or was returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `json` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn pd_merge_tree_from_json(json: *const c_char, out: *mut *mut PdMergeTree) -> PdStatus {
    guard(|| {
        let tree: MergeTreePresentation = serde_json::from_str(text(json, "json")?)?;
        put(out, Box::into_raw(Box::new(PdMergeTree(tree))), "out")
    })
}

/// # Safety
/// `tree` is null or a live handle from [`pd_merge_tree_from_json`].
#[no_mangle]
pub unsafe extern "C" fn pd_merge_tree_free(tree: *mut PdMergeTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}

/// Elder-rule barcode of a merge tree.
///
/// # Safety
/// `tree` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn pd_merge_tree_barcode(tree: *const PdMergeTree, out: *mut *mut PdBarcode) -> PdStatus {
    guard(|| {
        let bar = handle(tree, "tree")?.0.barcode();
        put(out, Box::into_raw(Box::new(PdBarcode(bar))), "out")
    })
}

/// # Safety
/// `json` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn pd_module_from_json(json: *const c_char, out: *mut *mut PdModule) -> PdStatus {
    guard(|| {
        let module: TwoParamPresentation = serde_json::from_str(text(json, "json")?)?;
        put(out, Box::into_raw(Box::new(PdModule(module))), "out")
    })
}

/// # Safety
/// `module` is null or a live handle from [`pd_module_from_json`].
#[no_mangle]
pub unsafe extern "C" fn pd_module_free(module: *mut PdModule) {
    if !module.is_null() {
        drop(Box::from_raw(module));
    }
}

/// Dimension at the grade `(x, y)`, each given as a rational such as `"-3/2"`.
///
/// # Safety
/// `module` is a live handle; `x` and `y` are nul-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn pd_module_dim_at(module: *const PdModule, x: *const c_char, y: *const c_char, out: *mut usize) -> PdStatus {
    guard(|| {
        let pt = Grade2::new(rational::parse(text(x, "x")?)?, rational::parse(text(y, "y")?)?);
        put(out, handle(module, "module")?.0.dim_at(&pt), "out")
    })
}

/// Barcode of the projection onto the first coordinate; one interval per generator.
///
/// # Safety
/// `module` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn pd_module_projected_barcode(module: *const PdModule, out: *mut *mut PdBarcode) -> PdStatus {
    guard(|| {
        let bar = project_x(&handle(module, "module")?.0).barcode();
        put(out, Box::into_raw(Box::new(PdBarcode(bar))), "out")
    })
}

/// # Safety
/// `json` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn pd_barcode_from_json(json: *const c_char, out: *mut *mut PdBarcode) -> PdStatus {
    guard(|| {
        let bar: Barcode = serde_json::from_str(text(json, "json")?)?;
        put(out, Box::into_raw(Box::new(PdBarcode(bar))), "out")
    })
}

/// # Safety
/// `barcode` is null or a live barcode handle.
#[no_mangle]
pub unsafe extern "C" fn pd_barcode_free(barcode: *mut PdBarcode) {
    if !barcode.is_null() {
        drop(Box::from_raw(barcode));
    }
}

/// Number of intervals, counted with multiplicity.
///
/// # Safety
/// `barcode` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn pd_barcode_len(barcode: *const PdBarcode, out: *mut usize) -> PdStatus {
    guard(|| put(out, handle(barcode, "barcode")?.0.len(), "out"))
}

/// # Safety
/// `barcode` is a live handle; `out` is writable. Free the result with [`pd_string_free`].
#[no_mangle]
pub unsafe extern "C" fn pd_barcode_to_json(barcode: *const PdBarcode, out: *mut *mut c_char) -> PdStatus {
    guard(|| {
        let s = serde_json::to_string(&handle(barcode, "barcode")?.0)?;
        put(out, owned_string(s), "out")
    })
}

/// Optimal p-Wasserstein cost; `p` is at least 1 or `INFINITY`.
///
/// `out_pow_p` receives the p-th power as text (exact when `p` is an integer
/// or infinite); `out_value` receives the cost itself.
///
/// # Safety
/// `x` and `y` are live handles; out pointers are writable. Free the text with [`pd_string_free`].
#[no_mangle]
pub unsafe extern "C" fn pd_wasserstein(
    x: *const PdBarcode,
    y: *const PdBarcode,
    p: c_double,
    out_pow_p: *mut *mut c_char,
    out_value: *mut c_double,
) -> PdStatus {
    guard(|| {
        let p = exponent(p)?;
        let (cost, _) = presdist::matching::wasserstein(&handle(x, "x")?.0, &handle(y, "y")?.0, p);
        if out_pow_p.is_null() || out_value.is_null() {
            return Err(null("out"));
        }
        put(out_value, cost.value(), "out_value")?;
        put(out_pow_p, owned_string(cost.pow_p_text()), "out_pow_p")
    })
}

/// Gadget trees or modules of an instance `{"balpart": ...}` or `{"ci": ...}` as JSON.
///
/// # Safety
/// `instance` is nul-terminated; `out` is writable. Free the result with [`pd_string_free`].
#[no_mangle]
pub unsafe extern "C" fn pd_gadget_json(instance: *const c_char, p: c_double, field: u32, out: *mut *mut c_char) -> PdStatus {
    guard(|| {
        let inst: Instance = serde_json::from_str(text(instance, "instance")?)?;
        let p = exponent(p)?;
        let value = match &inst {
            Instance::Balpart(b) => {
                let t = presdist::gadgets::build_balpart_trees(b, p)?;
                serde_json::json!({"C": t.c, "M": t.m, "N": t.n})
            }
            Instance::Ci(c) => {
                let g = presdist::gadgets::build_ci_modules(c, p, Modulus::new(field)?)?;
                serde_json::json!({"C": g.c, "M": g.m, "N": g.n})
            }
        };
        put(out, owned_string(presdist::report::canonical_json(&value)?), "out")
    })
}

/// Solves, certifies and cross-checks an instance; writes the report as JSON.
///
/// Returns [`PdStatus::Inconsistent`] with the report still written when a
/// check fails. `limit` of 0 selects the solver default.
///
/// # Safety
/// `instance` is nul-terminated; `out` is writable. Free the result with [`pd_string_free`].
#[no_mangle]
pub unsafe extern "C" fn pd_pipeline_json(
    instance: *const c_char,
    p: c_double,
    field: u32,
    limit: u64,
    out: *mut *mut c_char,
) -> PdStatus {
    guard(|| {
        let inst: Instance = serde_json::from_str(text(instance, "instance")?)?;
        let limit = match (limit, &inst) {
            (0, Instance::Balpart(_)) => presdist::solvers::DEFAULT_BALPART_LIMIT,
            (0, Instance::Ci(_)) => presdist::solvers::DEFAULT_CI_LIMIT,
            (l, _) => l,
        };
        let report = presdist::pipeline::run(&inst, exponent(p)?, Modulus::new(field)?, limit)?;
        put(out, owned_string(presdist::report::canonical_json(&report)?), "out")?;
        if report.consistent() {
            Ok(())
        } else {
            Err(Failure(PdStatus::Inconsistent, "pipeline checks failed".into()))
        }
    })
}
