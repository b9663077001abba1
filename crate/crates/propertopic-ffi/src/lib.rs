//! C ABI over `propertopic`. Values cross the boundary as JSON strings and
//! opaque handles; every entry point returns a [`PtStatus`] and leaves a
//! message for [`pt_last_error`] when it is not `Ok`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use serde_json::Value;

use propertopic::graph::{evaluate, validate_decoration};
use propertopic::json::{element_from_json, element_to_json, graph_from_json, to_canonical_string};
use propertopic::presheaf::io::{ptset_from_json, ptset_to_json};
use propertopic::presheaf::{check_weak_n, psi_build, validate_presheaf, PtSet};
use propertopic::propertope::{Tower, Universe, UniverseSpec};
use propertopic::spec::{parse_spec, AlgebraSpec, PropSpec};
use propertopic::{Error, PropRef};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PtStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Failure = 4,
    Panic = 5,
}

/// A PROP built from a JSON spec.
pub struct PtProp {
    prop: PropRef,
}

/// A propertopic set.
pub struct PtPtSet {
    set: PtSet,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(PtStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse { .. } => PtStatus::Parse,
            _ => PtStatus::Failure,
        };
        Fail(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PtStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PtStatus::Ok,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside propertopic".into());
            PtStatus::Panic
        }
    }
}

unsafe fn json_arg(p: *const c_char, name: &str) -> Result<Value, Fail> {
    if p.is_null() {
        return Err(Fail(PtStatus::NullArgument, format!("`{name}` is null")));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Fail(PtStatus::InvalidUtf8, format!("`{name}`: {e}")))?;
    serde_json::from_str(s).map_err(|e| Fail(PtStatus::Parse, format!("`{name}`: {e}")))
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(PtStatus::NullArgument, format!("`{name}` is null")))
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(PtStatus::NullArgument, "output pointer is null".into()));
    }
    out.write(v);
    Ok(())
}

unsafe fn write_json(out: *mut *mut c_char, v: &Value) -> Result<(), Fail> {
    let s = CString::new(to_canonical_string(v)).map_err(|e| Fail(PtStatus::Failure, e.to_string()))?;
    write_out(out, s.into_raw())
}

/// The message of the last failed call on this thread, or null.
///
/// The pointer stays valid until the next `pt_` call on the same thread.
#[no_mangle]
pub extern "C" fn pt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must be null or a string returned through an `out` parameter of this
/// library that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn pt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a PROP from a JSON spec such as `{"kind": "terminal"}`.
///
/// # Safety
/// `spec_json` must be null or a NUL-terminated string and `out` must be
/// null or valid for writes. The handle is released with [`pt_prop_free`].
#[no_mangle]
pub unsafe extern "C" fn pt_prop_from_json(spec_json: *const c_char, out: *mut *mut PtProp) -> PtStatus {
    guard(|| {
        let spec: PropSpec = parse_spec(&json_arg(spec_json, "spec_json")?, "spec")?;
        let prop = spec.build()?;
        write_out(out, Box::into_raw(Box::new(PtProp { prop })))
    })
}

/// # Safety
/// `p` must be null or a handle from [`pt_prop_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pt_prop_free(p: *mut PtProp) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Writes the identifier of the PROP as a newly allocated string.
///
/// # Safety
/// `p` must be a live handle and `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pt_prop_id(p: *const PtProp, out: *mut *mut c_char) -> PtStatus {
    guard(|| {
        let p = handle(p, "p")?;
        let s = CString::new(p.prop.id().to_string()).map_err(|e| Fail(PtStatus::Failure, e.to_string()))?;
        write_out(out, s.into_raw())
    })
}

/// Decides whether a JSON element belongs to the PROP.
///
/// # Safety
/// `p` must be a live handle, `element_json` a NUL-terminated string and
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pt_prop_contains(p: *const PtProp, element_json: *const c_char, out: *mut bool) -> PtStatus {
    guard(|| {
        let p = handle(p, "p")?;
        let x = element_from_json(&json_arg(element_json, "element_json")?, "element")?;
        write_out(out, p.prop.contains(&x))
    })
}

/// Evaluates a decorated graph in the PROP and writes the resulting
/// element as JSON. Free it with [`pt_string_free`].
///
/// # Safety
/// `p` must be a live handle, `graph_json` a NUL-terminated string and
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pt_prop_eval_graph(p: *const PtProp, graph_json: *const c_char, out: *mut *mut c_char) -> PtStatus {
    guard(|| {
        let p = handle(p, "p")?;
        let (g, o, i) = graph_from_json(&json_arg(graph_json, "graph_json")?, "graph")?;
        let r = validate_decoration(&g, Some((&o, &i)));
        if let Some(v) = r.violations.first() {
            return Err(Fail(PtStatus::Failure, format!("{} at {}", v.rule, v.at)));
        }
        let x = evaluate(p.prop.as_ref(), &g)?;
        write_json(out, &element_to_json(&x))
    })
}

/// Builds ψ of an algebra spec up to dimension `bound`.
///
/// # Safety
/// `algebra_json` must be a NUL-terminated string and `out` valid for
/// writes. The handle is released with [`pt_ptset_free`].
#[no_mangle]
pub unsafe extern "C" fn pt_psi_build(algebra_json: *const c_char, bound: usize, seed: u64, out: *mut *mut PtPtSet) -> PtStatus {
    guard(|| {
        let spec: AlgebraSpec = parse_spec(&json_arg(algebra_json, "algebra_json")?, "algebra")?;
        if bound == 0 {
            return Err(Fail(PtStatus::Parse, "`bound` must be at least 1".into()));
        }
        let a = spec.build(seed)?;
        let tower = Tower::new(a.base.clone(), bound);
        let u = Universe::generate(
            &tower,
            &UniverseSpec {
                dim: bound,
                ..UniverseSpec::default()
            },
        )?;
        let set = psi_build(a.algebra.as_ref(), &tower, &u, a.n, bound)?;
        write_out(out, Box::into_raw(Box::new(PtPtSet { set })))
    })
}

/// Reads a propertopic set from JSON. `base` may be null when the set lives
/// over `T` or `I`.
///
/// # Safety
/// `json` must be a NUL-terminated string, `base` null or a live handle and
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pt_ptset_from_json(json: *const c_char, base: *const PtProp, bound: usize, out: *mut *mut PtPtSet) -> PtStatus {
    guard(|| {
        let v = json_arg(json, "json")?;
        let prop = match base.as_ref() {
            Some(p) => p.prop.clone(),
            None => {
                let id = v.get("base").and_then(Value::as_str).unwrap_or_default();
                PropSpec::from_id(id)
                    .ok_or_else(|| Fail(PtStatus::Parse, format!("pass a base PROP for `{id}`")))?
                    .build()?
            }
        };
        let tower = Tower::new(prop, bound.max(1));
        let set = ptset_from_json(&v, &tower)?;
        write_out(out, Box::into_raw(Box::new(PtPtSet { set })))
    })
}

/// # Safety
/// `x` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pt_ptset_free(x: *mut PtPtSet) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

/// Writes the set as JSON. Free it with [`pt_string_free`].
///
/// # Safety
/// `x` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pt_ptset_to_json(x: *const PtPtSet, out: *mut *mut c_char) -> PtStatus {
    guard(|| write_json(out, &ptset_to_json(&handle(x, "x")?.set)?))
}

/// The top dimension of the set.
///
/// # Safety
/// `x` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pt_ptset_bound(x: *const PtPtSet, out: *mut usize) -> PtStatus {
    guard(|| write_out(out, handle(x, "x")?.set.bound))
}

/// Checks the presheaf conditions and writes whether they hold. When
/// `report` is non-null it receives the violations as JSON.
///
/// # Safety
/// `x` must be a live handle, `ok` valid for writes and `report` null or
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pt_ptset_validate(x: *const PtPtSet, ok: *mut bool, report: *mut *mut c_char) -> PtStatus {
    guard(|| {
        let r = validate_presheaf(&handle(x, "x")?.set)?;
        if !report.is_null() {
            write_json(
                report,
                &serde_json::to_value(&r).map_err(|e| Fail(PtStatus::Failure, e.to_string()))?,
            )?;
        }
        write_out(ok, r.ok())
    })
}

/// Checks the weak-`n` filling conditions up to `bound` and writes whether
/// they hold. When `report` is non-null it receives the report as JSON.
///
/// # Safety
/// `x` must be a live handle, `passed` valid for writes and `report` null
/// or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pt_ptset_check_weak(
    x: *const PtPtSet,
    n: usize,
    bound: usize,
    passed: *mut bool,
    report: *mut *mut c_char,
) -> PtStatus {
    guard(|| {
        let x = handle(x, "x")?;
        let r = check_weak_n(&x.set, n, bound.min(x.set.bound))?;
        if !report.is_null() {
            write_json(
                report,
                &serde_json::to_value(&r).map_err(|e| Fail(PtStatus::Failure, e.to_string()))?,
            )?;
        }
        write_out(passed, r.passed())
    })
}
