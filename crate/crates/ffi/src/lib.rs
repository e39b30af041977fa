//! C ABI over `reciprocal-core`.
//!
//! Objects cross the boundary as opaque handles owned by the caller and released
//! with the matching `rc_*_free`. Every fallible call returns an [`RcStatus`]; the
//! message of the last failure on the calling thread is kept for
//! [`rc_last_error`]. Strings returned through `char **` are released with
//! [`rc_string_free`].

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use reciprocal_core::liealg::{lrt, Generator, GeneratorFile};
use reciprocal_core::numerics::{self, Family, Grid, GridSolution};
use reciprocal_core::prolong::determining_residuals;
use reciprocal_core::suite::{run_criterion, SuiteConfig};
use reciprocal_core::symkernel::{self, Expr, Symbol};
use reciprocal_core::transforms::verify::verify_reciprocal_seeded;
use reciprocal_core::transforms::{catalog, CatalogEntry, MapFile, ReciprocalMap};
use reciprocal_core::Error;

/// Status codes. Zero is success; a completed check that fails is reported
/// through its `pass` output, not through the status.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidParams = 4,
    UnknownEntry = 5,
    Domain = 6,
    Numeric = 7,
    Input = 8,
    Symbolic = 9,
    Panic = 10,
}

/// A canonical rational expression.
pub struct RcExpr(Expr);

/// A reciprocal map.
pub struct RcMap(ReciprocalMap);

/// A generator with five field slots and the action on `dx, dy`.
pub struct RcGenerator(Generator);

/// Field values of a solution on a rectangular grid.
pub struct RcSolution(GridSolution);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> RcStatus {
    match e {
        Error::Parse { .. } | Error::DivisionByZeroAt { .. } => RcStatus::Parse,
        Error::InvalidParams(_) | Error::ParamConstraintViolated(_) | Error::GridTooSmall => RcStatus::InvalidParams,
        Error::UnknownCatalogEntry(_) | Error::UnknownVariable(_) | Error::UnboundSymbol(_) => RcStatus::UnknownEntry,
        Error::DomainViolation(_) => RcStatus::Domain,
        Error::NumericDomain(_) | Error::NewtonDivergence(_) => RcStatus::Numeric,
        Error::Input(_) => RcStatus::Input,
        _ => RcStatus::Symbolic,
    }
}

struct Fail(RcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            RcStatus::Ok
        }
        Ok(Err(Fail(s, m))) => {
            set_error(&m);
            s
        }
        Err(_) => {
            set_error("internal panic");
            RcStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(RcStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(RcStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(RcStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(RcStatus::NullPointer, "output pointer is null".into()));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(RcStatus::NullPointer, "output pointer is null".into()));
    }
    *out = CString::new(s).map_err(|_| Fail(RcStatus::Input, "string has an interior NUL".into()))?.into_raw();
    Ok(())
}

unsafe fn put_flag(out: *mut c_int, v: bool) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(RcStatus::NullPointer, "output pointer is null".into()));
    }
    *out = v as c_int;
    Ok(())
}

fn json_err(e: serde_json::Error) -> Fail {
    Fail(RcStatus::Input, e.to_string())
}

/// `{"name": "expr", ...}`; null or empty means no parameters.
unsafe fn params(p: *const c_char) -> Result<BTreeMap<String, Expr>, Fail> {
    if p.is_null() {
        return Ok(BTreeMap::new());
    }
    let raw: BTreeMap<String, String> = match text(p, "params")?.trim() {
        "" => BTreeMap::new(),
        s => serde_json::from_str(s).map_err(json_err)?,
    };
    let mut out = BTreeMap::new();
    for (k, v) in raw {
        out.insert(k, symkernel::parse(&v)?);
    }
    Ok(out)
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn rc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Version of the library as a static string.
#[no_mangle]
pub extern "C" fn rc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn rc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `src` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_expr_parse(src: *const c_char, out: *mut *mut RcExpr) -> RcStatus {
    guard(|| put(out, RcExpr(symkernel::parse(text(src, "source")?)?)))
}

/// Canonical text of an expression.
///
/// # Safety
/// `e` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_expr_to_string(e: *const RcExpr, out: *mut *mut c_char) -> RcStatus {
    guard(|| put_string(out, handle(e, "expression")?.0.to_string()))
}

/// Partial derivative with respect to a variable.
///
/// # Safety
/// `e` must be a live handle, `var` NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_expr_diff(e: *const RcExpr, var: *const c_char, out: *mut *mut RcExpr) -> RcStatus {
    guard(|| {
        let d = handle(e, "expression")?.0.diff(&Symbol::new(text(var, "variable")?));
        put(out, RcExpr(d))
    })
}

/// Writes 1 when the two expressions are equal as rational functions.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_expr_equal(a: *const RcExpr, b: *const RcExpr, out: *mut c_int) -> RcStatus {
    guard(|| put_flag(out, handle(a, "expression")?.0 == handle(b, "expression")?.0))
}

/// # Safety
/// `e` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn rc_expr_free(e: *mut RcExpr) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// A catalog map. `params_json` is an object of expression strings or null.
///
/// # Safety
/// `name` must be NUL-terminated, `params_json` NUL-terminated or null, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_map_catalog(
    name: *const c_char,
    params_json: *const c_char,
    out: *mut *mut RcMap,
) -> RcStatus {
    guard(|| {
        let name = text(name, "name")?;
        let m = match catalog(name, &params(params_json)?)? {
            CatalogEntry::Reciprocal(m) => m,
            CatalogEntry::Family(f) => f.map,
            CatalogEntry::Point(_) => return Err(Fail(RcStatus::Input, format!("`{name}` is a point map"))),
        };
        put(out, RcMap(m))
    })
}

/// A map from the JSON map layout (`R, U, V, P, H, form, params`).
///
/// # Safety
/// `json` must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_map_from_json(json: *const c_char, out: *mut *mut RcMap) -> RcStatus {
    guard(|| {
        let f: MapFile = serde_json::from_str(text(json, "json")?).map_err(json_err)?;
        put(out, RcMap(f.to_map()?))
    })
}

/// Symbolic reciprocity check; writes the verdict and, if `report` is not null, the JSON report.
///
/// # Safety
/// `m` must be a live handle, `pass` writable, `report` writable or null.
#[no_mangle]
pub unsafe extern "C" fn rc_map_verify(
    m: *const RcMap,
    seed: u64,
    pass: *mut c_int,
    report: *mut *mut c_char,
) -> RcStatus {
    guard(|| {
        let r = verify_reciprocal_seeded(&handle(m, "map")?.0, seed);
        put_flag(pass, r.pass)?;
        if !report.is_null() {
            put_string(report, serde_json::to_string(&r).map_err(json_err)?)?;
        }
        Ok(())
    })
}

/// # Safety
/// `m` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn rc_map_free(m: *mut RcMap) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// One of `X1`..`X5`, `Y`, `X_h`, `X_F`.
///
/// # Safety
/// `name` must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_generator_named(name: *const c_char, out: *mut *mut RcGenerator) -> RcStatus {
    guard(|| {
        let g = match text(name, "name")? {
            "X1" => lrt::x1(),
            "X2" => lrt::x2(),
            "X3" => lrt::x3(),
            "X4" => lrt::x4(),
            "X5" => lrt::x5(),
            "Y" => lrt::y(),
            "X_h" => lrt::x_h(),
            "X_F" => lrt::x_f(),
            n => return Err(Fail(RcStatus::UnknownEntry, format!("unknown generator `{n}`"))),
        };
        put(out, RcGenerator(g))
    })
}

/// A generator from the JSON layout (`zeta_rho .. zeta_S, form`).
///
/// # Safety
/// `json` must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_generator_from_json(json: *const c_char, out: *mut *mut RcGenerator) -> RcStatus {
    guard(|| {
        let f: GeneratorFile = serde_json::from_str(text(json, "json")?).map_err(json_err)?;
        put(out, RcGenerator(f.to_generator()?))
    })
}

/// Determining equations of the generator.
///
/// # Safety
/// `g` must be a live handle, `pass` writable, `report` writable or null.
#[no_mangle]
pub unsafe extern "C" fn rc_generator_verify(
    g: *const RcGenerator,
    pass: *mut c_int,
    report: *mut *mut c_char,
) -> RcStatus {
    guard(|| {
        let ds = determining_residuals(&handle(g, "generator")?.0)?;
        put_flag(pass, ds.is_satisfied())?;
        if !report.is_null() {
            put_string(report, serde_json::to_string(&ds.residuals).map_err(json_err)?)?;
        }
        Ok(())
    })
}

/// # Safety
/// `g` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn rc_generator_free(g: *mut RcGenerator) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Samples `constant`, `shear` or `vortex` on `[x0, x1] x [y0, y1]` with `n * n` nodes.
///
/// # Safety
/// `family` must be NUL-terminated, `params_json` NUL-terminated or null, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_solution_make(
    family: *const c_char,
    params_json: *const c_char,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    n: usize,
    out: *mut *mut RcSolution,
) -> RcStatus {
    guard(|| {
        let fam = Family::parse(text(family, "family")?)?;
        let g = Grid::rect(x0, x1, y0, y1, n, n)?;
        put(out, RcSolution(numerics::make_solution(fam, &params(params_json)?, g)?))
    })
}

/// The solution mapped by `m` and resampled on a primed grid.
///
/// # Safety
/// `s`, `m` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_solution_transform(
    s: *const RcSolution,
    m: *const RcMap,
    out: *mut *mut RcSolution,
) -> RcStatus {
    guard(|| {
        let t = numerics::transform_solution(&handle(s, "solution")?.0, &handle(m, "map")?.0)?;
        put(out, RcSolution(t))
    })
}

/// Grid origin, spacings and node counts.
///
/// # Safety
/// `s` must be a live handle; every output pointer writable.
#[no_mangle]
pub unsafe extern "C" fn rc_solution_grid(
    s: *const RcSolution,
    origin: *mut [f64; 2],
    spacing: *mut [f64; 2],
    nodes: *mut [usize; 2],
) -> RcStatus {
    guard(|| {
        let g = handle(s, "solution")?.0.grid;
        if origin.is_null() || spacing.is_null() || nodes.is_null() {
            return Err(Fail(RcStatus::NullPointer, "output pointer is null".into()));
        }
        *origin = [g.x0, g.y0];
        *spacing = [g.hx, g.hy];
        *nodes = [g.nx, g.ny];
        Ok(())
    })
}

/// Copies field `k` (0 = rho, 1 = u, 2 = v, 3 = p, 4 = S) into `buf`, indexed `i + nx * j`.
///
/// # Safety
/// `s` must be a live handle and `buf` hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rc_solution_field(s: *const RcSolution, k: usize, buf: *mut f64, len: usize) -> RcStatus {
    guard(|| {
        let sol = &handle(s, "solution")?.0;
        let f = sol.fields();
        let a = f.get(k).ok_or_else(|| Fail(RcStatus::InvalidParams, format!("no field {k}")))?;
        if buf.is_null() {
            return Err(Fail(RcStatus::NullPointer, "buffer is null".into()));
        }
        if len < a.len() {
            return Err(Fail(RcStatus::InvalidParams, format!("buffer holds {len}, need {}", a.len())));
        }
        ptr::copy_nonoverlapping(a.as_ptr(), buf, a.len());
        Ok(())
    })
}

/// Max-norm central-difference residuals of the four equations.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_solution_fd_residuals(s: *const RcSolution, out: *mut [f64; 4]) -> RcStatus {
    guard(|| {
        let r = numerics::fd_residuals(&handle(s, "solution")?.0)?;
        if out.is_null() {
            return Err(Fail(RcStatus::NullPointer, "output pointer is null".into()));
        }
        *out = r;
        Ok(())
    })
}

/// `|oint dx'| + |oint dy'|` around the unit square at `(x0, y0)`.
///
/// # Safety
/// `s`, `m` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_loop_closedness(
    s: *const RcSolution,
    m: *const RcMap,
    x0: f64,
    y0: f64,
    out: *mut f64,
) -> RcStatus {
    guard(|| {
        let v = numerics::loop_closedness(&handle(s, "solution")?.0, &handle(m, "map")?.0, &numerics::unit_square(x0, y0))?;
        if out.is_null() {
            return Err(Fail(RcStatus::NullPointer, "output pointer is null".into()));
        }
        *out = v;
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn rc_solution_free(s: *mut RcSolution) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Runs one reference criterion (1..10) with default tolerances.
///
/// # Safety
/// `pass` must be writable and `report` writable or null.
#[no_mangle]
pub unsafe extern "C" fn rc_criterion_run(
    id: u32,
    seed: u64,
    pass: *mut c_int,
    report: *mut *mut c_char,
) -> RcStatus {
    guard(|| {
        let cfg = SuiteConfig { seed, ..Default::default() };
        let r = run_criterion(id, &cfg).ok_or_else(|| Fail(RcStatus::InvalidParams, format!("no criterion {id}")))?;
        put_flag(pass, r.pass)?;
        if !report.is_null() {
            put_string(report, serde_json::to_string(&r).map_err(json_err)?)?;
        }
        Ok(())
    })
}
