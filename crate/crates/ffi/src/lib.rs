//! C ABI over the `schwarzpick` library.
//!
//! Complex vectors cross the boundary as interleaved `double` arrays
//! `[re_0, im_0, re_1, im_1, ...]` together with the number of complex entries.
//! Maps are opaque `SpMap` handles created from MapSpec JSON or by the witness
//! constructors and released with `sp_map_free`.
//!
//! Every fallible call returns an `SpStatus`. On failure the message is kept
//! per thread and can be read with `sp_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use schwarzpick::{
    bound_factor, diagnose_equality_form, disk_slice, extremal_map, fuzz_campaign, mod_grad,
    parse_spec_str, sp_bound as bound_check, Branch, CScalar, CVector, Error, ExtremalSpec,
    FuzzConfig, HoloMap,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpStatus {
    Ok = 0,
    InvalidInput = 1,
    Schema = 2,
    Domain = 3,
    Numerical = 4,
    Certification = 5,
    Precondition = 6,
    NullPointer = 7,
    Io = 8,
    Panic = 9,
}

/// Opaque map handle.
pub struct SpMap {
    map: HoloMap,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SpGrad {
    pub value: f64,
    /// 0 nonzero branch, 1 zero branch.
    pub branch: i32,
    pub ambiguous: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SpBoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    pub branch: i32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SpDiskSlice {
    pub c_re: f64,
    pub c_im: f64,
    pub r: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SpBoundFactor {
    pub factor: f64,
    pub rhs: f64,
    pub collinear: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SpDiagnosis {
    pub matches: bool,
    /// NaN in the zero case.
    pub fitted_theta: f64,
    pub max_residual: f64,
    pub points_tested: usize,
    /// NaN in the zero case.
    pub orthogonal_norm: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SpCampaignSummary {
    pub trials_run: usize,
    pub points_checked: usize,
    pub violations: usize,
    /// NaN when nothing was checked.
    pub worst_slack: f64,
    /// NaN when nothing was checked.
    pub oracle_max_dev: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SpStatus {
    match e {
        Error::Input(_) => SpStatus::InvalidInput,
        Error::Schema { .. } => SpStatus::Schema,
        Error::Domain(_) => SpStatus::Domain,
        Error::Numerical { .. } => SpStatus::Numerical,
        Error::Certification(_) => SpStatus::Certification,
        Error::Precondition(_) => SpStatus::Precondition,
        Error::Io(_) => SpStatus::Io,
    }
}

enum Fail {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SpStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_last_error(format!("{what} is null"));
            SpStatus::NullPointer
        }
        Err(_) => {
            set_last_error("internal panic".to_owned());
            SpStatus::Panic
        }
    }
}

fn branch_code(b: Branch) -> i32 {
    match b {
        Branch::Nonzero => 0,
        Branch::Zero => 1,
    }
}

/// # Safety
/// `data` must point to `2 * len` readable doubles.
unsafe fn read_vector(data: *const f64, len: usize, what: &'static str) -> Result<CVector, Fail> {
    if data.is_null() {
        return Err(Fail::Null(what));
    }
    let raw = std::slice::from_raw_parts(data, 2 * len);
    Ok(CVector::new(
        raw.chunks_exact(2)
            .map(|p| CScalar::new(p[0], p[1]))
            .collect(),
    )?)
}

unsafe fn map_ref<'a>(map: *const SpMap) -> Result<&'a HoloMap, Fail> {
    map.as_ref().map(|m| &m.map).ok_or(Fail::Null("map"))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(what));
    }
    out.write(value);
    Ok(())
}

fn boxed(map: HoloMap) -> *mut SpMap {
    Box::into_raw(Box::new(SpMap { map }))
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a MapSpec JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_map_from_json(json: *const c_char, out: *mut *mut SpMap) -> SpStatus {
    guard(|| {
        if json.is_null() {
            return Err(Fail::Null("json"));
        }
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| Error::Input("json is not valid UTF-8".to_owned()))?;
        let map = parse_spec_str(text)?;
        out.write(boxed(map));
        Ok(())
    })
}

/// # Safety
/// `map` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn sp_map_free(map: *mut SpMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// # Safety
/// `map` must be a live handle; `n` and `m` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_map_dims(map: *const SpMap, n: *mut usize, m: *mut usize) -> SpStatus {
    guard(|| {
        let f = map_ref(map)?;
        write_out(n, f.domain_dim(), "n")?;
        write_out(m, f.codomain_dim(), "m")
    })
}

/// MapSpec JSON of `map`; release it with `sp_string_free`.
///
/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_map_to_json(map: *const SpMap, out: *mut *mut c_char) -> SpStatus {
    guard(|| {
        let doc = schwarzpick::emit_spec(map_ref(map)?).to_string();
        let c = CString::new(doc).map_err(|_| Error::Input("embedded NUL".to_owned()))?;
        write_out(out, c.into_raw(), "out")
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn sp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Gradient of `|f|` at `z` (`n` complex entries).
///
/// # Safety
/// `z` must hold `2 * n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_mod_grad(
    map: *const SpMap,
    z: *const f64,
    n: usize,
    out: *mut SpGrad,
) -> SpStatus {
    guard(|| {
        let g = mod_grad(map_ref(map)?, &read_vector(z, n, "z")?)?;
        let value = SpGrad {
            value: g.value,
            branch: branch_code(g.branch),
            ambiguous: g.ambiguous,
        };
        write_out(out, value, "out")
    })
}

/// Checks the modulus-gradient bound at `z`. A violated bound is reported in
/// `out->holds`, not as an error.
///
/// # Safety
/// `z` must hold `2 * n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_bound(
    map: *const SpMap,
    z: *const f64,
    n: usize,
    tol: f64,
    out: *mut SpBoundReport,
) -> SpStatus {
    guard(|| {
        let r = bound_check(map_ref(map)?, &read_vector(z, n, "z")?, tol)?;
        let value = SpBoundReport {
            lhs: r.lhs,
            rhs: r.rhs,
            slack: r.slack,
            holds: r.holds,
            branch: branch_code(r.branch),
        };
        write_out(out, value, "out")
    })
}

/// # Safety
/// `p` and `q` must hold `2 * n` doubles each; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_disk_slice(
    p: *const f64,
    q: *const f64,
    n: usize,
    out: *mut SpDiskSlice,
) -> SpStatus {
    guard(|| {
        let s = disk_slice(&read_vector(p, n, "p")?, &read_vector(q, n, "q")?)?;
        let value = SpDiskSlice {
            c_re: s.c.re,
            c_im: s.c.im,
            r: s.r,
        };
        write_out(out, value, "out")
    })
}

/// # Safety
/// `p` and `q` must hold `2 * n` doubles each; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_bound_factor(
    p: *const f64,
    q: *const f64,
    n: usize,
    out: *mut SpBoundFactor,
) -> SpStatus {
    guard(|| {
        let b = bound_factor(&read_vector(p, n, "p")?, &read_vector(q, n, "q")?)?;
        let value = SpBoundFactor {
            factor: b.factor,
            rhs: b.rhs,
            collinear: b.collinear,
        };
        write_out(out, value, "out")
    })
}

/// Witness with `f(p) = 0` along the unit direction `u` (collinear with `p`).
///
/// # Safety
/// `p` and `u` must hold `2 * n` doubles, `beta` `2 * m`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_extremal_zero(
    p: *const f64,
    u: *const f64,
    n: usize,
    beta: *const f64,
    m: usize,
    out: *mut *mut SpMap,
) -> SpStatus {
    guard(|| {
        let spec = ExtremalSpec::zero(
            read_vector(p, n, "p")?,
            read_vector(u, n, "u")?,
            read_vector(beta, m, "beta")?,
        );
        let map = extremal_map(&spec)?;
        write_out(out, boxed(map), "out")
    })
}

/// Witness with `f(p) = a`, `0 < |a| < 1`.
///
/// # Safety
/// `p` and `u` must hold `2 * n` doubles, `a` `2 * m`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_extremal_nonzero(
    p: *const f64,
    u: *const f64,
    n: usize,
    a: *const f64,
    m: usize,
    theta: f64,
    out: *mut *mut SpMap,
) -> SpStatus {
    guard(|| {
        let spec = ExtremalSpec::nonzero(
            read_vector(p, n, "p")?,
            read_vector(u, n, "u")?,
            read_vector(a, m, "a")?,
            theta,
        );
        let map = extremal_map(&spec)?;
        write_out(out, boxed(map), "out")
    })
}

/// # Safety
/// `p` and `q` must hold `2 * n` doubles each; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_diagnose(
    map: *const SpMap,
    p: *const f64,
    q: *const f64,
    n: usize,
    samples: usize,
    tol: f64,
    out: *mut SpDiagnosis,
) -> SpStatus {
    guard(|| {
        let d = diagnose_equality_form(
            map_ref(map)?,
            &read_vector(p, n, "p")?,
            &read_vector(q, n, "q")?,
            samples,
            tol,
        )?;
        let value = SpDiagnosis {
            matches: d.matches,
            fitted_theta: d.fitted_theta.unwrap_or(f64::NAN),
            max_residual: d.max_residual,
            points_tested: d.points_tested,
            orthogonal_norm: d.orthogonal_norm.unwrap_or(f64::NAN),
        };
        write_out(out, value, "out")
    })
}

/// Runs a campaign with default oracle settings and no log.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_fuzz(
    trials: usize,
    points_per_trial: usize,
    n: usize,
    m: usize,
    max_degree: u32,
    margin: f64,
    seed: u64,
    tol: f64,
    out: *mut SpCampaignSummary,
) -> SpStatus {
    guard(|| {
        let cfg = FuzzConfig {
            trials,
            points_per_trial,
            n,
            m,
            max_degree,
            margin,
            seed,
            tol,
            pin_counterexample: false,
            ..FuzzConfig::default()
        };
        let r = fuzz_campaign(&cfg, None)?;
        let value = SpCampaignSummary {
            trials_run: r.trials_run,
            points_checked: r.points_checked,
            violations: r.violations.len(),
            worst_slack: r.worst_slack.unwrap_or(f64::NAN),
            oracle_max_dev: r.oracle_max_dev.unwrap_or(f64::NAN),
        };
        write_out(out, value, "out")
    })
}
