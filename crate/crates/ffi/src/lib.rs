//! C ABI for `splitfix`.
//!
//! Every fallible function returns a [`SplitfixStatus`]. On failure a
//! human-readable message is available from [`splitfix_last_error`] on the
//! same thread. Objects are opaque handles created by `*_new`-style
//! functions and released by the matching `*_free`. Vectors cross the
//! boundary as `(pointer, dim)` pairs; output buffers must hold `dim`
//! doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use splitfix::analysis::{estimate_displacement, solve_shifted_fixed_point};
use splitfix::geometry::{Matrix2, PrimitiveSet};
use splitfix::operators::{
    prox_box_indicator, prox_quadratic_on_line, resolvent_linear_halfspace, resolvent_rotation_ball,
    resolvent_shifted_ball_normal,
};
use splitfix::scenarios::{self, ScenarioReference, ScenarioSpec};
use splitfix::{Error, IterationTrace, ResolventOperator, SplittingOperator, StopRule, Vector};

/// Result codes. `SPLITFIX_STATUS_OK` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitfixStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NonFinite = 4,
    Diverged = 5,
    NoConvergence = 6,
    Unsupported = 7,
    OutOfRange = 8,
    Panic = 9,
}

impl From<&Error> for SplitfixStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DimensionMismatch { .. } => Self::DimensionMismatch,
            Error::NonFinite(_) => Self::NonFinite,
            Error::InvalidParameter(_) => Self::InvalidArgument,
            Error::Diverged { .. } => Self::Diverged,
            Error::Unsupported(_) | Error::TraceTooShort { .. } => Self::Unsupported,
            Error::NoConvergence { .. } => Self::NoConvergence,
        }
    }
}

/// A resolvent operator.
pub struct SplitfixOperator {
    inner: ResolventOperator,
}

/// A relaxed splitting operator `T_λ`.
pub struct SplitfixSplitting {
    inner: SplittingOperator,
}

/// A stored iteration trace.
pub struct SplitfixTrace {
    inner: IterationTrace,
}

/// A preset scenario together with its closed-form reference values.
pub struct SplitfixScenario {
    spec: ScenarioSpec,
    reference: ScenarioReference,
}

/// Closed-form reference values of a planar scenario. `has_*` flags mark
/// which vectors are defined.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SplitfixReference {
    pub has_v: bool,
    pub v: [f64; 2],
    pub has_xbar: bool,
    pub xbar: [f64; 2],
    pub has_reflected_shadow_limit: bool,
    pub reflected_shadow_limit: [f64; 2],
    pub consistent: bool,
    pub normal_solutions_exist: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(SplitfixStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(SplitfixStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SplitfixStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SplitfixStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            SplitfixStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            SplitfixStatus::Panic
        }
    }
}

unsafe fn read_vec(p: *const f64, dim: usize, what: &str) -> Result<Vector, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    let v = Vector::new(std::slice::from_raw_parts(p, dim).to_vec())?;
    Ok(v)
}

unsafe fn write_vec(p: *mut f64, v: &Vector, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    std::slice::from_raw_parts_mut(p, v.dim()).copy_from_slice(v.as_slice());
    Ok(())
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output handle pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(p))));
    }
}

/// Message describing the most recent failure on this thread, or an empty
/// string. The pointer stays valid until the next call into the library on
/// this thread.
#[no_mangle]
pub extern "C" fn splitfix_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn splitfix_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Resolvent of `R_θ + N_ball(0,1)`, θ ∈ [0, π/2).
///
/// # Safety
/// `out` must be a valid pointer to writable handle storage.
#[no_mangle]
pub unsafe extern "C" fn splitfix_operator_rotation_ball(theta: f64, out: *mut *mut SplitfixOperator) -> SplitfixStatus {
    guard(|| put(out, SplitfixOperator { inner: resolvent_rotation_ball(theta)? }))
}

/// Resolvent of `b + N_ball(c,r)` in the plane.
///
/// # Safety
/// `b` and `c` must point to 2 doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn splitfix_operator_shifted_ball_normal(
    b: *const f64,
    c: *const f64,
    r: f64,
    out: *mut *mut SplitfixOperator,
) -> SplitfixStatus {
    guard(|| {
        let op = resolvent_shifted_ball_normal(read_vec(b, 2, "b")?, read_vec(c, 2, "c")?, r)?;
        put(out, SplitfixOperator { inner: op })
    })
}

/// Projection onto the box `[lo, hi]` of dimension `dim`.
///
/// # Safety
/// `lo` and `hi` must point to `dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn splitfix_operator_box(
    lo: *const f64,
    hi: *const f64,
    dim: usize,
    out: *mut *mut SplitfixOperator,
) -> SplitfixStatus {
    guard(|| {
        let op = prox_box_indicator(read_vec(lo, dim, "lo")?, read_vec(hi, dim, "hi")?)?;
        put(out, SplitfixOperator { inner: op })
    })
}

/// Prox of `(γ/2)‖x − w‖² + ι_U` with `U` the line spanned by `direction`.
///
/// # Safety
/// `w` and `direction` must point to `dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn splitfix_operator_quadratic_on_line(
    gamma: f64,
    w: *const f64,
    direction: *const f64,
    dim: usize,
    out: *mut *mut SplitfixOperator,
) -> SplitfixStatus {
    guard(|| {
        let line = PrimitiveSet::line(read_vec(direction, dim, "direction")?)?;
        let op = prox_quadratic_on_line(gamma, read_vec(w, dim, "w")?, line)?;
        put(out, SplitfixOperator { inner: op })
    })
}

/// Resolvent of `L + N_K` with `K = {x : ⟨x,u⟩ ≤ 0}`; `l` is row-major 2×2.
///
/// # Safety
/// `l` must point to 4 doubles and `u` to 2; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn splitfix_operator_linear_halfspace(
    l: *const f64,
    u: *const f64,
    out: *mut *mut SplitfixOperator,
) -> SplitfixStatus {
    guard(|| {
        let m = read_vec(l, 4, "l")?;
        let l = Matrix2::new(m[0], m[1], m[2], m[3]);
        let op = resolvent_linear_halfspace(l, read_vec(u, 2, "u")?)?;
        put(out, SplitfixOperator { inner: op })
    })
}

/// The identity resolvent (`A = 0`) in dimension `dim`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn splitfix_operator_zero(dim: usize, out: *mut *mut SplitfixOperator) -> SplitfixStatus {
    guard(|| put(out, SplitfixOperator { inner: ResolventOperator::zero(dim)? }))
}

/// # Safety
/// `op` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn splitfix_operator_free(op: *mut SplitfixOperator) {
    free(op)
}

/// Dimension of an operator, or 0 for a null handle.
///
/// # Safety
/// `op` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn splitfix_operator_dim(op: *const SplitfixOperator) -> usize {
    op.as_ref().map_or(0, |o| o.inner.dim())
}

/// Writes `J x` to `out`.
///
/// # Safety
/// `op` must be a live handle; `x` and `out` must point to `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn splitfix_operator_resolvent(
    op: *const SplitfixOperator,
    x: *const f64,
    dim: usize,
    out: *mut f64,
) -> SplitfixStatus {
    guard(|| {
        let op = get(op, "operator")?;
        let j = op.inner.resolvent(&read_vec(x, dim, "x")?)?;
        write_vec(out, &j, "out")
    })
}

/// Builds `T_λ` from copies of two operators.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn splitfix_splitting_new(
    a: *const SplitfixOperator,
    b: *const SplitfixOperator,
    lambda: f64,
    out: *mut *mut SplitfixSplitting,
) -> SplitfixStatus {
    guard(|| {
        let (a, b) = (get(a, "a")?, get(b, "b")?);
        let inner = SplittingOperator::new(a.inner.clone(), b.inner.clone(), lambda)?;
        put(out, SplitfixSplitting { inner })
    })
}

/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn splitfix_splitting_free(s: *mut SplitfixSplitting) {
    free(s)
}

/// Writes `T_λ x` to `out`.
///
/// # Safety
/// `s` must be a live handle; `x` and `out` must point to `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn splitfix_splitting_evaluate(
    s: *const SplitfixSplitting,
    x: *const f64,
    dim: usize,
    out: *mut f64,
) -> SplitfixStatus {
    guard(|| {
        let s = get(s, "splitting")?;
        let next = s.inner.evaluate(&read_vec(x, dim, "x")?)?;
        write_vec(out, &next, "out")
    })
}

/// Iterates from `x0` until the shadow settles or `max_iters` is reached.
///
/// # Safety
/// `s` must be a live handle; `x0` must point to `dim` doubles; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn splitfix_splitting_iterate(
    s: *const SplitfixSplitting,
    x0: *const f64,
    dim: usize,
    max_iters: usize,
    shadow_tol: f64,
    out: *mut *mut SplitfixTrace,
) -> SplitfixStatus {
    guard(|| {
        let s = get(s, "splitting")?;
        let stop = StopRule::new(max_iters, shadow_tol)?;
        let trace = s.inner.iterate(&read_vec(x0, dim, "x0")?, &stop)?;
        put(out, SplitfixTrace { inner: trace })
    })
}

/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn splitfix_trace_free(t: *mut SplitfixTrace) {
    free(t)
}

/// Number of rows, or 0 for a null handle.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn splitfix_trace_len(t: *const SplitfixTrace) -> usize {
    t.as_ref().map_or(0, |t| t.inner.len())
}

/// Dimension of the iterates, or 0 for a null handle.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn splitfix_trace_dim(t: *const SplitfixTrace) -> usize {
    t.as_ref().map_or(0, |t| t.inner.dim())
}

/// Copies row `n` into the non-null output buffers; `step` receives
/// `x_n − x_{n+1}`.
///
/// # Safety
/// `t` must be a live handle; non-null outputs must hold `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn splitfix_trace_row(
    t: *const SplitfixTrace,
    n: usize,
    x: *mut f64,
    shadow: *mut f64,
    reflected_shadow: *mut f64,
    step: *mut f64,
) -> SplitfixStatus {
    guard(|| {
        let t = get(t, "trace")?;
        let row = t.inner.rows().get(n).ok_or_else(|| {
            Failure(SplitfixStatus::OutOfRange, format!("row {n} out of range (len {})", t.inner.len()))
        })?;
        for (p, v) in [(x, &row.x), (shadow, &row.shadow), (reflected_shadow, &row.reflected_shadow), (step, &row.step_diff)] {
            if !p.is_null() {
                write_vec(p, v, "row output")?;
            }
        }
        Ok(())
    })
}

/// Estimates the minimal displacement vector from the trace tail.
///
/// # Safety
/// `t` must be a live handle; `v_out` must hold `dim` doubles;
/// `tail_residual` may be null.
#[no_mangle]
pub unsafe extern "C" fn splitfix_estimate_displacement(
    t: *const SplitfixTrace,
    v_out: *mut f64,
    tail_residual: *mut f64,
) -> SplitfixStatus {
    guard(|| {
        let est = estimate_displacement(&get(t, "trace")?.inner)?;
        write_vec(v_out, &est.v, "v_out")?;
        if !tail_residual.is_null() {
            *tail_residual = est.tail_residual;
        }
        Ok(())
    })
}

/// Finds `y ∈ Fix(v + T)` and `x̄ = J_A y`. Returns
/// `SPLITFIX_STATUS_NO_CONVERGENCE` when no normal solution is found.
///
/// # Safety
/// `s` must be a live handle; `v`, `x0`, `xbar_out` and `y_out` must hold
/// `dim` doubles; `residual` may be null.
#[no_mangle]
pub unsafe extern "C" fn splitfix_solve_shifted_fixed_point(
    s: *const SplitfixSplitting,
    v: *const f64,
    x0: *const f64,
    dim: usize,
    max_iters: usize,
    xbar_out: *mut f64,
    y_out: *mut f64,
    residual: *mut f64,
) -> SplitfixStatus {
    guard(|| {
        let s = &get(s, "splitting")?.inner;
        let lambda = if s.lambda() < 1.0 { s.lambda() } else { 0.5 };
        let stop = StopRule::new(max_iters, StopRule::default().shadow_tol())?;
        let sol = solve_shifted_fixed_point(s.a(), s.b(), lambda, &read_vec(v, dim, "v")?, &read_vec(x0, dim, "x0")?, &stop)?;
        write_vec(xbar_out, &sol.xbar, "xbar_out")?;
        write_vec(y_out, &sol.fixed_point, "y_out")?;
        if !residual.is_null() {
            *residual = sol.residual;
        }
        Ok(())
    })
}

/// Builds a registered scenario (`"two_balls"` or `"line_box"`) with
/// `n_params` named overrides.
///
/// # Safety
/// `name` must be a NUL-terminated string; when `n_params > 0`,
/// `param_names` must hold that many NUL-terminated strings and
/// `param_values` that many doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn splitfix_scenario_new(
    name: *const c_char,
    param_names: *const *const c_char,
    param_values: *const f64,
    n_params: usize,
    lambda: f64,
    out: *mut *mut SplitfixScenario,
) -> SplitfixStatus {
    guard(|| {
        let name = c_str(name, "name")?;
        let mut overrides = std::collections::BTreeMap::new();
        if n_params > 0 {
            if param_names.is_null() || param_values.is_null() {
                return Err(null("parameter arrays"));
            }
            let names = std::slice::from_raw_parts(param_names, n_params);
            let values = std::slice::from_raw_parts(param_values, n_params);
            for (&k, &v) in names.iter().zip(values) {
                overrides.insert(c_str(k, "parameter name")?.to_string(), v);
            }
        }
        let (spec, reference) = scenarios::build(name, &overrides, lambda)?;
        put(out, SplitfixScenario { spec, reference })
    })
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(SplitfixStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn splitfix_scenario_free(s: *mut SplitfixScenario) {
    free(s)
}

/// Copies the scenario's reference values.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn splitfix_scenario_reference(
    s: *const SplitfixScenario,
    out: *mut SplitfixReference,
) -> SplitfixStatus {
    guard(|| {
        let r = &get(s, "scenario")?.reference;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let pair = |v: &Option<Vector>| v.as_ref().map_or((false, [0.0; 2]), |v| (true, [v[0], v[1]]));
        let (has_v, v) = pair(&r.v);
        let (has_xbar, xbar) = pair(&r.xbar);
        let (has_limit, limit) = pair(&r.reflected_shadow_limit);
        *out = SplitfixReference {
            has_v,
            v,
            has_xbar,
            xbar,
            has_reflected_shadow_limit: has_limit,
            reflected_shadow_limit: limit,
            consistent: r.consistent,
            normal_solutions_exist: r.normal_solutions_exist,
        };
        Ok(())
    })
}

/// Builds the scenario's splitting operator.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn splitfix_scenario_splitting(
    s: *const SplitfixScenario,
    out: *mut *mut SplitfixSplitting,
) -> SplitfixStatus {
    guard(|| {
        let inner = get(s, "scenario")?.spec.splitting()?;
        put(out, SplitfixSplitting { inner })
    })
}

/// Writes the scenario's default start point (2 doubles).
///
/// # Safety
/// `s` must be a live handle; `out` must hold 2 doubles.
#[no_mangle]
pub unsafe extern "C" fn splitfix_scenario_x0(s: *const SplitfixScenario, out: *mut f64) -> SplitfixStatus {
    guard(|| write_vec(out, &get(s, "scenario")?.spec.x0, "out"))
}
