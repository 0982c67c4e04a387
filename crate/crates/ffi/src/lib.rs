//! C ABI over `srt-core`.
//!
//! Every fallible call returns an [`SrtStatus`]; on failure a message is kept
//! per thread and read back with [`srt_last_error`]. Handles are created by
//! `*_new` / `*_build` functions and released with the matching `*_free`.
//! Results are written through out-pointers, which are left untouched on
//! failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use srt_core::analytic::{
    decoding_set_pmf, exp_sum_tail, relay_intercept_closed_form, srs_outage_closed_form, DtClosedForm,
};
use srt_core::montecarlo::{run_trials, BernoulliEstimator, RunOptions};
use srt_core::sweep::{self, analytic_dt_curve, build_curve, dominance_check, SweepOptions, Tolerance};
use srt_core::{Scheme, SrtError, SystemParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParam = 2,
    Domain = 3,
    Degenerate = 4,
    TooManyRelays = 5,
    Unsupported = 6,
    OutOfRange = 7,
    BufferTooSmall = 8,
    Panic = 9,
    Internal = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrtScheme {
    Dt = 0,
    Srs = 1,
    Mrs = 2,
}

impl From<SrtScheme> for Scheme {
    fn from(s: SrtScheme) -> Self {
        match s {
            SrtScheme::Dt => Scheme::Dt,
            SrtScheme::Srs => Scheme::Srs,
            SrtScheme::Mrs => Scheme::Mrs,
        }
    }
}

impl From<Scheme> for SrtScheme {
    fn from(s: Scheme) -> Self {
        match s {
            Scheme::Dt => SrtScheme::Dt,
            Scheme::Srs => SrtScheme::Srs,
            Scheme::Mrs => SrtScheme::Mrs,
        }
    }
}

/// Scenario description. Relay variances apply to every relay.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrtScenario {
    pub snr_db: f64,
    pub secrecy_rate: f64,
    pub overall_rate: f64,
    pub var_sd: f64,
    pub var_se: f64,
    pub n_relays: usize,
    pub var_si: f64,
    pub var_id: f64,
    pub var_ie: f64,
    /// 1.0 or 0.5.
    pub alpha: f64,
}

/// Estimate with its 95% Wilson interval. Closed-form values have
/// `trials == 0` and a zero-width interval.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SrtEstimate {
    pub successes: u64,
    pub trials: u64,
    pub hat: f64,
    pub lo: f64,
    pub hi: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SrtPoint {
    pub overall_rate: f64,
    pub op: SrtEstimate,
    pub ip: SrtEstimate,
    pub seed: u64,
}

/// Opaque validated scenario.
pub struct SrtParams {
    inner: SystemParams,
}

/// Opaque tradeoff curve.
pub struct SrtCurve {
    inner: sweep::SrtCurve,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

struct Failure(SrtStatus, String);

impl From<SrtError> for Failure {
    fn from(e: SrtError) -> Self {
        let status = match &e {
            SrtError::InvalidParam { .. } | SrtError::UnknownKey(_) => SrtStatus::InvalidParam,
            SrtError::Domain(_) => SrtStatus::Domain,
            SrtError::Degenerate(_) => SrtStatus::Degenerate,
            SrtError::TooManyRelays(_) => SrtStatus::TooManyRelays,
            SrtError::HeterogeneousWiretap => SrtStatus::Unsupported,
            SrtError::Usage(_) => SrtStatus::Domain,
            SrtError::Output { .. } | SrtError::Io(_) => SrtStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

fn fail<T>(status: SrtStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

/// Run `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SrtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            SrtStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            SrtStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .map_or_else(|| fail(SrtStatus::NullPointer, format!("`{name}` is null")), Ok)
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .map_or_else(|| fail(SrtStatus::NullPointer, format!("`{name}` is null")), Ok)
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return fail(SrtStatus::NullPointer, format!("`{name}` is null"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn workers(n: usize) -> Option<usize> {
    (n > 0).then_some(n)
}

fn estimate(est: &BernoulliEstimator) -> SrtEstimate {
    let e = sweep::Estimate::from_counts(est);
    SrtEstimate {
        successes: est.successes,
        trials: est.trials,
        hat: e.hat,
        lo: e.lo,
        hi: e.hi,
    }
}

fn point_estimate(e: &sweep::Estimate, trials: u64) -> SrtEstimate {
    SrtEstimate {
        successes: (e.hat * trials as f64).round() as u64,
        trials,
        hat: e.hat,
        lo: e.lo,
        hi: e.hi,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn srt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn srt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Human-readable name of a status code.
#[no_mangle]
pub extern "C" fn srt_status_name(status: SrtStatus) -> *const c_char {
    let s: &'static CStr = match status {
        SrtStatus::Ok => c"ok",
        SrtStatus::NullPointer => c"null pointer",
        SrtStatus::InvalidParam => c"invalid parameter",
        SrtStatus::Domain => c"domain error",
        SrtStatus::Degenerate => c"degenerate input",
        SrtStatus::TooManyRelays => c"too many relays",
        SrtStatus::Unsupported => c"unsupported",
        SrtStatus::OutOfRange => c"index out of range",
        SrtStatus::BufferTooSmall => c"buffer too small",
        SrtStatus::Panic => c"panic",
        SrtStatus::Internal => c"internal error",
    };
    s.as_ptr()
}

/// Default scenario: 15 dB, R_s = 0.2, R_o = 1, var_sd = 1, var_se = 0.2,
/// no relays, relay variances (2, 2, 0.2), alpha = 1.
#[no_mangle]
pub extern "C" fn srt_scenario_default() -> SrtScenario {
    let p = SystemParams::builder().build().expect("defaults are valid");
    SrtScenario {
        snr_db: p.snr_db(),
        secrecy_rate: p.secrecy_rate(),
        overall_rate: p.overall_rate(),
        var_sd: p.var_sd(),
        var_se: p.var_se(),
        n_relays: 0,
        var_si: 2.0,
        var_id: 2.0,
        var_ie: 0.2,
        alpha: p.alpha().value(),
    }
}

/// Validate `scenario` and return a new handle in `*out`.
///
/// # Safety
/// `scenario` must point to a valid `SrtScenario`; `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn srt_params_new(scenario: *const SrtScenario, out: *mut *mut SrtParams) -> SrtStatus {
    guard(|| {
        let s = deref(scenario, "scenario")?;
        let slot = self::out(out, "out")?;
        let inner = SystemParams::builder()
            .snr_db(s.snr_db)
            .secrecy_rate(s.secrecy_rate)
            .overall_rate(s.overall_rate)
            .direct_variances(s.var_sd, s.var_se)
            .relays(s.n_relays)
            .relay_variances(s.var_si, s.var_id, s.var_ie)
            .alpha(s.alpha)
            .build()?;
        *slot = Box::into_raw(Box::new(SrtParams { inner }));
        Ok(())
    })
}

/// # Safety
/// `params` must be null or a handle from [`srt_params_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn srt_params_free(params: *mut SrtParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Change the codeword rate R_o of an existing scenario.
///
/// # Safety
/// `params` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn srt_params_set_overall_rate(params: *mut SrtParams, overall_rate: f64) -> SrtStatus {
    guard(|| {
        let p = out(params, "params")?;
        p.inner = p.inner.with_overall_rate(overall_rate)?;
        Ok(())
    })
}

/// Closed-form direct-transmission outage at the scenario's R_o.
///
/// # Safety
/// `params` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn srt_dt_outage(params: *const SrtParams, out: *mut f64) -> SrtStatus {
    guard(|| {
        let p = &deref(params, "params")?.inner;
        *self::out(out, "out")? = DtClosedForm::from_params(p).dt_outage(p.overall_rate());
        Ok(())
    })
}

/// Closed-form direct-transmission intercept at the scenario's R_o - R_s.
///
/// # Safety
/// `params` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn srt_dt_intercept(params: *const SrtParams, out: *mut f64) -> SrtStatus {
    guard(|| {
        let p = &deref(params, "params")?.inner;
        *self::out(out, "out")? = DtClosedForm::from_params(p).dt_intercept(p.redundancy_rate());
        Ok(())
    })
}

/// Direct-transmission intercept probability as a function of outage
/// probability `p_out` in [0, 1).
///
/// # Safety
/// `params` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn srt_dt_ip_of_op(params: *const SrtParams, p_out: f64, out: *mut f64) -> SrtStatus {
    guard(|| {
        let p = &deref(params, "params")?.inner;
        *self::out(out, "out")? = DtClosedForm::from_params(p).dt_ip_of_op(p_out)?;
        Ok(())
    })
}

/// Closed-form single-relay-selection outage.
///
/// # Safety
/// `params` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn srt_srs_outage(params: *const SrtParams, out: *mut f64) -> SrtStatus {
    guard(|| {
        let p = &deref(params, "params")?.inner;
        *self::out(out, "out")? = srs_outage_closed_form(p)?;
        Ok(())
    })
}

/// Closed-form relay-scheme intercept (same for SRS and MRS); needs equal
/// relay-eavesdropper variances.
///
/// # Safety
/// `params` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn srt_relay_intercept(params: *const SrtParams, out: *mut f64) -> SrtStatus {
    guard(|| {
        let p = &deref(params, "params")?.inner;
        *self::out(out, "out")? = relay_intercept_closed_form(p)?;
        Ok(())
    })
}

/// Decoding-set distribution indexed by relay bitmask (bit `i` set when
/// relay `i` decodes). `len` must be at least `2^n_relays`; the required
/// length is always written to `*required` when it is non-null.
///
/// # Safety
/// `params` must be a live handle; `probs` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn srt_decoding_set_pmf(
    params: *const SrtParams,
    probs: *mut f64,
    len: usize,
    required: *mut usize,
) -> SrtStatus {
    guard(|| {
        let p = &deref(params, "params")?.inner;
        let pmf = decoding_set_pmf(p)?;
        let need = 1usize << p.n_relays();
        if let Some(r) = required.as_mut() {
            *r = need;
        }
        if len < need {
            return fail(SrtStatus::BufferTooSmall, format!("need {need} entries, got {len}"));
        }
        if probs.is_null() {
            return fail(SrtStatus::NullPointer, "`probs` is null");
        }
        let dst = std::slice::from_raw_parts_mut(probs, need);
        for (mask, prob) in pmf.iter() {
            dst[mask as usize] = prob;
        }
        Ok(())
    })
}

/// `P(X + Y > t)` for independent exponentials with means `mean_a`, `mean_b`.
/// NaN for negative `t` or non-positive means.
#[no_mangle]
pub extern "C" fn srt_exp_sum_tail(t: f64, mean_a: f64, mean_b: f64) -> f64 {
    if !(t >= 0.0 && mean_a > 0.0 && mean_b > 0.0) {
        return f64::NAN;
    }
    exp_sum_tail(t, mean_a, mean_b)
}

/// Monte Carlo outage and intercept counts for one scheme. `workers == 0`
/// uses every core; results do not depend on it.
///
/// # Safety
/// `params` must be a live handle; `outage` and `intercept` writable.
#[no_mangle]
pub unsafe extern "C" fn srt_run_trials(
    params: *const SrtParams,
    scheme: SrtScheme,
    n_trials: u64,
    seed: u64,
    stream: u32,
    workers: usize,
    outage: *mut SrtEstimate,
    intercept: *mut SrtEstimate,
) -> SrtStatus {
    guard(|| {
        let p = &deref(params, "params")?.inner;
        let (op, ip) = (out(outage, "outage")?, out(intercept, "intercept")?);
        let scheme = Scheme::from(scheme);
        if scheme.uses_relays() && p.n_relays() == 0 {
            return fail(SrtStatus::InvalidParam, format!("scheme {scheme} needs at least one relay"));
        }
        if n_trials == 0 {
            return fail(SrtStatus::InvalidParam, "`n_trials` must be at least 1");
        }
        let opts = RunOptions::new(n_trials, seed).stream(stream).workers(self::workers(workers));
        let counts = run_trials(p, scheme, &opts);
        *op = estimate(&counts.outage);
        *ip = estimate(&counts.intercept);
        Ok(())
    })
}

/// Codeword-rate grid with redundancy geometric in `[re_min, re_max]`.
///
/// # Safety
/// `rates` must hold `points` doubles.
#[no_mangle]
pub unsafe extern "C" fn srt_ro_grid(
    secrecy_rate: f64,
    re_min: f64,
    re_max: f64,
    points: usize,
    rates: *mut f64,
) -> SrtStatus {
    guard(|| {
        let grid = sweep::ro_grid(secrecy_rate, re_min, re_max, points)?;
        if rates.is_null() {
            return fail(SrtStatus::NullPointer, "`rates` is null");
        }
        std::slice::from_raw_parts_mut(rates, points).copy_from_slice(&grid);
        Ok(())
    })
}

/// Simulate one scheme over `rates` (codeword rates). Grid point `k` uses
/// trial stream `k`.
///
/// # Safety
/// `params` must be a live handle; `rates` must hold `n_rates` doubles;
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn srt_curve_build(
    params: *const SrtParams,
    scheme: SrtScheme,
    rates: *const f64,
    n_rates: usize,
    n_trials: u64,
    seed: u64,
    workers: usize,
    out: *mut *mut SrtCurve,
) -> SrtStatus {
    guard(|| {
        let p = &deref(params, "params")?.inner;
        let grid = slice(rates, n_rates, "rates")?;
        let slot = self::out(out, "out")?;
        let opts = SweepOptions::new(n_trials, seed).workers(self::workers(workers));
        let inner = build_curve(p, scheme.into(), grid, &opts)?;
        *slot = Box::into_raw(Box::new(SrtCurve { inner }));
        Ok(())
    })
}

/// Closed-form direct-transmission curve over `rates`.
///
/// # Safety
/// As for [`srt_curve_build`].
#[no_mangle]
pub unsafe extern "C" fn srt_curve_dt_analytic(
    params: *const SrtParams,
    rates: *const f64,
    n_rates: usize,
    out: *mut *mut SrtCurve,
) -> SrtStatus {
    guard(|| {
        let p = &deref(params, "params")?.inner;
        let grid = slice(rates, n_rates, "rates")?;
        let slot = self::out(out, "out")?;
        let inner = analytic_dt_curve(p, grid)?;
        *slot = Box::into_raw(Box::new(SrtCurve { inner }));
        Ok(())
    })
}

/// # Safety
/// `curve` must be null or a live curve handle.
#[no_mangle]
pub unsafe extern "C" fn srt_curve_free(curve: *mut SrtCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Number of points; 0 for a null handle.
///
/// # Safety
/// `curve` must be null or a live curve handle.
#[no_mangle]
pub unsafe extern "C" fn srt_curve_len(curve: *const SrtCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.inner.points.len())
}

/// # Safety
/// `curve` must be a live curve handle; `scheme` writable.
#[no_mangle]
pub unsafe extern "C" fn srt_curve_scheme(curve: *const SrtCurve, scheme: *mut SrtScheme) -> SrtStatus {
    guard(|| {
        *out(scheme, "scheme")? = deref(curve, "curve")?.inner.scheme.into();
        Ok(())
    })
}

/// # Safety
/// `curve` must be a live curve handle; `point` writable.
#[no_mangle]
pub unsafe extern "C" fn srt_curve_point(curve: *const SrtCurve, index: usize, point: *mut SrtPoint) -> SrtStatus {
    guard(|| {
        let c = &deref(curve, "curve")?.inner;
        let slot = out(point, "point")?;
        let Some(pt) = c.points.get(index) else {
            return fail(SrtStatus::OutOfRange, format!("index {index} >= {}", c.points.len()));
        };
        *slot = SrtPoint {
            overall_rate: pt.overall_rate,
            op: point_estimate(&pt.op, pt.trials),
            ip: point_estimate(&pt.ip, pt.trials),
            seed: pt.master_seed,
        };
        Ok(())
    })
}

/// Whether curve `a` has intercept probability no higher than `b` (plus
/// `k_se` combined standard errors) at every outage value in `ops`, with
/// piecewise-linear interpolation. `ops` must lie in both curves' range.
///
/// # Safety
/// `a`, `b` must be live curve handles; `ops` must hold `n_ops` doubles;
/// `dominant` writable.
#[no_mangle]
pub unsafe extern "C" fn srt_curve_dominates(
    a: *const SrtCurve,
    b: *const SrtCurve,
    ops: *const f64,
    n_ops: usize,
    k_se: f64,
    dominant: *mut bool,
) -> SrtStatus {
    guard(|| {
        let (a, b) = (&deref(a, "a")?.inner, &deref(b, "b")?.inner);
        let ops = slice(ops, n_ops, "ops")?;
        let slot = out(dominant, "dominant")?;
        if !(k_se.is_finite() && k_se >= 0.0) {
            return fail(SrtStatus::InvalidParam, "`k_se` must be finite and >= 0");
        }
        *slot = dominance_check(a, b, ops, Tolerance::StandardErrors(k_se))?.dominant;
        Ok(())
    })
}
