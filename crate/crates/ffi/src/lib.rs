//! C ABI for `survey-ecdf`.
//!
//! Every function returns an `int32_t` status (`SVY_OK` on success) and
//! writes results through out-pointers. On failure a message is available
//! from [`svy_last_error_message`] on the same thread. Designs and step
//! functions are opaque handles released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use survey_ecdf::asymptotics::{plugin_poverty_estimate_with, DesignConstants};
use survey_ecdf::designs::{calibrate_rejective_p, CalibrationOptions, Design};
use survey_ecdf::estimation::{
    poverty_rate_with, weighted_ecdf, EstimatorKind, QuantileRule, WeightedSample, WeightedStepFunction,
};
use survey_ecdf::rng::sample_stream;
use survey_ecdf::Error;

pub const SVY_OK: i32 = 0;
pub const SVY_ERR_NULL_POINTER: i32 = 1;
pub const SVY_ERR_INVALID_ARGUMENT: i32 = 2;
pub const SVY_ERR_DEGENERATE_DESIGN: i32 = 3;
pub const SVY_ERR_ZERO_INCLUSION_PROBABILITY: i32 = 4;
pub const SVY_ERR_EMPTY_SAMPLE: i32 = 5;
pub const SVY_ERR_QUANTILE_UNDEFINED: i32 = 6;
pub const SVY_ERR_DERIVATIVE_UNDEFINED: i32 = 7;
pub const SVY_ERR_DEGENERATE_BANDWIDTH: i32 = 8;
pub const SVY_ERR_CALIBRATION: i32 = 9;
pub const SVY_ERR_CAPACITY: i32 = 10;
pub const SVY_ERR_INDEX: i32 = 11;
pub const SVY_ERR_ZERO_VARIANCE: i32 = 12;
pub const SVY_ERR_SCENARIO: i32 = 13;
pub const SVY_ERR_BUFFER_LENGTH: i32 = 14;
pub const SVY_ERR_PANIC: i32 = 99;

pub const SVY_ESTIMATOR_HT: u32 = 0;
pub const SVY_ESTIMATOR_HAJEK: u32 = 1;

/// Lower-inverse quantile `inf{t : F(t) >= alpha}`.
pub const SVY_QUANTILE_INVERSE: u32 = 0;
/// Linear interpolation between order statistics on the cumulative-weight scale.
pub const SVY_QUANTILE_INTERPOLATED: u32 = 1;

/// Opaque sampling design.
pub struct SvyDesign(Design);

/// Opaque weighted empirical distribution function.
pub struct SvyStepFunction(WeightedStepFunction);

/// Design constants, mirroring the library struct.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SvyDesignConstants {
    pub lambda: f64,
    pub mu_pi1: f64,
    pub mu_pi2: f64,
    pub gamma_pi1: f64,
    pub gamma_pi2: f64,
    pub d_n: f64,
}

impl From<DesignConstants> for SvyDesignConstants {
    fn from(c: DesignConstants) -> Self {
        Self {
            lambda: c.lambda,
            mu_pi1: c.mu_pi1,
            mu_pi2: c.mu_pi2,
            gamma_pi1: c.gamma_pi1,
            gamma_pi2: c.gamma_pi2,
            d_n: c.d_n,
        }
    }
}

impl From<SvyDesignConstants> for DesignConstants {
    fn from(c: SvyDesignConstants) -> Self {
        Self {
            lambda: c.lambda,
            mu_pi1: c.mu_pi1,
            mu_pi2: c.mu_pi2,
            gamma_pi1: c.gamma_pi1,
            gamma_pi2: c.gamma_pi2,
            d_n: c.d_n,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) => SVY_ERR_INVALID_ARGUMENT,
            Error::DegenerateDesign(_) => SVY_ERR_DEGENERATE_DESIGN,
            Error::ZeroInclusionProbability { .. } => SVY_ERR_ZERO_INCLUSION_PROBABILITY,
            Error::EmptySample => SVY_ERR_EMPTY_SAMPLE,
            Error::QuantileUndefined { .. } => SVY_ERR_QUANTILE_UNDEFINED,
            Error::DerivativeUndefined { .. } => SVY_ERR_DERIVATIVE_UNDEFINED,
            Error::DegenerateBandwidth { .. } => SVY_ERR_DEGENERATE_BANDWIDTH,
            Error::Calibration { .. } => SVY_ERR_CALIBRATION,
            Error::Capacity { .. } => SVY_ERR_CAPACITY,
            Error::Index(_) => SVY_ERR_INDEX,
            Error::ZeroVariance(_) => SVY_ERR_ZERO_VARIANCE,
            Error::Scenario(_) => SVY_ERR_SCENARIO,
        };
        Failure(code, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SVY_ERR_NULL_POINTER, format!("{what} is null"))
}

/// Runs `body`, converting errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> i32 {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => SVY_OK,
        Ok(Err(Failure(code, msg))) => {
            set_last_error(msg);
            code
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            SVY_ERR_PANIC
        }
    }
}

/// # Safety
/// `data` must be null with `len == 0` or point to `len` readable values.
unsafe fn slice<'a>(data: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        Ok(&[])
    } else if data.is_null() {
        Err(null(what))
    } else {
        Ok(std::slice::from_raw_parts(data, len))
    }
}

/// # Safety
/// `data` must be null or point to `len` writable values.
unsafe fn slice_mut<'a, T>(data: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if data.is_null() {
        Err(null(what))
    } else {
        Ok(std::slice::from_raw_parts_mut(data, len))
    }
}

/// # Safety
/// `out` must be null or valid for a write.
unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// # Safety
/// `handle` must be null or a live handle from this library.
unsafe fn handle<'a, T>(h: *const T, what: &str) -> Result<&'a T, Failure> {
    h.as_ref().ok_or_else(|| null(what))
}

fn estimator(code: u32) -> Result<EstimatorKind, Failure> {
    match code {
        SVY_ESTIMATOR_HT => Ok(EstimatorKind::HorvitzThompson),
        SVY_ESTIMATOR_HAJEK => Ok(EstimatorKind::Hajek),
        other => Err(Failure(SVY_ERR_INVALID_ARGUMENT, format!("unknown estimator code {other}"))),
    }
}

fn quantile_rule(code: u32) -> Result<QuantileRule, Failure> {
    match code {
        SVY_QUANTILE_INVERSE => Ok(QuantileRule::Inverse),
        SVY_QUANTILE_INTERPOLATED => Ok(QuantileRule::Interpolated),
        other => Err(Failure(SVY_ERR_INVALID_ARGUMENT, format!("unknown quantile rule code {other}"))),
    }
}

fn check_len(got: usize, want: usize, what: &str) -> Result<(), Failure> {
    if got == want {
        Ok(())
    } else {
        Err(Failure(SVY_ERR_BUFFER_LENGTH, format!("{what} has length {got}, expected {want}")))
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn svy_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn svy_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

fn emit_design(design: Design, out: *mut *mut SvyDesign) -> Result<(), Failure> {
    // SAFETY: caller contract of the public constructors
    unsafe { write(out, Box::into_raw(Box::new(SvyDesign(design))), "out") }
}

/// Simple random sampling without replacement of `n` out of `population`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn svy_design_srswor(population: usize, n: usize, out: *mut *mut SvyDesign) -> i32 {
    guard(|| emit_design(Design::srswor(population, n)?, out))
}

/// Bernoulli sampling with common probability `p`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn svy_design_bernoulli(population: usize, p: f64, out: *mut *mut SvyDesign) -> i32 {
    guard(|| emit_design(Design::bernoulli(population, p)?, out))
}

/// Poisson sampling with inclusion probabilities `pi[0..len]`.
///
/// # Safety
/// `pi` must point to `len` values; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn svy_design_poisson(pi: *const f64, len: usize, out: *mut *mut SvyDesign) -> i32 {
    guard(|| emit_design(Design::poisson(slice(pi, len, "pi")?.to_vec())?, out))
}

/// Rejective (conditional Poisson) sampling of size `n` with working
/// probabilities `p[0..len]`.
///
/// # Safety
/// `p` must point to `len` values; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn svy_design_rejective(p: *const f64, len: usize, n: usize, out: *mut *mut SvyDesign) -> i32 {
    guard(|| emit_design(Design::rejective(slice(p, len, "p")?.to_vec(), n)?, out))
}

/// Releases a design; null is ignored.
///
/// # Safety
/// `design` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn svy_design_free(design: *mut SvyDesign) {
    if !design.is_null() {
        drop(Box::from_raw(design));
    }
}

/// # Safety
/// `design` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn svy_design_population_size(design: *const SvyDesign, out: *mut usize) -> i32 {
    guard(|| write(out, handle(design, "design")?.0.population_size(), "out"))
}

/// # Safety
/// `design` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn svy_design_expected_size(design: *const SvyDesign, out: *mut f64) -> i32 {
    guard(|| write(out, handle(design, "design")?.0.expected_size(), "out"))
}

/// First-order inclusion probabilities; `len` must equal the population size.
///
/// # Safety
/// `design` must be a live handle; `out` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn svy_design_first_order_pi(design: *const SvyDesign, out: *mut f64, len: usize) -> i32 {
    guard(|| {
        let d = &handle(design, "design")?.0;
        check_len(len, d.population_size(), "out")?;
        slice_mut(out, len, "out")?.copy_from_slice(&d.first_order_pi());
        Ok(())
    })
}

/// Second-order inclusion probabilities, row-major, `len = N * N`, with
/// `pi_ii = pi_i` on the diagonal.
///
/// # Safety
/// `design` must be a live handle; `out` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn svy_design_second_order_pi(design: *const SvyDesign, out: *mut f64, len: usize) -> i32 {
    guard(|| {
        let d = &handle(design, "design")?.0;
        let n = d.population_size();
        check_len(len, n * n, "out")?;
        let dst = slice_mut(out, len, "out")?;
        for (slot, v) in dst.iter_mut().zip(d.second_order_pi().iter()) {
            *slot = *v;
        }
        Ok(())
    })
}

/// # Safety
/// `design` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn svy_design_constants(design: *const SvyDesign, out: *mut SvyDesignConstants) -> i32 {
    guard(|| write(out, handle(design, "design")?.0.constants().into(), "out"))
}

/// Draws one sample with a generator seeded by `seed`. `indicators[i]` is
/// set to 1 for sampled units and 0 otherwise; `len` must equal the
/// population size.
///
/// # Safety
/// `design` must be a live handle; `indicators` must point to `len`
/// writable bytes; `size_out` null or valid for a write.
#[no_mangle]
pub unsafe extern "C" fn svy_design_draw(
    design: *const SvyDesign,
    seed: u64,
    indicators: *mut u8,
    len: usize,
    size_out: *mut usize,
) -> i32 {
    guard(|| {
        let d = &handle(design, "design")?.0;
        check_len(len, d.population_size(), "indicators")?;
        let dst = slice_mut(indicators, len, "indicators")?;
        let draw = d.draw(&mut sample_stream(seed, 0, 0));
        for (slot, &hit) in dst.iter_mut().zip(&draw.indicators) {
            *slot = u8::from(hit);
        }
        if !size_out.is_null() {
            size_out.write(draw.size());
        }
        Ok(())
    })
}

/// Solves for rejective working probabilities whose inclusion
/// probabilities equal `target_pi`, which must sum to `n`. Non-positive
/// `tol` or zero `max_iter` select the defaults.
///
/// # Safety
/// `target_pi` and `p_out` must point to `len` values; `residual_out` and
/// `iterations_out` null or valid for a write.
#[no_mangle]
pub unsafe extern "C" fn svy_calibrate_rejective(
    target_pi: *const f64,
    len: usize,
    n: usize,
    tol: f64,
    max_iter: usize,
    p_out: *mut f64,
    residual_out: *mut f64,
    iterations_out: *mut usize,
) -> i32 {
    guard(|| {
        let target = slice(target_pi, len, "target_pi")?;
        let dst = slice_mut(p_out, len, "p_out")?;
        let defaults = CalibrationOptions::default();
        let options = CalibrationOptions {
            tol: if tol > 0.0 { tol } else { defaults.tol },
            max_iter: if max_iter > 0 { max_iter } else { defaults.max_iter },
        };
        let cal = calibrate_rejective_p(target, n, options)?;
        dst.copy_from_slice(&cal.p);
        if !residual_out.is_null() {
            residual_out.write(cal.residual);
        }
        if !iterations_out.is_null() {
            iterations_out.write(cal.iterations);
        }
        Ok(())
    })
}

/// # Safety
/// `y` and `pi` must point to `len` values.
unsafe fn sample_from(
    y: *const f64,
    pi: *const f64,
    len: usize,
    population_size: usize,
) -> Result<WeightedSample, Failure> {
    Ok(WeightedSample::new(slice(y, len, "y")?.to_vec(), slice(pi, len, "pi")?.to_vec(), population_size)?)
}

/// Weighted ECDF of a sample (`SVY_ESTIMATOR_HT` divides by the population
/// size, `SVY_ESTIMATOR_HAJEK` by the estimated population size).
///
/// # Safety
/// `y` and `pi` must point to `len` values; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn svy_ecdf_new(
    y: *const f64,
    pi: *const f64,
    len: usize,
    population_size: usize,
    estimator_kind: u32,
    out: *mut *mut SvyStepFunction,
) -> i32 {
    guard(|| {
        let kind = estimator(estimator_kind)?;
        let f = weighted_ecdf(&sample_from(y, pi, len, population_size)?, kind)?;
        write(out, Box::into_raw(Box::new(SvyStepFunction(f))), "out")
    })
}

/// Releases a step function; null is ignored.
///
/// # Safety
/// `f` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn svy_step_function_free(f: *mut SvyStepFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// `f` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn svy_ecdf_eval(f: *const SvyStepFunction, t: f64, out: *mut f64) -> i32 {
    guard(|| write(out, handle(f, "f")?.0.eval(t), "out"))
}

/// # Safety
/// `f` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn svy_ecdf_total_mass(f: *const SvyStepFunction, out: *mut f64) -> i32 {
    guard(|| write(out, handle(f, "f")?.0.total_mass(), "out"))
}

/// # Safety
/// `f` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn svy_ecdf_quantile(f: *const SvyStepFunction, alpha: f64, rule: u32, out: *mut f64) -> i32 {
    guard(|| {
        let q = handle(f, "f")?.0.quantile_with(alpha, quantile_rule(rule)?)?;
        write(out, q, "out")
    })
}

/// Poverty rate `F(beta * Q(alpha))` of a step function.
///
/// # Safety
/// `f` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn svy_poverty_rate(
    f: *const SvyStepFunction,
    alpha: f64,
    beta: f64,
    rule: u32,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let phi = poverty_rate_with(&handle(f, "f")?.0, alpha, beta, quantile_rule(rule)?)?;
        write(out, phi, "out")
    })
}

/// Poverty-rate estimate and plug-in asymptotic variance from one sample.
///
/// # Safety
/// `y` and `pi` must point to `len` values; `constants` must be readable;
/// `phi_out` and `variance_out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn svy_poverty_estimate(
    y: *const f64,
    pi: *const f64,
    len: usize,
    population_size: usize,
    constants: *const SvyDesignConstants,
    alpha: f64,
    beta: f64,
    estimator_kind: u32,
    rule: u32,
    phi_out: *mut f64,
    variance_out: *mut f64,
) -> i32 {
    guard(|| {
        let c = *handle(constants, "constants")?;
        let sample = sample_from(y, pi, len, population_size)?;
        let est = plugin_poverty_estimate_with(
            &sample,
            &c.into(),
            alpha,
            beta,
            estimator(estimator_kind)?,
            quantile_rule(rule)?,
        )?;
        write(phi_out, est.phi, "phi_out")?;
        write(variance_out, est.variance, "variance_out")
    })
}
