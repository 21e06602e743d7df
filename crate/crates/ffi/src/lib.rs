//! C ABI over the `hemodyn` core.
//!
//! Handles are opaque pointers created by `*_new`/producer calls and released
//! with the matching `*_free`. Every fallible call returns an `int32_t` status
//! (`HEMODYN_OK` on success) and writes results through out-pointers. The
//! message for the most recent failure on the calling thread is available from
//! `hemodyn_last_error`.
//!
//! ```c
//! HemodynParams *p = NULL;
//! HemodynHopf *hopf = NULL;
//! if (hemodyn_params_default(&p) != HEMODYN_OK) return 1;
//! if (hemodyn_hopf(p, 0, &hopf) != HEMODYN_OK) {
//!     fprintf(stderr, "%s\n", hemodyn_last_error());
//! }
//! hemodyn_hopf_free(hopf);
//! hemodyn_params_free(p);
//! ```

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hemodyn::model::Regime;
use hemodyn::simulator::Interp;
use hemodyn::spectral::{char_delta, hopf_summary_with, DEFAULT_K_MAX};
use hemodyn::{
    classify_regime, equilibria, linearize, simulate, Error, HistoryFunction, HopfSummary,
    ModelParams, Scheme, SimConfig, Trajectory,
};

/// Success.
pub const HEMODYN_OK: i32 = 0;
/// A required pointer argument was null.
pub const HEMODYN_ERR_NULL: i32 = 1;
/// Invalid parameters, options, history or index.
pub const HEMODYN_ERR_INVALID: i32 = 2;
/// Degenerate or unsupported analysis case.
pub const HEMODYN_ERR_DEGENERATE: i32 = 3;
/// Runtime failure: non-finite state, negative excursion, root not found.
pub const HEMODYN_ERR_RUNTIME: i32 = 4;
/// A Rust panic was caught at the boundary.
pub const HEMODYN_ERR_PANIC: i32 = 5;

pub const HEMODYN_SCHEME_AUGMENTED: i32 = 0;
pub const HEMODYN_SCHEME_QUADRATURE: i32 = 1;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.exit_code(), e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(HEMODYN_ERR_NULL, format!("{name} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(HEMODYN_ERR_INVALID, msg.into())
}

/// Run `f`, translating failures and panics into status codes.
fn guard<F>(f: F) -> i32
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            HEMODYN_OK
        }
        Ok(Err(Failure(code, msg))) => {
            set_last_error(msg);
            code
        }
        Err(_) => {
            set_last_error("internal panic");
            HEMODYN_ERR_PANIC
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

/// Box `value` into `*out`; nothing is allocated when `out` is null.
unsafe fn write_handle<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

/// Model constants.
pub struct HemodynParams(ModelParams);

/// Crossing table from a Hopf analysis.
pub struct HemodynHopf(HopfSummary);

/// Simulated trajectory on a uniform grid.
pub struct HemodynTrajectory(Trajectory);

/// Coefficients of the linearization around the positive equilibrium.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HemodynLinearization {
    pub beta_star: f64,
    pub delta_plus_beta_star: f64,
    pub ratio: f64,
    /// NaN unless `has_kappa`.
    pub kappa: f64,
    pub has_kappa: bool,
    pub x_star: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HemodynRegime {
    TrivialGloballyStable = 0,
    DelayIndependentStable = 1,
    DelayDependent = 2,
    Degenerate = 3,
    NoPositiveEquilibrium = 4,
}

impl From<Regime> for HemodynRegime {
    fn from(r: Regime) -> Self {
        match r {
            Regime::TrivialGloballyStable => HemodynRegime::TrivialGloballyStable,
            Regime::DelayIndependentStable => HemodynRegime::DelayIndependentStable,
            Regime::DelayDependent => HemodynRegime::DelayDependent,
            Regime::Degenerate => HemodynRegime::Degenerate,
            Regime::NoPositiveEquilibrium => HemodynRegime::NoPositiveEquilibrium,
        }
    }
}

/// One purely imaginary root pair.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HemodynCrossing {
    pub tau_c: f64,
    pub omega_c: f64,
    pub y: f64,
    pub branch_l: u32,
    pub branch_side: u32,
    /// +1, −1, or 0 for a tangential crossing.
    pub transversality: i32,
}

/// Integration settings; fill with `hemodyn_sim_options_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HemodynSimOptions {
    pub dt: f64,
    pub t_end: f64,
    /// `HEMODYN_SCHEME_AUGMENTED` or `HEMODYN_SCHEME_QUADRATURE`.
    pub scheme: i32,
    pub quad_panels: u32,
    /// Linear instead of cubic Hermite dense output.
    pub linear_interp: bool,
}

impl HemodynSimOptions {
    fn to_config(self) -> Result<SimConfig, Failure> {
        let scheme = match self.scheme {
            HEMODYN_SCHEME_AUGMENTED => Scheme::Augmented,
            HEMODYN_SCHEME_QUADRATURE => Scheme::DirectQuadrature,
            other => return Err(invalid(format!("unknown scheme {other}"))),
        };
        Ok(SimConfig {
            dt: self.dt,
            t_end: self.t_end,
            scheme,
            quad_panels: self.quad_panels as usize,
            interp: if self.linear_interp {
                Interp::Linear
            } else {
                Interp::CubicHermite
            },
        })
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn hemodyn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hemodyn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn hemodyn_params_new(
    delta: f64,
    beta0: f64,
    theta: f64,
    n: f64,
    tau_min: f64,
    tau: f64,
    out: *mut *mut HemodynParams,
) -> i32 {
    guard(|| {
        let p = ModelParams::new(delta, beta0, theta, n, tau_min, tau)?;
        write_handle(out, HemodynParams(p))
    })
}

/// Normal-production constants with `τ_min = 0`, `τ = 18.2`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn hemodyn_params_default(out: *mut *mut HemodynParams) -> i32 {
    guard(|| {
        write_handle(out, HemodynParams(ModelParams::default()))
    })
}

/// # Safety
/// `params` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hemodyn_params_free(params: *mut HemodynParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Replace τ, keeping the other constants. The handle is unchanged on error.
///
/// # Safety
/// `params` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hemodyn_params_set_tau(params: *mut HemodynParams, tau: f64) -> i32 {
    guard(|| {
        let p = params.as_mut().ok_or_else(|| null("params"))?;
        p.0 = p.0.with_tau(tau)?;
        Ok(())
    })
}

/// Copy the six constants out, in constructor order.
///
/// # Safety
/// `params` must be a live handle and `out` must point to 6 doubles.
#[no_mangle]
pub unsafe extern "C" fn hemodyn_params_get(params: *const HemodynParams, out: *mut f64) -> i32 {
    guard(|| {
        let p = deref(params, "params")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let values = [p.delta, p.beta0, p.theta, p.n, p.tau_min, p.tau];
        ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
        Ok(())
    })
}

/// Positive equilibrium; `*present` is false (and `*x_star` 0) when absent.
///
/// # Safety
/// `params` must be a live handle; `x_star` and `present` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hemodyn_equilibrium(
    params: *const HemodynParams,
    x_star: *mut f64,
    present: *mut bool,
) -> i32 {
    guard(|| {
        let eq = equilibria(&deref(params, "params")?.0);
        write_out(x_star, eq.positive.unwrap_or(0.0), "x_star")?;
        write_out(present, eq.positive.is_some(), "present")
    })
}

/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hemodyn_linearize(
    params: *const HemodynParams,
    out: *mut HemodynLinearization,
) -> i32 {
    guard(|| {
        let lin = linearize(&deref(params, "params")?.0)?;
        write_out(
            out,
            HemodynLinearization {
                beta_star: lin.beta_star,
                delta_plus_beta_star: lin.delta_plus_beta_star,
                ratio: lin.ratio,
                kappa: lin.kappa.unwrap_or(f64::NAN),
                has_kappa: lin.kappa.is_some(),
                x_star: lin.x_star,
            },
            "out",
        )
    })
}

/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hemodyn_regime(params: *const HemodynParams, out: *mut HemodynRegime) -> i32 {
    guard(|| {
        let report = classify_regime(&deref(params, "params")?.0);
        write_out(out, report.regime.into(), "out")
    })
}

/// Characteristic function at `λ = re + i·im` for delay `tau`.
///
/// # Safety
/// `params` must be a live handle; `out_re` and `out_im` writable.
#[no_mangle]
pub unsafe extern "C" fn hemodyn_char_delta(
    params: *const HemodynParams,
    tau: f64,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> i32 {
    guard(|| {
        let p = deref(params, "params")?.0.with_tau(tau)?;
        let lin = linearize(&p)?;
        let d = char_delta(&lin, &p, tau, hemodyn::Complex64::new(re, im));
        write_out(out_re, d.re, "out_re")?;
        write_out(out_im, d.im, "out_im")
    })
}

/// Enumerate crossings (`τ_min` must be 0). `k_max = 0` selects the default table size.
///
/// # Safety
/// `params` must be a live handle; `out` writable. Free the result with
/// `hemodyn_hopf_free`.
#[no_mangle]
pub unsafe extern "C" fn hemodyn_hopf(
    params: *const HemodynParams,
    k_max: u32,
    out: *mut *mut HemodynHopf,
) -> i32 {
    guard(|| {
        let p = &deref(params, "params")?.0;
        let k_max = if k_max == 0 { DEFAULT_K_MAX } else { k_max as usize };
        let summary = hopf_summary_with(&linearize(p)?, p, k_max)?;
        write_handle(out, HemodynHopf(summary))
    })
}

/// Number of crossings; 0 for a null handle.
///
/// # Safety
/// `hopf` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hemodyn_hopf_count(hopf: *const HemodynHopf) -> usize {
    hopf.as_ref().map_or(0, |h| h.0.crossings.len())
}

/// Crossing `index`, ordered by increasing `tau_c`.
///
/// # Safety
/// `hopf` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hemodyn_hopf_crossing(
    hopf: *const HemodynHopf,
    index: usize,
    out: *mut HemodynCrossing,
) -> i32 {
    guard(|| {
        let h = deref(hopf, "hopf")?;
        let c = h.0.crossings.get(index).ok_or_else(|| {
            invalid(format!(
                "crossing index {index} out of range ({} crossings)",
                h.0.crossings.len()
            ))
        })?;
        write_out(
            out,
            HemodynCrossing {
                tau_c: c.tau_c,
                omega_c: c.omega_c,
                y: c.y,
                branch_l: c.branch.l as u32,
                branch_side: c.branch.side as u32,
                transversality: c.transversality.sign(),
            },
            "out",
        )
    })
}

/// First crossing delay `τ₀`; `*present` is false when there is none.
///
/// # Safety
/// `hopf` must be a live handle; `tau_0` and `present` writable.
#[no_mangle]
pub unsafe extern "C" fn hemodyn_hopf_tau0(
    hopf: *const HemodynHopf,
    tau_0: *mut f64,
    present: *mut bool,
) -> i32 {
    guard(|| {
        let t = deref(hopf, "hopf")?.0.tau_0;
        write_out(tau_0, t.unwrap_or(f64::NAN), "tau_0")?;
        write_out(present, t.is_some(), "present")
    })
}

/// Whether the signed crossing count at `tau` predicts an unstable equilibrium.
///
/// # Safety
/// `hopf` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hemodyn_hopf_predicts_unstable(
    hopf: *const HemodynHopf,
    tau: f64,
    out: *mut bool,
) -> i32 {
    guard(|| write_out(out, deref(hopf, "hopf")?.0.predicts_unstable(tau), "out"))
}

/// # Safety
/// `hopf` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hemodyn_hopf_free(hopf: *mut HemodynHopf) {
    if !hopf.is_null() {
        drop(Box::from_raw(hopf));
    }
}

/// Default integration settings for `params`.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hemodyn_sim_options_default(
    params: *const HemodynParams,
    out: *mut HemodynSimOptions,
) -> i32 {
    guard(|| {
        let c = SimConfig::for_params(&deref(params, "params")?.0);
        write_out(
            out,
            HemodynSimOptions {
                dt: c.dt,
                t_end: c.t_end,
                scheme: HEMODYN_SCHEME_AUGMENTED,
                quad_panels: c.quad_panels as u32,
                linear_interp: false,
            },
            "out",
        )
    })
}

unsafe fn run_simulation(
    params: *const HemodynParams,
    history: HistoryFunction,
    options: *const HemodynSimOptions,
    out: *mut *mut HemodynTrajectory,
) -> Result<(), Failure> {
    let p = &deref(params, "params")?.0;
    let config = match options.as_ref() {
        Some(o) => o.to_config()?,
        None => SimConfig::for_params(p),
    };
    if out.is_null() {
        return Err(null("out"));
    }
    let traj = simulate(p, &history, &config)?;
    write_handle(out, HemodynTrajectory(traj))
}

/// Simulate from the constant history `φ ≡ value`. `options` may be null for defaults.
///
/// # Safety
/// `params` must be a live handle, `options` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hemodyn_simulate_constant(
    params: *const HemodynParams,
    value: f64,
    options: *const HemodynSimOptions,
    out: *mut *mut HemodynTrajectory,
) -> i32 {
    guard(|| run_simulation(params, HistoryFunction::constant(value), options, out))
}

/// Simulate from a tabulated history with `len` strictly increasing `times`
/// covering `[−τ, 0]`, interpolated by monotone cubic Hermite.
///
/// # Safety
/// `times` and `values` must each point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hemodyn_simulate_table(
    params: *const HemodynParams,
    times: *const f64,
    values: *const f64,
    len: usize,
    options: *const HemodynSimOptions,
    out: *mut *mut HemodynTrajectory,
) -> i32 {
    guard(|| {
        if times.is_null() || values.is_null() {
            return Err(null("times/values"));
        }
        let t = std::slice::from_raw_parts(times, len).to_vec();
        let v = std::slice::from_raw_parts(values, len).to_vec();
        let history = HistoryFunction::table(t, v, Interp::CubicHermite)?;
        run_simulation(params, history, options, out)
    })
}

/// Number of grid points; 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hemodyn_trajectory_len(traj: *const HemodynTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.len())
}

/// Copy up to `capacity` samples into the non-null buffers among `t`, `x`, `z`;
/// `*written` receives the count.
///
/// # Safety
/// Each non-null buffer must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn hemodyn_trajectory_copy(
    traj: *const HemodynTrajectory,
    t: *mut f64,
    x: *mut f64,
    z: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> i32 {
    guard(|| {
        let tr = &deref(traj, "traj")?.0;
        let n = capacity.min(tr.len());
        for (src, dst) in [(&tr.times, t), (&tr.x, x), (&tr.z, z)] {
            if !dst.is_null() {
                ptr::copy_nonoverlapping(src.as_ptr(), dst, n);
            }
        }
        if !written.is_null() {
            written.write(n);
        }
        Ok(())
    })
}

/// Dense-output value `x(t)` for `t ∈ [−τ, t_end]`.
///
/// # Safety
/// `traj` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hemodyn_trajectory_eval(
    traj: *const HemodynTrajectory,
    t: f64,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let v = deref(traj, "traj")?.0.eval(t)?;
        write_out(out, v, "out")
    })
}

/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hemodyn_trajectory_free(traj: *mut HemodynTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}
