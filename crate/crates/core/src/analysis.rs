//! Post-processing of trajectories and parameter sweeps that compare the
//! spectral prediction with simulated behaviour.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{classify_regime, equilibria, linearize, Equilibria, ModelParams, Regime};
use crate::numeric::{adaptive_simpson, try_simpson};
use crate::simulator::{simulate, HistoryFunction, SimConfig, Trajectory};
use crate::spectral::hopf_summary;

/// Fraction of the horizon treated as the tail.
pub const TAIL_FRACTION: f64 = 0.4;

const SMOOTH_WIDTH: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodEstimate {
    /// Mean gap between successive peaks; present iff at least 3 peaks.
    pub period: Option<f64>,
    /// Half the peak-to-trough range over the window.
    pub amplitude: f64,
    pub peak_times: Vec<f64>,
    pub sustained: bool,
    /// `(max − min)/mean` of successive peak gaps.
    pub relative_spread: f64,
    /// Range over the second half of the window divided by the first half.
    pub amplitude_trend: f64,
}

/// Thresholds for [`PeriodEstimate::sustained`] and [`classify_trajectory`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub max_spread: f64,
    pub trend_band: (f64, f64),
    /// Tail mean below this fraction of `x(0)` counts as extinction.
    pub zero_fraction: f64,
    /// Tail deviation from x* below this fraction counts as convergence.
    pub xstar_fraction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            max_spread: 0.05,
            trend_band: (0.95, 1.05),
            zero_fraction: 1e-4,
            xstar_fraction: 1e-3,
        }
    }
}

/// Centered moving average; the first and last `width/2` samples are dropped.
fn smooth(xs: &[f64], width: usize) -> Vec<f64> {
    let half = width / 2;
    if xs.len() < width {
        return Vec::new();
    }
    xs.windows(width)
        .map(|w| w.iter().sum::<f64>() / width as f64)
        .collect::<Vec<_>>()
        .into_iter()
        .take(xs.len() - 2 * half)
        .collect()
}

fn range(xs: &[f64]) -> f64 {
    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    hi - lo
}

/// Peaks of `x` over the sampled window `[t_a, t_b]`.
pub fn estimate_period(traj: &Trajectory, window: (f64, f64)) -> Result<PeriodEstimate> {
    estimate_period_with(traj, window, &Tolerances::default())
}

pub fn estimate_period_with(
    traj: &Trajectory,
    window: (f64, f64),
    tol: &Tolerances,
) -> Result<PeriodEstimate> {
    let (ta, tb) = window;
    let (first, last) = (traj.times[0], traj.t_end());
    if !(ta >= first && tb <= last + 1e-9 && ta < tb) {
        return Err(Error::Coverage {
            t: if ta < first { ta } else { tb },
            from: first,
            to: last,
        });
    }
    let lo = traj.times.partition_point(|&t| t < ta - 1e-9);
    let hi = traj.times.partition_point(|&t| t <= tb + 1e-9);
    Ok(estimate_from_samples(&traj.times[lo..hi], &traj.x[lo..hi], tol))
}

/// Same estimate on raw samples (uniform spacing assumed).
pub fn estimate_from_samples(times: &[f64], xs: &[f64], tol: &Tolerances) -> PeriodEstimate {
    let half = SMOOTH_WIDTH / 2;
    let s = smooth(xs, SMOOTH_WIDTH);
    let mut peak_times = Vec::new();
    for i in 2..s.len().saturating_sub(2) {
        let v = s[i];
        if v > s[i - 1] && v > s[i - 2] && v > s[i + 1] && v > s[i + 2] {
            // parabolic refinement through the three central samples
            let (a, b, c) = (s[i - 1], v, s[i + 1]);
            let denom = a - 2.0 * b + c;
            let shift = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            let j = i + half;
            let dt = times[j + 1] - times[j];
            peak_times.push(times[j] + shift * dt);
        }
    }
    let gaps: Vec<f64> = peak_times.windows(2).map(|w| w[1] - w[0]).collect();
    let (period, relative_spread) = if peak_times.len() >= 3 {
        let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
        (Some(mean), range(&gaps) / mean)
    } else {
        (None, f64::NAN)
    };
    let amplitude = 0.5 * range(xs);
    let mid = xs.len() / 2;
    let amplitude_trend = if mid > 0 {
        range(&xs[mid..]) / range(&xs[..mid])
    } else {
        f64::NAN
    };
    let sustained = period.is_some()
        && relative_spread < tol.max_spread
        && amplitude_trend >= tol.trend_band.0
        && amplitude_trend <= tol.trend_band.1;
    PeriodEstimate {
        period,
        amplitude,
        peak_times,
        sustained,
        relative_spread,
        amplitude_trend,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryClass {
    ToZero,
    ToXStar,
    SustainedOscillation,
    Undetermined,
}

impl TrajectoryClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrajectoryClass::ToZero => "to_zero",
            TrajectoryClass::ToXStar => "to_xstar",
            TrajectoryClass::SustainedOscillation => "sustained_oscillation",
            TrajectoryClass::Undetermined => "undetermined",
        }
    }
}

impl std::fmt::Display for TrajectoryClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Start of the tail window, `t_end·(1 − TAIL_FRACTION)`.
pub fn tail_start(traj: &Trajectory) -> f64 {
    traj.t_end() * (1.0 - TAIL_FRACTION)
}

/// Long-time behaviour of a trajectory, judged on its tail.
pub fn classify_trajectory(traj: &Trajectory, eq: &Equilibria, tol: &Tolerances) -> TrajectoryClass {
    if traj.t_end() < 5.0 * traj.params.tau {
        return TrajectoryClass::Undetermined;
    }
    let start = traj.times.partition_point(|&t| t < tail_start(traj));
    let tail = &traj.x[start..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    if mean <= tol.zero_fraction * traj.x[0] {
        return TrajectoryClass::ToZero;
    }
    if let Some(xs) = eq.positive {
        let dev = |seg: &[f64]| seg.iter().map(|v| (v - xs).abs()).fold(0.0, f64::max) / xs;
        let mid = tail.len() / 2;
        let (early, late) = (dev(&tail[..mid]), dev(&tail[mid..]));
        if early.max(late) < tol.xstar_fraction && late <= early {
            return TrajectoryClass::ToXStar;
        }
    }
    let est = estimate_from_samples(&traj.times[start..], tail, tol);
    if est.sustained {
        return TrajectoryClass::SustainedOscillation;
    }
    TrajectoryClass::Undetermined
}

/// `B(x) = ∫₀ˣ β(s) s ds`.
pub fn b_integral(params: &ModelParams, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let scale = 0.5 * params.beta0 * x * x;
    adaptive_simpson(|s| params.flux(s), 0.0, x, 1e-13 * scale)
}

/// Panels per dimension for the double integral in [`lyapunov_j`].
pub const LYAPUNOV_PANELS: usize = 64;

/// Lyapunov functional of a segment `φ` on `[−τ, 0]`:
/// `B(φ(0)) + 1/(τ − τ_min) ∫_{τ_min}^{τ} ∫_{−r}^{0} (β(φ(a)) φ(a))² da dr`.
pub fn lyapunov_j_segment<F>(params: &ModelParams, segment: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let squared = |a: f64| segment(a).map(|v| params.flux(v).powi(2));
    let outer = try_simpson(
        |r| try_simpson(squared, -r, 0.0, LYAPUNOV_PANELS),
        params.tau_min,
        params.tau,
        LYAPUNOV_PANELS,
    )?;
    Ok(b_integral(params, segment(0.0)?) + outer / params.window())
}

/// Lyapunov functional along a trajectory at time `t`.
pub fn lyapunov_j(params: &ModelParams, traj: &Trajectory, t: f64) -> Result<f64> {
    if t > traj.t_end() + 1e-9 || t < 0.0 {
        return Err(Error::Coverage {
            t,
            from: 0.0,
            to: traj.t_end(),
        });
    }
    lyapunov_j_segment(params, |a| traj.eval(t + a))
}

/// Stability of the relevant equilibrium predicted by linear analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prediction {
    Stable,
    Unstable,
}

impl Prediction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Prediction::Stable => "stable",
            Prediction::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub tau: f64,
    pub classification: TrajectoryClass,
    pub period: Option<f64>,
    /// Tail mean of x; NaN when the run aborted.
    pub final_mean: f64,
    /// Absent when the spectral analysis does not apply (e.g. τ_min > 0).
    pub predicted: Option<Prediction>,
    /// Simulation error for aborted rows.
    pub error: Option<Error>,
}

/// Horizon used for rows close to the predicted boundary.
pub const NEAR_BOUNDARY_T_END: f64 = 1500.0;

/// Rows within this fraction of τ₀ get the longer horizon.
pub const NEAR_BOUNDARY_FRACTION: f64 = 0.2;

/// Prediction for the given parameters at delay `tau`.
pub fn predict(params: &ModelParams, tau: f64) -> Option<Prediction> {
    match classify_regime(params).regime {
        Regime::TrivialGloballyStable | Regime::DelayIndependentStable => Some(Prediction::Stable),
        Regime::DelayDependent => {
            let lin = linearize(params).ok()?;
            let summary = hopf_summary(&lin, params).ok()?;
            Some(if summary.predicts_unstable(tau) {
                Prediction::Unstable
            } else {
                Prediction::Stable
            })
        }
        Regime::Degenerate | Regime::NoPositiveEquilibrium => None,
    }
}

/// Simulate and classify on a uniform grid of `steps` delays in `[from, to]`.
pub fn sweep_tau(
    params: &ModelParams,
    tau_range: (f64, f64),
    steps: usize,
    config: &SimConfig,
    history: &HistoryFunction,
) -> Result<Vec<SweepRow>> {
    if steps < 2 {
        return Err(Error::InvalidParameter("sweep needs steps >= 2".into()));
    }
    let (from, to) = tau_range;
    if !(from.is_finite() && to.is_finite() && from < to) {
        return Err(Error::InvalidParameter(format!(
            "tau range [{from}, {to}] must be finite and increasing"
        )));
    }
    params.with_tau(from)?;
    let tau_0 = linearize(params)
        .ok()
        .and_then(|lin| hopf_summary(&lin, params).ok())
        .and_then(|s| s.tau_0);
    let taus: Vec<f64> = (0..steps)
        .map(|i| from + (to - from) * i as f64 / (steps - 1) as f64)
        .collect();
    let rows = taus
        .par_iter()
        .map(|&tau| sweep_row(params, tau, tau_0, config, history))
        .collect::<Vec<_>>();
    Ok(rows)
}

fn sweep_row(
    params: &ModelParams,
    tau: f64,
    tau_0: Option<f64>,
    config: &SimConfig,
    history: &HistoryFunction,
) -> SweepRow {
    let predicted = predict(params, tau);
    let aborted = |e: Error| SweepRow {
        tau,
        classification: TrajectoryClass::Undetermined,
        period: None,
        final_mean: f64::NAN,
        predicted,
        error: Some(e),
    };
    let p = match params.with_tau(tau) {
        Ok(p) => p,
        Err(e) => return aborted(e),
    };
    let mut cfg = *config;
    if tau_0.is_some_and(|t0| (tau - t0).abs() <= NEAR_BOUNDARY_FRACTION * t0) {
        cfg.t_end = cfg.t_end.max(NEAR_BOUNDARY_T_END);
    }
    let traj = match simulate(&p, history, &cfg) {
        Ok(t) => t,
        Err(e) => return aborted(e),
    };
    let tol = Tolerances::default();
    let eq = equilibria(&p);
    let classification = classify_trajectory(&traj, &eq, &tol);
    let start = traj.times.partition_point(|&t| t < tail_start(&traj));
    let tail = &traj.x[start..];
    let final_mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let period = estimate_from_samples(&traj.times[start..], tail, &tol).period;
    SweepRow {
        tau,
        classification,
        period,
        final_mean,
        predicted,
        error: None,
    }
}

/// Integrate `β(x)x` squared over a constant segment; used by tests as a
/// closed-form check of the double integral.
pub fn lyapunov_constant(params: &ModelParams, c: f64) -> f64 {
    let f = params.flux(c);
    b_integral(params, c) + f * f * (params.tau + params.tau_min) / 2.0
}
