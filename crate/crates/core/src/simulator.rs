//! Fixed-step integration of the distributed-delay equation.
//!
//! The default scheme augments the state with the window integral
//!
//! ```text
//! z(t) = ∫_{τ_min}^{τ} β(x(t − r)) x(t − r) dr,
//! z'(t) = β(x(t − τ_min)) x(t − τ_min) − β(x(t − τ)) x(t − τ),
//! ```
//!
//! which leaves a two-component system with two point delays, stepped with
//! classic RK4. Delayed values come from cubic Hermite dense output over past
//! steps, or from the history function for `t ≤ 0`. The direct scheme instead
//! evaluates the window integral by composite Simpson at every stage and serves
//! as an independent check.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numeric::{simpson, try_simpson};

/// Interpolation rule between samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interp {
    #[default]
    CubicHermite,
    Linear,
}

#[derive(Clone)]
enum HistoryKind {
    Constant(f64),
    Table {
        times: Vec<f64>,
        values: Vec<f64>,
        /// Node slopes (monotone cubic); empty for linear tables.
        slopes: Vec<f64>,
    },
    Analytic(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// Initial data φ on `[−τ, 0]`.
#[derive(Clone)]
pub struct HistoryFunction {
    kind: HistoryKind,
}

impl fmt::Debug for HistoryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            HistoryKind::Constant(c) => write!(f, "HistoryFunction::Constant({c})"),
            HistoryKind::Table { times, .. } => {
                write!(f, "HistoryFunction::Table({} nodes)", times.len())
            }
            HistoryKind::Analytic(_) => f.write_str("HistoryFunction::Analytic"),
        }
    }
}

impl HistoryFunction {
    pub fn constant(value: f64) -> Self {
        Self {
            kind: HistoryKind::Constant(value),
        }
    }

    /// Tabulated history. `CubicHermite` uses monotone (Fritsch–Carlson)
    /// slopes so that nonnegative data stays nonnegative.
    pub fn table(times: Vec<f64>, values: Vec<f64>, interp: Interp) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::History("times and values differ in length".into()));
        }
        if times.len() < 2 {
            return Err(Error::History("a table needs at least two nodes".into()));
        }
        if !times.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::History("table times must be strictly increasing".into()));
        }
        let slopes = match interp {
            Interp::Linear => Vec::new(),
            Interp::CubicHermite => monotone_slopes(&times, &values),
        };
        Ok(Self {
            kind: HistoryKind::Table {
                times,
                values,
                slopes,
            },
        })
    }

    /// History given by a closure, sampled wherever it is needed.
    pub fn analytic<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            kind: HistoryKind::Analytic(Arc::new(f)),
        }
    }

    /// Check coverage of `[−τ, 0]`, finiteness and nonnegativity.
    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        let check = |v: f64, t: f64| {
            if !v.is_finite() {
                Err(Error::History(format!("non-finite value at t = {t}")))
            } else if v < 0.0 {
                Err(Error::History(format!("negative value {v} at t = {t}")))
            } else {
                Ok(())
            }
        };
        match &self.kind {
            HistoryKind::Constant(c) => check(*c, 0.0),
            HistoryKind::Table { times, values, .. } => {
                let (first, last) = (times[0], times[times.len() - 1]);
                if first > -params.tau || last < 0.0 {
                    return Err(Error::History(format!(
                        "table covers [{first}, {last}], needs [{}, 0]",
                        -params.tau
                    )));
                }
                times
                    .iter()
                    .zip(values)
                    .try_for_each(|(&t, &v)| check(v, t))
            }
            HistoryKind::Analytic(f) => {
                let n = 1024;
                (0..=n).try_for_each(|i| {
                    let t = -params.tau * (1.0 - i as f64 / n as f64);
                    check(f(t), t)
                })
            }
        }
    }

    /// φ(t). Tables clamp outside their range.
    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            HistoryKind::Constant(c) => *c,
            HistoryKind::Analytic(f) => f(t),
            HistoryKind::Table {
                times,
                values,
                slopes,
            } => {
                let n = times.len();
                if t <= times[0] {
                    return values[0];
                }
                if t >= times[n - 1] {
                    return values[n - 1];
                }
                let i = times.partition_point(|&s| s <= t) - 1;
                let h = times[i + 1] - times[i];
                let s = (t - times[i]) / h;
                if slopes.is_empty() {
                    values[i] + s * (values[i + 1] - values[i])
                } else {
                    hermite(values[i], values[i + 1], slopes[i], slopes[i + 1], h, s)
                }
            }
        }
    }
}

/// Fritsch–Carlson slopes for a monotone piecewise cubic.
fn monotone_slopes(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    let secant: Vec<f64> = (0..n - 1)
        .map(|i| (y[i + 1] - y[i]) / (t[i + 1] - t[i]))
        .collect();
    let mut m = vec![0.0; n];
    m[0] = secant[0];
    m[n - 1] = secant[n - 2];
    for i in 1..n - 1 {
        m[i] = if secant[i - 1] * secant[i] <= 0.0 {
            0.0
        } else {
            0.5 * (secant[i - 1] + secant[i])
        };
    }
    for i in 0..n - 1 {
        if secant[i] == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        let a = m[i] / secant[i];
        let b = m[i + 1] / secant[i];
        let r = a * a + b * b;
        if r > 9.0 {
            let s = 3.0 / r.sqrt();
            m[i] = s * a * secant[i];
            m[i + 1] = s * b * secant[i];
        }
    }
    m
}

/// Cubic Hermite on one interval of width `h`, at fraction `s ∈ [0, 1]`.
#[inline]
fn hermite(y0: f64, y1: f64, d0: f64, d1: f64, h: f64, s: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * h * d0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * h * d1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// RK4 on `(x, z)` with two point delays.
    #[default]
    Augmented,
    /// RK4 on `x` with the window integral by Simpson at every stage.
    DirectQuadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Step size in days.
    pub dt: f64,
    /// Horizon in days.
    pub t_end: f64,
    pub scheme: Scheme,
    /// Simpson panels for window integrals (even, ≥ 2).
    pub quad_panels: usize,
    /// Dense-output rule between grid points.
    pub interp: Interp,
}

pub const DEFAULT_T_END: f64 = 600.0;
pub const DEFAULT_QUAD_PANELS: usize = 512;

/// `min(0.05, (τ − τ_min)/256)`, further capped by `τ_min` when it is positive.
pub fn default_dt(params: &ModelParams) -> f64 {
    let mut dt = (params.window() / 256.0).min(0.05);
    if params.tau_min > 0.0 {
        dt = dt.min(params.tau_min);
    }
    dt
}

impl SimConfig {
    /// Defaults for the given parameters.
    pub fn for_params(params: &ModelParams) -> Self {
        Self {
            dt: default_dt(params),
            t_end: DEFAULT_T_END,
            scheme: Scheme::Augmented,
            quad_panels: DEFAULT_QUAD_PANELS,
            interp: Interp::CubicHermite,
        }
    }

    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt = {} must be positive", self.dt));
        }
        if !(self.t_end >= self.dt && self.t_end.is_finite()) {
            return bad(format!("t_end = {} must be at least dt", self.t_end));
        }
        if self.dt > params.window() / 4.0 {
            return bad(format!(
                "dt = {} exceeds (tau - tau_min)/4 = {}",
                self.dt,
                params.window() / 4.0
            ));
        }
        if params.tau_min > 0.0 && self.dt > params.tau_min {
            return bad(format!(
                "dt = {} exceeds tau_min = {}; lookups at t - tau_min would fall inside the current step",
                self.dt, params.tau_min
            ));
        }
        if self.quad_panels < 2 || !self.quad_panels.is_multiple_of(2) {
            return bad(format!(
                "quad_panels = {} must be even and >= 2",
                self.quad_panels
            ));
        }
        Ok(())
    }
}

/// A computed solution on the uniform grid `t_i = i·dt`, `0 ≤ t_i ≤ t_end`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: ModelParams,
    pub history: HistoryFunction,
    pub dt: f64,
    pub interp: Interp,
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    /// Window integral `∫_{τ_min}^{τ} β(x(t − r)) x(t − r) dr` at each grid time.
    pub z: Vec<f64>,
    /// `x'` at each grid time (right derivative at t = 0).
    pub dx: Vec<f64>,
}

/// Past values: history for `t ≤ 0`, dense output over the stored grid after.
struct Past<'a> {
    history: &'a HistoryFunction,
    dt: f64,
    interp: Interp,
    x: &'a [f64],
    dx: &'a [f64],
}

impl Past<'_> {
    fn last_time(&self) -> f64 {
        (self.x.len() - 1) as f64 * self.dt
    }

    fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.history.eval(t);
        }
        let pos = t / self.dt;
        let nearest = pos.round();
        if (pos - nearest).abs() < 1e-9 {
            let i = nearest as usize;
            if i < self.x.len() {
                return self.x[i];
            }
        }
        let i = (pos.floor() as usize).min(self.x.len() - 2);
        let s = pos - i as f64;
        match self.interp {
            Interp::CubicHermite => hermite(
                self.x[i],
                self.x[i + 1],
                self.dx[i],
                self.dx[i + 1],
                self.dt,
                s,
            ),
            Interp::Linear => self.x[i] + s * (self.x[i + 1] - self.x[i]),
        }
    }
}

impl Trajectory {
    fn past(&self) -> Past<'_> {
        Past {
            history: &self.history,
            dt: self.dt,
            interp: self.interp,
            x: &self.x,
            dx: &self.dx,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("trajectory has at least one point")
    }

    /// `x(t)` for `t ∈ [−τ, t_end]`; grid times return the stored value.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let (from, to) = (-self.params.tau, self.t_end());
        if !(t >= from - 1e-12 && t <= to + 1e-9 * self.dt) {
            return Err(Error::Coverage { t, from, to });
        }
        if self.x.len() < 2 && t > 0.0 {
            return Ok(self.x[0]);
        }
        Ok(self.past().eval(t))
    }

    /// Window integral at time `t` by composite Simpson on the dense output.
    pub fn integral_term(&self, t: f64, panels: usize) -> Result<f64> {
        if panels < 2 || !panels.is_multiple_of(2) {
            return Err(Error::Config(format!("panels = {panels} must be even and >= 2")));
        }
        let p = &self.params;
        let (from, to) = (t - p.tau, t - p.tau_min);
        if from < -p.tau - 1e-12 || to > self.t_end() + 1e-9 * self.dt {
            return Err(Error::Coverage {
                t,
                from: 0.0,
                to: self.t_end() + p.tau_min,
            });
        }
        let f = |r: f64| self.eval(t - r).map(|x| p.flux(x));
        // the derivative jumps where the history meets the solution (r = t)
        if t > p.tau_min && t < p.tau {
            let left = ((panels as f64 * (t - p.tau_min) / p.window()) / 2.0).round() as usize;
            let left = 2 * left.clamp(1, panels / 2);
            let right = panels.saturating_sub(left).max(2);
            return Ok(try_simpson(f, p.tau_min, t, left)? + try_simpson(f, t, p.tau, right)?);
        }
        try_simpson(f, p.tau_min, p.tau, panels)
    }

    /// Largest stored density.
    pub fn max_x(&self) -> f64 {
        self.x.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `z(0) = ∫_{τ_min}^{τ} β(φ(−r)) φ(−r) dr` by composite Simpson.
pub fn init_augmented(history: &HistoryFunction, params: &ModelParams, config: &SimConfig) -> f64 {
    simpson(
        |r| params.flux(history.eval(-r)),
        params.tau_min,
        params.tau,
        config.quad_panels,
    )
}

/// Window integral over a history function alone (`t ≤ τ_min`).
pub fn history_integral(history: &HistoryFunction, params: &ModelParams, t: f64, panels: usize) -> Result<f64> {
    if t > params.tau_min {
        return Err(Error::Coverage {
            t,
            from: 0.0,
            to: params.tau_min,
        });
    }
    if t < 0.0 {
        return Err(Error::Coverage {
            t,
            from: 0.0,
            to: params.tau_min,
        });
    }
    Ok(simpson(
        |r| params.flux(history.eval(t - r)),
        params.tau_min,
        params.tau,
        panels,
    ))
}

#[inline]
fn rhs_x(params: &ModelParams, x: f64, z: f64) -> f64 {
    -(params.delta + params.beta_unchecked(x)) * x + 2.0 / params.window() * z
}

/// Integrate from the history over `[0, t_end]`.
pub fn simulate(params: &ModelParams, history: &HistoryFunction, config: &SimConfig) -> Result<Trajectory> {
    params.validate()?;
    config.validate(params)?;
    history.validate(params)?;

    let dt = config.dt;
    let steps = (config.t_end / dt + 1e-9).floor() as usize;
    let x0 = history.eval(0.0);
    let z0 = init_augmented(history, params, config);

    let mut x = Vec::with_capacity(steps + 1);
    let mut z = Vec::with_capacity(steps + 1);
    let mut dx = Vec::with_capacity(steps + 1);
    x.push(x0);
    z.push(z0);
    dx.push(rhs_x(params, x0, z0));
    let mut max_x = x0.max(0.0);

    for n in 0..steps {
        let t = n as f64 * dt;
        let (x_next, z_next) = {
            let past = Past {
                history,
                dt,
                interp: config.interp,
                x: &x,
                dx: &dx,
            };
            match config.scheme {
                Scheme::Augmented => step_augmented(params, &past, t, dt, x[n], z[n]),
                Scheme::DirectQuadrature => {
                    step_direct(params, &past, config.quad_panels, t, dt, x[n], dx[n])
                }
            }
        };
        let t_next = (n + 1) as f64 * dt;
        if !(x_next.is_finite() && z_next.is_finite()) {
            return Err(Error::NonFinite {
                step: n + 1,
                t: t_next,
            });
        }
        max_x = max_x.max(x_next);
        if x_next < -1e-9 * max_x {
            return Err(Error::NegativeExcursion {
                step: n + 1,
                t: t_next,
                x: x_next,
            });
        }
        let z_next = match config.scheme {
            Scheme::Augmented => z_next,
            Scheme::DirectQuadrature => {
                // dx at t_next needs z_next, so the last step uses the stage segment
                let past = Past {
                    history,
                    dt,
                    interp: config.interp,
                    x: &x,
                    dx: &dx,
                };
                let seg = StageSegment::new(t, x[n], dx[n], t_next, x_next);
                window_integral(params, &past, config.quad_panels, t_next, Some(&seg))
            }
        };
        x.push(x_next);
        z.push(z_next);
        dx.push(rhs_x(params, x_next, z_next));
    }

    let times = (0..=steps).map(|i| i as f64 * dt).collect();
    Ok(Trajectory {
        params: *params,
        history: history.clone(),
        dt,
        interp: config.interp,
        times,
        x,
        z,
        dx,
    })
}

/// Delayed value at `s`; `current` supplies the stage value when `s` is the
/// stage time itself (τ_min = 0).
#[inline]
fn delayed(past: &Past<'_>, s: f64, stage_t: f64, current: f64) -> f64 {
    if s >= stage_t {
        current
    } else {
        past.eval(s)
    }
}

fn step_augmented(params: &ModelParams, past: &Past<'_>, t: f64, dt: f64, x: f64, z: f64) -> (f64, f64) {
    let f = |ts: f64, xs: f64, zs: f64| {
        let lead = delayed(past, ts - params.tau_min, ts, xs);
        let lag = past.eval(ts - params.tau);
        (
            rhs_x(params, xs, zs),
            params.flux(lead) - params.flux(lag),
        )
    };
    let h = 0.5 * dt;
    let (kx1, kz1) = f(t, x, z);
    let (kx2, kz2) = f(t + h, x + h * kx1, z + h * kz1);
    let (kx3, kz3) = f(t + h, x + h * kx2, z + h * kz2);
    let (kx4, kz4) = f(t + dt, x + dt * kx3, z + dt * kz3);
    (
        x + dt / 6.0 * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4),
        z + dt / 6.0 * (kz1 + 2.0 * kz2 + 2.0 * kz3 + kz4),
    )
}

/// Current-step segment used by the direct scheme: quadratic through
/// `(t_n, x_n)` with slope `d_n`, reaching `x_s` at the stage time.
struct StageSegment {
    t0: f64,
    x0: f64,
    d0: f64,
    curv: f64,
}

impl StageSegment {
    fn new(t0: f64, x0: f64, d0: f64, ts: f64, xs: f64) -> Self {
        let h = ts - t0;
        let curv = if h > 0.0 {
            (xs - x0 - d0 * h) / (h * h)
        } else {
            0.0
        };
        Self { t0, x0, d0, curv }
    }

    fn eval(&self, s: f64) -> f64 {
        let u = s - self.t0;
        self.x0 + self.d0 * u + self.curv * u * u
    }
}

fn window_integral(
    params: &ModelParams,
    past: &Past<'_>,
    panels: usize,
    t: f64,
    segment: Option<&StageSegment>,
) -> f64 {
    let known_until = past.last_time();
    simpson(
        |r| {
            let s = t - r;
            let v = match segment {
                Some(seg) if s > known_until => seg.eval(s),
                _ => past.eval(s.min(known_until)),
            };
            params.flux(v)
        },
        params.tau_min,
        params.tau,
        panels,
    )
}

fn step_direct(
    params: &ModelParams,
    past: &Past<'_>,
    panels: usize,
    t: f64,
    dt: f64,
    x: f64,
    dxn: f64,
) -> (f64, f64) {
    let f = |ts: f64, xs: f64| {
        let seg = StageSegment::new(t, x, dxn, ts, xs);
        let q = window_integral(params, past, panels, ts, Some(&seg));
        rhs_x(params, xs, q)
    };
    let h = 0.5 * dt;
    let k1 = f(t, x);
    let k2 = f(t + h, x + h * k1);
    let k3 = f(t + h, x + h * k2);
    let k4 = f(t + dt, x + dt * k3);
    (x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), 0.0)
}
