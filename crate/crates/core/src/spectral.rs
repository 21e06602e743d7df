//! Characteristic-equation analysis around the positive equilibrium.
//!
//! With `τ_min = 0`, a root `λ = iω` at delay `τ` exists exactly when
//! `y = ωτ` solves
//!
//! ```text
//! K(y) = κ,    (cos y − 1)/y² = 1/(2β*τ),
//! ```
//!
//! where `K(y) = sin(y)/y` and `κ = (δ + β*)/(2β*)`. The first equation fixes
//! `y`, the second then gives `τ`. `K` is monotone between consecutive
//! critical points `x_k` (the non-negative solutions of `x = tan x`), so every
//! crossing is found by bisection on one monotone branch.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Linearization, ModelParams, DEGENERATE_TOL};
use crate::numeric::{bisect, newton_polish};

/// Default number of tabulated critical points `x_1 … x_K`.
pub const DEFAULT_K_MAX: usize = 32;

/// κ within this distance of some `u_k`/`v_k` is a tangential (boundary) case.
pub const TANGENCY_TOL: f64 = 1e-9;

/// `|y − x_k|` below this marks a crossing as degenerate for transversality.
pub const DEGENERATE_Y_TOL: f64 = 1e-9;

const ROOT_TOL: f64 = 1e-13;
const NEWTON_STEPS: usize = 5;

/// `K(x) = sin(x)/x`, with `K(0) = 1`.
pub fn k(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain {
            name: "x",
            value: x,
            domain: "[0, inf)",
        });
    }
    Ok(k_unchecked(x))
}

#[inline]
fn k_unchecked(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

#[inline]
fn k_prime(x: f64) -> f64 {
    g(x) / (x * x)
}

/// `g(x) = x cos(x) − sin(x)`; vanishes exactly at the critical points of `K`.
#[inline]
pub fn g(x: f64) -> f64 {
    x * x.cos() - x.sin()
}

/// `h(x) = 2(1 − x)/(1 − 2x)` on `[−1, 1/2]`, with `h(1/2) = +∞`.
pub fn h(x: f64) -> Result<f64> {
    if !(-1.0..=0.5).contains(&x) {
        return Err(Error::Domain {
            name: "x",
            value: x,
            domain: "[-1, 1/2]",
        });
    }
    if x == 0.5 {
        return Ok(f64::INFINITY);
    }
    Ok(2.0 * (1.0 - x) / (1.0 - 2.0 * x))
}

/// `h(u₀)`: above this ratio the equilibrium can lose stability.
pub fn sinc_threshold() -> f64 {
    static THRESHOLD: OnceLock<f64> = OnceLock::new();
    *THRESHOLD.get_or_init(|| {
        let u0 = tan_fixed_point(1).cos();
        h(u0).expect("u0 lies in (-1, 0)")
    })
}

/// The `k`-th positive solution of `x = tan x`, in `(kπ, kπ + π/2)`.
fn tan_fixed_point(k: usize) -> f64 {
    let lo = k as f64 * PI;
    let hi = lo + 0.5 * PI;
    // g(kπ) = ±kπ and g(kπ + π/2) = ∓1, so the bracket always holds.
    let x = bisect(g, lo, hi, ROOT_TOL).expect("g changes sign on (kπ, kπ+π/2)");
    newton_polish(g, |x| -x * x.sin(), x, lo, hi, NEWTON_STEPS)
}

/// Critical points of `K` and the extrema `u_k = cos(x_{2k+1})`, `v_k = cos(x_{2k})`.
#[derive(Debug, Clone, PartialEq)]
pub struct TanFixedPoints {
    /// `x_0 = 0 < x_1 < … < x_K`.
    pub xs: Vec<f64>,
    /// Minima of `K`: `u_k = cos(x_{2k+1})` for every `2k+1 ≤ K`.
    pub us: Vec<f64>,
    /// Maxima of `K`: `v_k = cos(x_{2k})` for every `2k ≤ K`.
    pub vs: Vec<f64>,
}

impl TanFixedPoints {
    /// Highest tabulated index `K`.
    pub fn k_max(&self) -> usize {
        self.xs.len() - 1
    }

    pub fn x(&self, k: usize) -> Result<f64> {
        self.xs.get(k).copied().ok_or(Error::TableExhausted {
            needed: k,
            available: self.k_max(),
        })
    }

    pub fn u(&self, k: usize) -> Result<f64> {
        self.x(2 * k + 1).map(f64::cos)
    }

    pub fn v(&self, k: usize) -> Result<f64> {
        self.x(2 * k).map(f64::cos)
    }

    /// Index `i` with `x_i < y < x_{i+1}`, or `Err` past the table.
    fn interval_of(&self, y: f64) -> Result<usize> {
        let pos = self.xs.partition_point(|&x| x <= y);
        if pos == 0 || pos >= self.xs.len() {
            return Err(Error::TableExhausted {
                needed: pos,
                available: self.k_max(),
            });
        }
        Ok(pos - 1)
    }
}

/// Tabulate `x_1 … x_{k_max}` (plus `x_0 = 0`) and the derived `u_k`, `v_k`.
pub fn tan_fixed_points(k_max: usize) -> Result<TanFixedPoints> {
    if k_max < 1 {
        return Err(Error::InvalidParameter("k_max must be >= 1".into()));
    }
    let mut xs = Vec::with_capacity(k_max + 1);
    xs.push(0.0);
    xs.extend((1..=k_max).map(tan_fixed_point));
    let us = xs.iter().skip(1).step_by(2).map(|x| x.cos()).collect();
    let vs = xs.iter().step_by(2).map(|x| x.cos()).collect();
    Ok(TanFixedPoints { xs, us, vs })
}

/// `∫_{τ_min}^{τ} e^{−λr} dr`, switching to a series when `|λ|(τ − τ_min)` is small.
pub fn kernel_transform(lambda: Complex64, tau_min: f64, tau: f64) -> Complex64 {
    let span = tau - tau_min;
    let z = lambda * span;
    let shift = (-lambda * tau_min).exp();
    if z.norm() < 0.5 {
        // (1 − e^{−z})/z = Σ (−z)^k/(k+1)!, avoids cancellation for small z
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..24 {
            term *= -z / (k + 1) as f64;
            sum += term;
        }
        shift * sum * span
    } else {
        (shift - (-lambda * tau).exp()) / lambda
    }
}

/// `Δ(λ) = λ + δ + β* − (2β*/(τ − τ_min)) ∫_{τ_min}^{τ} e^{−λr} dr` at delay `tau`.
pub fn char_delta(lin: &Linearization, params: &ModelParams, tau: f64, lambda: Complex64) -> Complex64 {
    let span = tau - params.tau_min;
    lambda + lin.delta_plus_beta_star
        - 2.0 * lin.beta_star / span * kernel_transform(lambda, params.tau_min, tau)
}

/// The unique real characteristic root when `β* ≥ 0`.
pub fn real_root(lin: &Linearization, params: &ModelParams, tau: f64) -> Result<f64> {
    if lin.beta_star < 0.0 {
        return Err(Error::Unsupported(
            "real_root requires beta_star >= 0 (uniqueness fails otherwise)".into(),
        ));
    }
    if !(tau > params.tau_min) {
        return Err(Error::InvalidParameter(
            "tau must exceed tau_min".into(),
        ));
    }
    let delta = lin.delta_plus_beta_star - lin.beta_star;
    if lin.beta_star == 0.0 {
        return Ok(-delta);
    }
    let f = |l: f64| char_delta(lin, params, tau, Complex64::new(l, 0.0)).re;
    // For λ ≤ 0 the transform is ≥ τ − τ_min, so Δ(λ) ≤ λ + δ − β*; for λ ≥ 0
    // it is ≤ τ − τ_min, so Δ(λ) ≥ λ + δ − β*. Both ends follow.
    let shift = lin.beta_star - delta;
    let mut lo = shift.min(0.0) - 1.0;
    let mut hi = shift.max(0.0) + 1.0;
    // Expansion guard for rounding in Δ; never triggers for exact arithmetic.
    for _ in 0..8 {
        if f(lo) < 0.0 {
            break;
        }
        lo -= 1.0;
    }
    for _ in 0..8 {
        if f(hi) > 0.0 {
            break;
        }
        hi += 1.0;
    }
    bisect(f, lo, hi, 0.0)
}

/// Sign of `dRe(λ)/dτ` at a crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transversality {
    /// Root moves into the right half plane as τ increases.
    Positive,
    /// Root moves back into the left half plane.
    Negative,
    /// `y` coincides with a critical point `x_k`.
    Degenerate,
}

impl Transversality {
    pub fn sign(&self) -> i32 {
        match self {
            Transversality::Positive => 1,
            Transversality::Negative => -1,
            Transversality::Degenerate => 0,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Transversality::Positive => "+1",
            Transversality::Negative => "-1",
            Transversality::Degenerate => "degenerate",
        }
    }
}

/// Branch label `(l, side)`: `side = 1` for the crossing on the falling side of
/// the `l`-th lobe reached by κ, `side = 2` for the rising side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Branch {
    pub l: usize,
    pub side: u8,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.l, self.side)
    }
}

/// One pair of purely imaginary roots `±iω_c` at delay `τ_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingPoint {
    pub tau_c: f64,
    pub omega_c: f64,
    /// `ω_c τ_c`.
    pub y: f64,
    pub branch: Branch,
    /// Search interval on the `y` axis the crossing was bracketed in.
    pub interval: (f64, f64),
    pub transversality: Transversality,
    /// False only at a tangential point with `τ_c = −2/(δ + β*)`.
    pub simple_root: bool,
}

/// Which configuration of crossings the ratio `R` produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HopfCase {
    /// `h(u_k) < R < h(u_{k+1})`: `2(k+1)` crossings.
    I(usize),
    /// `R = h(u_k)`: `2k+1` crossings, one tangential at `x_{2k+1}`.
    II(usize),
    /// `h(v_{k+1}) < R < h(v_k)`, `k ≥ 1`: `2k+1` crossings.
    III(usize),
    /// `R = h(v_k)`, `k ≥ 1`: `2k` crossings, one tangential at `x_{2k}`.
    IV(usize),
    /// `h(v_1) < R`: a single crossing with `y ∈ (0, π)`.
    V,
    /// No purely imaginary roots for any delay.
    None,
}

impl HopfCase {
    /// Number of crossings the case predicts.
    pub fn expected_count(&self) -> usize {
        match *self {
            HopfCase::I(k) => 2 * (k + 1),
            HopfCase::II(k) => 2 * k + 1,
            HopfCase::III(k) => 2 * k + 1,
            HopfCase::IV(k) => 2 * k,
            HopfCase::V => 1,
            HopfCase::None => 0,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            HopfCase::I(k) => format!("(i) k={k}"),
            HopfCase::II(k) => format!("(ii) k={k}"),
            HopfCase::III(k) => format!("(iii) k={k}"),
            HopfCase::IV(k) => format!("(iv) k={k}"),
            HopfCase::V => "(v)".into(),
            HopfCase::None => "none".into(),
        }
    }
}

fn check_analytic_preconditions(lin: &Linearization, params: &ModelParams) -> Result<()> {
    if params.tau_min != 0.0 {
        return Err(Error::Unsupported(
            "analytic crossing enumeration requires tau_min = 0".into(),
        ));
    }
    if (lin.ratio - 2.0).abs() <= DEGENERATE_TOL {
        return Err(Error::Degenerate(format!(
            "delta + beta_star = 0 (R = {} within {DEGENERATE_TOL:e} of 2)",
            lin.ratio
        )));
    }
    Ok(())
}

/// Locate κ among the extrema of `K`.
pub fn hopf_case(lin: &Linearization, tables: &TanFixedPoints) -> Result<HopfCase> {
    let Some(kappa) = lin.kappa else {
        return Ok(HopfCase::None);
    };
    if kappa < 0.0 {
        let u0 = tables.u(0)?;
        if kappa < u0 - TANGENCY_TOL {
            return Ok(HopfCase::None);
        }
        for k in 0.. {
            let uk = tables.u(k)?;
            if (kappa - uk).abs() <= TANGENCY_TOL {
                return Ok(HopfCase::II(k));
            }
            let next = tables.u(k + 1)?;
            if kappa < next - TANGENCY_TOL {
                return Ok(HopfCase::I(k));
            }
        }
    } else if kappa > 0.0 {
        for k in 0.. {
            if k >= 1 && (kappa - tables.v(k)?).abs() <= TANGENCY_TOL {
                return Ok(HopfCase::IV(k));
            }
            let next = tables.v(k + 1)?;
            if kappa > next + TANGENCY_TOL {
                return Ok(if k == 0 { HopfCase::V } else { HopfCase::III(k) });
            }
        }
    }
    Err(Error::Degenerate("kappa = 0 (delta + beta_star = 0)".into()))
}

/// Solve `K(y) = κ` on a monotone stretch `(lo, hi)` of `K`.
fn solve_branch(kappa: f64, lo: f64, hi: f64) -> Result<f64> {
    let f = |y: f64| k_unchecked(y) - kappa;
    let y = bisect(f, lo, hi, ROOT_TOL)?;
    Ok(newton_polish(f, k_prime, y, lo, hi, NEWTON_STEPS))
}

fn build_crossing(
    lin: &Linearization,
    tables: &TanFixedPoints,
    y: f64,
    branch: Branch,
    interval: (f64, f64),
) -> Result<CrossingPoint> {
    let tau_c = y * y / (2.0 * lin.beta_star * (y.cos() - 1.0));
    let omega_c = y / tau_c;
    let mut c = CrossingPoint {
        tau_c,
        omega_c,
        y,
        branch,
        interval,
        transversality: Transversality::Degenerate,
        simple_root: true,
    };
    c.transversality = transversality(&c, tables)?;
    if c.transversality == Transversality::Degenerate {
        let double = -2.0 / lin.delta_plus_beta_star;
        c.simple_root = (tau_c - double).abs() > 1e-9 * double.abs();
    }
    Ok(c)
}

/// Enumerate all purely imaginary crossings (`τ_min = 0` only), sorted by `τ_c`.
///
/// `k_max` is the size of the critical-point table searched; cases needing a
/// larger table fail with [`Error::TableExhausted`].
pub fn find_crossings(
    lin: &Linearization,
    params: &ModelParams,
    k_max: usize,
) -> Result<Vec<CrossingPoint>> {
    let tables = tan_fixed_points(k_max)?;
    find_crossings_in(lin, params, &tables).map(|(_, c)| c)
}

fn find_crossings_in(
    lin: &Linearization,
    params: &ModelParams,
    tables: &TanFixedPoints,
) -> Result<(HopfCase, Vec<CrossingPoint>)> {
    check_analytic_preconditions(lin, params)?;
    let case = hopf_case(lin, tables)?;
    let Some(kappa) = lin.kappa else {
        return Ok((case, Vec::new()));
    };
    let x = |i: usize| tables.x(i);
    let pi = |m: usize| m as f64 * PI;
    let mut out = Vec::new();
    let solve = |l: usize, side: u8, lo: f64, hi: f64| -> Result<CrossingPoint> {
        let y = solve_branch(kappa, lo, hi)?;
        build_crossing(lin, tables, y, Branch { l, side }, (lo, hi))
    };
    let tangent = |y: f64, l: usize, side: u8| build_crossing(lin, tables, y, Branch { l, side }, (y, y));

    match case {
        HopfCase::None => {}
        // κ < 0: two crossings per negative lobe ((2l−1)π, 2lπ) deep enough.
        HopfCase::I(k) | HopfCase::II(k) => {
            let full = if matches!(case, HopfCase::I(_)) { k + 1 } else { k };
            for l in 1..=full {
                let trough = x(2 * l - 1)?;
                out.push(solve(l, 1, pi(2 * l - 1), trough)?);
                out.push(solve(l, 2, trough, pi(2 * l))?);
            }
            if matches!(case, HopfCase::II(_)) {
                out.push(tangent(x(2 * k + 1)?, k + 1, 1)?);
            }
        }
        // κ > 0: one crossing in (0, π), then two per positive lobe (2jπ, (2j+1)π).
        HopfCase::V | HopfCase::III(_) | HopfCase::IV(_) => {
            out.push(solve(1, 1, 0.0, pi(1))?);
            let (full, touch) = match case {
                HopfCase::III(k) => (k, None),
                HopfCase::IV(k) => (k - 1, Some(k)),
                _ => (0, None),
            };
            for j in 1..=full {
                let peak = x(2 * j)?;
                out.push(solve(j, 2, pi(2 * j), peak)?);
                out.push(solve(j + 1, 1, peak, pi(2 * j + 1))?);
            }
            if let Some(k) = touch {
                out.push(tangent(x(2 * k)?, k, 2)?);
            }
        }
    }
    out.sort_by(|a, b| a.tau_c.total_cmp(&b.tau_c));
    Ok((case, out))
}

/// Sign of `dRe(λ)/dτ` from the position of `y` among the `x_k`.
pub fn transversality(crossing: &CrossingPoint, tables: &TanFixedPoints) -> Result<Transversality> {
    let y = crossing.y;
    let i = tables.interval_of(y)?;
    let near = |j: usize| (y - tables.xs[j]).abs() < DEGENERATE_Y_TOL;
    if near(i) || (i + 1 < tables.xs.len() && near(i + 1)) {
        return Ok(Transversality::Degenerate);
    }
    Ok(if i % 2 == 0 {
        Transversality::Positive
    } else {
        Transversality::Negative
    })
}

/// Hopf structure for the given parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct HopfSummary {
    pub case: HopfCase,
    /// Crossings ordered by `τ_c`.
    pub crossings: Vec<CrossingPoint>,
    /// First non-degenerate crossing delay.
    pub tau_0: Option<f64>,
    /// Largest `τ_c` among positive-transversality crossings.
    pub tau_l: Option<f64>,
    /// `2π/ω_c` at `τ_0`.
    pub onset_period: Option<f64>,
}

impl HopfSummary {
    pub fn stable_for_all_delays(&self) -> bool {
        self.crossings.is_empty()
    }

    /// Number of characteristic-root pairs in the right half plane at `tau`,
    /// counted from the signed crossings passed on `(0, tau]`.
    pub fn unstable_pairs(&self, tau: f64) -> i32 {
        self.crossings
            .iter()
            .filter(|c| c.tau_c <= tau)
            .map(|c| c.transversality.sign())
            .sum()
    }

    pub fn predicts_unstable(&self, tau: f64) -> bool {
        self.unstable_pairs(tau) > 0
    }
}

pub fn hopf_summary(lin: &Linearization, params: &ModelParams) -> Result<HopfSummary> {
    hopf_summary_with(lin, params, DEFAULT_K_MAX)
}

pub fn hopf_summary_with(
    lin: &Linearization,
    params: &ModelParams,
    k_max: usize,
) -> Result<HopfSummary> {
    let tables = tan_fixed_points(k_max)?;
    let (case, crossings) = find_crossings_in(lin, params, &tables)?;
    let first = crossings
        .iter()
        .find(|c| c.transversality != Transversality::Degenerate);
    let tau_0 = first.map(|c| c.tau_c);
    let onset_period = first.map(|c| 2.0 * PI / c.omega_c);
    let tau_l = crossings
        .iter()
        .filter(|c| c.transversality == Transversality::Positive)
        .map(|c| c.tau_c)
        .reduce(f64::max);
    Ok(HopfSummary {
        case,
        crossings,
        tau_0,
        tau_l,
        onset_period,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::linearize;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn k_values() {
        assert_eq!(k(0.0).unwrap(), 1.0);
        assert!(k(PI).unwrap().abs() < 1e-16);
        assert!(k(-1.0).is_err());
    }

    #[test]
    fn k_minimum_matches_golden_section() {
        // independent route: golden-section minimisation of K on (π, 3π/2)
        let (mut a, mut b) = (PI, 1.5 * PI);
        let r = (5f64.sqrt() - 1.0) / 2.0;
        while b - a > 1e-12 {
            let c = b - r * (b - a);
            let d = a + r * (b - a);
            if k_unchecked(c) < k_unchecked(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let t = tan_fixed_points(1).unwrap();
        assert!(close(t.xs[1], 0.5 * (a + b), 1e-6));
        assert!(close(k(t.xs[1]).unwrap(), -0.217_233_628_211_221_66, 1e-14));
    }

    #[test]
    fn g_values() {
        assert_eq!(g(0.0), 0.0);
        assert!(close(g(PI), -PI, 1e-15));
        let t = tan_fixed_points(1).unwrap();
        assert!(g(t.xs[1]).abs() < 1e-10);
    }

    #[test]
    fn h_values() {
        assert_eq!(h(0.0).unwrap(), 2.0);
        assert_eq!(h(0.5).unwrap(), f64::INFINITY);
        assert!(h(0.6).is_err());
        assert!(h(-1.1).is_err());
        let t = tan_fixed_points(2).unwrap();
        assert!(close(h(t.u(0).unwrap()).unwrap(), 1.697_122_918_297_903, 1e-12));
        assert!(close(h(t.v(1).unwrap()).unwrap(), 2.345_440_697_734_474_8, 1e-12));
        assert!(close(sinc_threshold(), 1.697_122_918_297_903, 1e-12));
    }

    #[test]
    fn fixed_point_table() {
        // reference roots of x = tan x from a 40-digit bisection
        let t = tan_fixed_points(3).unwrap();
        assert_eq!(t.xs[0], 0.0);
        assert!(close(t.xs[1], 4.493_409_457_909_064_2, 1e-13));
        assert!(close(t.xs[2], 7.725_251_836_937_707_2, 1e-13));
        assert!(close(t.xs[3], 10.904_121_659_428_9, 1e-12));
        assert!(close(t.v(1).unwrap(), 0.128_374_553_525_899_14, 1e-13));
        assert!(close(t.u(1).unwrap(), -0.091_325_202_823_057_672, 1e-13));
        assert_eq!(t.us.len(), 2);
        assert_eq!(t.vs.len(), 2);
        assert!(tan_fixed_points(0).is_err());
    }

    #[test]
    fn fixed_point_invariants() {
        let t = tan_fixed_points(DEFAULT_K_MAX).unwrap();
        for (k, &x) in t.xs.iter().enumerate().skip(1) {
            let kpi = k as f64 * PI;
            assert!(x > kpi && x < kpi + 0.5 * PI);
            assert!(g(x).abs() < 1e-12, "g(x_{k}) = {}", g(x));
            assert!(close(k_unchecked(x), x.cos(), 1e-10));
        }
        assert!(t.us.windows(2).all(|w| w[0] < w[1]));
        assert!(t.us.iter().all(|&u| u > -1.0 && u < 0.0));
        assert_eq!(t.vs[0], 1.0);
        assert!(t.vs.windows(2).all(|w| w[0] > w[1]));
        assert!(t.vs[1..].iter().all(|&v| v > 0.0 && v < 0.5));
    }

    #[test]
    fn u0_is_global_minimum_of_k() {
        let t = tan_fixed_points(1).unwrap();
        let n = 1_000_000;
        let min = (0..=n)
            .map(|i| k_unchecked(200.0 * i as f64 / n as f64))
            .fold(f64::INFINITY, f64::min);
        assert!(close(min, t.us[0], 1e-6));
    }

    #[test]
    fn h_strictly_increasing() {
        let xs: Vec<f64> = (0..1500).map(|i| -1.0 + i as f64 * 1e-3).collect();
        let hs: Vec<f64> = xs.iter().map(|&x| h(x).unwrap()).collect();
        assert!(hs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn char_delta_at_zero() {
        let p = ModelParams::default().with_tau(18.2).unwrap();
        let lin = linearize(&p).unwrap();
        let d = char_delta(&lin, &p, 18.2, Complex64::new(0.0, 0.0));
        let expected = p.n * p.delta * (1.0 - p.delta / p.beta0);
        assert!(close(d.re, expected, 1e-15) && d.im == 0.0);
        assert!(close(d.re, 0.145_762_711_864_406_78, 1e-14));
    }

    #[test]
    fn char_delta_small_lambda_matches_quadrature() {
        let p = ModelParams::new(0.05, 1.77, 1.62e8, 3.0, 2.0, 10.0).unwrap();
        let lin = linearize(&p).unwrap();
        for &l in &[1e-8, 1.2e-7] {
            let lam = Complex64::new(l, -0.5 * l);
            let series = char_delta(&lin, &p, 10.0, lam);
            // direct Simpson of e^{−λr} on [τ_min, τ]
            let quad_re = crate::numeric::simpson(|r| (-lam * r).exp().re, 2.0, 10.0, 2000);
            let quad_im = crate::numeric::simpson(|r| (-lam * r).exp().im, 2.0, 10.0, 2000);
            let direct = lam + lin.delta_plus_beta_star
                - 2.0 * lin.beta_star / 8.0 * Complex64::new(quad_re, quad_im);
            assert!((series - direct).norm() < 1e-13, "{series} vs {direct}");
        }
        // high-precision reference at λ = 1.2e−7 − 6e−8 i
        let d = char_delta(&lin, &p, 10.0, Complex64::new(1.2e-7, -6e-8));
        assert!(close(d.re, 0.145_762_693_966_144_44, 1e-15));
        assert!(close(d.im, 8.949_095_544_430_443e-9, 1e-9));
        // continuity across the series/closed-form switch at |λL| = 0.5
        let lo = char_delta(&lin, &p, 10.0, Complex64::new(0.5 / 8.0 - 1e-12, 0.0));
        let hi = char_delta(&lin, &p, 10.0, Complex64::new(0.5 / 8.0 + 1e-12, 0.0));
        assert!((lo - hi).norm() < 1e-12);
    }

    #[test]
    fn char_delta_linear_case() {
        let p = ModelParams::new(0.05, 0.1, 1.0, 2.0, 0.0, 7.0).unwrap();
        let lin = linearize(&p).unwrap();
        assert_eq!(lin.beta_star, 0.0);
        let d = char_delta(&lin, &p, 7.0, Complex64::new(-0.05, 0.0));
        assert!(d.norm() < 1e-16);
        assert_eq!(real_root(&lin, &p, 7.0).unwrap(), -0.05);
    }

    #[test]
    fn real_root_negative() {
        let p = ModelParams::new(0.05, 0.10, 1.0, 1.0, 0.0, 10.0).unwrap();
        let lin = linearize(&p).unwrap();
        let l0 = real_root(&lin, &p, 10.0).unwrap();
        assert!(l0 < 0.0);
        assert!(close(l0, -0.019_727_240_203_169_462, 1e-13));
        let f = |l: f64| char_delta(&lin, &p, 10.0, Complex64::new(l, 0.0)).re;
        assert!(f(l0).abs() < 1e-12);
        assert!(f(l0 - 1.0) < 0.0 && f(l0 + 1.0) > 0.0);
        // with a positive minimal delay
        let p = ModelParams::new(0.05, 0.10, 1.0, 1.0, 3.0, 10.0).unwrap();
        let l0 = real_root(&lin, &p, 10.0).unwrap();
        assert!(l0 < 0.0);
        assert!(char_delta(&lin, &p, 10.0, Complex64::new(l0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn real_root_rejects_negative_beta_star() {
        let p = ModelParams::default();
        let lin = linearize(&p).unwrap();
        assert!(matches!(real_root(&lin, &p, 10.0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn normal_production_single_crossing() {
        let p = ModelParams::default();
        let lin = linearize(&p).unwrap();
        let cs = find_crossings(&lin, &p, DEFAULT_K_MAX).unwrap();
        assert_eq!(cs.len(), 1);
        let c = cs[0];
        assert!(c.y > 0.0 && c.y < PI);
        // 40-digit reference solution of K(y) = κ on (0, π)
        assert!(close(c.y, 2.501_083_242_245_863_5, 1e-12));
        assert!(close(c.tau_c, 18.126_975_284_410_388, 1e-10));
        assert!(close(c.omega_c, 0.137_975_762_806_763_03, 1e-12));
        assert_eq!(c.transversality, Transversality::Positive);
        let d = char_delta(&lin, &p, c.tau_c, Complex64::new(0.0, c.omega_c));
        assert!(d.norm() < 1e-9);
        let s = hopf_summary(&lin, &p).unwrap();
        assert_eq!(s.case, HopfCase::V);
        assert_eq!(s.tau_0, s.tau_l);
        assert!(close(s.onset_period.unwrap(), 45.538_326_292_707_47, 1e-8));
    }

    /// Parameters with prescribed R at δ = 0.05, n = 3: β₀ = 3δ/(3 − R).
    fn with_ratio(r: f64) -> ModelParams {
        let delta = 0.05;
        ModelParams::new(delta, 3.0 * delta / (3.0 - r), 1.62e8, 3.0, 0.0, 10.0).unwrap()
    }

    #[test]
    fn two_crossings_case_i() {
        let p = with_ratio(1.8);
        let lin = linearize(&p).unwrap();
        let s = hopf_summary(&lin, &p).unwrap();
        assert_eq!(s.case, HopfCase::I(0));
        let cs = &s.crossings;
        assert_eq!(cs.len(), 2);
        let x1 = 4.493_409_457_909_064_2;
        assert!(cs[0].y > PI && cs[0].y < x1);
        assert!(cs[1].y > x1 && cs[1].y < 2.0 * PI);
        assert!(close(cs[0].y, 3.609_718_835_438_895_5, 1e-11));
        assert!(close(cs[1].y, 5.521_446_429_976_302_2, 1e-11));
        assert!(close(cs[0].tau_c, 86.067_720_795_048_627, 1e-8));
        assert!(close(cs[1].tau_c, 1_378.909_572_566_406_5, 1e-6));
        assert_eq!(cs[0].transversality, Transversality::Positive);
        assert_eq!(cs[1].transversality, Transversality::Negative);
        assert_eq!(s.tau_0, Some(cs[0].tau_c));
        assert_eq!(s.tau_l, Some(cs[0].tau_c));
        assert!(s.predicts_unstable(100.0));
        assert!(!s.predicts_unstable(2000.0));
    }

    #[test]
    fn below_threshold_no_crossings() {
        let p = with_ratio(1.5);
        let lin = linearize(&p).unwrap();
        assert!(close(lin.kappa.unwrap(), -0.5, 1e-14));
        let s = hopf_summary(&lin, &p).unwrap();
        assert_eq!(s.case, HopfCase::None);
        assert!(s.stable_for_all_delays());
        assert_eq!(s.tau_0, None);
        // K never reaches -0.5: scan [0, 100]
        let min = (0..100_000)
            .map(|i| k_unchecked(i as f64 * 1e-3))
            .fold(f64::INFINITY, f64::min);
        assert!(min > -0.5);
    }

    #[test]
    fn refuses_positive_tau_min_and_degenerate() {
        let p = ModelParams::new(0.05, 1.77, 1.62e8, 3.0, 1.0, 18.0).unwrap();
        let lin = linearize(&p).unwrap();
        assert!(matches!(
            find_crossings(&lin, &p, 32),
            Err(Error::Unsupported(_))
        ));
        let p = ModelParams::new(0.05, 0.1, 1.0, 4.0, 0.0, 10.0).unwrap();
        let lin = linearize(&p).unwrap();
        assert!(matches!(
            find_crossings(&lin, &p, 32),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn table_exhaustion_is_reported() {
        // R just below 2 needs very high u_k
        let p = with_ratio(1.999);
        let lin = linearize(&p).unwrap();
        assert!(matches!(
            find_crossings(&lin, &p, 8),
            Err(Error::TableExhausted { .. })
        ));
    }

    #[test]
    fn transversality_rule() {
        let t = tan_fixed_points(4).unwrap();
        let mk = |y: f64| CrossingPoint {
            tau_c: 1.0,
            omega_c: y,
            y,
            branch: Branch { l: 1, side: 1 },
            interval: (0.0, 0.0),
            transversality: Transversality::Degenerate,
            simple_root: true,
        };
        assert_eq!(transversality(&mk(2.5011), &t).unwrap(), Transversality::Positive);
        assert_eq!(transversality(&mk(5.5), &t).unwrap(), Transversality::Negative);
        assert_eq!(transversality(&mk(t.xs[1]), &t).unwrap(), Transversality::Degenerate);
        assert!(transversality(&mk(100.0), &t).is_err());
    }
}
