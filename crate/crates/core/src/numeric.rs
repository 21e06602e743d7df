//! Small numerical kernels shared by the spectral, simulator and analysis modules.

use crate::error::{Error, Result};

/// Bisection on `[lo, hi]` for a sign change of `f`, down to `tol` in width.
///
/// The endpoints must bracket a root (opposite signs, or one of them zero).
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) || (f_lo > 0.0) == (f_hi > 0.0) {
        return Err(Error::RootNotFound(format!(
            "no sign change on [{lo}, {hi}] (f = {f_lo:e}, {f_hi:e})"
        )));
    }
    // 200 halvings exhaust any f64 interval; the width test normally exits first.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Up to `max_steps` Newton iterations from `x0`, kept inside `[lo, hi]`.
///
/// A step is accepted only if it stays in the bracket and does not increase
/// `|f|`; otherwise the current iterate is returned.
pub fn newton_polish<F, D>(f: F, df: D, x0: f64, lo: f64, hi: f64, max_steps: usize) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut x = x0;
    let mut fx = f(x);
    for _ in 0..max_steps {
        if fx == 0.0 {
            break;
        }
        let d = df(x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = x - fx / d;
        if !(next >= lo && next <= hi) {
            break;
        }
        let f_next = f(next);
        if f_next.abs() > fx.abs() || next == x {
            break;
        }
        x = next;
        fx = f_next;
    }
    x
}

/// Composite Simpson rule with `panels` subintervals (`panels` even, ≥ 2).
pub fn simpson<F>(f: F, a: f64, b: f64, panels: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    debug_assert!(panels >= 2 && panels.is_multiple_of(2));
    if a == b {
        return 0.0;
    }
    let h = (b - a) / panels as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..panels {
        let v = f(a + i as f64 * h);
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (f(a) + 4.0 * odd + 2.0 * even + f(b))
}

/// Fallible composite Simpson; stops at the first error from `f`.
pub fn try_simpson<F>(f: F, a: f64, b: f64, panels: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    debug_assert!(panels >= 2 && panels.is_multiple_of(2));
    if a == b {
        return Ok(0.0);
    }
    let h = (b - a) / panels as f64;
    let mut acc = f(a)? + f(b)?;
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h)?;
    }
    Ok(h / 3.0 * acc)
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    adaptive_step(&f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
