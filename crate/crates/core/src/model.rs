//! Model constants, the Hill reintroduction rate, equilibria and the
//! linearization about the positive equilibrium.

use crate::error::{Error, Result};
use crate::spectral;

/// Tolerance on `|R - 2|` under which `δ + β* ≈ 0` is treated as degenerate.
pub const DEGENERATE_TOL: f64 = 1e-9;

/// Width of the proximity band around regime boundaries that raises a warning.
pub const BOUNDARY_WARN_TOL: f64 = 1e-9;

/// The six model constants. Rates are per day, densities in cells/kg,
/// durations in days.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Death/differentiation rate δ ≥ 0.
    pub delta: f64,
    /// Maximal reintroduction rate β₀ > 0.
    pub beta0: f64,
    /// Half-effect density θ > 0.
    pub theta: f64,
    /// Hill sensitivity exponent n ≥ 0 (real).
    pub n: f64,
    /// Minimal cycle duration.
    pub tau_min: f64,
    /// Maximal cycle duration, strictly above `tau_min`.
    pub tau: f64,
}

impl Default for ModelParams {
    /// Normal human values: δ = 0.05, β₀ = 1.77, n = 3, θ = 1.62e8, on [0, 18.2].
    fn default() -> Self {
        Self {
            delta: 0.05,
            beta0: 1.77,
            theta: 1.62e8,
            n: 3.0,
            tau_min: 0.0,
            tau: 18.2,
        }
    }
}

impl ModelParams {
    pub fn new(delta: f64, beta0: f64, theta: f64, n: f64, tau_min: f64, tau: f64) -> Result<Self> {
        let p = Self {
            delta,
            beta0,
            theta,
            n,
            tau_min,
            tau,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        let all = [self.delta, self.beta0, self.theta, self.n, self.tau_min, self.tau];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("all model constants must be finite");
        }
        if self.delta < 0.0 {
            return bad("delta must be >= 0");
        }
        if self.beta0 <= 0.0 {
            return bad("beta0 must be > 0");
        }
        if self.theta <= 0.0 {
            return bad("theta must be > 0");
        }
        if self.n < 0.0 {
            return bad("n must be >= 0");
        }
        if self.tau_min < 0.0 {
            return bad("tau_min must be >= 0");
        }
        if self.tau <= self.tau_min {
            return bad("tau must be strictly greater than tau_min");
        }
        Ok(())
    }

    /// Same constants with a different maximal delay.
    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        let p = Self { tau, ..*self };
        p.validate()?;
        Ok(p)
    }

    /// Length of the delay window, `τ - τ_min`.
    pub fn window(&self) -> f64 {
        self.tau - self.tau_min
    }

    /// `R = n(β₀ - δ)/β₀`.
    pub fn ratio(&self) -> f64 {
        self.n * (self.beta0 - self.delta) / self.beta0
    }

    /// Hill rate `β(x)`; errors on negative densities.
    pub fn beta(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::Domain {
                name: "x",
                value: x,
                domain: "[0, inf)",
            });
        }
        Ok(self.beta_unchecked(x))
    }

    /// Hill rate without the sign check, written as `β₀ / (1 + (x/θ)ⁿ)` to keep
    /// θⁿ out of the arithmetic. `n = 0` gives the constant `β₀/2`.
    #[inline]
    pub fn beta_unchecked(&self, x: f64) -> f64 {
        self.beta0 / (1.0 + (x / self.theta).powf(self.n))
    }

    /// `β(x)·x`, the flux into the proliferating phase.
    #[inline]
    pub fn flux(&self, x: f64) -> f64 {
        self.beta_unchecked(x) * x
    }
}

/// Free function form of [`ModelParams::beta`].
pub fn beta(params: &ModelParams, x: f64) -> Result<f64> {
    params.beta(x)
}

/// Why a positive equilibrium is missing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoPositiveReason {
    /// β₀ < δ: reintroduction can never compensate losses.
    Beta0BelowDelta,
    /// β₀ = δ: the nonzero root collapses onto the trivial one.
    Beta0EqualsDelta,
    /// δ = 0: β never vanishes, so β(x) = δ has no root.
    ZeroDelta,
    /// n = 0: β is the constant β₀/2, which does not single out a density.
    ConstantRate,
}

impl std::fmt::Display for NoPositiveReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Beta0BelowDelta => "beta0 < delta",
            Self::Beta0EqualsDelta => "beta0 = delta (coincides with trivial equilibrium)",
            Self::ZeroDelta => "delta = 0",
            Self::ConstantRate => "n = 0 (constant rate, no isolated positive equilibrium)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibria {
    /// Always 0.
    pub trivial: f64,
    /// x* when `β₀ > δ > 0` (and n > 0).
    pub positive: Option<f64>,
    pub absent_reason: Option<NoPositiveReason>,
}

pub fn equilibria(params: &ModelParams) -> Equilibria {
    let reason = if params.beta0 < params.delta {
        Some(NoPositiveReason::Beta0BelowDelta)
    } else if params.beta0 == params.delta {
        Some(NoPositiveReason::Beta0EqualsDelta)
    } else if params.delta == 0.0 {
        Some(NoPositiveReason::ZeroDelta)
    } else if params.n == 0.0 {
        Some(NoPositiveReason::ConstantRate)
    } else {
        None
    };
    let positive = match reason {
        Some(_) => None,
        None => Some(params.theta * (params.beta0 / params.delta - 1.0).powf(1.0 / params.n)),
    };
    Equilibria {
        trivial: 0.0,
        positive,
        absent_reason: reason,
    }
}

/// Linearization coefficients around x*.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linearization {
    /// β* = d(β(x)x)/dx at x*.
    pub beta_star: f64,
    pub delta_plus_beta_star: f64,
    /// R = n(β₀ - δ)/β₀.
    pub ratio: f64,
    /// κ = (δ + β*)/(2β*), only when β* < 0.
    pub kappa: Option<f64>,
    /// The positive equilibrium the coefficients refer to.
    pub x_star: f64,
}

pub fn linearize(params: &ModelParams) -> Result<Linearization> {
    let eq = equilibria(params);
    let x_star = eq.positive.ok_or_else(|| {
        Error::LinearizationUndefined(format!(
            "no positive equilibrium ({})",
            eq.absent_reason.expect("absent equilibrium carries a reason")
        ))
    })?;
    let ratio = params.ratio();
    let beta_star = params.delta * (1.0 - ratio);
    let delta_plus_beta_star = params.delta + beta_star;
    let kappa = (beta_star < 0.0).then(|| delta_plus_beta_star / (2.0 * beta_star));
    Ok(Linearization {
        beta_star,
        delta_plus_beta_star,
        ratio,
        kappa,
        x_star,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// β₀ ≤ δ: only the trivial equilibrium, which attracts everything.
    TrivialGloballyStable,
    /// x* is stable for every delay.
    DelayIndependentStable,
    /// Hopf crossings exist; stability of x* depends on τ.
    DelayDependent,
    /// δ + β* = 0 within tolerance.
    Degenerate,
    /// δ = 0: no positive equilibrium and the trivial one is not attracting.
    NoPositiveEquilibrium,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::TrivialGloballyStable => "trivial_globally_stable",
            Regime::DelayIndependentStable => "delay_independent_stable",
            Regime::DelayDependent => "delay_dependent",
            Regime::Degenerate => "degenerate",
            Regime::NoPositiveEquilibrium => "no_positive_equilibrium",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which result puts the parameters in their regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeReason {
    /// β₀ < δ, global stability of 0.
    Beta0BelowDelta,
    /// β₀ = δ exactly; flagged, dynamics not resolved.
    Beta0EqualsDelta,
    /// R ≤ 1 (β* ≥ 0).
    NonNegativeBetaStar,
    /// 1 < R < h(u₀).
    BelowSincThreshold,
    /// R ≥ h(u₀) and R ≠ 2.
    CrossingsExist,
    /// |R - 2| ≤ tolerance.
    ZeroDeltaPlusBetaStar,
    ZeroDelta,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    pub regime: Regime,
    pub reason: RegimeReason,
    pub ratio: f64,
    /// R sits within [`BOUNDARY_WARN_TOL`] of 1 or h(u₀), or β₀ = δ.
    pub boundary_warning: bool,
}

/// Classify the parameters into a stability regime.
///
/// Comparisons against 1 and h(u₀) are exact; proximity within
/// [`BOUNDARY_WARN_TOL`] only raises `boundary_warning`.
pub fn classify_regime(params: &ModelParams) -> RegimeReport {
    let ratio = params.ratio();
    let threshold = spectral::sinc_threshold();
    let near = |a: f64| (ratio - a).abs() <= BOUNDARY_WARN_TOL;
    let report = |regime, reason, boundary_warning| RegimeReport {
        regime,
        reason,
        ratio,
        boundary_warning,
    };
    if params.beta0 < params.delta {
        return report(
            Regime::TrivialGloballyStable,
            RegimeReason::Beta0BelowDelta,
            false,
        );
    }
    if params.beta0 == params.delta {
        return report(
            Regime::TrivialGloballyStable,
            RegimeReason::Beta0EqualsDelta,
            true,
        );
    }
    if params.delta == 0.0 {
        return report(Regime::NoPositiveEquilibrium, RegimeReason::ZeroDelta, false);
    }
    let warn = near(1.0) || near(threshold);
    if ratio <= 1.0 {
        report(
            Regime::DelayIndependentStable,
            RegimeReason::NonNegativeBetaStar,
            warn,
        )
    } else if ratio < threshold {
        report(
            Regime::DelayIndependentStable,
            RegimeReason::BelowSincThreshold,
            warn,
        )
    } else if (ratio - 2.0).abs() <= DEGENERATE_TOL {
        report(
            Regime::Degenerate,
            RegimeReason::ZeroDeltaPlusBetaStar,
            warn,
        )
    } else {
        report(Regime::DelayDependent, RegimeReason::CrossingsExist, warn)
    }
}
