//! Distributed-delay model of a pluripotent stem-cell population.
//!
//! The resting-phase density `x(t)` obeys
//!
//! ```text
//! x'(t) = −(δ + β(x(t))) x(t) + 2/(τ − τ_min) ∫_{τ_min}^{τ} β(x(t − r)) x(t − r) dr
//! ```
//!
//! with the Hill rate `β(x) = β₀ θⁿ/(θⁿ + xⁿ)`. The crate computes equilibria
//! and their linear stability, enumerates Hopf crossings of the
//! characteristic equation, simulates trajectories and post-processes them.

// `!(x >= 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod model;
pub mod numeric;
pub mod simulator;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use model::{
    classify_regime, equilibria, linearize, Equilibria, Linearization, ModelParams, Regime,
};
pub use simulator::{simulate, HistoryFunction, Scheme, SimConfig, Trajectory};
pub use spectral::{hopf_summary, CrossingPoint, HopfSummary, Transversality};
