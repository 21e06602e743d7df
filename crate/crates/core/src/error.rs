use thiserror::Error;

/// Errors produced by the model, spectral, simulation and analysis layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {name} = {value} is outside {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("linearization undefined: {0}")]
    LinearizationUndefined(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("degenerate case: {0}")]
    Degenerate(String),

    #[error("fixed-point table too small: need x_{needed}, table holds x_{available}")]
    TableExhausted { needed: usize, available: usize },

    #[error("invalid simulation config: {0}")]
    Config(String),

    #[error("invalid history: {0}")]
    History(String),

    #[error("time {t} is outside the covered interval [{from}, {to}]")]
    Coverage { t: f64, from: f64, to: f64 },

    #[error("non-finite state at step {step} (t = {t})")]
    NonFinite { step: usize, t: f64 },

    #[error("negative excursion x = {x:e} at step {step} (t = {t}), below -1e-9 * max(x)")]
    NegativeExcursion { step: usize, t: f64, x: f64 },

    #[error("root search failed: {0}")]
    RootNotFound(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code used by the command-line front end for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_)
            | Error::Domain { .. }
            | Error::LinearizationUndefined(_)
            | Error::Config(_)
            | Error::History(_) => 2,
            Error::Unsupported(_) | Error::Degenerate(_) | Error::TableExhausted { .. } => 3,
            Error::Coverage { .. }
            | Error::NonFinite { .. }
            | Error::NegativeExcursion { .. }
            | Error::RootNotFound(_) => 4,
        }
    }
}
