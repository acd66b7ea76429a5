use thiserror::Error;

use crate::reservoir::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid reservoir specification: {0}")]
    InvalidSpec(ValidationReport),

    #[error("analytic solution unavailable: {0}")]
    AnalyticUnavailable(String),

    #[error("asymptotic formula outside validity window: t*(gamma1+gamma2) = {value:.4} < {threshold}")]
    OutsideValidity { value: f64, threshold: f64 },

    #[error("integration failed at t = {t_reached}: {reason}")]
    Integration { t_reached: f64, reason: String },

    #[error("state is not trace preserving (deviation {deviation:.3e} > {tolerance:.1e})")]
    TraceViolation { deviation: f64, tolerance: f64 },

    #[error("structural mismatch: {0}")]
    Structural(String),

    #[error("bad argument: {0}")]
    Argument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidSpec(_) | Error::Argument(_) => 2,
            Error::Integration { .. } | Error::TraceViolation { .. } | Error::Structural(_) => 3,
            Error::Io(_) | Error::Csv(_) => 3,
            Error::AnalyticUnavailable(_) | Error::OutsideValidity { .. } => 4,
        }
    }
}
