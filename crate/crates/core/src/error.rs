use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("datum does not decay at the boundary: |u0| = {magnitude:e} at x = {x}")]
    NonDecayingDatum { x: f64, magnitude: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("integration failed at t = {at}: {reason}")]
    Integration { at: f64, reason: String },

    #[error("spectral point {z} rejected: {reason}")]
    SpectralPoint { z: String, reason: String },

    #[error("singular linear system (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("dressing denominator vanishes at y = {y}, t = {t}")]
    DressingDegeneracy { y: f64, t: f64 },

    #[error("root bracketing failed: {0}")]
    Bracket(String),

    #[error("fixed-point iteration did not converge after {iterations} iterations (last change {last_change:e})")]
    NoConvergence { iterations: usize, last_change: f64 },

    #[error("argument outside the supported range: {0}")]
    OutOfRange(String),

    #[error("config error at key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("monitor drift {drift:e} exceeds tolerance at t = {t}")]
    MonitorDrift { t: f64, drift: f64 },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config_err(key: &str, reason: impl Into<String>) -> Error {
    Error::Config { key: key.to_string(), reason: reason.into() }
}
