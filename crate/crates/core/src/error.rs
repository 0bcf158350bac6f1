use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TauError {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("capacity exceeded: {what} = {value} (limit {limit})")]
    Capacity {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("eigenvalues are (nearly) degenerate (min gap {gap:e}); use the Jacobi-Trudi route on Miwa variables instead")]
    Degenerate { gap: f64 },

    #[error("index {index} outside the sequence window [{lo}, {hi}]")]
    Window { index: i64, lo: i64, hi: i64 },

    #[error("invalid rho family: {0}")]
    InvalidFamily(String),

    #[error("rho_+ diverges at z = {z} ({reason})")]
    Domain { z: f64, reason: String },

    #[error("frame label {label} outside the window [{lo}, {hi}]")]
    Label { label: i64, lo: i64, hi: i64 },

    #[error("frame has numerical rank below its charge (sigma_min/sigma_max = {ratio:e})")]
    RankDeficient { ratio: f64 },

    #[error("coupled integral diverges: {0}")]
    Divergence(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("vanishing denominator in {0}")]
    ZeroDenominator(&'static str),

    #[error("moment index {index} exceeds the stored degree {max}")]
    IndexOverflow { index: usize, max: usize },

    #[error("two evaluation routes disagree: {0}")]
    RouteMismatch(String),

    #[error("unknown name: {0}")]
    Unknown(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, TauError>;

impl From<std::io::Error> for TauError {
    fn from(e: std::io::Error) -> Self {
        TauError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for TauError {
    fn from(e: serde_json::Error) -> Self {
        TauError::Parse(e.to_string())
    }
}
