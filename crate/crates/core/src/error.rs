use thiserror::Error;

/// Every fallible operation in the crate returns this.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("derivative of order {order} is not integrable for {what}")]
    NonIntegrable { order: usize, what: String },

    #[error("derivative of order {0} is not available")]
    OrderUnavailable(usize),

    #[error("structure function has D'(0) = {d1} and D''(0) = {d2}; need D'(0) > 0 and D''(0) < 0")]
    DegenerateAtOrigin { d1: f64, d2: f64 },

    #[error("radial variance is not positive at r = {r}: sigma_Y^2 = {value}")]
    DegenerateRadial { r: f64, value: f64 },

    #[error("degenerate ensemble: {0}")]
    DegenerateEnsemble(String),

    #[error("nondegeneracy condition fails at r = {r} (value {value})")]
    Nondegenerate { r: f64, value: f64 },

    #[error("assumption 3 fails at r = {r}: {which}")]
    Assumption3 { r: f64, which: String },

    #[error("kernel matrix is not positive semidefinite beyond the jitter budget (worst pivot {worst})")]
    NotPsd { worst: f64 },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
