use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("point {point} lies on the support {support}")]
    OnSupport { point: String, support: String },

    #[error("intervals {first} and {second} overlap or touch: {detail}")]
    Overlap { first: usize, second: usize, detail: String },

    #[error("numerically singular system at n={n} (condition estimate {cond:e}); raise the precision")]
    Singular { n: usize, cond: f64 },

    #[error("root count mismatch: expected {expected}, found {found}")]
    CountMismatch { expected: usize, found: usize },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("interaction matrix is not positive definite")]
    NotPositiveDefinite,
}

pub type Result<T> = std::result::Result<T, Error>;
