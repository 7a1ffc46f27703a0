//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures raised while building weights, moments, factorizations or checks.
#[derive(Debug, Error)]
pub enum Error {
    #[error("weight undefined: (b_{index})_{k} vanishes")]
    UndefinedWeight { index: usize, k: u64 },

    #[error("moment series diverges for weight {weight}")]
    DivergentSeries { weight: String },

    #[error("series did not meet its tail bound within {budget} terms")]
    TermBudgetExceeded { budget: usize },

    #[error("invalid parameter shift: {0}")]
    InvalidShift(String),

    #[error("moment index {needed} outside table (max {available})")]
    IndexOutOfTable { needed: usize, available: usize },

    #[error("truncation is singular at pivot {0}")]
    SingularTruncation(usize),

    #[error("routes {first} and {second} disagree (relative residual {residual})")]
    RouteMismatch { first: String, second: String, residual: String },

    #[error("truncation size {size} exceeds finite support of {support} points")]
    TruncationExceedsSupport { size: usize, support: u64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("check `{check}` failed: {source}")]
    InCheck {
        check: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Attaches the name of the check that raised this error.
    pub fn in_check(self, check: &str) -> Self {
        match self {
            e @ Error::InCheck { .. } => e,
            e => Error::InCheck { check: check.to_string(), source: Box::new(e) },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
