use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, got {got}")]
    Dimension {
        op: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("singular rank-1 update{}", fmt_snapshot(*.snapshot))]
    SingularUpdate { snapshot: Option<usize> },

    #[error("singular constraint normalisation ({what}){}: |denominator| = {magnitude:e}", fmt_snapshot(*.snapshot))]
    SingularConstraint {
        what: &'static str,
        snapshot: Option<usize>,
        magnitude: f64,
    },

    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("invalid parameter {name}: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("initialization failed: {0}")]
    Initialization(String),

    #[error("undefined SINR: weight vector is zero")]
    UndefinedSinr,

    #[error("config error: {0}")]
    Config(String),

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn fmt_snapshot(snapshot: Option<usize>) -> String {
    match snapshot {
        Some(i) => format!(" at snapshot {i}"),
        None => String::new(),
    }
}

impl Error {
    /// Attach a snapshot index to errors raised inside a recursion step.
    pub fn at_snapshot(self, index: usize) -> Self {
        match self {
            Error::SingularUpdate { .. } => Error::SingularUpdate {
                snapshot: Some(index),
            },
            Error::SingularConstraint {
                what, magnitude, ..
            } => Error::SingularConstraint {
                what,
                snapshot: Some(index),
                magnitude,
            },
            other => other,
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}
