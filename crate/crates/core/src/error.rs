use thiserror::Error;

use crate::lattice::LatticePoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate {value} exceeds the bound 2^20 (point {point:?})")]
    CoordinateBound { point: [i64; 3], value: i64 },

    #[error("{what} = {value} is out of range ({expected})")]
    OutOfRange {
        what: &'static str,
        value: String,
        expected: &'static str,
    },

    #[error("{0:?} is not primitive")]
    NotPrimitive(LatticePoint),

    #[error("{0:?} is not on the cone")]
    NotOnCone(LatticePoint),

    #[error("zero vector where a direction is required")]
    ZeroVector,

    #[error("work budget exceeded: {work} operations requested, budget {budget} ({detail})")]
    Budget {
        work: u128,
        budget: u128,
        detail: String,
    },

    #[error("exact accumulation would overflow 128-bit integers ({0})")]
    Overflow(String),

    #[error("mode mismatch: {0}")]
    Mode(&'static str),

    #[error("stability: {0}")]
    Stability(String),

    #[error("support violation: {0}")]
    Support(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn out_of_range(
        what: &'static str,
        value: impl ToString,
        expected: &'static str,
    ) -> Self {
        Error::OutOfRange {
            what,
            value: value.to_string(),
            expected,
        }
    }
}
