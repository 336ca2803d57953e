use thiserror::Error;

use crate::lattice::LatticeVector;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("truncation radius must be at least 1")]
    EmptyTruncation,

    #[error("{what}: {detail}")]
    Domain { what: &'static str, detail: String },

    #[error("output mode k + m = {k} + {m} is zero; such triads are excluded")]
    ExcludedTriad { k: LatticeVector, m: LatticeVector },

    #[error("triad table at radius {radius} needs {entries} entries (~{bytes} bytes), over the {budget}-byte budget")]
    ResourceExceeded {
        radius: u32,
        entries: u64,
        bytes: u64,
        budget: u64,
    },

    #[error("truncation mismatch: expected radius {expected}, got {found}")]
    Dimension { expected: u32, found: u32 },

    #[error("triad table was built without non-resonant entries")]
    MissingOscillatory,

    #[error("non-finite amplitude at t = {t} in mode {mode} (helicity {helicity})")]
    BlowUp {
        t: f64,
        mode: LatticeVector,
        helicity: i64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invalid configuration:\n{}", .0.join("\n"))]
    InvalidConfig(Vec<String>),

    #[error("state file: {0}")]
    StateFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn domain(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            what,
            detail: detail.into(),
        }
    }
}
