use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the simulation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {op} got {left:?} and {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix is not Hermitian: max |h - h^dagger| = {deviation:e} exceeds {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("trace deviates from 1 by {deviation:e} (tolerance {tol:e})")]
    TraceDeviation { deviation: f64, tol: f64 },

    #[error("negative eigenvalue {min_eigenvalue:e} below {tol:e}")]
    NegativeEigenvalue { min_eigenvalue: f64, tol: f64 },

    #[error("{name} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("Kraus set `{set}` violates completeness: defect {defect:e}")]
    CompletenessViolation { set: String, defect: f64 },

    #[error("invalid matrix data: {0}")]
    InvalidMatrix(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("I/O failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            min: 0.0,
            max: 1.0,
        })
    }
}
