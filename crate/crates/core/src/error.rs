use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the saddle point toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix is not square ({nrows}x{ncols})")]
    NotSquare { nrows: usize, ncols: usize },

    #[error("malformed sparse matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix is not symmetric (relative asymmetry {asymmetry:.3e})")]
    Asymmetric { asymmetry: f64 },

    #[error("matrix is not positive definite: pivot {pivot:.3e} at row {row}")]
    NotSpd { row: usize, pivot: f64 },

    #[error("conjugate gradient hit negative curvature at iteration {iteration}")]
    BreakdownNonSpd { iteration: usize },

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    MaxIterations { iterations: usize, residual: f64 },

    #[error("relaxation parameter must be strictly positive, got {0}")]
    InvalidAlpha(f64),

    #[error("operation needs a {expected} preconditioner, context holds {found}")]
    WrongKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("dense computation on dimension {size} exceeds the limit {limit}")]
    DenseLimitExceeded { size: usize, limit: usize },

    #[error("stationary iteration diverged at step {iteration} (residual grew {growth:.3e}x)")]
    Diverged { iteration: usize, growth: f64 },

    #[error("B is still rank deficient after dropping {drop_rows} rows; increase drop_rows")]
    RankRepairFailed { drop_rows: usize },

    #[error("invalid saddle point system: {0}")]
    InvalidSystem(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("unsupported Matrix Market field or layout: {0}")]
    UnsupportedField(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn check_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        })
    }
}
