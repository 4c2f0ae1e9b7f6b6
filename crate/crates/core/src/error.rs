use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by state construction, reconstruction and the sweep runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("coarse-graining size must be positive, got {0}")]
    InvalidSigma(f64),

    #[error("covariance matrix is not physical (smallest symplectic eigenvalue {min_symplectic})")]
    NonPhysical { min_symplectic: f64 },

    #[error(
        "covariance matrix is not of two-mode squeezed thermal form (residual {residual:.3e})"
    )]
    NotTmstForm { residual: f64 },

    #[error("covariance matrix is not symmetric (asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("reservoir violates |M|^2 <= N(N+1): N = {n}, |M|^2 = {m_sq}")]
    UnphysicalReservoir { n: f64, m_sq: f64 },

    #[error("degenerate denominator {0:.3e} in mixing fraction")]
    DegenerateDenominator(f64),

    #[error("binning grid too large ({cells} cells)")]
    GridTooLarge { cells: usize },

    #[error("relative entropy needs matching bin grids")]
    GridMismatch,

    #[error("{0}")]
    Unsupported(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter { .. }
            | Error::InvalidSigma(_)
            | Error::Config(_)
            | Error::DimensionMismatch { .. }
            | Error::UnphysicalReservoir { .. }
            | Error::Unsupported(_) => 1,
            Error::Io { .. } | Error::Csv { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
