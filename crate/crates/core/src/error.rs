use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error in {context}: {detail}")]
    Domain {
        context: &'static str,
        detail: String,
    },

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("quadrature did not converge in {context} (estimated error {estimated_error:.3e})")]
    Quadrature {
        context: &'static str,
        estimated_error: f64,
    },

    #[error("operator assembly failed: {0}")]
    Assembly(String),

    #[error(
        "source iteration did not converge after {iterations} iterations (residual {residual:.3e})"
    )]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("unstable zeta1 -> 0+ extrapolation: finest levels {finest:.6e} and {next:.6e} differ by more than 5%")]
    Extrapolation { finest: f64, next: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Validation(Vec<String>),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("format error in {path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn domain(context: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            context,
            detail: detail.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Machine-readable code used in reports and for the CLI exit status.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Quadrature { .. } => "quadrature",
            Error::Assembly(_) => "assembly",
            Error::NonConvergence { .. } => "non_convergence",
            Error::Extrapolation { .. } => "extrapolation",
            Error::DegenerateFit(_) => "degenerate_fit",
            Error::Parse { .. } => "parse",
            Error::Validation(_) => "validation",
            Error::Io { .. } => "io",
            Error::Format { .. } => "format",
        }
    }
}
