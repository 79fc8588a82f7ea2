use thiserror::Error;

/// Unified error type for the whole crate.
///
/// The CLI maps these onto exit codes: argument/domain errors are usage
/// errors (exit 2), resource and convergence errors are exit 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("parameters outside the certified region: {0}")]
    Domain(String),

    #[error("resource cap exceeded: {0}")]
    Resource(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("series division by a series with vanishing constant term ({0})")]
    SeriesDivision(String),

    #[error("truncation degree did not stabilize below k_max = {k_max}; worst edge {worst_edge} (relative change {relative_change:.3e})")]
    Convergence {
        k_max: usize,
        worst_edge: usize,
        relative_change: f64,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
