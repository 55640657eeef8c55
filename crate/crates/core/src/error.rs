//! Error type shared by all solver modules.

use thiserror::Error;

/// Errors reported by the numerical kernels.
///
/// `InvalidGrid` / `InvalidParameter` are contract violations by the caller;
/// the remaining variants are genuine numerical failures (a root that is not
/// bracketed, an eigensolver that did not converge within its iteration cap,
/// a resolvent applied on a grid whose spectral gap is too small). Scans
/// treat per-point failures as data ("unknown"), never as silent values.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigensolver failure: {0}")]
    Eigensolver(String),

    #[error("root not bracketed: {0}")]
    NotBracketed(String),

    #[error("ill-conditioned resolvent: {0}")]
    IllConditioned(String),

    #[error("resolution too coarse: {0}")]
    Resolution(String),

    #[error("minimizer stuck at scan edge: {0}")]
    ScanEdge(String),

    #[error("iteration did not converge: {0}")]
    NonConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
