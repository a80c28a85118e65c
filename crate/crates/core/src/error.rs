//! Error types shared by every module of the crate.

use thiserror::Error;

/// Errors produced by the geometric and numerical operations.
#[derive(Error, Debug, Clone)]
pub enum GeoError {
    /// Dimensions or grades of the operands do not match.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Ambient dimension or coefficient count exceeds the hard caps.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Input is rank-deficient or otherwise degenerate.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A point lies outside the matrix coordinate chart (w <= 0).
    #[error("outside chart: {0}")]
    OutsideChart(String),

    /// A point violates the domain of a region operation
    /// (e.g. it sits on the deleted radius of the S-map disk).
    #[error("domain error: {0}")]
    Domain(String),

    /// A stated precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Numerical failure: non-finite values, bracket failure, non-convergence.
    #[error("numeric error: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, GeoError>;
