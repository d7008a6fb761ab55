//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by solvers, simulators and experiment drivers.
#[derive(Debug, Clone, Error)]
pub enum GlilError {
    /// An input is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Explicit-scheme stability (CFL) bound violated.
    #[error("stability error: {0}")]
    Stability(String),
    /// Initial datum overflows on the truncated PDE domain.
    #[error("growth error: {0}")]
    Growth(String),
    /// A test function does not carry the shape tags an operation requires.
    #[error("shape error: {0}")]
    Shape(String),
    /// A requested time is not a grid point.
    #[error("off-grid time: {0}")]
    OffGrid(String),
    /// Optimization budget too small for the candidate set.
    #[error("budget error: {0}")]
    Budget(String),
    /// An iterative solver stalled before reaching its tolerance.
    #[error("convergence error: {0}")]
    Convergence(String),
    /// A combinatorial construction exceeds its configured cap.
    #[error("size error: {0}")]
    Size(String),
    /// Grid resolutions are incompatible.
    #[error("grid error: {0}")]
    Grid(String),
    /// A source path does not cover the requested horizon.
    #[error("coverage error: {0}")]
    Coverage(String),
    /// An experiment configuration is internally inconsistent.
    #[error("config error: {0}")]
    Config(String),
    /// Numeric quadrature failed to converge.
    #[error("quadrature error: {0}")]
    Quadrature(String),
}

pub type Result<T> = std::result::Result<T, GlilError>;
