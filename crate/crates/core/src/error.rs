//! Error types shared across the estimation toolkit.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the optimizer and the model plugins.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A Marquardt penalty was requested but the Hessian has a nonnegative
    /// diagonal entry, so the objective is not locally concave in that
    /// coordinate.
    #[error("degenerate curvature: Hessian diagonal entry {index} is {value}, expected < 0")]
    DegenerateCurvature { index: usize, value: f64 },

    /// A symmetric positive-definite factorization failed.
    #[error("linear algebra failure: {0}")]
    LinearAlgebraFailure(&'static str),

    /// Both the Hessian-based and the penalized-bracket denominators of the
    /// gain ratio are numerically zero.
    #[error("degenerate gain ratio: both quadratic-model denominators are below threshold")]
    DegenerateGain,

    /// A parameter vector lies outside the natural parameter space.
    #[error("parameter outside the natural parameter space: {0}")]
    DomainError(String),

    /// Not enough observations to carry out the requested computation.
    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// An iterative numeric routine failed to converge.
    #[error("numerical error: {0}")]
    NumericalError(String),

    /// The normalizing constant of the requested density is not finite, so
    /// the parameters are outside the natural parameter space.
    #[error("improper density: log-partition function is not finite")]
    ImproperDensity,

    /// Starting-value construction failed (typically a singular sample
    /// covariance).
    #[error("initializer failure: {0}")]
    InitFailure(String),

    /// A matrix argument violates a definiteness precondition.
    #[error("invalid matrix: {0}")]
    InvalidMatrix(&'static str),

    /// A scalar or structural argument violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
