//! Error taxonomy shared by all modules.

use thiserror::Error;

/// Everything that can go wrong while evaluating densities, functionals or checks.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument vector or matrix does not match the distribution dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A quadrature, finite-difference or solver budget was exhausted without
    /// reaching the requested accuracy.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// Score or Fisher information requested for a density that is not
    /// continuously differentiable (e.g. an unsmoothed uniform).
    #[error("density is not smooth enough: {0}")]
    NonSmoothDensity(String),

    /// Input outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    DomainError(String),

    /// Second moments requested for a law without finite covariance.
    #[error("heavy-tailed distribution has no finite second moments: {0}")]
    HeavyTail(String),

    /// Divergence of laws whose supports are incompatible.
    #[error("support mismatch: {0}")]
    SupportMismatch(String),

    /// The smoothing-path derivative identity needs Gaussian noise away from t = 0.
    #[error("identity requires Gaussian noise at t > 0")]
    NonGaussianPositiveT,

    /// A matrix that must be invertible / positive definite is not.
    #[error("matrix is rank deficient or not positive definite: {0}")]
    RankDeficient(String),

    /// The operation is only implemented for lower dimensions or simpler structure.
    #[error("unsupported dimension or structure: {0}")]
    UnsupportedDimension(String),

    /// A convolution that has no closed or gridded representation here.
    #[error("unsupported convolution: {0}")]
    UnsupportedConvolution(String),

    /// A distribution specification violates its own invariants.
    #[error("invalid distribution specification: {0}")]
    InvalidSpec(String),

    /// A covariance-cap or feasibility constraint is violated.
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),

    /// An iterative solver did not converge to the requested residual.
    #[error("solver failed to converge: {0}")]
    ConvergenceFailure(String),

    /// Malformed experiment configuration.
    #[error("config error: {0}")]
    ConfigError(String),

    /// A truncated tail estimate exceeds half of the error budget.
    #[error("truncation warning: {0}")]
    TruncationWarning(String),
}

pub type Result<T> = std::result::Result<T, Error>;
