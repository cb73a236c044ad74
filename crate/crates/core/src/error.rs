use thiserror::Error;

/// Errors produced by construction, evaluation, and solver routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("regularization must be positive, got {0}")]
    NonPositiveEpsilon(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("integrand is not finite at quadrature node {node:?}")]
    NonFiniteAtNode { node: Vec<f64> },

    #[error("reduced Hessian is singular even after regularization")]
    SingularSystem,

    #[error("point lies on a Laguerre cell boundary")]
    BoundaryPoint,

    #[error("closed-form gap requires a symmetric source on a symmetric interval with equally weighted targets at -1 and 1")]
    ClosedFormInstance,

    #[error("operation requires a one-dimensional problem")]
    NotOneDimensional,

    #[error("{0}")]
    SolverFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
