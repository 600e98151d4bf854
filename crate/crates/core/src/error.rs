use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not positive definite (min eigenvalue {min_eig:.3e})")]
    NotPositiveDefinite { min_eig: f64 },
    #[error("slice is infeasible (residual {residual:.3e})")]
    Infeasible { residual: f64 },
    #[error("no strictly feasible starting point for the barrier method")]
    NotStrictlyFeasible,
    #[error("solver reached {achieved:.12e}, short of target {target:.12e}")]
    SolverShortfall { achieved: f64, target: f64 },
    #[error("margin violation: {0}")]
    MarginViolation(String),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
