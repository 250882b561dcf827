//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A quantity left its mathematical domain (e.g. `Q <= 1`, `lambda_m <= 1`).
    #[error("domain error: {0}")]
    Domain(String),

    /// Deformation with non-positive Jacobian.
    #[error("singular deformation: det F = {det} <= 0")]
    SingularDeformation { det: f64 },

    /// The local backward-Euler iteration for a Maxwell branch failed.
    #[error("maxwell branch {branch}: local iteration did not converge (residual {residual:.3e} after {iters} iterations; reduce dt)")]
    EvolveNonConvergence {
        branch: usize,
        residual: f64,
        iters: usize,
    },

    /// The global Newton iteration failed.
    #[error("newton did not converge at t = {time} (residual {residual:.3e} after {iters} iterations)")]
    NewtonNonConvergence {
        time: f64,
        residual: f64,
        iters: usize,
    },

    /// The linear solver broke down (zero pivot, stagnation).
    #[error("linear solver breakdown: {0}")]
    LinearSolver(String),

    /// Mesh validation failure.
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    /// Some input violated a precondition.
    #[error("validation error: {0}")]
    Validation(String),

    /// File parse failure with location.
    #[error("{path}:{line}: parse error: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// The objective returned non-finite values too often.
    #[error("optimizer aborted: {0}")]
    Optimizer(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
