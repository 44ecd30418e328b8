use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max |a_ij - conj(a_ji)| = {defect:e}, tolerance {tol:e})")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("trace {trace} differs from 1 by more than {tol:e}")]
    BadTrace { trace: f64, tol: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e}, tolerance {tol:e})")]
    NotPositive { min_eigenvalue: f64, tol: f64 },

    #[error("invalid additive structure: {0}")]
    InvalidStructure(String),

    #[error("density matrix violates the additive texture at {count} entries")]
    TextureViolation { count: usize },

    #[error("invalid anchor entry: {0}")]
    InvalidAnchor(String),

    #[error("uncertainty must be positive, got {sigma}")]
    InvalidSigma { sigma: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
