use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the numerical kernels and file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("subsystem index {index} out of range for {parties} subsystems")]
    SubsystemOutOfRange { index: usize, parties: usize },

    #[error("dimension overflow while forming a {rows}x{cols} product")]
    Overflow { rows: usize, cols: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (relative residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("matrix {index} is not normal (relative residual {residual:.3e})")]
    NotNormal { index: usize, residual: f64 },

    #[error("matrices {first} and {second} do not commute (relative residual {residual:.3e})")]
    NotCommuting {
        first: usize,
        second: usize,
        residual: f64,
    },

    #[error("joint diagonalization failed after {attempts} attempts (worst off-diagonal residual {residual:.3e})")]
    RetriesExhausted { attempts: usize, residual: f64 },

    #[error("matrix is indefinite (minimum eigenvalue {min_eigenvalue:.3e})")]
    Indefinite { min_eigenvalue: f64 },

    #[error("matrix is singular (minimum eigenvalue {min_eigenvalue:.3e})")]
    Singular { min_eigenvalue: f64 },

    #[error("local operator on subsystem {subsystem} is not invertible (rank {rank} of {dim})")]
    NotInvertible {
        subsystem: usize,
        rank: usize,
        dim: usize,
    },

    #[error(
        "input is not a positive semidefinite state (minimum eigenvalue {min_eigenvalue:.3e})"
    )]
    NotPsdState { min_eigenvalue: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed matrix file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
