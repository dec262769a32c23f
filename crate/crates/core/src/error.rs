use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: need N >= 2")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("matrix is not Hermitian (relative residual {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not symmetric (relative residual {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not antisymmetric (relative residual {0:e})")]
    NotAntisymmetric(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("spectrum is not real (relative imaginary part {0:e})")]
    SpectrumNotReal(f64),

    #[error("matrix is singular (eigenvalue ratio {ratio:e})")]
    Singular { ratio: f64 },

    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid model point: {0}")]
    InvalidPoint(String),

    #[error("finite-difference step unstable: {0}")]
    StepInstability(String),

    #[error("series did not converge after {terms} terms (last term norm {last:e})")]
    NonConvergence { terms: usize, last: f64 },

    #[error("numeric consistency violated: {0}")]
    NumericConsistency(String),

    #[error("density matrix trace is {0}, expected 1")]
    InvalidTrace(f64),

    #[error("POVM elements do not sum to identity (residual {0:e})")]
    IncompletePovm(f64),

    #[error("probability gradients must sum to zero (parameter {row}: {sum:e})")]
    GradientNormalization { row: usize, sum: f64 },

    #[error("closed form unsupported: {0}")]
    UnsupportedClosedForm(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
