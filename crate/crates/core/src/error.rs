use thiserror::Error;

/// Broad failure category, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input data, bad spec, I/O.
    Data,
    /// The numerics did not produce an answer.
    Numerical,
}

#[derive(Debug, Error)]
pub enum FssError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point lies on the cut locus of the base point")]
    CutLocus,

    #[error("tangent vector norm {0} exceeds pi")]
    TangentTooLong(f64),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid distribution spec: {0}")]
    InvalidSpec(String),

    #[error("distribution has no density: {0}")]
    NoDensity(&'static str),

    #[error("population mean: {0}")]
    MeanNotUnique(String),

    #[error("empty sample")]
    EmptySample,

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("no convergence after {iterations} iterations (gradient norm {gradient_norm:e})")]
    NoConvergence { iterations: usize, gradient_norm: f64 },

    #[error("too many failed replicates: {failed} of {total}")]
    TooManyFailures { failed: usize, total: usize },

    #[error("singular covariance (condition number {condition:e}){hint}")]
    Singular { condition: f64, hint: &'static str },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("Hessian is not positive definite (smeary or unstable): coefficient {0}")]
    NotPositiveDefinite(f64),

    #[error("{0}")]
    OutOfRange(String),

    #[error("no FSS regime detected: {0}")]
    NoRegime(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("target modulation {target} unreachable on the search grid (best {best})")]
    Unreachable { target: f64, best: f64 },

    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl FssError {
    pub fn kind(&self) -> ErrorKind {
        use FssError::*;
        match self {
            NoConvergence { .. }
            | TooManyFailures { .. }
            | Singular { .. }
            | Quadrature(_)
            | NotPositiveDefinite(_)
            | NoRegime(_)
            | Inconclusive(_)
            | Unreachable { .. } => ErrorKind::Numerical,
            _ => ErrorKind::Data,
        }
    }
}

pub type Result<T, E = FssError> = std::result::Result<T, E>;
