use thiserror::Error;

/// Errors raised by the numerical routines and the scenario front-end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian: max asymmetry {asymmetry:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("matrix is not unitary: max |U^dag U - I| = {defect:.3e}")]
    NotUnitary { defect: f64 },

    #[error("matrix is singular to working precision: pivot {pivot:.3e} below threshold {threshold:.3e}")]
    Singular { pivot: f64, threshold: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {residual:.3e})")]
    EigenNoConvergence { sweeps: usize, residual: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("spectral parameter {re} + {im}i must be non-real")]
    RealSpectralParameter { re: f64, im: f64 },

    #[error("mode cutoff {cutoff} is smaller than the interaction mode support {support}")]
    TruncationTooSmall { cutoff: usize, support: usize },

    #[error("quasi-energy window lies within the truncation edge: {0}")]
    WindowAtEdge(String),

    #[error("candidate {candidate} lies within {distance:.3e} of the free threshold set")]
    NearThreshold { candidate: f64, distance: f64 },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("invalid probe configuration: {0}")]
    InvalidProbes(String),

    #[error("validation failed for `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
