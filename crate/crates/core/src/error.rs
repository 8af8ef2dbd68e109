use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("generation failed: {0}")]
    GenerationFailed(String),

    #[error("kernel is not self-adjoint: worst pair ({row}, {col}) has residual {residual:.3e}")]
    KernelNotSelfAdjoint { row: usize, col: usize, residual: f64 },

    #[error("no spectral gap at mu = {mu}: nearest eigenvalue {nearest} (gap width {width:.3e})")]
    GapUndefined { mu: f64, nearest: f64, width: f64 },

    #[error("localizer unreliable: margin {margin:.3e} below threshold {threshold:.3e}")]
    LocalizerUnreliable { margin: f64, threshold: f64 },

    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
