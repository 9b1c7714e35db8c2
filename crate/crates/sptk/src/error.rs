use thiserror::Error;

/// Crate-wide error type.
#[derive(Error, Debug)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("A1 not Hurwitz (spectral abscissa {abscissa})")]
    NotHurwitz { abscissa: f64 },
    #[error("matrix not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("singular linear solve: {0}")]
    SingularSolve(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("assumption violated: {0}")]
    AssumptionViolated(String),
    #[error("certificate unusable: {0}")]
    CertificateUnusable(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
