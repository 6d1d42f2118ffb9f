use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("field is not Hermitian within tolerance: {0}")]
    NotHermitian(String),

    #[error("field is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("source term has nonzero mean: |mean| = {0:.3e}")]
    NonZeroMean(f64),

    #[error("hypothesis violated: {name}: {detail}")]
    HypothesisViolated { name: String, detail: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("bad field file: {0}")]
    BadFieldFile(String),
}

impl Error {
    pub fn hypothesis(name: &str, detail: impl Into<String>) -> Self {
        Error::HypothesisViolated {
            name: name.to_string(),
            detail: detail.into(),
        }
    }

    /// Process exit status associated with this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::HypothesisViolated { .. } => 3,
            _ => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
