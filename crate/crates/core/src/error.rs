use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole at s = {0}")]
    Pole(String),

    #[error("series region violated: {0}")]
    Region(String),

    #[error("series diverges: {0}")]
    Divergence(String),

    #[error("integrand does not decay (branch error): {0}")]
    Branch(String),

    #[error("truncation error too large: {0}")]
    Truncation(String),

    #[error("contour geometry: {0}")]
    Geometry(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("ill-conditioned fit: {0}")]
    Fit(String),

    #[error("verification failed: {0}")]
    Verification(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
