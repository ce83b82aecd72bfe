use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation was handed a parameter outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An intermediate value left the representable range (overflow / non-finite).
    #[error("range error: {0}")]
    Range(String),

    /// The quadrature or propagation grid does not contain the integrand's support.
    #[error("grid too small: {0}")]
    GridTooSmall(String),

    /// Operation invoked on a state with an incompatible basis policy.
    #[error("policy mismatch: {0}")]
    Policy(String),

    /// A coefficient or wavefunction sample became non-finite during integration.
    #[error("non-finite amplitude at t = {t}")]
    NonFinite { t: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
