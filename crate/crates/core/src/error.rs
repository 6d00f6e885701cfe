use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid alpha vector: {0}")]
    InvalidAlphas(String),

    #[error("family {0} is not closed under complementation")]
    NotClosed(&'static str),

    #[error("insufficient samples: {got} < {min}")]
    InsufficientSamples { got: u64, min: u64 },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("degenerate posterior: every grid weight is zero")]
    DegeneratePosterior,

    #[error("normalization check failed: quadrature gives {integral} (tolerance {tolerance})")]
    Normalization { integral: f64, tolerance: f64 },

    #[error("Monte Carlo settings are required for {0}")]
    MissingMonteCarlo(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
