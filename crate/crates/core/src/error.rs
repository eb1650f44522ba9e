use thiserror::Error;

/// Errors raised by the kernel and operator routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point {point} lies outside the open unit ball (norm {norm})")]
    Domain { point: String, norm: f64 },

    #[error("function nearly vanishes at sample point {point} (|f| = {modulus:e})")]
    Singularity { point: String, modulus: f64 },

    #[error("symbol is not a self-map: sampled modulus {max_modulus} exceeds 1")]
    NotSelfMap { max_modulus: f64 },

    #[error("constant symbol rejected: {0}")]
    ConstantSymbol(&'static str),

    #[error("matrix is not Hermitian (asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("kernel failed positivity (minimum eigenvalue {0:e})")]
    KernelNotPositive(f64),

    #[error("series tail {tail:e} exceeds {limit:e}; increase the truncation degree")]
    IncreaseDegree { tail: f64, limit: f64 },

    #[error("invalid point set: {0}")]
    PointSet(String),

    #[error("invalid experiment config: {0}")]
    Config(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
