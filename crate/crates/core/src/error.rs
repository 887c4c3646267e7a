use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid dispersion set: {0}")]
    InvalidDispersionSet(String),

    #[error("dispersion matrix {index} is zero, power diagonal is singular")]
    SingularPowerDiagonal { index: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown built-in code `{0}` (expected one of alamouti, cod-g3, cod-g4)")]
    UnknownCode(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("Gauss-Laguerre rule needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "capacity {capacity} bits/use is not below the rate-unbounded supremum {supremum} bits/use; no finite symbol rate suffices"
    )]
    NoFiniteRate { capacity: f64, supremum: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
