use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric: entry ({row},{col}) = {value:e} but ({col},{row}) = {mirror:e}")]
    NotSymmetric {
        row: usize,
        col: usize,
        value: f64,
        mirror: f64,
    },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("composite Simpson needs an even number of intervals, got {0}")]
    OddIntervals(usize),
    #[error("invalid quadrature grid: {0}")]
    InvalidGrid(String),
    #[error("sample count {actual} does not match grid nodes {expected}")]
    SampleCount { expected: usize, actual: usize },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("K and V do not split H")]
    NoSplitting,
    #[error("unknown spectral function tag `{0}`")]
    UnknownTag(String),
    #[error("{0}")]
    WrongBackend(String),
    #[error("element is not in the representable domain class: {0}")]
    NotRepresentable(String),
    #[error("control is not in class M: representation of the wave requires vanishing near t=0")]
    NotClassM,
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("time {t} exceeds the implemented reflection range (t <= {max})")]
    BeyondReflections { t: f64, max: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
