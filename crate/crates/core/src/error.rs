use thiserror::Error;

/// Errors raised by every layer of the crate.
#[derive(Error, Debug)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension {0} is not supported (need d >= 2)")]
    InvalidDimension(usize),
    #[error("vector is not normalized: squared norm {0}")]
    NotNormalized(f64),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("matrix is not unitary: residual {0:e}")]
    NotUnitary(f64),
    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("unsupported spin label 2j = {0}; supported: 1/2, 1, 3/2")]
    UnsupportedSpin(u32),
    #[error("invalid detector model: {0}")]
    InvalidDetector(String),
    #[error("adaptation map is not total over {dim} outcomes")]
    IncompleteAdaptation { dim: usize },

    #[error("invalid symbol selection: {0}")]
    InvalidSelection(String),
    #[error("identify needs an even alphabet, got n = {0}; eliminate a symbol first")]
    OddAlphabet(usize),
    #[error("invalid equipartition: {0}")]
    InvalidPartition(String),
    #[error("stream length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("symbol {symbol} outside alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: u32, alphabet: u32 },
    #[error("bit length {bits} inconsistent with {bytes} bytes")]
    BitLength { bits: u64, bytes: usize },

    #[error("stream too short for {test}: need at least {need}, got {got}")]
    TooShort {
        test: &'static str,
        need: usize,
        got: usize,
    },

    #[error("invalid configuration field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
