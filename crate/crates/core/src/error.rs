use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
///
/// Variants are grouped so that callers (the CLI in particular) can map each
/// class onto a stable exit code via [`Error::class`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u8),
    #[error("unsupported dtype code {0} (only f32 = 1 is defined)")]
    UnsupportedDtype(u8),
    #[error("truncated payload: {0}")]
    Truncated(String),
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("empty matrix")]
    EmptyMatrix,
    #[error("label count {labels} does not match row count {rows}")]
    LabelCount { labels: usize, rows: usize },
    #[error("csv line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("cannot pad {cols} columns to {target}: truncation is not supported")]
    PadTooSmall { cols: usize, target: usize },
    #[error("row count mismatch: {left} vs {right}")]
    RowMismatch { left: usize, right: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),
    #[error("asset checksum mismatch: expected {expected}, computed {computed}")]
    Checksum { expected: String, computed: String },
}

/// Coarse error category, used for exit-code mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Missing, unreadable or malformed input.
    Input,
    /// Feature dimensionality does not line up.
    Dimension,
    /// Paired inputs disagree in size.
    Pairing,
    /// Not enough usable data for a statistic.
    Data,
    /// Caller supplied an invalid parameter.
    Parameter,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io { .. }
            | Error::BadMagic { .. }
            | Error::UnsupportedVersion(_)
            | Error::UnsupportedDtype(_)
            | Error::Truncated(_)
            | Error::NonFinite { .. }
            | Error::EmptyMatrix
            | Error::LabelCount { .. }
            | Error::Csv { .. }
            | Error::Checksum { .. } => ErrorClass::Input,
            Error::DimensionMismatch { .. } | Error::PadTooSmall { .. } => ErrorClass::Dimension,
            Error::RowMismatch { .. } => ErrorClass::Pairing,
            Error::InsufficientData(_) | Error::ZeroVariance(_) => ErrorClass::Data,
            Error::InvalidParameter(_) => ErrorClass::Parameter,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
