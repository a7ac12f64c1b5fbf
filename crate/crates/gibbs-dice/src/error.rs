//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A side length, height or normalization scale is non-positive or non-finite.
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    /// A model parameter (typically beta) is out of its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Paired inputs (energies vs. counts) disagree in length.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An operation that needs data received none.
    #[error("empty data: {0}")]
    EmptyData(String),

    /// A chi-square cell has zero expected count; the message names the cell.
    #[error("degenerate cell: {0}")]
    DegenerateCell(String),

    #[error("unknown dataset `{name}`; available: {available}")]
    UnknownDataset { name: String, available: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
