use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// Multi-index lengths or index spaces do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Matrix shapes disagree for an entrywise operation.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Real and complex operands were mixed.
    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    /// An exact integer quantity exceeded 128-bit capacity, or a slice
    /// exceeded the configured enumeration limit.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A parameter was outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// A coefficient key was inserted twice.
    #[error("duplicate term: {0}")]
    DuplicateTerm(String),

    /// A series with no blocks was queried.
    #[error("empty series")]
    EmptySeries,
}

pub type Result<T> = std::result::Result<T, Error>;
