use std::fmt;

/// Errors reported by this crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Field construction failed (bad degree or reducible polynomial).
    InvalidFieldParams(String),
    /// An element value does not fit the field it was used with.
    ElementOutOfRange { value: u32, q: u32 },
    /// A bit string had the wrong length for the field.
    BitLength { expected: usize, got: usize },
    /// A vector or grid had the wrong dimensions.
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// A node or row index fell outside the layout.
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },
    /// Constellation size not supported.
    UnsupportedConstellationSize { q: u32 },
    /// A named parameter failed validation.
    InvalidParameter {
        field: &'static str,
        message: String,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidFieldParams(msg) => write!(f, "invalid field parameters: {msg}"),
            Error::ElementOutOfRange { value, q } => {
                write!(f, "element value {value} is not in a field of size {q}")
            }
            Error::BitLength { expected, got } => {
                write!(f, "expected a bit string of length {expected}, got {got}")
            }
            Error::DimensionMismatch {
                what,
                expected,
                got,
            } => write!(f, "{what}: expected length {expected}, got {got}"),
            Error::IndexOutOfRange { what, index, len } => {
                write!(f, "{what} index {index} out of range (limit {len})")
            }
            Error::UnsupportedConstellationSize { q } => {
                write!(f, "unsupported constellation size q={q}; supported: 4, 16, 64")
            }
            Error::InvalidParameter { field, message } => {
                write!(f, "invalid {field}: {message}")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
