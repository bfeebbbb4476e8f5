//! Error types shared by the store, fitting, and optimization modules.

use thiserror::Error;

/// Validation failure for a single experiment record, independent of where
/// the record came from.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecordError {
    #[error("{field} must be positive, got {value}")]
    NotPositive { field: &'static str, value: f64 },

    #[error("{field} must be finite, got {value}")]
    NotFinite { field: &'static str, value: f64 },

    #[error("{field} must not be empty")]
    EmptyField { field: &'static str },

    /// Text fields may not contain the delimiter or line breaks, and may not
    /// carry surrounding whitespace; both would break the line formats.
    #[error("{field} contains a reserved character or surrounding whitespace: {text:?}")]
    ReservedText { field: &'static str, text: String },

    #[error(
        "power_w = {power_w} W but voltage_v * current_a = {product} W \
         (difference exceeds {tolerance} W)"
    )]
    PowerMismatch {
        power_w: f64,
        product: f64,
        tolerance: f64,
    },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: expected {expected} fields, found {found}")]
    FieldCount {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}, field {field}: cannot parse {text:?} as a number")]
    NumberParse {
        line: usize,
        field: &'static str,
        text: String,
    },

    #[error("line {line}, field {field}: cannot parse {text:?} as an id")]
    IdParse {
        line: usize,
        field: &'static str,
        text: String,
    },

    #[error("line {line}: {source}")]
    InvalidRow { line: usize, source: RecordError },

    #[error("invalid record: {source}")]
    InvalidRecord {
        #[from]
        source: RecordError,
    },

    #[error("missing header: expected {expected:?}, found {found:?}")]
    BadHeader { expected: String, found: String },

    #[error("unsupported format version: expected {expected:?}, found {found:?}")]
    VersionMismatch { expected: String, found: String },

    #[error("line {line}: record ids must be strictly increasing, found {id} after {previous}")]
    IdOrder { line: usize, id: u64, previous: u64 },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("dataset contains a non-finite value at point {index}")]
    NonFiniteData { index: usize },

    #[error("degree must be between {min} and {max}, got {degree}")]
    DegreeOutOfRange {
        degree: usize,
        min: usize,
        max: usize,
    },

    #[error(
        "need at least {needed} points with distinct abscissae for degree {degree}, \
         got {points} points ({distinct} distinct)"
    )]
    TooFewPoints {
        degree: usize,
        needed: usize,
        points: usize,
        distinct: usize,
    },

    #[error("normal equations are numerically singular (condition estimate {condition:.3e})")]
    SingularSystem { condition: f64 },

    #[error("no fit reports to select from")]
    NoReports,

    #[error("model coefficients must be non-empty and finite")]
    InvalidCoefficients,

    #[error("invalid range: lo = {lo}, hi = {hi} (need finite lo < hi)")]
    InvalidRange { lo: f64, hi: f64 },

    #[error(
        "analytic minimization supports degree 3 at most, got degree {degree}; \
         use grid or random search instead"
    )]
    AnalyticUnsupported { degree: usize },

    #[error("{parameter} must be {requirement}, got {value}")]
    InvalidParameter {
        parameter: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error(transparent)]
    RawIo(#[from] std::io::Error),
}

impl Error {
    /// Attaches a file path to a bare I/O error.
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
