//! Error type shared by all modules of the crate.

use thiserror::Error;

use crate::measure::ValidationReport;

/// Errors produced by constructors and operations throughout the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Two operands (or an operand and an expected shape) disagree on dimension.
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// A vector that must have unit Euclidean norm does not.
    #[error("vector is not normalized: |norm - 1| = {deviation:.3e}")]
    NotNormalized { deviation: f64 },

    /// A stored numeric value is NaN or infinite.
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    /// A probability or probability-like parameter is out of range.
    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    /// A tensor construction would exceed the configured dimension cap.
    #[error("tensor dimension {dim} exceeds the cap of {cap} (2^{cap_qubits} amplitudes)")]
    TensorCapExceeded {
        dim: usize,
        cap: usize,
        cap_qubits: u32,
    },

    /// A density operator failed one of its defining checks.
    #[error("invalid density operator: {reason}")]
    InvalidDensity { reason: String },

    /// A measurement family failed validation at construction.
    #[error("invalid measurement family:\n{report}")]
    InvalidFamily { report: ValidationReport },

    /// Collapse was requested onto an outcome with (numerically) zero probability.
    #[error("collapse onto null branch {label:?} (probability {probability:.3e})")]
    NullBranch { label: String, probability: f64 },

    /// An outcome label does not exist in the family.
    #[error("unknown outcome label {label:?}")]
    UnknownLabel { label: String },

    /// An operation received an empty input it cannot work with.
    #[error("empty input: {context}")]
    EmptyInput { context: &'static str },

    /// The mutual-information estimator saw records for only one intended bit.
    #[error("records contain no trials with intended bit {class}")]
    MissingClass { class: u8 },

    /// Catch-all for malformed arguments with a specific message.
    #[error("{0}")]
    InvalidArgument(String),

    /// An internal cross-check that must hold by construction failed.
    #[error("internal consistency check failed: {context} (residual {residual:.3e})")]
    ConsistencyCheck {
        context: &'static str,
        residual: f64,
    },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
