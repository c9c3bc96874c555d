//! Crate-wide error type.
//!
//! Every fallible operation in this crate returns [`Result`]. Variants carry
//! enough context (ids, names, sizes) to point at the offending input without
//! any I/O machinery; the companion crate wraps these in its own error types
//! where file paths and exit codes come into play.

use alloc::string::String;

/// Errors produced by campaign bookkeeping, model training, and validation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A target set with zero samples was supplied.
    #[error("target set is empty")]
    EmptyTarget,
    /// A dataset with zero samples was constructed or requested.
    #[error("dataset has no samples")]
    EmptyDataset,
    /// Attempted to transfer a sample that is not in the inference set.
    #[error("sample {id} is not in the inference set")]
    InvalidTransfer { id: usize },
    /// A feature value was NaN or infinite.
    #[error("non-finite feature value at row {row}, column {col}")]
    NonFiniteFeature { row: usize, col: usize },
    /// A classification label fell outside `0..n_classes`.
    #[error("class label {label} out of range for {n_classes} classes (sample {id})")]
    LabelOutOfRange {
        id: usize,
        label: usize,
        n_classes: usize,
    },
    /// A regression label was NaN or infinite.
    #[error("non-finite regression label at sample {id}")]
    NonFiniteLabel { id: usize },
    /// An auxiliary column's length disagrees with the dataset.
    #[error("aux column '{name}' has {got} entries, expected {expected}")]
    AuxLengthMismatch {
        name: String,
        got: usize,
        expected: usize,
    },
    /// A named auxiliary column does not exist.
    #[error("aux column '{name}' not found")]
    MissingAuxColumn { name: String },
    /// A named auxiliary column exists but holds the wrong kind of data.
    #[error("aux column '{name}' has the wrong kind for this operation")]
    AuxKindMismatch { name: String },
    /// Feature width (or fingerprint width) mismatch.
    #[error("width {got} does not match expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    /// Two parallel sequences have different lengths.
    #[error("lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    /// A prediction violated its invariants (probability range / sum / arity).
    #[error("invalid prediction: {reason}")]
    InvalidPrediction { reason: &'static str },
    /// An operation was handed the wrong prediction kind for its policy.
    #[error("policy expects {expected} predictions, got {got}")]
    PolicyMismatch {
        expected: &'static str,
        got: &'static str,
    },
    /// A configuration value is out of its documented domain.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// A scalar argument is out of its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// The label oracle failed to produce a label for a requested sample.
    #[error("label oracle failed for sample {id}")]
    OracleFailure { id: usize },
    /// Batch selection was invoked with nothing to select from.
    #[error("empty candidate set")]
    EmptyCandidates,
    /// A batch-level metric was invoked on an empty batch.
    #[error("empty batch")]
    EmptyBatch,
}

pub type Result<T> = core::result::Result<T, Error>;
