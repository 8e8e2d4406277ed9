//! Error type shared across the crate.

use thiserror::Error;

use crate::learners::LearnerTrace;

#[derive(Debug, Error)]
pub enum Error {
    /// A per-point table does not cover the instance domain.
    #[error("domain mismatch: no value for point `{point}`")]
    DomainMismatch { point: String },

    #[error("duplicate point id `{point}`")]
    DuplicatePoint { point: String },

    #[error("unknown point `{point}`")]
    UnknownPoint { point: String },

    #[error("weights must sum to 1 (got {sum})")]
    WeightSum { sum: f64 },

    #[error("negative weight {value} at point `{point}`")]
    NegativeWeight { point: String, value: f64 },

    #[error("{field}: value {value} outside {range}")]
    OutOfRange {
        field: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("predictor value {value} is not a multiple of grid step {grid}")]
    GridViolation { value: f64, grid: f64 },

    #[error("hypothesis class is empty")]
    EmptyClass,

    #[error("hypotheses disagree on kind or domain size")]
    MixedClass,

    #[error("operation requires a {expected} class, got {found}")]
    InvalidClassKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("operation requires deterministic labels")]
    LabelsNotDeterministic,

    #[error("measure is identically zero (no hardness to extract)")]
    MeasureIdenticallyZero,

    #[error("measure has zero density under the instance distribution")]
    ZeroDensity,

    #[error("weight table has no entry for predictor value {value}")]
    MissingWeight { value: f64 },

    #[error("iteration cap exceeded after {} oracle calls (tau too small for the grid?)", trace.oracle_calls)]
    IterationCapExceeded { trace: Box<LearnerTrace> },

    #[error("domain too large: 2^{n} points exceeds the enumeration bound 2^{max}")]
    DomainTooLarge { n: u32, max: u32 },

    #[error("invalid configuration: {reason}")]
    InvalidConfig { reason: String },

    #[error("schema error at {path}: {reason}")]
    Schema { path: String, reason: String },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}
