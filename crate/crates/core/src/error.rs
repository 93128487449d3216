use thiserror::Error;

use crate::scenario::Pair;

/// Input or invariant violations detected while building domain values.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("probability `{field}` is negative ({value})")]
    NegativeProbability { field: String, value: String },

    #[error("probability `{field}` exceeds 1 ({value})")]
    ProbabilityAboveOne { field: String, value: String },

    #[error("probabilities of pair {pair} sum to {sum}, expected 1")]
    SumNotOne { pair: String, sum: String },

    #[error("behavior table is missing pair {0}")]
    MissingPair(Pair),

    #[error("`{0}` is not a compatible pair (expected one of 13, 14, 23, 24)")]
    UnknownPair(String),

    #[error("uncovered pair{} {}", if .0.len() == 1 { "" } else { "s" }, join_pairs(.0))]
    UncoveredPairs(Vec<Pair>),

    #[error("correlation component `{component}` = {value} lies outside [-1, 1]")]
    ComponentOutOfRange { component: String, value: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("zero-dimensional space")]
    ZeroDimension,

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("operator is not a projector (max deviation {0:e})")]
    NotProjector(f64),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("config field `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },
}

fn join_pairs(pairs: &[Pair]) -> String {
    pairs.iter().map(|p| format!("({},{})", p.left(), p.right())).collect::<Vec<_>>().join(", ")
}

/// A measurement outcome with zero Born probability was requested.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("impossible measurement outcome: {outcome} has probability {probability:e}")]
pub struct ImpossibleOutcome {
    pub outcome: String,
    pub probability: f64,
}

/// Failure of a Born-rule measurement.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasurementError {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Impossible(#[from] ImpossibleOutcome),
}
