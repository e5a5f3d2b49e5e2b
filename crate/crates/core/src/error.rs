use std::collections::BTreeMap;

use thiserror::Error;

/// Errors raised across the workbench.
#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{qubits} qubits exceeds the dense-matrix cap of {cap} qubits")]
    Capacity { qubits: usize, cap: usize },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("cannot normalize a zero matrix")]
    Normalization,

    #[error("the Liouvillian has no steady state (empty null space)")]
    NoSteadyState,

    #[error("steady state is not unique (dimension {0}); a unique steady state is required")]
    NonUniqueSteadyState(usize),

    #[error("integration became unstable at step {step}; increase the number of steps")]
    Instability { step: usize },

    #[error("purity estimate {purity} is not positive; the shot budget is too small for this state")]
    IllConditionedRatio { purity: f64 },

    #[error("observable has no terms")]
    DegenerateObservable,

    #[error("target cannot be an L†L: {0}")]
    StructuralRejection(String),

    #[error("no univariate equation found at degree {d}")]
    NeedHigherD { d: usize },

    #[error("system is unsolvable up to degree {d_max}")]
    Unsolvable { d_max: usize },

    #[error("search exceeded the node budget of {budget}")]
    BudgetExceeded { budget: usize, partial: BTreeMap<usize, f64> },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("numerical routine failed: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
