use alloc::boxed::Box;
use alloc::string::String;

use thiserror::Error;

use crate::language::PredicateId;
use crate::model::Model;
use crate::table::ColumnKind;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("column `{column}` has {found} cells, expected {expected}")]
    Ragged {
        column: String,
        expected: usize,
        found: usize,
    },
    #[error("column `{column}` row {row}: cell is not {}", kind.as_str())]
    KindMismatch {
        column: String,
        row: usize,
        kind: ColumnKind,
    },
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("column `{0}` has no non-missing values")]
    AllMissing(String),
    #[error("duplicate predicate name `{0}`")]
    DuplicatePredicate(String),
    #[error("input has no column `{0}`")]
    MissingColumn(String),
    #[error("dataset has {columns} columns for a language of {predicates} predicates")]
    ShapeMismatch { columns: usize, predicates: usize },
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum RuleError {
    #[error("conclusion {0} also appears in the premise")]
    ConclusionInPremise(PredicateId),
    #[error("predicate {0} is already in the premise")]
    AlreadyInPremise(PredicateId),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("significance level must lie in (0, 1), got {0}")]
    ConfidenceLevel(f64),
    #[error("base depth d must be at least 1")]
    ZeroDepth,
    #[error("base depth d = {d} exceeds max_size = {max_size}")]
    DepthExceedsMaxSize { d: usize, max_size: usize },
    #[error("{name} must be finite and within [{min}, {max}], got {value}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("node cap must be positive")]
    ZeroNodeCap,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("no conclusion predicates given")]
    NoTargets,
    #[error("conclusion predicate {0} is not in the language")]
    UnknownTarget(PredicateId),
    #[error("node cap of {cap} exceeded for conclusion {target} at level {level}")]
    NodeCap {
        /// Laws from every level sealed before the cap was hit.
        partial: Box<Model>,
        target: PredicateId,
        level: usize,
        cap: usize,
    },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InferenceError {
    #[error("no baseline rule stored for class predictor {0}")]
    MissingBaseline(PredicateId),
    #[error("predictor {0} carries no numeric range")]
    NoRange(PredicateId),
    #[error("predicate {0} is not in the model language")]
    UnknownPredicate(PredicateId),
    #[error(transparent)]
    Config(#[from] ConfigError),
}
