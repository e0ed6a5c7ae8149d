//! Probabilistic law discovery.
//!
//! Learns minimal-premise, high-probability rules ("probabilistic laws")
//! from Boolean object-feature data by building a rule derivation graph:
//! a complete base enumeration up to depth `d`, followed by hill-climbing
//! refinement of the depth-`d` laws up to `max_size`. Learned law sets drive
//! classification, regression by averaging over range predictors, anomaly
//! scoring and agreement-measure clusterization.
//!
//! The crate is `no_std` (with `alloc`). File formats, CSV ingestion and the
//! command-line front end live in the `pld` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bitset;
pub mod cluster;
pub mod dataset;
pub mod error;
pub mod graph;
pub mod hyper;
pub mod inference;
pub mod language;
pub mod learner;
pub mod model;
pub mod oracle;
pub mod rule;
pub mod stats;
pub mod table;

pub use bitset::BitColumn;
pub use cluster::{ClusterHierarchy, FeatureCluster, ObjectAssignment};
pub use dataset::Dataset;
pub use error::{ConfigError, DataError, LearnError, RuleError};
pub use graph::{DerivationGraph, NodeId, RuleNode};
pub use hyper::Hyperparameters;
pub use inference::{ObjectFeatures, Prediction, PredictionFailure};
pub use language::{PredicateDef, PredicateId, PredicateLanguage, Transform};
pub use learner::{learn, learn_target, LevelReport, TargetOutcome};
pub use model::{Law, Model, TargetLaws};
pub use rule::{Rule, RuleStats};
pub use table::{Cell, Column, ColumnKind, RawTable};

#[cfg(test)]
pub(crate) mod testutil;
