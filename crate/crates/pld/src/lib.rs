//! File formats, CSV ingestion and command implementations for `pld-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
pub mod manifest;
pub mod parallel;
pub mod report;
pub mod rulefile;

pub use error::{PldError, Result};
