//! Mines a git repository's history and measures, release by release, how
//! strongly ten common defect-prediction beliefs are supported by the data.

pub mod analysis;
pub mod belief;
pub mod commands;
pub mod config;
pub mod error;
pub mod export;
pub mod ingest;
pub mod labeling;
pub mod metrics;
pub mod reporting;
pub mod stats;
pub mod synthgen;
pub mod windowing;

pub use belief::BeliefId;
pub use error::{Error, Result};
