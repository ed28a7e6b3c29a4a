//! Evaluation runs: ingest inputs, queue human review, report metrics.

pub mod http;
mod pipeline;
mod report;
mod service;

use thiserror::Error;

use crate::judgments::{RubricError, StoreError};

pub use pipeline::*;
pub use report::{render_csv, render_json};
pub use service::*;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("missing required input: {0}")]
    MissingInput(&'static str),
    #[error("input failed to parse:\n  {}", .0.join("\n  "))]
    ParseFailures(Vec<String>),
    #[error("{0}")]
    Io(String),
    #[error("explanation check failed: {0}")]
    Check(String),
    #[error("run `{0}` already exists")]
    DuplicateRun(String),
    #[error("unknown run `{0}`")]
    UnknownRun(String),
    #[error("unknown review item `{0}`")]
    UnknownItem(String),
    #[error("item is claimed by {0}")]
    AlreadyClaimed(String),
    #[error("item `{0}` is not claimed by this reviewer")]
    NotClaimant(String),
    #[error("item `{0}` is already resolved")]
    AlreadyResolved(String),
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error(transparent)]
    Store(#[from] StoreError),
}

impl From<RubricError> for HarnessError {
    fn from(e: RubricError) -> Self {
        HarnessError::BadRequest(e.to_string())
    }
}
