use thiserror::Error;

use crate::graph::OracleError;
use crate::pseudorandom::RandomError;

/// Failures an LCA can report for a query.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LcaError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Random(#[from] RandomError),
    /// The residual component reached during Phase 2 exceeds the cap.
    #[error("COMPONENT_TOO_LARGE: component has more than {cap} vertices (reached {seen})")]
    ComponentTooLarge { seen: u64, cap: u64 },
    /// No ordering passed the sampled truncation test.
    #[error("PHASE1_ERROR: no good ordering found after {draws} draws (last budget {ell})")]
    Phase1Failed { draws: u64, ell: u64 },
    #[error("invalid parameter {field}: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
}
