//! Weak-MIS: the global reference run, its local simulation and the two-phase MIS LCA.

mod global;
mod local;
mod params;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use global::{global_weak_mis, StageOutcome, StageRecord, WeakMisTrace};
pub use local::{CallCounters, MemoScope, QueryStats, WeakMisLca};
pub use params::{component_cap, MisParams, SelectionBits, DEFAULT_C1, DEFAULT_INDEPENDENCE};
#[allow(unused_imports)]
pub(crate) use params::{ceil_log2, ceil_tolerant};

/// Per-vertex answer of a Phase-1 simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TriState {
    Yes,
    No,
    /// Still undecided (`⊥`).
    Bottom,
}

impl fmt::Display for TriState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriState::Yes => "YES",
            TriState::No => "NO",
            TriState::Bottom => "BOTTOM",
        })
    }
}
