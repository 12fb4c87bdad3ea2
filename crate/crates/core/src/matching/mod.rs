//! Maximal matching LCAs: MIS on the line graph, and a two-phase LCA built on
//! randomized arc selection.

mod global;
mod line_graph;
mod local;
mod params;

pub use global::{global_mm_phase1, MmTrace};
pub use line_graph::LineGraphMatching;
pub use local::{MatchingLca, MmCounters, MmQueryStats};
pub use params::{ChoiceBits, MmParams, DEFAULT_C2, DEFAULT_CM};
