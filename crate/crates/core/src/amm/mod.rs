//! `(1 - eps)`-approximate maximum matching by local simulation of
//! augmenting-path phases.
//!
//! Phase `i` takes the augmenting paths with `2i - 1` edges w.r.t. `M_{i-1}`,
//! selects a greedy maximal vertex-disjoint subset `A_i` in a random path order
//! and flips them: `M_i = M_{i-1} Δ A_i`. After `k` phases no augmenting path
//! with fewer than `2k + 1` edges remains, so `|M_k| >= k/(k+1) |M*|`.

mod global;
mod local;
mod params;
mod path;
mod phase1;

pub use global::{augmenting_paths, global_amm, mates_of, AmmTrace, PhaseRecord};
pub use local::{AmmCounters, AmmEngine, AmmLca, AmmOutcome, AmmQueryStats, AmmResult};
pub use params::{AmmParams, MAX_PATH_INDEPENDENCE};
pub use path::{encoding_width, vertex_bits, AugPath, PathOrdering, MAX_LEVEL};
pub use phase1::{find_good_ordering_vector, sample_edges, GoodPathOrdering};
