//! Shared fixtures for the benchmarks.

use lca_core::graph::{gen_graph, GenKind, GraphStore};
use lca_core::pseudorandom::{MasterSeed, SeedBundle};

/// `G(n, p)` with mean degree about `d`, capped at `d`.
pub fn capped_gnp(n: usize, d: usize, gen_seed: u64) -> GraphStore {
    let p = d as f64 / (n.max(2) - 1) as f64;
    gen_graph(&GenKind::GnpCapped { n, p, d }, gen_seed).expect("valid generator parameters")
}

pub fn seed(x: u64) -> SeedBundle {
    SeedBundle::new(MasterSeed::from_u64(x))
}
