use rustc_hash::FxHashMap;

use super::local::{AmmEngine, AmmOutcome};
use super::params::AmmParams;
use super::path::PathOrdering;
use crate::error::LcaError;
use crate::graph::{EdgeId, Oracle, VertexId};
use crate::greedy::DrawReport;
use crate::pseudorandom::SeedBundle;
use crate::weak_mis::MemoScope;

/// The path ordering chosen by Phase 1 and how it was found.
#[derive(Clone, Debug)]
pub struct GoodPathOrdering {
    pub ordering: PathOrdering,
    pub ell: u64,
    pub p_tilde: f64,
    pub draws: Vec<DrawReport>,
    /// Seed bits consumed: all tested orderings plus the edge sample.
    pub seed_bits: u64,
}

/// Multiset of `size` uniform edges as `(edge, multiplicity)`, ascending.
///
/// Each draw picks a vertex and a neighbor slot uniformly and retries on an
/// empty slot, so every edge is hit with the same probability. The graph must
/// have at least one edge.
pub fn sample_edges<O>(oracle: &O, size: u64, seed: &SeedBundle) -> Result<(Vec<(EdgeId, u64)>, u64), LcaError>
where
    O: Oracle<Vertex = VertexId>,
{
    let n = oracle.vertex_count() as u64;
    let d = oracle.degree_bound() as u64;
    let mut stream = seed.sample();
    let mut counts: FxHashMap<EdgeId, u64> = FxHashMap::default();
    for _ in 0..size {
        loop {
            let v = VertexId::new(stream.uniform_below(n) as u32 + 1);
            let slot = stream.uniform_below(d) as usize + 1;
            if let Some(u) = oracle.neighbor(v, slot)? {
                *counts.entry(EdgeId::new(v, u)).or_default() += 1;
                break;
            }
        }
    }
    let mut sample: Vec<(EdgeId, u64)> = counts.into_iter().collect();
    sample.sort_unstable();
    Ok((sample, stream.consumed()))
}

/// Phase 1: draws path orderings until the sampled fraction of edges whose
/// level-`k` query needs more than `ell` calls falls below `3 gamma / 4`,
/// doubling `ell` after each round of `trials` failures.
pub fn find_good_ordering_vector<O>(
    oracle: O,
    params: &AmmParams,
    seed: &SeedBundle,
) -> Result<GoodPathOrdering, LcaError>
where
    O: Oracle<Vertex = VertexId>,
{
    let (sample, mut seed_bits) = if params.m == 0 {
        (Vec::new(), 0)
    } else {
        sample_edges(&oracle, params.sample_size, seed)?
    };
    let mut draws = Vec::new();
    let mut ell = params.ell0;
    let mut draw = 0u64;
    for _round in 0..=params.doublings {
        for _ in 0..params.trials {
            let independence = AmmParams::ordering_independence(ell);
            let ordering = PathOrdering::new(params.n, params.k, independence, seed, draw)?;
            seed_bits += ordering.seed_bits();
            let engine = AmmEngine::new(&oracle, &ordering, MemoScope::Shared);
            let mut truncated = 0u64;
            for &(e, count) in &sample {
                if engine.in_matching(e, params.k, Some(ell))?.outcome == AmmOutcome::Truncated {
                    truncated += count;
                }
            }
            let p_tilde = truncated as f64 / params.sample_size.max(1) as f64;
            let accepted = p_tilde < params.threshold();
            draws.push(DrawReport {
                draw,
                ell,
                p_tilde,
                accepted,
            });
            draw += 1;
            if accepted {
                return Ok(GoodPathOrdering {
                    ordering,
                    ell,
                    p_tilde,
                    draws,
                    seed_bits,
                });
            }
        }
        ell = ell.saturating_mul(2);
    }
    Err(LcaError::Phase1Failed {
        draws: draw,
        ell: ell / 2,
    })
}
