//! Eager phase-by-phase computation of `M_1, ..., M_k` on a whole graph.

use rustc_hash::FxHashSet;

use super::path::{AugPath, PathOrdering};
use crate::graph::{EdgeId, GraphStore, VertexId};

/// Per-phase record of the eager computation.
#[derive(Clone, Debug)]
pub struct PhaseRecord {
    /// `P_i`, ascending by encoding.
    pub paths: Vec<AugPath>,
    /// `A_i`, in the order the greedy pass accepted them.
    pub chosen: Vec<AugPath>,
    /// `M_i`, ascending.
    pub matching: Vec<EdgeId>,
}

#[derive(Clone, Debug)]
pub struct AmmTrace {
    pub phases: Vec<PhaseRecord>,
}

impl AmmTrace {
    /// `M_i`; `M_0` is empty.
    pub fn matching(&self, i: usize) -> &[EdgeId] {
        if i == 0 {
            &[]
        } else {
            &self.phases[i - 1].matching
        }
    }

    pub fn last(&self) -> &[EdgeId] {
        self.matching(self.phases.len())
    }
}

/// Partner array of a matching, indexed by vertex position.
pub fn mates_of(n: usize, matching: &[EdgeId]) -> Vec<Option<VertexId>> {
    let mut mate = vec![None; n];
    for e in matching {
        let (a, b) = e.endpoints();
        mate[a.index()] = Some(b);
        mate[b.index()] = Some(a);
    }
    mate
}

/// All augmenting paths with exactly `2 * level - 1` edges w.r.t. `matching`,
/// found by alternating depth-first search from every free vertex.
pub fn augmenting_paths(g: &GraphStore, matching: &[EdgeId], level: u32) -> Vec<AugPath> {
    let mate = mates_of(g.n(), matching);
    let len = 2 * level as usize;
    let mut out = Vec::new();
    let mut stack = Vec::with_capacity(len);
    for s in g.vertices().filter(|s| mate[s.index()].is_none()) {
        stack.clear();
        stack.push(s);
        alternate(g, &mate, len, &mut stack, &mut out);
    }
    let n = g.n();
    let mut paths: Vec<AugPath> = out.iter().map(|seq| AugPath::new(level, seq, n)).collect();
    paths.sort_unstable();
    paths.dedup();
    paths
}

fn alternate(
    g: &GraphStore,
    mate: &[Option<VertexId>],
    len: usize,
    stack: &mut Vec<VertexId>,
    out: &mut Vec<Vec<VertexId>>,
) {
    let here = *stack.last().unwrap();
    if stack.len() == len {
        if mate[here.index()].is_none() {
            out.push(stack.clone());
        }
        return;
    }
    // Edges leave even positions unmatched and odd positions matched.
    let next: Vec<VertexId> = if stack.len() % 2 == 1 {
        g.neighbors(here)
            .iter()
            .copied()
            .filter(|&u| mate[here.index()] != Some(u))
            .collect()
    } else {
        mate[here.index()].into_iter().collect()
    };
    for u in next {
        if !stack.contains(&u) {
            stack.push(u);
            alternate(g, mate, len, stack, out);
            stack.pop();
        }
    }
}

/// Runs `k` phases: `P_i` in full, its greedy vertex-disjoint selection in
/// ordering order, and the symmetric difference with `M_{i-1}`.
pub fn global_amm(g: &GraphStore, k: u32, ordering: &PathOrdering) -> AmmTrace {
    let mut current: Vec<EdgeId> = Vec::new();
    let mut phases = Vec::with_capacity(k as usize);
    for level in 1..=k {
        let paths = augmenting_paths(g, &current, level);
        let mut by_rank: Vec<&AugPath> = paths.iter().collect();
        by_rank.sort_by_cached_key(|p| ordering.key(p));
        let mut used: FxHashSet<VertexId> = FxHashSet::default();
        let mut chosen = Vec::new();
        for p in by_rank {
            if p.vertices().iter().all(|v| !used.contains(v)) {
                used.extend(p.vertices().iter().copied());
                chosen.push(p.clone());
            }
        }
        let mut set: FxHashSet<EdgeId> = current.iter().copied().collect();
        for p in &chosen {
            for e in p.edges() {
                if !set.remove(&e) {
                    set.insert(e);
                }
            }
        }
        current = set.into_iter().collect();
        current.sort_unstable();
        phases.push(PhaseRecord {
            paths,
            chosen,
            matching: current.clone(),
        });
    }
    AmmTrace { phases }
}
