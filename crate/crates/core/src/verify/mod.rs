//! Brute-force reference checks, written against the plain graph store only.

mod exact;
mod rand;

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::{EdgeId, GraphStore, VertexId};

pub use exact::{max_matching_exact, max_matching_subsets, MAX_EXACT_VERTICES};
pub use rand::{
    kwise_exhaustive, ordering_subset_frequencies, q_bias_monte_carlo, rand_tests, seed_audit, RandTestParams,
};

/// What a failed check points at.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Vertex(VertexId),
    Edge(EdgeId),
    Path(Vec<VertexId>),
    Detail(String),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Vertex(v) => write!(f, "vertex {v}"),
            Witness::Edge(e) => write!(f, "edge {e}"),
            Witness::Path(p) => {
                let parts: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                write!(f, "path {}", parts.join("-"))
            }
            Witness::Detail(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "witness", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail(Witness),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail(w) => Some(w),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("PASS"),
            Verdict::Fail(w) => write!(f, "FAIL ({w})"),
        }
    }
}

fn membership(g: &GraphStore, set: &[VertexId]) -> Result<Vec<bool>, Witness> {
    let mut inside = vec![false; g.n()];
    for &v in set {
        if !g.contains(v) {
            return Err(Witness::Vertex(v));
        }
        inside[v.index()] = true;
    }
    Ok(inside)
}

/// Independent and maximal. The witness is a conflicting edge, an addable
/// vertex, or a vertex outside the graph.
pub fn verify_mis(g: &GraphStore, set: &[VertexId]) -> Verdict {
    let inside = match membership(g, set) {
        Ok(x) => x,
        Err(w) => return Verdict::Fail(w),
    };
    for e in g.edges() {
        let (a, b) = e.endpoints();
        if inside[a.index()] && inside[b.index()] {
            return Verdict::Fail(Witness::Edge(e));
        }
    }
    for v in g.vertices() {
        if !inside[v.index()] && g.neighbors(v).iter().all(|u| !inside[u.index()]) {
            return Verdict::Fail(Witness::Vertex(v));
        }
    }
    Verdict::Pass
}

/// Greedy MIS scanning vertices in the given order; returned ascending.
pub fn greedy_mis_global(g: &GraphStore, order: &[VertexId]) -> Vec<VertexId> {
    let mut blocked = vec![false; g.n()];
    let mut set = Vec::new();
    for &v in order {
        if !blocked[v.index()] {
            set.push(v);
            blocked[v.index()] = true;
            for u in g.neighbors(v) {
                blocked[u.index()] = true;
            }
        }
    }
    set.sort_unstable();
    set
}

/// Edges of `g`, pairwise disjoint, and (with `maximal`) no edge of `g` can be added.
pub fn verify_matching(g: &GraphStore, set: &[EdgeId], maximal: bool) -> Verdict {
    let mut covered = vec![false; g.n()];
    for &e in set {
        let (a, b) = e.endpoints();
        if !g.contains(a) || !g.contains(b) || !g.has_edge(a, b) {
            return Verdict::Fail(Witness::Edge(e));
        }
        for v in [a, b] {
            if covered[v.index()] {
                return Verdict::Fail(Witness::Vertex(v));
            }
            covered[v.index()] = true;
        }
    }
    if maximal {
        if let Some(e) = g
            .edges()
            .find(|e| !covered[e.lo().index()] && !covered[e.hi().index()])
        {
            return Verdict::Fail(Witness::Edge(e));
        }
    }
    Verdict::Pass
}

/// Histogram `size -> count` of connected components of the subgraph induced
/// by the vertices where `alive` holds.
pub fn components<F: Fn(VertexId) -> bool>(g: &GraphStore, alive: F) -> BTreeMap<usize, usize> {
    let mut seen = vec![false; g.n()];
    let mut hist = BTreeMap::new();
    let mut queue = VecDeque::new();
    for s in g.vertices() {
        if seen[s.index()] || !alive(s) {
            continue;
        }
        seen[s.index()] = true;
        queue.push_back(s);
        let mut size = 0;
        while let Some(v) = queue.pop_front() {
            size += 1;
            for &u in g.neighbors(v) {
                if !seen[u.index()] && alive(u) {
                    seen[u.index()] = true;
                    queue.push_back(u);
                }
            }
        }
        *hist.entry(size).or_insert(0) += 1;
    }
    hist
}
