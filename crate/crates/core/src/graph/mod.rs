//! Graph storage, text ingestion, generators and the query-counting oracle.
//!
//! A [`GraphStore`] is never read directly by the LCAs. Every algorithm goes
//! through an [`Oracle`], which is either a [`CountingOracle`] over a store or a
//! virtual view ([`InducedView`], [`LineGraphView`]) stacked on top of one.

mod generate;
mod io;
mod oracle;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generate::{gen_graph, GenKind};
pub use io::load_graph;
pub use oracle::{
    CountingOracle, InducedView, LineGraphView, Oracle, OracleError, QueryTally,
};

/// Vertex identifier in `1..=n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(u32);

impl VertexId {
    pub const fn new(raw: u32) -> Self {
        VertexId(raw)
    }

    pub const fn get(self) -> u32 {
        self.0
    }

    /// Zero-based position, for indexing dense per-vertex arrays.
    pub const fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl From<u32> for VertexId {
    fn from(raw: u32) -> Self {
        VertexId(raw)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An undirected edge stored as its canonical pair `(lo, hi)` with `lo < hi`.
///
/// The derived ordering is lexicographic on `(lo, hi)`, which is the vertex
/// order used by the line-graph view.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId {
    lo: VertexId,
    hi: VertexId,
}

impl EdgeId {
    /// Canonicalizes the endpoint pair. Panics on a self-loop.
    pub fn new(a: VertexId, b: VertexId) -> Self {
        assert_ne!(a, b, "an edge needs two distinct endpoints");
        if a < b {
            EdgeId { lo: a, hi: b }
        } else {
            EdgeId { lo: b, hi: a }
        }
    }

    pub fn from_raw(a: u32, b: u32) -> Self {
        EdgeId::new(VertexId(a), VertexId(b))
    }

    pub fn lo(self) -> VertexId {
        self.lo
    }

    pub fn hi(self) -> VertexId {
        self.hi
    }

    pub fn endpoints(self) -> (VertexId, VertexId) {
        (self.lo, self.hi)
    }

    pub fn touches(self, v: VertexId) -> bool {
        self.lo == v || self.hi == v
    }

    /// The endpoint that is not `v`; `v` must be an endpoint.
    pub fn other(self, v: VertexId) -> VertexId {
        if self.lo == v {
            self.hi
        } else {
            debug_assert_eq!(self.hi, v);
            self.lo
        }
    }

    pub fn shares_endpoint(self, other: EdgeId) -> bool {
        self.touches(other.lo) || self.touches(other.hi)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: {reason}")]
    Load { line: usize, reason: String },
    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: u32, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("duplicate edge ({0},{1})")]
    DuplicateEdge(u32, u32),
    #[error("vertex {vertex} has degree {degree}, exceeding the bound {bound}")]
    DegreeExceeded { vertex: u32, degree: usize, bound: usize },
    #[error("invalid generator request: {0}")]
    Generator(String),
}

/// Immutable simple undirected graph with a declared degree bound `d`.
///
/// Adjacency is stored in CSR form; each neighbor list is in ascending ID
/// order, which is the canonical neighbor order exposed by the oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphStore {
    n: usize,
    d: usize,
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
}

impl GraphStore {
    /// Builds a graph from an edge list, validating simplicity and the degree bound.
    pub fn from_edges<I>(n: usize, d: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        for (a, b) in edges {
            for x in [a, b] {
                if x == 0 || x as usize > n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            adj[a as usize - 1].push(VertexId(b));
            adj[b as usize - 1].push(VertexId(a));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for (i, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = (i as u32 + 1, w[0].get());
                return Err(GraphError::DuplicateEdge(a.min(b), a.max(b)));
            }
            if list.len() > d {
                return Err(GraphError::DegreeExceeded {
                    vertex: i as u32 + 1,
                    degree: list.len(),
                    bound: d,
                });
            }
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        Ok(GraphStore { n, d, offsets, targets })
    }

    /// Graph on `n` vertices and no edges.
    pub fn edgeless(n: usize, d: usize) -> Self {
        GraphStore {
            n,
            d,
            offsets: vec![0; n + 1],
            targets: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Declared degree bound.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.targets.len() / 2
    }

    /// Average degree `2m/n`.
    pub fn average_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            2.0 * self.m() as f64 / self.n as f64
        }
    }

    pub fn max_degree(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.0 >= 1 && v.0 as usize <= self.n
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (1..=self.n as u32).map(VertexId)
    }

    /// Ascending neighbor list of `v`. Panics if `v` is out of range.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let i = v.index();
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        let i = v.index();
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.contains(a) && self.contains(b) && self.neighbors(a).binary_search(&b).is_ok()
    }

    /// All edges in ascending canonical order.
    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&w| w > u)
                .map(move |&w| EdgeId { lo: u, hi: w })
        })
    }

    /// Subgraph induced by `keep`, with vertex IDs preserved (dropped vertices become isolated).
    pub fn induced<F: Fn(VertexId) -> bool>(&self, keep: F) -> GraphStore {
        let edges: Vec<(u32, u32)> = self
            .edges()
            .filter(|e| keep(e.lo) && keep(e.hi))
            .map(|e| (e.lo.0, e.hi.0))
            .collect();
        GraphStore::from_edges(self.n, self.d, edges).expect("induced subgraph of a valid graph")
    }

    /// Serializes to the text format accepted by [`load_graph`].
    pub fn to_text(&self) -> String {
        io::to_text(self)
    }
}
