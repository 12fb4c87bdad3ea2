use std::fmt::Debug;
use std::hash::Hash;
use std::ops::Sub;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{EdgeId, GraphStore, VertexId};

/// Usage errors raised by an oracle. A missing neighbor is *not* an error; it is `Ok(None)`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("vertex {0} is not in the graph")]
    VertexOutOfRange(String),
    #[error("neighbor index {index} outside 1..={bound}")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("vertex {0} is not part of this view")]
    NotInView(String),
    #[error("{0} is not an edge of the base graph")]
    NotAnEdge(String),
}

/// Snapshot of oracle traffic. Subtracting two snapshots gives the cost of
/// whatever ran in between.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryTally {
    pub neighbor: u64,
    pub degree: u64,
}

impl QueryTally {
    pub fn raw(&self) -> u64 {
        self.neighbor + self.degree
    }

    /// Cost with each degree query priced as the `ceil(log2(d+1))` neighbor
    /// queries a binary search would need.
    pub fn normalized(&self, d: usize) -> u64 {
        let per_degree = (usize::BITS - d.leading_zeros()) as u64;
        self.neighbor + self.degree * per_degree.max(1)
    }
}

impl Sub for QueryTally {
    type Output = QueryTally;

    fn sub(self, rhs: QueryTally) -> QueryTally {
        QueryTally {
            neighbor: self.neighbor - rhs.neighbor,
            degree: self.degree - rhs.degree,
        }
    }
}

/// Adjacency-list access to a (possibly virtual) graph.
///
/// `neighbor(v, i)` uses 1-based `i` in `1..=degree_bound()`; indices past
/// `deg(v)` yield `Ok(None)`.
pub trait Oracle {
    type Vertex: Copy + Ord + Eq + Hash + Debug;

    fn degree_bound(&self) -> usize;

    /// Vertex count the algorithm may assume (an upper bound for virtual views).
    fn vertex_count(&self) -> usize;

    /// Injective map of vertices into `1..=index_space()`, used to address random bits.
    fn index_of(&self, v: Self::Vertex) -> u64;

    fn index_space(&self) -> u64;

    fn neighbor(&self, v: Self::Vertex, i: usize) -> Result<Option<Self::Vertex>, OracleError>;

    fn degree(&self, v: Self::Vertex) -> Result<usize, OracleError>;

    /// All neighbors in canonical order: one degree query plus `deg(v)` neighbor queries.
    fn neighbors(&self, v: Self::Vertex) -> Result<Vec<Self::Vertex>, OracleError> {
        let deg = self.degree(v)?;
        (1..=deg)
            .map(|i| Ok(self.neighbor(v, i)?.expect("index within degree")))
            .collect()
    }

    /// Traffic accumulated on the underlying counting oracle.
    fn tally(&self) -> QueryTally;
}

impl<O: Oracle + ?Sized> Oracle for &O {
    type Vertex = O::Vertex;

    fn degree_bound(&self) -> usize {
        (**self).degree_bound()
    }
    fn vertex_count(&self) -> usize {
        (**self).vertex_count()
    }
    fn index_of(&self, v: Self::Vertex) -> u64 {
        (**self).index_of(v)
    }
    fn index_space(&self) -> u64 {
        (**self).index_space()
    }
    fn neighbor(&self, v: Self::Vertex, i: usize) -> Result<Option<Self::Vertex>, OracleError> {
        (**self).neighbor(v, i)
    }
    fn degree(&self, v: Self::Vertex) -> Result<usize, OracleError> {
        (**self).degree(v)
    }
    fn neighbors(&self, v: Self::Vertex) -> Result<Vec<Self::Vertex>, OracleError> {
        (**self).neighbors(v)
    }
    fn tally(&self) -> QueryTally {
        (**self).tally()
    }
}

/// The only read path to a [`GraphStore`]; counts every neighbor and degree query.
///
/// Counters are atomics so that concurrent queries can share one oracle; they
/// never influence answers.
#[derive(Debug)]
pub struct CountingOracle<'g> {
    graph: &'g GraphStore,
    neighbor_queries: AtomicU64,
    degree_queries: AtomicU64,
}

impl<'g> CountingOracle<'g> {
    pub fn new(graph: &'g GraphStore) -> Self {
        CountingOracle {
            graph,
            neighbor_queries: AtomicU64::new(0),
            degree_queries: AtomicU64::new(0),
        }
    }

    pub fn graph(&self) -> &'g GraphStore {
        self.graph
    }

    fn check(&self, v: VertexId) -> Result<(), OracleError> {
        if self.graph.contains(v) {
            Ok(())
        } else {
            Err(OracleError::VertexOutOfRange(v.to_string()))
        }
    }
}

impl Oracle for CountingOracle<'_> {
    type Vertex = VertexId;

    fn degree_bound(&self) -> usize {
        self.graph.d()
    }

    fn vertex_count(&self) -> usize {
        self.graph.n()
    }

    fn index_of(&self, v: VertexId) -> u64 {
        v.get() as u64
    }

    fn index_space(&self) -> u64 {
        self.graph.n() as u64
    }

    fn neighbor(&self, v: VertexId, i: usize) -> Result<Option<VertexId>, OracleError> {
        self.check(v)?;
        if i == 0 || i > self.graph.d() {
            return Err(OracleError::IndexOutOfRange {
                index: i,
                bound: self.graph.d(),
            });
        }
        self.neighbor_queries.fetch_add(1, Ordering::Relaxed);
        Ok(self.graph.neighbors(v).get(i - 1).copied())
    }

    fn degree(&self, v: VertexId) -> Result<usize, OracleError> {
        self.check(v)?;
        self.degree_queries.fetch_add(1, Ordering::Relaxed);
        Ok(self.graph.degree(v))
    }

    fn neighbors(&self, v: VertexId) -> Result<Vec<VertexId>, OracleError> {
        self.check(v)?;
        let list = self.graph.neighbors(v);
        self.degree_queries.fetch_add(1, Ordering::Relaxed);
        self.neighbor_queries
            .fetch_add(list.len() as u64, Ordering::Relaxed);
        Ok(list.to_vec())
    }

    fn tally(&self) -> QueryTally {
        QueryTally {
            neighbor: self.neighbor_queries.load(Ordering::Relaxed),
            degree: self.degree_queries.load(Ordering::Relaxed),
        }
    }
}

/// Lazily evaluated oracle for the subgraph induced by `alive`.
///
/// Neighbor order is the base order restricted to live vertices. Nothing is
/// materialized: each answer re-reads the base neighbor list and evaluates the
/// predicate on it, so all traffic lands on the base counters.
pub struct InducedView<O, F> {
    base: O,
    alive: F,
}

impl<O, F> InducedView<O, F>
where
    O: Oracle,
    F: Fn(O::Vertex) -> Result<bool, OracleError>,
{
    pub fn new(base: O, alive: F) -> Self {
        InducedView { base, alive }
    }

    pub fn base(&self) -> &O {
        &self.base
    }

    pub fn is_alive(&self, v: O::Vertex) -> Result<bool, OracleError> {
        (self.alive)(v)
    }

    fn require_alive(&self, v: O::Vertex) -> Result<(), OracleError> {
        if (self.alive)(v)? {
            Ok(())
        } else {
            Err(OracleError::NotInView(format!("{v:?}")))
        }
    }
}

impl<O, F> Oracle for InducedView<O, F>
where
    O: Oracle,
    F: Fn(O::Vertex) -> Result<bool, OracleError>,
{
    type Vertex = O::Vertex;

    fn degree_bound(&self) -> usize {
        self.base.degree_bound()
    }

    fn vertex_count(&self) -> usize {
        self.base.vertex_count()
    }

    fn index_of(&self, v: Self::Vertex) -> u64 {
        self.base.index_of(v)
    }

    fn index_space(&self) -> u64 {
        self.base.index_space()
    }

    fn neighbor(&self, v: Self::Vertex, i: usize) -> Result<Option<Self::Vertex>, OracleError> {
        if i == 0 || i > self.degree_bound() {
            return Err(OracleError::IndexOutOfRange {
                index: i,
                bound: self.degree_bound(),
            });
        }
        Ok(self.neighbors(v)?.get(i - 1).copied())
    }

    fn degree(&self, v: Self::Vertex) -> Result<usize, OracleError> {
        Ok(self.neighbors(v)?.len())
    }

    fn neighbors(&self, v: Self::Vertex) -> Result<Vec<Self::Vertex>, OracleError> {
        self.require_alive(v)?;
        let mut out = self.base.neighbors(v)?;
        let mut keep = Ok(());
        out.retain(|&u| match (self.alive)(u) {
            Ok(b) => b,
            Err(e) => {
                keep = Err(e);
                false
            }
        });
        keep.map(|_| out)
    }

    fn tally(&self) -> QueryTally {
        self.base.tally()
    }
}

/// Oracle for the line graph `L(G)`: vertices are edges of `G`, adjacent when
/// they share an endpoint, ordered lexicographically by `(lo, hi)`.
pub struct LineGraphView<O> {
    base: O,
}

impl<O: Oracle<Vertex = VertexId>> LineGraphView<O> {
    pub fn new(base: O) -> Self {
        LineGraphView { base }
    }

    pub fn base(&self) -> &O {
        &self.base
    }
}

impl<O: Oracle<Vertex = VertexId>> Oracle for LineGraphView<O> {
    type Vertex = EdgeId;

    fn degree_bound(&self) -> usize {
        2 * self.base.degree_bound().saturating_sub(1)
    }

    /// Upper bound `n*d/2` on the number of edges.
    fn vertex_count(&self) -> usize {
        (self.base.vertex_count() * self.base.degree_bound() / 2).max(1)
    }

    fn index_of(&self, e: EdgeId) -> u64 {
        let n = self.base.vertex_count() as u64;
        (e.lo().get() as u64 - 1) * n + e.hi().get() as u64
    }

    fn index_space(&self) -> u64 {
        let n = self.base.vertex_count() as u64;
        n * n
    }

    fn neighbor(&self, e: EdgeId, i: usize) -> Result<Option<EdgeId>, OracleError> {
        if i == 0 || i > self.degree_bound() {
            return Err(OracleError::IndexOutOfRange {
                index: i,
                bound: self.degree_bound(),
            });
        }
        Ok(self.neighbors(e)?.get(i - 1).copied())
    }

    fn degree(&self, e: EdgeId) -> Result<usize, OracleError> {
        Ok(self.neighbors(e)?.len())
    }

    fn neighbors(&self, e: EdgeId) -> Result<Vec<EdgeId>, OracleError> {
        let (lo, hi) = e.endpoints();
        let lo_adj = self.base.neighbors(lo)?;
        if lo_adj.binary_search(&hi).is_err() {
            return Err(OracleError::NotAnEdge(e.to_string()));
        }
        let hi_adj = self.base.neighbors(hi)?;
        let mut out: Vec<EdgeId> = lo_adj
            .iter()
            .filter(|&&x| x != hi)
            .map(|&x| EdgeId::new(lo, x))
            .chain(hi_adj.iter().filter(|&&y| y != lo).map(|&y| EdgeId::new(hi, y)))
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    fn tally(&self) -> QueryTally {
        self.base.tally()
    }
}
