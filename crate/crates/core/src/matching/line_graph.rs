use crate::error::LcaError;
use crate::graph::{EdgeId, LineGraphView, Oracle, VertexId};
use crate::pseudorandom::SeedBundle;
use crate::weak_mis::{MemoScope, MisParams, QueryStats, WeakMisLca};

/// Maximal matching as the MIS LCA run on the line graph.
pub struct LineGraphMatching<O: Oracle<Vertex = VertexId>> {
    lca: WeakMisLca<LineGraphView<O>>,
}

impl<O: Oracle<Vertex = VertexId>> LineGraphMatching<O> {
    /// MIS parameters are derived from the line graph: `n*d/2` vertices, degree bound `2(d-1)`.
    pub fn new(oracle: O, c1: f64, seed: &SeedBundle, scope: MemoScope) -> Result<Self, LcaError> {
        let view = LineGraphView::new(oracle);
        let params = MisParams::new(view.vertex_count(), view.degree_bound(), c1)?;
        Ok(LineGraphMatching {
            lca: WeakMisLca::new(view, params, seed, scope)?,
        })
    }

    pub fn mis(&self) -> &WeakMisLca<LineGraphView<O>> {
        &self.lca
    }

    pub fn query(&self, e: EdgeId) -> Result<bool, LcaError> {
        self.lca.query(e)
    }

    pub fn query_with_stats(&self, e: EdgeId) -> (Result<bool, LcaError>, QueryStats) {
        self.lca.query_with_stats(e)
    }
}
