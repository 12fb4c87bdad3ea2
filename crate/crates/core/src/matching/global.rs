use super::params::{ChoiceBits, MmParams};
use crate::graph::{EdgeId, GraphStore, VertexId};

/// Complete execution of the global randomized matching routine.
#[derive(Clone, Debug)]
pub struct MmTrace {
    /// `partner[i][v]`: the mate of `v` after iteration `i`, `i in 0..=iterations`.
    partner: Vec<Vec<Option<VertexId>>>,
}

impl MmTrace {
    pub fn partner(&self, v: VertexId, i: u32) -> Option<VertexId> {
        self.partner[i as usize][v.index()]
    }

    pub fn iterations(&self) -> u32 {
        self.partner.len() as u32 - 1
    }

    /// Matching after the last iteration, in ascending edge order.
    pub fn matching(&self) -> Vec<EdgeId> {
        let last = self.partner.last().expect("iteration 0");
        last.iter()
            .enumerate()
            .filter_map(|(idx, p)| {
                let v = VertexId::new(idx as u32 + 1);
                p.filter(|&u| v < u).map(|u| EdgeId::new(v, u))
            })
            .collect()
    }

    /// Vertices left unmatched after the last iteration.
    pub fn unmatched(&self) -> Vec<VertexId> {
        let last = self.partner.last().expect("iteration 0");
        (0..last.len())
            .filter(|&idx| last[idx].is_none())
            .map(|idx| VertexId::new(idx as u32 + 1))
            .collect()
    }
}

/// Runs every iteration over the whole graph: each unmatched vertex picks a
/// uniform unmatched neighbor, each target keeps its highest-ID chooser, and a
/// kept arc `(s, t)` joins the matching when `b(s) = 0` and `b(t) = 1`.
pub fn global_mm_phase1(g: &GraphStore, params: &MmParams, bits: &ChoiceBits) -> MmTrace {
    let n = g.n();
    let mut partner = vec![vec![None; n]];
    for i in 1..=params.iterations {
        let prev: Vec<Option<VertexId>> = partner.last().unwrap().clone();
        let alive = |u: VertexId| prev[u.index()].is_none();
        let choice: Vec<Option<VertexId>> = g
            .vertices()
            .map(|s| {
                if !alive(s) {
                    return None;
                }
                let nbrs: Vec<VertexId> = g.neighbors(s).iter().copied().filter(|&u| alive(u)).collect();
                (!nbrs.is_empty()).then(|| nbrs[bits.choice(s.get() as u64, i, nbrs.len())])
            })
            .collect();
        let mut f2_in: Vec<Option<VertexId>> = vec![None; n];
        for s in g.vertices() {
            if let Some(t) = choice[s.index()] {
                let slot = &mut f2_in[t.index()];
                if slot.is_none_or(|x| x < s) {
                    *slot = Some(s);
                }
            }
        }
        let f2_out: Vec<Option<VertexId>> = g
            .vertices()
            .map(|s| choice[s.index()].filter(|t| f2_in[t.index()] == Some(s)))
            .collect();
        let b: Vec<bool> = g
            .vertices()
            .map(|v| match (f2_out[v.index()].is_some(), f2_in[v.index()].is_some()) {
                (true, true) => bits.coin(v.get() as u64, i),
                (false, true) => true,
                _ => false,
            })
            .collect();
        let mut next = prev.clone();
        for s in g.vertices() {
            if let Some(t) = f2_out[s.index()] {
                if !b[s.index()] && b[t.index()] {
                    next[s.index()] = Some(t);
                    next[t.index()] = Some(s);
                }
            }
        }
        partner.push(next);
    }
    MmTrace { partner }
}
