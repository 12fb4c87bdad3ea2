use crate::error::LcaError;
use crate::graph::{EdgeId, GraphStore, VertexId};

/// Largest graph the exact matching search accepts.
pub const MAX_EXACT_VERTICES: usize = 64;

struct Search {
    adj: Vec<u64>,
    chosen: Vec<(u32, u32)>,
    best: Vec<(u32, u32)>,
}

impl Search {
    /// `free` holds the vertices not yet matched or discarded.
    fn run(&mut self, free: u64) {
        let mut active = 0u64;
        let mut rest = free;
        while rest != 0 {
            let v = rest.trailing_zeros();
            rest &= rest - 1;
            if self.adj[v as usize] & free != 0 {
                active |= 1 << v;
            }
        }
        let bound = self.chosen.len() + active.count_ones() as usize / 2;
        if bound <= self.best.len() {
            return;
        }
        if active == 0 {
            self.best = self.chosen.clone();
            return;
        }
        let v = active.trailing_zeros();
        let without_v = active & !(1u64 << v);
        let mut candidates = self.adj[v as usize] & active;
        while candidates != 0 {
            let u = candidates.trailing_zeros();
            candidates &= candidates - 1;
            self.chosen.push((v, u));
            self.run(without_v & !(1u64 << u));
            self.chosen.pop();
        }
        self.run(without_v);
    }
}

/// A maximum matching by branch and bound: the lowest-numbered vertex that
/// still has a free neighbor is matched to each such neighbor in turn or left
/// unmatched, and a branch is cut once half the remaining matchable vertices
/// cannot beat the incumbent.
pub fn max_matching_exact(g: &GraphStore) -> Result<Vec<EdgeId>, LcaError> {
    if g.n() > MAX_EXACT_VERTICES {
        return Err(LcaError::InvalidParameter {
            field: "graph",
            reason: format!(
                "exact matching is limited to {MAX_EXACT_VERTICES} vertices, graph has {}",
                g.n()
            ),
        });
    }
    let mut adj = vec![0u64; g.n()];
    for e in g.edges() {
        let (a, b) = (e.lo().index(), e.hi().index());
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    let all = if g.n() == 64 { u64::MAX } else { (1u64 << g.n()) - 1 };
    let mut search = Search {
        adj,
        chosen: Vec::new(),
        best: Vec::new(),
    };
    search.run(all);
    let mut edges: Vec<EdgeId> = search
        .best
        .iter()
        .map(|&(a, b)| EdgeId::new(VertexId::new(a + 1), VertexId::new(b + 1)))
        .collect();
    edges.sort_unstable();
    Ok(edges)
}

/// Maximum matching size by trying every edge subset; for at most 20 edges.
pub fn max_matching_subsets(g: &GraphStore) -> usize {
    let edges: Vec<EdgeId> = g.edges().collect();
    assert!(edges.len() <= 20, "subset enumeration is limited to 20 edges");
    let mut best = 0;
    for mask in 0u32..(1 << edges.len()) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let mut covered = 0u64;
        let mut ok = true;
        for (i, e) in edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                let bits = (1u64 << e.lo().index()) | (1u64 << e.hi().index());
                if covered & bits != 0 {
                    ok = false;
                    break;
                }
                covered |= bits;
            }
        }
        if ok {
            best = size;
        }
    }
    best
}
