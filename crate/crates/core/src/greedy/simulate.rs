use std::cell::RefCell;
use std::hash::Hash;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::graph::{Oracle, OracleError, VertexId};
use crate::pseudorandom::{CachedOrdering, RankKey};

/// A strict total order on vertices, given by sort keys.
pub trait Priority<V> {
    fn key(&self, v: V) -> RankKey;
}

impl<V, P: Priority<V> + ?Sized> Priority<V> for &P {
    fn key(&self, v: V) -> RankKey {
        (**self).key(v)
    }
}

/// Vertex order drawn from a [`crate::pseudorandom::RandomOrdering`].
impl Priority<VertexId> for CachedOrdering<'_> {
    fn key(&self, v: VertexId) -> RankKey {
        CachedOrdering::key(self, v.get() as u128).expect("vertex inside the ordering's domain")
    }
}

/// An explicit permutation: `position[v-1]` is the place of `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    position: Vec<u32>,
}

impl Permutation {
    /// From the sequence of vertices in order of appearance.
    pub fn from_sequence(order: &[VertexId]) -> Self {
        let mut position = vec![u32::MAX; order.len()];
        for (idx, v) in order.iter().enumerate() {
            position[v.index()] = idx as u32;
        }
        assert!(position.iter().all(|&p| p != u32::MAX), "not a permutation");
        Permutation { position }
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            position: (0..n as u32).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.position.len()
    }

    pub fn is_empty(&self) -> bool {
        self.position.is_empty()
    }

    /// Vertices in order.
    pub fn sequence(&self) -> Vec<VertexId> {
        let mut out = vec![VertexId::new(0); self.position.len()];
        for (idx, &p) in self.position.iter().enumerate() {
            out[p as usize] = VertexId::new(idx as u32 + 1);
        }
        out
    }
}

impl Priority<VertexId> for Permutation {
    fn key(&self, v: VertexId) -> RankKey {
        RankKey {
            rank: self.position[v.index()] as u128,
            element: v.get() as u128,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LsOutcome {
    Yes,
    No,
    /// The call budget ran out before the answer was known.
    Truncated,
}

/// Answer of one greedy-simulation query and its call count `R`.
///
/// `calls` counts every invocation, the root included, as the plain recursion
/// would make them; memoized subtrees are charged their full size. On
/// truncation it is the count at which the budget was first exceeded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LsResult {
    pub outcome: LsOutcome,
    pub calls: u64,
}

struct Frame<V> {
    v: V,
    earlier: Vec<V>,
    next: usize,
    cost: u64,
}

enum Entry<V> {
    Open(Frame<V>),
    Known(bool, u64),
}

/// Local simulation of greedy MIS in a fixed vertex order.
///
/// Completed sub-answers are memoized together with their subtree size. Both
/// are pure functions of `(graph, order, vertex)`, so the memo may be kept
/// across queries without changing any answer or call count.
pub struct LsMis<O: Oracle, P> {
    oracle: O,
    order: P,
    memo: RefCell<FxHashMap<O::Vertex, (bool, u64)>>,
}

impl<O, P> LsMis<O, P>
where
    O: Oracle,
    O::Vertex: Hash,
    P: Priority<O::Vertex>,
{
    pub fn new(oracle: O, order: P) -> Self {
        LsMis {
            oracle,
            order,
            memo: RefCell::new(FxHashMap::default()),
        }
    }

    pub fn oracle(&self) -> &O {
        &self.oracle
    }

    pub fn order(&self) -> &P {
        &self.order
    }

    pub fn clear_memo(&self) {
        self.memo.borrow_mut().clear();
    }

    fn enter(&self, v: O::Vertex, counter: &mut u64, budget: u64) -> Result<Option<Entry<O::Vertex>>, OracleError> {
        *counter = counter.saturating_add(1);
        if *counter > budget {
            return Ok(None);
        }
        if let Some(&(answer, cost)) = self.memo.borrow().get(&v) {
            *counter = counter.saturating_add(cost - 1);
            if *counter > budget {
                return Ok(None);
            }
            return Ok(Some(Entry::Known(answer, cost)));
        }
        let key = self.order.key(v);
        let mut earlier: Vec<(_, O::Vertex)> = self
            .oracle
            .neighbors(v)?
            .into_iter()
            .map(|u| (self.order.key(u), u))
            .filter(|(k, _)| *k < key)
            .collect();
        earlier.sort_unstable_by_key(|&(k, _)| k);
        Ok(Some(Entry::Open(Frame {
            v,
            earlier: earlier.into_iter().map(|(_, u)| u).collect(),
            next: 0,
            cost: 1,
        })))
    }

    /// Greedy-MIS membership of `v`, giving up once more than `budget` calls are needed.
    pub fn query(&self, v: O::Vertex, budget: Option<u64>) -> Result<LsResult, OracleError> {
        let budget = budget.unwrap_or(u64::MAX);
        let mut counter = 0u64;
        let truncated = |counter: u64| LsResult {
            outcome: LsOutcome::Truncated,
            calls: counter,
        };
        let mut stack = match self.enter(v, &mut counter, budget)? {
            None => return Ok(truncated(counter)),
            Some(Entry::Known(answer, cost)) => return Ok(finish(answer, cost)),
            Some(Entry::Open(frame)) => vec![frame],
        };
        let mut pending: Option<(bool, u64)> = None;
        loop {
            let top = stack.last_mut().expect("non-empty stack");
            let mut resolved = None;
            if let Some((answer, cost)) = pending.take() {
                top.cost = top.cost.saturating_add(cost);
                if answer {
                    resolved = Some(false);
                }
            }
            if resolved.is_none() {
                if top.next < top.earlier.len() {
                    let child = top.earlier[top.next];
                    top.next += 1;
                    match self.enter(child, &mut counter, budget)? {
                        None => return Ok(truncated(counter)),
                        Some(Entry::Known(answer, cost)) => pending = Some((answer, cost)),
                        Some(Entry::Open(frame)) => stack.push(frame),
                    }
                    continue;
                }
                resolved = Some(true);
            }
            let answer = resolved.unwrap();
            let frame = stack.pop().expect("non-empty stack");
            self.memo.borrow_mut().insert(frame.v, (answer, frame.cost));
            if stack.is_empty() {
                return Ok(finish(answer, frame.cost));
            }
            pending = Some((answer, frame.cost));
        }
    }
}

fn finish(answer: bool, calls: u64) -> LsResult {
    LsResult {
        outcome: if answer { LsOutcome::Yes } else { LsOutcome::No },
        calls,
    }
}

/// One-shot greedy simulation with a fresh memo.
pub fn ls_mis<O, P>(oracle: O, order: P, v: O::Vertex, budget: Option<u64>) -> Result<LsResult, OracleError>
where
    O: Oracle,
    O::Vertex: Hash,
    P: Priority<O::Vertex>,
{
    LsMis::new(oracle, order).query(v, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_graph, CountingOracle, GenKind, GraphStore};

    fn v(x: u32) -> VertexId {
        VertexId::new(x)
    }

    #[test]
    fn isolated_vertex() {
        let g = GraphStore::from_edges(1, 0, std::iter::empty()).unwrap();
        let o = CountingOracle::new(&g);
        let r = ls_mis(&o, Permutation::identity(1), v(1), None).unwrap();
        assert_eq!(r, LsResult { outcome: LsOutcome::Yes, calls: 1 });
    }

    #[test]
    fn single_edge() {
        let g = GraphStore::from_edges(2, 1, [(1, 2)]).unwrap();
        let o = CountingOracle::new(&g);
        let pi = Permutation::from_sequence(&[v(1), v(2)]);
        assert_eq!(ls_mis(&o, &pi, v(1), None).unwrap(), LsResult { outcome: LsOutcome::Yes, calls: 1 });
        assert_eq!(ls_mis(&o, &pi, v(2), None).unwrap(), LsResult { outcome: LsOutcome::No, calls: 2 });
        assert_eq!(ls_mis(&o, &pi, v(2), Some(1)).unwrap().outcome, LsOutcome::Truncated);
    }

    #[test]
    fn triangle_identity_order() {
        let g = gen_graph(&GenKind::Complete { n: 3 }, 0).unwrap();
        let o = CountingOracle::new(&g);
        let sim = LsMis::new(&o, Permutation::identity(3));
        let answers: Vec<_> = (1..=3).map(|x| sim.query(v(x), None).unwrap().outcome).collect();
        assert_eq!(answers, vec![LsOutcome::Yes, LsOutcome::No, LsOutcome::No]);
    }

    #[test]
    fn memo_does_not_change_counts() {
        let g = gen_graph(&GenKind::GnpCapped { n: 120, p: 0.05, d: 6 }, 4).unwrap();
        let o = CountingOracle::new(&g);
        let order: Vec<VertexId> = (1..=120).rev().map(v).collect();
        let pi = Permutation::from_sequence(&order);
        let shared = LsMis::new(&o, &pi);
        for x in g.vertices() {
            let fresh = ls_mis(&o, &pi, x, None).unwrap();
            assert_eq!(shared.query(x, None).unwrap(), fresh);
            for budget in [1, 3, 10] {
                let with_shared = shared.query(x, Some(budget)).unwrap();
                let with_fresh = ls_mis(&o, &pi, x, Some(budget)).unwrap();
                assert_eq!(with_shared.outcome, with_fresh.outcome);
                if fresh.calls <= budget {
                    assert_eq!(with_fresh, fresh);
                } else {
                    assert_eq!(with_fresh.outcome, LsOutcome::Truncated);
                }
            }
        }
    }
}
