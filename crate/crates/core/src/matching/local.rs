use std::cell::{Cell, RefCell};
use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;
use std::time::{Duration, Instant};

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::params::{ChoiceBits, MmParams};
use crate::error::LcaError;
use crate::graph::{EdgeId, InducedView, Oracle, OracleError, QueryTally, VertexId};
use crate::pseudorandom::SeedBundle;
use crate::weak_mis::MemoScope;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MmCounters {
    pub state_calls: u64,
    pub state_evals: u64,
    pub phase2_visited: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MmQueryStats {
    pub tally: QueryTally,
    pub calls: MmCounters,
    pub wall: Duration,
}

#[derive(Default)]
struct Memo {
    partner: FxHashMap<(VertexId, u32), Option<VertexId>>,
    alive_nbrs: FxHashMap<(VertexId, u32), Rc<[VertexId]>>,
    choice: FxHashMap<(VertexId, u32), Option<VertexId>>,
    f2_in: FxHashMap<(VertexId, u32), Option<VertexId>>,
    residual: FxHashMap<VertexId, Option<VertexId>>,
}

/// Two-phase maximal matching LCA built on the randomized arc-selection routine.
pub struct MatchingLca<O: Oracle<Vertex = VertexId>> {
    oracle: O,
    params: MmParams,
    bits: ChoiceBits,
    scope: MemoScope,
    memo: RefCell<Memo>,
    counters: Cell<MmCounters>,
}

impl<O: Oracle<Vertex = VertexId>> MatchingLca<O> {
    pub fn new(oracle: O, params: MmParams, seed: &SeedBundle, scope: MemoScope) -> Result<Self, LcaError> {
        let bits = ChoiceBits::new(&params, oracle.index_space(), seed)?;
        Ok(Self::with_bits(oracle, params, bits, scope))
    }

    pub fn with_bits(oracle: O, params: MmParams, bits: ChoiceBits, scope: MemoScope) -> Self {
        MatchingLca {
            oracle,
            params,
            bits,
            scope,
            memo: RefCell::new(Memo::default()),
            counters: Cell::new(MmCounters::default()),
        }
    }

    pub fn params(&self) -> &MmParams {
        &self.params
    }

    pub fn bits(&self) -> &ChoiceBits {
        &self.bits
    }

    pub fn counters(&self) -> MmCounters {
        self.counters.get()
    }

    pub fn reset(&self) {
        *self.memo.borrow_mut() = Memo::default();
    }

    fn bump(&self, f: impl FnOnce(&mut MmCounters)) {
        let mut c = self.counters.get();
        f(&mut c);
        self.counters.set(c);
    }

    /// Unmatched neighbors of `v` at the start of iteration `i`.
    fn alive_neighbors(&self, v: VertexId, i: u32) -> Result<Rc<[VertexId]>, OracleError> {
        if let Some(list) = self.memo.borrow().alive_nbrs.get(&(v, i)) {
            return Ok(list.clone());
        }
        let mut list = Vec::new();
        for u in self.oracle.neighbors(v)? {
            if self.partner(u, i - 1)?.is_none() {
                list.push(u);
            }
        }
        let list: Rc<[VertexId]> = list.into();
        self.memo.borrow_mut().alive_nbrs.insert((v, i), list.clone());
        Ok(list)
    }

    /// The neighbor `s` picks in iteration `i`; `s` must be unmatched before `i`.
    fn choice(&self, s: VertexId, i: u32) -> Result<Option<VertexId>, OracleError> {
        if let Some(&c) = self.memo.borrow().choice.get(&(s, i)) {
            return Ok(c);
        }
        let nbrs = self.alive_neighbors(s, i)?;
        let c = (!nbrs.is_empty()).then(|| nbrs[self.bits.choice(self.oracle.index_of(s), i, nbrs.len())]);
        self.memo.borrow_mut().choice.insert((s, i), c);
        Ok(c)
    }

    /// Highest-ID chooser of `t` in iteration `i`.
    fn f2_in(&self, t: VertexId, i: u32) -> Result<Option<VertexId>, OracleError> {
        if let Some(&c) = self.memo.borrow().f2_in.get(&(t, i)) {
            return Ok(c);
        }
        let mut best = None;
        for &s in self.alive_neighbors(t, i)?.iter().rev() {
            if self.choice(s, i)? == Some(t) {
                best = Some(s);
                break;
            }
        }
        self.memo.borrow_mut().f2_in.insert((t, i), best);
        Ok(best)
    }

    fn f2_out(&self, s: VertexId, i: u32) -> Result<Option<VertexId>, OracleError> {
        Ok(match self.choice(s, i)? {
            Some(t) if self.f2_in(t, i)? == Some(s) => Some(t),
            _ => None,
        })
    }

    fn b(&self, v: VertexId, i: u32) -> Result<bool, OracleError> {
        let out = self.f2_out(v, i)?.is_some();
        let inn = self.f2_in(v, i)?.is_some();
        Ok(match (out, inn) {
            (true, true) => self.bits.coin(self.oracle.index_of(v), i),
            (false, true) => true,
            _ => false,
        })
    }

    /// Mate of `v` after iteration `i`, or `None` if still unmatched.
    pub fn partner(&self, v: VertexId, i: u32) -> Result<Option<VertexId>, OracleError> {
        self.bump(|c| c.state_calls += 1);
        if i == 0 {
            return Ok(None);
        }
        if let Some(&p) = self.memo.borrow().partner.get(&(v, i)) {
            return Ok(p);
        }
        self.bump(|c| c.state_evals += 1);
        let p = self.partner_uncached(v, i)?;
        self.memo.borrow_mut().partner.insert((v, i), p);
        Ok(p)
    }

    fn partner_uncached(&self, v: VertexId, i: u32) -> Result<Option<VertexId>, OracleError> {
        if let Some(p) = self.partner(v, i - 1)? {
            return Ok(Some(p));
        }
        if let Some(t) = self.f2_out(v, i)? {
            if !self.b(v, i)? && self.b(t, i)? {
                return Ok(Some(t));
            }
        }
        if let Some(s) = self.f2_in(v, i)? {
            if !self.b(s, i)? && self.b(v, i)? {
                return Ok(Some(s));
            }
        }
        Ok(None)
    }

    pub fn phase1(&self, v: VertexId) -> Result<Option<VertexId>, OracleError> {
        self.partner(v, self.params.iterations)
    }

    /// Mate of `v` in the ascending-edge greedy matching of its residual component.
    fn residual_partner(&self, v: VertexId) -> Result<Option<VertexId>, LcaError> {
        if let Some(&p) = self.memo.borrow().residual.get(&v) {
            return Ok(p);
        }
        let residual = InducedView::new(&self.oracle, |u| Ok(self.phase1(u)?.is_none()));
        let cap = self.params.component_cap;
        let mut component: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        let mut frontier = BTreeSet::from([v]);
        while let Some(u) = frontier.pop_first() {
            if component.len() as u64 >= cap {
                return Err(LcaError::ComponentTooLarge {
                    seen: component.len() as u64 + 1 + frontier.len() as u64,
                    cap,
                });
            }
            let nbrs = residual.neighbors(u)?;
            self.bump(|c| c.phase2_visited += 1);
            for &w in &nbrs {
                if !component.contains_key(&w) {
                    frontier.insert(w);
                }
            }
            component.insert(u, nbrs);
        }
        let mut mate: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        for (&u, nbrs) in &component {
            if mate.contains_key(&u) {
                continue;
            }
            if let Some(&w) = nbrs.iter().find(|&&w| w > u && !mate.contains_key(&w)) {
                mate.insert(u, w);
                mate.insert(w, u);
            }
        }
        if self.scope == MemoScope::Shared {
            let mut memo = self.memo.borrow_mut();
            for &u in component.keys() {
                memo.residual.insert(u, mate.get(&u).copied());
            }
        }
        Ok(mate.get(&v).copied())
    }

    /// Whether edge `e` is in the matching.
    pub fn query(&self, e: EdgeId) -> Result<bool, LcaError> {
        if self.scope == MemoScope::PerQuery {
            self.reset();
        }
        let (lo, hi) = e.endpoints();
        if self.oracle.neighbors(lo)?.binary_search(&hi).is_err() {
            return Err(OracleError::NotAnEdge(e.to_string()).into());
        }
        match (self.phase1(lo)?, self.phase1(hi)?) {
            (Some(p), _) => Ok(p == hi),
            (None, Some(_)) => Ok(false),
            (None, None) => Ok(self.residual_partner(lo)? == Some(hi)),
        }
    }

    pub fn query_with_stats(&self, e: EdgeId) -> (Result<bool, LcaError>, MmQueryStats) {
        let tally = self.oracle.tally();
        let before = self.counters.get();
        let start = Instant::now();
        let answer = self.query(e);
        let after = self.counters.get();
        let stats = MmQueryStats {
            tally: self.oracle.tally() - tally,
            calls: MmCounters {
                state_calls: after.state_calls - before.state_calls,
                state_evals: after.state_evals - before.state_evals,
                phase2_visited: after.phase2_visited - before.phase2_visited,
            },
            wall: start.elapsed(),
        };
        (answer, stats)
    }
}
