use std::cell::{Cell, RefCell};
use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;
use std::time::{Duration, Instant};

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::params::{MisParams, SelectionBits};
use super::TriState;
use crate::error::LcaError;
use crate::graph::{InducedView, Oracle, OracleError, QueryTally};
use crate::pseudorandom::SeedBundle;

/// Lifetime of the memo tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MemoScope {
    /// Cleared at every top-level query; oracle counts reflect one query in isolation.
    PerQuery,
    /// Kept across queries. Answers are unchanged; later queries reuse earlier work.
    Shared,
}

/// Recursion counters of the local simulation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallCounters {
    pub iteration_calls: u64,
    pub iteration_evals: u64,
    pub stage_calls: u64,
    pub stage_evals: u64,
    pub coin_evals: u64,
    pub phase2_visited: u64,
}

impl CallCounters {
    fn minus(self, earlier: CallCounters) -> CallCounters {
        CallCounters {
            iteration_calls: self.iteration_calls - earlier.iteration_calls,
            iteration_evals: self.iteration_evals - earlier.iteration_evals,
            stage_calls: self.stage_calls - earlier.stage_calls,
            stage_evals: self.stage_evals - earlier.stage_evals,
            coin_evals: self.coin_evals - earlier.coin_evals,
            phase2_visited: self.phase2_visited - earlier.phase2_visited,
        }
    }
}

/// Cost of one top-level query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryStats {
    pub tally: QueryTally,
    pub calls: CallCounters,
    pub wall: Duration,
}

impl QueryStats {
    /// Stats with the wall-clock time dropped, for reproducibility checks.
    pub fn deterministic(&self) -> (QueryTally, CallCounters) {
        (self.tally, self.calls)
    }
}

struct Memo<V> {
    iteration: FxHashMap<(V, u32), TriState>,
    stage: FxHashMap<(V, u32, u32), TriState>,
    view: FxHashMap<(V, u32), Rc<[V]>>,
    coin: FxHashMap<(V, u32, u32), bool>,
    phase2: FxHashMap<V, bool>,
}

impl<V> Default for Memo<V> {
    fn default() -> Self {
        Memo {
            iteration: FxHashMap::default(),
            stage: FxHashMap::default(),
            view: FxHashMap::default(),
            coin: FxHashMap::default(),
            phase2: FxHashMap::default(),
        }
    }
}

/// The two-phase MIS LCA over an oracle.
///
/// `stage` and `iteration` simulate one stage / one iteration of Weak-MIS
/// around a vertex; `phase1` runs all iterations; `query` adds the Phase-2
/// component search.
pub struct WeakMisLca<O: Oracle> {
    oracle: O,
    params: MisParams,
    bits: SelectionBits,
    scope: MemoScope,
    memo: RefCell<Memo<O::Vertex>>,
    counters: Cell<CallCounters>,
}

impl<O: Oracle> WeakMisLca<O> {
    pub fn new(oracle: O, params: MisParams, seed: &SeedBundle, scope: MemoScope) -> Result<Self, LcaError> {
        let bits = SelectionBits::new(&params, oracle.index_space(), seed)?;
        Ok(Self::with_bits(oracle, params, bits, scope))
    }

    pub fn with_bits(oracle: O, params: MisParams, bits: SelectionBits, scope: MemoScope) -> Self {
        WeakMisLca {
            oracle,
            params,
            bits,
            scope,
            memo: RefCell::new(Memo::default()),
            counters: Cell::new(CallCounters::default()),
        }
    }

    pub fn params(&self) -> &MisParams {
        &self.params
    }

    pub fn bits(&self) -> &SelectionBits {
        &self.bits
    }

    pub fn oracle(&self) -> &O {
        &self.oracle
    }

    pub fn counters(&self) -> CallCounters {
        self.counters.get()
    }

    /// Drops all memoized state.
    pub fn reset(&self) {
        *self.memo.borrow_mut() = Memo::default();
    }

    fn bump(&self, f: impl FnOnce(&mut CallCounters)) {
        let mut c = self.counters.get();
        f(&mut c);
        self.counters.set(c);
    }

    fn coin(&self, v: O::Vertex, i: u32, j: u32) -> bool {
        if let Some(&b) = self.memo.borrow().coin.get(&(v, i, j)) {
            return b;
        }
        self.bump(|c| c.coin_evals += 1);
        let b = self.bits.selected(&self.params, self.oracle.index_of(v), i, j);
        self.memo.borrow_mut().coin.insert((v, i, j), b);
        b
    }

    /// Neighbors of `v` in `G'` of iteration `i` (active after iteration `i-1`),
    /// in base order.
    fn view_neighbors(&self, v: O::Vertex, i: u32) -> Result<Rc<[O::Vertex]>, OracleError> {
        if let Some(list) = self.memo.borrow().view.get(&(v, i)) {
            return Ok(list.clone());
        }
        let mut list = Vec::new();
        for u in self.oracle.neighbors(v)? {
            if self.iteration(u, i - 1)? == TriState::Bottom {
                list.push(u);
            }
        }
        let list: Rc<[O::Vertex]> = list.into();
        self.memo.borrow_mut().view.insert((v, i), list.clone());
        Ok(list)
    }

    /// State of `v` at the end of stage `j` of iteration `i`; `v` must be in `G'`
    /// of iteration `i`.
    pub fn stage(&self, v: O::Vertex, i: u32, j: u32) -> Result<TriState, OracleError> {
        self.bump(|c| c.stage_calls += 1);
        if j == 0 {
            return Ok(TriState::Bottom);
        }
        if let Some(&s) = self.memo.borrow().stage.get(&(v, i, j)) {
            return Ok(s);
        }
        self.bump(|c| c.stage_evals += 1);
        let s = self.stage_uncached(v, i, j)?;
        self.memo.borrow_mut().stage.insert((v, i, j), s);
        Ok(s)
    }

    /// `None` = removed before stage `j`, otherwise whether the vertex selects itself.
    fn status(&self, u: O::Vertex, i: u32, j: u32) -> Result<Option<bool>, OracleError> {
        if self.stage(u, i, j - 1)? != TriState::Bottom {
            return Ok(None);
        }
        Ok(Some(self.coin(u, i, j)))
    }

    fn stage_uncached(&self, v: O::Vertex, i: u32, j: u32) -> Result<TriState, OracleError> {
        let prev = self.stage(v, i, j - 1)?;
        if prev != TriState::Bottom {
            return Ok(prev);
        }
        let v_selected = self.coin(v, i, j);
        let neighbors = self.view_neighbors(v, i)?;
        let mut statuses = Vec::with_capacity(neighbors.len());
        for &u in neighbors.iter() {
            statuses.push(self.status(u, i, j)?);
        }
        let any_neighbor_selected = statuses.contains(&Some(true));
        if v_selected && !any_neighbor_selected {
            return Ok(TriState::Yes);
        }
        if !v_selected {
            for (&u, &s) in neighbors.iter().zip(&statuses) {
                if s != Some(true) {
                    continue;
                }
                let mut alone = true;
                for &w in self.view_neighbors(u, i)?.iter() {
                    if self.status(w, i, j)? == Some(true) {
                        alone = false;
                        break;
                    }
                }
                if alone {
                    return Ok(TriState::No);
                }
            }
        }
        let live = statuses.iter().filter(|s| s.is_some()).count();
        if self.params.is_high_degree(live, j) {
            return Ok(TriState::No);
        }
        Ok(TriState::Bottom)
    }

    /// State of `v` at the end of iteration `i`.
    pub fn iteration(&self, v: O::Vertex, i: u32) -> Result<TriState, OracleError> {
        self.bump(|c| c.iteration_calls += 1);
        if i == 0 {
            return Ok(TriState::Bottom);
        }
        if self.params.d == 0 {
            return Ok(TriState::Yes);
        }
        if let Some(&s) = self.memo.borrow().iteration.get(&(v, i)) {
            return Ok(s);
        }
        self.bump(|c| c.iteration_evals += 1);
        let s = self.iteration_uncached(v, i)?;
        self.memo.borrow_mut().iteration.insert((v, i), s);
        Ok(s)
    }

    fn iteration_uncached(&self, v: O::Vertex, i: u32) -> Result<TriState, OracleError> {
        let prev = self.iteration(v, i - 1)?;
        if prev != TriState::Bottom {
            return Ok(prev);
        }
        let last = self.params.stages;
        if self.stage(v, i, last)? != TriState::No {
            return Ok(TriState::Yes);
        }
        for &u in self.view_neighbors(v, i)?.iter() {
            if self.stage(u, i, last)? != TriState::No {
                return Ok(TriState::No);
            }
        }
        Ok(TriState::Bottom)
    }

    pub fn phase1(&self, v: O::Vertex) -> Result<TriState, OracleError> {
        self.iteration(v, self.params.iterations)
    }

    /// Phase 2 on `G''`: explore the active component of `v` in ascending-ID
    /// order and answer membership in its lexicographically-first MIS.
    pub fn phase2(&self, v: O::Vertex) -> Result<bool, LcaError> {
        if let Some(&b) = self.memo.borrow().phase2.get(&v) {
            return Ok(b);
        }
        let residual = InducedView::new(&self.oracle, |u| Ok(self.phase1(u)? == TriState::Bottom));
        let cap = self.params.component_cap;
        let mut component: BTreeMap<O::Vertex, Vec<O::Vertex>> = BTreeMap::new();
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
        let mut chosen: BTreeSet<O::Vertex> = BTreeSet::new();
        for (&u, nbrs) in &component {
            if nbrs.iter().all(|w| !chosen.contains(w)) {
                chosen.insert(u);
            }
        }
        let answer = chosen.contains(&v);
        if self.scope == MemoScope::Shared {
            let mut memo = self.memo.borrow_mut();
            for &u in component.keys() {
                memo.phase2.insert(u, chosen.contains(&u));
            }
        }
        Ok(answer)
    }

    /// Whether `v` is in the MIS.
    pub fn query(&self, v: O::Vertex) -> Result<bool, LcaError> {
        if self.scope == MemoScope::PerQuery {
            self.reset();
        }
        match self.phase1(v)? {
            TriState::Yes => Ok(true),
            TriState::No => Ok(false),
            TriState::Bottom => self.phase2(v),
        }
    }

    /// [`Self::query`] plus the oracle traffic and recursion it caused.
    pub fn query_with_stats(&self, v: O::Vertex) -> (Result<bool, LcaError>, QueryStats) {
        let tally = self.oracle.tally();
        let calls = self.counters.get();
        let start = Instant::now();
        let answer = self.query(v);
        let stats = QueryStats {
            tally: self.oracle.tally() - tally,
            calls: self.counters.get().minus(calls),
            wall: start.elapsed(),
        };
        (answer, stats)
    }
}
