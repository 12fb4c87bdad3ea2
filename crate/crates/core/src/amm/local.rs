//! Local recursion for membership in the phase matchings `M_1, ..., M_k`.
//!
//! Four memoized units call each other:
//!
//! * `mate(v, i)`: partner of `v` in `M_i`;
//! * `paths_at(x, i)`: level-`i` augmenting paths w.r.t. `M_{i-1}` through `x`;
//! * `in_a(p)`: whether `p` is in the greedy MIS `A_i` of the path graph `H_i`;
//! * `in_matching(e, i)`, the top-level question.
//!
//! Each evaluation costs one call plus the costs of the units it consults, and a
//! memo hit is charged the full cost it had when first computed. Costs are thus
//! pure functions of the instance and the ordering, independent of memo state.

use std::cell::{Cell, RefCell};
use std::rc::Rc;
use std::time::{Duration, Instant};

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use super::path::{AugPath, PathKeys, PathOrdering};
use crate::error::LcaError;
use crate::graph::{EdgeId, Oracle, OracleError, QueryTally, VertexId};
use crate::weak_mis::MemoScope;

const STACK_RED_ZONE: usize = 128 * 1024;
const STACK_GROWTH: usize = 8 * 1024 * 1024;

/// Answer of a budgeted membership query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AmmOutcome {
    Yes,
    No,
    Truncated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmmResult {
    pub outcome: AmmOutcome,
    /// Calls charged, counting the root; on truncation, the count at which the budget was exceeded.
    pub calls: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmmCounters {
    pub mate_evals: u64,
    pub path_enumerations: u64,
    pub membership_evals: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmmQueryStats {
    pub tally: QueryTally,
    pub calls: u64,
    pub evals: AmmCounters,
    #[serde(skip)]
    pub wall: Duration,
}

enum Stop {
    Truncated,
    Oracle(OracleError),
}

impl From<OracleError> for Stop {
    fn from(e: OracleError) -> Self {
        Stop::Oracle(e)
    }
}

struct Budget {
    counter: u64,
    limit: u64,
}

impl Budget {
    fn charge(&mut self, cost: u64) -> Result<(), Stop> {
        self.counter = self.counter.saturating_add(cost);
        if self.counter > self.limit {
            Err(Stop::Truncated)
        } else {
            Ok(())
        }
    }
}

type Paths = Rc<[AugPath]>;

#[derive(Default)]
struct Memo {
    mate: FxHashMap<(VertexId, u32), (Option<VertexId>, u64)>,
    paths: FxHashMap<(VertexId, u32), (Paths, u64)>,
    in_a: FxHashMap<u128, (bool, u64)>,
}

/// Budgeted local evaluation of `M_k` membership under a fixed path ordering.
pub struct AmmEngine<'a, O: Oracle<Vertex = VertexId>> {
    oracle: O,
    ordering: &'a PathOrdering,
    keys: PathKeys<'a>,
    scope: MemoScope,
    memo: RefCell<Memo>,
    counters: Cell<AmmCounters>,
}

impl<'a, O: Oracle<Vertex = VertexId>> AmmEngine<'a, O> {
    pub fn new(oracle: O, ordering: &'a PathOrdering, scope: MemoScope) -> Self {
        AmmEngine {
            oracle,
            ordering,
            keys: PathKeys::new(ordering),
            scope,
            memo: RefCell::new(Memo::default()),
            counters: Cell::new(AmmCounters::default()),
        }
    }

    pub fn oracle(&self) -> &O {
        &self.oracle
    }

    pub fn ordering(&self) -> &'a PathOrdering {
        self.ordering
    }

    pub fn k(&self) -> u32 {
        self.ordering.k()
    }

    pub fn counters(&self) -> AmmCounters {
        self.counters.get()
    }

    pub fn reset(&self) {
        *self.memo.borrow_mut() = Memo::default();
    }

    fn begin(&self) {
        if self.scope == MemoScope::PerQuery {
            self.reset();
        }
    }

    fn bump(&self, f: impl FnOnce(&mut AmmCounters)) {
        let mut c = self.counters.get();
        f(&mut c);
        self.counters.set(c);
    }

    fn check_level(&self, i: u32) -> Result<(), LcaError> {
        if i > self.k() {
            return Err(LcaError::InvalidParameter {
                field: "level",
                reason: format!("level {i} exceeds the ordering's k = {}", self.k()),
            });
        }
        Ok(())
    }

    fn finish<T>(result: Result<T, Stop>, budget: &Budget, wrap: impl FnOnce(T) -> AmmOutcome) -> Result<AmmResult, LcaError> {
        match result {
            Ok(x) => Ok(AmmResult {
                outcome: wrap(x),
                calls: budget.counter,
            }),
            Err(Stop::Truncated) => Ok(AmmResult {
                outcome: AmmOutcome::Truncated,
                calls: budget.counter,
            }),
            Err(Stop::Oracle(e)) => Err(e.into()),
        }
    }

    fn yes_no(b: bool) -> AmmOutcome {
        if b {
            AmmOutcome::Yes
        } else {
            AmmOutcome::No
        }
    }

    /// Whether `e` is in `M_i`, giving up once more than `budget` calls are charged.
    pub fn in_matching(&self, e: EdgeId, i: u32, budget: Option<u64>) -> Result<AmmResult, LcaError> {
        self.check_level(i)?;
        self.begin();
        let (lo, hi) = e.endpoints();
        if self.oracle.neighbors(lo)?.binary_search(&hi).is_err() {
            return Err(OracleError::NotAnEdge(e.to_string()).into());
        }
        let mut b = Budget {
            counter: 0,
            limit: budget.unwrap_or(u64::MAX),
        };
        let result = self.edge_unit(e, i, &mut b);
        Self::finish(result.map(|(x, _)| x), &b, Self::yes_no)
    }

    /// The level-`i` augmenting paths w.r.t. `M_{i-1}` containing `x`, ascending by encoding.
    pub fn paths_through(&self, x: VertexId, i: u32, budget: Option<u64>) -> Result<Option<Vec<AugPath>>, LcaError> {
        self.check_level(i)?;
        if i == 0 {
            return Ok(Some(Vec::new()));
        }
        self.begin();
        let mut b = Budget {
            counter: 0,
            limit: budget.unwrap_or(u64::MAX),
        };
        match self.paths_at(x, i, &mut b) {
            Ok((paths, _)) => Ok(Some(paths.to_vec())),
            Err(Stop::Truncated) => Ok(None),
            Err(Stop::Oracle(e)) => Err(e.into()),
        }
    }

    /// Level-`i` augmenting paths containing the edge `e`.
    pub fn paths_through_edge(&self, e: EdgeId, i: u32, budget: Option<u64>) -> Result<Option<Vec<AugPath>>, LcaError> {
        Ok(self.paths_through(e.lo(), i, budget)?.map(|paths| {
            paths
                .into_iter()
                .filter(|p| p.edges().any(|f| f == e))
                .collect()
        }))
    }

    /// Membership of a level-`i` augmenting path in `A_i`.
    pub fn path_in_a(&self, p: &AugPath, budget: Option<u64>) -> Result<AmmResult, LcaError> {
        self.check_level(p.level())?;
        self.begin();
        let mut b = Budget {
            counter: 0,
            limit: budget.unwrap_or(u64::MAX),
        };
        let result = self.in_a(p, &mut b);
        Self::finish(result.map(|(x, _)| x), &b, Self::yes_no)
    }

    pub fn query_with_stats(&self, e: EdgeId, budget: Option<u64>) -> (Result<AmmResult, LcaError>, AmmQueryStats) {
        let tally = self.oracle.tally();
        let before = self.counters.get();
        let start = Instant::now();
        let result = self.in_matching(e, self.k(), budget);
        let after = self.counters.get();
        let stats = AmmQueryStats {
            tally: self.oracle.tally() - tally,
            calls: result.as_ref().map(|r| r.calls).unwrap_or(0),
            evals: AmmCounters {
                mate_evals: after.mate_evals - before.mate_evals,
                path_enumerations: after.path_enumerations - before.path_enumerations,
                membership_evals: after.membership_evals - before.membership_evals,
            },
            wall: start.elapsed(),
        };
        (result, stats)
    }

    fn edge_unit(&self, e: EdgeId, i: u32, b: &mut Budget) -> Result<(bool, u64), Stop> {
        b.charge(1)?;
        if i == 0 {
            return Ok((false, 1));
        }
        let (mate, cost) = self.mate(e.lo(), i, b)?;
        Ok((mate == Some(e.hi()), cost.saturating_add(1)))
    }

    fn mate(&self, v: VertexId, i: u32, b: &mut Budget) -> Result<(Option<VertexId>, u64), Stop> {
        if let Some(&(m, cost)) = self.memo.borrow().mate.get(&(v, i)) {
            b.charge(cost)?;
            return Ok((m, cost));
        }
        b.charge(1)?;
        let (m, cost) = if i == 0 {
            (None, 1)
        } else {
            stacker::maybe_grow(STACK_RED_ZONE, STACK_GROWTH, || self.mate_eval(v, i, b))?
        };
        self.bump(|c| c.mate_evals += 1);
        self.memo.borrow_mut().mate.insert((v, i), (m, cost));
        Ok((m, cost))
    }

    fn mate_eval(&self, v: VertexId, i: u32, b: &mut Budget) -> Result<(Option<VertexId>, u64), Stop> {
        let mut cost = 1u64;
        let (previous, c) = self.mate(v, i - 1, b)?;
        cost = cost.saturating_add(c);
        let (paths, c) = self.paths_at(v, i, b)?;
        cost = cost.saturating_add(c);
        for p in paths.iter() {
            let (chosen, c) = self.in_a(p, b)?;
            cost = cost.saturating_add(c);
            if chosen {
                return Ok((p.flipped_partner(v), cost));
            }
        }
        Ok((previous, cost))
    }

    fn paths_at(&self, x: VertexId, i: u32, b: &mut Budget) -> Result<(Paths, u64), Stop> {
        if let Some((paths, cost)) = self.memo.borrow().paths.get(&(x, i)) {
            b.charge(*cost)?;
            return Ok((paths.clone(), *cost));
        }
        b.charge(1)?;
        let mut search = PathSearch {
            engine: self,
            level: i,
            mates: FxHashMap::default(),
            neighbors: FxHashMap::default(),
            cost: 1,
            found: Vec::new(),
        };
        let mut seq = std::collections::VecDeque::with_capacity(2 * i as usize);
        for q in 0..2 * i as usize {
            seq.clear();
            seq.push_back(x);
            search.extend(&mut seq, q, q, b)?;
        }
        let PathSearch { mut found, cost, .. } = search;
        found.sort_unstable();
        found.dedup();
        let paths: Paths = found.into();
        self.bump(|c| c.path_enumerations += 1);
        self.memo.borrow_mut().paths.insert((x, i), (paths.clone(), cost));
        Ok((paths, cost))
    }

    fn in_a(&self, p: &AugPath, b: &mut Budget) -> Result<(bool, u64), Stop> {
        if let Some(&(answer, cost)) = self.memo.borrow().in_a.get(&p.code()) {
            b.charge(cost)?;
            return Ok((answer, cost));
        }
        b.charge(1)?;
        let (answer, cost) = stacker::maybe_grow(STACK_RED_ZONE, STACK_GROWTH, || self.in_a_eval(p, b))?;
        self.bump(|c| c.membership_evals += 1);
        self.memo.borrow_mut().in_a.insert(p.code(), (answer, cost));
        Ok((answer, cost))
    }

    fn in_a_eval(&self, p: &AugPath, b: &mut Budget) -> Result<(bool, u64), Stop> {
        let mut cost = 1u64;
        let own = self.keys.key(p);
        let mut seen = FxHashSet::default();
        let mut earlier = Vec::new();
        for &x in p.vertices() {
            let (paths, c) = self.paths_at(x, p.level(), b)?;
            cost = cost.saturating_add(c);
            for q in paths.iter() {
                if q != p && seen.insert(q.code()) {
                    let key = self.keys.key(q);
                    if key < own {
                        earlier.push((key, q.clone()));
                    }
                }
            }
        }
        earlier.sort_unstable_by_key(|(key, _)| *key);
        for (_, q) in &earlier {
            let (chosen, c) = self.in_a(q, b)?;
            cost = cost.saturating_add(c);
            if chosen {
                return Ok((false, cost));
            }
        }
        Ok((true, cost))
    }
}

/// Depth-first enumeration of the alternating paths through one anchor vertex.
///
/// The anchor sits at position `q`; the sequence grows leftwards to position 0
/// and then rightwards to position `2i - 1`. The edge between positions `t` and
/// `t + 1` must be unmatched for even `t` and matched for odd `t`.
struct PathSearch<'e, 'a, O: Oracle<Vertex = VertexId>> {
    engine: &'e AmmEngine<'a, O>,
    level: u32,
    mates: FxHashMap<VertexId, Option<VertexId>>,
    neighbors: FxHashMap<VertexId, Rc<[VertexId]>>,
    cost: u64,
    found: Vec<AugPath>,
}

impl<O: Oracle<Vertex = VertexId>> PathSearch<'_, '_, O> {
    fn mate(&mut self, v: VertexId, b: &mut Budget) -> Result<Option<VertexId>, Stop> {
        if let Some(&m) = self.mates.get(&v) {
            return Ok(m);
        }
        let (m, c) = self.engine.mate(v, self.level - 1, b)?;
        self.cost = self.cost.saturating_add(c);
        self.mates.insert(v, m);
        Ok(m)
    }

    fn neighbors(&mut self, v: VertexId) -> Result<Rc<[VertexId]>, Stop> {
        if let Some(list) = self.neighbors.get(&v) {
            return Ok(list.clone());
        }
        let list: Rc<[VertexId]> = self.engine.oracle.neighbors(v)?.into();
        self.neighbors.insert(v, list.clone());
        Ok(list)
    }

    /// Candidates for the vertex adjacent to `from` across the edge whose lower
    /// position is `t`.
    fn step(&mut self, from: VertexId, t: usize, b: &mut Budget) -> Result<Vec<VertexId>, Stop> {
        let mate = self.mate(from, b)?;
        if t % 2 == 1 {
            return Ok(mate.into_iter().collect());
        }
        Ok(self
            .neighbors(from)?
            .iter()
            .copied()
            .filter(|&u| Some(u) != mate)
            .collect())
    }

    fn placeable(&mut self, u: VertexId, pos: usize, seq: &std::collections::VecDeque<VertexId>, b: &mut Budget) -> Result<bool, Stop> {
        if seq.contains(&u) {
            return Ok(false);
        }
        let last = 2 * self.level as usize - 1;
        if pos == 0 || pos == last {
            return Ok(self.mate(u, b)?.is_none());
        }
        Ok(true)
    }

    fn extend(&mut self, seq: &mut std::collections::VecDeque<VertexId>, lo: usize, hi: usize, b: &mut Budget) -> Result<(), Stop> {
        let last = 2 * self.level as usize - 1;
        if lo == hi && (lo == 0 || lo == last) {
            let anchor = seq[0];
            if self.mate(anchor, b)?.is_some() {
                return Ok(());
            }
        }
        if lo > 0 {
            let from = *seq.front().expect("non-empty");
            for u in self.step(from, lo - 1, b)? {
                if self.placeable(u, lo - 1, seq, b)? {
                    seq.push_front(u);
                    self.extend(seq, lo - 1, hi, b)?;
                    seq.pop_front();
                }
            }
        } else if hi < last {
            let from = *seq.back().expect("non-empty");
            for u in self.step(from, hi, b)? {
                if self.placeable(u, hi + 1, seq, b)? {
                    seq.push_back(u);
                    self.extend(seq, 0, hi + 1, b)?;
                    seq.pop_back();
                }
            }
        } else {
            let sequence: Vec<VertexId> = seq.iter().copied().collect();
            self.found
                .push(AugPath::new(self.level, &sequence, self.engine.ordering.n()));
        }
        Ok(())
    }
}

/// Phase 2 of the approximate-matching LCA: membership in `M_k` under the
/// budget chosen by Phase 1, with truncation answered as NO.
pub struct AmmLca<'a, O: Oracle<Vertex = VertexId>> {
    engine: AmmEngine<'a, O>,
    ell: u64,
}

impl<'a, O: Oracle<Vertex = VertexId>> AmmLca<'a, O> {
    pub fn new(oracle: O, ordering: &'a PathOrdering, ell: u64, scope: MemoScope) -> Self {
        AmmLca {
            engine: AmmEngine::new(oracle, ordering, scope),
            ell,
        }
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn engine(&self) -> &AmmEngine<'a, O> {
        &self.engine
    }

    pub fn simulate(&self, e: EdgeId) -> Result<AmmResult, LcaError> {
        self.engine.in_matching(e, self.engine.k(), Some(self.ell))
    }

    pub fn query(&self, e: EdgeId) -> Result<bool, LcaError> {
        Ok(self.simulate(e)?.outcome == AmmOutcome::Yes)
    }

    pub fn query_with_stats(&self, e: EdgeId) -> (Result<bool, LcaError>, AmmQueryStats) {
        let (result, stats) = self.engine.query_with_stats(e, Some(self.ell));
        (result.map(|r| r.outcome == AmmOutcome::Yes), stats)
    }
}
