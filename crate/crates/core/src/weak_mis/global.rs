use serde::{Deserialize, Serialize};

use super::params::{MisParams, SelectionBits};
use super::TriState;
use crate::graph::{GraphStore, VertexId};

/// What happened to a vertex that was still in `G'` when a stage began.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StageOutcome {
    /// It was the only selected vertex in its closed neighborhood.
    InSet,
    /// A neighbor joined the independent set.
    NeighborInSet,
    /// Removed for having degree at least `d/2^j`.
    HighDegree,
    /// Still in `G'`.
    Remains,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub outcome: StageOutcome,
    /// Whether the vertex was in `V_j` at the start of the stage.
    pub in_v_j: bool,
}

/// Complete execution of the global Weak-MIS routine.
#[derive(Clone, Debug)]
pub struct WeakMisTrace {
    params: MisParams,
    /// `iteration[i][v]` for `i in 0..=iterations`.
    iteration: Vec<Vec<TriState>>,
    /// `stage[i-1][j][v]` for `j in 0..=stages`; `None` if `v` is not in `G'` in iteration `i`.
    stage: Vec<Vec<Vec<Option<TriState>>>>,
    /// `records[i-1][j-1][v]`; `None` if `v` left `G'` before stage `j`.
    records: Vec<Vec<Vec<Option<StageRecord>>>>,
}

impl WeakMisTrace {
    pub fn params(&self) -> &MisParams {
        &self.params
    }

    pub fn iteration_state(&self, v: VertexId, i: u32) -> TriState {
        self.iteration[i as usize][v.index()]
    }

    /// Stage-level state, defined only for vertices active when iteration `i` began.
    pub fn stage_state(&self, v: VertexId, i: u32, j: u32) -> Option<TriState> {
        self.stage[i as usize - 1][j as usize][v.index()]
    }

    pub fn record(&self, v: VertexId, i: u32, j: u32) -> Option<StageRecord> {
        self.records[i as usize - 1][j as usize - 1][v.index()]
    }

    /// States after the last iteration.
    pub fn final_states(&self) -> &[TriState] {
        self.iteration.last().expect("at least iteration 0")
    }

    /// The independent set built by Phase 1.
    pub fn independent_set(&self) -> Vec<VertexId> {
        self.select(TriState::Yes)
    }

    /// Vertices still active after the last iteration (the vertex set of `G''`).
    pub fn active(&self) -> Vec<VertexId> {
        self.select(TriState::Bottom)
    }

    fn select(&self, state: TriState) -> Vec<VertexId> {
        self.final_states()
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == state)
            .map(|(idx, _)| VertexId::new(idx as u32 + 1))
            .collect()
    }

    /// `(events, still_active)` over all `(vertex, stage)` pairs with the vertex in `V_j`.
    pub fn high_degree_events(&self) -> (u64, u64) {
        let mut events = 0;
        let mut active = 0;
        for rec in self.records.iter().flatten().flatten().flatten() {
            if rec.in_v_j {
                events += 1;
                if matches!(rec.outcome, StageOutcome::HighDegree | StageOutcome::Remains) {
                    active += 1;
                }
            }
        }
        (events, active)
    }
}

/// Runs Weak-MIS over the whole graph with coins from `bits`.
pub fn global_weak_mis(g: &GraphStore, params: &MisParams, bits: &SelectionBits) -> WeakMisTrace {
    let n = g.n();
    let iterations = params.iterations;
    let stages = params.stages;
    let mut iteration = vec![vec![TriState::Bottom; n]];
    let mut stage_all = Vec::with_capacity(iterations as usize);
    let mut records_all = Vec::with_capacity(iterations as usize);

    if params.d == 0 {
        // Every vertex is isolated; all join at once.
        let none = vec![vec![None; n]; stages as usize + 1];
        for _ in 0..iterations {
            iteration.push(vec![TriState::Yes; n]);
            stage_all.push(none.clone());
            records_all.push(vec![vec![None; n]; stages as usize]);
        }
        return WeakMisTrace {
            params: params.clone(),
            iteration,
            stage: stage_all,
            records: records_all,
        };
    }

    for i in 1..=iterations {
        let prev = iteration.last().unwrap().clone();
        let in_g_prime: Vec<bool> = prev.iter().map(|&s| s == TriState::Bottom).collect();
        let mut stage: Vec<Vec<Option<TriState>>> = Vec::with_capacity(stages as usize + 1);
        stage.push(
            in_g_prime
                .iter()
                .map(|&a| a.then_some(TriState::Bottom))
                .collect(),
        );
        let mut records = Vec::with_capacity(stages as usize);
        for j in 1..=stages {
            let before = stage.last().unwrap();
            let alive: Vec<bool> = before.iter().map(|&s| s == Some(TriState::Bottom)).collect();
            let selected: Vec<bool> = g
                .vertices()
                .map(|v| alive[v.index()] && bits.selected(params, v.get() as u64, i, j))
                .collect();
            let joins: Vec<bool> = g
                .vertices()
                .map(|v| selected[v.index()] && g.neighbors(v).iter().all(|u| !selected[u.index()]))
                .collect();
            let mut next = before.clone();
            let mut rec = vec![None; n];
            for v in g.vertices() {
                if !alive[v.index()] {
                    continue;
                }
                let live_degree = g.neighbors(v).iter().filter(|u| alive[u.index()]).count();
                let in_v_j = params.is_high_degree(live_degree, j);
                let outcome = if joins[v.index()] {
                    StageOutcome::InSet
                } else if g.neighbors(v).iter().any(|u| joins[u.index()]) {
                    StageOutcome::NeighborInSet
                } else if in_v_j {
                    StageOutcome::HighDegree
                } else {
                    StageOutcome::Remains
                };
                next[v.index()] = Some(match outcome {
                    StageOutcome::InSet => TriState::Yes,
                    StageOutcome::NeighborInSet | StageOutcome::HighDegree => TriState::No,
                    StageOutcome::Remains => TriState::Bottom,
                });
                rec[v.index()] = Some(StageRecord { outcome, in_v_j });
            }
            stage.push(next);
            records.push(rec);
        }
        let last = stage.last().unwrap();
        let joined = |u: VertexId| matches!(last[u.index()], Some(s) if s != TriState::No);
        let mut states = prev.clone();
        for v in g.vertices() {
            if !in_g_prime[v.index()] {
                continue;
            }
            states[v.index()] = if joined(v) {
                TriState::Yes
            } else if g.neighbors(v).iter().any(|&u| joined(u)) {
                TriState::No
            } else {
                TriState::Bottom
            };
        }
        iteration.push(states);
        stage_all.push(stage);
        records_all.push(records);
    }
    WeakMisTrace {
        params: params.clone(),
        iteration,
        stage: stage_all,
        records: records_all,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_graph, GenKind};
    use crate::pseudorandom::{MasterSeed, SeedBundle};

    fn run(g: &GraphStore, seed: u64) -> WeakMisTrace {
        let params = MisParams::new(g.n(), g.d(), 4.0).unwrap();
        let bits = SelectionBits::new(&params, g.n() as u64, &SeedBundle::new(MasterSeed::from_u64(seed))).unwrap();
        global_weak_mis(g, &params, &bits)
    }

    #[test]
    fn edgeless_graph_is_all_in() {
        let g = GraphStore::from_edges(6, 3, std::iter::empty()).unwrap();
        let t = run(&g, 1);
        assert_eq!(t.independent_set().len(), 6);
        let g0 = GraphStore::from_edges(4, 0, std::iter::empty()).unwrap();
        assert_eq!(run(&g0, 1).independent_set().len(), 4);
    }

    #[test]
    fn output_is_independent_and_dominates_inactive() {
        for seed in 0..10 {
            let g = gen_graph(&GenKind::GnpCapped { n: 150, p: 0.04, d: 8 }, seed).unwrap();
            let t = run(&g, seed);
            let states = t.final_states();
            for e in g.edges() {
                let (a, b) = (states[e.lo().index()], states[e.hi().index()]);
                assert!(!(a == TriState::Yes && b == TriState::Yes));
            }
            for v in g.vertices() {
                if states[v.index()] == TriState::No {
                    assert!(g.neighbors(v).iter().any(|u| states[u.index()] == TriState::Yes));
                }
                if states[v.index()] == TriState::Bottom {
                    assert!(g.neighbors(v).iter().all(|u| states[u.index()] != TriState::Yes));
                }
            }
        }
    }

    #[test]
    fn sticky_states() {
        let g = gen_graph(&GenKind::GnpCapped { n: 80, p: 0.08, d: 6 }, 3).unwrap();
        let t = run(&g, 3);
        for v in g.vertices() {
            for i in 1..=t.params().iterations {
                let before = t.iteration_state(v, i - 1);
                if before != TriState::Bottom {
                    assert_eq!(t.iteration_state(v, i), before);
                    assert_eq!(t.stage_state(v, i, 0), None);
                }
            }
        }
    }
}
