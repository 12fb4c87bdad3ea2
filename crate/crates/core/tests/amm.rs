use lca_core::amm::{
    find_good_ordering_vector, global_amm, AmmEngine, AmmLca, AmmOutcome, AmmParams, AugPath, PathOrdering,
};
use lca_core::graph::{gen_graph, CountingOracle, EdgeId, GenKind, GraphStore, VertexId};
use lca_core::pseudorandom::{MasterSeed, SeedBundle};
use lca_core::verify::{max_matching_exact, verify_matching};
use lca_core::weak_mis::MemoScope;
use proptest::prelude::*;

fn seed(x: u64) -> SeedBundle {
    SeedBundle::new(MasterSeed::from_u64(x))
}

fn v(x: u32) -> VertexId {
    VertexId::new(x)
}

fn e(a: u32, b: u32) -> EdgeId {
    EdgeId::from_raw(a, b)
}

fn graph(n: usize, edges: &[(u32, u32)]) -> GraphStore {
    let d = 1.max(n.saturating_sub(1));
    GraphStore::from_edges(n, d, edges.iter().copied()).unwrap()
}

fn ordering(g: &GraphStore, k: u32, s: u64) -> PathOrdering {
    PathOrdering::new(g.n(), k, 256, &seed(s), 0).unwrap()
}

fn yes_set(g: &GraphStore, ord: &PathOrdering, level: u32, budget: Option<u64>) -> Vec<EdgeId> {
    let oracle = CountingOracle::new(g);
    let engine = AmmEngine::new(&oracle, ord, MemoScope::Shared);
    g.edges()
        .filter(|&x| engine.in_matching(x, level, budget).unwrap().outcome == AmmOutcome::Yes)
        .collect()
}

/// First seed whose level-1 phase matches exactly `target`.
fn seed_with_first_phase(g: &GraphStore, k: u32, target: &[EdgeId]) -> PathOrdering {
    (0..200)
        .map(|s| ordering(g, k, s))
        .find(|ord| global_amm(g, 1, ord).last() == target)
        .expect("some seed picks the target first phase")
}

/// Length in edges of a shortest augmenting path, by trying every simple path
/// from every free vertex.
fn shortest_augmenting(g: &GraphStore, matching: &[EdgeId]) -> Option<usize> {
    let mut mate = vec![None; g.n()];
    for x in matching {
        mate[x.lo().index()] = Some(x.hi());
        mate[x.hi().index()] = Some(x.lo());
    }
    fn walk(g: &GraphStore, mate: &[Option<VertexId>], path: &mut Vec<VertexId>, best: &mut Option<usize>) {
        let here = *path.last().unwrap();
        let edges = path.len() - 1;
        if edges % 2 == 1 && mate[here.index()].is_none() {
            *best = Some(best.map_or(edges, |b| b.min(edges)));
            return;
        }
        for &u in g.neighbors(here) {
            let matched = mate[here.index()] == Some(u);
            if matched == (edges % 2 == 1) && !path.contains(&u) {
                path.push(u);
                walk(g, mate, path, best);
                path.pop();
            }
        }
    }
    let mut best = None;
    for s in g.vertices().filter(|s| mate[s.index()].is_none()) {
        walk(g, &mate, &mut vec![s], &mut best);
    }
    best
}

#[test]
fn level_zero_is_empty() {
    let g = graph(4, &[(1, 2), (2, 3), (3, 4)]);
    let ord = ordering(&g, 2, 0);
    let oracle = CountingOracle::new(&g);
    let engine = AmmEngine::new(&oracle, &ord, MemoScope::PerQuery);
    for x in g.edges() {
        let r = engine.in_matching(x, 0, None).unwrap();
        assert_eq!(r.outcome, AmmOutcome::No);
        assert_eq!(r.calls, 1);
    }
    assert!(engine.in_matching(e(1, 3), 1, None).is_err());
    assert!(engine.in_matching(e(1, 2), 3, None).is_err());
}

#[test]
fn single_edge() {
    let g = graph(2, &[(1, 2)]);
    let ord = ordering(&g, 1, 0);
    let oracle = CountingOracle::new(&g);
    let engine = AmmEngine::new(&oracle, &ord, MemoScope::PerQuery);
    assert_eq!(engine.in_matching(e(1, 2), 1, None).unwrap().outcome, AmmOutcome::Yes);
    for x in [v(1), v(2)] {
        let paths = engine.paths_through(x, 1, None).unwrap().unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].vertices(), &[v(1), v(2)]);
        assert_eq!(engine.path_in_a(&paths[0], None).unwrap().outcome, AmmOutcome::Yes);
    }
    let params = AmmParams::new(2, 1, 1, 0.5, 0.01).unwrap();
    let good = find_good_ordering_vector(&oracle, &params, &seed(0)).unwrap();
    assert_eq!(good.draws.len(), 1);
    let lca = AmmLca::new(&oracle, &good.ordering, good.ell, MemoScope::PerQuery);
    assert!(lca.query(e(1, 2)).unwrap());
}

#[test]
fn path_of_four_reaches_the_maximum_matching() {
    let g = graph(4, &[(1, 2), (2, 3), (3, 4)]);
    let ord = seed_with_first_phase(&g, 2, &[e(2, 3)]);
    assert_eq!(yes_set(&g, &ord, 1, None), vec![e(2, 3)]);
    assert_eq!(yes_set(&g, &ord, 2, None), vec![e(1, 2), e(3, 4)]);
    let oracle = CountingOracle::new(&g);
    let engine = AmmEngine::new(&oracle, &ord, MemoScope::PerQuery);
    let through_one = engine.paths_through(v(1), 2, None).unwrap().unwrap();
    assert_eq!(through_one, vec![AugPath::new(2, &[v(1), v(2), v(3), v(4)], 4)]);
    let through_middle = engine.paths_through_edge(e(2, 3), 2, None).unwrap().unwrap();
    assert_eq!(through_middle, through_one);
    let lca = AmmLca::new(&oracle, &ord, u64::MAX, MemoScope::PerQuery);
    let answers: Vec<bool> = g.edges().map(|x| lca.query(x).unwrap()).collect();
    assert_eq!(answers, vec![true, false, true]);
}

#[test]
fn triangle_has_no_second_level_paths() {
    let g = graph(3, &[(1, 2), (2, 3), (1, 3)]);
    let ord = ordering(&g, 2, 4);
    let oracle = CountingOracle::new(&g);
    let engine = AmmEngine::new(&oracle, &ord, MemoScope::Shared);
    for x in g.vertices() {
        assert!(engine.paths_through(x, 2, None).unwrap().unwrap().is_empty());
    }
    // The three level-1 paths pairwise intersect, so exactly one is selected.
    let chosen = (1..=3)
        .flat_map(|a| ((a + 1)..=3).map(move |b| AugPath::new(1, &[v(a), v(b)], 3)))
        .filter(|p| engine.path_in_a(p, None).unwrap().outcome == AmmOutcome::Yes)
        .count();
    assert_eq!(chosen, 1);
    assert_eq!(yes_set(&g, &ord, 2, None).len(), 1);
}

#[test]
fn paths_on_the_same_vertices_conflict() {
    // Free vertices 1 and 4 both see both ends of the matched edge (2,3).
    let g = graph(4, &[(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)]);
    let ord = seed_with_first_phase(&g, 2, &[e(2, 3)]);
    let oracle = CountingOracle::new(&g);
    let engine = AmmEngine::new(&oracle, &ord, MemoScope::PerQuery);
    let paths = engine.paths_through(v(1), 2, None).unwrap().unwrap();
    assert_eq!(paths.len(), 2);
    let first = if ord.key(&paths[0]) < ord.key(&paths[1]) { 0 } else { 1 };
    assert_eq!(engine.path_in_a(&paths[first], None).unwrap().outcome, AmmOutcome::Yes);
    assert_eq!(engine.path_in_a(&paths[1 - first], None).unwrap().outcome, AmmOutcome::No);
}

#[test]
fn isolated_path_is_selected() {
    let g = graph(6, &[(1, 2), (3, 4), (5, 6)]);
    let ord = ordering(&g, 1, 0);
    let oracle = CountingOracle::new(&g);
    let engine = AmmEngine::new(&oracle, &ord, MemoScope::PerQuery);
    let p = AugPath::new(1, &[v(3), v(4)], 6);
    assert_eq!(engine.path_in_a(&p, None).unwrap().outcome, AmmOutcome::Yes);
}

fn check_exact(g: &GraphStore, k: u32, s: u64) {
    let ord = ordering(g, k, s);
    let trace = global_amm(g, k, &ord);
    let oracle = CountingOracle::new(g);
    let engine = AmmEngine::new(&oracle, &ord, MemoScope::Shared);
    for i in 0..=k {
        let yes: Vec<EdgeId> = g
            .edges()
            .filter(|&x| engine.in_matching(x, i, None).unwrap().outcome == AmmOutcome::Yes)
            .collect();
        assert_eq!(yes, trace.matching(i as usize), "level {i}");
        assert!(verify_matching(g, &yes, false).is_pass());
        // No augmenting path with fewer than 2i + 1 edges survives phase i.
        if let Some(len) = shortest_augmenting(g, &yes) {
            assert!(len > 2 * i as usize, "level {i}: path of {len} edges");
        }
    }
    let optimum = max_matching_exact(g).unwrap().len();
    let size = trace.last().len();
    assert!(size * (k as usize + 1) >= optimum * k as usize, "|M_k| = {size}, |M*| = {optimum}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn local_phases_match_global(n in 2usize..40, p in 0.02f64..0.2, d in 1usize..5, k in 1u32..4, gs in any::<u64>(), s in any::<u64>()) {
        let g = gen_graph(&GenKind::GnpCapped { n, p, d }, gs).unwrap();
        check_exact(&g, k, s);
    }
}

#[test]
fn one_phase_is_a_maximal_matching() {
    for s in 0..5 {
        let g = gen_graph(&GenKind::GnpCapped { n: 50, p: 0.08, d: 4 }, s).unwrap();
        let ord = ordering(&g, 1, s);
        assert!(verify_matching(&g, &yes_set(&g, &ord, 1, None), true).is_pass());
    }
}

#[test]
fn per_query_memo_changes_nothing() {
    let g = gen_graph(&GenKind::GnpCapped { n: 30, p: 0.12, d: 4 }, 9).unwrap();
    let ord = ordering(&g, 3, 9);
    let oracle = CountingOracle::new(&g);
    let shared = AmmEngine::new(&oracle, &ord, MemoScope::Shared);
    let fresh = AmmEngine::new(&oracle, &ord, MemoScope::PerQuery);
    for x in g.edges().collect::<Vec<_>>().into_iter().rev() {
        assert_eq!(
            shared.in_matching(x, 3, None).unwrap(),
            fresh.in_matching(x, 3, None).unwrap()
        );
    }
}

#[test]
fn budgets_only_remove_edges() {
    let g = gen_graph(&GenKind::GnpCapped { n: 40, p: 0.1, d: 4 }, 3).unwrap();
    let ord = ordering(&g, 3, 3);
    let full = yes_set(&g, &ord, 3, None);
    assert!(yes_set(&g, &ord, 3, Some(0)).is_empty());
    let mut previous: Vec<EdgeId> = Vec::new();
    for ell in [1, 10, 100, 1_000, 10_000, 100_000, u64::MAX] {
        let yes = yes_set(&g, &ord, 3, Some(ell));
        assert!(previous.iter().all(|x| yes.contains(x)), "budget {ell} lost an edge");
        assert!(yes.iter().all(|x| full.contains(x)));
        assert!(verify_matching(&g, &yes, false).is_pass());
        previous = yes;
    }
    assert_eq!(previous, full);
}

#[test]
fn phase_one_meets_the_ratio() {
    for s in 0..6 {
        let g = gen_graph(&GenKind::GnpCapped { n: 40, p: 0.08, d: 4 }, s).unwrap();
        let params = AmmParams::new(g.n(), g.m(), g.d(), 0.5, 0.01).unwrap();
        let oracle = CountingOracle::new(&g);
        let good = find_good_ordering_vector(&oracle, &params, &seed(s)).unwrap();
        assert!(good.p_tilde < params.threshold());
        let lca = AmmLca::new(&oracle, &good.ordering, good.ell, MemoScope::Shared);
        let yes: Vec<EdgeId> = g.edges().filter(|&x| lca.query(x).unwrap()).collect();
        assert!(verify_matching(&g, &yes, false).is_pass());
        let optimum = max_matching_exact(&g).unwrap().len() as f64;
        assert!(yes.len() as f64 >= (1.0 - params.eps) * optimum);
    }
}

#[test]
fn tiny_budgets_exhaust_phase_one() {
    let g = gen_graph(&GenKind::GnpCapped { n: 30, p: 0.15, d: 4 }, 1).unwrap();
    let mut params = AmmParams::new(g.n(), g.m(), g.d(), 0.5, 0.5).unwrap();
    params.ell0 = 1;
    params.doublings = 1;
    let err = find_good_ordering_vector(CountingOracle::new(&g), &params, &seed(0)).unwrap_err();
    assert!(err.to_string().starts_with("PHASE1_ERROR"), "{err}");
}
