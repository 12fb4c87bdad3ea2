use lca_core::graph::{gen_graph, CountingOracle, EdgeId, GenKind, GraphStore, VertexId};
use lca_core::matching::{global_mm_phase1, ChoiceBits, LineGraphMatching, MatchingLca, MmParams};
use lca_core::pseudorandom::{MasterSeed, SeedBundle};
use lca_core::weak_mis::MemoScope;
use proptest::prelude::*;

fn seed(x: u64) -> SeedBundle {
    SeedBundle::new(MasterSeed::from_u64(x))
}

fn e(a: u32, b: u32) -> EdgeId {
    EdgeId::new(VertexId::new(a), VertexId::new(b))
}

fn assert_maximal_matching(g: &GraphStore, edges: &[EdgeId]) {
    let mut used = vec![false; g.n()];
    for x in edges {
        assert!(g.has_edge(x.lo(), x.hi()));
        assert!(!used[x.lo().index()] && !used[x.hi().index()], "shared endpoint in {x}");
        used[x.lo().index()] = true;
        used[x.hi().index()] = true;
    }
    for x in g.edges() {
        assert!(used[x.lo().index()] || used[x.hi().index()], "{x} could be added");
    }
}

fn check_equivalence(g: &GraphStore, s: u64) {
    let params = MmParams::new(g.n(), g.d(), 4.0, 1.0).unwrap();
    let bits = ChoiceBits::new(&params, g.n() as u64, &seed(s)).unwrap();
    let trace = global_mm_phase1(g, &params, &bits);
    let oracle = CountingOracle::new(g);
    let lca = MatchingLca::with_bits(&oracle, params.clone(), bits, MemoScope::Shared);
    for v in g.vertices() {
        for i in 0..=params.iterations {
            assert_eq!(lca.partner(v, i).unwrap(), trace.partner(v, i), "vertex {v} iteration {i}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn local_matches_global(n in 1usize..150, p in 0.0f64..0.15, d in 1usize..9, gs in any::<u64>(), s in any::<u64>()) {
        let g = gen_graph(&GenKind::GnpCapped { n, p, d }, gs).unwrap();
        check_equivalence(&g, s);
    }
}

#[test]
fn phase_one_partners_are_symmetric() {
    let g = gen_graph(&GenKind::GnpCapped { n: 200, p: 0.04, d: 8 }, 1).unwrap();
    let params = MmParams::new(g.n(), g.d(), 4.0, 1.0).unwrap();
    let bits = ChoiceBits::new(&params, g.n() as u64, &seed(1)).unwrap();
    let trace = global_mm_phase1(&g, &params, &bits);
    for v in g.vertices() {
        if let Some(u) = trace.partner(v, params.iterations) {
            assert_eq!(trace.partner(u, params.iterations), Some(v));
            assert!(g.has_edge(u, v));
        }
    }
    assert!(!trace.matching().is_empty());
}

#[test]
fn star_matches_at_most_one_leaf_per_iteration() {
    let g = gen_graph(&GenKind::Star { n: 4 }, 0).unwrap();
    for s in 0..20 {
        let params = MmParams::new(4, 3, 4.0, 1.0).unwrap();
        let bits = ChoiceBits::new(&params, 4, &seed(s)).unwrap();
        let trace = global_mm_phase1(&g, &params, &bits);
        assert!(trace.matching().len() <= 1);
    }
}

#[test]
fn isolated_vertex_never_matches() {
    let g = GraphStore::from_edges(3, 1, [(1, 2)]).unwrap();
    let params = MmParams::new(3, 1, 4.0, 1.0).unwrap();
    let bits = ChoiceBits::new(&params, 3, &seed(0)).unwrap();
    let trace = global_mm_phase1(&g, &params, &bits);
    assert_eq!(trace.partner(VertexId::new(3), params.iterations), None);
}

#[test]
fn full_answers_are_maximal_matchings() {
    for s in 0..6 {
        let g = gen_graph(&GenKind::GnpCapped { n: 300, p: 0.03, d: 8 }, s).unwrap();
        let oracle = CountingOracle::new(&g);
        let params = MmParams::new(g.n(), g.d(), 4.0, 1.0).unwrap();
        let lca = MatchingLca::new(&oracle, params, &seed(s), MemoScope::Shared).unwrap();
        let m: Vec<EdgeId> = g.edges().filter(|&x| lca.query(x).unwrap()).collect();
        assert_maximal_matching(&g, &m);
        let lg = LineGraphMatching::new(&oracle, 4.0, &seed(s), MemoScope::Shared).unwrap();
        let m2: Vec<EdgeId> = g.edges().filter(|&x| lg.query(x).unwrap()).collect();
        assert_maximal_matching(&g, &m2);
    }
}

#[test]
fn phase_two_finishes_short_schedules() {
    let mut used_phase2 = false;
    for s in 0..10 {
        let g = gen_graph(&GenKind::RandomRegular { n: 100, d: 4 }, s).unwrap();
        let oracle = CountingOracle::new(&g);
        let mut params = MmParams::new(g.n(), g.d(), 0.1, 1.0).unwrap();
        params.iterations = 1;
        let lca = MatchingLca::new(&oracle, params, &seed(s), MemoScope::PerQuery).unwrap();
        let m: Vec<EdgeId> = g.edges().filter(|&x| lca.query(x).unwrap()).collect();
        used_phase2 |= lca.counters().phase2_visited > 0;
        assert_maximal_matching(&g, &m);
    }
    assert!(used_phase2);
}

#[test]
fn residual_path_uses_ascending_greedy() {
    // Seeds where Phase 1 matches nothing leave the whole path to Phase 2.
    let g = gen_graph(&GenKind::Path { n: 3 }, 0).unwrap();
    let oracle = CountingOracle::new(&g);
    let mut params = MmParams::new(3, 2, 4.0, 1.0).unwrap();
    params.iterations = 1;
    params.component_cap = 10;
    let bits = ChoiceBits::new(&params, 3, &seed(0)).unwrap();
    let lca = MatchingLca::with_bits(&oracle, params.clone(), bits, MemoScope::PerQuery);
    let mut seen = false;
    for s in 0..200 {
        let lca2 = MatchingLca::new(&oracle, params.clone(), &seed(s), MemoScope::PerQuery).unwrap();
        if (1..=3).all(|v| lca2.phase1(VertexId::new(v)).unwrap().is_none()) {
            seen = true;
            assert!(lca2.query(e(1, 2)).unwrap());
            assert!(!lca2.query(e(2, 3)).unwrap());
        }
    }
    assert!(seen);
    assert!(lca.query(e(1, 3)).is_err());
}

#[test]
fn line_graph_small_cases() {
    let single = GraphStore::from_edges(2, 1, [(1, 2)]).unwrap();
    let o = CountingOracle::new(&single);
    let lg = LineGraphMatching::new(&o, 4.0, &seed(0), MemoScope::PerQuery).unwrap();
    assert!(lg.query(e(1, 2)).unwrap());
    let tri = gen_graph(&GenKind::Complete { n: 3 }, 0).unwrap();
    for s in 0..10 {
        let o = CountingOracle::new(&tri);
        let lg = LineGraphMatching::new(&o, 4.0, &seed(s), MemoScope::PerQuery).unwrap();
        let yes = tri.edges().filter(|&x| lg.query(x).unwrap()).count();
        assert_eq!(yes, 1);
    }
    let p4 = gen_graph(&GenKind::Path { n: 4 }, 0).unwrap();
    for s in 0..10 {
        let o = CountingOracle::new(&p4);
        let lg = LineGraphMatching::new(&o, 4.0, &seed(s), MemoScope::Shared).unwrap();
        let m: Vec<EdgeId> = p4.edges().filter(|&x| lg.query(x).unwrap()).collect();
        assert_maximal_matching(&p4, &m);
        assert_ne!(m, vec![e(1, 2), e(2, 3)]);
    }
}
