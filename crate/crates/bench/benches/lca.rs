use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lca_bench::{capped_gnp, seed};
use lca_core::amm::{AmmLca, AmmParams, PathOrdering};
use lca_core::graph::{CountingOracle, VertexId};
use lca_core::greedy::{AmisLca, LsMis};
use lca_core::matching::{MatchingLca, MmParams, DEFAULT_C2, DEFAULT_CM};
use lca_core::pseudorandom::{CachedOrdering, KWiseBits, RandomOrdering};
use lca_core::verify::max_matching_exact;
use lca_core::weak_mis::{MemoScope, MisParams, WeakMisLca, DEFAULT_C1};

fn mis_query(c: &mut Criterion) {
    let mut group = c.benchmark_group("mis_query");
    for d in [4, 8, 16] {
        let g = capped_gnp(2000, d, 1);
        let params = MisParams::new(g.n(), g.d(), DEFAULT_C1).unwrap();
        let oracle = CountingOracle::new(&g);
        let lca = WeakMisLca::new(&oracle, params, &seed(1), MemoScope::PerQuery).unwrap();
        let mut v = 0u32;
        group.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, _| {
            b.iter(|| {
                v = v % 2000 + 1;
                black_box(lca.query(VertexId::new(v)).unwrap())
            })
        });
    }
    group.finish();
}

fn mis_all_vertices(c: &mut Criterion) {
    let g = capped_gnp(2000, 8, 2);
    let params = MisParams::new(g.n(), g.d(), DEFAULT_C1).unwrap();
    c.bench_function("mis_all_vertices_shared_memo", |b| {
        b.iter(|| {
            let lca = WeakMisLca::new(CountingOracle::new(&g), params.clone(), &seed(2), MemoScope::Shared).unwrap();
            g.vertices().filter(|&v| lca.query(v).unwrap()).count()
        })
    });
}

fn matching_query(c: &mut Criterion) {
    let g = capped_gnp(2000, 8, 3);
    let edges: Vec<_> = g.edges().collect();
    let params = MmParams::new(g.n(), g.d(), DEFAULT_C2, DEFAULT_CM).unwrap();
    let oracle = CountingOracle::new(&g);
    let lca = MatchingLca::new(&oracle, params, &seed(3), MemoScope::PerQuery).unwrap();
    let mut i = 0;
    c.bench_function("matching_query", |b| {
        b.iter(|| {
            i = (i + 1) % edges.len();
            black_box(lca.query(edges[i]).unwrap())
        })
    });
}

fn greedy_simulation(c: &mut Criterion) {
    let g = capped_gnp(5000, 8, 4);
    let ordering = RandomOrdering::for_vertices(g.n() as u64, 64, &seed(4), 0).unwrap();
    let ranks = CachedOrdering::new(&ordering);
    let mut v = 0u32;
    c.bench_function("greedy_simulation_fresh_memo", |b| {
        b.iter(|| {
            v = v % 5000 + 1;
            let sim = LsMis::new(CountingOracle::new(&g), &ranks);
            black_box(sim.query(VertexId::new(v), None).unwrap())
        })
    });
    let lca = AmisLca::new(CountingOracle::new(&g), &ordering, 64);
    c.bench_function("amis_budgeted_query", |b| {
        b.iter(|| {
            v = v % 5000 + 1;
            black_box(lca.query(VertexId::new(v)).unwrap())
        })
    });
}

fn amm_all_edges(c: &mut Criterion) {
    let g = capped_gnp(40, 4, 5);
    let params = AmmParams::with_k(g.n(), g.m(), g.d(), 0.5, 0.01, 3).unwrap();
    let ordering = PathOrdering::new(g.n(), params.k, 256, &seed(5), 0).unwrap();
    c.bench_function("amm_all_edges_k3", |b| {
        b.iter(|| {
            let lca = AmmLca::new(CountingOracle::new(&g), &ordering, u64::MAX, MemoScope::Shared);
            g.edges().filter(|&e| lca.query(e).unwrap()).count()
        })
    });
    c.bench_function("max_matching_exact_n40", |b| b.iter(|| max_matching_exact(&g).unwrap().len()));
}

fn kwise_bits(c: &mut Criterion) {
    let bits = KWiseBits::new(32, 1 << 20, &mut seed(6).bits()).unwrap();
    let mut i = 0u64;
    c.bench_function("kwise_bit_k32", |b| {
        b.iter(|| {
            i = i % (1 << 20) + 1;
            black_box(bits.bit(i).unwrap())
        })
    });
}

criterion_group!(
    benches,
    mis_query,
    mis_all_vertices,
    matching_query,
    greedy_simulation,
    amm_all_edges,
    kwise_bits
);
criterion_main!(benches);
