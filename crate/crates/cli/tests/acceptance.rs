//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Tolerances and runtime limits are pinned below.

use std::fs;
use std::process::{Command as Process, ExitCode};
use std::time::{Duration, Instant};

use lca_cli::{run, run_to_file, Command, GraphSource, Manifest, MmMethod, RunConfig, Table};
use lca_core::amm::{global_amm, AmmEngine, AmmOutcome, PathOrdering, MAX_PATH_INDEPENDENCE};
use lca_core::graph::{gen_graph, CountingOracle, EdgeId, GenKind, GraphStore, VertexId};
use lca_core::greedy::{r_exhaustive, LsMis, LsOutcome};
use lca_core::matching::{global_mm_phase1, ChoiceBits, MatchingLca, MmParams, DEFAULT_CM};
use lca_core::pseudorandom::{CachedOrdering, MasterSeed, RandomOrdering, SeedBundle};
use lca_core::verify::{greedy_mis_global, max_matching_exact, rand_tests, verify_matching, RandTestParams, Verdict};
use lca_core::weak_mis::{global_weak_mis, MemoScope, MisParams, SelectionBits, TriState, WeakMisLca, DEFAULT_C1};
use serde_json::Value;

/// Allowed fraction of MIS runs ending in COMPONENT_TOO_LARGE.
const MAX_ERROR_RUN_FRACTION: f64 = 0.01;
/// Required fraction of MIS runs whose residual components stay within `ceil(d^4 log2 n)`.
const MIN_COMPONENT_BOUND_FRACTION: f64 = 0.99;
/// Standard errors of slack for the sampled bounds.
const SIGMAS: f64 = 3.0;
const R_SAMPLES: u64 = 100_000;
const LEMMA1_EVENTS: u64 = 100_000;
/// Phase-1 successes required out of the approximate-MIS runs.
const AMIS_MIN_SUCCESSES: usize = 19;
const AMIS_RUNS: u32 = 20;

fn seed(x: u64) -> SeedBundle {
    SeedBundle::new(MasterSeed::from_u64(x))
}

fn gnp(n: usize, mean_degree: f64, d: usize) -> String {
    format!("gnp:n={n},p={:.8},d={d}", mean_degree / (n as f64 - 1.0))
}

fn sweep(command: Command, graph: String) -> RunConfig {
    RunConfig::new(command, GraphSource::Gen(graph))
}

fn int(v: &Value) -> u64 {
    v.as_u64().unwrap_or_else(|| panic!("expected an integer, got {v}"))
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("expected a number, got {v}"))
}

/// Small random graphs for the exact cross-checks: sizes and densities vary with `idx`.
fn small_graph(idx: u64, max_n: usize, d: usize) -> GraphStore {
    let n = 10 + (idx as usize * 37) % (max_n - 9);
    let mean = d as f64 * (0.5 + (idx % 4) as f64 * 0.25);
    let kind: GenKind = gnp(n, mean, d).parse().unwrap();
    gen_graph(&kind, 1_000 + idx).unwrap()
}

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// 1 -------------------------------------------------------------------------

fn oracle_equivalence() -> Outcome {
    let mut mis_checked = 0u64;
    let mut mm_checked = 0u64;
    let mut mismatches = Vec::new();
    for idx in 0..50u64 {
        let d = [2, 4, 8][idx as usize % 3];
        let g = small_graph(idx, 200, d);
        for s in 0..5 {
            let bundle = seed(idx * 10 + s);
            let params = MisParams::new(g.n(), g.d(), DEFAULT_C1).unwrap();
            let bits = SelectionBits::new(&params, g.n() as u64, &bundle).unwrap();
            let trace = global_weak_mis(&g, &params, &bits);
            let oracle = CountingOracle::new(&g);
            let lca = WeakMisLca::with_bits(&oracle, params.clone(), bits, MemoScope::Shared);
            for v in g.vertices() {
                for i in 0..=params.iterations {
                    mis_checked += 1;
                    if lca.iteration(v, i).unwrap() != trace.iteration_state(v, i) {
                        mismatches.push(format!("graph {idx} seed {s}: iteration ({v}, {i})"));
                    }
                }
                for i in 1..=params.iterations {
                    if trace.iteration_state(v, i - 1) != TriState::Bottom {
                        continue;
                    }
                    for j in 0..=params.stages {
                        mis_checked += 1;
                        if Some(lca.stage(v, i, j).unwrap()) != trace.stage_state(v, i, j) {
                            mismatches.push(format!("graph {idx} seed {s}: stage ({v}, {i}, {j})"));
                        }
                    }
                }
            }

            let params = MmParams::new(g.n(), g.d(), lca_cli::config::DEFAULT_C2, DEFAULT_CM).unwrap();
            let bits = ChoiceBits::new(&params, g.n() as u64, &bundle).unwrap();
            let trace = global_mm_phase1(&g, &params, &bits);
            let lca = MatchingLca::with_bits(&oracle, params.clone(), bits, MemoScope::Shared);
            for v in g.vertices() {
                for i in 0..=params.iterations {
                    mm_checked += 1;
                    if lca.partner(v, i).unwrap() != trace.partner(v, i) {
                        mismatches.push(format!("graph {idx} seed {s}: matching ({v}, {i})"));
                    }
                }
            }
        }
    }
    check(
        mismatches.is_empty(),
        format!(
            "{mis_checked} MIS and {mm_checked} matching answers, {} mismatches{}",
            mismatches.len(),
            mismatches.first().map(|m| format!(", first {m}")).unwrap_or_default()
        ),
    )
}

// 2 and 3 -------------------------------------------------------------------

fn mis_runs() -> Result<Table, String> {
    let mut rows: Option<Table> = None;
    for (d, reps) in [(4usize, 34u32), (8, 33), (16, 33)] {
        let mut config = sweep(Command::MisSweep, gnp(2000, d as f64, d));
        config.reps = reps;
        config.seed = MasterSeed::from_u64(d as u64);
        config.query_sample = 4;
        let report = run(&config).map_err(|e| e.to_string())?;
        match &mut rows {
            None => rows = Some(report.table),
            Some(t) => {
                for r in report.table.rows() {
                    t.push(r.clone());
                }
            }
        }
    }
    Ok(rows.expect("three sweeps"))
}

fn mis_validity(t: &Table) -> Outcome {
    let runs = t.len();
    let errors = t.column("error").iter().filter(|e| !e.is_null()).count();
    let invalid = t.column("valid").iter().filter(|v| ***v == Value::Bool(false)).count();
    check(
        runs == 100 && invalid == 0 && errors as f64 <= MAX_ERROR_RUN_FRACTION * runs as f64,
        format!("{runs} runs, {errors} COMPONENT_TOO_LARGE, {invalid} invalid among the rest"),
    )
}

fn component_bound(t: &Table) -> Outcome {
    let mut within = 0;
    let mut worst = (0u64, 0u64);
    for row in 0..t.len() {
        let n = int(t.get(row, "n").unwrap()) as f64;
        let d = int(t.get(row, "d").unwrap()) as f64;
        let bound = (d.powi(4) * n.log2()).ceil() as u64;
        let max = int(t.get(row, "max_component").unwrap());
        if max <= bound {
            within += 1;
        }
        if max > worst.0 {
            worst = (max, bound);
        }
    }
    let frac = within as f64 / t.len() as f64;
    check(
        frac >= MIN_COMPONENT_BOUND_FRACTION,
        format!(
            "c1 = {DEFAULT_C1}: {within}/{} runs within ceil(d^4 log2 n); largest residual component {} (bound {})",
            t.len(),
            worst.0,
            worst.1
        ),
    )
}

// 4 -------------------------------------------------------------------------

fn greedy_equivalence() -> Outcome {
    let mut mismatches = 0;
    let mut answers = 0;
    for idx in 0..20u64 {
        let d = [3, 5, 8, 12][idx as usize % 4];
        let g = small_graph(idx + 500, 1000, d);
        for draw in 0..20 {
            let o = RandomOrdering::for_vertices(g.n() as u64, 16, &seed(idx), draw).unwrap();
            let order: Vec<VertexId> = o.permutation().into_iter().map(|x| VertexId::new(x as u32)).collect();
            let expected = greedy_mis_global(&g, &order);
            let ranks = CachedOrdering::new(&o);
            let sim = LsMis::new(CountingOracle::new(&g), &ranks);
            let got: Vec<VertexId> = g
                .vertices()
                .filter(|&v| sim.query(v, None).unwrap().outcome == LsOutcome::Yes)
                .collect();
            answers += g.n();
            if got != expected {
                mismatches += 1;
            }
        }
    }
    check(
        mismatches == 0,
        format!("400 (graph, ordering) pairs, {answers} answers, {mismatches} mismatching pairs"),
    )
}

// 5 -------------------------------------------------------------------------

fn r_bound() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for ratio in [1.0, 2.0, 4.0] {
        let mut config = sweep(Command::RDist, format!("gnp:n=500,p={:.8}", 2.0 * ratio / 499.0));
        config.samples = R_SAMPLES;
        config.seed = MasterSeed::from_u64(ratio as u64);
        let report = run(&config).map_err(|e| e.to_string())?;
        let t = &report.table;
        let (mean, se, bound) = (
            num(t.get(0, "mean").unwrap()),
            num(t.get(0, "std_err").unwrap()),
            num(t.get(0, "bound").unwrap()),
        );
        ok &= mean <= bound + SIGMAS * se;
        parts.push(format!("m/n={:.2}: mean {mean:.4} vs bound {bound:.4} (se {se:.4})", bound - 1.0));
    }
    let edge = GraphStore::from_edges(2, 1, [(1, 2)]).unwrap();
    let star = GraphStore::from_edges(4, 3, [(1, 2), (1, 3), (1, 4)]).unwrap();
    let exact = (
        r_exhaustive(CountingOracle::new(&edge)).unwrap(),
        r_exhaustive(CountingOracle::new(&star)).unwrap(),
    );
    ok &= exact == ((6, 4), (168, 96));
    parts.push(format!("exhaustive {:?} {:?}", exact.0, exact.1));
    check(ok, parts.join("; "))
}

// 6 -------------------------------------------------------------------------

fn amis_guarantee() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for eps in [0.1, 0.2] {
        let mut config = sweep(Command::Amis, gnp(5000, 8.0, 8));
        config.eps = Some(eps);
        config.reps = AMIS_RUNS;
        config.seed = MasterSeed::from_u64((eps * 100.0) as u64);
        let report = run(&config).map_err(|e| e.to_string())?;
        let t = &report.table;
        let mut successes = 0;
        let mut violations = 0;
        let mut worst = f64::INFINITY;
        for row in 0..t.len() {
            if !t.get(row, "error").unwrap().is_null() {
                continue;
            }
            successes += 1;
            let yes = int(t.get(row, "yes").unwrap()) as f64;
            let greedy = int(t.get(row, "greedy").unwrap()) as f64;
            worst = worst.min(yes / greedy);
            let structural = t.get(row, "independent") == Some(&Value::Bool(true))
                && t.get(row, "subset") == Some(&Value::Bool(true))
                && yes >= (1.0 - eps) * greedy;
            violations += !structural as usize;
        }
        ok &= successes >= AMIS_MIN_SUCCESSES && violations == 0;
        parts.push(format!(
            "eps={eps}: {successes}/{AMIS_RUNS} succeeded, {violations} violations, min ratio {worst:.4}"
        ));
    }
    check(ok, parts.join("; "))
}

// 7 -------------------------------------------------------------------------

fn amm_cross_check() -> Outcome {
    let mut mismatches = 0;
    let mut invalid = 0;
    let mut below = 0;
    for idx in 0..50u64 {
        let d = [2, 3, 4][idx as usize % 3];
        let k = 1 + (idx % 3) as u32;
        let g = small_graph(idx + 900, 40, d);
        let ord = PathOrdering::new(g.n(), k, MAX_PATH_INDEPENDENCE as usize, &seed(idx), 0).unwrap();
        let oracle = CountingOracle::new(&g);
        let engine = AmmEngine::new(&oracle, &ord, MemoScope::Shared);
        let local: Vec<EdgeId> = g
            .edges()
            .filter(|&e| engine.in_matching(e, k, None).unwrap().outcome == AmmOutcome::Yes)
            .collect();
        let trace = global_amm(&g, k, &ord);
        mismatches += (local != trace.last()) as usize;
        invalid += !verify_matching(&g, &local, false).is_pass() as usize;
        let best = max_matching_exact(&g).unwrap().len();
        below += ((local.len() as f64) < (k as f64 / (k as f64 + 1.0)) * best as f64 - 1e-9) as usize;
    }

    let eps = 0.5;
    let mut config = sweep(Command::Amm, gnp(40, 3.0, 4));
    config.eps = Some(eps);
    config.reps = 20;
    let report = run(&config).map_err(|e| e.to_string())?;
    let t = &report.table;
    let mut successes = 0;
    let mut short = 0;
    for row in 0..t.len() {
        if !t.get(row, "error").unwrap().is_null() {
            continue;
        }
        successes += 1;
        let matched = int(t.get(row, "matched").unwrap()) as f64;
        let optimum = int(t.get(row, "optimum").unwrap()) as f64;
        short += (matched < (1.0 - eps) * optimum) as usize;
    }
    check(
        mismatches == 0 && invalid == 0 && below == 0 && short == 0,
        format!(
            "50 graphs: {mismatches} local/global mismatches, {invalid} invalid, {below} below k/(k+1); \
             eps={eps} with Phase 1: {successes}/20 succeeded, {short} below (1-eps)|M*|"
        ),
    )
}

// 8 -------------------------------------------------------------------------

fn pseudorandomness() -> Outcome {
    let params = RandTestParams::default();
    match rand_tests(&params) {
        Verdict::Pass => Ok(format!(
            "exhaustive {:?}, 3-subset orders at width {}, 1/{} over {} seeds, seed audit",
            params.exhaustive, params.ordering_width, params.q, params.monte_carlo_seeds
        )),
        Verdict::Fail(w) => Err(w.to_string()),
    }
}

// 9 -------------------------------------------------------------------------

fn lemma_one() -> Outcome {
    let limit = 1.0 - 1.0 / (4.0 * std::f64::consts::E.powi(2));
    let mut parts = Vec::new();
    let mut ok = true;
    for d in [8usize, 16] {
        let (mut events, mut active) = (0u64, 0u64);
        let mut graphs = 0;
        while events < LEMMA1_EVENTS {
            let kind: GenKind = gnp(2000, d as f64, d).parse().unwrap();
            let g = gen_graph(&kind, 7_000 + graphs).unwrap();
            let params = MisParams::new(g.n(), g.d(), DEFAULT_C1).unwrap();
            let bits = SelectionBits::new(&params, g.n() as u64, &seed(graphs)).unwrap();
            let (e, a) = global_weak_mis(&g, &params, &bits).high_degree_events();
            events += e;
            active += a;
            graphs += 1;
            if graphs > 1_000 {
                return Err(format!("d={d}: only {events} events after {graphs} graphs"));
            }
        }
        let frac = active as f64 / events as f64;
        let se = (frac * (1.0 - frac) / events as f64).sqrt();
        ok &= frac <= limit + SIGMAS * se;
        parts.push(format!("d={d}: {active}/{events} active = {frac:.4} (se {se:.4})"));
    }
    parts.push(format!("limit {limit:.4}"));
    check(ok, parts.join("; "))
}

// 10 ------------------------------------------------------------------------

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut configs = Vec::new();
    let mut mis = sweep(Command::MisSweep, gnp(500, 6.0, 8));
    mis.d = vec![4, 8];
    mis.reps = 3;
    configs.push(mis);
    let mut mm = sweep(Command::Mm, gnp(300, 4.0, 6));
    mm.method = MmMethod::IsraeliItai;
    mm.emit_answers = true;
    configs.push(mm);
    let mut amis = sweep(Command::Amis, gnp(800, 5.0, 8));
    amis.eps = Some(0.3);
    configs.push(amis);
    let mut amm = sweep(Command::Amm, gnp(40, 3.0, 4));
    amm.eps = Some(0.5);
    amm.reps = 2;
    configs.push(amm);

    let mut differing = Vec::new();
    for (i, config) in configs.iter().enumerate() {
        let out = dir.path().join(format!("run{i}.csv"));
        run_to_file(config, &out).map_err(|e| e.to_string())?;
        let manifest = Manifest::path_for(&out);
        let again = dir.path().join(format!("again{i}.csv"));
        let status = Process::new(env!("CARGO_BIN_EXE_lca"))
            .arg("repro")
            .arg("--manifest")
            .arg(&manifest)
            .arg("--out")
            .arg(&again)
            .output()
            .map_err(|e| e.to_string())?
            .status;
        let same = fs::read(&out).ok() == fs::read(&again).ok();
        if !status.success() || !same {
            differing.push(config.command.name());
        }
    }

    let g = gen_graph(&gnp(1000, 6.0, 8).parse().unwrap(), 3).unwrap();
    let orders: Vec<Vec<VertexId>> = (0..3)
        .map(|draw| {
            RandomOrdering::for_vertices(g.n() as u64, 16, &seed(99), draw)
                .unwrap()
                .permutation()
                .into_iter()
                .map(|x| VertexId::new(x as u32))
                .collect()
        })
        .collect();
    let params = MisParams::new(g.n(), g.d(), DEFAULT_C1).unwrap();
    let mut answer_sets = Vec::new();
    for order in &orders {
        let lca = WeakMisLca::new(CountingOracle::new(&g), params.clone(), &seed(5), MemoScope::Shared).unwrap();
        let mut answers = vec![false; g.n()];
        for &v in order {
            answers[v.index()] = lca.query(v).unwrap();
        }
        answer_sets.push(answers);
    }
    let consistent = answer_sets.windows(2).all(|w| w[0] == w[1]);
    check(
        differing.is_empty() && consistent,
        format!(
            "{} manifests rerun, {} differ; MIS answers under 3 query orders {}",
            configs.len(),
            differing.len(),
            if consistent { "identical" } else { "differ" }
        ),
    )
}

fn main() -> ExitCode {
    let mut mis_table: Option<Result<Table, String>> = None;
    let mut mis = |f: fn(&Table) -> Outcome| -> Outcome {
        let t = mis_table.get_or_insert_with(mis_runs);
        match t {
            Ok(t) => f(t),
            Err(e) => Err(e.clone()),
        }
    };
    let mut failures = 0;
    let mut report = |id: u32, name: &str, limit_secs: u64, start: Instant, outcome: Outcome| {
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(limit_secs) => {
                Err(format!("{detail}; took {:.1}s, limit {limit_secs}s", elapsed.as_secs_f64()))
            }
            other => other,
        };
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {id:>2} {name}: {detail} [{:.1}s]", elapsed.as_secs_f64());
    };

    let t = Instant::now();
    report(1, "oracle equivalence", 120, t, oracle_equivalence());
    let t = Instant::now();
    let validity = mis(mis_validity);
    report(2, "MIS validity", 600, t, validity);
    let t = Instant::now();
    report(3, "component bound", 600, t, mis(component_bound));
    let t = Instant::now();
    report(4, "greedy equivalence", 60, t, greedy_equivalence());
    let t = Instant::now();
    report(5, "greedy simulation cost", 300, t, r_bound());
    let t = Instant::now();
    report(6, "approximate MIS", 600, t, amis_guarantee());
    let t = Instant::now();
    report(7, "approximate matching", 600, t, amm_cross_check());
    let t = Instant::now();
    report(8, "pseudorandomness", 120, t, pseudorandomness());
    let t = Instant::now();
    report(9, "stage activity", 300, t, lemma_one());
    let t = Instant::now();
    report(10, "determinism", 60, t, determinism());

    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
