//! Subcommand runners. Each returns a [`Report`] whose table depends only on
//! the [`RunConfig`]; repetitions may run in parallel but rows come out in
//! repetition order.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;

use lca_core::amm::{find_good_ordering_vector, AmmLca, AmmOutcome, AmmParams, PathOrdering};
use lca_core::graph::{CountingOracle, EdgeId, GraphStore, VertexId};
use lca_core::greedy::{find_good_ordering, r_statistic, AmisLca, AmisParams, LsOutcome};
use lca_core::matching::{LineGraphMatching, MatchingLca, MmParams, DEFAULT_CM};
use lca_core::pseudorandom::{RandomOrdering, SeedBundle};
use lca_core::verify::{
    components, greedy_mis_global, max_matching_exact, verify_matching, verify_mis, Verdict, MAX_EXACT_VERTICES,
};
use lca_core::weak_mis::{MemoScope, MisParams, TriState, WeakMisLca};
use lca_core::LcaError;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{AnswerKind, Command, MmMethod, RunConfig};
use crate::error::{is_reported, CliError, EXIT_ALGORITHM, EXIT_CHECK_FAILED, EXIT_OK};
use crate::table::Table;

/// Output of one run.
#[derive(Clone, Debug)]
pub struct Report {
    pub table: Table,
    /// Repetitions that ended in COMPONENT_TOO_LARGE or PHASE1_ERROR.
    pub algorithm_errors: u64,
    /// Repetitions or inputs whose output failed verification.
    pub failed_checks: u64,
    /// Human-readable summary lines.
    pub notes: Vec<String>,
}

impl Report {
    fn new(table: Table) -> Self {
        Report {
            table,
            algorithm_errors: 0,
            failed_checks: 0,
            notes: Vec::new(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.failed_checks > 0 {
            EXIT_CHECK_FAILED
        } else if self.algorithm_errors > 0 {
            EXIT_ALGORITHM
        } else {
            EXIT_OK
        }
    }

    pub fn render(&self, config: &RunConfig) -> String {
        self.table.render(config.format)
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(text) = std::env::var("LCA_THREADS") {
        let threads: usize = text
            .trim()
            .parse()
            .ok()
            .filter(|&t| t >= 1)
            .ok_or_else(|| CliError::validation("LCA_THREADS", format!("expected a positive integer, got {text:?}")))?;
        builder = builder.num_threads(threads);
    }
    builder.build().map_err(|e| CliError::Io(e.to_string()))
}

/// Runs `config` and returns its report.
pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    config.validate()?;
    thread_pool()?.install(|| match config.command {
        Command::Mis | Command::MisSweep => run_mis(config),
        Command::ComponentStats => run_component_stats(config),
        Command::Mm => run_mm(config),
        Command::Amis => run_amis(config),
        Command::Amm => run_amm(config),
        Command::RDist => run_r_dist(config),
        Command::Verify => run_verify(config),
    })
}

/// One `(degree bound, repetition)` cell of a run. `None` keeps the graph's bound.
fn grid(config: &RunConfig) -> Vec<(Option<usize>, u32)> {
    let ds: Vec<Option<usize>> = if config.d.is_empty() {
        vec![None]
    } else {
        config.d.iter().copied().map(Some).collect()
    };
    ds.into_iter()
        .flat_map(|d| (0..config.reps).map(move |rep| (d, rep)))
        .collect()
}

fn par_grid<T, F>(config: &RunConfig, f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(Option<usize>, u32) -> Result<T, CliError> + Sync,
{
    grid(config).into_par_iter().map(|(d, rep)| f(d, rep)).collect()
}

/// Indices probed with isolated (per-query memo) queries: all of them when
/// `count >= len`, else `count` uniform draws.
fn probe_indices(len: usize, count: u64, seed: &SeedBundle) -> Vec<usize> {
    if len == 0 {
        return Vec::new();
    }
    if count as usize >= len {
        return (0..len).collect();
    }
    let mut stream = seed.stream("query-sample");
    (0..count).map(|_| stream.uniform_below(len as u64) as usize).collect()
}

#[derive(Clone, Copy, Debug, Default)]
struct CostSummary {
    mean: f64,
    max: u64,
    normalized_mean: f64,
}

fn summarize(raw: &[u64], normalized: &[u64]) -> CostSummary {
    if raw.is_empty() {
        return CostSummary::default();
    }
    CostSummary {
        mean: raw.iter().sum::<u64>() as f64 / raw.len() as f64,
        max: raw.iter().copied().max().unwrap_or(0),
        normalized_mean: normalized.iter().sum::<u64>() as f64 / normalized.len().max(1) as f64,
    }
}

fn opt<T: Into<Value>>(x: Option<T>) -> Value {
    x.map_or(Value::Null, Into::into)
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

fn is_independent(g: &GraphStore, yes: &[bool]) -> bool {
    g.edges().all(|e| !(yes[e.lo().index()] && yes[e.hi().index()]))
}

// ---------------------------------------------------------------------------
// MIS

struct MisRun {
    rep: u32,
    seed: SeedBundle,
    g: GraphStore,
    params: MisParams,
    answers: Vec<bool>,
    error: Option<String>,
    valid: Option<bool>,
    residual: BTreeMap<usize, usize>,
    cost: CostSummary,
    seed_bits: u64,
}

impl MisRun {
    fn max_component(&self) -> usize {
        self.residual.keys().next_back().copied().unwrap_or(0)
    }

    fn residual_vertices(&self) -> usize {
        self.residual.iter().map(|(size, count)| size * count).sum()
    }
}

fn mis_rep(config: &RunConfig, d: Option<usize>, rep: u32) -> Result<MisRun, CliError> {
    let seed = config.rep_seed(rep);
    let g = config.load_graph(&seed, d)?;
    let params = MisParams::new(g.n(), g.d(), config.c1)?;
    let oracle = CountingOracle::new(&g);
    let lca = WeakMisLca::new(&oracle, params.clone(), &seed, MemoScope::Shared)?;
    let mut bottom = vec![false; g.n()];
    for v in g.vertices() {
        bottom[v.index()] = lca.phase1(v)? == TriState::Bottom;
    }
    let residual = components(&g, |v| bottom[v.index()]);
    let mut answers = Vec::with_capacity(g.n());
    let mut error = None;
    for v in g.vertices() {
        match lca.query(v) {
            Ok(a) => answers.push(a),
            Err(e) if is_reported(&e) => {
                error = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let valid = error.is_none().then(|| {
        let set: Vec<VertexId> = g.vertices().filter(|v| answers[v.index()]).collect();
        verify_mis(&g, &set).is_pass()
    });

    let probe_oracle = CountingOracle::new(&g);
    let probe = WeakMisLca::new(&probe_oracle, params.clone(), &seed, MemoScope::PerQuery)?;
    let (mut raw, mut normalized) = (Vec::new(), Vec::new());
    for idx in probe_indices(g.n(), config.query_sample, &seed) {
        let (_, stats) = probe.query_with_stats(VertexId::new(idx as u32 + 1));
        raw.push(stats.tally.raw());
        normalized.push(stats.tally.normalized(g.d()));
    }
    Ok(MisRun {
        rep,
        seed_bits: lca.bits().seed_bits(),
        seed,
        params,
        answers,
        error,
        valid,
        residual,
        cost: summarize(&raw, &normalized),
        g,
    })
}

const MIS_COLUMNS: &[&str] = &[
    "rep",
    "seed",
    "n",
    "m",
    "d",
    "c1",
    "iterations",
    "stages",
    "component_cap",
    "yes",
    "valid",
    "residual",
    "max_component",
    "within_cap",
    "queries_mean",
    "queries_max",
    "queries_norm_mean",
    "seed_bits",
    "error",
];

fn run_mis(config: &RunConfig) -> Result<Report, CliError> {
    let runs = par_grid(config, |d, rep| mis_rep(config, d, rep))?;
    let mut report = if config.emit_answers {
        let mut t = Table::new(config.schema(), &["rep", "d", "vertex", "answer"]);
        for r in &runs {
            for (i, &a) in r.answers.iter().enumerate() {
                t.push(vec![json!(r.rep), json!(r.g.d()), json!(i + 1), json!(yes_no(a))]);
            }
        }
        Report::new(t)
    } else {
        let mut t = Table::new(config.schema(), MIS_COLUMNS);
        for r in &runs {
            t.push(vec![
                json!(r.rep),
                json!(r.seed.master().to_hex()),
                json!(r.g.n()),
                json!(r.g.m()),
                json!(r.g.d()),
                json!(r.params.c1),
                json!(r.params.iterations),
                json!(r.params.stages),
                json!(r.params.component_cap),
                json!(r.answers.iter().filter(|&&a| a).count()),
                opt(r.valid),
                json!(r.residual_vertices()),
                json!(r.max_component()),
                json!(r.max_component() as u64 <= r.params.component_cap),
                json!(r.cost.mean),
                json!(r.cost.max),
                json!(r.cost.normalized_mean),
                json!(r.seed_bits),
                opt(r.error.clone()),
            ]);
        }
        Report::new(t)
    };
    tally_runs(&mut report, runs.iter().map(|r| (r.error.is_some(), r.valid == Some(false))));
    Ok(report)
}

fn run_component_stats(config: &RunConfig) -> Result<Report, CliError> {
    let runs = par_grid(config, |d, rep| mis_rep(config, d, rep))?;
    let mut t = Table::new(config.schema(), &["rep", "d", "n", "component_cap", "size", "count"]);
    for r in &runs {
        for (&size, &count) in &r.residual {
            t.push(vec![
                json!(r.rep),
                json!(r.g.d()),
                json!(r.g.n()),
                json!(r.params.component_cap),
                json!(size),
                json!(count),
            ]);
        }
    }
    let mut report = Report::new(t);
    tally_runs(&mut report, runs.iter().map(|r| (r.error.is_some(), r.valid == Some(false))));
    Ok(report)
}

fn tally_runs(report: &mut Report, outcomes: impl Iterator<Item = (bool, bool)>) {
    let mut total = 0;
    for (errored, failed) in outcomes {
        total += 1;
        report.algorithm_errors += errored as u64;
        report.failed_checks += failed as u64;
    }
    report.notes.push(format!(
        "{total} runs, {} algorithm errors, {} failed checks",
        report.algorithm_errors, report.failed_checks
    ));
}

fn yes_no(a: bool) -> &'static str {
    if a {
        "YES"
    } else {
        "NO"
    }
}

// ---------------------------------------------------------------------------
// Maximal matching

struct EdgeRun {
    rep: u32,
    seed: SeedBundle,
    g: GraphStore,
    edges: Vec<EdgeId>,
    answers: Vec<bool>,
    error: Option<String>,
    valid: Option<bool>,
    cost: CostSummary,
    seed_bits: u64,
}

fn answer_edges(
    edges: &[EdgeId],
    query: impl Fn(EdgeId) -> Result<bool, LcaError>,
) -> Result<(Vec<bool>, Option<String>), CliError> {
    let mut answers = Vec::with_capacity(edges.len());
    for &e in edges {
        match query(e) {
            Ok(a) => answers.push(a),
            Err(e) if is_reported(&e) => return Ok((answers, Some(e.to_string()))),
            Err(e) => return Err(e.into()),
        }
    }
    Ok((answers, None))
}

fn mm_rep(config: &RunConfig, d: Option<usize>, rep: u32) -> Result<EdgeRun, CliError> {
    let seed = config.rep_seed(rep);
    let g = config.load_graph(&seed, d)?;
    let edges: Vec<EdgeId> = g.edges().collect();
    let oracle = CountingOracle::new(&g);
    let probe_oracle = CountingOracle::new(&g);
    let probes = probe_indices(edges.len(), config.query_sample, &seed);
    let (mut raw, mut normalized) = (Vec::new(), Vec::new());
    let (answers, error, seed_bits) = match config.method {
        MmMethod::LineGraph => {
            let lca = LineGraphMatching::new(&oracle, config.c1, &seed, MemoScope::Shared)?;
            let (answers, error) = answer_edges(&edges, |e| lca.query(e))?;
            let probe = LineGraphMatching::new(&probe_oracle, config.c1, &seed, MemoScope::PerQuery)?;
            for &i in &probes {
                let (_, stats) = probe.query_with_stats(edges[i]);
                raw.push(stats.tally.raw());
                normalized.push(stats.tally.normalized(g.d()));
            }
            (answers, error, lca.mis().bits().seed_bits())
        }
        MmMethod::IsraeliItai => {
            let params = MmParams::new(g.n(), g.d(), config.c2, DEFAULT_CM)?;
            let lca = MatchingLca::new(&oracle, params.clone(), &seed, MemoScope::Shared)?;
            let (answers, error) = answer_edges(&edges, |e| lca.query(e))?;
            let probe = MatchingLca::new(&probe_oracle, params, &seed, MemoScope::PerQuery)?;
            for &i in &probes {
                let (_, stats) = probe.query_with_stats(edges[i]);
                raw.push(stats.tally.raw());
                normalized.push(stats.tally.normalized(g.d()));
            }
            (answers, error, lca.bits().seed_bits())
        }
    };
    let valid = error.is_none().then(|| {
        let set: Vec<EdgeId> = edges.iter().zip(&answers).filter(|(_, &a)| a).map(|(&e, _)| e).collect();
        verify_matching(&g, &set, true).is_pass()
    });
    Ok(EdgeRun {
        rep,
        seed,
        g,
        edges,
        answers,
        error,
        valid,
        cost: summarize(&raw, &normalized),
        seed_bits,
    })
}

fn edge_answer_table(config: &RunConfig, runs: &[EdgeRun]) -> Table {
    let mut t = Table::new(config.schema(), &["rep", "d", "u", "v", "answer"]);
    for r in runs {
        for (e, &a) in r.edges.iter().zip(&r.answers) {
            t.push(vec![
                json!(r.rep),
                json!(r.g.d()),
                json!(e.lo().get()),
                json!(e.hi().get()),
                json!(yes_no(a)),
            ]);
        }
    }
    t
}

fn run_mm(config: &RunConfig) -> Result<Report, CliError> {
    let runs = par_grid(config, |d, rep| mm_rep(config, d, rep))?;
    let mut report = if config.emit_answers {
        Report::new(edge_answer_table(config, &runs))
    } else {
        let method = match config.method {
            MmMethod::LineGraph => "line-graph",
            MmMethod::IsraeliItai => "israeli-itai",
        };
        let mut t = Table::new(
            config.schema(),
            &[
                "rep",
                "seed",
                "method",
                "n",
                "m",
                "d",
                "matched",
                "valid",
                "queries_mean",
                "queries_max",
                "queries_norm_mean",
                "seed_bits",
                "error",
            ],
        );
        for r in &runs {
            t.push(vec![
                json!(r.rep),
                json!(r.seed.master().to_hex()),
                json!(method),
                json!(r.g.n()),
                json!(r.g.m()),
                json!(r.g.d()),
                json!(r.answers.iter().filter(|&&a| a).count()),
                opt(r.valid),
                json!(r.cost.mean),
                json!(r.cost.max),
                json!(r.cost.normalized_mean),
                json!(r.seed_bits),
                opt(r.error.clone()),
            ]);
        }
        Report::new(t)
    };
    tally_runs(&mut report, runs.iter().map(|r| (r.error.is_some(), r.valid == Some(false))));
    Ok(report)
}

// ---------------------------------------------------------------------------
// Approximate MIS

/// Ordering metadata shared by the two approximation commands.
#[derive(Default)]
struct Phase1Meta {
    draw: Option<u64>,
    draws_tested: usize,
    ell: Option<u64>,
    p_tilde: Option<f64>,
    threshold: f64,
    seed_bits: u64,
}

struct AmisRun {
    rep: u32,
    seed: SeedBundle,
    g: GraphStore,
    meta: Phase1Meta,
    answers: Vec<bool>,
    greedy: usize,
    independent: bool,
    subset: bool,
    truncated: usize,
    calls: CostSummary,
    error: Option<String>,
}

fn amis_rep(config: &RunConfig, d: Option<usize>, rep: u32) -> Result<AmisRun, CliError> {
    let seed = config.rep_seed(rep);
    let g = config.load_graph(&seed, d)?;
    let eps = config.eps.expect("validated");
    let params = AmisParams::new(g.n(), g.m(), g.d(), eps, config.delta)?;
    let oracle = CountingOracle::new(&g);
    let mut meta = Phase1Meta {
        threshold: params.threshold(),
        ..Phase1Meta::default()
    };
    let mut run = AmisRun {
        rep,
        seed,
        g: GraphStore::edgeless(0, 0),
        meta: Phase1Meta::default(),
        answers: Vec::new(),
        greedy: 0,
        independent: true,
        subset: true,
        truncated: 0,
        calls: CostSummary::default(),
        error: None,
    };
    let (ordering, ell) = match config.ell {
        Some(ell) => {
            let o = RandomOrdering::for_vertices(g.n() as u64, AmisParams::ordering_independence(ell), &seed, 0)
                .map_err(LcaError::from)?;
            meta.seed_bits = o.seed_bits();
            (o, ell)
        }
        None => match find_good_ordering(&oracle, &params, &seed) {
            Ok(good) => {
                meta.draws_tested = good.draws.len();
                meta.p_tilde = Some(good.p_tilde);
                meta.seed_bits = good.seed_bits;
                (good.ordering, good.ell)
            }
            Err(e) if is_reported(&e) => {
                run.error = Some(e.to_string());
                run.meta = meta;
                run.g = g;
                return Ok(run);
            }
            Err(e) => return Err(e.into()),
        },
    };
    meta.draw = Some(ordering.draw());
    meta.ell = Some(ell);
    let lca = AmisLca::new(&oracle, &ordering, ell);
    let mut answers = Vec::with_capacity(g.n());
    let mut calls = Vec::with_capacity(g.n());
    for v in g.vertices() {
        let r = lca.simulate(v)?;
        answers.push(r.outcome == LsOutcome::Yes);
        run.truncated += (r.outcome == LsOutcome::Truncated) as usize;
        calls.push(r.calls);
    }
    let order: Vec<VertexId> = ordering
        .permutation()
        .into_iter()
        .map(|x| VertexId::new(x as u32))
        .collect();
    let greedy = greedy_mis_global(&g, &order);
    let in_greedy: BTreeSet<VertexId> = greedy.iter().copied().collect();
    run.subset = g.vertices().all(|v| !answers[v.index()] || in_greedy.contains(&v));
    run.independent = is_independent(&g, &answers);
    run.greedy = greedy.len();
    run.calls = summarize(&calls, &calls);
    run.answers = answers;
    run.meta = meta;
    run.g = g;
    Ok(run)
}

fn run_amis(config: &RunConfig) -> Result<Report, CliError> {
    let runs = par_grid(config, |d, rep| amis_rep(config, d, rep))?;
    let eps = config.eps.expect("validated");
    let mut report = if config.emit_answers {
        let mut t = Table::new(config.schema(), &["rep", "d", "vertex", "answer"]);
        for r in &runs {
            for (i, &a) in r.answers.iter().enumerate() {
                t.push(vec![json!(r.rep), json!(r.g.d()), json!(i + 1), json!(yes_no(a))]);
            }
        }
        Report::new(t)
    } else {
        let mut t = Table::new(
            config.schema(),
            &[
                "rep",
                "seed",
                "n",
                "m",
                "d",
                "eps",
                "delta",
                "draw",
                "draws_tested",
                "ell",
                "p_tilde",
                "threshold",
                "yes",
                "greedy",
                "ratio",
                "independent",
                "subset",
                "truncated",
                "calls_mean",
                "calls_max",
                "seed_bits",
                "error",
            ],
        );
        for r in &runs {
            let ok = r.error.is_none();
            let yes = r.answers.iter().filter(|&&a| a).count();
            t.push(vec![
                json!(r.rep),
                json!(r.seed.master().to_hex()),
                json!(r.g.n()),
                json!(r.g.m()),
                json!(r.g.d()),
                json!(eps),
                json!(config.delta),
                opt(r.meta.draw),
                json!(r.meta.draws_tested),
                opt(r.meta.ell),
                opt(r.meta.p_tilde),
                json!(r.meta.threshold),
                opt(ok.then_some(yes)),
                opt(ok.then_some(r.greedy)),
                opt(ok.then(|| ratio(yes, r.greedy))),
                opt(ok.then_some(r.independent)),
                opt(ok.then_some(r.subset)),
                opt(ok.then_some(r.truncated)),
                opt(ok.then_some(r.calls.mean)),
                opt(ok.then_some(r.calls.max)),
                json!(r.meta.seed_bits),
                opt(r.error.clone()),
            ]);
        }
        Report::new(t)
    };
    tally_runs(
        &mut report,
        runs.iter().map(|r| (r.error.is_some(), !(r.independent && r.subset))),
    );
    Ok(report)
}

// ---------------------------------------------------------------------------
// Approximate maximum matching

struct AmmRun {
    edge: EdgeRun,
    k: u32,
    meta: Phase1Meta,
    optimum: Option<usize>,
    truncated: usize,
}

fn amm_rep(config: &RunConfig, d: Option<usize>, rep: u32) -> Result<AmmRun, CliError> {
    let seed = config.rep_seed(rep);
    let g = config.load_graph(&seed, d)?;
    let eps = config.eps.expect("validated");
    let params = match config.k {
        Some(k) => AmmParams::with_k(g.n(), g.m(), g.d(), eps, config.delta, k)?,
        None => AmmParams::new(g.n(), g.m(), g.d(), eps, config.delta)?,
    };
    let edges: Vec<EdgeId> = g.edges().collect();
    let oracle = CountingOracle::new(&g);
    let mut meta = Phase1Meta {
        threshold: params.threshold(),
        ..Phase1Meta::default()
    };
    let phase1 = match config.ell {
        Some(ell) => {
            let o = PathOrdering::new(g.n(), params.k, AmmParams::ordering_independence(ell), &seed, 0)?;
            meta.seed_bits = o.seed_bits();
            Ok((o, ell))
        }
        None => match find_good_ordering_vector(&oracle, &params, &seed) {
            Ok(good) => {
                meta.draws_tested = good.draws.len();
                meta.p_tilde = Some(good.p_tilde);
                meta.seed_bits = good.seed_bits;
                Ok((good.ordering, good.ell))
            }
            Err(e) if is_reported(&e) => Err(e.to_string()),
            Err(e) => return Err(e.into()),
        },
    };
    let mut run = AmmRun {
        edge: EdgeRun {
            rep,
            seed,
            g: GraphStore::edgeless(0, 0),
            edges: Vec::new(),
            answers: Vec::new(),
            error: None,
            valid: None,
            cost: CostSummary::default(),
            seed_bits: 0,
        },
        k: params.k,
        meta: Phase1Meta::default(),
        optimum: None,
        truncated: 0,
    };
    if g.n() <= MAX_EXACT_VERTICES {
        run.optimum = Some(max_matching_exact(&g)?.len());
    }
    match phase1 {
        Ok((ordering, ell)) => {
            meta.draw = Some(ordering.draw());
            meta.ell = Some(ell);
            let lca = AmmLca::new(&oracle, &ordering, ell, MemoScope::Shared);
            let mut calls = Vec::with_capacity(edges.len());
            for &e in &edges {
                let r = lca.simulate(e)?;
                run.edge.answers.push(r.outcome == AmmOutcome::Yes);
                run.truncated += (r.outcome == AmmOutcome::Truncated) as usize;
                calls.push(r.calls);
            }
            let set: Vec<EdgeId> = edges
                .iter()
                .zip(&run.edge.answers)
                .filter(|(_, &a)| a)
                .map(|(&e, _)| e)
                .collect();
            run.edge.valid = Some(verify_matching(&g, &set, false).is_pass());
            run.edge.cost = summarize(&calls, &calls);
        }
        Err(msg) => run.edge.error = Some(msg),
    }
    run.edge.seed_bits = meta.seed_bits;
    run.meta = meta;
    run.edge.edges = edges;
    run.edge.g = g;
    Ok(run)
}

fn run_amm(config: &RunConfig) -> Result<Report, CliError> {
    let runs = par_grid(config, |d, rep| amm_rep(config, d, rep))?;
    let eps = config.eps.expect("validated");
    let mut report = if config.emit_answers {
        let edge_runs: Vec<EdgeRun> = runs.into_iter().map(|r| r.edge).collect();
        let mut report = Report::new(edge_answer_table(config, &edge_runs));
        tally_runs(
            &mut report,
            edge_runs.iter().map(|r| (r.error.is_some(), r.valid == Some(false))),
        );
        return Ok(report);
    } else {
        let mut t = Table::new(
            config.schema(),
            &[
                "rep",
                "seed",
                "n",
                "m",
                "d",
                "eps",
                "k",
                "draw",
                "draws_tested",
                "ell",
                "p_tilde",
                "threshold",
                "matched",
                "optimum",
                "ratio",
                "valid",
                "truncated_fraction",
                "calls_mean",
                "calls_max",
                "seed_bits",
                "error",
            ],
        );
        for r in &runs {
            let e = &r.edge;
            let ok = e.error.is_none();
            let matched = e.answers.iter().filter(|&&a| a).count();
            t.push(vec![
                json!(e.rep),
                json!(e.seed.master().to_hex()),
                json!(e.g.n()),
                json!(e.g.m()),
                json!(e.g.d()),
                json!(eps),
                json!(r.k),
                opt(r.meta.draw),
                json!(r.meta.draws_tested),
                opt(r.meta.ell),
                opt(r.meta.p_tilde),
                json!(r.meta.threshold),
                opt(ok.then_some(matched)),
                opt(r.optimum),
                opt(r.optimum.filter(|_| ok).map(|opt| ratio(matched, opt))),
                opt(e.valid),
                opt(ok.then(|| ratio(r.truncated, e.g.m()))),
                opt(ok.then_some(e.cost.mean)),
                opt(ok.then_some(e.cost.max)),
                json!(e.seed_bits),
                opt(e.error.clone()),
            ]);
        }
        Report::new(t)
    };
    tally_runs(
        &mut report,
        runs.iter().map(|r| (r.edge.error.is_some(), r.edge.valid == Some(false))),
    );
    Ok(report)
}

// ---------------------------------------------------------------------------
// Query-cost distribution of the greedy simulation

fn run_r_dist(config: &RunConfig) -> Result<Report, CliError> {
    let rows = par_grid(config, |d, rep| {
        let seed = config.rep_seed(rep);
        let g = config.load_graph(&seed, d)?;
        if g.n() == 0 {
            return Err(CliError::validation("graph", "r-dist needs at least one vertex"));
        }
        let stat = r_statistic(CountingOracle::new(&g), config.samples, &seed)?;
        let bound = 1.0 + g.m() as f64 / g.n() as f64;
        Ok(vec![
            json!(rep),
            json!(seed.master().to_hex()),
            json!(g.n()),
            json!(g.m()),
            json!(g.d()),
            json!(stat.samples),
            json!(stat.mean),
            json!(stat.std_err),
            json!(stat.max),
            json!(bound),
            json!(stat.mean <= bound + 3.0 * stat.std_err),
        ])
    })?;
    let mut t = Table::new(
        config.schema(),
        &["rep", "seed", "n", "m", "d", "samples", "mean", "std_err", "max", "bound", "within"],
    );
    for row in rows {
        t.push(row);
    }
    Ok(Report::new(t))
}

// ---------------------------------------------------------------------------
// Verification of saved answers

#[derive(Debug, PartialEq, Eq)]
enum Item {
    Vertex(u32),
    Edge(u32, u32),
}

/// Reads an answers CSV as written with `--emit-answers`. Lines starting with
/// `#` are skipped; when a `rep` column is present only the lowest repetition
/// is kept.
fn read_answers(text: &str) -> Result<Vec<(Item, bool)>, CliError> {
    let bad = |reason: String| CliError::validation("answers", reason);
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let answer = col("answer").ok_or_else(|| bad("missing column \"answer\"".into()))?;
    let (vertex, u, v, rep) = (col("vertex"), col("u"), col("v"), col("rep"));
    if vertex.is_none() && (u.is_none() || v.is_none()) {
        return Err(bad("need a \"vertex\" column or \"u\" and \"v\" columns".into()));
    }
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let field = |i: usize| record.get(i).unwrap_or("").trim();
        let int = |i: usize| {
            field(i)
                .parse::<u32>()
                .map_err(|_| bad(format!("row {}: expected an integer, got {:?}", line + 1, field(i))))
        };
        let rep_value = rep.map(int).transpose()?.unwrap_or(0);
        let item = match vertex {
            Some(c) => Item::Vertex(int(c)?),
            None => Item::Edge(int(u.unwrap())?, int(v.unwrap())?),
        };
        let yes = match field(answer).to_ascii_uppercase().as_str() {
            "YES" | "TRUE" | "1" => true,
            "NO" | "FALSE" | "0" => false,
            other => return Err(bad(format!("row {}: unknown answer {other:?}", line + 1))),
        };
        rows.push((rep_value, item, yes));
    }
    let first = rows.iter().map(|r| r.0).min().unwrap_or(0);
    Ok(rows
        .into_iter()
        .filter(|r| r.0 == first)
        .map(|(_, item, yes)| (item, yes))
        .collect())
}

fn run_verify(config: &RunConfig) -> Result<Report, CliError> {
    let seed = config.rep_seed(0);
    let g = config.load_graph(&seed, config.d.first().copied())?;
    let path = config.answers.as_ref().expect("validated");
    let text = fs::read_to_string(path).map_err(|e| CliError::validation("answers", format!("{}: {e}", path.display())))?;
    let answers = read_answers(&text)?;
    let kind = config.kind.expect("validated");
    let (verdict, relaxed, yes) = match kind {
        AnswerKind::Mis => {
            let mut set = Vec::new();
            for (item, a) in &answers {
                match *item {
                    Item::Vertex(x) if x >= 1 && x as usize <= g.n() => {
                        if *a {
                            set.push(VertexId::new(x));
                        }
                    }
                    Item::Vertex(x) => return Err(CliError::validation("answers", format!("vertex {x} is out of range"))),
                    Item::Edge(..) => return Err(CliError::validation("answers", "expected vertex answers")),
                }
            }
            set.sort_unstable();
            set.dedup();
            let mut flags = vec![false; g.n()];
            for v in &set {
                flags[v.index()] = true;
            }
            (verify_mis(&g, &set), is_independent(&g, &flags), set.len())
        }
        AnswerKind::Matching => {
            let mut set = Vec::new();
            for (item, a) in &answers {
                match *item {
                    Item::Edge(u, v) => {
                        if *a {
                            set.push(EdgeId::from_raw(u, v));
                        }
                    }
                    Item::Vertex(_) => return Err(CliError::validation("answers", "expected edge answers")),
                }
            }
            set.sort_unstable();
            set.dedup();
            let relaxed = verify_matching(&g, &set, false).is_pass();
            (verify_matching(&g, &set, true), relaxed, set.len())
        }
    };
    let mut t = Table::new(
        config.schema(),
        &["kind", "n", "m", "items", "yes", "verdict", "witness", "valid_ignoring_maximality"],
    );
    t.push(vec![
        json!(match kind {
            AnswerKind::Mis => "mis",
            AnswerKind::Matching => "matching",
        }),
        json!(g.n()),
        json!(g.m()),
        json!(answers.len()),
        json!(yes),
        json!(if verdict.is_pass() { "PASS" } else { "FAIL" }),
        opt(verdict.witness().map(|w| w.to_string())),
        json!(relaxed),
    ]);
    let mut report = Report::new(t);
    if let Verdict::Fail(w) = &verdict {
        report.failed_checks = 1;
        report.notes.push(format!("FAIL: {w}"));
    } else {
        report.notes.push("PASS".into());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn answers_parse_with_schema_line_and_reps() {
        let text = "# schema: lca.mis-answers/v1\nrep,d,vertex,answer\n0,2,1,YES\n0,2,2,NO\n1,2,1,NO\n";
        assert_eq!(
            read_answers(text).unwrap(),
            vec![(Item::Vertex(1), true), (Item::Vertex(2), false)]
        );
        let edges = "u,v,answer\n1,2,true\n";
        assert_eq!(read_answers(edges).unwrap(), vec![(Item::Edge(1, 2), true)]);
        assert!(read_answers("vertex\n1\n").is_err());
        assert!(read_answers("vertex,answer\n1,maybe\n").is_err());
    }

    #[test]
    fn exit_code_prefers_failed_checks() {
        let mut r = Report::new(Table::new("lca.test/v1", &["a"]));
        assert_eq!(r.exit_code(), EXIT_OK);
        r.algorithm_errors = 2;
        assert_eq!(r.exit_code(), EXIT_ALGORITHM);
        r.failed_checks = 1;
        assert_eq!(r.exit_code(), EXIT_CHECK_FAILED);
    }

    #[test]
    fn probes_are_deterministic() {
        let s = SeedBundle::new(lca_core::MasterSeed::from_u64(1));
        assert_eq!(probe_indices(5, 10, &s), vec![0, 1, 2, 3, 4]);
        let a = probe_indices(1000, 10, &s);
        assert_eq!(a, probe_indices(1000, 10, &s));
        assert!(a.iter().all(|&i| i < 1000));
    }
}
