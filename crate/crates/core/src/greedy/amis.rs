use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::simulate::{LsMis, LsOutcome, Permutation};
use crate::error::LcaError;
use crate::graph::{Oracle, OracleError, VertexId};
use crate::pseudorandom::{CachedOrdering, RandomOrdering, SeedBundle};
use crate::weak_mis::ceil_tolerant;

pub const DEFAULT_DELTA: f64 = 0.01;
/// Largest independence used for a vertex ordering; budgets above it reuse it.
pub const MAX_ORDERING_INDEPENDENCE: u64 = 4096;

/// Constants of the approximate-MIS LCA, derived from `(n, m, d, eps, delta)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmisParams {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub eps: f64,
    pub delta: f64,
    /// `eps / d`.
    pub gamma: f64,
    /// `m/n + 1`.
    pub t: f64,
    /// Initial call budget `ceil(6t/eps)`.
    pub ell0: u64,
    /// Ordering draws per budget: `ceil(4 log2(1/delta))`.
    pub trials: u64,
    /// Sampled vertices: `ceil(32 ln(4T/delta) / gamma^2)`.
    pub sample_size: u64,
    /// Budget doublings allowed after the first round: `ceil(log2 n)`.
    pub doublings: u32,
}

pub(crate) fn check_eps_delta(eps: f64, delta: f64) -> Result<(), LcaError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(LcaError::InvalidParameter {
            field: "eps",
            reason: format!("must lie in (0, 1], got {eps}"),
        });
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(LcaError::InvalidParameter {
            field: "delta",
            reason: format!("must lie in (0, 1), got {delta}"),
        });
    }
    Ok(())
}

pub(crate) fn sample_size(trials: u64, delta: f64, gamma: f64) -> u64 {
    ceil_tolerant(32.0 * (4.0 * trials as f64 / delta).ln() / (gamma * gamma)) as u64
}

pub(crate) fn trials(delta: f64) -> u64 {
    (ceil_tolerant(4.0 * (1.0 / delta).log2()) as u64).max(1)
}

impl AmisParams {
    pub fn new(n: usize, m: usize, d: usize, eps: f64, delta: f64) -> Result<Self, LcaError> {
        check_eps_delta(eps, delta)?;
        if n == 0 {
            return Err(LcaError::InvalidParameter {
                field: "n",
                reason: "graph has no vertices".into(),
            });
        }
        let gamma = eps / d.max(1) as f64;
        let t = m as f64 / n as f64 + 1.0;
        let ell0 = ceil_tolerant(6.0 * t / eps) as u64;
        let trials = trials(delta);
        Ok(AmisParams {
            n,
            m,
            d,
            eps,
            delta,
            gamma,
            t,
            ell0,
            trials,
            sample_size: sample_size(trials, delta, gamma),
            doublings: super::super::weak_mis::ceil_log2(n as u64),
        })
    }

    /// Acceptance threshold `3 gamma / 4` on the sampled truncation fraction.
    pub fn threshold(&self) -> f64 {
        0.75 * self.gamma
    }

    /// Independence of the ordering used at budget `ell`.
    pub fn ordering_independence(ell: u64) -> usize {
        ell.clamp(1, MAX_ORDERING_INDEPENDENCE) as usize
    }
}

/// One tested ordering draw.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrawReport {
    pub draw: u64,
    pub ell: u64,
    pub p_tilde: f64,
    pub accepted: bool,
}

/// The ordering chosen by Phase 1 and how it was found.
#[derive(Clone, Debug)]
pub struct GoodOrdering {
    pub ordering: RandomOrdering,
    pub ell: u64,
    pub p_tilde: f64,
    pub draws: Vec<DrawReport>,
    /// Seed bits consumed: all tested orderings plus the vertex sample.
    pub seed_bits: u64,
}

impl GoodOrdering {
    pub fn draw(&self) -> u64 {
        self.ordering.draw()
    }
}

/// Multiset of sampled vertices as `(vertex, multiplicity)` in ascending order.
pub fn sample_vertices(n: usize, size: u64, seed: &SeedBundle) -> (Vec<(VertexId, u64)>, u64) {
    let mut stream = seed.sample();
    let mut counts = vec![0u64; n];
    for _ in 0..size {
        counts[stream.uniform_below(n as u64) as usize] += 1;
    }
    let sample = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(idx, &c)| (VertexId::new(idx as u32 + 1), c))
        .collect();
    (sample, stream.consumed())
}

/// Phase 1: draws orderings until the sampled fraction of vertices needing more
/// than `ell` calls falls below `3 gamma / 4`, doubling `ell` after each round
/// of `trials` failures.
pub fn find_good_ordering<O>(oracle: O, params: &AmisParams, seed: &SeedBundle) -> Result<GoodOrdering, LcaError>
where
    O: Oracle<Vertex = VertexId>,
{
    let (sample, mut seed_bits) = sample_vertices(params.n, params.sample_size, seed);
    let mut draws = Vec::new();
    let mut ell = params.ell0;
    let mut draw = 0u64;
    for _round in 0..=params.doublings {
        for _ in 0..params.trials {
            let k = AmisParams::ordering_independence(ell);
            let ordering = RandomOrdering::for_vertices(params.n as u64, k, seed, draw)?;
            seed_bits += ordering.seed_bits();
            let p_tilde = truncated_fraction(&oracle, &ordering, &sample, params.sample_size, ell)?;
            let accepted = p_tilde < params.threshold();
            draws.push(DrawReport {
                draw,
                ell,
                p_tilde,
                accepted,
            });
            draw += 1;
            if accepted {
                return Ok(GoodOrdering {
                    ordering,
                    ell,
                    p_tilde,
                    draws,
                    seed_bits,
                });
            }
        }
        ell = ell.saturating_mul(2);
    }
    Err(LcaError::Phase1Failed {
        draws: draw,
        ell: ell / 2,
    })
}

fn truncated_fraction<O>(
    oracle: &O,
    ordering: &RandomOrdering,
    sample: &[(VertexId, u64)],
    total: u64,
    ell: u64,
) -> Result<f64, OracleError>
where
    O: Oracle<Vertex = VertexId>,
{
    let ranks = CachedOrdering::new(ordering);
    let sim = LsMis::new(oracle, &ranks);
    let mut truncated = 0u64;
    for &(v, count) in sample {
        if sim.query(v, Some(ell))?.outcome == LsOutcome::Truncated {
            truncated += count;
        }
    }
    Ok(truncated as f64 / total.max(1) as f64)
}

/// Phase 2: greedy simulation under the chosen ordering, answering NO once the
/// call budget is exceeded.
pub struct AmisLca<'a, O: Oracle<Vertex = VertexId>> {
    sim: LsMis<O, CachedOrdering<'a>>,
    ell: u64,
}

impl<'a, O: Oracle<Vertex = VertexId>> AmisLca<'a, O> {
    pub fn new(oracle: O, ordering: &'a RandomOrdering, ell: u64) -> Self {
        AmisLca {
            sim: LsMis::new(oracle, CachedOrdering::new(ordering)),
            ell,
        }
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    /// The raw simulation result, truncation included.
    pub fn simulate(&self, v: VertexId) -> Result<super::LsResult, OracleError> {
        self.sim.query(v, Some(self.ell))
    }

    pub fn query(&self, v: VertexId) -> Result<bool, OracleError> {
        Ok(self.simulate(v)?.outcome == LsOutcome::Yes)
    }
}

/// Sample mean of `R` and its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RStatistic {
    pub samples: u64,
    pub mean: f64,
    pub std_err: f64,
    pub max: u64,
}

impl RStatistic {
    fn from_values(values: &[u64]) -> Self {
        let samples = values.len() as u64;
        let mean = values.iter().sum::<u64>() as f64 / samples.max(1) as f64;
        let var = if samples > 1 {
            values.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / (samples - 1) as f64
        } else {
            0.0
        };
        RStatistic {
            samples,
            mean,
            std_err: (var / samples.max(1) as f64).sqrt(),
            max: values.iter().copied().max().unwrap_or(0),
        }
    }
}

/// Mean of `R` over `samples` independent pairs of a uniformly random
/// permutation and a uniformly random vertex.
pub fn r_statistic<O>(oracle: O, samples: u64, seed: &SeedBundle) -> Result<RStatistic, OracleError>
where
    O: Oracle<Vertex = VertexId>,
{
    let n = oracle.vertex_count();
    let mut rng = ChaCha8Rng::from_seed(seed.child("r-statistic").master().as_bytes().to_owned());
    let mut order: Vec<VertexId> = (1..=n as u32).map(VertexId::new).collect();
    let mut values = Vec::with_capacity(samples as usize);
    for _ in 0..samples {
        order.shuffle(&mut rng);
        let pi = Permutation::from_sequence(&order);
        let v = *order.choose(&mut rng).expect("non-empty graph");
        values.push(LsMis::new(&oracle, &pi).query(v, None)?.calls);
    }
    Ok(RStatistic::from_values(&values))
}

/// Exact mean of `R` over all `n!` permutations and all vertices, as
/// `(total calls, number of pairs)`. Only for tiny graphs.
pub fn r_exhaustive<O>(oracle: O) -> Result<(u64, u64), OracleError>
where
    O: Oracle<Vertex = VertexId>,
{
    let n = oracle.vertex_count();
    assert!(n <= 9, "exhaustive enumeration is limited to 9 vertices");
    let mut order: Vec<VertexId> = (1..=n as u32).map(VertexId::new).collect();
    let mut total = 0u64;
    let mut pairs = 0u64;
    loop {
        let pi = Permutation::from_sequence(&order);
        let sim = LsMis::new(&oracle, &pi);
        for &v in &order {
            total += sim.query(v, None)?.calls;
            pairs += 1;
        }
        if !next_permutation(&mut order) {
            break;
        }
    }
    Ok((total, pairs))
}

fn next_permutation<T: Ord>(xs: &mut [T]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let mut i = xs.len() - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = xs.len() - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}
