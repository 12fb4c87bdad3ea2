use serde::{Deserialize, Serialize};

use super::{Verdict, Witness};
use crate::pseudorandom::{
    KWiseBits, KWiseValues, MasterSeed, Probability, RandomOrdering, SeedBundle, SlotBits,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandTestParams {
    /// `(k, m)` pairs checked by full seed enumeration.
    pub exhaustive: Vec<(usize, u64)>,
    /// Field width for the ordering test over four elements.
    pub ordering_width: u32,
    /// Seeds for the `1/q` frequency check.
    pub monte_carlo_seeds: u64,
    pub q: u64,
    pub monte_carlo_tolerance: f64,
}

impl Default for RandTestParams {
    fn default() -> Self {
        RandTestParams {
            exhaustive: vec![(2, 4), (2, 8), (3, 8)],
            ordering_width: 6,
            monte_carlo_seeds: 1_000_000,
            q: 3,
            monte_carlo_tolerance: 0.002,
        }
    }
}

fn ceil_log2(x: u64) -> u32 {
    (x as f64).log2().ceil() as u32
}

fn subsets(m: u64, k: usize) -> Vec<Vec<u64>> {
    fn rec(start: u64, m: u64, k: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..=m {
            cur.push(x);
            rec(x + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, m, k, &mut Vec::new(), &mut out);
    out
}

fn coefficient_vectors(k: usize, width: u32) -> impl Iterator<Item = Vec<u128>> {
    let total = 1u64 << (k as u32 * width);
    let mask = (1u128 << width) - 1;
    (0..total).map(move |code| {
        (0..k)
            .map(|j| ((code as u128) >> (j as u32 * width)) & mask)
            .collect()
    })
}

/// Every `k`-subset of the `m` bits takes each of its `2^k` patterns equally
/// often over all seeds of the `k * (ceil(log2 m) + 1)`-bit generator.
pub fn kwise_exhaustive(k: usize, m: u64) -> Verdict {
    let width = ceil_log2(m) + 1;
    let sets = subsets(m, k);
    let mut counts = vec![vec![0u64; 1 << k]; sets.len()];
    let mut seeds = 0u64;
    for coefficients in coefficient_vectors(k, width) {
        let bits = KWiseBits::from_values(m, KWiseValues::from_coefficients(width, coefficients).unwrap()).unwrap();
        let values: Vec<bool> = (1..=m).map(|i| bits.bit(i).unwrap()).collect();
        for (set, count) in sets.iter().zip(counts.iter_mut()) {
            let pattern = set
                .iter()
                .fold(0usize, |acc, &i| (acc << 1) | values[i as usize - 1] as usize);
            count[pattern] += 1;
        }
        seeds += 1;
    }
    let expected = seeds >> k;
    for (set, count) in sets.iter().zip(&counts) {
        if let Some(pattern) = count.iter().position(|&c| c != expected) {
            return Verdict::Fail(Witness::Detail(format!(
                "k={k} m={m}: bits {set:?} show pattern {pattern:0k$b} {} times, expected {expected}",
                count[pattern]
            )));
        }
    }
    Verdict::Pass
}

/// Over all 3-wise seeds at `width` bits, each relative order of each 3-subset
/// of four elements occurs with frequency within `3 / 2^width` of `1/6`; the
/// slack is the probability that two of the three ranks tie.
pub fn ordering_subset_frequencies(width: u32) -> Verdict {
    let n = 4u64;
    let tolerance = 3.0 / (1u64 << width) as f64;
    let sets = subsets(n, 3);
    let mut counts = vec![[0u64; 6]; sets.len()];
    let mut seeds = 0u64;
    for coefficients in coefficient_vectors(3, width) {
        let ordering =
            RandomOrdering::from_values(n as u128, KWiseValues::from_coefficients(width, coefficients).unwrap(), 0)
                .unwrap();
        for (set, count) in sets.iter().zip(counts.iter_mut()) {
            let mut keyed: Vec<_> = set
                .iter()
                .enumerate()
                .map(|(slot, &x)| (ordering.rank(x as u128).unwrap(), slot))
                .collect();
            keyed.sort_unstable();
            let order: Vec<usize> = keyed.into_iter().map(|(_, slot)| slot).collect();
            count[permutation_index(&order)] += 1;
        }
        seeds += 1;
    }
    for (set, count) in sets.iter().zip(&counts) {
        for (idx, &c) in count.iter().enumerate() {
            let freq = c as f64 / seeds as f64;
            if (freq - 1.0 / 6.0).abs() > tolerance {
                return Verdict::Fail(Witness::Detail(format!(
                    "elements {set:?}: order #{idx} has frequency {freq:.5}, allowed 1/6 ± {tolerance:.5}"
                )));
            }
        }
    }
    Verdict::Pass
}

fn permutation_index(order: &[usize]) -> usize {
    // Lehmer code of a permutation of 0..3.
    let mut idx = 0;
    for i in 0..order.len() {
        let smaller = order[i + 1..].iter().filter(|&&x| x < order[i]).count();
        idx = idx * (order.len() - i) + smaller;
    }
    idx
}

/// Fraction of `seeds` master seeds whose single `1/q` draw is 1, checked
/// against `1/q` within `tolerance`. The generator's independence equals the
/// block width, which makes one block's value uniform.
pub fn q_bias_monte_carlo(q: u64, seeds: u64, tolerance: f64) -> Verdict {
    let p = Probability::one_in(q).expect("q >= 1");
    let block = p.bits_needed();
    let mut hits = 0u64;
    for s in 0..seeds {
        let bundle = SeedBundle::new(MasterSeed::from_u64(s));
        let bits = SlotBits::new(block as usize, 1, block, &mut bundle.bits()).unwrap();
        hits += bits.biased(1, p).unwrap() as u64;
    }
    let freq = hits as f64 / seeds.max(1) as f64;
    let target = 1.0 / q as f64;
    if (freq - target).abs() > tolerance {
        return Verdict::Fail(Witness::Detail(format!(
            "1/{q} draws: frequency {freq:.5} over {seeds} seeds, allowed {target:.5} ± {tolerance}"
        )));
    }
    Verdict::Pass
}

/// Seed lengths: `k * (ceil(log2 m) + 1)` for bit generators and
/// `k * ceil(3 log2 n)` for vertex orderings, matching the bits drawn.
pub fn seed_audit() -> Verdict {
    let bundle = SeedBundle::new(MasterSeed::from_u64(0));
    for &(k, m) in &[(1usize, 2u64), (4, 100), (32, 1 << 20), (7, 1000)] {
        let mut stream = bundle.bits();
        let bits = KWiseBits::new(k, m, &mut stream).unwrap();
        let expected = k as u64 * (ceil_log2(m) as u64 + 1);
        if bits.seed_bits() != expected || stream.consumed() != expected {
            return Verdict::Fail(Witness::Detail(format!(
                "k={k} m={m}: seed {} bits, drew {}, expected {expected}",
                bits.seed_bits(),
                stream.consumed()
            )));
        }
    }
    for &(k, n) in &[(1usize, 2u64), (16, 1000), (64, 5000)] {
        let ordering = RandomOrdering::for_vertices(n, k, &bundle, 0).unwrap();
        let expected = k as u64 * (3.0 * (n as f64).log2()).ceil() as u64;
        if ordering.seed_bits() != expected {
            return Verdict::Fail(Witness::Detail(format!(
                "ordering k={k} n={n}: seed {} bits, expected {expected}",
                ordering.seed_bits()
            )));
        }
    }
    Verdict::Pass
}

/// All pseudorandomness checks; the first failure is returned.
pub fn rand_tests(params: &RandTestParams) -> Verdict {
    for &(k, m) in &params.exhaustive {
        let v = kwise_exhaustive(k, m);
        if !v.is_pass() {
            return v;
        }
    }
    for v in [
        ordering_subset_frequencies(params.ordering_width),
        q_bias_monte_carlo(params.q, params.monte_carlo_seeds, params.monte_carlo_tolerance),
        seed_audit(),
    ] {
        if !v.is_pass() {
            return v;
        }
    }
    Verdict::Pass
}
