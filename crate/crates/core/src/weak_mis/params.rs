use serde::{Deserialize, Serialize};

use crate::error::LcaError;
use crate::pseudorandom::{Probability, SeedBundle, SlotBits};

/// Default iteration constant.
pub const DEFAULT_C1: f64 = 4.0;
/// Default independence of the selection bits.
pub const DEFAULT_INDEPENDENCE: usize = 32;

pub(crate) fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// `ceil(x)` that ignores floating-point noise just above an integer.
pub(crate) fn ceil_tolerant(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

/// Phase-2 component cap `max(1, ceil(scale * d^4 * log2 n))`.
pub fn component_cap(n: usize, d: usize, scale: f64) -> u64 {
    let log_n = (n.max(1) as f64).log2();
    let cap = ceil_tolerant(scale * (d as f64).powi(4) * log_n);
    if cap.is_finite() && cap < u64::MAX as f64 {
        (cap as u64).max(1)
    } else {
        u64::MAX
    }
}

/// Parameters of the Weak-MIS schedule, derived from `(n, d, c1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MisParams {
    pub n: usize,
    pub d: usize,
    pub c1: f64,
    pub iterations: u32,
    pub stages: u32,
    pub component_cap: u64,
    /// Independence of the k-wise bits behind the selection coins.
    pub independence: usize,
}

impl MisParams {
    pub fn new(n: usize, d: usize, c1: f64) -> Result<Self, LcaError> {
        Self::with_independence(n, d, c1, DEFAULT_INDEPENDENCE)
    }

    pub fn with_independence(n: usize, d: usize, c1: f64, independence: usize) -> Result<Self, LcaError> {
        if !(c1.is_finite() && c1 > 0.0) {
            return Err(LcaError::InvalidParameter {
                field: "c1",
                reason: format!("must be a positive number, got {c1}"),
            });
        }
        if independence == 0 {
            return Err(LcaError::InvalidParameter {
                field: "independence",
                reason: "must be at least 1".into(),
            });
        }
        let log_d = if d == 0 { 0.0 } else { (d as f64).log2() };
        let iterations = (ceil_tolerant(c1 * log_d) as u32).max(1);
        let stages = ceil_log2(d as u64).max(1);
        Ok(MisParams {
            n,
            d,
            c1,
            iterations,
            stages,
            component_cap: component_cap(n, d, 1.0),
            independence,
        })
    }

    /// Selection probability `p_j = 1/(d/2^(j-1) + 1) = 2^(j-1) / (d + 2^(j-1))`.
    pub fn probability(&self, j: u32) -> Probability {
        let half = 1u64 << (j - 1);
        Probability::new(half, self.d as u64 + half).expect("valid stage probability")
    }

    /// Whether a vertex with `count` live neighbors is in `V_j`, i.e. `count >= d/2^j`.
    pub fn is_high_degree(&self, count: usize, j: u32) -> bool {
        (count as u128) << j >= self.d as u128
    }
}

/// The coins `B(v, i, j)`, one slot per `(v, i, j)`:
/// slot `((i-1) * stages + (j-1)) * space + index(v)`.
#[derive(Clone, Debug)]
pub struct SelectionBits {
    bits: SlotBits,
    stages: u32,
    iterations: u32,
    space: u64,
}

impl SelectionBits {
    /// `space` is the oracle's index space (the vertex count for a plain graph).
    pub fn new(params: &MisParams, space: u64, seed: &SeedBundle) -> Result<Self, LcaError> {
        let slots = (params.iterations as u64 * params.stages as u64)
            .checked_mul(space.max(1))
            .ok_or(LcaError::InvalidParameter {
                field: "n",
                reason: "selection slot space overflows".into(),
            })?;
        let block = params.probability(1).bits_needed();
        let bits = SlotBits::new(params.independence, slots, block, &mut seed.bits())?;
        Ok(SelectionBits {
            bits,
            stages: params.stages,
            iterations: params.iterations,
            space: space.max(1),
        })
    }

    pub fn slot(&self, index: u64, i: u32, j: u32) -> u64 {
        assert!(
            (1..=self.space).contains(&index) && (1..=self.iterations).contains(&i) && (1..=self.stages).contains(&j),
            "selection slot ({index}, {i}, {j}) out of range"
        );
        ((i as u64 - 1) * self.stages as u64 + (j as u64 - 1)) * self.space + index
    }

    /// `B(v, i, j)` for the vertex with oracle index `index`.
    pub fn selected(&self, params: &MisParams, index: u64, i: u32, j: u32) -> bool {
        self.bits
            .biased(self.slot(index, i, j), params.probability(j))
            .expect("slot layout validated at construction")
    }

    pub fn seed_bits(&self) -> u64 {
        self.bits.seed_bits()
    }

    pub fn bit_count(&self) -> u64 {
        self.bits.bits().m()
    }
}
