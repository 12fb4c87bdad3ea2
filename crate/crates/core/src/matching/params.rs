use serde::{Deserialize, Serialize};

use crate::error::LcaError;
use crate::pseudorandom::{SeedBundle, SlotBits, PRECISION_BITS};
use crate::weak_mis::{ceil_log2, ceil_tolerant, component_cap, DEFAULT_INDEPENDENCE};

pub const DEFAULT_C2: f64 = 4.0;
pub const DEFAULT_CM: f64 = 1.0;

/// Parameters of the randomized matching schedule, derived from `(n, d, c2, c_m)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MmParams {
    pub n: usize,
    pub d: usize,
    pub c2: f64,
    pub cm: f64,
    pub iterations: u32,
    pub component_cap: u64,
    pub independence: usize,
}

impl MmParams {
    pub fn new(n: usize, d: usize, c2: f64, cm: f64) -> Result<Self, LcaError> {
        for (field, value) in [("c2", c2), ("cm", cm)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(LcaError::InvalidParameter {
                    field,
                    reason: format!("must be a positive number, got {value}"),
                });
            }
        }
        let log_d = if d == 0 { 0.0 } else { (d as f64).log2() };
        Ok(MmParams {
            n,
            d,
            c2,
            cm,
            iterations: (ceil_tolerant(c2 * log_d) as u32).max(1),
            component_cap: component_cap(n, d, cm),
            independence: DEFAULT_INDEPENDENCE,
        })
    }

    /// Bits drawn for one uniform neighbor choice: `ceil(log2 d) + 16`.
    pub fn choice_width(&self) -> u32 {
        ceil_log2(self.d as u64) + PRECISION_BITS
    }
}

/// Per `(v, i)` randomness: a neighbor choice and a fair coin `b(v)`, packed in
/// slot `(i-1) * space + index(v)`.
#[derive(Clone, Debug)]
pub struct ChoiceBits {
    bits: SlotBits,
    width: u32,
    iterations: u32,
    space: u64,
}

impl ChoiceBits {
    pub fn new(params: &MmParams, space: u64, seed: &SeedBundle) -> Result<Self, LcaError> {
        let space = space.max(1);
        let slots = (params.iterations as u64)
            .checked_mul(space)
            .ok_or(LcaError::InvalidParameter {
                field: "n",
                reason: "choice slot space overflows".into(),
            })?;
        let width = params.choice_width();
        let bits = SlotBits::new(params.independence, slots, width + 1, &mut seed.bits())?;
        Ok(ChoiceBits {
            bits,
            width,
            iterations: params.iterations,
            space,
        })
    }

    fn slot(&self, index: u64, i: u32) -> u64 {
        assert!(
            (1..=self.space).contains(&index) && (1..=self.iterations).contains(&i),
            "choice slot ({index}, {i}) out of range"
        );
        (i as u64 - 1) * self.space + index
    }

    /// Position in `0..degree` of the chosen neighbor; the bias is at most `degree / 2^width`.
    pub fn choice(&self, index: u64, i: u32, degree: usize) -> usize {
        self.bits
            .uniform_below(self.slot(index, i), degree as u64, self.width)
            .expect("slot layout validated at construction") as usize
    }

    pub fn coin(&self, index: u64, i: u32) -> bool {
        self.bits
            .coin(self.slot(index, i), self.width)
            .expect("slot layout validated at construction")
    }

    pub fn seed_bits(&self) -> u64 {
        self.bits.seed_bits()
    }
}
