//! k-wise independent values and bits from a random polynomial over GF(2^r).

use super::field::BinaryField;
use super::seed::BitStream;
use super::RandomError;

/// Below this many coefficients a plain multiply beats building lookup tables.
const TABLE_THRESHOLD: usize = 6;

/// Evaluations of a uniformly random polynomial of degree `< k` over GF(2^width).
///
/// Values at any `k` distinct points are independent and uniform.
#[derive(Clone, Debug)]
pub struct KWiseValues {
    field: BinaryField,
    coefficients: Vec<u128>,
}

impl KWiseValues {
    /// Draws `k` coefficients of `width` bits each from `stream`.
    pub fn from_stream(k: usize, width: u32, stream: &mut BitStream) -> Result<Self, RandomError> {
        let field = BinaryField::new(width)?;
        if k == 0 {
            return Err(RandomError::InvalidIndependence);
        }
        let coefficients = (0..k).map(|_| stream.next_bits(width)).collect();
        Ok(KWiseValues { field, coefficients })
    }

    /// Coefficients listed from the constant term upward.
    pub fn from_coefficients(width: u32, coefficients: Vec<u128>) -> Result<Self, RandomError> {
        let field = BinaryField::new(width)?;
        if coefficients.is_empty() {
            return Err(RandomError::InvalidIndependence);
        }
        if coefficients.iter().any(|&c| !field.contains(c)) {
            return Err(RandomError::InvalidWidth(width));
        }
        Ok(KWiseValues { field, coefficients })
    }

    pub fn independence(&self) -> usize {
        self.coefficients.len()
    }

    pub fn width(&self) -> u32 {
        self.field.width()
    }

    /// Seed length `k * width` in bits.
    pub fn seed_bits(&self) -> u64 {
        self.coefficients.len() as u64 * self.field.width() as u64
    }

    pub fn eval(&self, point: u128) -> u128 {
        debug_assert!(self.field.contains(point));
        let mut coeffs = self.coefficients.iter().rev();
        let mut acc = *coeffs.next().expect("at least one coefficient");
        if self.coefficients.len() < TABLE_THRESHOLD {
            for &c in coeffs {
                acc = self.field.mul(acc, point) ^ c;
            }
        } else {
            let times_point = self.field.multiplier(point);
            for &c in coeffs {
                acc = times_point.apply(acc) ^ c;
            }
        }
        acc
    }
}

fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// `m` k-wise independent unbiased bits `x_1..x_m`: `x_i` is the lowest bit of the
/// random polynomial evaluated at the field element `i`.
#[derive(Clone, Debug)]
pub struct KWiseBits {
    values: KWiseValues,
    m: u64,
}

impl KWiseBits {
    /// Field width `ceil(log2 m) + 1`, so the seed is `k * (ceil(log2 m) + 1)` bits.
    pub fn new(k: usize, m: u64, stream: &mut BitStream) -> Result<Self, RandomError> {
        Self::with_width(k, m, Self::default_width(m), stream)
    }

    pub fn default_width(m: u64) -> u32 {
        ceil_log2(m) + 1
    }

    /// Explicit field width (must still hold every index).
    pub fn with_width(k: usize, m: u64, width: u32, stream: &mut BitStream) -> Result<Self, RandomError> {
        Self::check_width(m, width)?;
        Ok(KWiseBits {
            values: KWiseValues::from_stream(k, width, stream)?,
            m,
        })
    }

    pub fn from_values(m: u64, values: KWiseValues) -> Result<Self, RandomError> {
        Self::check_width(m, values.width())?;
        Ok(KWiseBits { values, m })
    }

    fn check_width(m: u64, width: u32) -> Result<(), RandomError> {
        if m == 0 || width > super::field::MAX_WIDTH || (width < 64 && m >> width != 0) {
            return Err(RandomError::InvalidWidth(width));
        }
        Ok(())
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn independence(&self) -> usize {
        self.values.independence()
    }

    pub fn width(&self) -> u32 {
        self.values.width()
    }

    pub fn seed_bits(&self) -> u64 {
        self.values.seed_bits()
    }

    /// Bit `x_index` for `1 <= index <= m`.
    pub fn bit(&self, index: u64) -> Result<bool, RandomError> {
        if index == 0 || index > self.m {
            return Err(RandomError::IndexOutOfRange { index, m: self.m });
        }
        Ok(self.values.eval(index as u128) & 1 == 1)
    }
}

/// A selection probability `num/den`, realized from unbiased bits by a dyadic threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Probability {
    num: u64,
    den: u64,
}

/// Extra bits beyond `ceil(log2(1/p))`; bounds the relative bias by 2^-16.
pub const PRECISION_BITS: u32 = 16;

impl Probability {
    pub fn new(num: u64, den: u64) -> Result<Self, RandomError> {
        if den == 0 || num == 0 || num > den || den >= 1 << 40 {
            return Err(RandomError::InvalidProbability { num, den });
        }
        Ok(Probability { num, den })
    }

    /// Probability `1/q`.
    pub fn one_in(q: u64) -> Result<Self, RandomError> {
        Self::new(1, q)
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Bits consumed per draw: `w = ceil(log2(den/num)) + 16`.
    pub fn bits_needed(&self) -> u32 {
        let mut e = 0u32;
        while (self.num as u128) << e < self.den as u128 {
            e += 1;
        }
        e + PRECISION_BITS
    }

    /// `round(2^w * num / den)`: a `w`-bit draw below this value means "selected".
    pub fn threshold(&self, w: u32) -> u128 {
        (((self.num as u128) << w) + self.den as u128 / 2) / self.den as u128
    }

    /// Probability actually realized with `w` bits.
    pub fn realized(&self, w: u32) -> f64 {
        self.threshold(w) as f64 / (1u128 << w) as f64
    }
}

/// k-wise bits grouped into fixed-size blocks, one block per slot.
///
/// Slot `s` owns bit indices `(s-1)*block + 1 ..= s*block`; its first `w` bits,
/// read first-bit-most-significant, form a `w`-bit integer.
#[derive(Clone, Debug)]
pub struct SlotBits {
    bits: KWiseBits,
    block: u32,
    slots: u64,
}

impl SlotBits {
    pub fn new(k: usize, slots: u64, block: u32, stream: &mut BitStream) -> Result<Self, RandomError> {
        if block == 0 || block > 128 || slots == 0 {
            return Err(RandomError::InvalidBlock { block, slots });
        }
        let m = slots
            .checked_mul(block as u64)
            .ok_or(RandomError::InvalidBlock { block, slots })?;
        Ok(SlotBits {
            bits: KWiseBits::new(k, m, stream)?,
            block,
            slots,
        })
    }

    pub fn slots(&self) -> u64 {
        self.slots
    }

    pub fn block(&self) -> u32 {
        self.block
    }

    pub fn bits(&self) -> &KWiseBits {
        &self.bits
    }

    pub fn seed_bits(&self) -> u64 {
        self.bits.seed_bits()
    }

    /// The `w`-bit integer at the start of `slot`'s block.
    pub fn block_value(&self, slot: u64, w: u32) -> Result<u128, RandomError> {
        if slot == 0 || slot > self.slots {
            return Err(RandomError::IndexOutOfRange { index: slot, m: self.slots });
        }
        if w > self.block {
            return Err(RandomError::InvalidBlock { block: w, slots: self.slots });
        }
        let first = (slot - 1) * self.block as u64 + 1;
        let mut out = 0u128;
        for offset in 0..w as u64 {
            out = (out << 1) | self.bits.bit(first + offset)? as u128;
        }
        Ok(out)
    }

    /// Returns 1 with probability `p` up to a relative bias of 2^-16, provided
    /// the independence is at least `p.bits_needed()`; with fewer, the bits of
    /// one block are not jointly uniform.
    ///
    /// Compares most-significant bit first and stops at the first differing
    /// bit, so the result equals `block_value(slot, w) < threshold(w)`.
    pub fn biased(&self, slot: u64, p: Probability) -> Result<bool, RandomError> {
        let w = p.bits_needed();
        if slot == 0 || slot > self.slots {
            return Err(RandomError::IndexOutOfRange { index: slot, m: self.slots });
        }
        if w > self.block {
            return Err(RandomError::InvalidBlock { block: w, slots: self.slots });
        }
        let threshold = p.threshold(w);
        if threshold >> w != 0 {
            return Ok(true);
        }
        let first = (slot - 1) * self.block as u64 + 1;
        for offset in 0..w {
            let t = (threshold >> (w - 1 - offset)) & 1 == 1;
            let x = self.bits.bit(first + offset as u64)?;
            if x != t {
                return Ok(t);
            }
        }
        Ok(false)
    }

    /// Near-uniform value in `0..bound` as a `w`-bit draw reduced mod `bound`;
    /// the bias is at most `bound / 2^w`.
    pub fn uniform_below(&self, slot: u64, bound: u64, w: u32) -> Result<u64, RandomError> {
        assert!(bound > 0);
        Ok((self.block_value(slot, w)? % bound as u128) as u64)
    }

    /// A single unbiased bit at `offset` inside `slot`'s block.
    pub fn coin(&self, slot: u64, offset: u32) -> Result<bool, RandomError> {
        if slot == 0 || slot > self.slots || offset >= self.block {
            return Err(RandomError::IndexOutOfRange { index: slot, m: self.slots });
        }
        self.bits.bit((slot - 1) * self.block as u64 + 1 + offset as u64)
    }
}
