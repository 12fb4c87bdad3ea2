//! Seeded bounded-independence randomness.

mod field;
mod kwise;
mod ordering;
mod seed;

use thiserror::Error;

pub use field::{BinaryField, FixedMultiplier, IRREDUCIBLE_LOW, MAX_WIDTH};
pub use kwise::{KWiseBits, KWiseValues, Probability, SlotBits, PRECISION_BITS};
pub use ordering::{CachedOrdering, RandomOrdering, RankKey};
pub use seed::{BitStream, MasterSeed, SeedBundle};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RandomError {
    #[error("field width {0} is outside 1..=127 or too small for the domain")]
    InvalidWidth(u32),
    #[error("independence parameter k must be at least 1")]
    InvalidIndependence,
    #[error("bad seed {0:?}: expected up to 64 hex digits")]
    BadSeed(String),
    #[error("index {index} outside 1..={m}")]
    IndexOutOfRange { index: u64, m: u64 },
    #[error("invalid probability {num}/{den}")]
    InvalidProbability { num: u64, den: u64 },
    #[error("invalid block layout: block {block} bits, {slots} slots")]
    InvalidBlock { block: u32, slots: u64 },
    #[error("cannot compare element {0} with itself")]
    SameElement(u128),
    #[error("element {0} is outside the ordering's domain")]
    PointOutOfDomain(u128),
}
