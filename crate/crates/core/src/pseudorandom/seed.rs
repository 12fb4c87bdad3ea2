//! Master seed and its domain-separated expansion into bit streams.
//!
//! Block `c` of the stream for tag `t` is
//! `SHA-256("lca-seed/v1" || master || be32(len(t)) || t || be64(c))`, and bits are
//! read from each block most-significant first. The tags in use are `bits`,
//! `ordering:<draw>`, `sample`, `graph` and `rep:<index>`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::RandomError;

const DOMAIN: &[u8] = b"lca-seed/v1";

/// 256-bit master seed, written as 64 hex digits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MasterSeed([u8; 32]);

impl MasterSeed {
    pub const fn from_bytes(bytes: [u8; 32]) -> Self {
        MasterSeed(bytes)
    }

    /// Seed whose last eight bytes hold `x` big-endian; handy for sweeps and tests.
    pub fn from_u64(x: u64) -> Self {
        let mut bytes = [0u8; 32];
        bytes[24..].copy_from_slice(&x.to_be_bytes());
        MasterSeed(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Debug for MasterSeed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MasterSeed({})", self.to_hex())
    }
}

impl fmt::Display for MasterSeed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl FromStr for MasterSeed {
    type Err = RandomError;

    /// Up to 64 hex digits (optionally `0x`-prefixed), left-padded with zeros.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s.strip_prefix("0x").unwrap_or(s);
        if digits.is_empty() || digits.len() > 64 {
            return Err(RandomError::BadSeed(s.to_string()));
        }
        let mut nibbles = [0u8; 64];
        let offset = 64 - digits.len();
        for (i, c) in digits.chars().enumerate() {
            nibbles[offset + i] = c
                .to_digit(16)
                .ok_or_else(|| RandomError::BadSeed(s.to_string()))? as u8;
        }
        let mut bytes = [0u8; 32];
        for (i, b) in bytes.iter_mut().enumerate() {
            *b = (nibbles[2 * i] << 4) | nibbles[2 * i + 1];
        }
        Ok(MasterSeed(bytes))
    }
}

impl Serialize for MasterSeed {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for MasterSeed {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Sole source of randomness for a run: a master seed plus its derived streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedBundle {
    master: MasterSeed,
}

impl SeedBundle {
    pub fn new(master: MasterSeed) -> Self {
        SeedBundle { master }
    }

    pub fn master(&self) -> MasterSeed {
        self.master
    }

    pub fn stream(&self, tag: &str) -> BitStream {
        BitStream::new(self.master, tag)
    }

    /// Stream backing the k-wise independent bit generators.
    pub fn bits(&self) -> BitStream {
        self.stream("bits")
    }

    pub fn ordering(&self, draw: u64) -> BitStream {
        self.stream(&format!("ordering:{draw}"))
    }

    pub fn sample(&self) -> BitStream {
        self.stream("sample")
    }

    /// Independent child bundle, e.g. one per repetition of an experiment.
    pub fn child(&self, tag: &str) -> SeedBundle {
        let mut stream = self.stream(tag);
        let mut bytes = [0u8; 32];
        for b in bytes.iter_mut() {
            *b = stream.next_bits(8) as u8;
        }
        SeedBundle::new(MasterSeed(bytes))
    }

    /// Seed for graph generators.
    pub fn graph_seed(&self) -> u64 {
        self.stream("graph").next_bits(64) as u64
    }
}

/// Counter-mode expansion of one tag; counts the bits it hands out.
#[derive(Clone)]
pub struct BitStream {
    prefix: Vec<u8>,
    counter: u64,
    block: [u8; 32],
    used_in_block: u32,
    consumed: u64,
}

impl BitStream {
    fn new(master: MasterSeed, tag: &str) -> Self {
        let mut prefix = Vec::with_capacity(DOMAIN.len() + 36 + tag.len());
        prefix.extend_from_slice(DOMAIN);
        prefix.extend_from_slice(master.as_bytes());
        prefix.extend_from_slice(&(tag.len() as u32).to_be_bytes());
        prefix.extend_from_slice(tag.as_bytes());
        BitStream {
            prefix,
            counter: 0,
            block: [0; 32],
            used_in_block: 256,
            consumed: 0,
        }
    }

    fn refill(&mut self) {
        let mut h = Sha256::new();
        h.update(&self.prefix);
        h.update(self.counter.to_be_bytes());
        self.block.copy_from_slice(&h.finalize());
        self.counter += 1;
        self.used_in_block = 0;
    }

    fn next_bit(&mut self) -> u128 {
        if self.used_in_block == 256 {
            self.refill();
        }
        let byte = self.block[(self.used_in_block / 8) as usize];
        let bit = (byte >> (7 - self.used_in_block % 8)) & 1;
        self.used_in_block += 1;
        self.consumed += 1;
        bit as u128
    }

    /// Next `count <= 128` bits, first bit most significant.
    pub fn next_bits(&mut self, count: u32) -> u128 {
        assert!(count <= 128);
        let mut out = 0u128;
        for _ in 0..count {
            out = (out << 1) | self.next_bit();
        }
        out
    }

    /// Uniform integer in `0..bound` by rejection sampling.
    pub fn uniform_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        if bound == 1 {
            return 0;
        }
        let bits = 64 - (bound - 1).leading_zeros();
        loop {
            let x = self.next_bits(bits) as u64;
            if x < bound {
                return x;
            }
        }
    }

    /// Total bits handed out so far.
    pub fn consumed(&self) -> u64 {
        self.consumed
    }
}
