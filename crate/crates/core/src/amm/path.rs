//! Augmenting paths, their integer encoding, and the ordering over encodings.

use std::cmp::Ordering;
use std::hash::{Hash, Hasher};

use crate::error::LcaError;
use crate::graph::{EdgeId, VertexId};
use crate::pseudorandom::{CachedOrdering, RandomError, RandomOrdering, RankKey, SeedBundle};

const LEVEL_BITS: u32 = 3;
/// Largest level the encoding can hold.
pub const MAX_LEVEL: u32 = (1 << LEVEL_BITS) - 1;

fn bit_length(x: u64) -> u32 {
    64 - x.leading_zeros()
}

/// Bits per vertex in the encoding of paths over `1..=n`.
pub fn vertex_bits(n: usize) -> u32 {
    bit_length(n.max(1) as u64)
}

/// Width of the encoding space for levels up to `k` over `n` vertices.
pub fn encoding_width(n: usize, k: u32) -> u32 {
    LEVEL_BITS + 2 * k * vertex_bits(n)
}

/// A level-`i` augmenting path: `2i` distinct vertices, stored with the smaller
/// endpoint first.
///
/// Edges at even positions `(x0,x1), (x2,x3), ...` are the unmatched ones.
/// Equality, hashing and ordering go through the encoding, which for equal
/// levels agrees with lexicographic order on the vertex sequence.
#[derive(Clone, Debug)]
pub struct AugPath {
    level: u32,
    vertices: Box<[VertexId]>,
    code: u128,
}

impl AugPath {
    /// Canonicalizes `sequence` (reversing it if needed). The sequence must
    /// have `2 * level` vertices, all at most `n`.
    pub fn new(level: u32, sequence: &[VertexId], n: usize) -> Self {
        assert!((1..=MAX_LEVEL).contains(&level), "level {level} out of range");
        assert_eq!(sequence.len(), 2 * level as usize, "path length does not match level");
        let mut vertices: Box<[VertexId]> = sequence.into();
        if vertices[0] > vertices[vertices.len() - 1] {
            vertices.reverse();
        }
        let bits = vertex_bits(n);
        let mut code = 0u128;
        for v in vertices.iter() {
            debug_assert!(v.get() as usize <= n);
            code = (code << bits) | v.get() as u128;
        }
        code = (code << LEVEL_BITS) | level as u128;
        AugPath { level, vertices, code }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn code(&self) -> u128 {
        self.code
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.vertices.windows(2).map(|w| EdgeId::new(w[0], w[1]))
    }

    /// Edges that become matched once the path is flipped.
    pub fn unmatched_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.vertices.chunks(2).map(|w| EdgeId::new(w[0], w[1]))
    }

    pub fn intersects(&self, other: &AugPath) -> bool {
        self.vertices.iter().any(|&v| other.contains(v))
    }

    /// Partner of `v` after flipping the path.
    pub fn flipped_partner(&self, v: VertexId) -> Option<VertexId> {
        let pos = self.vertices.iter().position(|&x| x == v)?;
        Some(self.vertices[pos ^ 1])
    }
}

impl PartialEq for AugPath {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code
    }
}

impl Eq for AugPath {}

impl Hash for AugPath {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.code.hash(state);
    }
}

impl PartialOrd for AugPath {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AugPath {
    fn cmp(&self, other: &Self) -> Ordering {
        self.code.cmp(&other.code)
    }
}

/// One random order over the encodings of all paths of levels `1..=k`.
/// Restricted to level `i` it is the permutation used for that phase.
#[derive(Clone, Debug)]
pub struct PathOrdering {
    ordering: RandomOrdering,
    n: usize,
    k: u32,
}

impl PathOrdering {
    pub fn new(n: usize, k: u32, independence: usize, seed: &SeedBundle, draw: u64) -> Result<Self, LcaError> {
        let width = Self::check(n, k)?;
        let domain = (1u128 << width) - 1;
        let ordering = RandomOrdering::over_domain(domain, width, independence, &mut seed.ordering(draw), draw)?;
        Ok(PathOrdering { ordering, n, k })
    }

    /// Wraps an existing ordering whose domain covers the encoding space.
    pub fn from_ordering(n: usize, k: u32, ordering: RandomOrdering) -> Result<Self, LcaError> {
        let width = Self::check(n, k)?;
        if ordering.width() < width {
            return Err(RandomError::InvalidWidth(ordering.width()).into());
        }
        Ok(PathOrdering { ordering, n, k })
    }

    fn check(n: usize, k: u32) -> Result<u32, LcaError> {
        if k == 0 || k > MAX_LEVEL {
            return Err(LcaError::InvalidParameter {
                field: "k",
                reason: format!("must lie in 1..={MAX_LEVEL}, got {k}"),
            });
        }
        let width = encoding_width(n, k);
        if width > crate::pseudorandom::MAX_WIDTH {
            return Err(LcaError::InvalidParameter {
                field: "k",
                reason: format!("paths of level {k} over {n} vertices need {width} encoding bits (limit 127)"),
            });
        }
        Ok(width)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn inner(&self) -> &RandomOrdering {
        &self.ordering
    }

    pub fn draw(&self) -> u64 {
        self.ordering.draw()
    }

    pub fn seed_bits(&self) -> u64 {
        self.ordering.seed_bits()
    }

    pub fn key(&self, p: &AugPath) -> RankKey {
        self.ordering.rank(p.code()).expect("path encoding inside the domain")
    }
}

/// Memoized keys of one path ordering.
pub(crate) struct PathKeys<'a> {
    cached: CachedOrdering<'a>,
}

impl<'a> PathKeys<'a> {
    pub(crate) fn new(ordering: &'a PathOrdering) -> Self {
        PathKeys {
            cached: CachedOrdering::new(ordering.inner()),
        }
    }

    pub(crate) fn key(&self, p: &AugPath) -> RankKey {
        self.cached.key(p.code()).expect("path encoding inside the domain")
    }
}
