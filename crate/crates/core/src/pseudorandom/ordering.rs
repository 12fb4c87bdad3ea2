//! Random orderings from k-wise independent ranks with an ID tie-break.

use std::cell::RefCell;

use rustc_hash::FxHashMap;

use super::kwise::KWiseValues;
use super::seed::{BitStream, SeedBundle};
use super::RandomError;

/// Tie-broken sort key `(rank, element)`; distinct elements never compare equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RankKey {
    pub rank: u128,
    pub element: u128,
}

fn bit_length(x: u128) -> u32 {
    128 - x.leading_zeros()
}

/// A total order on `1..=domain` (or any set of integer encodings up to `domain`).
///
/// Each element's rank is a k-wise independent value over GF(2^width) evaluated
/// at the element itself; ties are broken by the element. The relative order of
/// any set of elements is a function of their ranks alone.
#[derive(Clone, Debug)]
pub struct RandomOrdering {
    values: KWiseValues,
    domain: u128,
    draw: u64,
}

impl RandomOrdering {
    /// Width used for an `n`-element vertex ordering: at least `ceil(3 log2 n)`
    /// so ranks range over `[n^3]`, and wide enough to hold every ID.
    pub fn vertex_width(n: u64) -> u32 {
        let three_log = (3.0 * (n.max(1) as f64).log2()).ceil() as u32;
        three_log.max(bit_length(n as u128)).clamp(1, super::field::MAX_WIDTH)
    }

    /// Ordering of the vertices `1..=n` from draw `draw` of `seed`.
    pub fn for_vertices(n: u64, k: usize, seed: &SeedBundle, draw: u64) -> Result<Self, RandomError> {
        let width = Self::vertex_width(n);
        Self::over_domain(n as u128, width, k, &mut seed.ordering(draw), draw)
    }

    /// Ordering of encodings `1..=domain` in a field of the given width.
    pub fn over_domain(
        domain: u128,
        width: u32,
        k: usize,
        stream: &mut BitStream,
        draw: u64,
    ) -> Result<Self, RandomError> {
        if width < 128 && domain >> width != 0 {
            return Err(RandomError::InvalidWidth(width));
        }
        Ok(RandomOrdering {
            values: KWiseValues::from_stream(k, width, stream)?,
            domain,
            draw,
        })
    }

    /// Ordering with explicit rank coefficients, for exhaustive enumeration.
    pub fn from_values(domain: u128, values: KWiseValues, draw: u64) -> Result<Self, RandomError> {
        let width = values.width();
        if width < 128 && domain >> width != 0 {
            return Err(RandomError::InvalidWidth(width));
        }
        Ok(RandomOrdering { values, domain, draw })
    }

    pub fn draw(&self) -> u64 {
        self.draw
    }

    pub fn domain(&self) -> u128 {
        self.domain
    }

    pub fn independence(&self) -> usize {
        self.values.independence()
    }

    pub fn width(&self) -> u32 {
        self.values.width()
    }

    /// Seed bits consumed: `k * width`.
    pub fn seed_bits(&self) -> u64 {
        self.values.seed_bits()
    }

    pub fn raw_rank(&self, element: u128) -> Result<u128, RandomError> {
        if element == 0 || element > self.domain {
            return Err(RandomError::PointOutOfDomain(element));
        }
        Ok(self.values.eval(element))
    }

    pub fn rank(&self, element: u128) -> Result<RankKey, RandomError> {
        Ok(RankKey {
            rank: self.raw_rank(element)?,
            element,
        })
    }

    /// Whether `u` comes strictly before `v`.
    pub fn precedes(&self, u: u128, v: u128) -> Result<bool, RandomError> {
        if u == v {
            return Err(RandomError::SameElement(u));
        }
        Ok(self.rank(u)? < self.rank(v)?)
    }

    /// All elements `1..=domain` sorted by key; only sensible for small domains.
    pub fn permutation(&self) -> Vec<u128> {
        let mut keyed: Vec<RankKey> = (1..=self.domain)
            .map(|x| self.rank(x).expect("in domain"))
            .collect();
        keyed.sort_unstable();
        keyed.into_iter().map(|key| key.element).collect()
    }
}

/// Rank lookups for one ordering, memoized; evaluating a high-degree polynomial
/// is the dominant cost of an ordering query.
#[derive(Debug)]
pub struct CachedOrdering<'a> {
    ordering: &'a RandomOrdering,
    cache: RefCell<FxHashMap<u128, u128>>,
}

impl<'a> CachedOrdering<'a> {
    pub fn new(ordering: &'a RandomOrdering) -> Self {
        CachedOrdering {
            ordering,
            cache: RefCell::new(FxHashMap::default()),
        }
    }

    pub fn ordering(&self) -> &'a RandomOrdering {
        self.ordering
    }

    pub fn key(&self, element: u128) -> Result<RankKey, RandomError> {
        if let Some(&rank) = self.cache.borrow().get(&element) {
            return Ok(RankKey { rank, element });
        }
        let key = self.ordering.rank(element)?;
        self.cache.borrow_mut().insert(element, key.rank);
        Ok(key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pseudorandom::MasterSeed;

    fn bundle(x: u64) -> SeedBundle {
        SeedBundle::new(MasterSeed::from_u64(x))
    }

    #[test]
    fn single_element() {
        let o = RandomOrdering::for_vertices(1, 4, &bundle(0), 0).unwrap();
        assert_eq!(o.permutation(), vec![1]);
    }

    #[test]
    fn ties_break_by_id() {
        let constant = KWiseValues::from_coefficients(3, vec![5]).unwrap();
        let o = RandomOrdering::from_values(4, constant, 0).unwrap();
        assert!(o.precedes(1, 2).unwrap());
        assert!(!o.precedes(3, 2).unwrap());
        assert_eq!(o.permutation(), vec![1, 2, 3, 4]);
        assert!(o.precedes(2, 2).is_err());
    }

    #[test]
    fn order_is_total_and_matches_sorting() {
        let o = RandomOrdering::for_vertices(50, 8, &bundle(3), 2).unwrap();
        let perm = o.permutation();
        let mut position = vec![0usize; 51];
        for (idx, &x) in perm.iter().enumerate() {
            position[x as usize] = idx;
        }
        for u in 1..=50u128 {
            for v in 1..=50u128 {
                if u != v {
                    assert!(o.precedes(u, v).unwrap() ^ o.precedes(v, u).unwrap());
                    assert_eq!(o.precedes(u, v).unwrap(), position[u as usize] < position[v as usize]);
                }
            }
        }
    }

    #[test]
    fn widths_and_seed_bits() {
        assert_eq!(RandomOrdering::vertex_width(1), 1);
        assert_eq!(RandomOrdering::vertex_width(4), 6);
        assert_eq!(RandomOrdering::vertex_width(1000), 30);
        let o = RandomOrdering::for_vertices(1000, 7, &bundle(1), 0).unwrap();
        assert_eq!(o.seed_bits(), 7 * 30);
        assert!(o.raw_rank(0).is_err());
        assert!(o.raw_rank(1001).is_err());
    }

    #[test]
    fn draws_differ_and_repeat() {
        let b = bundle(11);
        let a0 = RandomOrdering::for_vertices(30, 4, &b, 0).unwrap().permutation();
        let a1 = RandomOrdering::for_vertices(30, 4, &b, 1).unwrap().permutation();
        assert_eq!(a0, RandomOrdering::for_vertices(30, 4, &b, 0).unwrap().permutation());
        assert_ne!(a0, a1);
    }

    #[test]
    fn cached_ordering_agrees() {
        let o = RandomOrdering::for_vertices(20, 5, &bundle(2), 0).unwrap();
        let c = CachedOrdering::new(&o);
        for x in (1..=20).chain(1..=20) {
            assert_eq!(c.key(x).unwrap(), o.rank(x).unwrap());
        }
    }
}
