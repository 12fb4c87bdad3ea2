//! Arithmetic in GF(2^r) for 1 <= r <= 127, elements packed into `u128`.

use super::RandomError;

/// Low-order terms of the irreducible modulus `x^r + low(x)` for each width
/// `r` in `1..=127` (index `r - 1`). Trinomials `x^r + x^a + 1` with the
/// smallest `a` where one exists, otherwise the smallest pentanomial. This
/// table is part of the bit-exact output contract.
pub const IRREDUCIBLE_LOW: [u128; 127] = [
    0x1, // 1
    0x3, // 2
    0x3, // 3
    0x3, // 4
    0x5, // 5
    0x3, // 6
    0x3, // 7
    0x1b, // 8
    0x3, // 9
    0x9, // 10
    0x5, // 11
    0x9, // 12
    0x1b, // 13
    0x21, // 14
    0x3, // 15
    0x2b, // 16
    0x9, // 17
    0x9, // 18
    0x27, // 19
    0x9, // 20
    0x5, // 21
    0x3, // 22
    0x21, // 23
    0x1b, // 24
    0x9, // 25
    0x1b, // 26
    0x27, // 27
    0x3, // 28
    0x5, // 29
    0x3, // 30
    0x9, // 31
    0x8d, // 32
    0x401, // 33
    0x81, // 34
    0x5, // 35
    0x201, // 36
    0x53, // 37
    0x63, // 38
    0x11, // 39
    0x39, // 40
    0x9, // 41
    0x81, // 42
    0x59, // 43
    0x21, // 44
    0x1b, // 45
    0x3, // 46
    0x21, // 47
    0x2d, // 48
    0x201, // 49
    0x1d, // 50
    0x4b, // 51
    0x9, // 52
    0x47, // 53
    0x201, // 54
    0x81, // 55
    0x95, // 56
    0x11, // 57
    0x80001, // 58
    0x95, // 59
    0x3, // 60
    0x27, // 61
    0x20000001, // 62
    0x3, // 63
    0x1b, // 64
    0x40001, // 65
    0x9, // 66
    0x27, // 67
    0x201, // 68
    0x65, // 69
    0x2b, // 70
    0x41, // 71
    0x609, // 72
    0x2000001, // 73
    0x800000001, // 74
    0x4b, // 75
    0x200001, // 76
    0x65, // 77
    0x69, // 78
    0x201, // 79
    0x215, // 80
    0x11, // 81
    0x10b, // 82
    0x95, // 83
    0x21, // 84
    0x107, // 85
    0x200001, // 86
    0x2001, // 87
    0xc5, // 88
    0x4000000001, // 89
    0x8000001, // 90
    0x123, // 91
    0x200001, // 92
    0x5, // 93
    0x200001, // 94
    0x801, // 95
    0x641, // 96
    0x41, // 97
    0x801, // 98
    0x4b, // 99
    0x8001, // 100
    0xc3, // 101
    0x20000001, // 102
    0x201, // 103
    0x1b, // 104
    0x11, // 105
    0x8001, // 106
    0x291, // 107
    0x20001, // 108
    0x35, // 109
    0x200000001, // 110
    0x401, // 111
    0x39, // 112
    0x201, // 113
    0x2d, // 114
    0x1a1, // 115
    0x17, // 116
    0x27, // 117
    0x200000001, // 118
    0x101, // 119
    0x1b, // 120
    0x40001, // 121
    0x47, // 122
    0x5, // 123
    0x80001, // 124
    0xe1, // 125
    0x200001, // 126
    0x3, // 127
];

pub const MAX_WIDTH: u32 = 127;

/// The field GF(2^width) with the modulus from [`IRREDUCIBLE_LOW`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BinaryField {
    width: u32,
    low: u128,
}

impl BinaryField {
    pub fn new(width: u32) -> Result<Self, RandomError> {
        if width == 0 || width > MAX_WIDTH {
            return Err(RandomError::InvalidWidth(width));
        }
        Ok(BinaryField {
            width,
            low: IRREDUCIBLE_LOW[width as usize - 1],
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// Number of field elements.
    pub fn order(&self) -> u128 {
        1u128 << self.width
    }

    pub fn mask(&self) -> u128 {
        (1u128 << self.width) - 1
    }

    pub fn contains(&self, a: u128) -> bool {
        a >> self.width == 0
    }

    #[inline]
    fn double(&self, a: u128) -> u128 {
        let shifted = a << 1;
        if (shifted >> self.width) & 1 == 1 {
            (shifted ^ (1u128 << self.width)) ^ self.low
        } else {
            shifted
        }
    }

    /// Shift-and-add multiplication.
    pub fn mul(&self, a: u128, b: u128) -> u128 {
        debug_assert!(self.contains(a) && self.contains(b));
        let mut acc = 0u128;
        let mut a = a;
        let mut b = b;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a = self.double(a);
        }
        acc
    }

    /// Precomputed nibble tables for repeated multiplication by a fixed `x`.
    pub fn multiplier(&self, x: u128) -> FixedMultiplier {
        let nibbles = self.width.div_ceil(4) as usize;
        let mut tables = Vec::with_capacity(nibbles);
        let mut base = x;
        for _ in 0..nibbles {
            let mut basis = [0u128; 4];
            for slot in basis.iter_mut() {
                *slot = base;
                base = self.double(base);
            }
            let mut table = [0u128; 16];
            for idx in 1..16usize {
                let low_bit = idx.trailing_zeros() as usize;
                table[idx] = table[idx & (idx - 1)] ^ basis[low_bit];
            }
            tables.push(table);
        }
        FixedMultiplier { tables }
    }
}

/// Multiplication by a fixed field element via 4-bit lookup tables.
pub struct FixedMultiplier {
    tables: Vec<[u128; 16]>,
}

impl FixedMultiplier {
    #[inline]
    pub fn apply(&self, a: u128) -> u128 {
        let mut acc = 0u128;
        let mut a = a;
        for table in &self.tables {
            acc ^= table[(a & 0xf) as usize];
            a >>= 4;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn deg(p: u128) -> i32 {
        if p == 0 {
            -1
        } else {
            127 - p.leading_zeros() as i32
        }
    }

    fn poly_rem(mut a: u128, m: u128) -> u128 {
        while deg(a) >= deg(m) {
            a ^= m << (deg(a) - deg(m));
        }
        a
    }

    fn poly_gcd(mut a: u128, mut b: u128) -> u128 {
        while b != 0 {
            let r = poly_rem(a, b);
            a = b;
            b = r;
        }
        a
    }

    /// Rabin's test: x^(2^w) = x, and gcd(x^(2^(w/q)) - x, f) = 1 for primes q | w.
    fn is_irreducible(field: &BinaryField) -> bool {
        let w = field.width;
        if w == 1 {
            return true;
        }
        let frob = |k: u32| {
            let mut r = 2u128;
            for _ in 0..k {
                r = field.mul(r, r);
            }
            r
        };
        if frob(w) != 2 {
            return false;
        }
        let primes = (2..=w).filter(|q| w.is_multiple_of(*q) && (2..*q).all(|s| q % s != 0));
        for q in primes {
            let h = frob(w / q) ^ 2;
            if poly_gcd((1u128 << w) | field.low, h) != 1 {
                return false;
            }
        }
        true
    }

    #[test]
    fn modulus_table_is_irreducible() {
        for w in 1..=MAX_WIDTH {
            let f = BinaryField::new(w).unwrap();
            assert!(is_irreducible(&f), "width {w}");
        }
        assert!(BinaryField::new(0).is_err());
        assert!(BinaryField::new(128).is_err());
    }

    #[test]
    fn gf8_multiplication_table_spot_checks() {
        // GF(2^3) with x^3 + x + 1: x * x^2 = x^3 = x + 1.
        let f = BinaryField::new(3).unwrap();
        assert_eq!(f.mul(0b010, 0b100), 0b011);
        assert_eq!(f.mul(0b111, 0b111), poly_rem(0b10101, 0b1011));
        // Every nonzero element has an inverse.
        for a in 1..8u128 {
            assert!((1..8u128).any(|b| f.mul(a, b) == 1));
        }
    }

    proptest! {
        #[test]
        fn fixed_multiplier_agrees(width in 1u32..=127, a in any::<u128>(), x in any::<u128>()) {
            let f = BinaryField::new(width).unwrap();
            let (a, x) = (a & f.mask(), x & f.mask());
            prop_assert_eq!(f.multiplier(x).apply(a), f.mul(a, x));
            prop_assert_eq!(f.mul(a, x), f.mul(x, a));
        }
    }
}
