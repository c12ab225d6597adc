//! Karp-Rabin polynomial hashing of walk-output segments.
//!
//! `f(s) = sum s_i * r^(i-1) mod p`, so a single character hashes to itself
//! and a parent segment's hash is formed from its two children with one
//! multiplication.

use rand::Rng;
use thiserror::Error;

use crate::mix::{derived_rng, domain};
use crate::strings::Symbol;

/// `2^61 - 1`, the default modulus.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HashError {
    #[error("symbol {symbol} does not fit below the hash modulus {prime}")]
    SymbolTooLarge { symbol: Symbol, prime: u64 },
    #[error("modulus {0} is not a usable prime")]
    NotPrime(u64),
    #[error("base {base} must lie in 1..{prime}")]
    BadBase { base: u64, prime: u64 },
    #[error("collision bound {0} must lie in (0, 1)")]
    BadCollisionBound(f64),
    #[error("no 63-bit prime exceeds the required bound {0}")]
    BoundTooLarge(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashParams {
    prime: u64,
    base: u64,
}

/// Hash of one segment together with its length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SegmentHash {
    pub value: u64,
    pub length: u64,
}

impl SegmentHash {
    pub const EMPTY: SegmentHash = SegmentHash { value: 0, length: 0 };
}

impl HashParams {
    pub fn new(prime: u64, base: u64) -> Result<Self, HashError> {
        if !(3..1 << 63).contains(&prime) || !is_prime(prime) {
            return Err(HashError::NotPrime(prime));
        }
        if base == 0 || base >= prime {
            return Err(HashError::BadBase { base, prime });
        }
        Ok(Self { prime, base })
    }

    /// Per-walk parameters: the modulus is `2^61 - 1` unless the alphabet or
    /// the collision budget (`m / collision_bound`, doubled) demands a larger
    /// prime; the base is uniform in `2..=p-2`.
    pub fn derive(
        seed: u128,
        walk_index: u64,
        alphabet_size: u64,
        m: usize,
        collision_bound: f64,
    ) -> Result<Self, HashError> {
        if !(collision_bound > 0.0 && collision_bound < 1.0) {
            return Err(HashError::BadCollisionBound(collision_bound));
        }
        let need = (alphabet_size as f64).max(2.0 * m as f64 / collision_bound);
        let prime = if need < MERSENNE_61 as f64 {
            MERSENNE_61
        } else if need < (1u64 << 62) as f64 {
            next_prime(need.ceil() as u64)
        } else {
            return Err(HashError::BoundTooLarge(need));
        };
        let mut rng = derived_rng(seed, domain::ROLLING_HASH, walk_index);
        let base = rng.gen_range(2..=prime - 2);
        Self::new(prime, base)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    #[inline]
    pub(crate) fn mul(&self, a: u64, b: u64) -> u64 {
        let prod = u128::from(a) * u128::from(b);
        if self.prime == MERSENNE_61 {
            let folded = (prod as u64 & MERSENNE_61) + (prod >> 61) as u64;
            let folded = (folded & MERSENNE_61) + (folded >> 61);
            if folded >= MERSENNE_61 {
                folded - MERSENNE_61
            } else {
                folded
            }
        } else {
            (prod % u128::from(self.prime)) as u64
        }
    }

    #[inline]
    pub(crate) fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.prime {
            s - self.prime
        } else {
            s
        }
    }

    /// `base^exp mod p`.
    pub fn power(&self, mut exp: u64) -> u64 {
        let mut acc = 1;
        let mut b = self.base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Appends one character.
    pub fn extend(&self, h: SegmentHash, symbol: Symbol) -> Result<SegmentHash, HashError> {
        let c = u64::from(symbol);
        if c >= self.prime {
            return Err(HashError::SymbolTooLarge { symbol, prime: self.prime });
        }
        let term = self.mul(c, self.power(h.length));
        Ok(SegmentHash { value: self.add(h.value, term), length: h.length + 1 })
    }

    /// Hash of the whole string, character by character.
    pub fn hash_of(&self, symbols: &[Symbol]) -> Result<SegmentHash, HashError> {
        let mut value = 0;
        let mut scale = 1;
        for &symbol in symbols {
            let c = u64::from(symbol);
            if c >= self.prime {
                return Err(HashError::SymbolTooLarge { symbol, prime: self.prime });
            }
            value = self.add(value, self.mul(c, scale));
            scale = self.mul(scale, self.base);
        }
        Ok(SegmentHash { value, length: symbols.len() as u64 })
    }

    /// Hash of `left ∘ right`.
    pub fn combine(&self, left: SegmentHash, right: SegmentHash) -> SegmentHash {
        self.combine_scaled(left, right, self.power(left.length))
    }

    /// [`combine`](Self::combine) with `base^left.length` supplied by the
    /// caller; the tree encoder caches one power per level.
    #[inline]
    pub fn combine_scaled(&self, left: SegmentHash, right: SegmentHash, scale: u64) -> SegmentHash {
        debug_assert_eq!(scale, self.power(left.length));
        SegmentHash {
            value: self.add(left.value, self.mul(right.value, scale)),
            length: left.length + right.length,
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (u128::from(a) * u128::from(b) % u128::from(m)) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime(c) {
        c += 1;
    }
    c
}
