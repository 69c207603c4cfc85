//! Seeded random rationals for generic-point checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::poly_core::Coeff;

/// Bound on numerators and denominators of sampled rationals.
pub const MAX_PART: i64 = 97;

/// Deterministic source of small nonzero rationals.
pub struct RationalSampler {
    rng: ChaCha8Rng,
}

impl RationalSampler {
    pub fn new(seed: u64) -> Self {
        RationalSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Nonzero rational with |numerator|, |denominator| ≤ 97.
    pub fn rational(&mut self) -> Coeff {
        let mut num = 0;
        while num == 0 {
            num = self.rng.random_range(-MAX_PART..=MAX_PART);
        }
        let den = self.rng.random_range(1..=MAX_PART);
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    /// Rational with |numerator|, denominator ≤ `bound` (zero allowed).
    pub fn bounded(&mut self, bound: i64) -> Coeff {
        let num = self.rng.random_range(-bound..=bound);
        let den = self.rng.random_range(1..=bound);
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    /// Nonzero integer in `-bound..=bound`.
    pub fn small_int(&mut self, bound: i64) -> i64 {
        let mut v = 0;
        while v == 0 {
            v = self.rng.random_range(-bound..=bound);
        }
        v
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{Signed, Zero};

    #[test]
    fn deterministic_and_bounded() {
        let mut a = RationalSampler::new(7);
        let mut b = RationalSampler::new(7);
        for _ in 0..200 {
            let x = a.rational();
            assert_eq!(x, b.rational());
            assert!(!x.is_zero());
            assert!(x.numer().abs() <= BigInt::from(MAX_PART));
            assert!(x.denom().abs() <= BigInt::from(MAX_PART));
        }
    }
}
