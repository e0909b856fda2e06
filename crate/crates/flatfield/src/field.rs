//! Exact arithmetic in the prime field F_p for small p.
//!
//! Elements are plain `u32` values kept reduced to `[0, p)`. All experiments
//! run over tiny fields, so the modulus is capped at `MAX_MODULUS` and the
//! inverse is found by exhaustive search.

use crate::error::{Error, Result};

/// Largest supported modulus. Keeps every product inside `u32` and lets
/// points of F_p^n (n ≤ 8) pack into a single `u64` code.
pub const MAX_MODULUS: u32 = 31;

/// The prime field F_p. Construction checks primality by trial division.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if p > MAX_MODULUS {
            return Err(Error::ModulusTooLarge(p));
        }
        if p < 2 || (2..p).any(|d| d * d <= p && p % d == 0) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    /// Internal constructor for moduli already validated elsewhere.
    pub(crate) fn new_unchecked(p: u32) -> Self {
        PrimeField { p }
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.p
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        (a + self.p - b % self.p) % self.p
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        (a * b) % self.p
    }

    pub fn neg(&self, a: u32) -> u32 {
        (self.p - a % self.p) % self.p
    }

    /// Multiplicative inverse by exhaustive search; exact for p ≤ 31.
    pub fn inv(&self, a: u32) -> Result<u32> {
        let a = a % self.p;
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        for x in 1..self.p {
            if (a * x) % self.p == 1 {
                return Ok(x);
            }
        }
        unreachable!("every nonzero element of a prime field has an inverse")
    }

    /// Reduce a possibly-negative integer into `[0, p)`.
    pub fn reduce(&self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_check() {
        for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
            assert!(PrimeField::new(p).is_ok(), "{p} should be accepted");
        }
        for p in [0u32, 1, 4, 6, 9, 15, 21, 25, 27] {
            assert_eq!(PrimeField::new(p), Err(Error::NotPrime(p)));
        }
        assert_eq!(PrimeField::new(37), Err(Error::ModulusTooLarge(37)));
    }

    #[test]
    fn inverse_examples() {
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(f7.inv(1).unwrap(), 1);
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(f5.inv(2).unwrap(), 3);
        assert_eq!(f5.inv(4).unwrap(), 4);
        assert_eq!(f5.inv(0), Err(Error::DivisionByZero));
    }

    #[test]
    fn inverse_is_involutive() {
        for p in [2u32, 3, 5, 7, 11, 31] {
            let f = PrimeField::new(p).unwrap();
            for a in 1..p {
                let inv = f.inv(a).unwrap();
                assert_eq!(f.mul(a, inv), 1);
                assert_eq!(f.inv(inv).unwrap(), a);
            }
        }
    }

    #[test]
    fn reduce_handles_negatives() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(f.reduce(-1), 4);
        assert_eq!(f.reduce(-5), 0);
        assert_eq!(f.reduce(12), 2);
    }
}
