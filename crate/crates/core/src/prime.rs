//! The odd prime `p` that parameterises everything else.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::factor::is_prime_u64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrimeError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("cannot parse {0:?} as an integer")]
    Parse(String),
}

/// A prime `p ≥ 3`, checked deterministically at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct OddPrime(u64);

impl OddPrime {
    pub fn new(value: u64) -> Result<Self, PrimeError> {
        if value >= 3 && value % 2 == 1 && is_prime_u64(value) {
            Ok(OddPrime(value))
        } else {
            Err(PrimeError::NotOddPrime(value))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// p² as a `u128`, wide enough for every `p` that fits in a `u64`.
    pub fn square(self) -> u128 {
        (self.0 as u128) * (self.0 as u128)
    }
}

impl TryFrom<u64> for OddPrime {
    type Error = PrimeError;

    fn try_from(value: u64) -> Result<Self, Self::Error> {
        OddPrime::new(value)
    }
}

impl From<OddPrime> for u64 {
    fn from(p: OddPrime) -> u64 {
        p.0
    }
}

impl FromStr for OddPrime {
    type Err = PrimeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: u64 = s.trim().parse().map_err(|_| PrimeError::Parse(s.to_string()))?;
        OddPrime::new(v)
    }
}

impl fmt::Display for OddPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub(crate) fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    // operands are always reduced below m < 2^64
    (a % m) * (b % m) % m
}

pub(crate) fn pow_mod(mut base: u128, mut exp: u128, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u128;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// (2^p − 1) mod p².
pub fn mersenne_residue(p: OddPrime) -> u128 {
    let m = p.square();
    (pow_mod(2, p.get() as u128, m) + m - 1) % m
}
