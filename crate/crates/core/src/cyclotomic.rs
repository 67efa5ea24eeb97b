//! Elements of Z[ζ_p] in the power basis {1, ζ, …, ζ^{p−2}}.
//!
//! Every [`CycInt`] is kept fully reduced modulo Φ_p(ζ) = 0, so equality is a
//! plain comparison of coefficient vectors.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prime::OddPrime;
use crate::resultant;

/// Largest p for which ring arithmetic is supported.
pub const MAX_RING_PRIME: u64 = 101;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithmeticError {
    #[error("elements of Z[ζ_{left}] and Z[ζ_{right}] cannot be combined")]
    RingMismatch { left: u64, right: u64 },
    #[error("coefficient vector of length {len} exceeds p = {p}")]
    Malformed { len: usize, p: u64 },
    #[error("σ_{k} is not an automorphism of Q(ζ_{p})")]
    InvalidAutomorphism { k: u64, p: u64 },
    #[error("p = {p} exceeds the supported ring limit {MAX_RING_PRIME}")]
    UnsupportedPrime { p: u64 },
    #[error("conjugate product left a non-rational element: {0}")]
    NonRationalNorm(String),
}

/// The ring Z[ζ_p] for a supported odd prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CyclotomicRing {
    p: OddPrime,
}

impl CyclotomicRing {
    pub fn new(p: OddPrime) -> Result<Self, ArithmeticError> {
        if p.get() > MAX_RING_PRIME {
            return Err(ArithmeticError::UnsupportedPrime { p: p.get() });
        }
        Ok(CyclotomicRing { p })
    }

    pub fn p(self) -> OddPrime {
        self.p
    }

    /// Number of basis coordinates, p − 1.
    pub fn degree(self) -> usize {
        self.p.get() as usize - 1
    }

    fn modulus(self) -> usize {
        self.p.get() as usize
    }

    pub fn zero(self) -> CycInt {
        CycInt { ring: self, coeffs: vec![BigInt::zero(); self.degree()] }
    }

    pub fn one(self) -> CycInt {
        self.from_int(1)
    }

    pub fn from_int(self, value: impl Into<BigInt>) -> CycInt {
        let mut z = self.zero();
        z.coeffs[0] = value.into();
        z
    }

    /// ζ^k for any integer exponent.
    pub fn zeta_pow(self, k: i64) -> CycInt {
        let e = k.rem_euclid(self.modulus() as i64) as usize;
        let mut buf = vec![BigInt::zero(); self.modulus()];
        buf[e] = BigInt::one();
        self.reduce(buf)
    }

    pub fn zeta(self) -> CycInt {
        self.zeta_pow(1)
    }

    /// The generator 1 − ζ of 𝔭.
    pub fn one_minus_zeta(self) -> CycInt {
        let mut z = self.one();
        z.coeffs[1] = BigInt::from(-1);
        z
    }

    /// Canonical element from at most p power-basis coefficients.
    pub fn from_coeffs(self, raw: Vec<BigInt>) -> Result<CycInt, ArithmeticError> {
        if raw.len() > self.modulus() {
            return Err(ArithmeticError::Malformed { len: raw.len(), p: self.p.get() });
        }
        let mut buf = raw;
        buf.resize(self.modulus(), BigInt::zero());
        Ok(self.reduce(buf))
    }

    /// Reduce a length-p buffer by ζ^{p−1} = −(1 + ζ + … + ζ^{p−2}).
    fn reduce(self, mut buf: Vec<BigInt>) -> CycInt {
        debug_assert_eq!(buf.len(), self.modulus());
        let top = buf.pop().unwrap_or_default();
        if !top.is_zero() {
            for c in buf.iter_mut() {
                *c -= &top;
            }
        }
        CycInt { ring: self, coeffs: buf }
    }

    /// ∏_{k=2}^{p−1} (1 − ζ^k); multiplying it by 1 − ζ gives p.
    fn pi_cofactor(self) -> CycInt {
        (2..self.modulus() as i64).fold(self.one(), |acc, k| {
            let factor = self.one().sub_unchecked(&self.zeta_pow(k));
            acc.mul_unchecked(&factor)
        })
    }
}

/// Valuation at 𝔭, with `Infinite` for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Valuation {
    Finite(u64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("∞"),
        }
    }
}

/// An element of Z[ζ_p].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycInt {
    ring: CyclotomicRing,
    coeffs: Vec<BigInt>,
}

impl CycInt {
    pub fn from_coeffs(p: OddPrime, raw: Vec<BigInt>) -> Result<Self, ArithmeticError> {
        CyclotomicRing::new(p)?.from_coeffs(raw)
    }

    pub fn ring(&self) -> CyclotomicRing {
        self.ring
    }

    pub fn p(&self) -> OddPrime {
        self.ring.p
    }

    /// Power-basis coordinates; always exactly p − 1 of them.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// Bit length of the largest coordinate.
    pub fn max_coeff_bits(&self) -> u64 {
        resultant::max_bits(&self.coeffs)
    }

    fn check_same(&self, other: &CycInt) -> Result<(), ArithmeticError> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(ArithmeticError::RingMismatch { left: self.p().get(), right: other.p().get() })
        }
    }

    pub fn add(&self, other: &CycInt) -> Result<CycInt, ArithmeticError> {
        self.check_same(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn sub(&self, other: &CycInt) -> Result<CycInt, ArithmeticError> {
        self.check_same(other)?;
        Ok(self.sub_unchecked(other))
    }

    pub fn mul(&self, other: &CycInt) -> Result<CycInt, ArithmeticError> {
        self.check_same(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn neg(&self) -> CycInt {
        CycInt { ring: self.ring, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub(crate) fn add_unchecked(&self, other: &CycInt) -> CycInt {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        CycInt { ring: self.ring, coeffs }
    }

    pub(crate) fn sub_unchecked(&self, other: &CycInt) -> CycInt {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        CycInt { ring: self.ring, coeffs }
    }

    pub(crate) fn mul_unchecked(&self, other: &CycInt) -> CycInt {
        let p = self.ring.modulus();
        let mut buf = vec![BigInt::zero(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                // ζ^p = 1
                let k = if i + j >= p { i + j - p } else { i + j };
                buf[k] += a * b;
            }
        }
        self.ring.reduce(buf)
    }

    /// self^e by repeated squaring.
    pub fn pow(&self, mut e: u64) -> CycInt {
        let mut base = self.clone();
        let mut acc = self.ring.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// σ_k(self), where σ_k: ζ ↦ ζ^k.
    pub fn conjugate(&self, k: u64) -> Result<CycInt, ArithmeticError> {
        let p = self.ring.modulus();
        let k = (k % p as u64) as usize;
        if k == 0 {
            return Err(ArithmeticError::InvalidAutomorphism { k: 0, p: p as u64 });
        }
        let mut buf = vec![BigInt::zero(); p];
        for (i, c) in self.coeffs.iter().enumerate() {
            buf[i * k % p] += c;
        }
        Ok(self.ring.reduce(buf))
    }

    /// Absolute norm N_{Q(ζ_p)/Q}, computed as res(Φ_p, a).
    pub fn norm(&self) -> BigInt {
        let cyclotomic = vec![BigInt::one(); self.ring.modulus()];
        resultant::resultant(&cyclotomic, &self.coeffs)
    }

    /// Absolute norm as the product of all p − 1 conjugates.
    ///
    /// The reduced product must be rational; anything else is an arithmetic
    /// bug and reported as [`ArithmeticError::NonRationalNorm`].
    pub fn norm_by_conjugates(&self) -> Result<BigInt, ArithmeticError> {
        let p = self.ring.modulus() as u64;
        let mut acc = self.clone();
        for k in 2..p {
            acc = acc.mul_unchecked(&self.conjugate(k)?);
        }
        if acc.coeffs[1..].iter().any(|c| !c.is_zero()) {
            return Err(ArithmeticError::NonRationalNorm(acc.to_string()));
        }
        Ok(acc.coeffs.swap_remove(0))
    }

    /// The quotient by 1 − ζ, or `None` when self ∉ 𝔭.
    pub fn divide_by_pi(&self) -> Option<CycInt> {
        self.divide_by_pi_with(&self.ring.pi_cofactor())
    }

    fn divide_by_pi_with(&self, cofactor: &CycInt) -> Option<CycInt> {
        let p = BigInt::from(self.ring.p.get());
        let scaled = self.mul_unchecked(cofactor);
        let mut coeffs = Vec::with_capacity(scaled.coeffs.len());
        for c in scaled.coeffs {
            let (q, r) = c.div_rem(&p);
            if !r.is_zero() {
                return None;
            }
            coeffs.push(q);
        }
        Some(CycInt { ring: self.ring, coeffs })
    }

    /// v_𝔭(self) for 𝔭 = (1 − ζ).
    pub fn pi_valuation(&self) -> Valuation {
        if self.is_zero() {
            return Valuation::Infinite;
        }
        let cofactor = self.ring.pi_cofactor();
        let mut v = 0;
        let mut cur = self.clone();
        while let Some(q) = cur.divide_by_pi_with(&cofactor) {
            v += 1;
            cur = q;
        }
        Valuation::Finite(v)
    }

    /// self ≡ other (mod 𝔭).
    pub fn congruent_mod_pi(&self, other: &CycInt) -> Result<bool, ArithmeticError> {
        let diff = self.sub(other)?;
        Ok(diff.is_zero() || diff.pi_valuation() >= Valuation::Finite(1))
    }
}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if wrote {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => f.write_str("ζ")?,
                (1, false) => write!(f, "{mag}ζ")?,
                (_, true) => write!(f, "ζ^{i}")?,
                (_, false) => write!(f, "{mag}ζ^{i}")?,
            }
            wrote = true;
        }
        if !wrote {
            f.write_str("0")?;
        }
        Ok(())
    }
}
