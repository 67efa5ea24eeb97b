//! The map φ_p(z) = (z − 1)^p + 2 − ζ_p: construction, point and symbolic
//! iteration, and the structural facts about its iterates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclotomic::{ArithmeticError, CycInt, CyclotomicRing, Valuation};
use crate::prime::OddPrime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
    #[error("coefficient size {bits} bits exceeds the cap of {limit} bits at iterate {step}")]
    CoefficientCap { bits: u64, limit: u64, step: u64 },
    #[error("degree {p}^{n} exceeds the cap of {limit} coefficients (largest feasible n is {largest_feasible})")]
    DegreeCap { p: u64, n: u64, limit: usize, largest_feasible: u64 },
}

/// Resource guards against the doubly exponential growth of iterates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeLimits {
    /// Largest coordinate bit length allowed in a point iterate.
    pub max_coeff_bits: u64,
    /// Largest degree allowed for a symbolic iterate.
    pub max_degree: usize,
}

impl Default for SizeLimits {
    fn default() -> Self {
        SizeLimits { max_coeff_bits: 1 << 22, max_degree: 10_000 }
    }
}

impl SizeLimits {
    /// Largest n with p^n within `max_degree`.
    pub fn largest_feasible_degree_exponent(&self, p: OddPrime) -> u64 {
        let mut n = 0;
        let mut deg: u128 = 1;
        while deg * p.get() as u128 <= self.max_degree as u128 {
            deg *= p.get() as u128;
            n += 1;
        }
        n
    }

    fn check_degree(&self, p: OddPrime, n: u64) -> Result<(), DynamicsError> {
        let largest = self.largest_feasible_degree_exponent(p);
        if n > largest {
            return Err(DynamicsError::DegreeCap {
                p: p.get(),
                n,
                limit: self.max_degree,
                largest_feasible: largest,
            });
        }
        Ok(())
    }
}

/// A polynomial in z with coefficients in Z[ζ_p], lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycPoly {
    ring: CyclotomicRing,
    coeffs: Vec<CycInt>,
}

impl CycPoly {
    pub fn new(ring: CyclotomicRing, coeffs: Vec<CycInt>) -> Result<Self, ArithmeticError> {
        if let Some(bad) = coeffs.iter().find(|c| c.ring() != ring) {
            return Err(ArithmeticError::RingMismatch { left: ring.p().get(), right: bad.p().get() });
        }
        Ok(CycPoly { ring, coeffs }.trimmed())
    }

    pub fn zero(ring: CyclotomicRing) -> Self {
        CycPoly { ring, coeffs: Vec::new() }
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last().is_some_and(CycInt::is_zero) {
            self.coeffs.pop();
        }
        self
    }

    pub fn ring(&self) -> CyclotomicRing {
        self.ring
    }

    pub fn coeffs(&self) -> &[CycInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&CycInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(CycInt::is_one)
    }

    /// The constant coefficient (zero for the zero polynomial).
    pub fn constant(&self) -> CycInt {
        self.coeffs.first().cloned().unwrap_or_else(|| self.ring.zero())
    }

    /// Horner evaluation at `x`.
    pub fn eval(&self, x: &CycInt) -> Result<CycInt, ArithmeticError> {
        if x.ring() != self.ring {
            return Err(ArithmeticError::RingMismatch {
                left: self.ring.p().get(),
                right: x.p().get(),
            });
        }
        Ok(self
            .coeffs
            .iter()
            .rev()
            .fold(self.ring.zero(), |acc, c| acc.mul_unchecked(x).add_unchecked(c)))
    }

    fn mul(&self, other: &CycPoly) -> CycPoly {
        if self.is_zero() || other.is_zero() {
            return CycPoly::zero(self.ring);
        }
        let mut out = vec![self.ring.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add_unchecked(&a.mul_unchecked(b));
            }
        }
        CycPoly { ring: self.ring, coeffs: out }.trimmed()
    }

    fn pow(&self, mut e: u64) -> CycPoly {
        let mut base = self.clone();
        let mut acc = CycPoly { ring: self.ring, coeffs: vec![self.ring.one()] };
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    fn add_constant(mut self, c: &CycInt) -> CycPoly {
        if self.coeffs.is_empty() {
            self.coeffs.push(self.ring.zero());
        }
        self.coeffs[0] = self.coeffs[0].add_unchecked(c);
        self.trimmed()
    }
}

/// φ_p(z) = (z − 1)^p + 2 − ζ_p, expanded.
pub fn phi(p: OddPrime) -> Result<CycPoly, ArithmeticError> {
    let ring = CyclotomicRing::new(p)?;
    let degree = p.get() as usize;
    let mut coeffs = Vec::with_capacity(degree + 1);
    let mut binom = BigInt::one();
    for i in 0..=degree {
        // binomial(p, i) · (−1)^{p−i}
        let signed = if (degree - i) % 2 == 1 { -binom.clone() } else { binom.clone() };
        coeffs.push(ring.from_int(signed));
        binom = binom * BigInt::from(degree - i) / BigInt::from(i + 1);
    }
    coeffs[0] = coeffs[0].add_unchecked(&ring.from_int(2)).sub_unchecked(&ring.zeta());
    Ok(CycPoly { ring, coeffs })
}

/// φ_p^n(x0) by repeated Horner evaluation; n = 0 returns `x0`.
pub fn iterate_point(
    p: OddPrime,
    n: u64,
    x0: &CycInt,
    limits: &SizeLimits,
) -> Result<CycInt, DynamicsError> {
    let f = phi(p)?;
    let mut x = x0.clone();
    for step in 1..=n {
        x = f.eval(&x)?;
        let bits = x.max_coeff_bits();
        if bits > limits.max_coeff_bits {
            return Err(DynamicsError::CoefficientCap { bits, limit: limits.max_coeff_bits, step });
        }
    }
    Ok(x)
}

/// The orbit φ_p^t(x0) for t = 0..=t_max.
pub fn orbit(
    p: OddPrime,
    t_max: u64,
    x0: &CycInt,
    limits: &SizeLimits,
) -> Result<Vec<CycInt>, DynamicsError> {
    let f = phi(p)?;
    let mut out = Vec::with_capacity(t_max as usize + 1);
    out.push(x0.clone());
    for step in 1..=t_max {
        let next = f.eval(out.last().expect("orbit is nonempty"))?;
        let bits = next.max_coeff_bits();
        if bits > limits.max_coeff_bits {
            return Err(DynamicsError::CoefficientCap { bits, limit: limits.max_coeff_bits, step });
        }
        out.push(next);
    }
    Ok(out)
}

/// The symbolic iterate φ_p^n(z), of degree p^n.
pub fn iterate_poly(p: OddPrime, n: u64, limits: &SizeLimits) -> Result<CycPoly, DynamicsError> {
    limits.check_degree(p, n)?;
    let base = phi(p)?;
    let ring = base.ring;
    if n == 0 {
        return Ok(CycPoly { ring, coeffs: vec![ring.zero(), ring.one()] });
    }
    let shift = ring.from_int(2).sub_unchecked(&ring.zeta());
    let minus_one = ring.from_int(-1);
    let mut f = base;
    for _ in 1..n {
        // φ(F) = (F − 1)^p + 2 − ζ
        f = f.add_constant(&minus_one).pow(p.get()).add_constant(&shift);
    }
    Ok(f)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CheckVerdict {
    Pass,
    Refuted { index: u64, clause: String },
}

impl CheckVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, CheckVerdict::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EisensteinReport {
    pub p: OddPrime,
    pub n: u64,
    pub degree: usize,
    pub monic: bool,
    pub middle_divisible_by_p: bool,
    pub constant_is_one_minus_zeta: bool,
    pub constant_valuation: Valuation,
    pub verdict: CheckVerdict,
}

/// Checks that φ_p^n(z) is Eisenstein at 𝔭: monic, every intermediate
/// coefficient has all coordinates divisible by p, and the constant term is
/// exactly 1 − ζ (so its 𝔭-valuation is 1).
pub fn eisenstein_check(
    p: OddPrime,
    n: u64,
    limits: &SizeLimits,
) -> Result<EisensteinReport, DynamicsError> {
    let f = iterate_poly(p, n, limits)?;
    let degree = f.degree().unwrap_or(0);
    let pb = BigInt::from(p.get());
    let monic = f.is_monic();
    let bad_middle = (1..degree).find(|&i| {
        f.coeffs[i].coeffs().iter().any(|c| !c.is_multiple_of(&pb))
    });
    let constant = f.constant();
    let constant_ok = constant == f.ring.one_minus_zeta();
    let verdict = if !monic {
        CheckVerdict::Refuted { index: degree as u64, clause: "leading coefficient is not 1".into() }
    } else if let Some(i) = bad_middle {
        CheckVerdict::Refuted { index: i as u64, clause: "coefficient not divisible by p".into() }
    } else if !constant_ok {
        CheckVerdict::Refuted { index: 0, clause: "constant term differs from 1 - ζ".into() }
    } else {
        CheckVerdict::Pass
    };
    Ok(EisensteinReport {
        p,
        n,
        degree,
        monic,
        middle_divisible_by_p: bad_middle.is_none(),
        constant_is_one_minus_zeta: constant_ok,
        constant_valuation: constant.pi_valuation(),
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub p: OddPrime,
    pub s_max: u64,
    /// φ(0) = 1 − ζ
    pub phi_of_zero: bool,
    /// φ(1 − ζ) = 1 − ζ
    pub phi_of_fixed_point: bool,
    /// φ^s(0) = 1 − ζ for s = 1..=s_max
    pub iterates: Vec<bool>,
    pub verdict: CheckVerdict,
}

/// Checks that 0 lands on the fixed point 1 − ζ after one step.
pub fn fixed_point_check(
    p: OddPrime,
    s_max: u64,
    limits: &SizeLimits,
) -> Result<FixedPointReport, DynamicsError> {
    let f = phi(p)?;
    let ring = f.ring;
    let target = ring.one_minus_zeta();
    let phi_of_zero = f.eval(&ring.zero())? == target;
    let phi_of_fixed_point = f.eval(&target)? == target;
    let iterates: Vec<bool> = orbit(p, s_max, &ring.zero(), limits)?
        .into_iter()
        .skip(1)
        .map(|x| x == target)
        .collect();
    let verdict = if !phi_of_zero {
        CheckVerdict::Refuted { index: 1, clause: "φ(0) differs from 1 - ζ".into() }
    } else if !phi_of_fixed_point {
        CheckVerdict::Refuted { index: 0, clause: "1 - ζ is not fixed by φ".into() }
    } else if let Some(s) = iterates.iter().position(|ok| !ok) {
        CheckVerdict::Refuted { index: s as u64 + 1, clause: "φ^s(0) differs from 1 - ζ".into() }
    } else {
        CheckVerdict::Pass
    };
    Ok(FixedPointReport { p, s_max, phi_of_zero, phi_of_fixed_point, iterates, verdict })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitEntry {
    pub t: u64,
    /// φ^t(1) ≡ 1 (mod 𝔭)
    pub congruent_to_one: bool,
    /// p ∤ N(φ^t(1))
    pub norm_coprime_to_p: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub p: OddPrime,
    pub t_max: u64,
    pub entries: Vec<OrbitEntry>,
    pub verdict: CheckVerdict,
}

/// Checks φ^t(1) ≡ 1 (mod 𝔭) for t = 0..=t_max, both by valuation and by
/// p ∤ N(φ^t(1)).
pub fn orbit_congruence_check(
    p: OddPrime,
    t_max: u64,
    limits: &SizeLimits,
) -> Result<OrbitReport, DynamicsError> {
    let ring = CyclotomicRing::new(p)?;
    let one = ring.one();
    let pb = BigInt::from(p.get());
    let mut entries = Vec::new();
    for (t, x) in orbit(p, t_max, &one, limits)?.into_iter().enumerate() {
        entries.push(OrbitEntry {
            t: t as u64,
            congruent_to_one: x.congruent_mod_pi(&one)?,
            norm_coprime_to_p: !x.norm().is_multiple_of(&pb),
        });
    }
    let verdict = match entries.iter().find(|e| !(e.congruent_to_one && e.norm_coprime_to_p)) {
        Some(e) => CheckVerdict::Refuted { index: e.t, clause: "φ^t(1) is not ≡ 1 mod 𝔭".into() },
        None => CheckVerdict::Pass,
    };
    Ok(OrbitReport { p, t_max, entries, verdict })
}

/// The three structural checks at one (p, n).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub eisenstein: EisensteinReport,
    pub fixed_point: FixedPointReport,
    pub orbit: OrbitReport,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.eisenstein.verdict.passed()
            && self.fixed_point.verdict.passed()
            && self.orbit.verdict.passed()
    }
}

/// Eisenstein shape of φ_p^n, plus fixed point and orbit congruence up to n.
pub fn structure_check(
    p: OddPrime,
    n: u64,
    limits: &SizeLimits,
) -> Result<StructureReport, DynamicsError> {
    Ok(StructureReport {
        eisenstein: eisenstein_check(p, n, limits)?,
        fixed_point: fixed_point_check(p, n, limits)?,
        orbit: orbit_congruence_check(p, n, limits)?,
    })
}
