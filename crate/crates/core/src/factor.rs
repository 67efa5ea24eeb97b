//! Primality testing and seeded factorisation of rational integers.
//!
//! Sized for the norms that show up in certificates: trial division to a
//! configurable bound followed by Brent's variant of Pollard's rho. Results
//! are partial when the budget runs out, but every listed prime is proven
//! prime and carries its exact exponent.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decimal;

/// Above this bound Miller–Rabin with the first 13 prime bases is no longer
/// known to be deterministic.
pub const DETERMINISTIC_BOUND: u128 = 3_317_044_064_679_887_385_961_981;

const DETERMINISTIC_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("cannot factor zero")]
    Zero,
    #[error("trial bound must be at least 2, got {0}")]
    TrialBound(u64),
    #[error("factorisation of {0} does not reconstruct the input")]
    Reconstruction(BigUint),
}

/// Outcome of a primality test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primality {
    Composite,
    /// Proven: deterministic Miller–Rabin range or trial division.
    Prime,
    /// Passed Baillie–PSW above the deterministic range; no known
    /// counterexample exists, but none is ruled out either.
    ProbablePrime,
}

fn mr_round_u64(n: u64, d: u64, s: u32, a: u64) -> bool {
    let m = n as u128;
    let mut x = crate::prime::pow_mod(a as u128, d as u128, m);
    if x == 1 || x == m - 1 {
        return true;
    }
    for _ in 1..s {
        x = x * x % m;
        if x == m - 1 {
            return true;
        }
    }
    false
}

/// Deterministic primality for machine words.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &DETERMINISTIC_BASES[..12] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    DETERMINISTIC_BASES[..12].iter().all(|&a| mr_round_u64(n, d, s, a))
}

fn strong_probable_prime(n: &BigUint, d: &BigUint, s: u64, a: &BigUint) -> bool {
    let n_minus_1 = n - 1u32;
    let mut x = a.modpow(d, n);
    if x.is_one() || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = &x * &x % n;
        if x == n_minus_1 {
            return true;
        }
        if x.is_one() {
            return false;
        }
    }
    false
}

fn jacobi(a: &BigInt, n: &BigUint) -> i32 {
    let n = BigInt::from(n.clone());
    let mut a = a.mod_floor(&n);
    let mut n = n;
    let mut result = 1;
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = (&n % 8u32).to_u32().unwrap_or(0);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32).to_u32() == Some(3) && (&n % 4u32).to_u32() == Some(3) {
            result = -result;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

fn half_mod(x: BigUint, n: &BigUint) -> BigUint {
    if x.is_even() {
        x >> 1
    } else {
        (x + n) >> 1
    }
}

/// Strong Lucas probable-prime test with Selfridge's parameters.
fn strong_lucas(n: &BigUint) -> bool {
    let sqrt = n.sqrt();
    if &sqrt * &sqrt == *n {
        return false;
    }
    let mut d_param = BigInt::from(5);
    loop {
        match jacobi(&d_param, n) {
            -1 => break,
            0 => {
                // gcd(D, n) > 1
                let g = BigInt::from(n.clone()).gcd(&d_param);
                if g != BigInt::from(n.clone()) {
                    return false;
                }
            }
            _ => {}
        }
        d_param = if d_param.sign() == num_bigint::Sign::Plus {
            -(d_param + BigInt::from(2))
        } else {
            -(d_param - BigInt::from(2))
        };
    }
    let ni = BigInt::from(n.clone());
    let to_res = |v: &BigInt| v.mod_floor(&ni).to_biguint().expect("reduced residue");
    let d_mod = to_res(&d_param);
    let q_mod = to_res(&((BigInt::one() - &d_param) / 4));

    let n_plus_1 = n + 1u32;
    let s = n_plus_1.trailing_zeros().unwrap_or(0);
    let d = &n_plus_1 >> s;

    // P = 1
    let mut u = BigUint::one();
    let mut v = BigUint::one();
    let mut qk = q_mod.clone();
    let bits = d.bits();
    for i in (0..bits - 1).rev() {
        u = &u * &v % n;
        v = (&v * &v + n * 2u32 - (&qk << 1u32) % n) % n;
        qk = &qk * &qk % n;
        if d.bit(i) {
            let u_next = half_mod((&u + &v) % n, n);
            let v_next = half_mod((&d_mod * &u + &v) % n, n);
            u = u_next;
            v = v_next;
            qk = &qk * &q_mod % n;
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = (&v * &v + n * 2u32 - (&qk << 1u32) % n) % n;
        qk = &qk * &qk % n;
        if v.is_zero() {
            return true;
        }
    }
    false
}

/// Primality of `n` with an honest account of how it was established.
pub fn primality(n: &BigUint) -> Primality {
    if let Some(small) = n.to_u64() {
        return if is_prime_u64(small) { Primality::Prime } else { Primality::Composite };
    }
    for &q in &DETERMINISTIC_BASES {
        if (n % q).is_zero() {
            return Primality::Composite;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    if n.to_u128().is_some_and(|v| v < DETERMINISTIC_BOUND) {
        let proven = DETERMINISTIC_BASES
            .iter()
            .all(|&a| strong_probable_prime(n, &d, s, &BigUint::from(a)));
        return if proven { Primality::Prime } else { Primality::Composite };
    }
    if strong_probable_prime(n, &d, s, &BigUint::from(2u32)) && strong_lucas(n) {
        Primality::ProbablePrime
    } else {
        Primality::Composite
    }
}

/// True for proven primes and for BPSW probable primes above
/// [`DETERMINISTIC_BOUND`].
pub fn is_prime(n: &BigUint) -> bool {
    primality(n) != Primality::Composite
}

/// Primes up to and including `bound`.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let size = bound as usize + 1;
    let mut composite = vec![false; size];
    let mut out = Vec::new();
    for i in 2..size {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j < size {
            composite[j] = true;
            j += i;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorConfig {
    pub trial_bound: u64,
    pub rho_budget: u64,
    pub rho_seed: u64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig { trial_bound: 100_000, rho_budget: 10_000_000, rho_seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePower {
    #[serde(with = "decimal::biguint")]
    pub prime: BigUint,
    pub exponent: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CofactorStatus {
    Unit,
    PrimePending,
    CompositeUnfactored,
}

/// |n| = ∏ prime^exponent × cofactor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    #[serde(with = "decimal::biguint")]
    pub n: BigUint,
    pub factors: Vec<PrimePower>,
    #[serde(with = "decimal::biguint")]
    pub cofactor: BigUint,
    pub cofactor_status: CofactorStatus,
}

impl Factorization {
    pub fn is_complete(&self) -> bool {
        self.cofactor.is_one()
    }

    pub fn exponent_of(&self, q: &BigUint) -> u32 {
        self.factors.iter().find(|f| &f.prime == q).map_or(0, |f| f.exponent)
    }

    pub fn reconstruct(&self) -> BigUint {
        self.factors
            .iter()
            .fold(self.cofactor.clone(), |acc, f| acc * f.prime.pow(f.exponent))
    }
}

/// Exact multiplicity of `q` in `n`, dividing it out.
fn strip(n: &mut BigUint, q: &BigUint) -> u32 {
    let mut e = 0;
    loop {
        let (quo, rem) = n.div_rem(q);
        if !rem.is_zero() {
            return e;
        }
        *n = quo;
        e += 1;
    }
}

fn brent_rho(n: &BigUint, rng: &mut ChaCha8Rng, budget: &mut u64) -> Option<BigUint> {
    let one = BigUint::one();
    let c = rng.gen_biguint_range(&one, &(n - &one));
    let mut y = rng.gen_biguint_range(&one, &(n - &one));
    let step = |v: &BigUint| (v * v + &c) % n;
    let absdiff = |a: &BigUint, b: &BigUint| if a >= b { a - b } else { b - a };
    let m: u64 = 128;
    let mut r: u64 = 1;
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            y = step(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                if *budget == 0 {
                    return None;
                }
                *budget -= 1;
                y = step(&y);
                q = q * absdiff(&x, &y) % n;
            }
            g = q.gcd(n);
            k += m;
        }
        r *= 2;
    }
    if &g == n {
        loop {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            ys = step(&ys);
            g = absdiff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    if &g == n {
        None
    } else {
        Some(g)
    }
}

/// Split off a perfect power, returning (root, exponent) with exponent ≥ 2.
fn perfect_power(n: &BigUint) -> Option<(BigUint, u32)> {
    let bits = n.bits() as u32;
    (2..=bits).rev().find_map(|k| {
        let root = n.nth_root(k);
        (root > BigUint::one() && root.pow(k) == *n).then_some((root, k))
    })
}

/// Factor |n| by trial division up to `cfg.trial_bound` followed by seeded
/// Brent–Pollard rho within `cfg.rho_budget` iterations.
pub fn factor(n: &BigInt, cfg: &FactorConfig) -> Result<Factorization, FactorError> {
    if n.is_zero() {
        return Err(FactorError::Zero);
    }
    if cfg.trial_bound < 2 {
        return Err(FactorError::TrialBound(cfg.trial_bound));
    }
    let original = n.magnitude().clone();
    let mut rest = original.clone();
    let mut found: Vec<(BigUint, u32)> = Vec::new();

    let mut proven_prime_rest = false;
    for q in primes_up_to(cfg.trial_bound) {
        if rest.is_one() {
            break;
        }
        let qb = BigUint::from(q);
        if &qb * &qb > rest {
            // no factor ≤ √rest remains
            proven_prime_rest = true;
            break;
        }
        if (&rest % q).is_zero() {
            let e = strip(&mut rest, &qb);
            found.push((qb, e));
        }
    }

    let mut leftovers: Vec<BigUint> = Vec::new();
    let mut pending: Vec<BigUint> = Vec::new();
    if !rest.is_one() {
        if proven_prime_rest {
            found.push((rest.clone(), 1));
        } else {
            pending.push(rest.clone());
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rho_seed);
    let mut budget = cfg.rho_budget;
    let mut probable: Vec<BigUint> = Vec::new();
    while let Some(c) = pending.pop() {
        if c.is_one() {
            continue;
        }
        match primality(&c) {
            Primality::Prime => {
                found.push((c, 1));
                continue;
            }
            Primality::ProbablePrime => {
                probable.push(c);
                continue;
            }
            Primality::Composite => {}
        }
        if let Some((root, k)) = perfect_power(&c) {
            for _ in 0..k {
                pending.push(root.clone());
            }
            continue;
        }
        let mut split = None;
        while budget > 0 && split.is_none() {
            split = brent_rho(&c, &mut rng, &mut budget);
        }
        match split {
            Some(d) => {
                let other = &c / &d;
                pending.push(other);
                pending.push(d);
            }
            None => leftovers.push(c),
        }
    }
    leftovers.extend(probable.iter().cloned());

    // merge multiplicities and make each exponent exact against the leftovers
    found.sort();
    let mut factors: Vec<PrimePower> = Vec::new();
    for (q, e) in found {
        match factors.last_mut() {
            Some(last) if last.prime == q => last.exponent += e,
            _ => factors.push(PrimePower { prime: q, exponent: e }),
        }
    }
    for f in factors.iter_mut() {
        for piece in leftovers.iter_mut() {
            f.exponent += strip(piece, &f.prime);
        }
    }
    leftovers.retain(|piece| !piece.is_one());

    let cofactor = leftovers.iter().fold(BigUint::one(), |acc, x| acc * x);
    let cofactor_status = match leftovers.as_slice() {
        [] => CofactorStatus::Unit,
        [single] if probable.contains(single) => CofactorStatus::PrimePending,
        _ => CofactorStatus::CompositeUnfactored,
    };
    let out = Factorization { n: original, factors, cofactor, cofactor_status };
    if out.reconstruct() != out.n {
        return Err(FactorError::Reconstruction(out.n));
    }
    Ok(out)
}

impl PartialOrd for PrimePower {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PrimePower {
    fn cmp(&self, other: &Self) -> Ordering {
        self.prime.cmp(&other.prime).then(self.exponent.cmp(&other.exponent))
    }
}
