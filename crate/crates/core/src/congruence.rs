//! The norm congruence N(φ_p^n(1)) ≡ 2^p − 1 (mod p²), its generalisation to
//! any starting point x ≡ 1 (mod 𝔭), and the Wieferich characterisation
//! "p is Wieferich iff 2^p − 1 is a p-th power mod p²".

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{ArithmeticError, CycInt, CyclotomicRing};
use crate::dynamics::{self, SizeLimits};
use crate::factor::primes_up_to;
use crate::prime::{mersenne_residue, pow_mod, OddPrime};

/// Largest p for which the p-th power criterion is cross-checked by
/// enumeration.
pub const BRUTE_FORCE_LIMIT: u64 = 97;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ItemStatus {
    Pass,
    Fail,
    /// Skipped because an iterate exceeded the configured size cap.
    SizeLimit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceItem {
    /// Iterate level n, or trial number.
    pub index: u64,
    pub residue: Option<u64>,
    pub status: ItemStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CongruenceKind {
    Orbit { n_max: u64 },
    Randomized { trials: u64, coeff_bound: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceReport {
    pub p: OddPrime,
    pub kind: CongruenceKind,
    /// (2^p − 1) mod p².
    pub expected: u64,
    pub items: Vec<CongruenceItem>,
}

impl CongruenceReport {
    pub fn all_pass(&self) -> bool {
        !self.items.is_empty() && self.items.iter().all(|i| i.status == ItemStatus::Pass)
    }

    pub fn hit_size_limit(&self) -> bool {
        self.items.iter().any(|i| i.status == ItemStatus::SizeLimit)
    }
}

fn expected_residue(p: OddPrime) -> u64 {
    mersenne_residue(p) as u64
}

/// N(x) mod p², as a non-negative residue.
pub fn norm_residue(x: &CycInt) -> u64 {
    let m = BigInt::from(x.p().square());
    x.norm().mod_floor(&m).to_u64().expect("residue below p²")
}

fn item(index: u64, residue: u64, expected: u64) -> CongruenceItem {
    let status = if residue == expected { ItemStatus::Pass } else { ItemStatus::Fail };
    CongruenceItem { index, residue: Some(residue), status }
}

/// Compares N(φ_p^n(1)) mod p² with 2^p − 1 for n = 1..=n_max. A level that
/// exceeds the size cap is recorded and the remaining levels are skipped.
pub fn norm_congruence_check(
    p: OddPrime,
    n_max: u64,
    limits: &SizeLimits,
) -> Result<CongruenceReport, ArithmeticError> {
    let ring = CyclotomicRing::new(p)?;
    let f = dynamics::phi(p)?;
    let expected = expected_residue(p);
    let mut items = Vec::new();
    let mut x = ring.one();
    for n in 1..=n_max {
        x = f.eval(&x)?;
        if x.max_coeff_bits() > limits.max_coeff_bits {
            items.extend((n..=n_max).map(|index| CongruenceItem {
                index,
                residue: None,
                status: ItemStatus::SizeLimit,
            }));
            break;
        }
        items.push(item(n, norm_residue(&x), expected));
    }
    Ok(CongruenceReport { p, kind: CongruenceKind::Orbit { n_max }, expected, items })
}

/// `trials` elements r with coordinates uniform in [−bound, bound], drawn from
/// a ChaCha stream seeded with `seed`.
pub fn sample_offsets(ring: CyclotomicRing, trials: u64, bound: u64, seed: u64) -> Vec<CycInt> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = bound as i64;
    (0..trials)
        .map(|_| {
            let coeffs = (0..ring.degree()).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect();
            ring.from_coeffs(coeffs).expect("p − 1 coefficients")
        })
        .collect()
}

/// N(φ_p(1 + (1 − ζ)·r)) mod p².
pub fn general_congruence_residue(r: &CycInt) -> Result<u64, ArithmeticError> {
    let ring = r.ring();
    let x = ring.one().add(&ring.one_minus_zeta().mul(r)?)?;
    let fx = dynamics::phi(ring.p())?.eval(&x)?;
    Ok(norm_residue(&fx))
}

/// Randomised check that x ≡ 1 (mod 𝔭) forces N(φ_p(x)) ≡ 2^p − 1 (mod p²).
/// Trials run in parallel; the report depends only on the inputs.
pub fn general_congruence_check(
    p: OddPrime,
    trials: u64,
    coeff_bound: u64,
    seed: u64,
) -> Result<CongruenceReport, ArithmeticError> {
    let ring = CyclotomicRing::new(p)?;
    let expected = expected_residue(p);
    let offsets = sample_offsets(ring, trials, coeff_bound, seed);
    let items = offsets
        .par_iter()
        .enumerate()
        .map(|(i, r)| general_congruence_residue(r).map(|res| item(i as u64, res, expected)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CongruenceReport {
        p,
        kind: CongruenceKind::Randomized { trials, coeff_bound, seed },
        expected,
        items,
    })
}

/// 2^{p−1} mod p².
pub fn fermat_quotient_residue(p: OddPrime) -> u128 {
    pow_mod(2, p.get() as u128 - 1, p.square())
}

/// True iff 2^{p−1} ≡ 1 (mod p²).
pub fn wieferich_check(p: OddPrime) -> bool {
    fermat_quotient_residue(p) == 1
}

/// All Wieferich primes up to `limit`, ascending.
pub fn wieferich_scan(limit: u64) -> Vec<u64> {
    primes_up_to(limit)
        .into_par_iter()
        .filter(|&q| q > 2 && wieferich_check(OddPrime::new(q).expect("sieved odd prime")))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WieferichCheckReport {
    pub p: OddPrime,
    pub wieferich: bool,
    /// 2^{p−1} mod p².
    pub fermat_residue: u64,
}

pub fn wieferich_report(p: OddPrime) -> WieferichCheckReport {
    let residue = fermat_quotient_residue(p);
    WieferichCheckReport { p, wieferich: residue == 1, fermat_residue: residue as u64 }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WieferichScanReport {
    pub limit: u64,
    pub primes: Vec<u64>,
}

fn reduce_mod_p2(a: &BigInt, p: OddPrime) -> u128 {
    a.mod_floor(&BigInt::from(p.square())).to_u128().expect("residue below p²")
}

/// Whether x^p ≡ a (mod p²) has a solution, by the unit-group criterion: a
/// unit is a p-th power iff a^{p−1} ≡ 1, and a non-unit iff p² | a.
pub fn is_pth_power_mod_p2(a: &BigInt, p: OddPrime) -> bool {
    let m = p.square();
    let r = reduce_mod_p2(a, p);
    if r.is_multiple_of(p.get() as u128) {
        r == 0
    } else {
        pow_mod(r, p.get() as u128 - 1, m) == 1
    }
}

/// Table of which residues mod p² are p-th powers, by enumerating x^p.
pub fn pth_power_table(p: OddPrime) -> Vec<bool> {
    let m = p.square();
    let mut table = vec![false; m as usize];
    for x in 0..m {
        table[pow_mod(x, p.get() as u128, m) as usize] = true;
    }
    table
}

/// Enumeration oracle for [`is_pth_power_mod_p2`].
pub fn is_pth_power_mod_p2_brute(a: &BigInt, p: OddPrime) -> bool {
    pth_power_table(p)[reduce_mod_p2(a, p) as usize]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WiefEquivalenceReport {
    pub p: OddPrime,
    pub wieferich: bool,
    /// (2^p − 1) mod p².
    pub mersenne_residue: u64,
    pub mersenne_is_pth_power: bool,
    pub consistent: bool,
    /// For p ≤ 97: whether the fast criterion agrees with enumeration on
    /// every residue mod p².
    pub criterion_matches_enumeration: Option<bool>,
}

impl WiefEquivalenceReport {
    pub fn passed(&self) -> bool {
        self.consistent && self.criterion_matches_enumeration != Some(false)
    }
}

/// Checks "p Wieferich ⟺ 2^p − 1 is a p-th power mod p²".
pub fn wief_equivalence_check(p: OddPrime) -> WiefEquivalenceReport {
    let wieferich = wieferich_check(p);
    let residue = mersenne_residue(p);
    let pth = is_pth_power_mod_p2(&BigInt::from(residue), p);
    let enumeration = (p.get() <= BRUTE_FORCE_LIMIT).then(|| {
        let table = pth_power_table(p);
        let m = p.square();
        (0..m).all(|a| is_pth_power_mod_p2(&BigInt::from(a), p) == table[a as usize])
    });
    WiefEquivalenceReport {
        p,
        wieferich,
        mersenne_residue: residue as u64,
        mersenne_is_pth_power: pth,
        consistent: wieferich == pth,
        criterion_matches_enumeration: enumeration,
    }
}
