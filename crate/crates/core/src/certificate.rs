//! Maximality certificates.
//!
//! For each level m ≤ n the absolute norm of φ_p^m(1) is factored over Z. A
//! rational prime q whose exact exponent in the norm is not divisible by p
//! forces some prime ideal 𝔮 | q of Z[ζ_p] with v_𝔮(φ_p^m(1)) ≢ 0 (mod p),
//! since v_q(N(α)) = Σ_{𝔮 | q} f_𝔮 · v_𝔮(α). Together with p being
//! non-Wieferich, witnesses at every level certify that the Galois group of
//! φ_p^n over Q(ζ_p) is the full iterated wreath product [C_p]^n.
//!
//! Failing to find a witness never refutes anything, so the verdict is
//! either `MAXIMAL` or `INDETERMINATE`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::congruence::wieferich_check;
use crate::cyclotomic::{ArithmeticError, CycInt, CyclotomicRing, MAX_RING_PRIME};
use crate::decimal;
use crate::dynamics::{self, DynamicsError, SizeLimits};
use crate::factor::{self, FactorConfig, FactorError, Factorization, Primality};
use crate::prime::{mersenne_residue, OddPrime};

pub const SCHEMA: &str = "wreath-cert/1";

/// Largest exponent (p^n − 1)/(p − 1) for which the group order is written out.
pub const MAX_GROUP_ORDER_EXPONENT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error("norm of φ^{m}(1) is not positive: {norm}")]
    NonPositiveNorm { m: u64, norm: BigInt },
    #[error("p = {p} exceeds the supported ring limit {MAX_RING_PRIME}")]
    UnsupportedPrime { p: u64 },
    #[error("|[C_{p}]^{n}| is too large to write out")]
    GroupOrderTooLarge { p: u64, n: u64 },
    #[error("iterate count must be at least 1")]
    ZeroLevels,
}

impl From<ArithmeticError> for CertificateError {
    fn from(e: ArithmeticError) -> Self {
        match e {
            ArithmeticError::UnsupportedPrime { p } => CertificateError::UnsupportedPrime { p },
            other => CertificateError::Dynamics(DynamicsError::Arithmetic(other)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Witness {
    #[serde(with = "decimal::biguint")]
    pub prime: BigUint,
    pub exponent: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LevelStatus {
    WitnessFound,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelRecord {
    pub m: u64,
    #[serde(with = "decimal::biguint")]
    pub norm_abs: BigUint,
    pub norm_mod_p2: u64,
    pub factorization: Factorization,
    pub witness: Option<Witness>,
    /// norm_abs ≠ 1, so φ^m(1) is not a unit.
    pub unit_check: bool,
    /// p ∤ norm_abs, so φ^m(1) ∉ 𝔭.
    pub p_coprime_check: bool,
    pub status: LevelStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Maximal,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaximalityCertificate {
    pub schema: String,
    pub p: OddPrime,
    pub n: u64,
    pub wieferich: bool,
    pub levels: Vec<LevelRecord>,
    #[serde(with = "decimal::biguint")]
    pub group_order_claimed: BigUint,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl MaximalityCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn exponent_sum(p: OddPrime, n: u64) -> Option<u64> {
    // 1 + p + … + p^{n−1}
    let mut total: u64 = 0;
    let mut term: u64 = 1;
    for i in 0..n {
        total = total.checked_add(term)?;
        if total > MAX_GROUP_ORDER_EXPONENT {
            return None;
        }
        if i + 1 < n {
            term = term.checked_mul(p.get())?;
        }
    }
    Some(total)
}

/// |[C_p]^n| = p^{(p^n − 1)/(p − 1)}.
pub fn group_order(p: OddPrime, n: u64) -> Result<BigUint, CertificateError> {
    if n == 0 {
        return Err(CertificateError::ZeroLevels);
    }
    let e = exponent_sum(p, n).ok_or(CertificateError::GroupOrderTooLarge { p: p.get(), n })?;
    Ok(BigUint::from(p.get()).pow(e as u32))
}

/// |W_1| = p, |W_k| = |W_{k−1}|^p · p.
pub fn group_order_by_recursion(p: OddPrime, n: u64) -> BigUint {
    let q = BigUint::from(p.get());
    (1..n).fold(q.clone(), |w, _| w.pow(p.get() as u32) * &q)
}

fn record_for(
    p: OddPrime,
    m: u64,
    point: &CycInt,
    cfg: &FactorConfig,
) -> Result<LevelRecord, CertificateError> {
    let norm = point.norm();
    if !norm.is_positive() {
        return Err(CertificateError::NonPositiveNorm { m, norm });
    }
    let norm_abs = norm.magnitude().clone();
    let pb = BigUint::from(p.get());
    let norm_mod_p2 = (&norm_abs % BigUint::from(p.square())).to_u64().expect("below p²");
    let factorization = factor::factor(&norm, cfg)?;
    let witness = factorization
        .factors
        .iter()
        .find(|f| !(f.exponent as u64).is_multiple_of(p.get()))
        .map(|f| Witness { prime: f.prime.clone(), exponent: f.exponent });
    let status = if witness.is_some() { LevelStatus::WitnessFound } else { LevelStatus::Indeterminate };
    Ok(LevelRecord {
        m,
        unit_check: !norm_abs.is_one(),
        p_coprime_check: !norm_abs.is_multiple_of(&pb),
        norm_abs,
        norm_mod_p2,
        factorization,
        witness,
        status,
    })
}

/// Witness search at level m: factor |N(φ_p^m(1))| and pick the smallest
/// prime whose exact exponent is not divisible by p.
pub fn level_witness(
    p: OddPrime,
    m: u64,
    cfg: &FactorConfig,
    limits: &SizeLimits,
) -> Result<LevelRecord, CertificateError> {
    if m == 0 {
        return Err(CertificateError::ZeroLevels);
    }
    let ring = CyclotomicRing::new(p)?;
    let point = dynamics::iterate_point(p, m, &ring.one(), limits)?;
    record_for(p, m, &point, cfg)
}

/// Runs the Wieferich test and the witness search for m = 1..=n.
pub fn build_certificate(
    p: OddPrime,
    n: u64,
    cfg: &FactorConfig,
    limits: &SizeLimits,
) -> Result<MaximalityCertificate, CertificateError> {
    if n == 0 {
        return Err(CertificateError::ZeroLevels);
    }
    let wieferich = wieferich_check(p);
    let group_order_claimed = group_order(p, n)?;
    let mut note = None;
    let levels = if p.get() > MAX_RING_PRIME {
        if !wieferich {
            return Err(CertificateError::UnsupportedPrime { p: p.get() });
        }
        note = Some(format!(
            "p = {p} exceeds the ring limit {MAX_RING_PRIME}; levels were not computed"
        ));
        Vec::new()
    } else {
        let ring = CyclotomicRing::new(p)?;
        let points = dynamics::orbit(p, n, &ring.one(), limits)?;
        points[1..]
            .par_iter()
            .enumerate()
            .map(|(i, x)| record_for(p, i as u64 + 1, x, cfg))
            .collect::<Result<Vec<_>, _>>()?
    };
    let all_witnessed =
        !levels.is_empty() && levels.iter().all(|l| l.status == LevelStatus::WitnessFound);
    let verdict = if !wieferich && all_witnessed { Verdict::Maximal } else { Verdict::Indeterminate };
    if wieferich {
        let msg = "p is a Wieferich prime, so the norm congruence cannot exclude p-th powers \
                   and no maximality claim is made; the Galois groups are conjecturally still \
                   maximal, which this tool does not decide";
        note = Some(match note {
            Some(prev) => format!("{msg}. {prev}"),
            None => msg.to_string(),
        });
    } else if !all_witnessed {
        note = Some("some level has no witness among the primes found".to_string());
    }
    Ok(MaximalityCertificate {
        schema: SCHEMA.to_string(),
        p,
        n,
        wieferich,
        levels,
        group_order_claimed,
        verdict,
        note,
    })
}

/// One failed verification clause.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseFailure {
    pub level: Option<u64>,
    pub clause: String,
}

impl fmt::Display for ClauseFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.level {
            Some(m) => write!(f, "level {m}: {}", self.clause),
            None => f.write_str(&self.clause),
        }
    }
}

struct Failures(Vec<ClauseFailure>);

impl Failures {
    fn check(&mut self, ok: bool, level: Option<u64>, clause: impl Into<String>) {
        if !ok {
            self.0.push(ClauseFailure { level, clause: clause.into() });
        }
    }
}

fn check_level(
    cert: &MaximalityCertificate,
    idx: usize,
    level: &LevelRecord,
    recomputed: Option<&BigUint>,
    out: &mut Failures,
) {
    let p = cert.p;
    let at = Some(level.m);
    let pb = BigUint::from(p.get());
    out.check(level.m == idx as u64 + 1, at, format!("expected level index {}", idx + 1));
    if let Some(norm) = recomputed {
        out.check(&level.norm_abs == norm, at, "norm_abs differs from the recomputed norm");
    }
    let residue = (&level.norm_abs % BigUint::from(p.square())).to_u64();
    out.check(residue == Some(level.norm_mod_p2), at, "norm_mod_p2 is not norm_abs mod p²");
    out.check(
        level.norm_mod_p2 as u128 == mersenne_residue(p),
        at,
        "norm_mod_p2 differs from (2^p - 1) mod p²",
    );
    out.check(level.unit_check == !level.norm_abs.is_one(), at, "unit_check is inconsistent");
    out.check(
        level.p_coprime_check == !level.norm_abs.is_multiple_of(&pb),
        at,
        "p_coprime_check is inconsistent",
    );
    let fac = &level.factorization;
    out.check(fac.n == level.norm_abs, at, "factorization is of a different integer");
    out.check(fac.reconstruct() == fac.n, at, "factorization does not reconstruct its integer");
    match &level.witness {
        Some(w) => {
            out.check(level.status == LevelStatus::WitnessFound, at, "witness present but status is not WITNESS_FOUND");
            out.check(!(w.exponent as u64).is_multiple_of(p.get()), at, "witness exponent is divisible by p");
            out.check(w.exponent >= 1, at, "witness exponent is zero");
            out.check(
                factor::primality(&w.prime) != Primality::Composite,
                at,
                "witness is not prime",
            );
            let power = w.prime.pow(w.exponent);
            let (quotient, rem) = level.norm_abs.div_rem(&power);
            out.check(rem.is_zero(), at, "witness power does not divide norm_abs");
            out.check(
                w.prime.is_zero() || !quotient.is_multiple_of(&w.prime),
                at,
                "witness exponent is not exact",
            );
        }
        None => {
            out.check(level.status == LevelStatus::Indeterminate, at, "status WITNESS_FOUND without a witness");
        }
    }
}

/// Re-checks every clause of a certificate without re-factoring and returns
/// the clauses that fail.
///
/// Norms are recomputed from the orbit of 1 when the ring is supported and
/// the iterates fit in `limits`.
pub fn check_certificate(cert: &MaximalityCertificate, limits: &SizeLimits) -> Vec<ClauseFailure> {
    let mut out = Failures(Vec::new());
    let p = cert.p;
    out.check(cert.schema == SCHEMA, None, format!("schema is not {SCHEMA}"));
    out.check(cert.n >= 1, None, "n must be at least 1");
    out.check(cert.wieferich == wieferich_check(p), None, "wieferich flag is wrong");
    match group_order(p, cert.n.max(1)) {
        Ok(order) => out.check(order == cert.group_order_claimed, None, "group_order_claimed is wrong"),
        Err(e) => out.check(false, None, e.to_string()),
    }
    let skipped = cert.levels.is_empty() && cert.wieferich && p.get() > MAX_RING_PRIME;
    if !skipped {
        out.check(cert.levels.len() as u64 == cert.n, None, "level count differs from n");
    }

    let recomputed: Option<Vec<BigUint>> = CyclotomicRing::new(p).ok().and_then(|ring| {
        let points = dynamics::orbit(p, cert.levels.len() as u64, &ring.one(), limits).ok()?;
        Some(points[1..].iter().map(|x| x.norm().magnitude().clone()).collect())
    });
    if recomputed.is_none() && !cert.levels.is_empty() {
        out.check(false, None, "norms could not be recomputed within size limits");
    }
    for (idx, level) in cert.levels.iter().enumerate() {
        let norm = recomputed.as_ref().map(|v| &v[idx]);
        check_level(cert, idx, level, norm, &mut out);
    }

    let all_witnessed = !cert.levels.is_empty()
        && cert.levels.iter().all(|l| l.status == LevelStatus::WitnessFound);
    let expected = if !cert.wieferich && all_witnessed { Verdict::Maximal } else { Verdict::Indeterminate };
    out.check(cert.verdict == expected, None, "verdict does not follow from the levels");
    out.0
}

/// True iff every clause of [`check_certificate`] holds.
pub fn verify_certificate(cert: &MaximalityCertificate) -> bool {
    check_certificate(cert, &SizeLimits::default()).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prime(p: u64) -> OddPrime {
        OddPrime::new(p).unwrap()
    }

    fn witness_pairs(cert: &MaximalityCertificate) -> Vec<(u64, u32)> {
        cert.levels
            .iter()
            .map(|l| {
                let w = l.witness.as_ref().unwrap();
                (w.prime.to_u64().unwrap(), w.exponent)
            })
            .collect()
    }

    #[test]
    fn group_order_examples() {
        assert_eq!(group_order(prime(3), 1).unwrap(), BigUint::from(3u32));
        assert_eq!(group_order(prime(3), 2).unwrap(), BigUint::from(81u32));
        assert_eq!(group_order(prime(5), 2).unwrap(), BigUint::from(5u32).pow(6));
        for (p, n) in [(3, 5), (5, 3), (7, 2), (11, 3)] {
            assert_eq!(group_order(prime(p), n).unwrap(), group_order_by_recursion(prime(p), n));
        }
        assert!(matches!(
            group_order(prime(101), 10),
            Err(CertificateError::GroupOrderTooLarge { .. })
        ));
    }

    #[test]
    fn level_witness_examples() {
        let cfg = FactorConfig::default();
        let limits = SizeLimits::default();
        let l1 = level_witness(prime(3), 1, &cfg, &limits).unwrap();
        assert_eq!(l1.norm_abs, BigUint::from(7u32));
        let l3 = level_witness(prime(3), 3, &cfg, &limits).unwrap();
        assert_eq!(l3.norm_abs, BigUint::from(58201u32));
        let w = l3.witness.unwrap();
        assert_eq!((w.prime, w.exponent), (BigUint::from(11u32), 2));
        assert!(l3.unit_check && l3.p_coprime_check);
        assert_eq!(l3.norm_mod_p2, 7);
    }

    #[test]
    fn certificate_examples() {
        let cfg = FactorConfig::default();
        let limits = SizeLimits::default();
        let c = build_certificate(prime(3), 3, &cfg, &limits).unwrap();
        assert_eq!(c.verdict, Verdict::Maximal);
        assert_eq!(witness_pairs(&c), vec![(7, 1), (43, 1), (11, 2)]);
        assert!(verify_certificate(&c));
        let c = build_certificate(prime(5), 1, &cfg, &limits).unwrap();
        assert_eq!(c.verdict, Verdict::Maximal);
        assert_eq!(witness_pairs(&c), vec![(31, 1)]);
    }

    #[test]
    fn wieferich_prime_is_indeterminate() {
        let c = build_certificate(prime(1093), 2, &FactorConfig::default(), &SizeLimits::default())
            .unwrap();
        assert!(c.wieferich);
        assert_eq!(c.verdict, Verdict::Indeterminate);
        assert!(c.levels.is_empty());
        assert!(c.note.is_some());
        assert!(verify_certificate(&c));
    }

    #[test]
    fn large_non_wieferich_prime_rejected() {
        let err = build_certificate(prime(103), 1, &FactorConfig::default(), &SizeLimits::default())
            .unwrap_err();
        assert_eq!(err, CertificateError::UnsupportedPrime { p: 103 });
    }

    #[test]
    fn tampering_is_detected() {
        let cfg = FactorConfig::default();
        let limits = SizeLimits::default();
        let good = build_certificate(prime(3), 3, &cfg, &limits).unwrap();

        let mut bad = good.clone();
        bad.levels[2].witness.as_mut().unwrap().exponent = 3;
        let failures = check_certificate(&bad, &limits);
        assert!(failures.iter().any(|f| f.clause.contains("divisible by p")), "{failures:?}");
        assert!(!verify_certificate(&bad));

        let mut bad = good.clone();
        bad.group_order_claimed += 1u32;
        assert!(!verify_certificate(&bad));

        let mut bad = good.clone();
        bad.levels[1].norm_abs = BigUint::from(50u32);
        assert!(!verify_certificate(&bad));

        let mut bad = good.clone();
        bad.verdict = Verdict::Indeterminate;
        assert!(!verify_certificate(&bad));

        let mut bad = good;
        bad.levels.pop();
        assert!(!verify_certificate(&bad));
    }

    #[test]
    fn json_round_trip() {
        let c = build_certificate(prime(5), 2, &FactorConfig::default(), &SizeLimits::default())
            .unwrap();
        let text = c.to_json();
        assert!(text.contains("\"schema\": \"wreath-cert/1\""));
        assert!(text.contains("\"norm_abs\": \"2981\""));
        assert_eq!(MaximalityCertificate::from_json(&text).unwrap(), c);
        assert!(MaximalityCertificate::from_json(&text.replace("\"2981\"", "2981")).is_err());
    }
}
