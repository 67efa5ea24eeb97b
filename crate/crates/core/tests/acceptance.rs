//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wreath_core::certificate::{build_certificate, verify_certificate, LevelStatus, Verdict};
use wreath_core::congruence::{
    general_congruence_check, is_pth_power_mod_p2, norm_congruence_check, wief_equivalence_check,
    wieferich_check, wieferich_scan,
};
use wreath_core::dynamics::{
    eisenstein_check, fixed_point_check, iterate_point, orbit_congruence_check,
};
use wreath_core::factor::{factor, primes_up_to};
use wreath_core::{CycInt, CyclotomicRing, FactorConfig, OddPrime, SizeLimits, Valuation};

fn prime(p: u64) -> OddPrime {
    OddPrime::new(p).unwrap()
}

fn ring(p: u64) -> CyclotomicRing {
    CyclotomicRing::new(prime(p)).unwrap()
}

fn mersenne_mod_p2(p: u64) -> BigInt {
    ((BigInt::one() << p) - 1) % BigInt::from(p * p)
}

fn criterion_1_norm_congruence() {
    let limits = SizeLimits::default();
    for (p, n_max) in [(3, 8), (5, 4), (7, 3), (11, 2), (13, 2)] {
        let report = norm_congruence_check(prime(p), n_max, &limits).unwrap();
        assert_eq!(BigInt::from(report.expected), mersenne_mod_p2(p));
        assert_eq!(report.items.len() as u64, n_max);
        assert!(report.all_pass(), "p = {p}: {report:?}");
    }
}

/// Straight-line arithmetic in Z[ζ_3] on pairs (a, b) = a + bζ, using
/// ζ² = −1 − ζ and N(a + bζ) = a² − ab + b².
mod hand_oracle {
    use num_bigint::BigInt;

    pub type Pair = (BigInt, BigInt);

    pub fn mul(x: &Pair, y: &Pair) -> Pair {
        let (a, b) = x;
        let (c, d) = y;
        let bd = b * d;
        (a * c - &bd, a * d + b * c - bd)
    }

    pub fn phi(x: &Pair) -> Pair {
        let shifted = (&x.0 - 1, x.1.clone());
        let cube = mul(&mul(&shifted, &shifted), &shifted);
        (cube.0 + 2, cube.1 - 1)
    }

    pub fn norm(x: &Pair) -> BigInt {
        let (a, b) = x;
        a * a - a * b + b * b
    }
}

fn criterion_2_hand_oracle() {
    use hand_oracle::Pair;
    let limits = SizeLimits::default();
    let expected_points = [(2, -1), (-1, -7), (-55, 209)];
    let expected_norms = [7u64, 43, 58201];
    let mut x: Pair = (BigInt::one(), BigInt::from(0));
    for (m, (&(a, b), &norm)) in expected_points.iter().zip(&expected_norms).enumerate() {
        x = hand_oracle::phi(&x);
        assert_eq!(x, (BigInt::from(a), BigInt::from(b)), "oracle point {}", m + 1);
        assert_eq!(hand_oracle::norm(&x), BigInt::from(norm), "oracle norm {}", m + 1);
        assert_eq!(norm % 9, 7);

        let point = iterate_point(prime(3), m as u64 + 1, &ring(3).one(), &limits).unwrap();
        assert_eq!(point.coeffs(), &[x.0.clone(), x.1.clone()]);
        assert_eq!(point.norm(), BigInt::from(norm));
        assert_eq!(point.norm_by_conjugates().unwrap(), BigInt::from(norm));
    }
    let f = factor(&BigInt::from(58201), &FactorConfig::default()).unwrap();
    let pairs: Vec<(u64, u32)> =
        f.factors.iter().map(|q| (q.prime.to_u64().unwrap(), q.exponent)).collect();
    assert_eq!(pairs, vec![(11, 2), (13, 1), (37, 1)]);
}

fn criterion_3_generalized_congruence() {
    for p in [3, 5, 7, 11] {
        let report = general_congruence_check(prime(p), 100, 1000, 0x5eed + p).unwrap();
        assert_eq!(report.items.len(), 100);
        assert!(report.all_pass(), "p = {p}");
    }
}

fn criterion_4_wieferich_scan() {
    assert_eq!(wieferich_scan(1_000_000), vec![1093, 3511]);
}

fn criterion_5_wief_equivalence() {
    let mut grid: Vec<u64> = primes_up_to(499).into_iter().filter(|&q| q > 2).collect();
    grid.push(1093);
    for p in grid {
        let report = wief_equivalence_check(prime(p));
        let residue = mersenne_mod_p2(p);
        assert_eq!(wieferich_check(prime(p)), is_pth_power_mod_p2(&residue, prime(p)), "p = {p}");
        assert!(report.consistent, "p = {p}");
        if p <= 97 {
            assert_eq!(report.criterion_matches_enumeration, Some(true), "p = {p}");
        }
    }
}

fn criterion_6_certificates() {
    let cfg = FactorConfig::default();
    let limits = SizeLimits::default();
    for (p, n) in [(3, 5), (5, 2), (7, 2)] {
        let cert = build_certificate(prime(p), n, &cfg, &limits).unwrap();
        assert_eq!(cert.verdict, Verdict::Maximal, "({p}, {n})");
        assert!(cert.levels.iter().all(|l| l.status == LevelStatus::WitnessFound));
        assert!(verify_certificate(&cert), "({p}, {n})");
        let reparsed =
            wreath_core::MaximalityCertificate::from_json(&cert.to_json()).unwrap();
        assert!(verify_certificate(&reparsed));
        if p == 3 {
            let witnesses: Vec<(BigUint, u32)> = cert.levels[..3]
                .iter()
                .map(|l| {
                    let w = l.witness.as_ref().unwrap();
                    (w.prime.clone(), w.exponent)
                })
                .collect();
            let expected = [(7u32, 1), (43, 1), (11, 2)]
                .map(|(q, e)| (BigUint::from(q), e))
                .to_vec();
            assert_eq!(witnesses, expected);
        }
    }
}

fn criterion_7_structure() {
    let limits = SizeLimits::default();
    for (p, n_max) in [(3, 4), (5, 2), (7, 2)] {
        for n in 1..=n_max {
            let r = eisenstein_check(prime(p), n, &limits).unwrap();
            assert!(r.verdict.passed(), "eisenstein ({p}, {n})");
        }
    }
    for p in [3, 5, 7, 11] {
        assert!(fixed_point_check(prime(p), 4, &limits).unwrap().verdict.passed(), "fixed p = {p}");
        assert!(orbit_congruence_check(prime(p), 4, &limits).unwrap().verdict.passed(), "orbit p = {p}");
    }
}

fn random_element(ring: CyclotomicRing, rng: &mut ChaCha8Rng, bound: i64) -> CycInt {
    let coeffs = (0..ring.degree()).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect();
    ring.from_coeffs(coeffs).unwrap()
}

fn criterion_8_properties() {
    const CASES: usize = 1000;
    const BOUND: i64 = 1_000_000;
    for p in [3u64, 5, 7, 11] {
        let r = ring(p);
        let mut rng = ChaCha8Rng::seed_from_u64(p);
        let pi = r.one_minus_zeta();
        let p_elem = r.from_int(p);
        for _ in 0..CASES {
            let a = random_element(r, &mut rng, BOUND);
            let b = random_element(r, &mut rng, BOUND);
            // multiplicativity
            assert_eq!(a.mul(&b).unwrap().norm(), a.norm() * b.norm());
            // two norm algorithms
            assert_eq!(a.norm(), a.norm_by_conjugates().unwrap());
            // valuation additivity, with a forced 𝔭-power on each side
            let a2 = a.mul(&pi.pow(rng.gen_range(0..4))).unwrap();
            let b2 = b.mul(&pi.pow(rng.gen_range(0..4))).unwrap();
            if !a2.is_zero() && !b2.is_zero() {
                assert_eq!(
                    a2.mul(&b2).unwrap().pi_valuation(),
                    a2.pi_valuation() + b2.pi_valuation()
                );
            }
            // 𝔭 is generated by any 1 − ζ^k and p = unit · 𝔭^{p−1}
            let k = rng.gen_range(1..p);
            let pi_k = r.one().sub(&r.zeta_pow(k as i64)).unwrap();
            assert_eq!(pi_k.norm(), BigInt::from(p));
            assert_eq!(pi_k.pi_valuation(), Valuation::Finite(1));
            if !a.is_zero() {
                assert_eq!(
                    p_elem.mul(&a).unwrap().pi_valuation(),
                    Valuation::Finite(p - 1) + a.pi_valuation()
                );
            }
        }
        assert_eq!(pi.norm(), BigInt::from(p));
        assert_eq!(p_elem.pi_valuation(), Valuation::Finite(p - 1));
    }
}

fn main() {
    let criteria: [(&str, fn(), Duration); 8] = [
        ("1 norm congruence grid", criterion_1_norm_congruence, Duration::from_secs(120)),
        ("2 hand oracle at p = 3", criterion_2_hand_oracle, Duration::from_secs(60)),
        ("3 generalized congruence", criterion_3_generalized_congruence, Duration::from_secs(60)),
        ("4 Wieferich scan to 10^6", criterion_4_wieferich_scan, Duration::from_secs(30)),
        ("5 Wieferich equivalence", criterion_5_wief_equivalence, Duration::from_secs(60)),
        ("6 maximality certificates", criterion_6_certificates, Duration::from_secs(300)),
        ("7 structural facts", criterion_7_structure, Duration::from_secs(300)),
        ("8 property suites", criterion_8_properties, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run));
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(()) if elapsed <= budget => ("PASS", String::new()),
            Ok(()) => ("FAIL", format!(" (over time budget {budget:?})")),
            Err(_) => ("FAIL", String::new()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("[{status}] criterion {name} in {:.1} ms{detail}", elapsed.as_secs_f64() * 1000.0);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
