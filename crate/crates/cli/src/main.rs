//! `wreath`: batch front-end for the verifications in `wreath-core`.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or parse error,
//! 3 indeterminate certificate, 4 I/O error, 5 resource cap exceeded.

use std::fmt::Display;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::Serialize;

use wreath_core::certificate::{self, CertificateError, MaximalityCertificate, Verdict};
use wreath_core::congruence::{self, CongruenceReport, ItemStatus, WieferichScanReport};
use wreath_core::dynamics::{self, CheckVerdict, DynamicsError};
use wreath_core::{FactorConfig, OddPrime, SizeLimits};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INDETERMINATE: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_CAP: u8 = 5;

#[derive(Parser, Debug)]
#[command(name = "wreath", version, about = "Exact checks for iterates of (z-1)^p + 2 - zeta_p")]
struct Cli {
    /// Worker threads for parallel stages (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct Limits {
    /// Largest coefficient bit length allowed in a point iterate.
    #[arg(long, default_value_t = SizeLimits::default().max_coeff_bits)]
    max_coeff_bits: u64,
    /// Largest degree allowed for a symbolic iterate.
    #[arg(long, default_value_t = SizeLimits::default().max_degree)]
    max_degree: usize,
}

impl From<Limits> for SizeLimits {
    fn from(l: Limits) -> Self {
        SizeLimits { max_coeff_bits: l.max_coeff_bits, max_degree: l.max_degree }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// N(φ^n(1)) ≡ 2^p − 1 (mod p²) for n = 1..max-n.
    NormCongruence {
        #[arg(long, value_parser = parse_prime)]
        p: OddPrime,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_n: u64,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        limits: Limits,
    },
    /// N(φ(x)) ≡ 2^p − 1 (mod p²) for seeded random x ≡ 1 (mod 𝔭).
    GeneralCongruence {
        #[arg(long, value_parser = parse_prime)]
        p: OddPrime,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        coeff_bound: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Test one prime for the Wieferich property, or scan a range.
    #[command(group(ArgGroup::new("mode").required(true).args(["check", "scan"])))]
    Wieferich {
        #[arg(long, value_parser = parse_prime)]
        check: Option<OddPrime>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(3..))]
        scan: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// p Wieferich ⟺ 2^p − 1 is a p-th power mod p².
    WiefEquivalence {
        #[arg(long, value_parser = parse_prime)]
        p: OddPrime,
        #[arg(long)]
        json: bool,
    },
    /// Build and write a maximality certificate.
    Certificate {
        #[arg(long, value_parser = parse_prime)]
        p: OddPrime,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_n: u64,
        #[arg(long, default_value_t = FactorConfig::default().trial_bound, value_parser = clap::value_parser!(u64).range(2..))]
        trial_bound: u64,
        #[arg(long, default_value_t = FactorConfig::default().rho_budget)]
        rho_budget: u64,
        #[arg(long, default_value_t = FactorConfig::default().rho_seed)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        limits: Limits,
    },
    /// Re-check a certificate file.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Eisenstein shape, fixed point and orbit congruence.
    Structure {
        #[arg(long, value_parser = parse_prime)]
        p: OddPrime,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        limits: Limits,
    },
}

fn parse_prime(s: &str) -> Result<OddPrime, String> {
    s.parse::<OddPrime>().map_err(|e| e.to_string())
}

fn emit_json<T: Serialize>(value: &T) {
    let text = serde_json::to_string_pretty(value).expect("report serialises");
    // a closed pipe on stdout is not an error worth reporting
    let _ = writeln!(io::stdout().lock(), "{text}");
}

fn fail(code: u8, msg: impl Display) -> ExitCode {
    eprintln!("wreath: {msg}");
    ExitCode::from(code)
}

fn verdict_word(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn print_congruence(report: &CongruenceReport) {
    println!("p = {}, expected residue (2^p - 1) mod p^2 = {}", report.p, report.expected);
    for item in &report.items {
        let residue = item.residue.map_or("-".to_string(), |r| r.to_string());
        let status = match item.status {
            ItemStatus::Pass => "PASS",
            ItemStatus::Fail => "FAIL",
            ItemStatus::SizeLimit => "SKIPPED (size cap)",
        };
        println!("  {:>4}  residue {:>8}  {status}", item.index, residue);
    }
}

fn congruence_exit(report: &CongruenceReport) -> ExitCode {
    if report.all_pass() {
        ExitCode::SUCCESS
    } else if report.hit_size_limit() {
        ExitCode::from(EXIT_CAP)
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

fn check_line(name: &str, verdict: &CheckVerdict) {
    match verdict {
        CheckVerdict::Pass => println!("  {name:<20} PASS"),
        CheckVerdict::Refuted { index, clause } => {
            println!("  {name:<20} FAIL at index {index}: {clause}")
        }
    }
}

fn certificate_error_code(e: &CertificateError) -> u8 {
    match e {
        CertificateError::Dynamics(DynamicsError::CoefficientCap { .. })
        | CertificateError::Dynamics(DynamicsError::DegreeCap { .. })
        | CertificateError::UnsupportedPrime { .. }
        | CertificateError::GroupOrderTooLarge { .. } => EXIT_CAP,
        CertificateError::ZeroLevels => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

fn run(command: Command) -> ExitCode {
    match command {
        Command::NormCongruence { p, max_n, json, limits } => {
            let report = match congruence::norm_congruence_check(p, max_n, &limits.into()) {
                Ok(r) => r,
                Err(e) => return fail(EXIT_CAP, e),
            };
            if json {
                emit_json(&report);
            } else {
                print_congruence(&report);
            }
            congruence_exit(&report)
        }
        Command::GeneralCongruence { p, trials, coeff_bound, seed, json } => {
            let report = match congruence::general_congruence_check(p, trials, coeff_bound, seed) {
                Ok(r) => r,
                Err(e) => return fail(EXIT_CAP, e),
            };
            if json {
                emit_json(&report);
            } else {
                print_congruence(&report);
            }
            congruence_exit(&report)
        }
        Command::Wieferich { check, scan, json } => {
            if let Some(p) = check {
                let report = congruence::wieferich_report(p);
                if json {
                    emit_json(&report);
                } else {
                    println!("p = {p}: 2^(p-1) mod p^2 = {}", report.fermat_residue);
                    println!("{}", report.wieferich);
                }
            } else if let Some(limit) = scan {
                let report = WieferichScanReport { limit, primes: congruence::wieferich_scan(limit) };
                if json {
                    emit_json(&report);
                } else {
                    println!("{:?}", report.primes);
                }
            }
            ExitCode::SUCCESS
        }
        Command::WiefEquivalence { p, json } => {
            let report = congruence::wief_equivalence_check(p);
            if json {
                emit_json(&report);
            } else {
                println!("p = {p}");
                println!("  wieferich                    {}", report.wieferich);
                println!("  (2^p - 1) mod p^2            {}", report.mersenne_residue);
                println!("  is a p-th power mod p^2      {}", report.mersenne_is_pth_power);
                if let Some(ok) = report.criterion_matches_enumeration {
                    println!("  criterion vs enumeration     {}", verdict_word(ok));
                }
                println!("  equivalence                  {}", verdict_word(report.passed()));
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
        Command::Certificate { p, max_n, trial_bound, rho_budget, seed, out, limits } => {
            let cfg = FactorConfig { trial_bound, rho_budget, rho_seed: seed };
            let cert = match certificate::build_certificate(p, max_n, &cfg, &limits.into()) {
                Ok(c) => c,
                Err(e) => return fail(certificate_error_code(&e), e),
            };
            if let Err(e) = fs::write(&out, cert.to_json() + "\n") {
                return fail(EXIT_IO, format!("cannot write {}: {e}", out.display()));
            }
            for level in &cert.levels {
                let witness = level
                    .witness
                    .as_ref()
                    .map_or("none".to_string(), |w| format!("{}^{}", w.prime, w.exponent));
                println!("  m = {:<3} |N| = {}  witness {witness}", level.m, level.norm_abs);
            }
            if let Some(note) = &cert.note {
                println!("note: {note}");
            }
            match cert.verdict {
                Verdict::Maximal => {
                    println!("verdict: MAXIMAL");
                    ExitCode::SUCCESS
                }
                Verdict::Indeterminate => {
                    println!("verdict: INDETERMINATE");
                    ExitCode::from(EXIT_INDETERMINATE)
                }
            }
        }
        Command::Verify { input } => {
            let text = match fs::read_to_string(&input) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_IO, format!("cannot read {}: {e}", input.display())),
            };
            let cert = match MaximalityCertificate::from_json(&text) {
                Ok(c) => c,
                Err(e) => return fail(EXIT_USAGE, format!("malformed certificate: {e}")),
            };
            let failures = certificate::check_certificate(&cert, &SizeLimits::default());
            for f in &failures {
                eprintln!("{f}");
            }
            println!("{}", failures.is_empty());
            if failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
        Command::Structure { p, n, json, limits } => {
            let report = match dynamics::structure_check(p, n, &limits.into()) {
                Ok(r) => r,
                Err(e @ DynamicsError::DegreeCap { largest_feasible, .. }) => {
                    return fail(EXIT_CAP, format!("{e}; try --n {largest_feasible}"))
                }
                Err(e @ DynamicsError::CoefficientCap { .. }) => return fail(EXIT_CAP, e),
                Err(e) => return fail(EXIT_FAIL, e),
            };
            if json {
                emit_json(&report);
            } else {
                println!("p = {p}, n = {n}");
                check_line("eisenstein", &report.eisenstein.verdict);
                check_line("fixed point", &report.fixed_point.verdict);
                check_line("orbit congruence", &report.orbit.verdict);
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            return fail(EXIT_USAGE, e);
        }
    }
    run(cli.command)
}
