use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use wreath_core::certificate::MaximalityCertificate;
use wreath_core::congruence::{CongruenceReport, WieferichCheckReport, WieferichScanReport};
use wreath_core::dynamics::StructureReport;

fn wreath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wreath")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn norm_congruence_json() {
    let out = wreath(&["norm-congruence", "--p", "3", "--max-n", "3", "--json"]);
    assert_eq!(code(&out), 0);
    let report: CongruenceReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report.expected, 7);
    let residues: Vec<_> = report.items.iter().map(|i| i.residue.unwrap()).collect();
    assert_eq!(residues, vec![7, 7, 7]);
    // re-emitting the parsed report gives the same bytes
    assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", stdout(&out));
}

#[test]
fn norm_congruence_usage_errors() {
    let out = wreath(&["norm-congruence", "--p", "4", "--max-n", "3"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("not an odd prime"));
    assert_eq!(code(&wreath(&["norm-congruence", "--p", "3", "--max-n", "0"])), 2);
    assert_eq!(code(&wreath(&["norm-congruence", "--p", "2", "--max-n", "1"])), 2);
}

#[test]
fn norm_congruence_size_cap() {
    let out = wreath(&["norm-congruence", "--p", "3", "--max-n", "6", "--max-coeff-bits", "10"]);
    assert_eq!(code(&out), 5);
    assert!(stdout(&out).contains("SKIPPED"));
}

#[test]
fn general_congruence_is_reproducible() {
    let args = ["general-congruence", "--p", "7", "--trials", "25", "--seed", "9", "--json"];
    let a = wreath(&args);
    let b = wreath(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = wreath(&["--threads", "1", "general-congruence", "--p", "7", "--trials", "25", "--seed", "9", "--json"]);
    assert_eq!(a.stdout, c.stdout);
    let report: CongruenceReport = serde_json::from_str(&stdout(&a)).unwrap();
    assert!(report.all_pass());
}

#[test]
fn wieferich_modes() {
    let out = wreath(&["wieferich", "--check", "1093"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).trim_end().ends_with("true"));

    let out = wreath(&["wieferich", "--check", "7", "--json"]);
    let report: WieferichCheckReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(!report.wieferich);
    assert_eq!(report.fermat_residue, 15);

    let out = wreath(&["wieferich", "--scan", "1000000", "--json"]);
    assert_eq!(code(&out), 0);
    let report: WieferichScanReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report.primes, vec![1093, 3511]);

    assert_eq!(code(&wreath(&["wieferich", "--check", "7", "--scan", "100"])), 2);
    assert_eq!(code(&wreath(&["wieferich"])), 2);
    assert_eq!(code(&wreath(&["wieferich", "--scan", "2"])), 2);
}

#[test]
fn wief_equivalence() {
    let out = wreath(&["wief-equivalence", "--p", "5"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("equivalence                  PASS"));
    assert_eq!(code(&wreath(&["wief-equivalence", "--p", "1093"])), 0);
}

fn write_cert(dir: &Path, name: &str, p: &str, n: &str) -> (i32, String) {
    let path = dir.join(name);
    let out = wreath(&["certificate", "--p", p, "--max-n", n, "--out", path.to_str().unwrap()]);
    (code(&out), fs::read_to_string(&path).unwrap_or_default())
}

#[test]
fn certificate_round_trip_and_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let (status, text) = write_cert(dir.path(), "c.json", "3", "3");
    assert_eq!(status, 0);
    let cert = MaximalityCertificate::from_json(&text).unwrap();
    assert_eq!(cert.levels.len(), 3);

    let path = dir.path().join("c.json");
    let out = wreath(&["verify", "--in", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "true");

    // witness exponent 2 → 3 at level 3
    let mut bad = cert.clone();
    bad.levels[2].witness.as_mut().unwrap().exponent = 3;
    let bad_path = dir.path().join("bad_exponent.json");
    fs::write(&bad_path, bad.to_json()).unwrap();
    let out = wreath(&["verify", "--in", bad_path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("level 3"));

    let mut bad = cert;
    bad.group_order_claimed *= 3u32;
    let bad_path = dir.path().join("bad_order.json");
    fs::write(&bad_path, bad.to_json()).unwrap();
    let out = wreath(&["verify", "--in", bad_path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("group_order_claimed"));
}

#[test]
fn certificate_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (_, a) = write_cert(dir.path(), "a.json", "5", "2");
    let (_, b) = write_cert(dir.path(), "b.json", "5", "2");
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn certificate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (status, text) = write_cert(dir.path(), "w.json", "1093", "1");
    assert_eq!(status, 3);
    assert!(text.contains("\"verdict\": \"INDETERMINATE\""));
    let out = wreath(&["verify", "--in", dir.path().join("w.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0);

    let (status, _) = write_cert(dir.path(), "big.json", "103", "1");
    assert_eq!(status, 5);

    let out = wreath(&["certificate", "--p", "3", "--max-n", "1", "--out", "/nonexistent-dir/c.json"]);
    assert_eq!(code(&out), 4);
    assert_eq!(code(&wreath(&["certificate", "--p", "9", "--max-n", "1", "--out", "x.json"])), 2);
}

#[test]
fn verify_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("garbage.json");
    fs::write(&path, "{\"schema\": \"wreath-cert/1\"}").unwrap();
    assert_eq!(code(&wreath(&["verify", "--in", path.to_str().unwrap()])), 2);
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&wreath(&["verify", "--in", missing.to_str().unwrap()])), 4);
}

#[test]
fn structure_table_and_cap() {
    let out = wreath(&["structure", "--p", "3", "--n", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).matches("PASS").count(), 3);

    let out = wreath(&["structure", "--p", "5", "--n", "2", "--json"]);
    assert_eq!(code(&out), 0);
    let report: StructureReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report.passed());

    let out = wreath(&["structure", "--p", "3", "--n", "9"]);
    assert_eq!(code(&out), 5);
    assert!(stderr(&out).contains("--n 8"));
}
