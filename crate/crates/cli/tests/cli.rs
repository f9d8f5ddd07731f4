//! Black-box tests of the `zeroapn` binary: exit codes, JSON shape, caching
//! and modulus handling.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeroapn"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn check_positive_exit_zero() {
    let out = run(&["check", "-n", "9", "-d", "35"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("is 0-APN"), "{text}");
    assert!(text.contains("uniformity"), "{text}");
}

#[test]
fn check_negative_exit_one_with_witnesses() {
    let out = run(&["check", "-n", "4", "-d", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("NOT 0-APN"), "{text}");
    assert!(text.contains("witness"), "{text}");
}

#[test]
fn check_json_shape_and_seed() {
    let out = run(&["check", "-n", "9", "-d", "35", "--json", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["n"], 9);
    assert_eq!(v["d"], 35);
    assert_eq!(v["zero_apn"], true);
    assert_eq!(v["modulus_hex"], "203");
    assert!(v["uniformity"].as_u64().unwrap() > 2);
}

#[test]
fn check_explicit_modulus_agrees() {
    // x^9 + x^4 + 1 (0x211) is irreducible; the verdict must not depend on
    // the representation
    let a = run(&["check", "-n", "9", "-d", "35", "--modulus", "211", "--json"]);
    assert_eq!(a.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&a).trim()).unwrap();
    assert_eq!(v["modulus_hex"], "211");
    assert_eq!(v["zero_apn"], true);
}

#[test]
fn check_bad_modulus_exit_two() {
    // x^9 + 1 is reducible
    let out = run(&["check", "-n", "9", "-d", "35", "--modulus", "201"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cache_round_trip() {
    let dir = std::env::temp_dir().join(format!("zeroapn-cache-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let d = dir.to_str().unwrap();
    let first = run(&["check", "-n", "10", "-d", "69", "--cache-dir", d, "--json"]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 1);
    let second = run(&["check", "-n", "10", "-d", "69", "--cache-dir", d, "--json"]);
    assert_eq!(second.status.code(), Some(0));
    let a: serde_json::Value = serde_json::from_str(stdout(&first).trim()).unwrap();
    let b: serde_json::Value = serde_json::from_str(stdout(&second).trim()).unwrap();
    assert_eq!(a["zero_apn"], b["zero_apn"]);
    assert_eq!(a["uniformity"], b["uniformity"]);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn spectrum_json_output() {
    let out = run(&["spectrum", "-n", "6", "-d", "5", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let spectrum = v["spectrum"].as_array().unwrap();
    // counts over all (a, b) sum to (2^n - 1) * 2^n
    let total: u64 = spectrum
        .iter()
        .map(|kv| kv[0].as_u64().unwrap() * kv[1].as_u64().unwrap())
        .sum();
    assert_eq!(total, 63 * 64);
}

#[test]
fn x0check_nonzero_base_point() {
    let out = run(&["x0check", "-n", "6", "-d", "5", "--x0", "3"]);
    assert!(matches!(out.status.code(), Some(0) | Some(1)));
}

#[test]
fn certify_recorded_case_exit_zero() {
    let out = run(&["certify", "3.1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("(x)*(x+1)*(x^2+x+1)^4"), "{text}");
}

#[test]
fn certify_unrecorded_case_exit_two() {
    let out = run(&["certify", "3.2-case2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("no recorded system transcription"), "{err}");
}

#[test]
fn certify_unknown_tag_exit_two() {
    let out = run(&["certify", "99.9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classify_reports_families() {
    let out = run(&["classify", "-n", "9", "-d", "35", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let hits = v["matches"].as_array().unwrap();
    let names: Vec<&str> = hits.iter().map(|h| h["family"].as_str().unwrap()).collect();
    assert!(names.contains(&"family-1") && names.contains(&"family-12"), "{names:?}");
}

#[test]
fn coset_output() {
    let out = run(&["coset", "-n", "5", "-d", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for e in ["3", "6", "12", "17", "24"] {
        assert!(text.contains(e), "{text}");
    }
}

#[test]
fn inequiv_matrix_runs() {
    let out = run(&["inequiv-matrix", "-n", "10", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["n"], 10);
    assert!(!v["labels"].as_array().unwrap().is_empty());
}

#[test]
fn usage_error_exit_two() {
    let out = run(&["check", "-n", "9"]);
    assert_eq!(out.status.code(), Some(2));
}
