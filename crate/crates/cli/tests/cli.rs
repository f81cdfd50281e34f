use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_periodpoly"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const CURVE_11A1: &str = "0 -1 1 -10 -20 11 11a1\n";
const FAST: [&str; 6] = ["--coeff-limit", "10000", "--target-error", "1e-18", "--precision-bits", "192"];

fn analyze_11a1(curve: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["analyze", "--curve", curve.to_str().unwrap(), "--sym", "3"];
    args.extend_from_slice(&FAST);
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn analyze_curve_file_is_deterministic_and_cache_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("11a1.txt");
    fs::write(&curve, CURVE_11A1).unwrap();
    let cache = dir.path().join("cache");
    let cache = cache.to_str().unwrap();

    let a = analyze_11a1(&curve, &[]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let b = analyze_11a1(&curve, &[]);
    assert_eq!(a.stdout, b.stdout);

    let report: Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(report["roots"]["on_circle_count"], 2);
    assert_eq!(report["roots"]["off_circle_count"], 0);
    assert_eq!(report["data"]["root_number"], 1);
    assert_eq!(report["inputs"][0]["sha256"].as_str().unwrap().len(), 64);

    // Cold and warm cache runs give the same numbers as the uncached run.
    let strip = |o: &Output| {
        let mut v: Value = serde_json::from_str(&stdout(o)).unwrap();
        v.as_object_mut().unwrap().remove("cache");
        v
    };
    let cold = analyze_11a1(&curve, &["--cache-dir", cache]);
    let warm = analyze_11a1(&curve, &["--cache-dir", cache]);
    assert_eq!(strip(&cold), strip(&a));
    assert_eq!(strip(&warm), strip(&a));
    let warm: Value = serde_json::from_str(&stdout(&warm)).unwrap();
    assert_eq!(warm["cache"]["misses"], 0);
    assert_eq!(warm["cache"]["hits"], 4);
}

#[test]
fn cache_rejects_corruption_and_other_precisions() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("11a1.txt");
    fs::write(&curve, CURVE_11A1).unwrap();
    let cache_dir = dir.path().join("cache");
    let cache = cache_dir.to_str().unwrap();

    let first = analyze_11a1(&curve, &["--cache-dir", cache]);
    assert_eq!(first.status.code(), Some(0));

    let file = cache_dir.join("values.jsonl");
    let text = fs::read_to_string(&file).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    lines[0] = lines[0].replacen('1', "2", 1);
    fs::write(&file, lines.join("\n") + "\n").unwrap();

    let again = analyze_11a1(&curve, &["--cache-dir", cache]);
    assert_eq!(again.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&again)).unwrap();
    assert_eq!(r["cache"]["rejected_lines"], 1);
    assert_eq!(r["cache"]["misses"], 1);
    let mut a: Value = serde_json::from_str(&stdout(&first)).unwrap();
    let mut b = r.clone();
    a.as_object_mut().unwrap().remove("cache");
    b.as_object_mut().unwrap().remove("cache");
    assert_eq!(a, b);

    let mut args = vec!["values", "--curve", curve.to_str().unwrap(), "--sym", "3", "--cache-dir", cache];
    args.extend_from_slice(&["--coeff-limit", "10000", "--target-error", "1e-18", "--precision-bits", "160"]);
    let other = run(&args);
    assert_eq!(other.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&other)).unwrap();
    assert_eq!(r["cache"]["hits"], 0);
    assert_eq!(r["cache"]["misses"], 4);
}

#[test]
fn malformed_coefficient_header_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.txt");
    fs::write(&f, "version=1\ndegree=4\nweight=three\nconductor=1331\nhodge=1,1\neps=1\n1 1\n").unwrap();
    let o = run(&["analyze", "--coeffs", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("ingest") && err.contains("line 3"), "{err}");
}

#[test]
fn odd_sign_reports_the_forced_root() {
    let o = run(&["analyze", "--curve", "37a1", "--sym", "3", "--coeff-limit", "20000", "--target-error", "1e-12"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["data"]["root_number"], -1);
    assert_eq!(r["forced_root_at_one"]["expected"], true);
    assert_eq!(r["forced_root_at_one"]["found"], true);
    assert_eq!(r["zeta"]["polynomial"]["sign"], -1);
}

#[test]
fn wrong_sign_is_a_verification_failure() {
    let o = run(&["analyze", "--curve", "11a1", "--sym", "3", "--eps", "-1", "--coeff-limit", "10000", "--target-error", "1e-18", "--precision-bits", "192"]);
    assert_eq!(o.status.code(), Some(1));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!r["hypothesis"].as_array().unwrap().is_empty());
}

#[test]
fn disc_tables() {
    let o = run(&["disc-table", "--d", "4", "--n-min", "1", "--n-max", "800", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["transitions"], serde_json::json!([2, 5, 27, 746]));

    let o = run(&["disc-table", "--d", "6", "--n", "494,495,45606,45607", "--json"]);
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let counts: Vec<u64> = r["counts"].as_array().unwrap().iter().map(|c| c["count"].as_u64().unwrap()).collect();
    assert_eq!(counts, vec![2, 1, 1, 0]);

    let o = run(&["disc-table", "--d", "2", "--n-max", "300", "--json"]);
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["runs"], serde_json::json!([{"from": 1, "to": 300, "count": 0}]));

    let o = run(&["disc-table", "--d", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("disc table"));
}

#[test]
fn a_table_and_bad_flags() {
    let o = run(&["a-table", "--m-min", "2", "--m-max", "4", "--json"]);
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let a2 = r["rows"][0]["A_m"].as_f64().unwrap();
    assert!((a2 - 23.82747).abs() < 1e-4);

    assert_eq!(run(&["analyze", "--curve", "11a1", "--sym", "3", "--precision-bits", "32"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--curve", "11a1", "--sym", "4"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--curve", "no-such-curve", "--sym", "3"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a.txt");
    let o = run(&["a-table", "--m-max", "3", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(fs::read_to_string(out).unwrap().contains("23.8274"));
}
