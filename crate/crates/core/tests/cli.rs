use std::io::Write;
use std::process::{Command, Output, Stdio};

use rsq_core::clifford::Multivector;
use rsq_core::kernels::{zonal_kernel, KernelMethod};
use rsq_core::ops::{apply_euclidean, OperatorKind, OperatorTag};
use rsq_core::poly::{MultiPoly, Side};
use rsq_core::scalar::Rational;
use rsq_core::spaces::{project, Projection};
use rsq_core::verify::report_from_json;
use serde_json::Value;

fn rsq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rsq")).args(args).env_remove("RSQ_SEED").output().expect("rsq runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn verify_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("algebra.json");
    let out = rsq(&["verify", "algebra", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r = report_from_json(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(r.suite, "algebra");
    assert!(r.pass);
    assert_eq!(r.config.seed, 42);
    assert!(r.checks.iter().any(|c| c.name == "associativity_m6"));
}

#[test]
fn seed_from_environment_overrides_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_rsq"))
        .args(["verify", "intertwining", "--arithmetic", "float", "--seed", "1"])
        .env("RSQ_SEED", "7")
        .output()
        .unwrap();
    let r = report_from_json(&out.stdout).unwrap();
    assert_eq!(r.config.seed, 7);

    let bad = Command::new(env!("CARGO_BIN_EXE_rsq")).args(["verify", "algebra"]).env("RSQ_SEED", "x").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn csv_has_one_row_per_check() {
    let js = rsq(&["verify", "spaces", "--n", "3", "--k", "2"]);
    let r = report_from_json(&js.stdout).unwrap();
    let csv = rsq(&["verify", "spaces", "--n", "3", "--k", "2", "--format", "csv"]);
    assert!(csv.status.success());
    let mut rd = csv::Reader::from_reader(csv.stdout.as_slice());
    let headers = rd.headers().unwrap().clone();
    assert_eq!(headers.get(0), Some("suite"));
    let name_col = headers.iter().position(|h| h == "name").unwrap();
    let rows: Vec<_> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), r.checks.len());
    for (row, c) in rows.iter().zip(&r.checks) {
        assert_eq!(&row[name_col], c.name);
    }
}

#[test]
fn text_format_lists_checks() {
    let out = rsq(&["verify", "algebra", "--format", "text"]);
    assert!(out.status.success());
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.lines().any(|l| l.starts_with("PASS algebra/norm_formula_m3")));
    assert!(!s.contains("FAIL"));
}

#[test]
fn failing_tolerance_exits_one() {
    let out = rsq(&["verify", "cayley_intertwining", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(1), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn errors_exit_two() {
    assert_eq!(rsq(&["verify", "no_such_suite"]).status.code(), Some(2));
    assert_eq!(rsq(&["verify", "algebra", "--arithmetic", "interval"]).status.code(), Some(2));
    assert_eq!(rsq(&["verify", "stokes", "--n", "2"]).status.code(), Some(2));
    assert_eq!(rsq(&["apply", "--op", "Qk", "--input", "/nonexistent/in.json"]).status.code(), Some(2));
}

#[test]
fn eval_hk_matches_closed_form() {
    let v = json(&rsq(&["eval-hk", "--n", "3", "--k", "1", "--x", "1,0,0", "--u", "0,1,0", "--v", "0,0,1"]));
    let m = Multivector::<f64>::from_json(&v).unwrap();
    let expect = 3.0 / (16.0 * std::f64::consts::PI.powi(2));
    assert!((m.coeff(0b111) - expect).abs() < 1e-15);
    assert!(m.sub(&Multivector::blade(3, 0b111, *m.coeff(0b111))).norm_f64() < 1e-15);
}

#[test]
fn basis_sizes() {
    for (kind, n, k, size) in [("monogenic", 3, 2, 3), ("monogenic-right", 4, 2, 6), ("harmonic", 3, 2, 5), ("harmonic", 4, 3, 16)] {
        let v = json(&rsq(&["basis", "--n", &n.to_string(), "--k", &k.to_string(), "--kind", kind]));
        assert_eq!(v["elements"].as_array().unwrap().len(), size, "{kind} n={n} k={k}");
        assert_eq!(v["n"], n);
    }
}

#[test]
fn kernel_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z.json");
    let out = rsq(&["kernel", "--n", "3", "--k", "2", "--method", "formula", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let z = MultiPoly::<Rational>::from_json(&v["kernel"]).unwrap();
    assert_eq!(z, zonal_kernel(3, 2, KernelMethod::Gram).unwrap().zhat);
    assert_eq!(v["rescale"], "-1");
}

#[test]
fn apply_qk_from_stdin() {
    let n = 3;
    let blocks = [("x", n), ("u", n)];
    // f = x1 x2 u lies in the image of I − P_1.
    let f = MultiPoly::<Rational>::var(n, &blocks, "x", 1)
        .unwrap()
        .pmul(&MultiPoly::var(n, &blocks, "x", 2).unwrap())
        .pmul(&MultiPoly::vector_var(n, &blocks, "u").unwrap());
    let mut child = Command::new(env!("CARGO_BIN_EXE_rsq"))
        .args(["apply", "--op", "Qk", "--n", "3", "--k", "1"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(f.to_json().to_string().as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    let g = MultiPoly::<Rational>::from_json(&json(&out)).unwrap();
    let kind = OperatorKind::new(OperatorTag::QkLeft, n, 1).unwrap();
    assert_eq!(g, apply_euclidean(&kind, &f).unwrap());
    assert!(!g.is_zero());
    assert!(project(&g, "u", Projection::Pk, Side::Left).unwrap().is_zero());

    let needs_at = rsq(&["apply", "--op", "QkS", "--input", "-"]);
    assert_eq!(needs_at.status.code(), Some(2));
}
