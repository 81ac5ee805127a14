use std::f64::consts::PI;
use std::process::{Command, Output};

use semiwigner::io;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semiwigner")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<f64>> {
    io::data_rows(text).into_iter().map(|r| r.iter().map(|c| c.parse().unwrap_or(f64::NAN)).collect()).collect()
}

fn value_at(text: &str, x: f64, p: f64) -> (f64, f64) {
    data_rows(text)
        .into_iter()
        .find(|r| (r[0] - x).abs() < 1e-12 && (r[1] - p).abs() < 1e-12)
        .map(|r| (r[2], r[3]))
        .expect("grid node present")
}

#[test]
fn ground_state_peak_from_cli() {
    let out = run(&["wigner", "--n", "0", "--m", "0", "--eps", "1", "--backend", "exact", "--grid", "-4:4:81,-4:4:81"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with('#'));
    assert_eq!(data_rows(&text).len(), 81 * 81);
    let (re, im) = value_at(&text, 0.0, 0.0);
    assert!((re - 1.0 / PI).abs() < 1e-12);
    assert_eq!(im, 0.0);
}

#[test]
fn output_is_reproducible_without_timestamp() {
    let args = ["--no-timestamp", "wigner", "--n", "3", "--m", "1", "--eps", "0.5", "--backend", "airy", "--grid=-2:2:9,-2:2:9"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(!stdout(&a).contains("# timestamp"));
    assert!(stdout(&run(&args[1..])).contains("# timestamp"));
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("semiwigner-cli-{}.csv", std::process::id()));
    let out = run(&["--out", path.to_str().unwrap(), "--no-timestamp", "eigens", "--n", "4", "--eps", "0.5"]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(text.starts_with("# invocation:"));
    assert!(!data_rows(&text).is_empty());
}

#[test]
fn evolve_at_time_zero_matches_initial_wigner_function() {
    let out = run(&["--no-timestamp", "evolve", "--data", "gauss", "--eps", "0.5", "--t", "0", "--grid=-1:1:3,-1:1:3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let eps: f64 = 0.5;
    for r in data_rows(&stdout(&out)) {
        let (x, p) = (r[0], r[1]);
        let exact = (-x * x - (p - x).powi(2) / (eps * eps)).exp() / (PI.sqrt() * eps);
        assert!((r[2] - exact).abs() < 1e-4 * (1.0 / (PI.sqrt() * eps)), "({x},{p}): {} vs {exact}", r[2]);
    }
}

#[test]
fn coefficient_routes_agree() {
    let out = run(&["--no-timestamp", "coeffs", "--data", "gauss", "--eps", "0.5", "--nmax", "2", "--route", "numeric"]);
    assert!(out.status.success());
    let rows = data_rows(&stdout(&out));
    assert_eq!(rows.len(), 9);
    let c00 = rows.iter().find(|r| r[0] == 0.0 && r[1] == 0.0).unwrap();
    assert!(c00[2] > 0.0 && c00[3] == 0.0);
}

#[test]
fn validate_identities_exits_zero() {
    let out = run(&["validate", "--suite", "identities"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("PASS 3 identities"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["wigner", "--n", "0", "--m", "0", "--eps", "1", "--grid", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["validate", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn numeric_domain_errors_exit_one() {
    let out = run(&["eigens", "--n", "3", "--eps", "-1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}
