//! Runs acceptance criteria 1 through 10 and prints one PASS/FAIL line each.

use std::process::ExitCode;

use semiwigner::validation::run_criterion;

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for k in 1..=10u8 {
        match run_criterion(k) {
            Ok(report) => {
                println!("{}", report.summary_line());
                if !report.passed() {
                    failed.push(report.detail());
                }
            }
            Err(e) => {
                println!("FAIL {k} ({e})");
                failed.push(format!("criterion {k}: {e}"));
            }
        }
    }
    for d in &failed {
        println!("\n{d}");
    }
    println!("\n{} of 10 criteria passed", 10 - failed.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
