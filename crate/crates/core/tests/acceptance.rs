//! Runs every acceptance criterion at the full level and prints one line per
//! criterion. Uses its own harness so the lines show without `--nocapture`.

use std::process::ExitCode;
use std::time::Instant;

use tto_core::acceptance::{run_criterion, Level, CRITERIA, DEFAULT_SEED};
use tto_core::Tolerances;

fn main() -> ExitCode {
    // `cargo test -- --list` and friends expect no work to be done
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let tol = Tolerances::default();
    let mut failed = Vec::new();
    for id in 1..=CRITERIA.len() {
        let start = Instant::now();
        let report = run_criterion(id, Level::Full, DEFAULT_SEED, &tol);
        println!("{report} [{:.2}s]", start.elapsed().as_secs_f64());
        if !report.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
