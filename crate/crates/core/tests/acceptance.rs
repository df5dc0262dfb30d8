//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! `ACCEPTANCE_SCALE=smoke|small|full` picks the corpus size (default `small`).

use std::process::ExitCode;
use std::time::Instant;

use basis_exchange::harness::{Harness, Scale};

fn main() -> ExitCode {
    let scale: Scale = std::env::var("ACCEPTANCE_SCALE")
        .ok()
        .map(|s| s.parse().expect("ACCEPTANCE_SCALE must be smoke, small or full"))
        .unwrap_or(Scale::Small);
    let start = Instant::now();
    let reports = Harness::new(scale).run();
    println!("acceptance ({scale}, {:.1}s)", start.elapsed().as_secs_f64());
    for report in &reports {
        println!("{report}");
    }
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed).collect();
    for report in &failed {
        if let Some(case) = &report.first_failure {
            eprintln!(
                "criterion {} first failure: {}\n{}",
                report.id,
                case.message,
                case.instance.to_json()
            );
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        reports.len() - failed.len(),
        reports.len()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
