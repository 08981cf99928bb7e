//! Runs every acceptance criterion and prints one line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use stable_stats::verify::run_all;
use stable_stats::DEFAULT_ENUMERATION_CAP;

fn main() -> ExitCode {
    let start = Instant::now();
    let outcomes = run_all(DEFAULT_ENUMERATION_CAP);
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("{status} criterion {}: {} ({})", o.id, o.name, o.detail);
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        outcomes.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
