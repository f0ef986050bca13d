//! One line per acceptance criterion. Everything is exact arithmetic; the pinned
//! tolerances are the search depths below.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use sheafcheck_core::gallery::{verify_criterion, Status, VerifyParams};

const HORIZON: u32 = 24;
const PRECISION: u32 = 12;
const DEPTH: u32 = 3;
const PRIME: u32 = 2;
const SEED: u64 = 0;
const TIME_LIMIT: Duration = Duration::from_secs(60);

fn main() -> ExitCode {
    let params = VerifyParams { prime: PRIME, depth: DEPTH, horizon: HORIZON, precision: PRECISION, seed: SEED };
    println!("acceptance: prime={PRIME} depth={DEPTH} horizon={HORIZON} precision={PRECISION} seed={SEED} time_limit={}s", TIME_LIMIT.as_secs());
    let mut failed = 0;
    for n in 1..=8 {
        let start = Instant::now();
        let outcome = verify_criterion(n, &params);
        let elapsed = start.elapsed();
        match outcome {
            Ok(report) => {
                let mut status = report.status();
                if elapsed > TIME_LIMIT {
                    status = Status::Fail;
                }
                let bad: Vec<String> = report
                    .checks
                    .iter()
                    .filter(|c| c.status != Status::Pass)
                    .map(|c| format!("{}={}", c.name, c.status))
                    .collect();
                println!(
                    "criterion {n} {}: {} ({} checks, {:.2}s){}",
                    report.subject,
                    if status == Status::Pass { "pass" } else { "FAIL" },
                    report.checks.len(),
                    elapsed.as_secs_f64(),
                    if bad.is_empty() { String::new() } else { format!(" [{}]", bad.join(" ")) }
                );
                if status != Status::Pass {
                    failed += 1;
                }
            }
            Err(e) => {
                println!("criterion {n}: FAIL (error: {e})");
                failed += 1;
            }
        }
    }
    println!("acceptance: {} of 8 criteria pass", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
