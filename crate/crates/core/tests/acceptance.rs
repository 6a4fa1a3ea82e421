//! Every acceptance criterion at its full scale, one pass/fail line each.
//! Runs without the libtest harness so the lines are never captured.

use pintersect_core::acceptance::{run_criterion, Level, CRITERIA};
use pintersect_core::config::DEFAULT_SEED;

fn main() {
    let mut failed = Vec::new();
    for &(id, _) in &CRITERIA {
        let r = run_criterion(id, Level::Full, DEFAULT_SEED);
        println!("{}", r.line());
        if !r.passed {
            println!("    measured: {}", r.measured);
            failed.push(id);
        }
    }
    println!("acceptance: {} of {} criteria pass", CRITERIA.len() - failed.len(), CRITERIA.len());
    if !failed.is_empty() {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
