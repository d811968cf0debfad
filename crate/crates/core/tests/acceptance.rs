//! Acceptance gate: one line per criterion, non-zero exit if any fails.

use qnf::selftest::{criterion, CRITERIA};
use qnf::Execution;

fn main() {
    let mut failed = Vec::new();
    for id in 1..=CRITERIA {
        let outcome = criterion(id, Execution::default());
        println!("{outcome}");
        if !outcome.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {CRITERIA} criteria passed");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
