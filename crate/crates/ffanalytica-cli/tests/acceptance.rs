//! Every acceptance criterion, one line each. Exits non-zero if any fails.
//!
//! `FFA_CRITERIA=3,4` restricts the run; `FFA_THREADS` sets the pool size.

use ffanalytica_cli::acceptance::{criteria, run_one};

fn main() {
    let only: Option<Vec<u8>> = std::env::var("FFA_CRITERIA")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let threads = std::env::var("FFA_THREADS").ok().and_then(|s| s.parse().ok()).unwrap_or(4);
    let mut failed = Vec::new();
    let mut ran = 0;
    for c in criteria() {
        if only.as_ref().is_some_and(|o| !o.contains(&c.id)) {
            continue;
        }
        let o = run_one(&c, threads);
        println!("{}", o.line());
        ran += 1;
        if !o.passed {
            failed.push(o.id);
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed.len());
    if !failed.is_empty() {
        println!("failed: {failed:?}");
        std::process::exit(1);
    }
}
