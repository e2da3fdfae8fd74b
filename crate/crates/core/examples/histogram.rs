//! Value histogram of w and w′ for α1, β1 ≤ N as CSV, with a few engine spot checks.
//!
//!     cargo run --release --example histogram -- 20 > hist.csv

use scl_core::engine::SclOptions;
use scl_core::histogram::{check_sample, histogram};

fn main() {
    let n: i64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let h = histogram(n);
    print!("{}", h.to_csv());
    let checks = check_sample(n.min(8), 6, 1, &SclOptions::default());
    let ok = checks.iter().filter(|c| c.agrees()).count();
    eprintln!("{} tuples, {} distinct values; engine agrees on {ok}/{}", h.tuples, h.bins.len(), checks.len());
}
