//! Exact scl of a few chains, or of the chain given on the command line.
//!
//!     cargo run --release --example compute_scl -- "abAB + abAB" "Z(a)*Z(b)"

use scl_core::engine::scl_of;
use scl_core::rational::to_pq;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let jobs: Vec<(String, Option<String>)> = match args.as_slice() {
        [] => vec![
            ("abAB".into(), None),
            ("a^-3 + b^-2 + a^5 b^3 + a^-2 b^-1".into(), None),
            ("abABab^-2Ab^2".into(), None),
            ("a b A c B C".into(), Some("Z^2(a,c) * Z(b)".into())),
        ],
        [chain] => vec![(chain.clone(), None)],
        [chain, group, ..] => vec![(chain.clone(), Some(group.clone()))],
    };
    for (chain, group) in jobs {
        let start = Instant::now();
        match scl_of(&chain, group.as_deref()) {
            Ok(r) => println!(
                "scl({chain}) = {}   [{} rounds, disks per factor {:?}, {:.2?}]",
                to_pq(&r.value),
                r.stats.rounds,
                r.stats.disks,
                start.elapsed()
            ),
            Err(e) => println!("scl({chain}): {e}"),
        }
    }
}
