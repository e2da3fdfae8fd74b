//! Serialize a result, read it back, and re-check it without the LP.

use scl_core::chain::parse_with_group;
use scl_core::engine::{scl, verify_witness, SclResult};
use scl_core::rational::rat;

fn main() {
    let (spec, chain) = parse_with_group("a^-2 + b^-2 + a^3 b^3 + a^-1 b^-1", None).unwrap();
    let result = scl(&chain, &spec).unwrap();
    let json = result.to_json();
    println!("{json}");

    let back = SclResult::from_json(&json).unwrap();
    println!("verified: {}", verify_witness(&chain, &spec, &back).ok());

    let mut forged = back.clone();
    forged.value = rat(1, 2);
    let report = verify_witness(&chain, &spec, &forged);
    println!("forged value rejected: {:?}", report.problems);
}
