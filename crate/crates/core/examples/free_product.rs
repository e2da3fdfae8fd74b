//! Chains over four factors: the free product formula and junction polygons.
//!
//!     cargo run --release --example free_product

use scl_core::chain::{parse_chain, parse_with_group};
use scl_core::engine::{scl, verify_witness};
use scl_core::rational::{rat, to_pq};

fn main() {
    let four = "Z(a) * Z(b) * Z(c) * Z(d)";
    for (x, y) in [("abAB", "cdCD"), ("aabAAB", "cdCdcDCD"), ("abAbaBAB", "ccdCCD")] {
        let (g, cx) = parse_with_group(x, Some(four)).unwrap();
        let cy = parse_chain(y, &g).unwrap();
        let joined = parse_chain(&format!("{x}{y}"), &g).unwrap();
        let (sx, sy) = (scl(&cx, &g).unwrap().value, scl(&cy, &g).unwrap().value);
        let r = scl(&joined, &g).unwrap();
        assert_eq!(r.value, &sx + &sy + rat(1, 2));
        assert!(verify_witness(&joined, &g, &r).ok());
        let sides: Vec<usize> = r.polygons.iter().map(|p| p.sides.len()).collect();
        println!(
            "scl({x}{y}) = {} = {} + {} + 1/2   polygon sides {sides:?}",
            to_pq(&r.value),
            to_pq(&sx),
            to_pq(&sy)
        );
    }
}
