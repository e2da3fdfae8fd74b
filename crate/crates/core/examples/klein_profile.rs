//! κ along a segment of the cone: breakpoints of the convex-hull boundary.
//!
//! For w with α = (5,-2) the segment from (1,0,1,1,0) to (1,1,0,0,1) crosses
//! the sail twice, at 3/5 and 4/5, with a flat piece of height 1/5 between.

use scl_core::arcs::build_arcs;
use scl_core::chain::parse_with_group;
use scl_core::cone::{build_cone_system, disk_box, extremal_rays};
use scl_core::rational::{int, to_pq, Rational};
use scl_core::sails::{enumerate_disk_vectors, klein_profile};

fn point(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&x| int(x)).collect()
}

fn main() {
    let (spec, chain) = parse_with_group("a^-3 + b^-2 + a^5 b^3 + a^-2 b^-1", None).unwrap();
    let arcs = build_arcs(&chain, &spec).unwrap();
    for f in 0..2 {
        let cone = build_cone_system(&arcs, f);
        let model = enumerate_disk_vectors(&cone, &disk_box(&cone, &extremal_rays(&cone)));
        let profile = klein_profile(&model, &cone, &point(&[1, 0, 1, 1, 0]), &point(&[1, 1, 0, 0, 1])).unwrap();
        println!("factor {}:", spec.factors()[f].name);
        for p in &profile.pieces {
            println!(
                "  x in [{}, {}]: kappa = {} x + {}",
                to_pq(&p.from),
                to_pq(&p.to),
                to_pq(&p.slope),
                to_pq(&p.intercept)
            );
        }
    }
}
