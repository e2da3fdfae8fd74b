//! Arcs, glued coordinates, extremal rays and the disk box of each factor.

use scl_core::arcs::build_arcs;
use scl_core::chain::parse_with_group;
use scl_core::cone::{build_cone_system, disk_box, extremal_rays};
use scl_core::sails::enumerate_disk_vectors;

fn main() {
    let text = std::env::args().nth(1).unwrap_or_else(|| "a^-3 + b^-2 + a^5 b^3 + a^-2 b^-1".into());
    let (spec, chain) = parse_with_group(&text, None).expect("chain parses");
    let arcs = build_arcs(&chain, &spec).expect("integral boundary");
    println!("{} over {spec}", chain.render(&spec));

    for f in 0..spec.num_factors() {
        let cone = build_cone_system(&arcs, f);
        let rays = extremal_rays(&cone);
        let bound = disk_box(&cone, &rays);
        println!("\nfactor {} with coordinates {}", spec.factors()[f].name, cone.labels.join(" "));
        for r in &rays {
            println!("  ray {:?}", r.iter().map(|x| x.to_string()).collect::<Vec<_>>());
        }
        println!("  box {bound:?}");
        let model = enumerate_disk_vectors(&cone, &bound);
        for d in &model.disks {
            println!("  disk {:?}", d.v);
        }
    }
}
