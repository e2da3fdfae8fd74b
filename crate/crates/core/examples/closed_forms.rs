//! The closed forms for w and w′ next to the engine on a few tuples.

use scl_core::engine::scl_of;
use scl_core::histogram::Family;
use scl_core::rational::to_pq;

fn main() {
    let tuples = [(2, -1, 2, -1), (3, -1, 3, -1), (5, -2, 3, -1), (7, -3, 4, -1)];
    println!("{:<8} {:<18} {:>8} {:>8}", "family", "tuple", "formula", "engine");
    for family in [Family::W, Family::WPrime] {
        for t in tuples {
            let formula = family.closed_form(t);
            let engine = scl_of(&family.chain_text(t), Some("Z(a) * Z(b)")).unwrap().value;
            assert_eq!(formula, engine);
            println!("{:<8} {:<18} {:>8} {:>8}", format!("{family:?}"), format!("{t:?}"), to_pq(&formula), to_pq(&engine));
        }
    }
}
