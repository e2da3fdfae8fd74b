//! scl along two lines of surgeries Z²(a,c)*Z(b) → Z(a)*Z(b), approaching scl = 1.

use scl_core::chain::{parse_chain, parse_group_spec};
use scl_core::engine::SclOptions;
use scl_core::surgery::{parse_line, sweep};

fn main() {
    let spec = parse_group_spec("Z^2(a,c) * Z(b)").unwrap();
    let chain = parse_chain("a^2 c^2 b A B C b A C B", &spec).unwrap();
    for text in ["a->a; c->p*a; b->b", "a->a + p*a; c->p*a; b->b"] {
        let line = parse_line(text, &spec, None).unwrap();
        println!("# {text}");
        print!("{}", sweep(&line, &chain, 1, 6, &SclOptions::default()).to_csv());
    }
}
