//! Run the axiom validators on every built-in fixture and on a broken bracket.

use finf::algebras::{q, validate_dg, validate_dlie, AlgebraBuilder};
use finf::corpus::corpus;

fn main() {
    for (name, spec) in corpus() {
        let rep = if spec.dot.is_some() { validate_dg(&spec) } else { validate_dlie(&spec) };
        println!("{name:<28} dim {:>2}  {}", spec.dim(), if rep.is_valid() { "ok" } else { "INVALID" });
    }

    let broken = AlgebraBuilder::new()
        .element("x", 1)
        .element("y", 1)
        .element("z", 1)
        .bracket("x", "y", &[("x", q(1))])
        .bracket("x", "z", &[("y", q(1))])
        .build()
        .expect("degrees are consistent");
    println!("\nbroken bracket:\n{}", validate_dlie(&broken));
}
