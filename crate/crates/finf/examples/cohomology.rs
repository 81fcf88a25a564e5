//! Cohomology, representatives and the contracting homotopy of the Massey fixture.

use finf::corpus::massey;
use finf::splitting::{build_splitting, SplittingRule, build_splitting_with_rule};

fn main() {
    let spec = massey();
    let s = build_splitting(&spec).expect("d² = 0");
    println!("dims by degree: {:?}", s.cohomology.dims_by_degree());
    for c in &s.cohomology.classes {
        let rep: Vec<String> = c.representative.iter().map(|x| x.to_string()).collect();
        println!("  [{}] degree {}  representative ({})", c.name, c.degree, rep.join(", "));
    }
    println!("splitting identities: {}", if s.verify(&spec).is_valid() { "hold" } else { "fail" });

    let alt = build_splitting_with_rule(&spec, SplittingRule::Alternate).expect("d² = 0");
    println!("alternate rule gives the same classes: {}", alt.cohomology.dims_by_degree() == s.cohomology.dims_by_degree());
}
