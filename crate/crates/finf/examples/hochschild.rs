//! Hochschild cohomology of the dual numbers with its Gerstenhaber structure.

use finf::corpus::dual_numbers;
use finf::hochschild::{gerstenhaber_on_cohomology, hochschild_spec, AssocAlgebra, HochschildWindow};

fn main() {
    let (basis, mult) = dual_numbers();
    let a = AssocAlgebra::new(basis, mult, 0).expect("associative and unital");
    for n_max in [3, 4, 5] {
        let spec = hochschild_spec(&a, HochschildWindow { n_max }).expect("small window");
        let g = gerstenhaber_on_cohomology(&spec).expect("tagged window");
        println!("n_max {n_max}: dims {:?} (trusted up to degree {})", g.cohomology().dims_by_degree(), g.trusted_degree);
    }

    let spec = hochschild_spec(&a, HochschildWindow { n_max: 4 }).expect("small window");
    let g = gerstenhaber_on_cohomology(&spec).expect("tagged window");
    let classes = &g.cohomology().classes;
    for &x in &g.trusted_classes() {
        for &y in &g.trusted_classes() {
            let Ok(v) = g.bracket(x, y) else { continue };
            for (k, c) in v.iter().enumerate() {
                if !c.is_zero() {
                    println!("[{} • {}] = {c} {}", classes[x].name, classes[y].name, classes[k].name);
                }
            }
        }
    }
    println!("cup product graded commutative on cohomology: {}", g.dot_is_graded_commutative());
}
