//! Random gauge transformations: Γ^g still solves the Master equation, and
//! the recomputed μ₂ either agrees exactly or moves within its δ-class.

use finf::corpus::{bv_fiber, nilmanifold};
use finf::tangent::gauge_mu2_check;

fn main() {
    for (name, spec) in [("nilmanifold", nilmanifold()), ("bv-fiber", bv_fiber())] {
        for seed in 0..5 {
            let g = gauge_mu2_check(&spec, 3, seed).expect("strict dG input");
            println!(
                "{name:<12} seed {seed}: master {} identical {} closed {}",
                g.master_holds, g.mu2_identical, g.difference_closed
            );
        }
    }
}
