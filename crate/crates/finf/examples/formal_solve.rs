//! The Chen field of a formal Lie algebra is quadratic, with weight ½ under E.

use finf::corpus::odd_sl2;
use finf::master::{chen_solve, euler_eigenvalue, master_residual};
use finf::splitting::build_splitting;

fn main() {
    let spec = odd_sl2();
    let s = build_splitting(&spec).expect("d² = 0");
    let sol = chen_solve(&spec, &s, 4).expect("solvable");
    println!("chen field mod I^5:\n{}", sol.chen.display());
    let residual = master_residual(&spec, &sol.gamma, &sol.chen).expect("even Γ");
    println!("Master residual vanishes: {}", residual.is_zero());
    if let Some(l) = euler_eigenvalue(&sol.chen) {
        println!("[E, chen] = {l} chen");
    }
}
