//! A non-formal dgLa: the minimal L∞ structure has a nonzero ternary operation.

use finf::corpus::massey;
use finf::master::{chen_solve, kuranishi_ideal};
use finf::splitting::build_splitting;
use finf::transfer::{extract_linf, massey_report, verify_minimal};

fn main() {
    let spec = massey();
    let s = build_splitting(&spec).expect("d² = 0");
    let sol = chen_solve(&spec, &s, 4).expect("solvable");
    for (k, f) in kuranishi_ideal(&sol).iter().enumerate() {
        if !f.is_zero() {
            println!("chen(t_{}) = {f}", s.cohomology.classes[k].name);
        }
    }
    let m = extract_linf(&sol, 4).expect("cap ≤ N");
    print!("{}", massey_report(&m));
    println!("L∞ relations through arity 4: {}", if verify_minimal(&m).is_valid() { "hold" } else { "fail" });
}
