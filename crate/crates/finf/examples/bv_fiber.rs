//! The bracket of the rank-2 fiber model is minus the matrix commutator on E ⊗ E*.

use finf::algebras::{bracket_from_bv, operator_order};
use finf::corpus::bv_fiber;

fn main() {
    let spec = bv_fiber();
    let bv = spec.bv.as_ref().expect("fiber model carries Δ");
    println!("Δ has order 2: {}", operator_order(bv, &spec, 2));
    let br = bracket_from_bv(&spec).expect("Δ defines a bracket");
    let cells = ["e1t1", "e1t2", "e2t1", "e2t2"];
    for a in cells {
        for b in cells {
            let (i, j) = (spec.basis.index_of(a).unwrap(), spec.basis.index_of(b).unwrap());
            let v = br.eval(&[&spec.e(i), &spec.e(j)], spec.dim());
            let terms: Vec<String> = v
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| format!("{c} {}", spec.basis.names[k]))
                .collect();
            if !terms.is_empty() {
                println!("[{a} • {b}] = {}", terms.join(" + "));
            }
        }
    }
}
