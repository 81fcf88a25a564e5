//! Induced products on the tangent sheaf of the nilmanifold model.

use finf::corpus::nilmanifold;
use finf::tangent::{compute_bundle, validate_finf};

fn main() {
    let sol = compute_bundle(&nilmanifold(), 4, 3).expect("strict dG input");
    let b = &sol.bundle;
    let names = &b.ring.names;
    for n in 2..=b.arity_cap() {
        println!("mu_{n}: {} nonzero entries", b.mu(n).entries().count());
        for (t, x) in b.mu(n).entries().take(6) {
            let args: Vec<&str> = t.iter().map(|&i| names[i].as_str()).collect();
            println!("  ({}) -> {}", args.join(", "), x.display());
        }
    }
    print!("{}", validate_finf(b));
}
