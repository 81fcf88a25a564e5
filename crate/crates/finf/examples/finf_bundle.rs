//! Compute an F∞ bundle, check it, and write it as JSON.

use finf::corpus::abelian_unital;
use finf::schema::{to_json, BundleDoc};
use finf::tangent::{compute_bundle, validate_finf};

fn main() {
    let sol = compute_bundle(&abelian_unital(), 3, 3).expect("strict dG input");
    let report = validate_finf(&sol.bundle);
    eprintln!("valid: {}", report.is_valid());
    let doc = BundleDoc::from_bundle(&sol.bundle);
    let text = to_json(&doc);
    let back = finf::schema::from_json::<BundleDoc>(&text).expect("round trip");
    assert_eq!(back.to_bundle().expect("well formed"), sol.bundle);
    print!("{text}");
}
