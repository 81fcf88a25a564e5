//! Read a spec from JSON, write it back, and show that the bytes agree.

use finf::schema::{parse_spec, spec_to_json};

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/massey.json").into());
    let text = std::fs::read_to_string(&path).expect("readable input");
    match parse_spec(&text) {
        Ok(spec) => {
            let out = spec_to_json(&spec);
            println!("{path}: {} basis elements, round trip identical: {}", spec.dim(), out == text);
        }
        Err(e) => {
            eprintln!("{path}: {e}");
            std::process::exit(2);
        }
    }
}
