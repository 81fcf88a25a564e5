use finf::algebras::{q, AlgebraBuilder, AlgebraSpec};
use finf::corpus::*;
use finf::exactq::Rational;
use finf::master::chen_solve;
use finf::splitting::{build_splitting, Splitting};
use finf::transfer::*;

mod common;
use common::transfer_mu3;

fn minimal(spec: &AlgebraSpec, n: usize, cap: usize) -> (Splitting, MinimalLInfinity) {
    let s = build_splitting(spec).unwrap();
    let sol = chen_solve(spec, &s, n).unwrap();
    let m = extract_linf(&sol, cap).unwrap();
    (s, m)
}

#[test]
fn massey_mu3_matches_the_transfer_formula() {
    let spec = massey();
    assert_eq!(spec.dim(), 6);
    let (s, m) = minimal(&spec, 4, 4);
    assert!(m.op(2).is_zero());
    assert!(!m.op(3).is_zero());
    let h = s.dim_h();
    for x in 0..h {
        for y in 0..h {
            for z in 0..h {
                let t = [x, y, z];
                assert_eq!(m.structure.eval(&t), transfer_mu3(&spec, &s, &t), "{t:?}");
            }
        }
    }
}

#[test]
fn massey_mu3_has_the_expected_values() {
    let spec = massey();
    let (s, m) = minimal(&spec, 3, 3);
    let class = |n: &str| s.cohomology.classes.iter().position(|c| c.name == n).unwrap();
    let (a, b, w, w2) = (class("a"), class("b"), class("w"), class("w'"));
    let two = Rational::from_int(2);
    assert_eq!(m.structure.eval(&[a, a, b])[w], two);
    assert_eq!(m.structure.eval(&[a, b, b])[w2], two);
    assert_eq!(m.op(3).nnz(), 2);
    let report = massey_report(&m);
    assert_eq!(report.lowest_arity, Some(3));
    assert!(report.to_string().starts_with("lowest arity 3"));
}

#[test]
fn extracted_structures_verify_through_arity_four() {
    for (name, spec) in corpus() {
        let (_, m) = minimal(&spec, 4, 4);
        let rep = verify_minimal(&m);
        assert!(rep.is_valid(), "{name}:\n{rep}");
    }
}

#[test]
fn mu2_is_the_induced_bracket() {
    for (name, spec) in corpus() {
        let (s, m) = minimal(&spec, 3, 2);
        assert_eq!(*m.op(2), induced_bracket(&spec, &s), "{name}");
    }
}

#[test]
fn abelian_and_formal_reports() {
    let (_, m) = minimal(&abelian_unital(), 3, 3);
    assert_eq!(m.lowest_arity(), None);
    assert_eq!(massey_report(&m).to_string(), "formal: all higher operations vanish\n");
    let (_, m) = minimal(&odd_sl2(), 3, 3);
    assert_eq!(massey_report(&m).lowest_arity, Some(2));
}

#[test]
fn cap_above_truncation_is_an_error() {
    let s = build_splitting(&massey()).unwrap();
    let sol = chen_solve(&massey(), &s, 3).unwrap();
    assert_eq!(extract_linf(&sol, 4), Err(TransferError::CapAboveTruncation { cap: 4, truncation: 3 }));
}

#[test]
fn corruptions_are_named() {
    let (_, mut m) = minimal(&massey(), 4, 4);
    m.structure.ops[0].add(0, &[1], Rational::one());
    let rep = verify_minimal(&m);
    assert!(rep.count("mu_1 = 0") > 0);
    assert!(rep.count("degree homogeneity") > 0);
}

#[test]
fn mu2_only_structure_from_a_lie_bracket_verifies() {
    let spec = AlgebraBuilder::new()
        .element("x", 1)
        .element("y", 1)
        .element("z", 1)
        .bracket("x", "y", &[("z", q(1))])
        .build()
        .unwrap();
    let (_, m) = minimal(&spec, 3, 3);
    assert!(verify_minimal(&m).is_valid());
    assert!(m.op(3).is_zero());
}
