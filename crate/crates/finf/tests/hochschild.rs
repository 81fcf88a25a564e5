use finf::algebras::{validate_dg, SparseTensor};
use finf::corpus::dual_numbers;
use finf::exactq::Rational;
use finf::graded::GradedBasis;
use finf::hochschild::*;
use finf::splitting::cohomology;
use std::collections::BTreeMap;

mod common;
use common::{coboundary, rank};

fn dual() -> AssocAlgebra {
    let (b, m) = dual_numbers();
    AssocAlgebra::new(b, m, 0).unwrap()
}

fn ground_field() -> AssocAlgebra {
    let basis = GradedBasis::new(vec![("1".into(), 0)]).unwrap();
    let mut m = SparseTensor::new(2);
    m.add(0, &[0, 0], Rational::one());
    AssocAlgebra::new(basis, m, 0).unwrap()
}

fn dims(a: &AssocAlgebra, n_max: usize) -> BTreeMap<i64, usize> {
    let spec = hochschild_spec(a, HochschildWindow { n_max }).unwrap();
    cohomology(&spec).unwrap().dims_by_degree()
}

#[test]
fn dual_numbers_match_brute_force_ranks() {
    let a = dual();
    let m = a.dim();
    let ranks: Vec<usize> = (0..4).map(|n| rank(coboundary(&a, n))).collect();
    let brute: Vec<usize> =
        (0..4).map(|n| m.pow(n as u32) * m - ranks[n] - if n == 0 { 0 } else { ranks[n - 1] }).collect();
    assert_eq!(brute, vec![2, 1, 1, 1]);
    let ours = dims(&a, 4);
    for n in 0..4 {
        assert_eq!(ours.get(&(n as i64)).copied().unwrap_or(0), brute[n], "degree {n}");
    }
}

#[test]
fn windows_are_stable() {
    let a = dual();
    let small = dims(&a, 4);
    let big = dims(&a, 5);
    for n in 0..=3 {
        assert_eq!(small.get(&n), big.get(&n), "degree {n}");
    }
    assert_eq!(big[&4], 1);
}

#[test]
fn ground_field_has_only_h0() {
    for n_max in 2..=5 {
        let d = dims(&ground_field(), n_max);
        assert_eq!(d[&0], 1);
        for n in 1..n_max as i64 {
            assert_eq!(d.get(&n), None, "n_max {n_max}, degree {n}");
        }
    }
}

#[test]
fn windows_are_valid_dg_algebras() {
    for n_max in 2..=4 {
        let spec = hochschild_spec(&dual(), HochschildWindow { n_max }).unwrap();
        let rep = validate_dg(&spec);
        assert!(rep.is_valid(), "n_max {n_max}:\n{rep}");
    }
}

#[test]
fn induced_gerstenhaber_structure_on_dual_numbers() {
    let spec = hochschild_spec(&dual(), HochschildWindow { n_max: 4 }).unwrap();
    let g = gerstenhaber_on_cohomology(&spec).unwrap();
    let name = |k: usize| g.cohomology().classes[k].name.clone();
    let class = |n: &str| g.cohomology().classes.iter().position(|c| c.name == n).unwrap();
    let (one, x, der, h2, h3) = (class("()->1"), class("()->x"), class("(x)->x"), class("(x,x)->1"), class("(x,x,x)->x"));
    let e = |k: usize, c: i64| {
        let mut v = vec![Rational::zero(); g.cohomology().dim()];
        v[k] = Rational::from_int(c);
        v
    };
    assert_eq!(g.trusted_degree, 3);
    assert_eq!(g.dot(one, x).unwrap(), e(x, 1));
    assert_eq!(g.dot(x, x).unwrap(), e(x, 0));
    assert_eq!(g.dot(der, h2).unwrap(), e(h3, 1));
    // x∂ₓ acting on x
    assert_eq!(g.bracket(x, der).unwrap(), e(x, -1));
    assert_eq!(g.bracket(der, h2).unwrap(), e(h2, -2));
    assert_eq!(g.bracket(h2, der).unwrap(), e(h2, 2));
    assert!(g.dot_is_graded_commutative());
    assert_eq!(
        g.dot(h2, h2),
        Err(HochschildError::OutsideWindow { degree: 4, trusted: 3 }),
        "{}",
        name(h2)
    );
    assert!(g.bracket(h2, h3).is_err());
}

#[test]
fn bad_inputs_are_rejected() {
    let (b, m) = dual_numbers();
    assert_eq!(AssocAlgebra::new(b, m, 1), Err(HochschildError::BadUnit(0)));
    // unit, x, y with xy = x and yx = y: (xy)x = 0 but x(yx) = x
    let b3 = GradedBasis::new(vec![("1".into(), 0), ("x".into(), 0), ("y".into(), 0)]).unwrap();
    let mut bad = SparseTensor::new(2);
    for k in 0..3 {
        bad.add(k, &[0, k], Rational::one());
        if k > 0 {
            bad.add(k, &[k, 0], Rational::one());
        }
    }
    bad.add(1, &[1, 2], Rational::one());
    bad.add(2, &[2, 1], Rational::one());
    assert!(matches!(AssocAlgebra::new(b3, bad, 0), Err(HochschildError::NotAssociative(_))));
    assert_eq!(hochschild_spec(&dual(), HochschildWindow { n_max: 1 }), Err(HochschildError::WindowTooSmall(1)));
    assert!(matches!(hochschild_spec(&dual(), HochschildWindow { n_max: 11 }), Err(HochschildError::TooLarge(_))));
    let plain = finf::corpus::massey();
    assert!(gerstenhaber_on_cohomology(&plain).is_err());
}
