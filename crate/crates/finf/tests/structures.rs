use finf::algebras::*;
use finf::corpus::*;
use finf::exactq::{Matrix, Rational};
use finf::graded::TruncatedSeries;
use finf::master::{chen_solve, GElement};
use finf::splitting::build_splitting;
use finf::transfer::{extract_linf, quasi_isomorphism};

#[test]
fn every_corpus_spec_passes_its_validator() {
    for (name, spec) in corpus() {
        let rep = if spec.dot.is_some() { validate_dg(&spec) } else { validate_dlie(&spec) };
        assert!(rep.is_valid(), "{name}:\n{rep}");
        assert!(spec.dim() <= 12, "{name} is too large");
    }
}

#[test]
fn broken_jacobi_is_named() {
    let spec = AlgebraBuilder::new()
        .element("x", 1)
        .element("y", 1)
        .element("z", 1)
        .bracket("x", "y", &[("x", q(1))])
        .bracket("x", "z", &[("y", q(1))])
        .build()
        .unwrap();
    let rep = validate_dlie(&spec);
    assert!(!rep.is_valid());
    assert!(rep.count("odd Jacobi identity") > 0);
    assert_eq!(rep.count("odd skew-symmetry"), 0);
}

#[test]
fn broken_leibniz_is_named() {
    // d a = b and [a•b] = a, but [b•b] = 0
    let spec = AlgebraBuilder::new()
        .element("a", 0)
        .element("b", 1)
        .d("a", &[("b", q(1))])
        .bracket("a", "b", &[("a", q(1))])
        .build()
        .unwrap();
    assert!(validate_dlie(&spec).count("Leibniz rule for d") > 0);
}

#[test]
fn inconsistent_skew_entries_are_rejected() {
    let err = AlgebraBuilder::new()
        .element("x", 1)
        .element("y", 1)
        .bracket("x", "y", &[("x", q(1))])
        .bracket("y", "x", &[("x", q(1))])
        .build();
    assert_eq!(err.unwrap_err(), SpecError::InconsistentSkew { a: 0, b: 1 });
    // consistent redundant entries are accepted: for odd x, y the sign is −1
    let ok = AlgebraBuilder::new()
        .element("x", 1)
        .element("y", 1)
        .bracket("x", "y", &[("x", q(1))])
        .bracket("y", "x", &[("x", q(-1))])
        .build();
    assert!(ok.is_ok());
}

#[test]
fn wrong_degrees_are_rejected() {
    let err = AlgebraBuilder::new().element("x", 1).element("y", 1).d("x", &[("y", q(1))]).build();
    assert!(matches!(err, Err(SpecError::Degree { .. })));
}

fn elementary(i: usize, j: usize) -> Matrix {
    let mut m = Matrix::zeros(2, 2);
    m[(i, j)] = Rational::one();
    m
}

/// e_i ⊗ θ^j ↦ E_ij.
fn as_matrix(spec: &AlgebraSpec, v: &[Rational]) -> Matrix {
    let mut m = Matrix::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            let k = spec.basis.index_of(&format!("e{}t{}", i + 1, j + 1)).unwrap();
            m[(i, j)] = v[k].clone();
        }
    }
    m
}

#[test]
fn fiber_bracket_is_minus_the_commutator_on_all_sixteen_pairs() {
    let spec = bv_fiber();
    let br = bracket_from_bv(&spec).unwrap();
    let cells = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let mut checked = 0;
    for &(i, j) in &cells {
        for &(k, l) in &cells {
            let a = spec.basis.index_of(&format!("e{}t{}", i + 1, j + 1)).unwrap();
            let b = spec.basis.index_of(&format!("e{}t{}", k + 1, l + 1)).unwrap();
            let v = br.eval(&[&spec.e(a), &spec.e(b)], spec.dim());
            // nothing may leak outside E ⊗ E*
            for (o, c) in v.iter().enumerate() {
                if !c.is_zero() {
                    assert_eq!(spec.basis.degrees[o], 1);
                }
            }
            let (c1, c2) = (elementary(i, j), elementary(k, l));
            let expected = c1.mul(&c2).sub(&c2.mul(&c1)).scale(&Rational::from_int(-1));
            assert_eq!(as_matrix(&spec, &v), expected, "pair ({i}{j}, {k}{l})");
            checked += 1;
        }
    }
    assert_eq!(checked, 16);
}

#[test]
fn bv_operators_have_order_two_and_d_order_one() {
    for spec in [bv_fiber(), exterior_aff1(), exterior_sl2(), exterior_heisenberg_twisted()] {
        let bv = spec.bv.as_ref().unwrap();
        assert!(operator_order(bv, &spec, 2));
        assert!(operator_order(&spec.differential, &spec, 1));
        assert_eq!(bracket_from_bv(&spec).unwrap(), spec.bracket);
    }
    let spec = exterior_sl2();
    assert!(!operator_order(spec.bv.as_ref().unwrap(), &spec, 1));
}

#[test]
fn dlie_structures_satisfy_the_linf_relations() {
    for (name, spec) in corpus() {
        let s = LInfinityStructure::from_dlie(&spec);
        let rep = validate_linf(&s, 3);
        assert!(rep.is_valid(), "{name}:\n{rep}");
        assert!(s.degree_violations().is_valid());
    }
}

#[test]
fn homological_field_round_trips() {
    for (name, spec) in corpus() {
        let s = LInfinityStructure::from_dlie(&spec);
        let ring = s.coordinate_ring(3);
        let q = s.homological_field(&ring);
        let back = LInfinityStructure::from_homological_field(spec.basis.clone(), &q, 2);
        assert_eq!(back, s, "{name}");
    }
}

#[test]
fn versal_solution_is_a_quasi_isomorphism() {
    for name in ["odd-heisenberg", "massey", "bv-fiber", "nilmanifold"] {
        let spec = by_name(name).unwrap();
        let s = build_splitting(&spec).unwrap();
        let sol = chen_solve(&spec, &s, 4).unwrap();
        let minimal = extract_linf(&sol, 4).unwrap();
        let f = quasi_isomorphism(&spec, &sol, 4);
        let rep = validate_linf_morphism(&f, &minimal.structure, &LInfinityStructure::from_dlie(&spec), 4);
        assert!(rep.is_valid(), "{name}:\n{rep}");
    }
}

#[test]
fn pushforward_of_the_tautological_point_is_gamma() {
    let spec = massey();
    let s = build_splitting(&spec).unwrap();
    let sol = chen_solve(&spec, &s, 3).unwrap();
    let f = quasi_isomorphism(&spec, &sol, 3);
    let ring = sol.ring().clone();
    let h = ring.nvars();
    let taut = GElement::from_components(&ring, (0..h).map(|i| TruncatedSeries::var(&ring, i)).collect());
    assert_eq!(pushforward(&f, &taut).unwrap(), sol.gamma);
    let constant = GElement::constant(&ring, &vec![Rational::one(); h]);
    assert_eq!(pushforward(&f, &constant), Err(PushforwardError::NotInMaximalIdeal(0)));
}

#[test]
fn identity_morphism_pushes_forward_identically() {
    let spec = odd_sl2();
    let s = LInfinityStructure::from_dlie(&spec);
    let id = LInfinityMorphism::identity(&spec.basis);
    assert!(validate_linf_morphism(&id, &s, &s, 3).is_valid());
}
