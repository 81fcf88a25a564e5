use finf::algebras::AlgebraSpec;
use finf::corpus::*;
use finf::exactq::Rational;
use finf::graded::{Derivation, TruncatedSeries};
use finf::master::*;
use finf::splitting::{build_splitting, build_splitting_with_rule, SplittingRule};
use finf::tangent::random_gauge;
use finf::transfer::extract_linf;
use proptest::prelude::*;

fn solve(spec: &AlgebraSpec, n: usize) -> MasterSolution {
    chen_solve(spec, &build_splitting(spec).unwrap(), n).unwrap()
}

/// ∂ = −½ Σ_{i,j} (−1)^{j̃(ĩ+1)} tⁱtʲ C_{ij}^k ∂_k with C_{ij}^k = p[rᵢ•rⱼ]ᵏ,
/// written out term by term.
fn quadratic_oracle(spec: &AlgebraSpec, sol: &MasterSolution) -> Derivation {
    let s = build_splitting(spec).unwrap();
    let ring = sol.ring();
    let h = ring.nvars();
    let mut coeffs = vec![TruncatedSeries::zero(ring); h];
    for i in 0..h {
        for j in 0..h {
            let c = s.p.apply(&spec.bracket_vec(&s.i.column(i), &s.i.column(j)));
            let mono = TruncatedSeries::var(ring, i).mul(&TruncatedSeries::var(ring, j));
            let neg = ring.odd[j] && !ring.odd[i];
            for (k, ck) in c.iter().enumerate() {
                let f = (ck * &Rational::new(-1, 2)).signed(neg);
                coeffs[k].add_scaled(&mono, &f);
            }
        }
    }
    Derivation::from_coeffs(ring, coeffs)
}

#[test]
fn corpus_solutions_satisfy_the_master_equation() {
    for (name, spec) in corpus() {
        let sol = solve(&spec, 4);
        assert!(master_residual(&spec, &sol.gamma, &sol.chen).unwrap().is_zero(), "{name}");
        assert!(chen_square(&sol).iter().all(TruncatedSeries::is_zero), "{name}: chen^2");
        for c in sol.chen.coeffs() {
            assert!(c.min_degree().map_or(true, |d| d >= 2), "{name}: chen does not preserve I^2");
        }
    }
}

#[test]
fn truncations_are_coherent() {
    for (name, spec) in corpus() {
        let big = solve(&spec, 5).reduce(4);
        let small = solve(&spec, 4);
        assert_eq!(big.gamma, small.gamma, "{name}");
        assert_eq!(big.chen, small.chen, "{name}");
    }
}

#[test]
fn formal_inputs_give_the_quadratic_field() {
    for (name, spec) in corpus() {
        if !spec.differential.is_zero() {
            continue;
        }
        let sol = solve(&spec, 4);
        assert_eq!(sol.chen, quadratic_oracle(&spec, &sol), "{name}");
        let m = extract_linf(&sol, 4).unwrap();
        for n in 3..=4 {
            assert!(m.op(n).is_zero(), "{name}: mu_{n}");
        }
    }
}

#[test]
fn canonical_formal_pair_solves_the_master_equation() {
    for spec in [odd_heisenberg(), odd_sl2()] {
        let sol = canonical_formal_solution(&spec, 4).unwrap();
        assert!(master_residual(&spec, &sol.gamma, &sol.chen).unwrap().is_zero());
        // the displayed field without the −½ does not
        let literal = formal_quadratic_field(&spec, sol.ring(), &Rational::one());
        assert!(!master_residual(&spec, &sol.gamma, &literal).unwrap().is_zero());
    }
    assert!(canonical_formal_solution(&massey(), 3).is_err());
}

#[test]
fn splittings_satisfy_their_identities() {
    for (name, spec) in corpus() {
        for rule in [SplittingRule::Lexicographic, SplittingRule::Alternate] {
            let s = build_splitting_with_rule(&spec, rule).unwrap();
            let rep = s.verify(&spec);
            assert!(rep.is_valid(), "{name} {rule:?}:\n{rep}");
        }
    }
}

#[test]
fn unital_solutions_are_unit_normalized() {
    for (name, spec) in corpus() {
        if spec.unit.is_none() {
            continue;
        }
        let sol = solve(&spec, 4);
        let rep = verify_unit_normalization(&spec, &sol);
        assert!(rep.is_valid(), "{name}:\n{rep}");
    }
}

#[test]
fn chen_field_has_euler_weight_one_half() {
    for (name, spec) in corpus() {
        let sol = solve(&spec, 4);
        let lambda = euler_eigenvalue(&sol.chen).expect("eigenvector");
        if sol.chen.is_zero() {
            assert!(lambda.is_zero(), "{name}");
        } else {
            assert_eq!(lambda, Rational::new(1, 2), "{name}");
        }
    }
}

#[test]
fn splitting_entry_point_matches_the_chen_recursion() {
    for (name, spec) in corpus() {
        let s = build_splitting(&spec).unwrap();
        let (sol, report) = split_solve(&spec, &s, 4).unwrap();
        assert_eq!(sol.gamma, solve(&spec, 4).gamma, "{name}");
        assert!(report.second_order_agrees, "{name}");
    }
}

#[test]
fn massey_fixture_has_a_ternary_obstruction() {
    let sol = solve(&massey(), 4);
    let ideal = kuranishi_ideal(&sol);
    assert!(ideal.iter().any(|f| f.min_degree() == Some(3)));
}

#[test]
fn gauge_parity_is_enforced() {
    let spec = odd_sl2();
    let sol = solve(&spec, 3);
    let ring = sol.ring();
    // odd basis element times an odd coordinate: even
    let even = GElement::from_vector(ring, &spec.e(0), &TruncatedSeries::var(ring, 0));
    assert!(gauge_transform(&spec, &sol.gamma, &sol.chen, &even).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gauge_transforms_preserve_the_master_equation(seed in any::<u64>(), pick in 0usize..9) {
        let (name, spec) = corpus().swap_remove(pick);
        let sol = solve(&spec, 3);
        let g = random_gauge(&spec, sol.ring(), seed);
        let moved = gauge_transform(&spec, &sol.gamma, &sol.chen, &g).unwrap();
        prop_assert!(master_residual(&spec, &moved, &sol.chen).unwrap().is_zero(), "{}", name);
    }
}
