use std::sync::Arc;

use finf::exactq::Rational;
use finf::graded::{koszul_sign, symmetric_sign, CoordinateRing, Derivation, Monomial, TruncatedSeries};
use proptest::prelude::*;

const DEGREES: [i64; 4] = [0, 1, 2, -1];

fn ring(n: usize) -> Arc<CoordinateRing> {
    CoordinateRing::for_degrees(vec!["a".into(), "b".into(), "c".into(), "d".into()], &DEGREES, n)
}

fn series(n: usize) -> impl Strategy<Value = TruncatedSeries> {
    let term = (prop::collection::vec(0u8..=2, 4), -3i64..=3);
    prop::collection::vec(term, 0..6).prop_map(move |terms| {
        let r = ring(n);
        let odd = r.odd.clone();
        TruncatedSeries::from_terms(
            &r,
            terms.into_iter().map(|(mut e, c)| {
                for (i, x) in e.iter_mut().enumerate() {
                    if odd[i] {
                        *x = (*x).min(1);
                    }
                }
                (Monomial::from_exponents(&e), Rational::from_int(c))
            }),
        )
    })
}

fn homogeneous(n: usize) -> impl Strategy<Value = (TruncatedSeries, bool)> {
    (series(n), any::<bool>()).prop_map(|(s, odd)| {
        let (e, o) = s.split_parity();
        if odd {
            (o, true)
        } else {
            (e, false)
        }
    })
}

fn sign(odd: bool) -> Rational {
    Rational::from_int(if odd { -1 } else { 1 })
}

/// Sign of sorting a sequence, as a product over inverted pairs.
fn sign_by_inversions(perm: &[usize], parities: &[bool], wedge: bool) -> i32 {
    let mut s = 1;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                let mut odd = parities[perm[i]] && parities[perm[j]];
                odd ^= wedge;
                if odd {
                    s = -s;
                }
            }
        }
    }
    s
}

fn permutation() -> impl Strategy<Value = (Vec<usize>, Vec<bool>)> {
    (1usize..=6).prop_flat_map(|n| {
        (Just((0..n).collect::<Vec<_>>()).prop_shuffle(), prop::collection::vec(any::<bool>(), n))
    })
}

#[test]
fn monomials_display_in_canonical_order() {
    let r = ring(3);
    let m = Monomial::from_exponents(&[2, 1, 0, 0]);
    assert_eq!(m.display(&r.names), "a^2*b");
    assert_eq!(m.weight(&r.weights), 2 * 2 + 1);
}

#[test]
fn terms_above_the_truncation_are_dropped() {
    let r = ring(2);
    let a = TruncatedSeries::var(&r, 0);
    assert!(a.mul(&a).mul(&a).is_zero());
    assert_eq!(a.mul(&a).to_string(), "a^2");
}

proptest! {
    #[test]
    fn koszul_sign_is_a_product_over_inversions((perm, par) in permutation()) {
        prop_assert_eq!(koszul_sign(&perm, &par).unwrap(), sign_by_inversions(&perm, &par, true));
        prop_assert_eq!(symmetric_sign(&perm, &par).unwrap(), sign_by_inversions(&perm, &par, false));
    }

    #[test]
    fn multiplication_is_associative(f in series(4), g in series(4), h in series(4)) {
        prop_assert_eq!(f.mul(&g).mul(&h), f.mul(&g.mul(&h)));
    }

    #[test]
    fn multiplication_is_graded_commutative((f, fp) in homogeneous(4), (g, gp) in homogeneous(4)) {
        prop_assert_eq!(f.mul(&g), g.mul(&f).scale(&sign(fp && gp)));
    }

    #[test]
    fn coordinate_derivations_obey_leibniz((f, fp) in homogeneous(4), g in series(4), i in 0usize..4) {
        let r = ring(4);
        let di = Derivation::coordinate(&r, i);
        let lhs = di.apply(&f.mul(&g)).truncated(3);
        let mut rhs = di.apply(&f).mul(&g);
        rhs.add_scaled(&f.mul(&di.apply(&g)), &sign(r.odd[i] && fp));
        prop_assert_eq!(lhs, rhs.truncated(3));
    }

    #[test]
    fn euler_field_scales_by_half_the_weight(f in series(4)) {
        let r = ring(4);
        let e = Derivation::euler(&r);
        let expected = TruncatedSeries::from_terms(
            &r,
            f.terms().map(|(m, c)| (m.clone(), c * &Rational::new(m.weight(&r.weights), 2))),
        );
        prop_assert_eq!(e.apply(&f), expected);
    }

    #[test]
    fn reduction_commutes_with_products(f in series(4), g in series(4), m in 1usize..=4) {
        let small = ring(m);
        prop_assert_eq!(f.mul(&g).reduce_to(&small), f.reduce_to(&small).mul(&g.reduce_to(&small)));
    }

    #[test]
    fn commutator_of_derivations_is_their_graded_commutator(
        (f, fp) in homogeneous(4), (g, gp) in homogeneous(4), i in 0usize..4, j in 0usize..4, h in series(4)
    ) {
        let r = ring(4);
        let x = Derivation::coordinate(&r, i).mul_left(&f);
        let y = Derivation::coordinate(&r, j).mul_left(&g);
        let xp = fp ^ r.odd[i];
        let yp = gp ^ r.odd[j];
        let mut direct = x.apply(&y.apply(&h));
        direct.add_scaled(&y.apply(&x.apply(&h)), &-sign(xp && yp));
        prop_assert_eq!(x.commutator(&y).apply(&h).truncated(2), direct.truncated(2));
    }
}
