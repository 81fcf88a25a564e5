//! A small library of algebras used by the examples, the CLI fixtures and the tests.

use crate::algebras::{bracket_from_bv, q, AlgebraBuilder, AlgebraSpec, SparseTensor};
use crate::exactq::Rational;
use crate::graded::GradedBasis;

/// Exterior algebra Λ(ξ₁, ξ₂) with zero differential and zero bracket.
pub fn abelian_unital() -> AlgebraSpec {
    exterior(&["x1", "x2"], &[], &[], "abelian-unital", false)
}

/// The Heisenberg Lie algebra placed in degree 1, d = 0.
pub fn odd_heisenberg() -> AlgebraSpec {
    AlgebraBuilder::new()
        .element("x", 1)
        .element("y", 1)
        .element("z", 1)
        .bracket("x", "y", &[("z", q(1))])
        .build()
        .expect("valid spec")
}

/// sl₂ placed in degree 1, d = 0.
pub fn odd_sl2() -> AlgebraSpec {
    AlgebraBuilder::new()
        .element("h", 1)
        .element("e", 1)
        .element("f", 1)
        .bracket("h", "e", &[("e", q(2))])
        .bracket("h", "f", &[("f", q(-2))])
        .bracket("e", "f", &[("h", q(1))])
        .build()
        .expect("valid spec")
}

/// A six-dimensional dgLa whose cohomology carries a nonzero ternary operation:
/// [a•b] = du is exact, so the Massey-type product ⟨a, a, b⟩ ~ [a•u] = w survives.
pub fn massey() -> AlgebraSpec {
    AlgebraBuilder::new()
        .element("a", 2)
        .element("b", 2)
        .element("u", 2)
        .element("v", 3)
        .element("w", 3)
        .element("w'", 3)
        .d("u", &[("v", q(1))])
        .bracket("a", "b", &[("v", q(1))])
        .bracket("a", "u", &[("w", q(1))])
        .bracket("b", "u", &[("w'", q(1))])
        .build()
        .expect("valid spec")
}

/// Fiber model ⊕_{i ≤ 2} ⊙ⁱE ⊗ ΛⁱE* for dim E = 2, with Δ the contraction.
pub fn bv_fiber() -> AlgebraSpec {
    // element = (symmetric exponents, exterior indices)
    let elems: Vec<([u8; 2], Vec<usize>)> = vec![
        ([0, 0], vec![]),
        ([1, 0], vec![0]),
        ([1, 0], vec![1]),
        ([0, 1], vec![0]),
        ([0, 1], vec![1]),
        ([2, 0], vec![0, 1]),
        ([1, 1], vec![0, 1]),
        ([0, 2], vec![0, 1]),
    ];
    let name = |(s, x): &([u8; 2], Vec<usize>)| -> String {
        if x.is_empty() {
            return "1".into();
        }
        let mut n = String::from("e");
        for (i, &k) in s.iter().enumerate() {
            for _ in 0..k {
                n.push_str(&(i + 1).to_string());
            }
        }
        n.push('t');
        for &b in x {
            n.push_str(&(b + 1).to_string());
        }
        n
    };
    let names: Vec<String> = elems.iter().map(name).collect();
    let find = |s: [u8; 2], x: &[usize]| elems.iter().position(|(a, b)| *a == s && b == x);
    let mut b = AlgebraBuilder::new();
    for (e, n) in elems.iter().zip(&names) {
        b = b.element(n, e.1.len() as i64);
    }
    b = b.with_dot().with_bv().unit("1");
    for (i, (s1, x1)) in elems.iter().enumerate() {
        for (j, (s2, x2)) in elems.iter().enumerate() {
            let Some((x, neg)) = wedge(x1, x2) else { continue };
            let s = [s1[0] + s2[0], s1[1] + s2[1]];
            if let Some(k) = find(s, &x) {
                b = b.dot(&names[i], &names[j], &[(&names[k], q(1).signed(neg))]);
            }
        }
        // Δ(s ⊗ θ^{b₁}…θ^{bᵢ}) = Σ (−1)^{r−1} ∂s/∂e_{b_r} ⊗ (omit b_r)
        for (r, &br) in x1.iter().enumerate() {
            if s1[br] == 0 {
                continue;
            }
            let mut s = *s1;
            s[br] -= 1;
            let rest: Vec<usize> = x1.iter().enumerate().filter(|&(k, _)| k != r).map(|(_, &v)| v).collect();
            if let Some(k) = find(s, &rest) {
                let c = q(s1[br] as i64).signed(r % 2 == 1);
                b = b.bv(&names[i], &[(&names[k], c)]);
            }
        }
    }
    with_bv_bracket(b.tag("dgbv").build().expect("valid spec"))
}

/// Λ•L for a Lie algebra L: exterior product, Δ the Chevalley–Eilenberg
/// boundary, bracket derived from Δ, zero differential.
pub fn exterior_lie(gens: &[&str], lie: &[(usize, usize, Vec<(usize, i64)>)], label: &str) -> AlgebraSpec {
    exterior(gens, lie, &[], label, true)
}

/// Λ•aff(1): [h, e] = e.
pub fn exterior_aff1() -> AlgebraSpec {
    exterior_lie(&["h", "e"], &[(0, 1, vec![(1, 1)])], "exterior-aff1")
}

/// Λ•sl₂.
pub fn exterior_sl2() -> AlgebraSpec {
    exterior_lie(
        &["h", "e", "f"],
        &[(0, 1, vec![(1, 2)]), (0, 2, vec![(2, -2)]), (1, 2, vec![(0, 1)])],
        "exterior-sl2",
    )
}

/// Λ•(Heisenberg) twisted by d = [x∧y • −]; Δ(x∧y) is central, so d anticommutes with Δ.
pub fn exterior_heisenberg_twisted() -> AlgebraSpec {
    let base = exterior_lie(&["x", "y", "z"], &[(0, 1, vec![(2, 1)])], "exterior-heisenberg-twisted");
    let c = base.basis.index_of("x^y").expect("x^y exists");
    let mut d = SparseTensor::new(1);
    for a in 0..base.dim() {
        let v = base.bracket_vec(&base.e(c), &base.e(a));
        for (o, c) in v.into_iter().enumerate() {
            d.add(o, &[a], c);
        }
    }
    AlgebraSpec { differential: d, ..base }
}

/// Λ(x, y, z) with dz = xy: the minimal model of the Heisenberg nilmanifold,
/// zero bracket.
pub fn nilmanifold() -> AlgebraSpec {
    exterior(&["x", "y", "z"], &[], &[(2, vec![(vec![0, 1], 1)])], "nilmanifold", false)
}

/// The fixture corpus: validated dLie/dG specs of dimension ≤ 12.
pub fn corpus() -> Vec<(&'static str, AlgebraSpec)> {
    vec![
        ("abelian-unital", abelian_unital()),
        ("odd-heisenberg", odd_heisenberg()),
        ("odd-sl2", odd_sl2()),
        ("massey", massey()),
        ("bv-fiber", bv_fiber()),
        ("exterior-aff1", exterior_aff1()),
        ("exterior-sl2", exterior_sl2()),
        ("exterior-heisenberg-twisted", exterior_heisenberg_twisted()),
        ("nilmanifold", nilmanifold()),
    ]
}

pub fn by_name(name: &str) -> Option<AlgebraSpec> {
    corpus().into_iter().find(|(n, _)| *n == name).map(|(_, s)| s)
}

fn with_bv_bracket(spec: AlgebraSpec) -> AlgebraSpec {
    let br = bracket_from_bv(&spec).expect("BV preconditions hold");
    spec.replace_bracket(br).expect("derived bracket has degree -1")
}

/// Merge two sorted index lists as a wedge product: (result, sign), None if they overlap.
fn wedge(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut neg = false;
    for &x in b {
        if a.contains(&x) {
            return None;
        }
        neg ^= a.iter().filter(|&&y| y > x).count() % 2 == 1;
    }
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    // inversions among b itself are zero since b is sorted
    Some((v, neg))
}

fn subsets(n: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (0u32..(1 << n)).map(|m| (0..n).filter(|&i| m & (1 << i) != 0).collect()).collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    all
}

fn subset_name(gens: &[&str], s: &[usize]) -> String {
    if s.is_empty() {
        "1".into()
    } else {
        s.iter().map(|&i| gens[i]).collect::<Vec<_>>().join("^")
    }
}

/// Exterior algebra on degree-1 generators with an optional Lie structure
/// (giving Δ) and an optional differential given on generators.
fn exterior(
    gens: &[&str],
    lie: &[(usize, usize, Vec<(usize, i64)>)],
    dgen: &[(usize, Vec<(Vec<usize>, i64)>)],
    label: &str,
    bv: bool,
) -> AlgebraSpec {
    let n = gens.len();
    let subs = subsets(n);
    let names: Vec<String> = subs.iter().map(|s| subset_name(gens, s)).collect();
    let index = |s: &[usize]| subs.iter().position(|x| x == s).expect("subset exists");
    let mut b = AlgebraBuilder::new();
    for (s, nm) in subs.iter().zip(&names) {
        b = b.element(nm, s.len() as i64);
    }
    b = b.with_dot().unit("1");
    if bv {
        b = b.with_bv();
    }
    let bracket_of = |i: usize, j: usize| -> Vec<(usize, i64)> {
        for (a, c, out) in lie {
            if (*a, *c) == (i, j) {
                return out.clone();
            }
            if (*a, *c) == (j, i) {
                return out.iter().map(|&(k, v)| (k, -v)).collect();
            }
        }
        Vec::new()
    };
    for (i, s1) in subs.iter().enumerate() {
        for (j, s2) in subs.iter().enumerate() {
            if let Some((s, neg)) = wedge(s1, s2) {
                b = b.dot(&names[i], &names[j], &[(&names[index(&s)], q(1).signed(neg))]);
            }
        }
        if bv {
            // Δ(x₁…x_k) = Σ_{a<b} (−1)^{a+b} [x_a, x_b] x₁…x̂_a…x̂_b…x_k (1-based a, b)
            for a in 0..s1.len() {
                for c in a + 1..s1.len() {
                    let rest: Vec<usize> = s1.iter().enumerate().filter(|&(k, _)| k != a && k != c).map(|(_, &v)| v).collect();
                    let sign = (a + c) % 2 == 1;
                    for (k, v) in bracket_of(s1[a], s1[c]) {
                        if let Some((s, neg)) = wedge(&[k], &rest) {
                            b = b.bv(&names[i], &[(&names[index(&s)], q(v).signed(sign ^ neg))]);
                        }
                    }
                }
            }
        }
        // d(x₁…x_k) = Σ (−1)^{r} x₁…x_{r}·d(x_{r+1})·…, extended as an odd derivation
        for (r, &g) in s1.iter().enumerate() {
            for (gi, images) in dgen {
                if *gi != g {
                    continue;
                }
                let left = &s1[..r];
                let right = &s1[r + 1..];
                for (img, c) in images {
                    let Some((lm, n1)) = wedge(left, img) else { continue };
                    let Some((full, n2)) = wedge(&lm, right) else { continue };
                    b = b.d(&names[i], &[(&names[index(&full)], q(*c).signed(n1 ^ n2 ^ (r % 2 == 1)))]);
                }
            }
        }
    }
    let spec = b.tag(label).build().expect("valid spec");
    if bv {
        with_bv_bracket(spec)
    } else {
        spec
    }
}

/// k[x]/(x²) as an associative algebra: basis (1, x).
pub fn dual_numbers() -> (GradedBasis, SparseTensor) {
    let basis = GradedBasis::new(vec![("1".into(), 0), ("x".into(), 0)]).expect("distinct names");
    let mut m = SparseTensor::new(2);
    m.add(0, &[0, 0], Rational::one());
    m.add(1, &[0, 1], Rational::one());
    m.add(1, &[1, 0], Rational::one());
    (basis, m)
}
