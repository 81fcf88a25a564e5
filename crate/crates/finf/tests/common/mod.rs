//! Independent oracles shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use finf::algebras::{AlgebraSpec, Vector};
use finf::exactq::Rational;
use finf::graded::{Derivation, TruncatedSeries};
use finf::hochschild::AssocAlgebra;
use finf::splitting::Splitting;
use finf::tangent::TangentTensor;

/// Reorder sign in the shifted convention: two entries pick up −1 when they
/// cross unless both have even degree.
pub fn shifted_sign(original: &[usize], order: &[usize], odd: &[bool]) -> Rational {
    let mut s = 1;
    for x in 0..order.len() {
        for y in x + 1..order.len() {
            if order[x] > order[y] && (odd[original[order[x]]] || odd[original[order[y]]]) {
                s = -s;
            }
        }
    }
    Rational::from_int(s)
}

/// μ₃(x₁,x₂,x₃) = Σ over (2,1) unshuffles ± p[q[i x • i y] • i z], written
/// directly against the structure constants.
pub fn transfer_mu3(spec: &AlgebraSpec, s: &Splitting, xs: &[usize; 3]) -> Vector {
    let h = s.dim_h();
    let odd: Vec<bool> = s.cohomology.classes.iter().map(|c| c.degree.rem_euclid(2) == 1).collect();
    let mut out = vec![Rational::zero(); h];
    for order in [[0, 1, 2], [0, 2, 1], [1, 2, 0]] {
        let [a, b, c] = order.map(|k| s.i.column(xs[k]));
        let inner = s.q.apply(&spec.bracket_vec(&a, &b));
        let v = s.p.apply(&spec.bracket_vec(&inner, &c));
        let sign = shifted_sign(xs, &order, &odd);
        for (o, x) in out.iter_mut().zip(v) {
            *o += &(&x * &sign);
        }
    }
    out
}

pub fn all_tuples(m: usize, n: usize) -> Vec<Vec<usize>> {
    (0..m.pow(n as u32))
        .map(|mut k| {
            let mut t = vec![0; n];
            for slot in (0..n).rev() {
                t[slot] = k % m;
                k /= m;
            }
            t
        })
        .collect()
}

/// Matrix of the textbook coboundary b: Hom(A^{⊗n}, A) → Hom(A^{⊗n+1}, A),
/// rows and columns indexed by (tuple, output) pairs.
pub fn coboundary(a: &AssocAlgebra, n: usize) -> Vec<Vec<Rational>> {
    let m = a.dim();
    let mul = |x: usize, y: usize| -> Vector {
        let mut ex = vec![Rational::zero(); m];
        ex[x] = Rational::one();
        let mut ey = vec![Rational::zero(); m];
        ey[y] = Rational::one();
        a.mul(&ex, &ey)
    };
    let sources = all_tuples(m, n);
    let targets = all_tuples(m, n + 1);
    let col = |t: &[usize], o: usize| sources.iter().position(|s| s == t).unwrap() * m + o;
    let mut rows = vec![vec![Rational::zero(); sources.len() * m]; targets.len() * m];
    for (ti, t) in targets.iter().enumerate() {
        for fo in 0..m {
            // f = elementary cochain sending tail tuples to e_fo
            for f_in in &sources {
                let c = col(f_in, fo);
                let mut val = vec![Rational::zero(); m];
                if t[1..] == f_in[..] {
                    for (k, x) in mul(t[0], fo).into_iter().enumerate() {
                        val[k] += &x;
                    }
                }
                for i in 1..=n {
                    for (mid, x) in mul(t[i - 1], t[i]).into_iter().enumerate() {
                        let mut s = t[..i - 1].to_vec();
                        s.push(mid);
                        s.extend_from_slice(&t[i + 1..]);
                        if s == *f_in {
                            let x = if i % 2 == 1 { -x } else { x };
                            val[fo] += &x;
                        }
                    }
                }
                if t[..n] == f_in[..] {
                    for (k, x) in mul(fo, t[n]).into_iter().enumerate() {
                        let x = if n % 2 == 0 { -x } else { x };
                        val[k] += &x;
                    }
                }
                for (k, x) in val.into_iter().enumerate() {
                    rows[ti * m + k][c] += &x;
                }
            }
        }
    }
    rows
}

/// Plain Gaussian elimination.
pub fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let mut r = 0;
    let cols = rows.first().map_or(0, Vec::len);
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let pivot = rows[r][c].clone();
        for i in r + 1..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let f = &rows[i][c] / &pivot;
            for k in c..cols {
                let sub = &f * &rows[r][k];
                rows[i][k] -= &sub;
            }
        }
        r += 1;
    }
    r
}

/// Λ₃ = μ₂(X₁, μ₂(X₂, X₃)) − μ₂(μ₂(X₁, X₂), X₃) for an even μ₂, expanded on
/// coordinate fields with the coefficients pulled out by hand.
pub fn associator(mu2: &TangentTensor, odd: &[bool], x: [usize; 3]) -> Derivation {
    let [i, j, k] = x;
    let h = odd.len();
    let left = mu2.get(&[i, j]);
    let right = mu2.get(&[j, k]);
    let ring = left.ring().clone();
    let mut out = vec![TruncatedSeries::zero(&ring); h];
    for m in 0..h {
        // μ₂(f ∂ₘ, ∂ₖ) = f μ₂(∂ₘ, ∂ₖ)
        let f = left.coeff(m);
        if !f.is_zero() {
            for (c, g) in mu2.get(&[m, k]).coeffs().iter().enumerate() {
                out[c].add_scaled(&f.mul(g), &Rational::from_int(-1));
            }
        }
        // μ₂(∂ᵢ, f ∂ₘ) = (−1)^{f̃ ĩ} f μ₂(∂ᵢ, ∂ₘ), f̃ = j̃ + k̃ + m̃
        let f = right.coeff(m);
        if !f.is_zero() {
            let neg = odd[i] && (odd[j] ^ odd[k] ^ odd[m]);
            for (c, g) in mu2.get(&[i, m]).coeffs().iter().enumerate() {
                out[c].add_scaled(&f.mul(g), &Rational::from_int(if neg { -1 } else { 1 }));
            }
        }
    }
    Derivation::from_coeffs(&ring, out)
}
