//! The tangent complex of a versal solution and the induced products μₙ on T_H.
//!
//! Multilinear maps are stored on the constant coordinate fields ∂ᵢ = ∂/∂tⁱ
//! and extended O-linearly:
//! T(X₁…f Xⱼ…) = (−1)^{f̃(T̃ + X̃₁ + … + X̃_{j−1})} f T(X₁…Xⱼ…).
//!
//! Twisted differential on g ⊗ O: d^Γa = da + ∂⃗a + [Γ•a]. On T_H: δX = [∂, X].
//! On a tensor Φ of parity Φ̃:
//! (DΦ)(X₁…Xₙ) = D(Φ(X₁…Xₙ)) − (−1)^{Φ̃} Σⱼ (−1)^{X̃₁+…+X̃_{j−1}} Φ(X₁…δXⱼ…Xₙ).
//!
//! Sign convention for the A-chain: the stored Aₖ satisfy
//! Bₖ = Υ∘μₖ + D^Γ Aₖ, so they are the negatives of the Aₖ in
//! Υ∘μ₂ = Υ·Υ − D^Γ A₂ written with the opposite sign.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebras::{validate_dg, AlgebraSpec, Report};
use crate::exactq::{Matrix, Rational};
use crate::graded::{koszul_sign, CoordinateRing, Derivation, Monomial, TruncatedSeries};
use crate::master::{chen_solve, euler_eigenvalue, gauge_transform, master_residual, GElement, MasterError, MasterSolution};
use crate::splitting::{build_splitting, CohomologyBasis, Splitting, SplittingError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TangentError {
    #[error("the input is not a strict dG algebra: {0}")]
    NotDg(String),
    #[error("truncation {0} is too small; at least 1 is needed")]
    Truncation(usize),
    #[error("arity cap {cap} exceeds the truncation {truncation}")]
    CapAboveTruncation { cap: usize, truncation: usize },
    #[error("tensor arities differ: {0} and {1}")]
    Arity(usize, usize),
    #[error("hypothesis Υ∘τ = D^Γ B fails at order {order} on inputs {tuple:?}")]
    Hypothesis { order: usize, tuple: Vec<usize> },
    #[error("order {order}: the split system leaves a residual on inputs {tuple:?}")]
    Inconsistent { order: usize, tuple: Vec<usize> },
    #[error("conclusion τ = δχ fails at order {order} on inputs {tuple:?}")]
    Conclusion { order: usize, tuple: Vec<usize> },
    #[error("{0}")]
    Master(#[from] MasterError),
    #[error("{0}")]
    Splitting(#[from] SplittingError),
}

/// Values a multilinear map can take: elements of g ⊗ O or vector fields.
pub trait TensorValue: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn add_scaled_value(&mut self, other: &Self, s: &Rational);
    fn mul_left_value(&self, f: &TruncatedSeries) -> Self;
    fn is_zero_value(&self) -> bool;
    fn degree_part_value(&self, m: usize) -> Self;
    /// Lowest t-degree of a nonzero term.
    fn min_degree_value(&self) -> Option<usize>;
}

impl TensorValue for GElement {
    fn zero_like(&self) -> Self {
        GElement::zero(self.ring(), self.dim())
    }
    fn add_scaled_value(&mut self, other: &Self, s: &Rational) {
        self.add_scaled(other, s);
    }
    fn mul_left_value(&self, f: &TruncatedSeries) -> Self {
        self.mul_left(f)
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn degree_part_value(&self, m: usize) -> Self {
        self.degree_part(m)
    }
    fn min_degree_value(&self) -> Option<usize> {
        self.components().iter().filter_map(TruncatedSeries::min_degree).min()
    }
}

impl TensorValue for Derivation {
    fn zero_like(&self) -> Self {
        Derivation::zero(self.ring())
    }
    fn add_scaled_value(&mut self, other: &Self, s: &Rational) {
        for k in 0..other.coeffs().len() {
            self.coeff_mut(k).add_scaled(other.coeff(k), s);
        }
    }
    fn mul_left_value(&self, f: &TruncatedSeries) -> Self {
        self.mul_left(f)
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn degree_part_value(&self, m: usize) -> Self {
        Derivation::from_coeffs(self.ring(), self.coeffs().iter().map(|c| c.degree_part(m)).collect())
    }
    fn min_degree_value(&self) -> Option<usize> {
        self.coeffs().iter().filter_map(TruncatedSeries::min_degree).min()
    }
}

/// A multilinear map on T_H of fixed arity and parity, stored on tuples of
/// coordinate fields. Missing tuples are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiTensor<V> {
    arity: usize,
    odd: bool,
    zero: V,
    entries: BTreeMap<Vec<usize>, V>,
}

/// Elements of Hom(T_H^{⊗n}, g ⊗ O), such as Υ, A₂, Bₖ.
pub type HomTensor = MultiTensor<GElement>;
/// Elements of Hom(T_H^{⊗n}, T_H), such as μₙ and Λₙ.
pub type TangentTensor = MultiTensor<Derivation>;

fn parity_of(tuple: &[usize], odd: &[bool]) -> bool {
    tuple.iter().fold(false, |p, &i| p ^ odd[i])
}

fn sgn(neg: bool) -> Rational {
    Rational::from_int(if neg { -1 } else { 1 })
}

/// All tuples in {0..h}ⁿ, lexicographically.
pub fn tuples(h: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..h).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

impl<V: TensorValue> MultiTensor<V> {
    pub fn new(arity: usize, odd: bool, zero: V) -> Self {
        MultiTensor { arity, odd, zero, entries: BTreeMap::new() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_odd(&self) -> bool {
        self.odd
    }

    pub fn get(&self, tuple: &[usize]) -> &V {
        self.entries.get(tuple).unwrap_or(&self.zero)
    }

    pub fn set(&mut self, tuple: Vec<usize>, v: V) {
        assert_eq!(tuple.len(), self.arity, "arity mismatch");
        if v.is_zero_value() {
            self.entries.remove(&tuple);
        } else {
            self.entries.insert(tuple, v);
        }
    }

    /// Add s·v to the entry at `tuple`.
    pub fn accumulate(&mut self, tuple: &[usize], v: &V, s: &Rational) {
        if v.is_zero_value() || s.is_zero() {
            return;
        }
        let mut cur = self.get(tuple).clone();
        cur.add_scaled_value(v, s);
        self.set(tuple.to_vec(), cur);
    }

    /// Nonzero entries in tuple order.
    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &V)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add_scaled(&mut self, other: &Self, s: &Rational) {
        for (t, v) in &other.entries {
            self.accumulate(t, v, s);
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &Rational::from_int(-1));
        out
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = MultiTensor::new(self.arity, self.odd, self.zero.clone());
        out.add_scaled(self, s);
        out
    }

    pub fn degree_part(&self, m: usize) -> Self {
        let mut out = MultiTensor::new(self.arity, self.odd, self.zero.clone());
        for (t, v) in &self.entries {
            out.set(t.clone(), v.degree_part_value(m));
        }
        out
    }

    /// Lowest order at which some entry is nonzero, with that entry's tuple.
    pub fn first_nonzero(&self) -> Option<(usize, Vec<usize>)> {
        self.entries
            .iter()
            .filter_map(|(t, v)| v.min_degree_value().map(|d| (d, t.clone())))
            .min()
    }

    /// T(prefix, X, suffix) for a field X = Σ Xᵐ ∂ₘ.
    pub fn eval_field(&self, prefix: &[usize], x: &Derivation, suffix: &[usize], odd: &[bool]) -> V {
        let twist = self.odd ^ parity_of(prefix, odd);
        let mut out = self.zero.clone();
        let mut tuple: Vec<usize> = prefix.to_vec();
        tuple.push(0);
        tuple.extend_from_slice(suffix);
        let slot = prefix.len();
        for (m, f) in x.coeffs().iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            tuple[slot] = m;
            let v = self.get(&tuple);
            if v.is_zero_value() {
                continue;
            }
            let f = if twist { f.parity_twist() } else { f.clone() };
            out.add_scaled_value(&v.mul_left_value(&f), &Rational::one());
        }
        out
    }
}

impl TangentTensor {
    /// The coefficient μ^k_{i₁…iₙ}(t).
    pub fn component(&self, k: usize, tuple: &[usize]) -> TruncatedSeries {
        self.get(tuple).coeff(k).clone()
    }
}

/// (−1)^{Ĩ(X̃₁+…+X̃_l)} T(X₁…X_l, I(X_{l+1}…X_{l+j}), X_{l+j+1}…).
pub fn insert<V: TensorValue>(
    outer: &MultiTensor<V>,
    inner: &TangentTensor,
    l: usize,
    h: usize,
    odd: &[bool],
) -> MultiTensor<V> {
    let j = inner.arity();
    let n = outer.arity() + j - 1;
    let mut out = MultiTensor::new(n, outer.is_odd() ^ inner.is_odd(), outer.zero.clone());
    for t in tuples(h, n) {
        let mid = inner.get(&t[l..l + j]);
        if mid.is_zero() {
            continue;
        }
        let v = outer.eval_field(&t[..l], mid, &t[l + j..], odd);
        let s = sgn(inner.is_odd() && parity_of(&t[..l], odd));
        out.accumulate(&t, &v, &s);
    }
    out
}

/// The graded commutator [∂, X].
pub fn delta_action(chen: &Derivation, x: &Derivation) -> Derivation {
    chen.commutator(x)
}

/// d^Γa = da + ∂⃗a + [Γ•a].
pub fn d_gamma(spec: &AlgebraSpec, gamma: &GElement, chen: &Derivation, a: &GElement) -> GElement {
    let mut out = a.d(spec);
    out.add_assign(&a.arrow(chen));
    out.add_assign(&gamma.bracket(spec, a));
    out
}

/// Υ(X) = X⃗Γ.
pub fn upsilon(gamma: &GElement, x: &Derivation) -> GElement {
    gamma.arrow(x)
}

/// The twisted complexes of a solution, truncated at order N. The solution
/// is taken at order N + 1 so that Υ(∂ᵢ) = ∂ᵢΓ is exact modulo I^{N+1}.
#[derive(Clone, Debug)]
pub struct TangentComplex {
    spec: AlgebraSpec,
    /// Υ at t = 0 as a matrix H → g; equals i when Γ_[1] = Σ tⁱrᵢ.
    lin: Matrix,
    p: Matrix,
    q: Matrix,
    ring: Arc<CoordinateRing>,
    gamma: GElement,
    chen: Derivation,
    upsilon: Vec<GElement>,
    delta: Vec<Derivation>,
    odd: Vec<bool>,
    cohomology: CohomologyBasis,
}

impl TangentComplex {
    /// From a solution at order N + 1 and the splitting it was built from.
    pub fn new(spec: &AlgebraSpec, s: &Splitting, sol: &MasterSolution) -> Result<Self, TangentError> {
        if sol.truncation < 2 {
            return Err(TangentError::Truncation(sol.truncation.saturating_sub(1)));
        }
        let n = sol.truncation - 1;
        let ring = sol.ring().with_truncation(n);
        let gamma = sol.gamma.reduce_to(&ring);
        let chen = sol.chen.reduce_to(&ring);
        let h = ring.nvars();
        let upsilon: Vec<GElement> =
            (0..h).map(|k| sol.gamma.arrow(&Derivation::coordinate(sol.ring(), k)).reduce_to(&ring)).collect();
        let delta = (0..h).map(|k| delta_action(&chen, &Derivation::coordinate(&ring, k))).collect();
        let odd = ring.odd.clone();
        let one = Monomial::one(h);
        let lin = Matrix::from_fn(spec.dim(), h, |a, k| {
            let u: &GElement = &upsilon[k];
            u.component(a).coeff(&one)
        });
        Ok(TangentComplex {
            spec: spec.clone(),
            lin,
            p: s.p.clone(),
            q: s.q.clone(),
            ring,
            gamma,
            chen,
            upsilon,
            delta,
            odd,
            cohomology: sol.cohomology.clone(),
        })
    }

    /// Split, solve at order N + 1 and build the complex at order N.
    pub fn solve(spec: &AlgebraSpec, n: usize) -> Result<Self, TangentError> {
        if n < 1 {
            return Err(TangentError::Truncation(n));
        }
        let s = build_splitting(spec)?;
        let sol = chen_solve(spec, &s, n + 1)?;
        TangentComplex::new(spec, &s, &sol)
    }

    pub fn truncation(&self) -> usize {
        self.ring.truncation
    }

    pub fn ring(&self) -> &Arc<CoordinateRing> {
        &self.ring
    }

    pub fn chen(&self) -> &Derivation {
        &self.chen
    }

    pub fn gamma(&self) -> &GElement {
        &self.gamma
    }

    pub fn cohomology(&self) -> &CohomologyBasis {
        &self.cohomology
    }

    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    /// Number of coordinates, i.e. dim H.
    pub fn dim_h(&self) -> usize {
        self.ring.nvars()
    }

    pub fn coordinate_parities(&self) -> &[bool] {
        &self.odd
    }

    /// δ∂ᵢ.
    pub fn delta_coordinate(&self, i: usize) -> &Derivation {
        &self.delta[i]
    }

    pub fn d_gamma(&self, a: &GElement) -> GElement {
        d_gamma(&self.spec, &self.gamma, &self.chen, a)
    }

    /// Υ(X) = Σ Xᵏ ∂ₖΓ.
    pub fn upsilon(&self, x: &Derivation) -> GElement {
        let mut out = GElement::zero(&self.ring, self.spec.dim());
        for (k, f) in x.coeffs().iter().enumerate() {
            if !f.is_zero() {
                out.add_assign(&self.upsilon[k].mul_left(f));
            }
        }
        out
    }

    pub fn zero_hom(&self, arity: usize, odd: bool) -> HomTensor {
        MultiTensor::new(arity, odd, GElement::zero(&self.ring, self.spec.dim()))
    }

    pub fn zero_tangent(&self, arity: usize, odd: bool) -> TangentTensor {
        MultiTensor::new(arity, odd, Derivation::zero(&self.ring))
    }

    /// Υ as an even arity-1 tensor.
    pub fn upsilon_tensor(&self) -> HomTensor {
        let mut t = self.zero_hom(1, false);
        for (k, u) in self.upsilon.iter().enumerate() {
            t.set(vec![k], u.clone());
        }
        t
    }

    /// Υ∘χ.
    pub fn upsilon_after(&self, chi: &TangentTensor) -> HomTensor {
        let mut out = self.zero_hom(chi.arity(), chi.is_odd());
        for (t, x) in chi.entries() {
            out.set(t.clone(), self.upsilon(x));
        }
        out
    }

    /// D^Γ on Hom(T^{⊗n}, g ⊗ O).
    pub fn d_gamma_tensor(&self, phi: &HomTensor) -> HomTensor {
        let n = phi.arity();
        let mut out = self.zero_hom(n, !phi.is_odd());
        for t in tuples(self.dim_h(), n) {
            let mut v = self.d_gamma(phi.get(&t));
            for j in 0..n {
                let s = sgn(!(phi.is_odd() ^ parity_of(&t[..j], &self.odd)));
                let w = phi.eval_field(&t[..j], &self.delta[t[j]], &t[j + 1..], &self.odd);
                v.add_scaled(&w, &s);
            }
            out.set(t, v);
        }
        out
    }

    /// δ on Hom(T^{⊗n}, T).
    pub fn delta_tensor(&self, mu: &TangentTensor) -> TangentTensor {
        let n = mu.arity();
        let mut out = self.zero_tangent(n, !mu.is_odd());
        for t in tuples(self.dim_h(), n) {
            let mut v = delta_action(&self.chen, mu.get(&t));
            for j in 0..n {
                let s = sgn(!(mu.is_odd() ^ parity_of(&t[..j], &self.odd)));
                let w = mu.eval_field(&t[..j], &self.delta[t[j]], &t[j + 1..], &self.odd);
                v.add_scaled_value(&w, &s);
            }
            out.set(t, v);
        }
        out
    }

    /// (Φ·Ψ)(X₁…X_{i+j}) = (−1)^{Ψ̃(X̃₁+…+X̃ᵢ)} Φ(X₁…Xᵢ)·Ψ(X_{i+1}…).
    pub fn product(&self, phi: &HomTensor, psi: &HomTensor) -> HomTensor {
        let (i, j) = (phi.arity(), psi.arity());
        let mut out = self.zero_hom(i + j, phi.is_odd() ^ psi.is_odd());
        for (a, x) in phi.entries() {
            for (b, y) in psi.entries() {
                let v = x.dot(&self.spec, y);
                let mut t = a.clone();
                t.extend_from_slice(b);
                let s = sgn(psi.is_odd() && parity_of(a, &self.odd));
                out.accumulate(&t, &v, &s);
            }
        }
        out
    }

    pub fn insert_hom(&self, outer: &HomTensor, inner: &TangentTensor, l: usize) -> HomTensor {
        insert(outer, inner, l, self.dim_h(), &self.odd)
    }

    pub fn insert_tangent(&self, outer: &TangentTensor, inner: &TangentTensor, l: usize) -> TangentTensor {
        insert(outer, inner, l, self.dim_h(), &self.odd)
    }

    /// Given τ and B with Υ∘τ = D^Γ B, find χ and C with B = Υ∘χ + D^Γ C and
    /// τ = δχ. At order m, with ψ = [B − Υ∘χ − D^Γ C]_[m]:
    /// χ_[m] = pψ and C_[m] = q(ψ − Υ₀pψ), where Υ₀ = Υ|_{t=0} is i for a
    /// φ-normalized Γ.
    pub fn split_cyclic(
        &self,
        tau: &TangentTensor,
        b: &HomTensor,
        chi_odd: bool,
    ) -> Result<(TangentTensor, HomTensor), TangentError> {
        self.split_cyclic_with(tau, b, chi_odd, &|_, _| None)
    }

    /// `split_cyclic` with an extra term added to C at each order. The
    /// perturbation must be d-closed and killed by p for the system to stay
    /// solvable; it selects a different preimage under d.
    pub fn split_cyclic_with(
        &self,
        tau: &TangentTensor,
        b: &HomTensor,
        chi_odd: bool,
        perturb: &dyn Fn(usize, &[usize]) -> Option<GElement>,
    ) -> Result<(TangentTensor, HomTensor), TangentError> {
        let n = tau.arity();
        if b.arity() != n {
            return Err(TangentError::Arity(n, b.arity()));
        }
        let hyp = self.upsilon_after(tau).sub(&self.d_gamma_tensor(b));
        if let Some((order, tuple)) = hyp.first_nonzero() {
            return Err(TangentError::Hypothesis { order, tuple });
        }
        let mut chi = self.zero_tangent(n, chi_odd);
        let mut c = self.zero_hom(n, !chi_odd);
        let all = tuples(self.dim_h(), n);
        for m in 0..=self.truncation() {
            let resid = b.sub(&self.upsilon_after(&chi)).sub(&self.d_gamma_tensor(&c));
            if let Some((order, tuple)) = resid.first_nonzero() {
                if order < m {
                    return Err(TangentError::Inconsistent { order, tuple });
                }
            }
            for t in &all {
                let psi = resid.get(t).degree_part(m);
                let ppsi = psi.apply_matrix(&self.p, false);
                let rest = psi.sub(&ppsi.apply_matrix(&self.lin, false));
                let mut cm = rest.apply_matrix(&self.q, true);
                if let Some(extra) = perturb(m, t) {
                    cm.add_assign(&extra);
                }
                let xm = Derivation::from_coeffs(&self.ring, ppsi.components().to_vec());
                chi.accumulate(t, &xm, &Rational::one());
                c.accumulate(t, &cm, &Rational::one());
            }
        }
        let resid = b.sub(&self.upsilon_after(&chi)).sub(&self.d_gamma_tensor(&c));
        if let Some((order, tuple)) = resid.first_nonzero() {
            return Err(TangentError::Inconsistent { order, tuple });
        }
        let concl = tau.sub(&self.delta_tensor(&chi));
        if let Some((order, tuple)) = concl.first_nonzero() {
            return Err(TangentError::Conclusion { order, tuple });
        }
        Ok((chi, c))
    }

    /// μ₂ and A₂ from Υ·Υ = Υ∘μ₂ + D^Γ A₂.
    pub fn induce_mu2(&self) -> Result<(TangentTensor, HomTensor), TangentError> {
        let u = self.upsilon_tensor();
        let b2 = self.product(&u, &u);
        self.split_cyclic(&self.zero_tangent(2, true), &b2, false)
    }

    /// Λₙ = Σ_{k+l=n−1} Σ_{j=0}^{k} (−1)^{r} μ_{k+1}(X₁…Xⱼ, μ_{l+1}(…), …) with
    /// r = (l+1)(X̃₁+…+X̃ⱼ) + jl + k(l+1) + 1; the Koszul part is applied by `insert`.
    /// `mus[k]` is μ_{k+2}.
    pub fn lambda(&self, mus: &[TangentTensor], n: usize) -> TangentTensor {
        let mut out = self.zero_tangent(n, n % 2 == 0);
        for k in 1..n - 1 {
            let l = n - 1 - k;
            let (outer, inner) = (&mus[k - 1], &mus[l - 1]);
            for j in 0..=k {
                let s = sgn((j * l + k * (l + 1) + 1) % 2 == 1);
                out.add_scaled(&self.insert_tangent(outer, inner, j), &s);
            }
        }
        out
    }

    /// Bₖ from Υ, A₂…A_{k−1} and μ₂…μ_{k−1}. `a_chain[k]` is A_{k+2}.
    pub fn b_k(&self, mus: &[TangentTensor], a_chain: &[HomTensor], k: usize) -> HomTensor {
        let u = self.upsilon_tensor();
        let a_prime = |i: usize| -> HomTensor {
            if i == 1 {
                u.clone()
            } else {
                a_chain[i - 2].scale(&Rational::from_int(-1))
            }
        };
        let mut out = self.zero_hom(k, k % 2 == 1);
        for i in 1..k {
            let j = k - i;
            let s = sgn(i % 2 == 0);
            out.add_scaled(&self.product(&a_prime(i), &a_prime(j)), &s);
        }
        for i in 2..k {
            let j = k + 1 - i;
            let ai = a_prime(i);
            for l in 0..i {
                let s = sgn((l * (j + 1) + (i + 1) * j + 1) % 2 == 1);
                out.add_scaled(&self.insert_hom(&ai, &mus[j - 2], l), &s);
            }
        }
        out
    }

    /// μ₃…μ_cap and A₃…A_cap, given μ₂ and A₂.
    pub fn induce_higher(
        &self,
        mu2: &TangentTensor,
        a2: &HomTensor,
        cap: usize,
    ) -> Result<(Vec<TangentTensor>, Vec<HomTensor>), TangentError> {
        if cap > self.truncation() {
            return Err(TangentError::CapAboveTruncation { cap, truncation: self.truncation() });
        }
        let mut mus = vec![mu2.clone()];
        let mut chain = vec![a2.clone()];
        for k in 3..=cap {
            let b = self.b_k(&mus, &chain, k);
            let tau = self.lambda(&mus, k);
            let (mu, a) = self.split_cyclic(&tau, &b, k % 2 == 1)?;
            mus.push(mu);
            chain.push(a);
        }
        Ok((mus, chain))
    }
}

/// Where a bundle came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub spec_digest: String,
    pub truncation: usize,
    pub arity_cap: usize,
}

/// The data (H, E, ∂, μ₂…μ_cap, e) modulo I^{N+1}.
#[derive(Clone, Debug, PartialEq)]
pub struct FInfinityBundle {
    pub cohomology: CohomologyBasis,
    pub ring: Arc<CoordinateRing>,
    pub chen: Derivation,
    pub euler: Derivation,
    pub unit_field: Option<Derivation>,
    /// μ₂, μ₃, …
    pub products: Vec<TangentTensor>,
    /// Whether the input product is graded commutative.
    pub commutative: bool,
    pub provenance: Provenance,
}

impl FInfinityBundle {
    pub fn mu(&self, n: usize) -> &TangentTensor {
        &self.products[n - 2]
    }

    pub fn arity_cap(&self) -> usize {
        self.products.len() + 1
    }
}

/// Everything `compute_bundle` produces, including the A-chain.
#[derive(Clone, Debug)]
pub struct TangentSolution {
    pub complex: TangentComplex,
    pub bundle: FInfinityBundle,
    /// A₂, A₃, …
    pub a_chain: Vec<HomTensor>,
}

/// The full pipeline: split, solve the Master equation, induce μ₂…μ_cap.
pub fn compute_bundle(spec: &AlgebraSpec, n: usize, cap: usize) -> Result<TangentSolution, TangentError> {
    let rep = validate_dg(spec);
    if let Some(v) = rep.failures().next() {
        return Err(TangentError::NotDg(format!("{} fails on {:?}", v.identity, v.indices)));
    }
    if cap < 2 {
        return Err(TangentError::CapAboveTruncation { cap, truncation: n });
    }
    let complex = TangentComplex::solve(spec, n)?;
    let (mu2, a2) = complex.induce_mu2()?;
    let (products, a_chain) = complex.induce_higher(&mu2, &a2, cap)?;
    let ring = complex.ring().clone();
    let unit_field = complex.cohomology().unit_class.map(|u| Derivation::coordinate(&ring, u));
    let commutative = rep.count("graded commutativity") == 0;
    let bundle = FInfinityBundle {
        cohomology: complex.cohomology().clone(),
        chen: complex.chen().clone(),
        euler: Derivation::euler(&ring),
        ring,
        unit_field,
        products,
        commutative,
        provenance: Provenance { spec_digest: spec_digest(spec), truncation: n, arity_cap: cap },
    };
    Ok(TangentSolution { complex, bundle, a_chain })
}

/// A stable textual fingerprint of the structure constants (FNV-1a, 64 bit).
pub fn spec_digest(spec: &AlgebraSpec) -> String {
    let mut text = String::new();
    for (n, d) in spec.basis.names.iter().zip(&spec.basis.degrees) {
        text.push_str(&format!("{n}:{d};"));
    }
    let tensors = [Some(&spec.differential), Some(&spec.bracket), spec.dot.as_ref(), spec.bv.as_ref()];
    for (label, t) in ["d", "b", "m", "bv"].iter().zip(tensors) {
        text.push_str(label);
        if let Some(t) = t {
            for (o, ins, c) in t.entries() {
                text.push_str(&format!("{o}<{ins:?}={c};"));
            }
        }
    }
    text.push_str(&format!("u{:?}", spec.unit));
    let mut h: u64 = 0xcbf29ce484222325;
    for b in text.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

/// δ on tensors using only the bundle's Chen field.
fn bundle_delta(b: &FInfinityBundle, mu: &TangentTensor) -> TangentTensor {
    let h = b.ring.nvars();
    let delta: Vec<Derivation> = (0..h).map(|k| delta_action(&b.chen, &Derivation::coordinate(&b.ring, k))).collect();
    let n = mu.arity();
    let mut out = MultiTensor::new(n, !mu.is_odd(), Derivation::zero(&b.ring));
    for t in tuples(h, n) {
        let mut v = delta_action(&b.chen, mu.get(&t));
        for j in 0..n {
            let s = sgn(!(mu.is_odd() ^ parity_of(&t[..j], &b.ring.odd)));
            let w = mu.eval_field(&t[..j], &delta[t[j]], &t[j + 1..], &b.ring.odd);
            v.add_scaled_value(&w, &s);
        }
        out.set(t, v);
    }
    out
}

fn bundle_lambda(b: &FInfinityBundle, n: usize) -> TangentTensor {
    let h = b.ring.nvars();
    let mut out = MultiTensor::new(n, n % 2 == 0, Derivation::zero(&b.ring));
    for k in 1..n - 1 {
        let l = n - 1 - k;
        for j in 0..=k {
            let s = sgn((j * l + k * (l + 1) + 1) % 2 == 1);
            out.add_scaled(&insert(b.mu(k + 1), b.mu(l + 1), j, h, &b.ring.odd), &s);
        }
    }
    out
}

/// Every coefficient μ^k_{i₁…iₙ} is an eigenfunction of E with eigenvalue
/// ½(|tᵏ| − |t^{i₁}| − … − |t^{iₙ}| + n); with a unit, [e, E] = e.
pub fn euler_homogeneity(b: &FInfinityBundle) -> Report {
    let mut rep = Report::new();
    let w = &b.ring.weights;
    for mu in &b.products {
        let n = mu.arity() as i64;
        for (t, x) in mu.entries() {
            let inputs: i64 = t.iter().map(|&i| w[i]).sum();
            for (k, c) in x.coeffs().iter().enumerate() {
                let want = w[k] - inputs + n;
                for (m, v) in c.terms() {
                    let got = m.weight(w);
                    if got != want {
                        let mut idx = vec![k];
                        idx.extend_from_slice(t);
                        rep.push(
                            &format!("Euler homogeneity of mu_{n}"),
                            &idx,
                            format!("monomial {} (coefficient {v}) has weight {got}, expected {want}", m.display(&b.ring.names)),
                        );
                    }
                }
            }
        }
    }
    if let Some(e) = &b.unit_field {
        let c = e.commutator(&b.euler);
        if c != *e {
            rep.push("[e, E] = e", &[], c.display());
        }
    }
    rep
}

/// Result of `validate_finf`.
#[derive(Clone, Debug)]
pub struct FinfReport {
    pub report: Report,
    /// λ with [E, ∂] = λ∂, when ∂ is an eigenvector.
    pub lambda: Option<Rational>,
}

impl FinfReport {
    pub fn is_valid(&self) -> bool {
        self.report.is_valid()
    }
}

impl fmt::Display for FinfReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.lambda {
            Some(l) => writeln!(f, "[E, chen] = {l} chen")?,
            None => writeln!(f, "chen is not an eigenvector of ad E")?,
        }
        write!(f, "{}", self.report)
    }
}

/// All checks on a bundle: ∂² = 0, ∂I ⊂ I², the Euler eigenvalue of ∂,
/// parities, δμ₂ = 0 and Λₙ = δμₙ, Euler homogeneity, and the unit clauses.
pub fn validate_finf(b: &FInfinityBundle) -> FinfReport {
    let mut rep = Report::new();
    let ring = &b.ring;
    let h = ring.nvars();
    for (k, c) in b.chen.square_on_coordinates().iter().enumerate() {
        if !c.is_zero() {
            rep.push("chen^2 = 0", &[k], c.to_string());
        }
    }
    for (k, c) in b.chen.coeffs().iter().enumerate() {
        if let Some(d) = c.min_degree() {
            if d < 2 {
                rep.push("chen preserves I^2", &[k], format!("term of degree {d}"));
            }
        }
    }
    if b.chen.homogeneous_parity() != Some(true) && !b.chen.is_zero() {
        rep.push("chen is odd", &[], "mixed or even parity");
    }
    let lambda = euler_eigenvalue(&b.chen);
    if lambda.is_none() {
        rep.push("[E, chen] = lambda chen", &[], "chen is not an eigenvector");
    }
    for mu in &b.products {
        let n = mu.arity();
        for (t, x) in mu.entries() {
            let want = mu.is_odd() ^ parity_of(t, &ring.odd);
            if x.homogeneous_parity() != Some(want) {
                rep.push(&format!("parity of mu_{n}"), t, "entry has the wrong parity");
            }
        }
        let d = bundle_delta(b, mu);
        let defect = if n == 2 { d } else { bundle_lambda(b, n).sub(&d) };
        for (t, x) in defect.entries() {
            let name = if n == 2 { "delta mu_2 = 0".to_string() } else { format!("Lambda_{n} = delta mu_{n}") };
            rep.push(&name, t, x.display());
        }
    }
    rep.extend(euler_homogeneity(b));
    if let (Some(e), Some(u)) = (&b.unit_field, b.cohomology.unit_class) {
        let de = delta_action(&b.chen, e);
        if !de.is_zero() {
            rep.push("delta e = 0", &[u], de.display());
        }
        for mu in &b.products {
            let n = mu.arity();
            for t in tuples(h, n - 1) {
                for pos in 0..n {
                    let mut full = t[..pos].to_vec();
                    full.push(u);
                    full.extend_from_slice(&t[pos..]);
                    let got = mu.get(&full);
                    if n == 2 {
                        let want = Derivation::coordinate(ring, t[0]);
                        if *got != want {
                            let clause = if pos == 0 { "mu_2(e, X) = X" } else { "mu_2(X, e) = X" };
                            rep.push(clause, &full, got.sub(&want).display());
                        }
                    } else if !got.is_zero() {
                        rep.push(&format!("mu_{n}(.., e, ..) = 0"), &full, got.display());
                    }
                }
            }
        }
    }
    FinfReport { report: rep, lambda }
}

/// Signed shuffle sums Σ_σ sgn(σ)ε(σ) μₙ(X_{σ(1)}…X_{σ(n)}) over (p, q)-shuffles,
/// recorded as informational entries when nonzero.
pub fn shuffle_defects(b: &FInfinityBundle) -> Report {
    let mut rep = Report::new();
    let h = b.ring.nvars();
    for mu in &b.products {
        let n = mu.arity();
        for p in 1..n {
            let shuffles = shuffles(p, n - p);
            for t in tuples(h, n) {
                let par: Vec<bool> = t.iter().map(|&i| b.ring.odd[i]).collect();
                let mut sum = Derivation::zero(&b.ring);
                for sigma in &shuffles {
                    let permuted: Vec<usize> = sigma.iter().map(|&k| t[k]).collect();
                    let s = koszul_sign(sigma, &par).expect("same length");
                    sum.add_scaled_value(mu.get(&permuted), &Rational::from_int(s as i64));
                }
                if !sum.is_zero() {
                    rep.push_info(&format!("mu_{n} vanishes on ({p},{}) shuffles", n - p), &t, sum.display());
                }
            }
        }
    }
    rep
}

/// (p, q)-shuffles as sequences of positions: σ interleaves 0..p and p..p+q.
fn shuffles(p: usize, q: usize) -> Vec<Vec<usize>> {
    let n = p + q;
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != p {
            continue;
        }
        let (mut a, mut b) = (0, p);
        let mut s = Vec::with_capacity(n);
        for k in 0..n {
            if mask & (1 << k) != 0 {
                s.push(a);
                a += 1;
            } else {
                s.push(b);
                b += 1;
            }
        }
        out.push(s);
    }
    out
}

/// Outcome of recomputing μ₂ after a random gauge transformation.
#[derive(Clone, Debug)]
pub struct GaugeCheck {
    pub seed: u64,
    /// The transformed Γ still solves the Master equation with the same ∂.
    pub master_holds: bool,
    /// μ₂ recomputed from Γ^g is bit-identical to μ₂.
    pub mu2_identical: bool,
    /// δ(μ₂^g − μ₂) = 0.
    pub difference_closed: bool,
}

/// A random odd g ∈ g ⊗ I of total degree 1 with small integer coefficients.
pub fn random_gauge(spec: &AlgebraSpec, ring: &Arc<CoordinateRing>, seed: u64) -> GElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = ring.nvars();
    let mut g = GElement::zero(ring, spec.dim());
    let mut monos: Vec<Monomial> = Vec::new();
    for deg in 1..=ring.truncation.min(2) {
        for t in tuples(h, deg) {
            if t.windows(2).any(|w| w[0] > w[1]) {
                continue;
            }
            if let Some((m, _)) = Monomial::from_indices(h, &t, &ring.odd) {
                monos.push(m);
            }
        }
    }
    for a in 0..spec.dim() {
        for m in &monos {
            if m.weight(&ring.weights) + spec.basis.degrees[a] != 1 {
                continue;
            }
            let c: i64 = rng.gen_range(-2..=2);
            if c != 0 {
                g.component_mut(a).add_term(m.clone(), Rational::from_int(c));
            }
        }
    }
    g
}

/// The untransformed data a run of gauge trials compares against.
#[derive(Clone, Debug)]
pub struct GaugeProbe {
    spec: AlgebraSpec,
    splitting: Splitting,
    sol: MasterSolution,
    base: TangentComplex,
    mu2: TangentTensor,
}

impl GaugeProbe {
    pub fn new(spec: &AlgebraSpec, n: usize) -> Result<Self, TangentError> {
        let splitting = build_splitting(spec)?;
        let sol = chen_solve(spec, &splitting, n + 1)?;
        let base = TangentComplex::new(spec, &splitting, &sol)?;
        let (mu2, _) = base.induce_mu2()?;
        Ok(GaugeProbe { spec: spec.clone(), splitting, sol, base, mu2 })
    }

    /// Gauge-transform by the random g of `seed` and recompute μ₂.
    pub fn check(&self, seed: u64) -> Result<GaugeCheck, TangentError> {
        let spec = &self.spec;
        let g = random_gauge(spec, self.sol.ring(), seed);
        let gamma = gauge_transform(spec, &self.sol.gamma, &self.sol.chen, &g)?;
        let master_holds = master_residual(spec, &gamma, &self.sol.chen)?.is_zero();
        let gauged =
            MasterSolution { gamma, normalization: crate::master::Normalization::External, ..self.sol.clone() };
        let moved = TangentComplex::new(spec, &self.splitting, &gauged)?;
        let (mu2g, _) = moved.induce_mu2()?;
        let diff = mu2g.sub(&self.mu2);
        let difference_closed = self.base.delta_tensor(&diff).is_zero();
        Ok(GaugeCheck { seed, master_holds, mu2_identical: diff.is_zero(), difference_closed })
    }
}

/// Gauge-transform the solution by a random g and compare the induced μ₂.
pub fn gauge_mu2_check(spec: &AlgebraSpec, n: usize, seed: u64) -> Result<GaugeCheck, TangentError> {
    GaugeProbe::new(spec, n)?.check(seed)
}

/// The induced product at t = 0 in class coordinates: μ₂(∂ᵢ, ∂ⱼ)|_{t=0}.
pub fn mu2_at_origin(mu2: &TangentTensor, i: usize, j: usize) -> Vec<Rational> {
    let x = mu2.get(&[i, j]);
    let one = Monomial::one(x.ring().nvars());
    x.coeffs().iter().map(|c| c.coeff(&one)).collect()
}

/// Cohomology product p(rᵢ·rⱼ) computed directly on representatives.
pub fn cohomology_product(spec: &AlgebraSpec, s: &Splitting, i: usize, j: usize) -> Vec<Rational> {
    s.p.apply(&spec.dot_vec(&s.i.column(i), &s.i.column(j)))
}
