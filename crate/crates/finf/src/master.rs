//! Versal solutions of the Master equation dΓ + ∂⃗Γ + ½[Γ•Γ] = 0.
//!
//! Operations extend to g ⊗ k[[t]] with the series written on the left:
//! a linear map L acts by L(f a) = (−1)^{L̃ f̃} f L(a), the bracket by
//! [f a • h b] = (−1)^{h̃(ã+1)} f h [a•b] and the product by
//! (f a)·(h b) = (−1)^{h̃ ã} f h (a·b).

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::algebras::{AlgebraSpec, Report, SparseTensor, Vector};
use crate::exactq::{Matrix, Rational};
use crate::graded::{CoordinateRing, Derivation, Monomial, TruncatedSeries};
use crate::splitting::{CohomologyBasis, Splitting};

/// An element of V ⊗ k[[t]]/I^{N+1}, one series per basis vector of V.
#[derive(Clone, PartialEq, Eq)]
pub struct GElement {
    ring: Arc<CoordinateRing>,
    comps: Vec<TruncatedSeries>,
}

impl fmt::Debug for GElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GElement{:?}", self.comps)
    }
}

impl GElement {
    pub fn zero(ring: &Arc<CoordinateRing>, dim: usize) -> Self {
        GElement { ring: ring.clone(), comps: vec![TruncatedSeries::zero(ring); dim] }
    }

    pub fn from_components(ring: &Arc<CoordinateRing>, comps: Vec<TruncatedSeries>) -> Self {
        GElement { ring: ring.clone(), comps }
    }

    /// f·v for a constant vector v.
    pub fn from_vector(ring: &Arc<CoordinateRing>, v: &[Rational], f: &TruncatedSeries) -> Self {
        GElement { ring: ring.clone(), comps: v.iter().map(|c| f.scale(c)).collect() }
    }

    /// A constant element.
    pub fn constant(ring: &Arc<CoordinateRing>, v: &[Rational]) -> Self {
        GElement::from_vector(ring, v, &TruncatedSeries::one(ring))
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn ring(&self) -> &Arc<CoordinateRing> {
        &self.ring
    }

    pub fn components(&self) -> &[TruncatedSeries] {
        &self.comps
    }

    pub fn component(&self, a: usize) -> &TruncatedSeries {
        &self.comps[a]
    }

    pub fn component_mut(&mut self, a: usize) -> &mut TruncatedSeries {
        &mut self.comps[a]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(TruncatedSeries::is_zero)
    }

    fn map(&self, f: impl Fn(&TruncatedSeries) -> TruncatedSeries) -> GElement {
        GElement { ring: self.ring.clone(), comps: self.comps.iter().map(f).collect() }
    }

    pub fn add(&self, other: &GElement) -> GElement {
        GElement { ring: self.ring.clone(), comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, other: &GElement) -> GElement {
        GElement { ring: self.ring.clone(), comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn add_assign(&mut self, other: &GElement) {
        assert_eq!(self.dim(), other.dim());
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            a.add_assign(b);
        }
    }

    pub fn add_scaled(&mut self, other: &GElement, s: &Rational) {
        assert_eq!(self.dim(), other.dim());
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            a.add_scaled(b, s);
        }
    }

    pub fn scale(&self, s: &Rational) -> GElement {
        self.map(|a| a.scale(s))
    }

    pub fn neg(&self) -> GElement {
        self.map(TruncatedSeries::neg)
    }

    /// f·X, f on the left.
    pub fn mul_left(&self, f: &TruncatedSeries) -> GElement {
        self.map(|a| f.mul(a))
    }

    pub fn degree_part(&self, k: usize) -> GElement {
        self.map(|a| a.degree_part(k))
    }

    pub fn truncated(&self, k: usize) -> GElement {
        self.map(|a| a.truncated(k))
    }

    pub fn reduce_to(&self, ring: &Arc<CoordinateRing>) -> GElement {
        GElement { ring: ring.clone(), comps: self.comps.iter().map(|a| a.reduce_to(ring)).collect() }
    }

    pub fn parity_twist(&self) -> GElement {
        self.map(TruncatedSeries::parity_twist)
    }

    /// Coefficient vector of a monomial.
    pub fn coefficient(&self, m: &Monomial) -> Vector {
        self.comps.iter().map(|c| c.coeff(m)).collect()
    }

    /// All monomials that occur in some component, in ring order.
    pub fn monomials(&self) -> Vec<Monomial> {
        let mut set = std::collections::BTreeSet::new();
        for c in &self.comps {
            for (m, _) in c.terms() {
                set.insert(m.clone());
            }
        }
        set.into_iter().collect()
    }

    /// Total parity of every term, if uniform; basis parities in `odd`.
    pub fn total_parity(&self, odd: &[bool]) -> Option<bool> {
        let mut seen: Option<bool> = None;
        for (a, c) in self.comps.iter().enumerate() {
            for (m, _) in c.terms() {
                let p = m.is_odd(&self.ring.odd) ^ odd[a];
                match seen {
                    None => seen = Some(p),
                    Some(q) if q != p => return None,
                    _ => {}
                }
            }
        }
        Some(seen.unwrap_or(false))
    }

    /// L(X) for a constant matrix L of the given parity.
    pub fn apply_matrix(&self, m: &Matrix, odd: bool) -> GElement {
        assert_eq!(m.cols(), self.dim());
        let src: Vec<TruncatedSeries> =
            if odd { self.comps.iter().map(TruncatedSeries::parity_twist).collect() } else { self.comps.clone() };
        let mut out = GElement::zero(&self.ring, m.rows());
        for r in 0..m.rows() {
            for (c, s) in src.iter().enumerate() {
                let x = &m[(r, c)];
                if !x.is_zero() && !s.is_zero() {
                    out.comps[r].add_scaled(s, x);
                }
            }
        }
        out
    }

    /// Arity-1 tensor action.
    pub fn apply_tensor(&self, t: &SparseTensor, dim_out: usize, odd: bool) -> GElement {
        let mut out = GElement::zero(&self.ring, dim_out);
        for (ins, row) in t.rows() {
            let s = &self.comps[ins[0]];
            if s.is_zero() {
                continue;
            }
            let s = if odd { s.parity_twist() } else { s.clone() };
            for (o, c) in row {
                out.comps[*o].add_scaled(&s, c);
            }
        }
        out
    }

    pub fn d(&self, spec: &AlgebraSpec) -> GElement {
        self.apply_tensor(&spec.differential, spec.dim(), true)
    }

    /// ∂⃗X: the vector field acting on every component.
    pub fn arrow(&self, v: &Derivation) -> GElement {
        self.map(|a| v.apply(a))
    }

    /// [X•Y]
    pub fn bracket(&self, spec: &AlgebraSpec, other: &GElement) -> GElement {
        // twist h when ã + 1 is odd, i.e. a even
        let odd = spec.odd_mask();
        self.pair(other, &spec.bracket, spec.dim(), |a| !odd[a])
    }

    /// X·Y
    pub fn dot(&self, spec: &AlgebraSpec, other: &GElement) -> GElement {
        let odd = spec.odd_mask();
        match &spec.dot {
            Some(t) => self.pair(other, t, spec.dim(), |a| odd[a]),
            None => GElement::zero(&self.ring, spec.dim()),
        }
    }

    fn pair(&self, other: &GElement, t: &SparseTensor, dim: usize, twist: impl Fn(usize) -> bool) -> GElement {
        let mut out = GElement::zero(&self.ring, dim);
        let twisted: Vec<TruncatedSeries> = other.comps.iter().map(TruncatedSeries::parity_twist).collect();
        for (ins, row) in t.rows() {
            let (a, b) = (ins[0], ins[1]);
            let f = &self.comps[a];
            if f.is_zero() || other.comps[b].is_zero() {
                continue;
            }
            let h = if twist(a) { &twisted[b] } else { &other.comps[b] };
            let prod = f.mul(h);
            if prod.is_zero() {
                continue;
            }
            for (o, c) in row {
                out.comps[*o].add_scaled(&prod, c);
            }
        }
        out
    }

    /// First nonzero (component, monomial, coefficient), for diagnostics.
    pub fn first_nonzero(&self) -> Option<(usize, Monomial, Rational)> {
        let mut best: Option<(usize, Monomial, Rational)> = None;
        for (a, c) in self.comps.iter().enumerate() {
            if let Some((m, v)) = c.terms().next() {
                if best.as_ref().map_or(true, |(_, bm, _)| m < bm) {
                    best = Some((a, m.clone(), v.clone()));
                }
            }
        }
        best
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MasterError {
    #[error("element is not even: component {0} has a term of the wrong parity")]
    Parity(usize),
    #[error("element is not in the maximal ideal: component {0} has a constant term")]
    NotInMaximalIdeal(usize),
    #[error("order {order}: residual does not vanish ({detail})")]
    Inconsistent { order: usize, detail: String },
    #[error("{0}")]
    Splitting(#[from] crate::splitting::SplittingError),
    #[error("{0}")]
    Input(String),
}

fn check_parity(spec: &AlgebraSpec, x: &GElement, want_odd: bool) -> Result<(), MasterError> {
    let odd = spec.odd_mask();
    for (a, c) in x.components().iter().enumerate() {
        for (m, _) in c.terms() {
            if (m.is_odd(&x.ring().odd) ^ odd[a]) != want_odd {
                return Err(MasterError::Parity(a));
            }
        }
    }
    Ok(())
}

fn check_maximal(x: &GElement) -> Result<(), MasterError> {
    for (a, c) in x.components().iter().enumerate() {
        if c.min_degree() == Some(0) {
            return Err(MasterError::NotInMaximalIdeal(a));
        }
    }
    Ok(())
}

/// dΓ + ∂⃗Γ + ½[Γ•Γ] mod I^{N+1}.
pub fn master_residual(spec: &AlgebraSpec, gamma: &GElement, chen: &Derivation) -> Result<GElement, MasterError> {
    check_parity(spec, gamma, false)?;
    Ok(residual_unchecked(spec, gamma, chen))
}

fn residual_unchecked(spec: &AlgebraSpec, gamma: &GElement, chen: &Derivation) -> GElement {
    let mut r = gamma.d(spec);
    r.add_assign(&gamma.arrow(chen));
    r.add_scaled(&gamma.bracket(spec, gamma), &Rational::new(1, 2));
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// φ(Γ_[n]) = 0 for n ≥ 2.
    PhiNormalized,
    /// Output of the splitting recursion (identical data, different entry point).
    SplittingRecursion,
    /// Supplied from outside, e.g. the canonical formal pair or a gauge transform.
    External,
}

#[derive(Clone, Debug)]
pub struct MasterSolution {
    pub gamma: GElement,
    pub chen: Derivation,
    pub truncation: usize,
    pub normalization: Normalization,
    pub cohomology: CohomologyBasis,
}

impl MasterSolution {
    pub fn ring(&self) -> &Arc<CoordinateRing> {
        self.gamma.ring()
    }

    /// The same solution mod I^{M+1}, M ≤ N.
    pub fn reduce(&self, m: usize) -> MasterSolution {
        let ring = self.ring().with_truncation(m);
        MasterSolution {
            gamma: self.gamma.reduce_to(&ring),
            chen: self.chen.reduce_to(&ring),
            truncation: m,
            normalization: self.normalization,
            cohomology: self.cohomology.clone(),
        }
    }
}

/// Γ_[1] = Σ tⁱ rᵢ over the representatives.
pub fn linear_part(ring: &Arc<CoordinateRing>, s: &Splitting) -> GElement {
    let n = s.i.rows();
    let mut g = GElement::zero(ring, n);
    for (k, class) in s.cohomology.classes.iter().enumerate() {
        g.add_assign(&GElement::from_vector(ring, &class.representative, &TruncatedSeries::var(ring, k)));
    }
    g
}

/// Versal solution by the order-by-order construction: at order m with
/// ψ = [dΓ + ∂⃗Γ + ½[Γ•Γ]]_[m], set ∂_[m]tᵏ = −(pψ)ᵏ and Γ_[m] = −q(ψ − ipψ).
pub fn chen_solve(spec: &AlgebraSpec, s: &Splitting, n: usize) -> Result<MasterSolution, MasterError> {
    if n < 1 {
        return Err(MasterError::Input("truncation must be at least 1".into()));
    }
    let ring = s.cohomology.coordinate_ring(n);
    let mut gamma = linear_part(&ring, s);
    let mut chen = Derivation::zero(&ring);
    let lin = residual_unchecked(spec, &gamma, &chen).degree_part(1);
    if !lin.is_zero() {
        return Err(MasterError::Inconsistent { order: 1, detail: "representatives are not closed".into() });
    }
    for m in 2..=n {
        let psi = residual_unchecked(spec, &gamma, &chen).degree_part(m);
        let ppsi = psi.apply_matrix(&s.p, false);
        let ippsi = ppsi.apply_matrix(&s.i, false);
        let gm = psi.sub(&ippsi).apply_matrix(&s.q, true).neg();
        for k in 0..ppsi.dim() {
            chen.coeff_mut(k).add_scaled(ppsi.component(k), &Rational::from_int(-1));
        }
        gamma.add_assign(&gm);
        let check = residual_unchecked(spec, &gamma, &chen).degree_part(m);
        if let Some((a, mono, c)) = check.first_nonzero() {
            return Err(MasterError::Inconsistent {
                order: m,
                detail: format!("component {} monomial {:?} coefficient {}", spec.basis.names[a], mono, c),
            });
        }
    }
    Ok(MasterSolution {
        gamma,
        chen,
        truncation: n,
        normalization: Normalization::PhiNormalized,
        cohomology: s.cohomology.clone(),
    })
}

/// What the printed splitting recursion, taken literally, produces.
#[derive(Clone, Debug)]
pub struct LiteralRecursionReport {
    pub gamma: GElement,
    pub chen: Derivation,
    /// Orders at which the literal pair has a nonzero Master residual.
    pub failing_orders: Vec<usize>,
    /// Whether the literal Γ_[2] agrees with the corrected one.
    pub second_order_agrees: bool,
}

/// The splitting-recursion entry point. The solution is the corrected
/// recursion (identical to `chen_solve`); the report describes the literal
/// iterate Γ_[n] = −½ q Σ [Γ_[k]•Γ_[n−k]] with ∂⃗pΓ_[1] = −½ p[Γ•Γ].
pub fn split_solve(
    spec: &AlgebraSpec,
    s: &Splitting,
    n: usize,
) -> Result<(MasterSolution, LiteralRecursionReport), MasterError> {
    let mut sol = chen_solve(spec, s, n)?;
    sol.normalization = Normalization::SplittingRecursion;
    let ring = sol.ring().clone();
    let mut parts: Vec<GElement> = vec![GElement::zero(&ring, spec.dim()), linear_part(&ring, s)];
    let half = Rational::new(-1, 2);
    for m in 2..=n {
        let mut acc = GElement::zero(&ring, spec.dim());
        for k in 1..m {
            acc.add_assign(&parts[k].bracket(spec, &parts[m - k]).degree_part(m));
        }
        parts.push(acc.apply_matrix(&s.q, true).scale(&half));
    }
    let mut gamma = GElement::zero(&ring, spec.dim());
    for p in &parts {
        gamma.add_assign(p);
    }
    let pb = gamma.bracket(spec, &gamma).apply_matrix(&s.p, false).scale(&half);
    let chen = Derivation::from_coeffs(&ring, pb.components().iter().map(|c| c.truncated(n)).collect());
    let res = residual_unchecked(spec, &gamma, &chen);
    let failing_orders = (0..=n).filter(|&k| !res.degree_part(k).is_zero()).collect();
    let second_order_agrees = gamma.degree_part(2) == sol.gamma.degree_part(2);
    Ok((sol, LiteralRecursionReport { gamma, chen, failing_orders, second_order_agrees }))
}

/// Γ^g = e^{ad_g}Γ − Σ_k ad_g^k/(k+1)! (d + ∂⃗)g, with ad_g x = [g•x].
pub fn gauge_transform(
    spec: &AlgebraSpec,
    gamma: &GElement,
    chen: &Derivation,
    g: &GElement,
) -> Result<GElement, MasterError> {
    check_parity(spec, g, true)?;
    check_maximal(g)?;
    let mut out = gamma.clone();
    let mut term = gamma.clone();
    let mut k = 1i64;
    loop {
        term = g.bracket(spec, &term).scale(&Rational::new(1, k));
        if term.is_zero() {
            break;
        }
        out.add_assign(&term);
        k += 1;
    }
    let mut term = g.d(spec).add(&g.arrow(chen));
    let mut k = 1i64;
    loop {
        if term.is_zero() {
            break;
        }
        // term = ad^{k−1}(d+∂⃗)g / k!
        out.add_scaled(&term, &Rational::from_int(-1));
        k += 1;
        term = g.bracket(spec, &term).scale(&Rational::new(1, k));
    }
    Ok(out)
}

/// ∂Γ/∂t^{i₀} = e₀ and no Chen coefficient depends on t^{i₀}.
pub fn verify_unit_normalization(spec: &AlgebraSpec, sol: &MasterSolution) -> Report {
    let mut rep = Report::new();
    let Some(u) = spec.unit else {
        rep.push("unit present", &[], "the algebra has no unit");
        return rep;
    };
    let pos = sol.cohomology.classes.iter().position(|c| c.representative == spec.e(u));
    let Some(i0) = pos else {
        rep.push("unit is a representative", &[u], "no class is represented by the unit");
        return rep;
    };
    let ring = sol.ring();
    let e = Derivation::coordinate(ring, i0);
    let want = GElement::constant(ring, &spec.e(u));
    let got = sol.gamma.arrow(&e);
    if got != want {
        rep.push("unit direction of Gamma is the unit", &[i0], format!("{:?}", got.sub(&want).first_nonzero()));
    }
    for (k, c) in sol.chen.coeffs().iter().enumerate() {
        let dc = e.apply(c);
        if !dc.is_zero() {
            rep.push("Chen field independent of the unit coordinate", &[k], dc.to_string());
        }
    }
    rep
}

/// Generators ∂tⁱ of the ideal of zeros of ∂ (mod I^{N+1}).
pub fn kuranishi_ideal(sol: &MasterSolution) -> Vec<TruncatedSeries> {
    sol.chen.coeffs().to_vec()
}

/// −½ Σ (−1)^{j̃(ĩ+1)} tⁱtʲ C_{ij}^k ∂/∂tᵏ scaled by `scale`/(−½); with
/// scale = 1 this is the quadratic field as displayed without the −½.
pub fn formal_quadratic_field(spec: &AlgebraSpec, ring: &Arc<CoordinateRing>, scale: &Rational) -> Derivation {
    let n = spec.dim();
    assert_eq!(ring.nvars(), n);
    let mut coeffs = vec![TruncatedSeries::zero(ring); n];
    for (ins, row) in spec.bracket.rows() {
        let (i, j) = (ins[0], ins[1]);
        let ti = TruncatedSeries::var(ring, i);
        let tj = TruncatedSeries::var(ring, j);
        let mono = ti.mul(&tj);
        if mono.is_zero() {
            continue;
        }
        let neg = spec.is_odd(j) && !spec.is_odd(i);
        for (k, c) in row {
            coeffs[*k].add_scaled(&mono, &(c * scale).signed(neg));
        }
    }
    Derivation::from_coeffs(ring, coeffs)
}

/// The canonical pair for a Lie structure with zero differential:
/// Γ = Σ tⁱ eᵢ and ∂ = −½ Σ (−1)^{j̃(ĩ+1)} tⁱtʲ C_{ij}^k ∂/∂tᵏ.
pub fn canonical_formal_solution(spec: &AlgebraSpec, n: usize) -> Result<MasterSolution, MasterError> {
    if !spec.differential.is_zero() {
        return Err(MasterError::Input("the differential is not zero".into()));
    }
    let rep = crate::algebras::validate_dlie(spec);
    if let Some(v) = rep.failures().next() {
        return Err(MasterError::Input(format!("{} fails at {:?}", v.identity, v.indices)));
    }
    let classes = (0..spec.dim())
        .map(|a| crate::splitting::CohomologyClass {
            name: spec.basis.names[a].clone(),
            degree: spec.basis.degrees[a],
            representative: spec.e(a),
        })
        .collect();
    let cohomology = CohomologyBasis { classes, unit_class: spec.unit };
    let ring = cohomology.coordinate_ring(n);
    let mut gamma = GElement::zero(&ring, spec.dim());
    for a in 0..spec.dim() {
        *gamma.component_mut(a) = TruncatedSeries::var(&ring, a);
    }
    let chen = formal_quadratic_field(spec, &ring, &Rational::new(-1, 2));
    Ok(MasterSolution { gamma, chen, truncation: n, normalization: Normalization::External, cohomology })
}

/// λ with [E, ∂] = λ∂, if ∂ is an eigenvector; None when it is not.
/// A zero field reports Some(0).
pub fn euler_eigenvalue(chen: &Derivation) -> Option<Rational> {
    let e = Derivation::euler(chen.ring());
    let c = e.commutator(chen);
    let mut lambda: Option<Rational> = None;
    for (k, coeff) in chen.coeffs().iter().enumerate() {
        for (m, v) in coeff.terms() {
            let w = c.coeff(k).coeff(m);
            let l = &w / v;
            match &lambda {
                None => lambda = Some(l),
                Some(x) if *x != l => return None,
                _ => {}
            }
        }
    }
    match lambda {
        None => Some(Rational::zero()),
        Some(l) => {
            if c == chen.scale(&l) {
                Some(l)
            } else {
                None
            }
        }
    }
}

/// ∂² on every coordinate; all zero iff ∂² = 0.
pub fn chen_square(sol: &MasterSolution) -> Vec<TruncatedSeries> {
    sol.chen.square_on_coordinates()
}
