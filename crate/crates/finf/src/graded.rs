//! Graded bookkeeping: Koszul signs and the truncated super-commutative
//! coordinate ring k[[t]]/I^{N+1} of the cohomology supermanifold.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

use crate::exactq::Rational;

/// Parity of an integer degree.
pub fn parity(deg: i64) -> bool {
    deg.rem_euclid(2) == 1
}

/// An ordered list of named, Z-graded basis vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GradedBasis {
    pub names: Vec<String>,
    pub degrees: Vec<i64>,
}

impl GradedBasis {
    pub fn new(elements: Vec<(String, i64)>) -> Result<Self, GradedError> {
        let mut seen = std::collections::HashSet::new();
        for (n, _) in &elements {
            if !seen.insert(n.clone()) {
                return Err(GradedError::DuplicateName(n.clone()));
            }
        }
        let (names, degrees) = elements.into_iter().unzip();
        Ok(GradedBasis { names, degrees })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn is_odd(&self, i: usize) -> bool {
        parity(self.degrees[i])
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GradedError {
    #[error("duplicate basis name {0:?}")]
    DuplicateName(String),
    #[error("series belong to different coordinate rings")]
    RingMismatch,
    #[error("permutation and parity list differ in length")]
    LengthMismatch,
}

/// Sign s with v_{σ(1)}∧…∧v_{σ(n)} = s · v_1∧…∧v_n in the super-exterior
/// algebra, i.e. (−1)^{σ̃} e(σ). `perm[k]` is σ(k+1)−1.
pub fn koszul_sign(perm: &[usize], parities: &[bool]) -> Result<i32, GradedError> {
    sorting_sign(perm, parities, true)
}

/// The pure Koszul sign e(σ) of the super-symmetric algebra.
pub fn symmetric_sign(perm: &[usize], parities: &[bool]) -> Result<i32, GradedError> {
    sorting_sign(perm, parities, false)
}

fn sorting_sign(perm: &[usize], parities: &[bool], wedge: bool) -> Result<i32, GradedError> {
    if perm.len() != parities.len() {
        return Err(GradedError::LengthMismatch);
    }
    let mut seq = perm.to_vec();
    let mut odd = false;
    // bubble sort; each adjacent swap of (a, b) costs (−1)^{p_a p_b}, times −1 for ∧
    for i in 0..seq.len() {
        for j in 0..seq.len() - 1 - i {
            if seq[j] > seq[j + 1] {
                let (a, b) = (seq[j], seq[j + 1]);
                odd ^= parities[a] && parities[b];
                odd ^= wedge;
                seq.swap(j, j + 1);
            }
        }
    }
    Ok(if odd { -1 } else { 1 })
}

/// Coordinates tⁱ dual to a cohomology basis: weight 2 − deg(eᵢ), parity of eᵢ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoordinateRing {
    pub names: Vec<String>,
    pub weights: Vec<i64>,
    pub odd: Vec<bool>,
    pub truncation: usize,
}

impl CoordinateRing {
    /// Ring for cohomology classes of the given degrees.
    pub fn for_degrees(names: Vec<String>, degrees: &[i64], truncation: usize) -> Arc<Self> {
        assert!(truncation >= 1, "truncation must be at least 1");
        assert_eq!(names.len(), degrees.len());
        Arc::new(CoordinateRing {
            names,
            weights: degrees.iter().map(|d| 2 - d).collect(),
            odd: degrees.iter().map(|&d| parity(d)).collect(),
            truncation,
        })
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    /// Same variables, different truncation.
    pub fn with_truncation(&self, truncation: usize) -> Arc<Self> {
        Arc::new(CoordinateRing { truncation, ..self.clone() })
    }

    pub fn same_variables(&self, other: &CoordinateRing) -> bool {
        self.names == other.names && self.weights == other.weights && self.odd == other.odd
    }
}

fn same_ring(a: &Arc<CoordinateRing>, b: &Arc<CoordinateRing>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A monomial ∏ (tⁱ)^{eᵢ} in canonical (increasing index) order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: SmallVec<[u8; 16]>,
    degree: u32,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial { exps: SmallVec::from_elem(0, nvars), degree: 0 }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = Monomial::one(nvars);
        m.exps[i] = 1;
        m.degree = 1;
        m
    }

    pub fn from_exponents(exps: &[u8]) -> Self {
        Monomial { exps: SmallVec::from_slice(exps), degree: exps.iter().map(|&e| e as u32).sum() }
    }

    /// Build from a list of variable indices (in any order); the Koszul sign
    /// of sorting them is returned alongside, or None if an odd variable repeats.
    pub fn from_indices(nvars: usize, idx: &[usize], odd: &[bool]) -> Option<(Monomial, bool)> {
        let mut m = Monomial::one(nvars);
        let mut sign = false;
        for (k, &i) in idx.iter().enumerate() {
            if odd[i] {
                if m.exps[i] > 0 {
                    return None;
                }
                sign ^= idx[..k].iter().filter(|&&j| j > i && odd[j]).count() % 2 == 1;
            }
            m.exps[i] += 1;
        }
        m.degree = idx.len() as u32;
        Some((m, sign))
    }

    pub fn exponents(&self) -> &[u8] {
        &self.exps
    }

    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    pub fn exp(&self, i: usize) -> u8 {
        self.exps[i]
    }

    pub fn is_odd(&self, odd: &[bool]) -> bool {
        self.exps.iter().zip(odd).filter(|(e, o)| **o && **e > 0).count() % 2 == 1
    }

    pub fn weight(&self, weights: &[i64]) -> i64 {
        self.exps.iter().zip(weights).map(|(&e, &w)| e as i64 * w).sum()
    }

    /// Indices with multiplicity, increasing.
    pub fn indices(&self) -> Vec<usize> {
        let mut v = Vec::with_capacity(self.degree());
        for (i, &e) in self.exps.iter().enumerate() {
            for _ in 0..e {
                v.push(i);
            }
        }
        v
    }

    /// Product with its Koszul sign (true = negative), or None if it vanishes.
    pub fn mul(&self, other: &Monomial, odd: &[bool]) -> Option<(Monomial, bool)> {
        let mut sign = false;
        let mut odd_above = 0usize;
        let n = self.exps.len();
        for i in (0..n).rev() {
            if odd[i] {
                if self.exps[i] > 0 && other.exps[i] > 0 {
                    return None;
                }
                if other.exps[i] > 0 && odd_above % 2 == 1 {
                    sign = !sign;
                }
                if self.exps[i] > 0 {
                    odd_above += 1;
                }
            }
        }
        let mut exps = self.exps.clone();
        for i in 0..n {
            exps[i] += other.exps[i];
        }
        Some((Monomial { exps, degree: self.degree + other.degree }, sign))
    }

    /// Left partial derivative ∂/∂tⁱ: (coefficient factor, sign, result).
    pub fn partial(&self, i: usize, odd: &[bool]) -> Option<(u8, bool, Monomial)> {
        let e = self.exps[i];
        if e == 0 {
            return None;
        }
        let sign = odd[i] && (0..i).filter(|&j| odd[j] && self.exps[j] > 0).count() % 2 == 1;
        let mut m = self.clone();
        m.exps[i] -= 1;
        m.degree -= 1;
        Some((e, sign, m))
    }

    pub fn display(&self, names: &[String]) -> String {
        if self.degree == 0 {
            return "1".into();
        }
        let mut parts = Vec::new();
        for (i, &e) in self.exps.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(names[i].clone()),
                _ => parts.push(format!("{}^{}", names[i], e)),
            }
        }
        parts.join("*")
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{:?}", self.exps.as_slice())
    }
}

/// An element of k[[t]]/I^{N+1}.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    ring: Arc<CoordinateRing>,
    terms: BTreeMap<Monomial, Rational>,
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                if m.degree() == 0 {
                    c.to_string()
                } else if c.is_one() {
                    m.display(&self.ring.names)
                } else {
                    format!("{}*{}", c, m.display(&self.ring.names))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl TruncatedSeries {
    pub fn zero(ring: &Arc<CoordinateRing>) -> Self {
        TruncatedSeries { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ring: &Arc<CoordinateRing>, c: Rational) -> Self {
        let mut s = TruncatedSeries::zero(ring);
        s.add_term(Monomial::one(ring.nvars()), c);
        s
    }

    pub fn one(ring: &Arc<CoordinateRing>) -> Self {
        TruncatedSeries::constant(ring, Rational::one())
    }

    pub fn var(ring: &Arc<CoordinateRing>, i: usize) -> Self {
        let mut s = TruncatedSeries::zero(ring);
        s.add_term(Monomial::var(ring.nvars(), i), Rational::one());
        s
    }

    pub fn from_terms(ring: &Arc<CoordinateRing>, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut s = TruncatedSeries::zero(ring);
        for (m, c) in terms {
            s.add_term(m, c);
        }
        s
    }

    pub fn ring(&self) -> &Arc<CoordinateRing> {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Add c·m, dropping it if above the truncation.
    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() || m.degree() > self.ring.truncation {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check(&self, other: &TruncatedSeries) -> Result<(), GradedError> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(GradedError::RingMismatch)
        }
    }

    pub fn try_add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries, GradedError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn add(&self, other: &TruncatedSeries) -> TruncatedSeries {
        self.try_add(other).expect("ring mismatch")
    }

    pub fn add_assign(&mut self, other: &TruncatedSeries) {
        assert!(same_ring(&self.ring, &other.ring), "ring mismatch");
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// self += s·other
    pub fn add_scaled(&mut self, other: &TruncatedSeries, s: &Rational) {
        assert!(same_ring(&self.ring, &other.ring), "ring mismatch");
        if s.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c * s);
        }
    }

    pub fn sub(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let mut out = self.clone();
        out.add_scaled(other, &Rational::from_int(-1));
        out
    }

    pub fn neg(&self) -> TruncatedSeries {
        self.scale(&Rational::from_int(-1))
    }

    pub fn scale(&self, s: &Rational) -> TruncatedSeries {
        if s.is_zero() {
            return TruncatedSeries::zero(&self.ring);
        }
        TruncatedSeries { ring: self.ring.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect() }
    }

    pub fn try_mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries, GradedError> {
        self.check(other)?;
        Ok(self.mul_capped(other, self.ring.truncation))
    }

    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        self.try_mul(other).expect("ring mismatch")
    }

    /// Product keeping only total degree ≤ cap.
    pub fn mul_capped(&self, other: &TruncatedSeries, cap: usize) -> TruncatedSeries {
        assert!(same_ring(&self.ring, &other.ring), "ring mismatch");
        let cap = cap.min(self.ring.truncation);
        let mut out = TruncatedSeries::zero(&self.ring);
        for (m1, c1) in &self.terms {
            if m1.degree() > cap {
                break;
            }
            for (m2, c2) in &other.terms {
                if m1.degree() + m2.degree() > cap {
                    break;
                }
                if let Some((m, neg)) = m1.mul(m2, &self.ring.odd) {
                    out.add_term(m, (c1 * c2).signed(neg));
                }
            }
        }
        out
    }

    /// The involution f ↦ (−1)^{f̃} f.
    pub fn parity_twist(&self) -> TruncatedSeries {
        let odd = &self.ring.odd;
        TruncatedSeries {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.clone().signed(m.is_odd(odd)))).collect(),
        }
    }

    /// Split into (even, odd) parts.
    pub fn split_parity(&self) -> (TruncatedSeries, TruncatedSeries) {
        let mut e = TruncatedSeries::zero(&self.ring);
        let mut o = TruncatedSeries::zero(&self.ring);
        for (m, c) in &self.terms {
            if m.is_odd(&self.ring.odd) {
                o.terms.insert(m.clone(), c.clone());
            } else {
                e.terms.insert(m.clone(), c.clone());
            }
        }
        (e, o)
    }

    /// Some(parity) if every term has the same parity (zero counts as even).
    pub fn homogeneous_parity(&self) -> Option<bool> {
        let mut it = self.terms.keys().map(|m| m.is_odd(&self.ring.odd));
        let first = it.next().unwrap_or(false);
        if it.all(|p| p == first) {
            Some(first)
        } else {
            None
        }
    }

    pub fn degree_part(&self, k: usize) -> TruncatedSeries {
        TruncatedSeries {
            ring: self.ring.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.degree() == k).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Drop all terms of degree > k (staying in the same ring).
    pub fn truncated(&self, k: usize) -> TruncatedSeries {
        TruncatedSeries {
            ring: self.ring.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.degree() <= k).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Reduce into a ring with the same variables and a truncation no larger.
    pub fn reduce_to(&self, ring: &Arc<CoordinateRing>) -> TruncatedSeries {
        assert!(self.ring.same_variables(ring), "ring mismatch");
        TruncatedSeries {
            ring: ring.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.degree() <= ring.truncation).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().next().map(Monomial::degree)
    }

    pub fn partial(&self, i: usize) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(&self.ring);
        for (m, c) in &self.terms {
            if let Some((e, neg, r)) = m.partial(i, &self.ring.odd) {
                out.add_term(r, (c * &Rational::from_int(e as i64)).signed(neg));
            }
        }
        out
    }

    /// Substitute xᵃ ↦ images[a] (a parity-preserving ring map into another ring).
    pub fn substitute(&self, images: &[TruncatedSeries], target: &Arc<CoordinateRing>) -> TruncatedSeries {
        assert_eq!(images.len(), self.ring.nvars());
        let mut out = TruncatedSeries::zero(target);
        let mut powers: BTreeMap<(usize, u8), TruncatedSeries> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut acc = TruncatedSeries::constant(target, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = powers
                    .entry((i, e))
                    .or_insert_with(|| {
                        let mut p = TruncatedSeries::one(target);
                        for _ in 0..e {
                            p = p.mul(&images[i]);
                        }
                        p
                    })
                    .clone();
                acc = acc.mul(&p);
                if acc.is_zero() {
                    break;
                }
            }
            out.add_assign(&acc);
        }
        out
    }
}

pub fn series_add(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries, GradedError> {
    a.try_add(b)
}

pub fn series_mul(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries, GradedError> {
    a.try_mul(b)
}

pub fn series_scale(a: &TruncatedSeries, s: &Rational) -> TruncatedSeries {
    a.scale(s)
}

/// A formal vector field Σ Xⁱ(t) ∂/∂tⁱ, coefficients written on the left.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Derivation {
    ring: Arc<CoordinateRing>,
    coeffs: Vec<TruncatedSeries>,
}

impl Derivation {
    pub fn zero(ring: &Arc<CoordinateRing>) -> Self {
        Derivation { ring: ring.clone(), coeffs: vec![TruncatedSeries::zero(ring); ring.nvars()] }
    }

    pub fn from_coeffs(ring: &Arc<CoordinateRing>, coeffs: Vec<TruncatedSeries>) -> Self {
        assert_eq!(coeffs.len(), ring.nvars());
        assert!(coeffs.iter().all(|c| same_ring(c.ring(), ring)), "ring mismatch");
        Derivation { ring: ring.clone(), coeffs }
    }

    /// The constant field ∂/∂tⁱ.
    pub fn coordinate(ring: &Arc<CoordinateRing>, i: usize) -> Self {
        let mut d = Derivation::zero(ring);
        d.coeffs[i] = TruncatedSeries::one(ring);
        d
    }

    /// E = ½ Σ |tⁱ| tⁱ ∂/∂tⁱ.
    pub fn euler(ring: &Arc<CoordinateRing>) -> Self {
        let mut d = Derivation::zero(ring);
        for i in 0..ring.nvars() {
            d.coeffs[i] = TruncatedSeries::var(ring, i).scale(&Rational::new(ring.weights[i], 2));
        }
        d
    }

    pub fn ring(&self) -> &Arc<CoordinateRing> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[TruncatedSeries] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &TruncatedSeries {
        &self.coeffs[i]
    }

    pub fn coeff_mut(&mut self, i: usize) -> &mut TruncatedSeries {
        &mut self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(TruncatedSeries::is_zero)
    }

    pub fn add(&self, other: &Derivation) -> Derivation {
        Derivation { ring: self.ring.clone(), coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, other: &Derivation) -> Derivation {
        Derivation { ring: self.ring.clone(), coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, s: &Rational) -> Derivation {
        Derivation { ring: self.ring.clone(), coeffs: self.coeffs.iter().map(|a| a.scale(s)).collect() }
    }

    /// Left multiplication by a function: (f X)ⁱ = f Xⁱ.
    pub fn mul_left(&self, f: &TruncatedSeries) -> Derivation {
        Derivation { ring: self.ring.clone(), coeffs: self.coeffs.iter().map(|a| f.mul(a)).collect() }
    }

    pub fn truncated(&self, k: usize) -> Derivation {
        Derivation { ring: self.ring.clone(), coeffs: self.coeffs.iter().map(|a| a.truncated(k)).collect() }
    }

    pub fn reduce_to(&self, ring: &Arc<CoordinateRing>) -> Derivation {
        Derivation { ring: ring.clone(), coeffs: self.coeffs.iter().map(|a| a.reduce_to(ring)).collect() }
    }

    /// Split into (even, odd) parts; a term c·m ∂ᵢ has parity m̃ + ĩ.
    pub fn split_parity(&self) -> (Derivation, Derivation) {
        let mut e = Derivation::zero(&self.ring);
        let mut o = Derivation::zero(&self.ring);
        for (i, c) in self.coeffs.iter().enumerate() {
            let (ce, co) = c.split_parity();
            if self.ring.odd[i] {
                e.coeffs[i] = co;
                o.coeffs[i] = ce;
            } else {
                e.coeffs[i] = ce;
                o.coeffs[i] = co;
            }
        }
        (e, o)
    }

    pub fn homogeneous_parity(&self) -> Option<bool> {
        let (e, o) = self.split_parity();
        match (e.is_zero(), o.is_zero()) {
            (_, true) => Some(false),
            (true, false) => Some(true),
            _ => None,
        }
    }

    /// X(f) = Σ Xⁱ ∂f/∂tⁱ.
    pub fn apply(&self, f: &TruncatedSeries) -> TruncatedSeries {
        assert!(same_ring(&self.ring, f.ring()), "ring mismatch");
        let mut out = TruncatedSeries::zero(&self.ring);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let p = f.partial(i);
            if !p.is_zero() {
                out.add_assign(&c.mul(&p));
            }
        }
        out
    }

    /// Graded commutator [X, Y] = X∘Y − (−1)^{X̃Ỹ} Y∘X.
    pub fn commutator(&self, other: &Derivation) -> Derivation {
        let (xe, xo) = self.split_parity();
        let (ye, yo) = other.split_parity();
        let mut out = Derivation::zero(&self.ring);
        for (x, xp) in [(&xe, false), (&xo, true)] {
            if x.is_zero() {
                continue;
            }
            for (y, yp) in [(&ye, false), (&yo, true)] {
                if y.is_zero() {
                    continue;
                }
                let s = Rational::from_int(if xp && yp { 1 } else { -1 });
                for k in 0..self.ring.nvars() {
                    let mut c = x.apply(&y.coeffs[k]);
                    c.add_scaled(&y.apply(&x.coeffs[k]), &s);
                    out.coeffs[k].add_assign(&c);
                }
            }
        }
        out
    }

    /// D∘D applied to every coordinate; zero iff D² = 0 (for odd D).
    pub fn square_on_coordinates(&self) -> Vec<TruncatedSeries> {
        (0..self.ring.nvars()).map(|k| self.apply(&self.coeffs[k])).collect()
    }

    pub fn display(&self) -> String {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("({}) d/d{}", c, self.ring.names[i]))
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

pub fn apply_derivation(d: &Derivation, f: &TruncatedSeries) -> Result<TruncatedSeries, GradedError> {
    if !same_ring(d.ring(), f.ring()) {
        return Err(GradedError::RingMismatch);
    }
    Ok(d.apply(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(degs: &[i64], n: usize) -> Arc<CoordinateRing> {
        let names = (0..degs.len()).map(|i| format!("t{}", i + 1)).collect();
        CoordinateRing::for_degrees(names, degs, n)
    }

    #[test]
    fn koszul_examples() {
        assert_eq!(koszul_sign(&[0, 1, 2], &[true, false, true]).unwrap(), 1);
        assert_eq!(koszul_sign(&[1, 0], &[true, true]).unwrap(), 1);
        assert_eq!(koszul_sign(&[1, 0], &[true, false]).unwrap(), -1);
        assert_eq!(koszul_sign(&[1, 0], &[false, false]).unwrap(), -1);
        assert_eq!(symmetric_sign(&[1, 0], &[true, true]).unwrap(), -1);
        assert!(koszul_sign(&[0], &[]).is_err());
    }

    #[test]
    fn odd_square_vanishes_and_binomial() {
        let r = ring(&[1, 1], 2);
        let t1 = TruncatedSeries::var(&r, 0);
        assert!(t1.mul(&t1).is_zero());
        let r = ring(&[0, 2], 2);
        let s = TruncatedSeries::var(&r, 0).add(&TruncatedSeries::var(&r, 1));
        let sq = s.mul(&s);
        assert_eq!(sq.to_string(), "t1^2 + 2*t1*t2 + t2^2");
        assert_eq!(s.mul(&TruncatedSeries::one(&r)), s);
    }

    #[test]
    fn odd_variables_anticommute() {
        let r = ring(&[1, 1], 3);
        let t1 = TruncatedSeries::var(&r, 0);
        let t2 = TruncatedSeries::var(&r, 1);
        assert_eq!(t2.mul(&t1), t1.mul(&t2).neg());
        let d2 = Derivation::coordinate(&r, 1);
        // ∂/∂t2 (t1 t2) = −t1
        assert_eq!(d2.apply(&t1.mul(&t2)), t1.neg());
    }

    #[test]
    fn derivation_examples() {
        let r = ring(&[0, 0], 3);
        let f = TruncatedSeries::var(&r, 0).mul(&TruncatedSeries::var(&r, 1));
        assert_eq!(Derivation::coordinate(&r, 0).apply(&f), TruncatedSeries::var(&r, 1));
        assert!(Derivation::zero(&r).apply(&f).is_zero());
        let r = ring(&[0, 1, -1], 4);
        let e = Derivation::euler(&r);
        let f = TruncatedSeries::var(&r, 0).mul(&TruncatedSeries::var(&r, 1));
        // weight 2 + 1 = 3
        assert_eq!(e.apply(&f), f.scale(&Rational::new(3, 2)));
    }

    #[test]
    fn ring_mismatch_is_an_error() {
        let a = TruncatedSeries::var(&ring(&[0], 2), 0);
        let b = TruncatedSeries::var(&ring(&[0], 3), 0);
        assert_eq!(series_mul(&a, &b), Err(GradedError::RingMismatch));
    }
}
