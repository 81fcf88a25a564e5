//! Truncated Hochschild cochain complexes C^{≤n_max}(A, A) of a
//! finite-dimensional associative algebra, with cup product and
//! Gerstenhaber bracket.
//!
//! With b the usual Hochschild coboundary
//! (bf)(a₀…aₙ) = a₀f(a₁…aₙ) + Σᵢ(−1)ⁱ f(…a_{i−1}aᵢ…) + (−1)^{n+1} f(a₀…a_{n−1})aₙ,
//! the differential on arity n is d = (−1)^{n+1} b, which equals [m•−] for the
//! multiplication m. The product is (f·g)(a₁…a_{k+l}) = (−1)^{kl} f(a₁…a_k) g(a_{k+1}…)
//! and f∘g = Σ_{i=0}^{k−1} (−1)^{i(l−1)} f(a₁…aᵢ, g(…), …).
//! With these signs d is a derivation of both operations; the Poisson identity
//! and [1•f] = 0 hold only on cohomology.

use thiserror::Error;

use crate::algebras::{is_zero_vector, AlgebraSpec, SparseTensor, SpecError, Vector};
use crate::exactq::Rational;
use crate::graded::GradedBasis;
use crate::splitting::{build_splitting, CohomologyBasis, Splitting, SplittingError};

/// Upper bound on the number of cochain basis elements.
pub const MAX_COCHAINS: usize = 4096;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HochschildError {
    #[error("multiplication is not associative on {0:?}")]
    NotAssociative(Vec<usize>),
    #[error("unit axiom fails on basis element {0}")]
    BadUnit(usize),
    #[error("window n_max = {0} must be at least 2")]
    WindowTooSmall(usize),
    #[error("window needs {0} cochains, above the budget of {MAX_COCHAINS}")]
    TooLarge(usize),
    #[error("degree {degree} is outside the trusted window (≤ {trusted})")]
    OutsideWindow { degree: i64, trusted: i64 },
    #[error("{0}")]
    Spec(#[from] SpecError),
    #[error("{0}")]
    Splitting(#[from] SplittingError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssocAlgebra {
    pub basis: GradedBasis,
    pub mult: SparseTensor,
    pub unit: usize,
}

impl AssocAlgebra {
    pub fn new(basis: GradedBasis, mult: SparseTensor, unit: usize) -> Result<Self, HochschildError> {
        let a = AssocAlgebra { basis, mult, unit };
        let m = a.dim();
        for x in 0..m {
            for y in 0..m {
                let xy = a.mul(&a.e(x), &a.e(y));
                for z in 0..m {
                    if a.mul(&xy, &a.e(z)) != a.mul(&a.e(x), &a.mul(&a.e(y), &a.e(z))) {
                        return Err(HochschildError::NotAssociative(vec![x, y, z]));
                    }
                }
            }
            if a.mul(&a.e(unit), &a.e(x)) != a.e(x) || a.mul(&a.e(x), &a.e(unit)) != a.e(x) {
                return Err(HochschildError::BadUnit(x));
            }
        }
        Ok(a)
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    fn e(&self, i: usize) -> Vector {
        crate::algebras::basis_vector(self.dim(), i)
    }

    pub fn mul(&self, x: &[Rational], y: &[Rational]) -> Vector {
        self.mult.eval(&[x, y], self.dim())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HochschildWindow {
    pub n_max: usize,
}

/// Index bookkeeping for elementary cochains E_{I,o}: I ↦ e_o.
struct CochainIndex {
    m: usize,
    offsets: Vec<usize>,
}

impl CochainIndex {
    fn new(m: usize, n_max: usize) -> Self {
        let mut offsets = vec![0];
        for n in 0..=n_max {
            let last = *offsets.last().expect("nonempty");
            offsets.push(last + m.pow(n as u32) * m);
        }
        CochainIndex { m, offsets }
    }

    fn total(&self) -> usize {
        *self.offsets.last().expect("nonempty")
    }

    fn index(&self, inputs: &[usize], out: usize) -> usize {
        let mut k = 0;
        for &i in inputs {
            k = k * self.m + i;
        }
        self.offsets[inputs.len()] + k * self.m + out
    }

    fn decode(&self, idx: usize) -> (Vec<usize>, usize) {
        let n = self.offsets.iter().rposition(|&o| o <= idx).expect("in range");
        let mut k = idx - self.offsets[n];
        let out = k % self.m;
        k /= self.m;
        let mut inputs = vec![0; n];
        for slot in (0..n).rev() {
            inputs[slot] = k % self.m;
            k /= self.m;
        }
        (inputs, out)
    }
}

fn tuples(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|t| (0..m).map(move |i| {
            let mut t = t.clone();
            t.push(i);
            t
        })).collect();
    }
    out
}

/// The truncated Hochschild complex as an `AlgebraSpec` tagged "hochschild".
pub fn hochschild_spec(a: &AssocAlgebra, w: HochschildWindow) -> Result<AlgebraSpec, HochschildError> {
    if w.n_max < 2 {
        return Err(HochschildError::WindowTooSmall(w.n_max));
    }
    let m = a.dim();
    let ix = CochainIndex::new(m, w.n_max);
    if ix.total() > MAX_COCHAINS {
        return Err(HochschildError::TooLarge(ix.total()));
    }
    let mut elements = Vec::with_capacity(ix.total());
    for idx in 0..ix.total() {
        let (ins, out) = ix.decode(idx);
        let args: Vec<&str> = ins.iter().map(|&i| a.basis.names[i].as_str()).collect();
        elements.push((format!("({})->{}", args.join(","), a.basis.names[out]), ins.len() as i64));
    }
    let basis = GradedBasis::new(elements).map_err(|e| SpecError::Precondition(e.to_string()))?;
    let prod = |x: usize, y: usize| a.mul(&a.e(x), &a.e(y));

    // differential
    let mut d = SparseTensor::new(1);
    for idx in 0..ix.total() {
        let (ins, out) = ix.decode(idx);
        let n = ins.len();
        if n + 1 > w.n_max {
            continue;
        }
        for t in tuples(m, n + 1) {
            let mut val = vec![Rational::zero(); m];
            // a₀ f(a₁…aₙ)
            if t[1..] == ins[..] {
                crate::algebras::axpy(&mut val, &Rational::one(), &prod(t[0], out));
            }
            // Σ (−1)ⁱ f(a₀ … a_{i−1}aᵢ … aₙ)
            for i in 1..=n {
                let merged = prod(t[i - 1], t[i]);
                for (c, coef) in merged.iter().enumerate() {
                    if coef.is_zero() {
                        continue;
                    }
                    let mut s: Vec<usize> = t[..i - 1].to_vec();
                    s.push(c);
                    s.extend_from_slice(&t[i + 1..]);
                    if s == ins {
                        val[out] += &coef.clone().signed(i % 2 == 1);
                    }
                }
            }
            // (−1)^{n+1} f(a₀…a_{n−1}) aₙ
            if t[..n] == ins[..] {
                let v = prod(out, t[n]);
                crate::algebras::axpy(&mut val, &Rational::from_int(if n % 2 == 0 { -1 } else { 1 }), &v);
            }
            let tw = n % 2 == 0;
            for (o, c) in val.into_iter().enumerate() {
                d.add(ix.index(&t, o), &[idx], c.signed(tw));
            }
        }
    }

    // cup product
    let mut dot = SparseTensor::new(2);
    for x in 0..ix.total() {
        let (i1, o1) = ix.decode(x);
        for y in 0..ix.total() {
            let (i2, o2) = ix.decode(y);
            if i1.len() + i2.len() > w.n_max {
                continue;
            }
            let mut t = i1.clone();
            t.extend_from_slice(&i2);
            let tw = (i1.len() * i2.len()) % 2 == 1;
            for (o, c) in prod(o1, o2).into_iter().enumerate() {
                dot.add(ix.index(&t, o), &[x, y], c.signed(tw));
            }
        }
    }

    // Gerstenhaber bracket
    let compose = |f: &(Vec<usize>, usize), g: &(Vec<usize>, usize)| -> Vec<(Vec<usize>, usize, i64)> {
        let (fi, fo) = f;
        let (gi, go) = g;
        let (k, l) = (fi.len(), gi.len());
        let mut out = Vec::new();
        for i in 0..k {
            if fi[i] != *go {
                continue;
            }
            let mut t = fi[..i].to_vec();
            t.extend_from_slice(gi);
            t.extend_from_slice(&fi[i + 1..]);
            let sign = if (i * (l + 1)) % 2 == 1 { -1 } else { 1 };
            out.push((t, *fo, sign));
        }
        out
    };
    let mut br = SparseTensor::new(2);
    for x in 0..ix.total() {
        let fx = ix.decode(x);
        for y in 0..ix.total() {
            let gy = ix.decode(y);
            let (k, l) = (fx.0.len(), gy.0.len());
            if k + l == 0 || k + l - 1 > w.n_max {
                continue;
            }
            for (t, o, s) in compose(&fx, &gy) {
                br.add(ix.index(&t, o), &[x, y], Rational::from_int(s));
            }
            let swap = if ((k + 1) * (l + 1)) % 2 == 1 { 1 } else { -1 };
            for (t, o, s) in compose(&gy, &fx) {
                br.add(ix.index(&t, o), &[x, y], Rational::from_int(swap * s));
            }
        }
    }
    let unit = ix.index(&[], a.unit);
    Ok(AlgebraSpec::new(basis, d, br, Some(dot), Some(unit), None, vec!["hochschild".into()])?)
}

/// Cohomology of a window together with the induced product and bracket on
/// classes whose degree is at most n_max − 1.
#[derive(Clone, Debug)]
pub struct InducedGerstenhaber {
    pub splitting: Splitting,
    pub trusted_degree: i64,
    spec: AlgebraSpec,
}

impl InducedGerstenhaber {
    pub fn cohomology(&self) -> &CohomologyBasis {
        &self.splitting.cohomology
    }

    /// Classes in trusted degrees, by position.
    pub fn trusted_classes(&self) -> Vec<usize> {
        let c = &self.splitting.cohomology.classes;
        (0..c.len()).filter(|&k| c[k].degree <= self.trusted_degree).collect()
    }

    fn check(&self, degree: i64) -> Result<(), HochschildError> {
        if degree > self.trusted_degree {
            Err(HochschildError::OutsideWindow { degree, trusted: self.trusted_degree })
        } else {
            Ok(())
        }
    }

    fn deg(&self, k: usize) -> i64 {
        self.splitting.cohomology.classes[k].degree
    }

    /// [x]·[y] in class coordinates.
    pub fn dot(&self, x: usize, y: usize) -> Result<Vector, HochschildError> {
        self.check(self.deg(x) + self.deg(y))?;
        let v = self.spec.dot_vec(&self.splitting.i.column(x), &self.splitting.i.column(y));
        Ok(self.splitting.p.apply(&v))
    }

    /// [[x]•[y]] in class coordinates.
    pub fn bracket(&self, x: usize, y: usize) -> Result<Vector, HochschildError> {
        self.check(self.deg(x).max(self.deg(y)).max(self.deg(x) + self.deg(y) - 1))?;
        let v = self.spec.bracket_vec(&self.splitting.i.column(x), &self.splitting.i.column(y));
        Ok(self.splitting.p.apply(&v))
    }

    /// Whether the induced product is graded commutative on trusted classes.
    pub fn dot_is_graded_commutative(&self) -> bool {
        let tr = self.trusted_classes();
        for &x in &tr {
            for &y in &tr {
                let (Ok(xy), Ok(yx)) = (self.dot(x, y), self.dot(y, x)) else { continue };
                let s = (self.deg(x) * self.deg(y)).rem_euclid(2) == 1;
                let yx: Vector = yx.into_iter().map(|c| c.signed(s)).collect();
                if !is_zero_vector(&crate::algebras::vec_sub(&xy, &yx)) {
                    return false;
                }
            }
        }
        true
    }
}

pub fn gerstenhaber_on_cohomology(spec: &AlgebraSpec) -> Result<InducedGerstenhaber, HochschildError> {
    if !spec.has_tag("hochschild") {
        return Err(SpecError::Precondition("spec is not a Hochschild window".into()).into());
    }
    let splitting = build_splitting(spec)?;
    let trusted_degree = spec.max_degree() - 1;
    Ok(InducedGerstenhaber { splitting, trusted_degree, spec: spec.clone() })
}
