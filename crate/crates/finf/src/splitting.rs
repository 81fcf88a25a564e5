//! Cohomology and a deterministic cohomological splitting (i, p, q).
//!
//! g is decomposed degree by degree as R ⊕ Im d ⊕ C, where R spans the chosen
//! representatives and d maps C isomorphically onto Im d. Then q inverts d on
//! Im d and kills R ⊕ C, which gives the side conditions
//! qi = 0, pq = 0, qq = 0, pd = 0 for free.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::algebras::{is_zero_vector, AlgebraSpec, Report, Vector};
use crate::exactq::{kernel_basis, Matrix, Rational};
use crate::graded::{CoordinateRing, GradedBasis};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SplittingError {
    #[error("d does not square to zero on basis element {0}")]
    NotAComplex(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyClass {
    pub name: String,
    pub degree: i64,
    pub representative: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyBasis {
    pub classes: Vec<CohomologyClass>,
    /// Position of the unit's class, if the algebra is unital.
    pub unit_class: Option<usize>,
}

impl CohomologyBasis {
    pub fn dim(&self) -> usize {
        self.classes.len()
    }

    pub fn graded_basis(&self) -> GradedBasis {
        GradedBasis {
            names: self.classes.iter().map(|c| c.name.clone()).collect(),
            degrees: self.classes.iter().map(|c| c.degree).collect(),
        }
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.classes.iter().map(|c| c.degree).collect()
    }

    /// Coordinates tⁱ dual to the classes.
    pub fn coordinate_ring(&self, truncation: usize) -> Arc<CoordinateRing> {
        let names = self.classes.iter().map(|c| format!("t_{}", c.name)).collect();
        CoordinateRing::for_degrees(names, &self.degrees(), truncation)
    }

    /// Dimension of H in each degree, keyed by degree.
    pub fn dims_by_degree(&self) -> std::collections::BTreeMap<i64, usize> {
        let mut m = std::collections::BTreeMap::new();
        for c in &self.classes {
            *m.entry(c.degree).or_insert(0) += 1;
        }
        m
    }
}

/// How representatives and the complement C are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SplittingRule {
    /// Greedy in increasing basis order.
    Lexicographic,
    /// Complement chosen greedily from the last basis vector down, and every
    /// non-unit representative shifted by an exact element where one exists.
    /// Represents the same classes as `Lexicographic`.
    Alternate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splitting {
    pub cohomology: CohomologyBasis,
    /// H → g, columns are representatives.
    pub i: Matrix,
    /// g → H
    pub p: Matrix,
    /// g → g, the contracting homotopy.
    pub q: Matrix,
    pub rule: SplittingRule,
}

fn check_complex(spec: &AlgebraSpec) -> Result<Matrix, SplittingError> {
    let d = spec.d_matrix();
    let dd = d.mul(&d);
    for c in 0..dd.cols() {
        if !is_zero_vector(&dd.column(c)) {
            return Err(SplittingError::NotAComplex(c));
        }
    }
    Ok(d)
}

fn independent(vs: &[Vector], dim: usize) -> bool {
    vs.is_empty() || Matrix::from_columns(dim, vs).rank() == vs.len()
}

fn degree_indices(spec: &AlgebraSpec) -> Vec<(i64, Vec<usize>)> {
    let degs: BTreeSet<i64> = spec.basis.degrees.iter().copied().collect();
    degs.into_iter()
        .map(|k| (k, (0..spec.dim()).filter(|&i| spec.basis.degrees[i] == k).collect()))
        .collect()
}

struct Decomposition {
    reps: Vec<(i64, Vector)>,
    exact: Vec<Vector>,
    complement: Vec<Vector>,
    unit_class: Option<usize>,
}

fn decompose(spec: &AlgebraSpec, d: &Matrix, rule: SplittingRule) -> Decomposition {
    let n = spec.dim();
    let mut reps: Vec<(i64, Vector)> = Vec::new();
    let mut exact = Vec::new();
    let mut complement = Vec::new();
    let mut unit_class = None;
    let by_degree = degree_indices(spec);
    let mut complements: std::collections::BTreeMap<i64, Vec<Vector>> = Default::default();
    let closed_unit = spec.unit.filter(|&u| is_zero_vector(&spec.d_vec(&spec.e(u))));
    for (k, idx) in &by_degree {
        // kernel of d restricted to degree k
        let restricted = Matrix::from_fn(n, idx.len(), |r, c| d[(r, idx[c])].clone());
        let kernel: Vec<Vector> = kernel_basis(&restricted)
            .into_iter()
            .map(|v| {
                let mut full = vec![Rational::zero(); n];
                for (c, &i) in idx.iter().enumerate() {
                    full[i] = v[c].clone();
                }
                full
            })
            .collect();
        // image of the previous degree's complement
        let im: Vec<Vector> =
            complements.get(&(k - 1)).map(|cs| cs.iter().map(|c| spec.d_vec(c)).collect()).unwrap_or_default();
        let mut span = im.clone();
        let mut chosen: Vec<Vector> = Vec::new();
        if let Some(u) = closed_unit {
            if spec.basis.degrees[u] == *k {
                let e = spec.e(u);
                span.push(e.clone());
                if independent(&span, n) {
                    unit_class = Some(reps.len());
                    chosen.push(e);
                } else {
                    span.pop();
                }
            }
        }
        for v in &kernel {
            span.push(v.clone());
            if independent(&span, n) {
                chosen.push(v.clone());
            } else {
                span.pop();
            }
        }
        // complement of the kernel inside degree k
        let mut kspan = kernel.clone();
        let mut comp = Vec::new();
        let order: Vec<usize> = match rule {
            SplittingRule::Lexicographic => idx.clone(),
            SplittingRule::Alternate => idx.iter().rev().copied().collect(),
        };
        for &i in &order {
            let e = spec.e(i);
            kspan.push(e.clone());
            if independent(&kspan, n) {
                comp.push(e);
            } else {
                kspan.pop();
            }
        }
        for r in chosen {
            reps.push((*k, r));
        }
        exact.extend(im);
        complements.insert(*k, comp.clone());
        complement.extend(comp);
    }
    if rule == SplittingRule::Alternate {
        // shift non-unit representatives by the first exact element of their degree
        for (pos, (k, r)) in reps.iter_mut().enumerate() {
            if unit_class == Some(pos) {
                continue;
            }
            if let Some(c) = complements.get(&(*k - 1)).and_then(|cs| cs.first()) {
                let dc = spec.d_vec(c);
                for (x, y) in r.iter_mut().zip(&dc) {
                    *x += y;
                }
            }
        }
    }
    Decomposition { reps, exact, complement, unit_class }
}

fn class_name(spec: &AlgebraSpec, v: &[Rational], pos: usize) -> String {
    let nz: Vec<usize> = (0..v.len()).filter(|&i| !v[i].is_zero()).collect();
    if nz.len() == 1 && v[nz[0]].is_one() {
        spec.basis.names[nz[0]].clone()
    } else {
        format!("h{pos}")
    }
}

/// Ker d / Im d with representatives chosen by the lexicographic rule; the
/// unit, when present and not exact, is the first class.
pub fn cohomology(spec: &AlgebraSpec) -> Result<CohomologyBasis, SplittingError> {
    Ok(build_splitting(spec)?.cohomology)
}

pub fn build_splitting(spec: &AlgebraSpec) -> Result<Splitting, SplittingError> {
    build_splitting_with_rule(spec, SplittingRule::Lexicographic)
}

pub fn build_splitting_with_rule(spec: &AlgebraSpec, rule: SplittingRule) -> Result<Splitting, SplittingError> {
    let d = check_complex(spec)?;
    let n = spec.dim();
    let lex = decompose(spec, &d, SplittingRule::Lexicographic);
    let dec = if rule == SplittingRule::Lexicographic { None } else { Some(decompose(spec, &d, rule)) };
    let names: Vec<String> = lex.reps.iter().enumerate().map(|(pos, (_, v))| class_name(spec, v, pos)).collect();
    let dec = dec.as_ref().unwrap_or(&lex);
    let mut reps: Vec<(i64, Vector)> = dec.reps.clone();
    // unit class first
    if let Some(u) = dec.unit_class {
        let r = reps.remove(u);
        reps.insert(0, r);
    }
    let mut names = names;
    if let Some(u) = lex.unit_class {
        let nm = names.remove(u);
        names.insert(0, nm);
    }
    let h = reps.len();
    let mut cols: Vec<Vector> = reps.iter().map(|(_, v)| v.clone()).collect();
    cols.extend(dec.exact.iter().cloned());
    cols.extend(dec.complement.iter().cloned());
    let m = Matrix::from_columns(n, &cols);
    let minv = m.inverse().expect("R ⊕ Im d ⊕ C spans g");
    let ne = dec.exact.len();
    // p: first h coordinates
    let p = Matrix::from_fn(h, n, |r, c| minv[(r, c)].clone());
    // q: exact coordinate j ↦ complement vector j
    let exact_coords = Matrix::from_fn(ne, n, |r, c| minv[(h + r, c)].clone());
    let comp = Matrix::from_columns(n, &dec.complement);
    let q = if ne == 0 { Matrix::zeros(n, n) } else { comp.mul(&exact_coords) };
    let i = Matrix::from_columns(n, &reps.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>());
    let classes = reps
        .into_iter()
        .zip(names)
        .map(|((degree, representative), name)| CohomologyClass { name, degree, representative })
        .collect();
    let cohomology = CohomologyBasis { classes, unit_class: dec.unit_class.map(|_| 0) };
    Ok(Splitting { cohomology, i, p, q, rule })
}

/// The quasi-isomorphism φ = p : (g, d) → (H, 0).
pub fn phi_from_splitting(s: &Splitting) -> Matrix {
    s.p.clone()
}

impl Splitting {
    pub fn dim_h(&self) -> usize {
        self.i.cols()
    }

    /// Every defining identity and side condition, checked exactly.
    pub fn verify(&self, spec: &AlgebraSpec) -> Report {
        let n = spec.dim();
        let d = spec.d_matrix();
        let mut rep = Report::new();
        let h = self.dim_h();
        let checks: Vec<(&str, Matrix, Matrix)> = vec![
            ("p i = 1", self.p.mul(&self.i), Matrix::identity(h)),
            (
                "i p + d q + q d = 1",
                self.i.mul(&self.p).add(&d.mul(&self.q)).add(&self.q.mul(&d)),
                Matrix::identity(n),
            ),
            ("q i = 0", self.q.mul(&self.i), Matrix::zeros(n, h)),
            ("p q = 0", self.p.mul(&self.q), Matrix::zeros(h, n)),
            ("q q = 0", self.q.mul(&self.q), Matrix::zeros(n, n)),
            ("p d = 0", self.p.mul(&d), Matrix::zeros(h, n)),
            ("d i = 0", d.mul(&self.i), Matrix::zeros(n, h)),
        ];
        for (name, lhs, rhs) in checks {
            if lhs != rhs {
                rep.push(name, &[], "matrix identity fails");
            }
        }
        rep
    }

    /// Coordinates of a vector in the class basis.
    pub fn project(&self, v: &[Rational]) -> Vector {
        self.p.apply(v)
    }
}
