//! Input structures given by structure constants, and their validators.
//!
//! The bracket is the odd bracket: skew-symmetric in the shifted sense,
//! [a•b] = −(−1)^{(ã+1)(b̃+1)} [b•a], of degree −1.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactq::{Matrix, Rational};
use crate::graded::{koszul_sign, CoordinateRing, Derivation, GradedBasis, Monomial, TruncatedSeries};
use crate::master::GElement;

pub type Vector = Vec<Rational>;

pub fn basis_vector(dim: usize, i: usize) -> Vector {
    let mut v = vec![Rational::zero(); dim];
    v[i] = Rational::one();
    v
}

pub fn is_zero_vector(v: &[Rational]) -> bool {
    v.iter().all(Rational::is_zero)
}

/// y += s·x
pub fn axpy(y: &mut [Rational], s: &Rational, x: &[Rational]) {
    if s.is_zero() {
        return;
    }
    for (a, b) in y.iter_mut().zip(x) {
        if !b.is_zero() {
            *a += &(s * b);
        }
    }
}

pub fn vec_sub(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(a: &[Rational], s: &Rational) -> Vector {
    a.iter().map(|x| x * s).collect()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpecError {
    #[error("index {index} out of range in {tensor}")]
    IndexOutOfRange { tensor: String, index: usize },
    #[error("{tensor} has arity {found}, expected {expected}")]
    Arity { tensor: String, expected: usize, found: usize },
    #[error("{tensor} entry {inputs:?} -> {out} has degree {found}, expected {expected}")]
    Degree { tensor: String, inputs: Vec<usize>, out: usize, expected: i64, found: i64 },
    #[error("bracket entries [{a}•{b}] and [{b}•{a}] are inconsistent with odd skew-symmetry")]
    InconsistentSkew { a: usize, b: usize },
    #[error("a unit requires a dot product")]
    UnitWithoutDot,
    #[error("unknown basis element {0:?}")]
    UnknownName(String),
    #[error("{0}")]
    Precondition(String),
}

/// Multilinear map on basis elements: input tuple ↦ sparse output vector.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseTensor {
    pub arity: usize,
    entries: BTreeMap<Vec<usize>, BTreeMap<usize, Rational>>,
}

impl SparseTensor {
    pub fn new(arity: usize) -> Self {
        SparseTensor { arity, entries: BTreeMap::new() }
    }

    /// Accumulate c into the (out, inputs) entry.
    pub fn add(&mut self, out: usize, inputs: &[usize], c: Rational) {
        assert_eq!(inputs.len(), self.arity, "arity mismatch");
        if c.is_zero() {
            return;
        }
        let row = self.entries.entry(inputs.to_vec()).or_default();
        let slot = row.entry(out).or_insert_with(Rational::zero);
        *slot += &c;
        if slot.is_zero() {
            row.remove(&out);
            if row.is_empty() {
                self.entries.remove(inputs);
            }
        }
    }

    pub fn get(&self, inputs: &[usize]) -> Option<&BTreeMap<usize, Rational>> {
        self.entries.get(inputs)
    }

    pub fn value(&self, out: usize, inputs: &[usize]) -> Rational {
        self.get(inputs).and_then(|r| r.get(&out)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&Vec<usize>, &BTreeMap<usize, Rational>)> {
        self.entries.iter()
    }

    /// Flat (out, inputs, coefficient) list.
    pub fn entries(&self) -> Vec<(usize, Vec<usize>, Rational)> {
        let mut v = Vec::new();
        for (ins, row) in &self.entries {
            for (o, c) in row {
                v.push((*o, ins.clone(), c.clone()));
            }
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.values().map(BTreeMap::len).sum()
    }

    /// Output on a basis tuple as a dense vector.
    pub fn eval_basis(&self, inputs: &[usize], dim: usize) -> Vector {
        let mut v = vec![Rational::zero(); dim];
        if let Some(row) = self.get(inputs) {
            for (o, c) in row {
                v[*o] = c.clone();
            }
        }
        v
    }

    /// Dense matrix of an arity-1 tensor (rows = outputs).
    pub fn matrix(&self, dim_out: usize, dim_in: usize) -> Matrix {
        assert_eq!(self.arity, 1);
        let mut m = Matrix::zeros(dim_out, dim_in);
        for (ins, row) in &self.entries {
            for (o, c) in row {
                m[(*o, ins[0])] = c.clone();
            }
        }
        m
    }

    pub fn from_matrix(m: &Matrix) -> Self {
        let mut t = SparseTensor::new(1);
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                t.add(r, &[c], m[(r, c)].clone());
            }
        }
        t
    }

    /// Multilinear evaluation on dense vectors (scalars are even, so no signs).
    pub fn eval(&self, args: &[&[Rational]], dim: usize) -> Vector {
        let mut out = vec![Rational::zero(); dim];
        let supports: Vec<Vec<usize>> =
            args.iter().map(|a| (0..a.len()).filter(|&i| !a[i].is_zero()).collect()).collect();
        let combos = supports.iter().try_fold(1usize, |acc, s| acc.checked_mul(s.len()));
        let accumulate = |out: &mut Vector, ins: &[usize], row: &BTreeMap<usize, Rational>| {
            let mut coef = Rational::one();
            for (slot, &i) in ins.iter().enumerate() {
                coef = coef * &args[slot][i];
            }
            for (o, c) in row {
                out[*o] += &(&coef * c);
            }
        };
        match combos {
            Some(n) if n <= self.entries.len() => {
                let mut ins = vec![0; self.arity];
                let mut pos = vec![0; self.arity];
                if n == 0 {
                    return out;
                }
                loop {
                    for k in 0..self.arity {
                        ins[k] = supports[k][pos[k]];
                    }
                    if let Some(row) = self.entries.get(&ins) {
                        accumulate(&mut out, &ins, row);
                    }
                    let mut k = self.arity;
                    loop {
                        if k == 0 {
                            return out;
                        }
                        k -= 1;
                        pos[k] += 1;
                        if pos[k] < supports[k].len() {
                            break;
                        }
                        pos[k] = 0;
                    }
                }
            }
            _ => {
                for (ins, row) in &self.entries {
                    if ins.iter().enumerate().all(|(slot, &i)| !args[slot][i].is_zero()) {
                        accumulate(&mut out, ins, row);
                    }
                }
                out
            }
        }
    }

    fn check(&self, name: &str, basis: &GradedBasis, arity: usize, shift: i64) -> Result<(), SpecError> {
        if self.arity != arity {
            return Err(SpecError::Arity { tensor: name.into(), expected: arity, found: self.arity });
        }
        let dim = basis.dim();
        for (ins, row) in &self.entries {
            for &i in ins.iter().chain(row.keys()) {
                if i >= dim {
                    return Err(SpecError::IndexOutOfRange { tensor: name.into(), index: i });
                }
            }
            let expected: i64 = ins.iter().map(|&i| basis.degrees[i]).sum::<i64>() + shift;
            for &o in row.keys() {
                if basis.degrees[o] != expected {
                    return Err(SpecError::Degree {
                        tensor: name.into(),
                        inputs: ins.clone(),
                        out: o,
                        expected,
                        found: basis.degrees[o],
                    });
                }
            }
        }
        Ok(())
    }

    /// Fill in [b•a] from [a•b] by odd skew-symmetry, rejecting inconsistent pairs.
    pub fn complete_odd_skew(&self, basis: &GradedBasis) -> Result<SparseTensor, SpecError> {
        assert_eq!(self.arity, 2);
        let mut out = self.clone();
        for (ins, row) in &self.entries {
            let (a, b) = (ins[0], ins[1]);
            let s = odd_swap_sign(basis.is_odd(a), basis.is_odd(b));
            let mirrored: BTreeMap<usize, Rational> = row.iter().map(|(o, c)| (*o, c.clone().signed(s < 0))).collect();
            if a == b {
                if mirrored != *row {
                    return Err(SpecError::InconsistentSkew { a, b });
                }
                continue;
            }
            match self.entries.get(&vec![b, a]) {
                Some(existing) if *existing != mirrored => return Err(SpecError::InconsistentSkew { a, b }),
                Some(_) => {}
                None => {
                    for (o, c) in mirrored {
                        out.add(o, &[b, a], c);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Sign picked up by swapping adjacent arguments of an odd-symmetric map:
/// −(−1)^{(ã+1)(b̃+1)}.
pub fn odd_swap_sign(a_odd: bool, b_odd: bool) -> i32 {
    if !a_odd && !b_odd {
        1
    } else {
        -1
    }
}

/// Sort a tuple for an odd-symmetric tensor. Returns the sorted tuple and
/// the sign s with T(tuple) = s·T(sorted), or None if T(tuple) is forced to vanish.
pub fn odd_symmetric_canonical(tuple: &[usize], odd: &[bool]) -> Option<(Vec<usize>, i32)> {
    let mut order: Vec<usize> = (0..tuple.len()).collect();
    order.sort_by_key(|&k| tuple[k]);
    let sorted: Vec<usize> = order.iter().map(|&k| tuple[k]).collect();
    for w in sorted.windows(2) {
        if w[0] == w[1] && odd[w[0]] {
            return None;
        }
    }
    let mut sigma = vec![0usize; tuple.len()];
    for (j, &k) in order.iter().enumerate() {
        sigma[k] = j;
    }
    let shifted: Vec<bool> = sorted.iter().map(|&i| !odd[i]).collect();
    let s = koszul_sign(&sigma, &shifted).expect("lengths agree");
    Some((sorted, s))
}

/// A finite-dimensional Z-graded algebra given by structure constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraSpec {
    pub basis: GradedBasis,
    pub differential: SparseTensor,
    pub bracket: SparseTensor,
    pub dot: Option<SparseTensor>,
    pub unit: Option<usize>,
    pub bv: Option<SparseTensor>,
    pub tags: Vec<String>,
}

impl AlgebraSpec {
    /// Check degrees and complete the bracket by odd skew-symmetry.
    pub fn new(
        basis: GradedBasis,
        differential: SparseTensor,
        bracket: SparseTensor,
        dot: Option<SparseTensor>,
        unit: Option<usize>,
        bv: Option<SparseTensor>,
        tags: Vec<String>,
    ) -> Result<Self, SpecError> {
        differential.check("differential", &basis, 1, 1)?;
        bracket.check("bracket", &basis, 2, -1)?;
        if let Some(t) = &dot {
            t.check("dot", &basis, 2, 0)?;
        }
        if let Some(t) = &bv {
            t.check("bv", &basis, 1, -1)?;
        }
        if let Some(u) = unit {
            if dot.is_none() {
                return Err(SpecError::UnitWithoutDot);
            }
            if u >= basis.dim() {
                return Err(SpecError::IndexOutOfRange { tensor: "unit".into(), index: u });
            }
        }
        let bracket = bracket.complete_odd_skew(&basis)?;
        Ok(AlgebraSpec { basis, differential, bracket, dot, unit, bv, tags })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.basis.is_odd(i)
    }

    pub fn odd_mask(&self) -> Vec<bool> {
        (0..self.dim()).map(|i| self.is_odd(i)).collect()
    }

    pub fn has_tag(&self, tag: &str) -> bool {
        self.tags.iter().any(|t| t == tag)
    }

    pub fn d_matrix(&self) -> Matrix {
        self.differential.matrix(self.dim(), self.dim())
    }

    pub fn d_vec(&self, x: &[Rational]) -> Vector {
        self.differential.eval(&[x], self.dim())
    }

    pub fn bracket_vec(&self, x: &[Rational], y: &[Rational]) -> Vector {
        self.bracket.eval(&[x, y], self.dim())
    }

    pub fn dot_vec(&self, x: &[Rational], y: &[Rational]) -> Vector {
        match &self.dot {
            Some(t) => t.eval(&[x, y], self.dim()),
            None => vec![Rational::zero(); self.dim()],
        }
    }

    pub fn bv_vec(&self, x: &[Rational]) -> Vector {
        match &self.bv {
            Some(t) => t.eval(&[x], self.dim()),
            None => vec![Rational::zero(); self.dim()],
        }
    }

    pub fn e(&self, i: usize) -> Vector {
        basis_vector(self.dim(), i)
    }

    /// Largest basis degree; used as the window edge for truncated complexes.
    pub fn max_degree(&self) -> i64 {
        self.basis.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn replace_bracket(&self, bracket: SparseTensor) -> Result<AlgebraSpec, SpecError> {
        AlgebraSpec::new(
            self.basis.clone(),
            self.differential.clone(),
            bracket,
            self.dot.clone(),
            self.unit,
            self.bv.clone(),
            self.tags.clone(),
        )
    }
}

/// One violated instance of an identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub identity: String,
    pub indices: Vec<usize>,
    pub detail: String,
    pub informational: bool,
}

/// Outcome of a validator: every violated instance, in a deterministic order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, identity: &str, indices: &[usize], detail: impl Into<String>) {
        self.violations.push(Violation {
            identity: identity.into(),
            indices: indices.to_vec(),
            detail: detail.into(),
            informational: false,
        });
    }

    pub fn push_info(&mut self, identity: &str, indices: &[usize], detail: impl Into<String>) {
        self.violations.push(Violation {
            identity: identity.into(),
            indices: indices.to_vec(),
            detail: detail.into(),
            informational: true,
        });
    }

    pub fn extend(&mut self, other: Report) {
        self.violations.extend(other.violations);
    }

    /// No violations at all, informational ones included.
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    /// No violations except informational ones.
    pub fn is_valid(&self) -> bool {
        self.violations.iter().all(|v| v.informational)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| !v.informational)
    }

    pub fn count(&self, identity: &str) -> usize {
        self.violations.iter().filter(|v| v.identity == identity).count()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "no violations");
        }
        for v in &self.violations {
            let tag = if v.informational { " (informational)" } else { "" };
            writeln!(f, "{} at {:?}: {}{}", v.identity, v.indices, v.detail, tag)?;
        }
        Ok(())
    }
}

fn sgn(odd: bool) -> Rational {
    Rational::from_int(if odd { -1 } else { 1 })
}

fn show(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

/// Odd skew-symmetry, odd Jacobi, d² = 0 and the Leibniz rule on all basis tuples.
/// For Hochschild windows, tuples whose identity leaves the window are skipped.
pub fn validate_dlie(spec: &AlgebraSpec) -> Report {
    let n = spec.dim();
    let mut rep = Report::new();
    let window = spec.has_tag("hochschild");
    let top = spec.max_degree();
    let deg = |i: usize| spec.basis.degrees[i];
    for a in 0..n {
        let dda = spec.d_vec(&spec.d_vec(&spec.e(a)));
        if !is_zero_vector(&dda) {
            if window && deg(a) + 2 > top {
                rep.push_info("d^2 = 0", &[a], show(&dda));
            } else {
                rep.push("d^2 = 0", &[a], show(&dda));
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            let (ea, eb) = (spec.e(a), spec.e(b));
            let ab = spec.bracket_vec(&ea, &eb);
            let ba = spec.bracket_vec(&eb, &ea);
            let mut skew = ab.clone();
            axpy(&mut skew, &Rational::from_int(odd_swap_sign(spec.is_odd(a), spec.is_odd(b)) as i64 * -1), &ba);
            if !is_zero_vector(&skew) {
                rep.push("odd skew-symmetry", &[a, b], show(&skew));
            }
            // d[a•b] = [da•b] − (−1)^a [a•db]
            let edge = deg(a) + deg(b) > top || deg(a).max(deg(b)) + 1 > top;
            if window && edge {
                continue;
            }
            let mut lz = spec.d_vec(&ab);
            let t1 = spec.bracket_vec(&spec.d_vec(&ea), &eb);
            let t2 = spec.bracket_vec(&ea, &spec.d_vec(&eb));
            axpy(&mut lz, &Rational::from_int(-1), &t1);
            axpy(&mut lz, &sgn(spec.is_odd(a)), &t2);
            if !is_zero_vector(&lz) {
                rep.push("Leibniz rule for d", &[a, b], show(&lz));
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            let ab = spec.bracket_vec(&spec.e(a), &spec.e(b));
            for c in 0..n {
                if window && deg(a) + deg(b) + deg(c) - 1 > top {
                    continue;
                }
                // [a•[b•c]] = [[a•b]•c] + (−1)^{(a+1)(b+1)} [b•[a•c]]
                let bc = spec.bracket_vec(&spec.e(b), &spec.e(c));
                let ac = spec.bracket_vec(&spec.e(a), &spec.e(c));
                let mut j = spec.bracket_vec(&spec.e(a), &bc);
                axpy(&mut j, &Rational::from_int(-1), &spec.bracket_vec(&ab, &spec.e(c)));
                let s = !spec.is_odd(a) && !spec.is_odd(b);
                axpy(&mut j, &-sgn(s), &spec.bracket_vec(&spec.e(b), &ac));
                if !is_zero_vector(&j) {
                    rep.push("odd Jacobi identity", &[a, b, c], show(&j));
                }
            }
        }
    }
    rep
}

/// The dLie checks plus associativity, Leibniz over the product, the
/// Poisson identity and unit axioms. Graded commutativity is informational.
pub fn validate_dg(spec: &AlgebraSpec) -> Report {
    let mut rep = validate_dlie(spec);
    let n = spec.dim();
    if spec.dot.is_none() {
        rep.push("dot product present", &[], "no dot product declared");
        return rep;
    }
    let window = spec.has_tag("hochschild");
    let top = spec.max_degree();
    let deg = |i: usize| spec.basis.degrees[i];
    let record = |rep: &mut Report, name: &str, idx: &[usize], v: &[Rational], edge: bool, info: bool| {
        if is_zero_vector(v) {
            return;
        }
        if info || (window && edge) {
            rep.push_info(name, idx, show(v));
        } else {
            rep.push(name, idx, show(v));
        }
    };
    for a in 0..n {
        for b in 0..n {
            let (ea, eb) = (spec.e(a), spec.e(b));
            let ab = spec.dot_vec(&ea, &eb);
            let ba = spec.dot_vec(&eb, &ea);
            let mut comm = ab.clone();
            axpy(&mut comm, &-sgn(spec.is_odd(a) && spec.is_odd(b)), &ba);
            record(&mut rep, "graded commutativity", &[a, b], &comm, false, true);
            // d(ab) = (da)b + (−1)^a a(db)
            let mut lz = spec.d_vec(&ab);
            axpy(&mut lz, &Rational::from_int(-1), &spec.dot_vec(&spec.d_vec(&ea), &eb));
            axpy(&mut lz, &-sgn(spec.is_odd(a)), &spec.dot_vec(&ea, &spec.d_vec(&eb)));
            record(&mut rep, "Leibniz rule for d over dot", &[a, b], &lz, deg(a) + deg(b) + 1 > top, false);
            for c in 0..n {
                let edge = deg(a) + deg(b) + deg(c) > top;
                if window && edge {
                    continue;
                }
                let ec = spec.e(c);
                let mut assoc = spec.dot_vec(&ab, &ec);
                axpy(&mut assoc, &Rational::from_int(-1), &spec.dot_vec(&ea, &spec.dot_vec(&eb, &ec)));
                let edge = deg(a) + deg(b) + deg(c) > top;
                record(&mut rep, "associativity", &[a, b, c], &assoc, edge, false);
                // [a•(bc)] = [a•b]c + (−1)^{(a+1)b} b[a•c]
                let bc = spec.dot_vec(&eb, &ec);
                let mut p = spec.bracket_vec(&ea, &bc);
                axpy(&mut p, &Rational::from_int(-1), &spec.dot_vec(&spec.bracket_vec(&ea, &eb), &ec));
                let s = !spec.is_odd(a) && spec.is_odd(b);
                axpy(&mut p, &-sgn(s), &spec.dot_vec(&eb, &spec.bracket_vec(&ea, &ec)));
                record(&mut rep, "Poisson identity", &[a, b, c], &p, edge, window);
            }
        }
    }
    if let Some(u) = spec.unit {
        let eu = spec.e(u);
        let du = spec.d_vec(&eu);
        record(&mut rep, "unit is closed", &[u], &du, false, false);
        for a in 0..n {
            let ea = spec.e(a);
            let l = vec_sub(&spec.dot_vec(&eu, &ea), &ea);
            record(&mut rep, "left unit", &[a], &l, false, false);
            let r = vec_sub(&spec.dot_vec(&ea, &eu), &ea);
            record(&mut rep, "right unit", &[a], &r, false, false);
            let b = spec.bracket_vec(&eu, &ea);
            record(&mut rep, "unit brackets to zero", &[a], &b, false, window);
        }
    }
    rep
}

fn left_mult(spec: &AlgebraSpec, a: usize) -> Matrix {
    let n = spec.dim();
    let cols: Vec<Vector> = (0..n).map(|b| spec.dot_vec(&spec.e(a), &spec.e(b))).collect();
    Matrix::from_columns(n, &cols)
}

/// Split an operator into its parity-preserving and parity-reversing parts.
fn parity_parts(m: &Matrix, odd: &[bool]) -> (Matrix, Matrix) {
    let mut e = Matrix::zeros(m.rows(), m.cols());
    let mut o = Matrix::zeros(m.rows(), m.cols());
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if odd[r] == odd[c] {
                e[(r, c)] = m[(r, c)].clone();
            } else {
                o[(r, c)] = m[(r, c)].clone();
            }
        }
    }
    (e, o)
}

fn order_at_most(op: &Matrix, k: i64, lmul: &[Matrix], odd: &[bool]) -> bool {
    if op.is_zero() {
        return true;
    }
    if k < 0 {
        return false;
    }
    let (e, o) = parity_parts(op, odd);
    for (part, p) in [(e, false), (o, true)] {
        if part.is_zero() {
            continue;
        }
        for (a, la) in lmul.iter().enumerate() {
            // [D, l_a] = D l_a − (−1)^{D̃ ã} l_a D
            let s = if p && odd[a] { Rational::from_int(-1) } else { Rational::one() };
            let c = part.mul(la).sub(&la.mul(&part).scale(&s));
            if !order_at_most(&c, k - 1, lmul, odd) {
                return false;
            }
        }
    }
    true
}

/// Whether an arity-1 operator has order ≤ k with respect to the dot product.
pub fn operator_order(op: &SparseTensor, spec: &AlgebraSpec, k: i64) -> bool {
    let n = spec.dim();
    let lmul: Vec<Matrix> = (0..n).map(|a| left_mult(spec, a)).collect();
    order_at_most(&op.matrix(n, n), k, &lmul, &spec.odd_mask())
}

/// [a•b] := (−1)^ã Δ(ab) − (−1)^ã (Δa)b − a(Δb)
pub fn bracket_from_bv(spec: &AlgebraSpec) -> Result<SparseTensor, SpecError> {
    let bv = spec.bv.as_ref().ok_or_else(|| SpecError::Precondition("no BV operator declared".into()))?;
    if spec.dot.is_none() {
        return Err(SpecError::Precondition("no dot product declared".into()));
    }
    let n = spec.dim();
    if !operator_order(bv, spec, 2) {
        return Err(SpecError::Precondition("BV operator is not of order 2".into()));
    }
    let delta = bv.matrix(n, n);
    if !delta.mul(&delta).is_zero() {
        return Err(SpecError::Precondition("BV operator does not square to zero".into()));
    }
    let d = spec.d_matrix();
    if !d.mul(&delta).add(&delta.mul(&d)).is_zero() {
        return Err(SpecError::Precondition("d and the BV operator do not anticommute".into()));
    }
    let mut out = SparseTensor::new(2);
    for a in 0..n {
        for b in 0..n {
            let (ea, eb) = (spec.e(a), spec.e(b));
            let s = sgn(spec.is_odd(a));
            let mut v = vec_scale(&spec.bv_vec(&spec.dot_vec(&ea, &eb)), &s);
            axpy(&mut v, &-s.clone(), &spec.dot_vec(&spec.bv_vec(&ea), &eb));
            axpy(&mut v, &Rational::from_int(-1), &spec.dot_vec(&ea, &spec.bv_vec(&eb)));
            for (o, c) in v.into_iter().enumerate() {
                out.add(o, &[a, b], c);
            }
        }
    }
    Ok(out)
}

/// Coordinate ring with one coordinate x_a per basis element.
pub fn basis_coordinate_ring(basis: &GradedBasis, truncation: usize) -> Arc<CoordinateRing> {
    let names = basis.names.iter().map(|n| format!("x_{n}")).collect();
    CoordinateRing::for_degrees(names, &basis.degrees, truncation)
}

/// (−1)^{n(n+1)/2}/n!
pub fn chen_coefficient(n: usize) -> Rational {
    let sign = if (n * (n + 1) / 2) % 2 == 1 { -1 } else { 1 };
    Rational::new(sign, factorial(n))
}

pub fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// Multinomial n!/∏ mᵢ! of a sorted tuple.
pub fn multiplicity(sorted: &[usize]) -> i64 {
    let mut denom = 1i64;
    let mut run = 1i64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
            denom *= run;
        } else {
            run = 1;
        }
    }
    factorial(sorted.len()) / denom
}

fn repeat_factor(sorted: &[usize]) -> i64 {
    factorial(sorted.len()) / multiplicity(sorted)
}

/// Sign for pulling the coordinate coefficients out of μ(x^{a₁}e_{a₁}, …):
/// each coefficient moves past the operation (if `op_odd`), the earlier
/// basis elements and the earlier separators.
pub fn extraction_sign(tuple: &[usize], odd: &[bool], op_odd: bool) -> bool {
    let mut s = false;
    let mut passed = false;
    for (j, &a) in tuple.iter().enumerate() {
        if odd[a] && (op_odd ^ passed ^ (j % 2 == 1)) {
            s = !s;
        }
        passed ^= odd[a];
    }
    s
}

/// An L∞ structure in the odd convention: μₙ graded symmetric in the
/// shifted sense, of degree 3 − 2n, stored on sorted tuples only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LInfinityStructure {
    pub host: GradedBasis,
    /// ops[n−1] = μₙ
    pub ops: Vec<SparseTensor>,
}

impl LInfinityStructure {
    pub fn zero(host: GradedBasis, cap: usize) -> Self {
        LInfinityStructure { ops: (1..=cap).map(SparseTensor::new).collect(), host }
    }

    /// μ₁ = d, μ₂ = [•], nothing higher.
    pub fn from_dlie(spec: &AlgebraSpec) -> Self {
        let mut s = LInfinityStructure::zero(spec.basis.clone(), 2);
        s.ops[0] = spec.differential.clone();
        for (ins, row) in spec.bracket.rows() {
            if ins[0] <= ins[1] {
                for (o, c) in row {
                    s.ops[1].add(*o, ins, c.clone());
                }
            }
        }
        s
    }

    pub fn arity_cap(&self) -> usize {
        self.ops.len()
    }

    pub fn op(&self, n: usize) -> Option<&SparseTensor> {
        self.ops.get(n - 1)
    }

    fn odd(&self) -> Vec<bool> {
        (0..self.host.dim()).map(|i| self.host.is_odd(i)).collect()
    }

    /// μₙ on an arbitrary basis tuple.
    pub fn eval(&self, tuple: &[usize]) -> Vector {
        let dim = self.host.dim();
        let Some(t) = self.op(tuple.len()) else {
            return vec![Rational::zero(); dim];
        };
        match odd_symmetric_canonical(tuple, &self.odd()) {
            None => vec![Rational::zero(); dim],
            Some((s, sign)) => vec_scale(&t.eval_basis(&s, dim), &Rational::from_int(sign as i64)),
        }
    }

    /// Set μₙ on a tuple (stored in sorted form).
    pub fn set(&mut self, tuple: &[usize], out: usize, c: Rational) {
        let n = tuple.len();
        while self.ops.len() < n {
            let k = self.ops.len() + 1;
            self.ops.push(SparseTensor::new(k));
        }
        if let Some((s, sign)) = odd_symmetric_canonical(tuple, &self.odd()) {
            let old = self.ops[n - 1].value(out, &s);
            self.ops[n - 1].add(out, &s, -old);
            self.ops[n - 1].add(out, &s, c.signed(sign < 0));
        }
    }

    pub fn coordinate_ring(&self, truncation: usize) -> Arc<CoordinateRing> {
        basis_coordinate_ring(&self.host, truncation)
    }

    /// The homological vector field Q^a = Σₙ cₙ [μₙ(X•…•X)]^a, X = Σ x^a e_a.
    pub fn homological_field(&self, ring: &Arc<CoordinateRing>) -> Derivation {
        let dim = self.host.dim();
        let odd = self.odd();
        let mut coeffs = vec![TruncatedSeries::zero(ring); dim];
        for (idx, t) in self.ops.iter().enumerate() {
            let n = idx + 1;
            if n > ring.truncation {
                break;
            }
            let cn = chen_coefficient(n);
            for (ins, row) in t.rows() {
                let Some((m, neg)) = Monomial::from_indices(dim, ins, &odd) else { continue };
                let s = (&cn * &Rational::from_int(multiplicity(ins))).signed(neg ^ extraction_sign(ins, &odd, n % 2 == 1));
                for (o, c) in row {
                    coeffs[*o].add_term(m.clone(), c * &s);
                }
            }
        }
        Derivation::from_coeffs(ring, coeffs)
    }

    /// Inverse of `homological_field`: read μₙ off the degree-n Taylor coefficients.
    pub fn from_homological_field(host: GradedBasis, q: &Derivation, cap: usize) -> Self {
        let mut s = LInfinityStructure::zero(host, cap);
        let odd = s.odd();
        for (k, coeff) in q.coeffs().iter().enumerate() {
            for (m, c) in coeff.terms() {
                let n = m.degree();
                if n == 0 || n > cap {
                    continue;
                }
                let ins = m.indices();
                let denom = &chen_coefficient(n) * &Rational::from_int(multiplicity(&ins));
                let v = (c / &denom).signed(extraction_sign(&ins, &odd, n % 2 == 1));
                s.ops[n - 1].add(k, &ins, v);
            }
        }
        s
    }

    /// Entries whose degree is not Σ deg + 3 − 2n.
    pub fn degree_violations(&self) -> Report {
        let mut rep = Report::new();
        for (idx, t) in self.ops.iter().enumerate() {
            let n = idx as i64 + 1;
            for (o, ins, c) in t.entries() {
                let expected = ins.iter().map(|&i| self.host.degrees[i]).sum::<i64>() + 3 - 2 * n;
                if self.host.degrees[o] != expected {
                    let mut idx = ins.clone();
                    idx.push(o);
                    rep.push("degree homogeneity", &idx, format!("coefficient {c}"));
                }
            }
        }
        rep
    }
}

/// The L∞ relations through arity `cap`, checked as Q² = 0 on coordinates.
pub fn validate_linf(structure: &LInfinityStructure, cap: usize) -> Report {
    let ring = structure.coordinate_ring(cap.max(1));
    let q = structure.homological_field(&ring);
    let mut rep = Report::new();
    for (a, sq) in q.square_on_coordinates().iter().enumerate() {
        for (m, c) in sq.terms() {
            let mut idx = m.indices();
            idx.push(a);
            rep.push(&format!("L-infinity relation of arity {}", m.degree()), &idx, format!("coefficient {c}"));
        }
    }
    rep
}

/// An L∞ morphism with even components Fₙ, stored on sorted tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LInfinityMorphism {
    pub source: GradedBasis,
    pub target: GradedBasis,
    /// components[n−1] = Fₙ
    pub components: Vec<SparseTensor>,
}

impl LInfinityMorphism {
    pub fn identity(basis: &GradedBasis) -> Self {
        let mut f1 = SparseTensor::new(1);
        for i in 0..basis.dim() {
            f1.add(i, &[i], Rational::one());
        }
        LInfinityMorphism { source: basis.clone(), target: basis.clone(), components: vec![f1] }
    }

    fn source_odd(&self) -> Vec<bool> {
        (0..self.source.dim()).map(|i| self.source.is_odd(i)).collect()
    }

    /// Pullback of target coordinates: F*(y^b) = Σ 1/n! [Fₙ(X•…•X)]^b.
    pub fn pullback(&self, ring: &Arc<CoordinateRing>) -> Vec<TruncatedSeries> {
        let dim = self.source.dim();
        let odd = self.source_odd();
        let mut out = vec![TruncatedSeries::zero(ring); self.target.dim()];
        for t in &self.components {
            if t.arity > ring.truncation {
                break;
            }
            for (ins, row) in t.rows() {
                let Some((m, neg)) = Monomial::from_indices(dim, ins, &odd) else { continue };
                let s = Rational::new(1, repeat_factor(ins)).signed(neg ^ extraction_sign(ins, &odd, false));
                for (o, c) in row {
                    out[*o].add_term(m.clone(), c * &s);
                }
            }
        }
        out
    }

    /// Inverse of `pullback`.
    pub fn from_pullback(source: GradedBasis, target: GradedBasis, images: &[TruncatedSeries], cap: usize) -> Self {
        let odd: Vec<bool> = (0..source.dim()).map(|i| source.is_odd(i)).collect();
        let mut components: Vec<SparseTensor> = (1..=cap).map(SparseTensor::new).collect();
        for (b, img) in images.iter().enumerate() {
            for (m, c) in img.terms() {
                let n = m.degree();
                if n == 0 || n > cap {
                    continue;
                }
                let ins = m.indices();
                let v = (c * &Rational::from_int(repeat_factor(&ins))).signed(extraction_sign(&ins, &odd, false));
                components[n - 1].add(b, &ins, v);
            }
        }
        LInfinityMorphism { source, target, components }
    }

    /// Fₙ on an arbitrary basis tuple.
    pub fn eval(&self, tuple: &[usize]) -> Vector {
        let dim = self.target.dim();
        let Some(t) = self.components.get(tuple.len().wrapping_sub(1)) else {
            return vec![Rational::zero(); dim];
        };
        match odd_symmetric_canonical(tuple, &self.source_odd()) {
            None => vec![Rational::zero(); dim],
            Some((s, sign)) => vec_scale(&t.eval_basis(&s, dim), &Rational::from_int(sign as i64)),
        }
    }
}

/// The morphism equations through arity `cap`, as Q₁∘F* = F*∘Q₂ on target coordinates.
pub fn validate_linf_morphism(
    f: &LInfinityMorphism,
    src: &LInfinityStructure,
    tgt: &LInfinityStructure,
    cap: usize,
) -> Report {
    let xring = src.coordinate_ring(cap);
    let yring = tgt.coordinate_ring(cap);
    let q1 = src.homological_field(&xring);
    let q2 = tgt.homological_field(&yring);
    let images = f.pullback(&xring);
    let mut rep = Report::new();
    for b in 0..tgt.host.dim() {
        let lhs = q1.apply(&images[b]);
        let rhs = q2.coeff(b).substitute(&images, &xring);
        for (m, c) in lhs.sub(&rhs).terms() {
            let mut idx = m.indices();
            idx.push(b);
            rep.push(&format!("morphism equation of arity {}", m.degree()), &idx, format!("coefficient {c}"));
        }
    }
    rep
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PushforwardError {
    #[error("element has a nonzero constant term in component {0}")]
    NotInMaximalIdeal(usize),
    #[error("element has {found} components, morphism source has {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// F_*(Γ) = Σ 1/n! Fₙ(Γ,…,Γ), i.e. substitution of Γ into the pullback.
pub fn pushforward(f: &LInfinityMorphism, gamma: &GElement) -> Result<GElement, PushforwardError> {
    if gamma.dim() != f.source.dim() {
        return Err(PushforwardError::DimensionMismatch { expected: f.source.dim(), found: gamma.dim() });
    }
    let ring = gamma.ring().clone();
    for (a, c) in gamma.components().iter().enumerate() {
        if c.min_degree() == Some(0) {
            return Err(PushforwardError::NotInMaximalIdeal(a));
        }
    }
    let src = basis_coordinate_ring(&f.source, ring.truncation);
    let images = f.pullback(&src);
    let comps = images.iter().map(|p| p.substitute(gamma.components(), &ring)).collect();
    Ok(GElement::from_components(&ring, comps))
}

/// Name-based construction of an `AlgebraSpec`.
#[derive(Clone, Debug, Default)]
pub struct AlgebraBuilder {
    basis: Vec<(String, i64)>,
    differential: Vec<(String, Vec<String>, Rational)>,
    bracket: Vec<(String, Vec<String>, Rational)>,
    dot: Option<Vec<(String, Vec<String>, Rational)>>,
    bv: Option<Vec<(String, Vec<String>, Rational)>>,
    unit: Option<String>,
    tags: Vec<String>,
}

impl AlgebraBuilder {
    pub fn new() -> Self {
        AlgebraBuilder::default()
    }

    pub fn element(mut self, name: &str, degree: i64) -> Self {
        self.basis.push((name.into(), degree));
        self
    }

    fn terms(inputs: &[&str], terms: &[(&str, Rational)]) -> Vec<(String, Vec<String>, Rational)> {
        terms.iter().map(|(o, c)| (o.to_string(), inputs.iter().map(|s| s.to_string()).collect(), c.clone())).collect()
    }

    pub fn d(mut self, a: &str, terms: &[(&str, Rational)]) -> Self {
        self.differential.extend(Self::terms(&[a], terms));
        self
    }

    pub fn bracket(mut self, a: &str, b: &str, terms: &[(&str, Rational)]) -> Self {
        self.bracket.extend(Self::terms(&[a, b], terms));
        self
    }

    pub fn dot(mut self, a: &str, b: &str, terms: &[(&str, Rational)]) -> Self {
        self.dot.get_or_insert_with(Vec::new).extend(Self::terms(&[a, b], terms));
        self
    }

    /// Declare a (possibly empty) product table.
    pub fn with_dot(mut self) -> Self {
        self.dot.get_or_insert_with(Vec::new);
        self
    }

    pub fn bv(mut self, a: &str, terms: &[(&str, Rational)]) -> Self {
        self.bv.get_or_insert_with(Vec::new).extend(Self::terms(&[a], terms));
        self
    }

    pub fn with_bv(mut self) -> Self {
        self.bv.get_or_insert_with(Vec::new);
        self
    }

    pub fn unit(mut self, name: &str) -> Self {
        self.unit = Some(name.into());
        self
    }

    pub fn tag(mut self, tag: &str) -> Self {
        self.tags.push(tag.into());
        self
    }

    pub fn build(self) -> Result<AlgebraSpec, SpecError> {
        let basis = GradedBasis::new(self.basis.clone()).map_err(|e| SpecError::Precondition(e.to_string()))?;
        let idx = |n: &str| basis.index_of(n).ok_or_else(|| SpecError::UnknownName(n.into()));
        let tensor = |arity: usize, entries: &[(String, Vec<String>, Rational)]| -> Result<SparseTensor, SpecError> {
            let mut t = SparseTensor::new(arity);
            for (o, ins, c) in entries {
                let ins: Vec<usize> = ins.iter().map(|s| idx(s)).collect::<Result<_, _>>()?;
                t.add(idx(o)?, &ins, c.clone());
            }
            Ok(t)
        };
        let d = tensor(1, &self.differential)?;
        let br = tensor(2, &self.bracket)?;
        let dot = self.dot.as_ref().map(|e| tensor(2, e)).transpose()?;
        let bv = self.bv.as_ref().map(|e| tensor(1, e)).transpose()?;
        let unit = self.unit.as_deref().map(idx).transpose()?;
        AlgebraSpec::new(basis, d, br, dot, unit, bv, self.tags)
    }
}

/// Shorthand for integer structure constants.
pub fn q(n: i64) -> Rational {
    Rational::from_int(n)
}
