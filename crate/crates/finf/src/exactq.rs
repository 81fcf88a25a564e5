//! Exact rational arithmetic and dense linear algebra over Q.
//!
//! Every pivot and complement choice is greedy-lexicographic, so identical
//! inputs always give bit-identical outputs.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// An exact rational number, always stored in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }

    /// Multiply by ±1 according to a parity bit.
    pub fn signed(self, odd: bool) -> Self {
        if odd {
            -self
        } else {
            self
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("not a rational literal: {0:?} (expected \"p\" or \"p/q\")")]
pub struct ParseRationalError(pub String);

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| err())?;
        let d: BigInt = d.parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        Ok(Rational(BigRational::new(n, d)))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $op:tt) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $f(self, rhs: &Rational) -> Rational {
                Rational(&self.0 $op &rhs.0)
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $f(self, rhs: Rational) -> Rational {
                Rational(self.0 $op rhs.0)
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $f(self, rhs: &Rational) -> Rational {
                Rational(self.0 $op &rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("inconsistent linear system")]
    Inconsistent,
    #[error("dependent input vectors")]
    DependentInput,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// A dense row-major matrix of rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rational {
        &mut self.data[r * self.cols + c]
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Rational::from_int(x)).collect()).collect())
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, cols: &[Vec<Rational>]) -> Self {
        assert!(cols.iter().all(|c| c.len() == rows), "column length mismatch");
        Matrix::from_fn(rows, cols.len(), |r, c| cols[c][r].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rational::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = &other[(k, c)];
                    if !b.is_zero() {
                        let p = a * b;
                        out[(r, c)] += &p;
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|r| {
                let mut acc = Rational::zero();
                for (c, x) in v.iter().enumerate() {
                    let a = &self[(r, c)];
                    if !a.is_zero() && !x.is_zero() {
                        acc += &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |r, c| &self[(r, c)] + &other[(r, c)])
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |r, c| &self[(r, c)] - &other[(r, c)])
    }

    pub fn scale(&self, s: &Rational) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |r, c| &self[(r, c)] * s)
    }

    pub fn rank(&self) -> usize {
        rref(self).1.len()
    }

    pub fn inverse(&self) -> Result<Matrix, LinAlgError> {
        if self.rows != self.cols {
            return Err(LinAlgError::DimensionMismatch(format!("{}x{} is not square", self.rows, self.cols)));
        }
        let n = self.rows;
        let aug = Matrix::from_fn(n, 2 * n, |r, c| {
            if c < n {
                self[(r, c)].clone()
            } else if c - n == r {
                Rational::one()
            } else {
                Rational::zero()
            }
        });
        let (red, pivots) = rref(&aug);
        if n > 0 && (pivots.len() < n || pivots[n - 1] >= n) {
            return Err(LinAlgError::DependentInput);
        }
        Ok(Matrix::from_fn(n, n, |r, c| red[(r, n + c)].clone()))
    }
}

/// Reduced row echelon form with the leftmost-nonzero pivot rule.
pub fn rref(m: &Matrix) -> (Matrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&r| !a[(r, col)].is_zero()) else {
            continue;
        };
        if p != row {
            for c in 0..a.cols {
                a.data.swap(p * a.cols + c, row * a.cols + c);
            }
        }
        let inv = a[(row, col)].recip();
        for c in col..a.cols {
            let v = &a[(row, c)] * &inv;
            a[(row, c)] = v;
        }
        for r in 0..a.rows {
            if r == row || a[(r, col)].is_zero() {
                continue;
            }
            let f = a[(r, col)].clone();
            for c in col..a.cols {
                if a[(row, c)].is_zero() {
                    continue;
                }
                let v = &a[(r, c)] - &(&f * &a[(row, c)]);
                a[(r, c)] = v;
            }
        }
        pivots.push(col);
        row += 1;
    }
    (a, pivots)
}

/// A particular solution of `a x = b` with all free variables set to zero.
pub fn solve(a: &Matrix, b: &[Rational]) -> Result<Vec<Rational>, LinAlgError> {
    if b.len() != a.rows {
        return Err(LinAlgError::DimensionMismatch(format!("{} rows vs rhs of length {}", a.rows, b.len())));
    }
    let aug = Matrix::from_fn(a.rows, a.cols + 1, |r, c| if c < a.cols { a[(r, c)].clone() } else { b[r].clone() });
    let (red, pivots) = rref(&aug);
    if pivots.last() == Some(&a.cols) {
        return Err(LinAlgError::Inconsistent);
    }
    let mut x = vec![Rational::zero(); a.cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = red[(r, a.cols)].clone();
    }
    Ok(x)
}

/// Basis of the null space, one vector per free column in increasing order.
pub fn kernel_basis(a: &Matrix) -> Vec<Vec<Rational>> {
    let (red, pivots) = rref(a);
    let mut out = Vec::new();
    let mut is_pivot = vec![false; a.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    for free in (0..a.cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Rational::zero(); a.cols];
        v[free] = Rational::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -&red[(r, free)];
        }
        out.push(v);
    }
    out
}

/// Basis of the column space: the original columns at pivot positions.
pub fn image_basis(a: &Matrix) -> Vec<Vec<Rational>> {
    let (_, pivots) = rref(a);
    pivots.into_iter().map(|c| a.column(c)).collect()
}

/// Standard basis vectors extending `sub` to a basis of the ambient space,
/// chosen greedily in increasing index order.
pub fn complement_basis(sub: &[Vec<Rational>], ambient: usize) -> Result<Vec<Vec<Rational>>, LinAlgError> {
    if sub.iter().any(|v| v.len() != ambient) {
        return Err(LinAlgError::DimensionMismatch("vector length differs from ambient dimension".into()));
    }
    let m = Matrix::from_columns(ambient, sub);
    if m.rank() != sub.len() {
        return Err(LinAlgError::DependentInput);
    }
    let mut span: Vec<Vec<Rational>> = sub.to_vec();
    let mut out = Vec::new();
    for i in 0..ambient {
        let mut e = vec![Rational::zero(); ambient];
        e[i] = Rational::one();
        span.push(e.clone());
        if Matrix::from_columns(ambient, &span).rank() == span.len() {
            out.push(e);
        } else {
            span.pop();
        }
        if span.len() == ambient {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn rational_normalizes_and_prints() {
        let r = Rational::new(6, -4);
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!(Rational::new(0, 5).to_string(), "0");
        assert_eq!("4/6".parse::<Rational>().unwrap(), Rational::new(2, 3));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("0.5".parse::<Rational>().is_err());
    }

    #[test]
    fn rref_identity_and_rank_one() {
        let (r, p) = rref(&Matrix::identity(2));
        assert_eq!(r, Matrix::identity(2));
        assert_eq!(p, vec![0, 1]);
        let (r, p) = rref(&Matrix::from_int_rows(&[&[2, 4], &[1, 2]]));
        assert_eq!(r, Matrix::from_int_rows(&[&[1, 2], &[0, 0]]));
        assert_eq!(p, vec![0]);
    }

    #[test]
    fn solve_trivial_cases() {
        let b = vec![q(3), q(-1)];
        assert_eq!(solve(&Matrix::identity(2), &b).unwrap(), b);
        assert_eq!(solve(&Matrix::zeros(2, 3), &[q(0), q(0)]).unwrap(), vec![q(0); 3]);
        assert_eq!(solve(&Matrix::zeros(2, 2), &[q(1), q(0)]), Err(LinAlgError::Inconsistent));
    }

    #[test]
    fn kernels_and_complements() {
        assert!(kernel_basis(&Matrix::identity(3)).is_empty());
        let k = kernel_basis(&Matrix::zeros(3, 3));
        assert_eq!(k, vec![vec![q(1), q(0), q(0)], vec![q(0), q(1), q(0)], vec![q(0), q(0), q(1)]]);
        let c = complement_basis(&[vec![q(1), q(1)]], 2).unwrap();
        assert_eq!(c, vec![vec![q(1), q(0)]]);
        assert_eq!(complement_basis(&[vec![q(1), q(1)], vec![q(2), q(2)]], 2), Err(LinAlgError::DependentInput));
    }
}
