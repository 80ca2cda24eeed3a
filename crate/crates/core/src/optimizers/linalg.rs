//! Exact solution of square linear systems by fraction-free Gauss–Jordan
//! elimination, over machine integers with a big-integer fallback, over the
//! rationals, and over univariate polynomials.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::upoly::UPoly;
use crate::rational::Rational;

/// Solution `x_i = numerators[i] / denominator` of a square system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntSolution<T> {
    pub numerators: Vec<T>,
    pub denominator: T,
}

/// Raised by fixed-width arithmetic when a result does not fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Overflow;

/// Exact integer arithmetic, checked for fixed-width types.
pub trait Ring: Clone + Send + Sync + Sized {
    fn from_i64(v: i64) -> Self;
    fn from_bigint(v: &BigInt) -> Option<Self>;
    fn to_bigint(&self) -> BigInt;
    fn is_zero(&self) -> bool;
    fn signum(&self) -> i32;
    fn add(&self, o: &Self) -> Result<Self, Overflow>;
    fn sub(&self, o: &Self) -> Result<Self, Overflow>;
    fn mul(&self, o: &Self) -> Result<Self, Overflow>;
    /// Division known to be exact.
    fn div(&self, o: &Self) -> Self;
    fn gcd(&self, o: &Self) -> Self;
    fn neg(&self) -> Result<Self, Overflow>;
}

impl Ring for i128 {
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn from_bigint(v: &BigInt) -> Option<Self> {
        v.to_i128().filter(|x| x.unsigned_abs() < (1u128 << 100))
    }
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn signum(&self) -> i32 {
        i128::signum(*self) as i32
    }
    fn add(&self, o: &Self) -> Result<Self, Overflow> {
        self.checked_add(*o).ok_or(Overflow)
    }
    fn sub(&self, o: &Self) -> Result<Self, Overflow> {
        self.checked_sub(*o).ok_or(Overflow)
    }
    fn mul(&self, o: &Self) -> Result<Self, Overflow> {
        self.checked_mul(*o).ok_or(Overflow)
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn neg(&self) -> Result<Self, Overflow> {
        self.checked_neg().ok_or(Overflow)
    }
}

impl Ring for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn from_bigint(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn signum(&self) -> i32 {
        signum_big(self)
    }
    fn add(&self, o: &Self) -> Result<Self, Overflow> {
        Ok(self + o)
    }
    fn sub(&self, o: &Self) -> Result<Self, Overflow> {
        Ok(self - o)
    }
    fn mul(&self, o: &Self) -> Result<Self, Overflow> {
        Ok(self * o)
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn neg(&self) -> Result<Self, Overflow> {
        Ok(-self)
    }
}

/// Fraction-free Gauss–Jordan elimination on the augmented matrix `[A | b]`
/// (Bareiss). `Ok(None)` if `A` is singular.
pub fn bareiss<T: Ring>(mut m: Vec<Vec<T>>) -> Result<Option<IntSolution<T>>, Overflow> {
    let n = m.len();
    let mut prev = T::from_i64(1);
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return Ok(None);
        };
        m.swap(k, p);
        let pivot = m[k][k].clone();
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = m[i][k].clone();
            for j in 0..=n {
                if j == k {
                    continue;
                }
                let v = pivot.mul(&m[i][j])?.sub(&f.mul(&m[k][j])?)?;
                m[i][j] = v.div(&prev);
            }
            m[i][k] = T::from_i64(0);
        }
        prev = pivot;
    }
    // every diagonal entry now equals the last pivot
    let d = if n == 0 { T::from_i64(1) } else { m[n - 1][n - 1].clone() };
    Ok(Some(IntSolution { numerators: m.into_iter().map(|row| row[n].clone()).collect(), denominator: d }))
}

/// Solves an integer system, trying `i128` first.
pub fn solve_integer(m: &[Vec<BigInt>]) -> Option<IntSolution<BigInt>> {
    let small: Option<Vec<Vec<i128>>> = m.iter().map(|row| row.iter().map(i128::from_bigint).collect()).collect();
    if let Some(small) = small {
        if let Ok(s) = bareiss(small) {
            return s.map(|s| IntSolution {
                numerators: s.numerators.iter().map(Ring::to_bigint).collect(),
                denominator: s.denominator.to_bigint(),
            });
        }
    }
    bareiss(m.to_vec()).expect("big integers do not overflow")
}

/// Scales a rational row by the lcm of its denominators.
pub fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect()
}

/// Unique solution of the square system `a x = b`, or `None` if singular.
pub fn solve_rational(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let m: Vec<Vec<BigInt>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            integer_row(&r)
        })
        .collect();
    let s = solve_integer(&m)?;
    Some(s.numerators.into_iter().map(|x| Rational::new(x, s.denominator.clone())).collect())
}

/// The affine solution set of a (possibly non-square) system `a x = b`:
/// a particular solution and a basis of the null space of `a`; `None` if
/// the system is inconsistent.
pub fn affine_solutions(a: &[Vec<Rational>], b: &[Rational], n: usize) -> Option<(Vec<Rational>, Vec<Vec<Rational>>)> {
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=n {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut particular = vec![Rational::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        particular[c] = m[i][n].clone();
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); n];
            v[f] = Rational::one();
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = -m[i][f].clone();
            }
            v
        })
        .collect();
    Some((particular, basis))
}

/// Solution of a square system over `Q[t]`: `x_i = numerators[i] / det`
/// as rational functions; `None` if the determinant vanishes identically.
pub fn solve_poly(mut m: Vec<Vec<UPoly>>) -> Option<IntSolution<UPoly>> {
    let n = m.len();
    let mut prev = UPoly::constant(Rational::one());
    for k in 0..n {
        let p = (k..n).filter(|&r| !m[r][k].is_zero()).min_by_key(|&r| m[r][k].degree())?;
        m.swap(k, p);
        let pivot = m[k][k].clone();
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = m[i][k].clone();
            for j in 0..=n {
                if j == k {
                    continue;
                }
                let v = pivot.mul(&m[i][j]).sub(&f.mul(&m[k][j]));
                m[i][j] = v.exact_div(&prev).expect("fraction-free elimination divides exactly");
            }
            m[i][k] = UPoly::zero();
        }
        prev = pivot;
    }
    let d = if n == 0 { UPoly::constant(Rational::one()) } else { m[n - 1][n - 1].clone() };
    Some(IntSolution { numerators: m.iter().map(|row| row[n].clone()).collect(), denominator: d })
}

/// Fraction-free row echelon form of an augmented `rows × (cols + 1)`
/// system over `Q[t]`, skipping columns without a pivot. Returns the gcd of
/// the right-hand sides left in rows whose coefficient part vanishes
/// identically: the system has a solution only at roots of it. Also returns
/// the pivot minor, whose roots are where the rank drops. `None` when all
/// those right-hand sides are zero.
pub fn poly_consistency(mut m: Vec<Vec<UPoly>>, cols: usize) -> Option<(UPoly, UPoly)> {
    let rows = m.len();
    let mut prev = UPoly::constant(Rational::one());
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).filter(|&i| !m[i][c].is_zero()).min_by_key(|&i| m[i][c].degree()) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in r + 1..rows {
            let f = m[i][c].clone();
            for j in c..=cols {
                let v = pivot.mul(&m[i][j]).sub(&f.mul(&m[r][j]));
                m[i][j] = v.exact_div(&prev).expect("fraction-free elimination divides exactly");
            }
        }
        prev = pivot;
        r += 1;
    }
    let g = m[r..].iter().map(|row| &row[cols]).filter(|p| !p.is_zero()).fold(None, |g: Option<UPoly>, p| {
        Some(match g {
            None => p.monic(),
            Some(g) => g.gcd(p),
        })
    })?;
    Some((g, prev))
}

/// A basis of the span of `vectors`, in row echelon form.
pub fn row_basis(vectors: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut m = vectors.to_vec();
    let n = m.first().map_or(0, |v| v.len());
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in r + 1..m.len() {
            if !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..n {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}

/// `x.signum()` as an `i32` for either integer type.
pub fn signum_big(x: &BigInt) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}
