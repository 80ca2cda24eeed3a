//! Univariate polynomials over the rationals, Sturm sequences, real-root
//! isolation and exact sign determination at real algebraic numbers.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{fmt_decimal, fmt_rational, parse_rational, Rational};

/// Coefficients from the constant term upward; never has a zero leading
/// coefficient.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct UPoly {
    coeffs: Vec<Rational>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial `t`.
    pub fn t() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial at `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn add(&self, other: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = Rational::zero();
        UPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + other.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn sub(&self, other: &UPoly) -> UPoly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, s: &Rational) -> UPoly {
        UPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &UPoly) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UPoly::new(out)
    }

    pub fn pow(&self, k: u32) -> UPoly {
        let mut out = UPoly::constant(Rational::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.coeffs.len() - 1;
        let lead = d.lead();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (UPoly::new(quot), UPoly::new(rem))
    }

    /// Exact quotient; errors if `d` does not divide `self`.
    pub fn exact_div(&self, d: &UPoly) -> Result<UPoly> {
        let (q, r) = self.div_rem(d);
        if !r.is_zero() {
            return Err(Error::Solver("inexact polynomial division".into()));
        }
        Ok(q)
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return UPoly::zero();
        }
        self.scale(&(Rational::one() / self.lead()))
    }

    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `self / gcd(self, self')`: same roots, all simple.
    pub fn squarefree(&self) -> UPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    pub fn compose_affine(&self, a: &Rational, b: &Rational) -> UPoly {
        // self(a + b t)
        let lin = UPoly::new(vec![a.clone(), b.clone()]);
        let mut acc = UPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&UPoly::constant(c.clone()));
        }
        acc
    }

    pub fn sign_at(&self, t: &Rational) -> Ordering {
        self.eval(t).cmp(&Rational::zero())
    }

    /// Enclosure of the values on `[lo, hi]` by interval Horner evaluation.
    pub fn eval_interval(&self, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
        let mut acc = (Rational::zero(), Rational::zero());
        for c in self.coeffs.iter().rev() {
            let products = [&acc.0 * lo, &acc.0 * hi, &acc.1 * lo, &acc.1 * hi];
            let min = products.iter().min().unwrap().clone();
            let max = products.iter().max().unwrap().clone();
            acc = (min + c, max + c);
        }
        acc
    }
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = fmt_rational(&c.abs());
            match i {
                0 => f.write_str(&a)?,
                1 => write!(f, "{a}*t")?,
                _ => write!(f, "{a}*t^{i}")?,
            }
        }
        Ok(())
    }
}

/// Parses a polynomial in `t` written as a sum of terms, each a product of
/// rational constants (`3/2`, `0.0345`, `1e-3`), `t` and powers `t^k`.
/// Parentheses are not supported.
pub fn parse_upoly(text: &str) -> Result<UPoly> {
    let src: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if src.is_empty() {
        return Err(Error::invalid("empty polynomial"));
    }
    let bad = |why: &str| Error::invalid(format!("polynomial {text:?}: {why}"));
    let mut terms: Vec<&str> = Vec::new();
    let mut start = 0;
    let bytes = src.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        // a sign right after an exponent marker belongs to the number
        if (b == b'+' || b == b'-') && i > start && !matches!(bytes[i - 1], b'e' | b'E' | b'*' | b'^') {
            terms.push(&src[start..i]);
            start = i;
        }
    }
    terms.push(&src[start..]);
    let mut out = UPoly::zero();
    for term in terms {
        let (neg, body) = match term.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, term.strip_prefix('+').unwrap_or(term)),
        };
        if body.is_empty() {
            return Err(bad("empty term"));
        }
        let mut coeff = Rational::one();
        let mut degree = 0usize;
        for factor in body.split('*') {
            if factor == "t" {
                degree += 1;
            } else if let Some(k) = factor.strip_prefix("t^") {
                degree += k.parse::<usize>().map_err(|_| bad("exponent is not a non-negative integer"))?;
            } else {
                coeff *= parse_rational(factor).map_err(|_| bad(&format!("unexpected factor {factor:?}")))?;
            }
        }
        if neg {
            coeff = -coeff;
        }
        let mut c = vec![Rational::zero(); degree + 1];
        c[degree] = coeff;
        out = out.add(&UPoly::new(c));
    }
    Ok(out)
}

/// Sturm sequence of a polynomial.
pub fn sturm_sequence(p: &UPoly) -> Vec<UPoly> {
    let mut seq = vec![p.clone(), p.derivative()];
    while !seq.last().unwrap().is_zero() {
        let n = seq.len();
        let r = seq[n - 2].div_rem(&seq[n - 1]).1;
        if r.is_zero() {
            break;
        }
        seq.push(r.scale(&-Rational::one()));
    }
    seq.retain(|q| !q.is_zero());
    seq
}

fn sign_changes(seq: &[UPoly], t: &Rational) -> usize {
    let signs: Vec<Ordering> = seq.iter().map(|q| q.sign_at(t)).filter(|s| *s != Ordering::Equal).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots in `(a, b]`.
pub fn count_roots(seq: &[UPoly], a: &Rational, b: &Rational) -> usize {
    sign_changes(seq, a).saturating_sub(sign_changes(seq, b))
}

/// A real root of a squarefree polynomial: either exact (`lo == hi`) or the
/// unique root in the open interval `(lo, hi)`, at whose ends the polynomial
/// has opposite nonzero signs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealRoot {
    pub poly: UPoly,
    pub lo: Rational,
    pub hi: Rational,
}

impl RealRoot {
    pub fn exact(value: Rational) -> Self {
        let poly = UPoly::new(vec![-value.clone(), Rational::one()]);
        RealRoot { poly, lo: value.clone(), hi: value }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// Halves the interval, snapping to an exact root if the midpoint is one.
    pub fn bisect(&mut self) {
        if self.is_exact() {
            return;
        }
        let mid = (&self.lo + &self.hi) / Rational::from_integer(2.into());
        let sm = self.poly.sign_at(&mid);
        if sm == Ordering::Equal {
            self.lo = mid.clone();
            self.hi = mid;
        } else if sm == self.poly.sign_at(&self.lo) {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
    }

    pub fn refine_to(&mut self, width: &Rational) {
        while !self.is_exact() && self.width() > *width {
            self.bisect();
        }
    }

    /// Whether `q` vanishes at this root, decided exactly through
    /// `gcd(poly, q)`.
    pub fn is_root_of(&self, q: &UPoly) -> bool {
        if self.is_exact() {
            return q.eval(&self.lo).is_zero();
        }
        let g = self.poly.gcd(q);
        if g.degree().unwrap_or(0) == 0 {
            return false;
        }
        // the root of `poly` in (lo, hi) is unique, so `g` has a root there
        // exactly when it changes sign across the interval
        g.sign_at(&self.lo) != g.sign_at(&self.hi)
    }

    /// Exact sign of `q` at the root.
    pub fn sign_of(&self, q: &UPoly) -> Ordering {
        if self.is_exact() {
            return q.sign_at(&self.lo);
        }
        if self.is_root_of(q) {
            return Ordering::Equal;
        }
        let mut r = self.clone();
        loop {
            let (lo, hi) = q.eval_interval(&r.lo, &r.hi);
            if lo > Rational::zero() {
                return Ordering::Greater;
            }
            if hi < Rational::zero() {
                return Ordering::Less;
            }
            r.bisect();
            if r.is_exact() {
                return q.sign_at(&r.lo);
            }
        }
    }

    /// Enclosure of `num/den` at the root of width at most `width`; `den`
    /// must not vanish at the root.
    pub fn enclose(&self, num: &UPoly, den: &UPoly, width: &Rational) -> Enclosure {
        if self.is_exact() {
            let v = num.eval(&self.lo) / den.eval(&self.lo);
            return Enclosure::exact(v);
        }
        let mut r = self.clone();
        loop {
            let (nl, nh) = num.eval_interval(&r.lo, &r.hi);
            let (dl, dh) = den.eval_interval(&r.lo, &r.hi);
            if dl.is_positive() || dh.is_negative() {
                let q = [&nl / &dl, &nl / &dh, &nh / &dl, &nh / &dh];
                let lo = q.iter().min().unwrap().clone();
                let hi = q.iter().max().unwrap().clone();
                if &hi - &lo <= *width {
                    return Enclosure { lo, hi };
                }
            }
            r.bisect();
            if r.is_exact() {
                return Enclosure::exact(num.eval(&r.lo) / den.eval(&r.lo));
            }
        }
    }

    /// The root as a rational number, if it is one.
    pub fn try_rational(&self) -> Option<Rational> {
        if self.is_exact() {
            return Some(self.lo.clone());
        }
        let c = self.poly.coeffs();
        let inside = |r: &Rational| *r > self.lo && *r < self.hi;
        match c.len() {
            2 => Some(-&c[0] / &c[1]).filter(inside),
            3 => {
                let disc = &c[1] * &c[1] - Rational::from_integer(4.into()) * &c[0] * &c[2];
                if disc.is_negative() {
                    return None;
                }
                let (n, d) = (disc.numer().sqrt(), disc.denom().sqrt());
                if &n * &n != *disc.numer() || &d * &d != *disc.denom() {
                    return None;
                }
                let s = Rational::new(n, d);
                let two_a = Rational::from_integer(2.into()) * &c[2];
                [(-&c[1] + &s) / &two_a, (-&c[1] - &s) / &two_a].into_iter().find(inside)
            }
            _ => {
                // a rational root p/q of the integer polynomial a_n t^n + ... has q | a_n,
                // so a_n·root is an integer, unique in an interval shorter than 1/|a_n|
                let l = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                let an = Rational::from_integer((c.last().unwrap() * Rational::from_integer(l)).to_integer().abs());
                let mut r = self.clone();
                r.refine_to(&(Rational::one() / (&an + Rational::one())));
                if r.is_exact() {
                    return Some(r.lo);
                }
                let k = (&r.hi * &an).floor();
                let cand = k / &an;
                (cand >= r.lo && self.poly.eval(&cand).is_zero()).then_some(cand)
            }
        }
    }

    pub fn value(&self, width: &Rational) -> Enclosure {
        self.enclose(&UPoly::t(), &UPoly::constant(Rational::one()), width)
    }
}

/// A closed rational interval known to contain a value; `lo == hi` when the
/// value is exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Rational,
    pub hi: Rational,
}

impl Enclosure {
    pub fn exact(v: Rational) -> Self {
        Enclosure { lo: v.clone(), hi: v }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn to_f64(&self) -> f64 {
        crate::rational::to_f64(&self.mid())
    }

    /// Exact `p/q` when exact, otherwise `[lo, hi]` in decimals.
    pub fn render(&self, places: usize) -> String {
        if self.is_exact() {
            fmt_rational(&self.lo)
        } else {
            format!("[{}, {}]", fmt_decimal(&self.lo, places), fmt_decimal(&self.hi, places))
        }
    }

    pub fn report(&self) -> EnclosureReport {
        EnclosureReport {
            exact: self.is_exact().then(|| fmt_rational(&self.lo)),
            lo: fmt_decimal(&self.lo, 12),
            hi: fmt_decimal(&self.hi, 12),
            decimal: fmt_decimal(&self.mid(), 10),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnclosureReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    pub lo: String,
    pub hi: String,
    pub decimal: String,
}

/// Isolating intervals for all real roots of `p` in the closed interval
/// `[a, b]`, in increasing order.
pub fn real_roots(p: &UPoly, a: &Rational, b: &Rational) -> Result<Vec<RealRoot>> {
    if p.is_zero() {
        return Err(Error::invalid("the zero polynomial has no isolated roots"));
    }
    if a > b {
        return Err(Error::invalid(format!("empty interval [{}, {}]", fmt_rational(a), fmt_rational(b))));
    }
    let sf = p.squarefree();
    if sf.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let seq = sturm_sequence(&sf);
    let mut out = Vec::new();
    if sf.eval(a).is_zero() {
        out.push(RealRoot { poly: sf.clone(), lo: a.clone(), hi: a.clone() });
    }
    let mut stack = vec![(a.clone(), b.clone())];
    let mut found = Vec::new();
    while let Some((lo, hi)) = stack.pop() {
        let k = count_roots(&seq, &lo, &hi);
        if k == 0 {
            continue;
        }
        let hi_root = sf.eval(&hi).is_zero();
        if k == 1 {
            if hi_root {
                found.push(RealRoot { poly: sf.clone(), lo: hi.clone(), hi });
            } else {
                found.push(isolate_single(&sf, &seq, lo, hi));
            }
            continue;
        }
        let mid = (&lo + &hi) / Rational::from_integer(2.into());
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    found.sort_by(|x, y| x.lo.cmp(&y.lo));
    out.extend(found);
    Ok(out)
}

/// The single root in `(lo, hi)` when `hi` is not a root, moving `lo` off a
/// root of its own if needed.
fn isolate_single(sf: &UPoly, seq: &[UPoly], mut lo: Rational, mut hi: Rational) -> RealRoot {
    while sf.eval(&lo).is_zero() {
        let mid = (&lo + &hi) / Rational::from_integer(2.into());
        if sf.eval(&mid).is_zero() {
            return RealRoot { poly: sf.clone(), lo: mid.clone(), hi: mid };
        }
        if count_roots(seq, &mid, &hi) == 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    RealRoot { poly: sf.clone(), lo, hi }
}

/// Isolating intervals refined to width at most `width`, with the sign of
/// `p` on each gap between consecutive roots (and before the first and
/// after the last, within `[a, b]`).
#[derive(Clone, Debug)]
pub struct RootIsolation {
    pub roots: Vec<RealRoot>,
    /// `signs[i]` is the sign on the gap before root `i`; the last entry is
    /// the sign after the last root. Empty gaps (a root at an endpoint) are
    /// reported as `Equal`.
    pub signs: Vec<Ordering>,
}

pub fn isolate_roots(p: &UPoly, a: &Rational, b: &Rational, width: &Rational) -> Result<RootIsolation> {
    let mut roots = real_roots(p, a, b)?;
    for r in roots.iter_mut() {
        r.refine_to(width);
    }
    let mut signs = Vec::with_capacity(roots.len() + 1);
    let mut left = a.clone();
    for r in &roots {
        signs.push(gap_sign(p, &left, &r.lo));
        left = r.hi.clone();
    }
    signs.push(gap_sign(p, &left, b));
    Ok(RootIsolation { roots, signs })
}

fn gap_sign(p: &UPoly, lo: &Rational, hi: &Rational) -> Ordering {
    if lo >= hi {
        return Ordering::Equal;
    }
    p.sign_at(&((lo + hi) / Rational::from_integer(2.into())))
}
