//! Exact maximization of a ratio of univariate polynomials on a closed
//! interval.

use std::cmp::Ordering;

use serde::Serialize;

use super::solver::{report_width, Value};
use super::upoly::{real_roots, Enclosure, EnclosureReport, RealRoot, UPoly};
use crate::error::{Error, Result};
use crate::rational::{fmt_rational, Rational};

#[derive(Clone, Debug)]
pub struct UnivariateMax {
    pub value: Enclosure,
    pub arg: Enclosure,
    /// Whether the maximum is attained at `lo` or `hi`.
    pub at_endpoint: bool,
    /// Number of candidates compared: endpoints plus interior critical points.
    pub candidates: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnivariateReport {
    pub value: EnclosureReport,
    pub arg: EnclosureReport,
    pub at_endpoint: bool,
    pub candidates: usize,
}

impl UnivariateMax {
    pub fn report(&self) -> UnivariateReport {
        UnivariateReport {
            value: self.value.report(),
            arg: self.arg.report(),
            at_endpoint: self.at_endpoint,
            candidates: self.candidates,
        }
    }
}

/// Maximum of `num/den` on `[lo, hi]`. Candidates are the endpoints and the
/// roots of `num'·den − num·den'` inside; ties keep the leftmost candidate.
pub fn maximize_univariate(num: &UPoly, den: &UPoly, lo: &Rational, hi: &Rational) -> Result<UnivariateMax> {
    if lo > hi {
        return Err(Error::invalid(format!("empty interval [{}, {}]", fmt_rational(lo), fmt_rational(hi))));
    }
    if den.is_zero() {
        return Err(Error::invalid("zero denominator"));
    }
    if let Some(p) = real_roots(den, lo, hi)?.first() {
        return Err(Error::Solver(format!(
            "pole of the objective inside the interval, near {}",
            p.value(&report_width()).render(10)
        )));
    }
    let at = |t: &Rational| num.eval(t) / den.eval(t);
    let mut cands: Vec<(Value, RealRoot, bool)> = vec![
        (Value::Exact(at(lo)), RealRoot::exact(lo.clone()), true),
    ];
    let crit = num.derivative().mul(den).sub(&den.derivative().mul(num));
    if !crit.is_zero() {
        for r in real_roots(&crit, lo, hi)? {
            if r.is_exact() && (r.lo == *lo || r.lo == *hi) {
                continue;
            }
            let v = match r.try_rational() {
                Some(t) => Value::Exact(at(&t)),
                None => Value::Algebraic { root: r.clone(), num: num.clone(), den: den.clone() },
            };
            cands.push((v, r, false));
        }
    }
    if hi != lo {
        cands.push((Value::Exact(at(hi)), RealRoot::exact(hi.clone()), true));
    }
    let mut best = 0;
    for i in 1..cands.len() {
        if cands[i].0.compare(&cands[best].0) == Ordering::Greater {
            best = i;
        }
    }
    let (v, r, endpoint) = &cands[best];
    let arg = match r.try_rational() {
        Some(t) => Enclosure::exact(t),
        None => r.value(&report_width()),
    };
    Ok(UnivariateMax { value: v.enclose(&report_width()), arg, at_endpoint: *endpoint, candidates: cands.len() })
}
