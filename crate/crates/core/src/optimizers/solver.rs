//! Active-set case enumeration for programs with a degree-two objective,
//! linear constraints and at most one quadratic constraint.
//!
//! Every subset of the non-strict inequalities is tried as the set of tight
//! constraints. With only linear constraints tight, the stationarity system
//! `[H −Aᵀ; A 0]` is linear and is solved exactly over the integers. With the
//! quadratic constraint `q` tight, the tight linear constraints cut out an
//! affine set: on a line the candidates are the intersections with `q = 0`;
//! in higher dimension the Lagrange system is solved for `x(μ)` as a rational
//! function of the multiplier of `q`, and the candidates are the real roots
//! of `q(x(μ))`. Singular systems are logged and skipped: a stationary set of
//! positive dimension reappears as a point when more constraints are tight.
//! Feasible regions are assumed to be bounded.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::linalg::{affine_solutions, bareiss, poly_consistency, row_basis, solve_poly, Overflow, Ring};
use super::program::{Goal, PolyProgram, QPoly, Relation};
use super::upoly::{real_roots, Enclosure, EnclosureReport, RealRoot, UPoly};
use crate::error::{Error, Result};
use crate::rational::{fmt_decimal, Rational};

pub const MAX_VARS: usize = 14;
/// Largest number of non-strict inequalities that will be enumerated.
pub const MAX_ENUMERATED: usize = 26;

/// Outcome of one active subset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CaseStatus {
    /// The stationarity system is singular.
    Degenerate,
    /// The tight constraints have no common solution.
    Inconsistent,
    /// The tight quadratic constraint yields no real candidate.
    NoCandidate,
    /// Every candidate violates a constraint; the first violated one is kept.
    Infeasible { violated: usize },
    Feasible { candidates: u32 },
}

impl CaseStatus {
    pub fn label(&self) -> &'static str {
        match self {
            CaseStatus::Degenerate => "degenerate",
            CaseStatus::Inconsistent => "inconsistent",
            CaseStatus::NoCandidate => "no_candidate",
            CaseStatus::Infeasible { .. } => "infeasible",
            CaseStatus::Feasible { .. } => "feasible",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CaseRecord {
    /// Bit `b` set means the `b`-th non-strict inequality is tight.
    pub mask: u64,
    pub status: CaseStatus,
}

/// A candidate point, rational or depending on one real algebraic number
/// `t`: coordinate `i` is `nums[i](t) / den(t)`.
#[derive(Clone, Debug)]
pub enum Point {
    Rational(Vec<Rational>),
    Algebraic { root: RealRoot, nums: Vec<UPoly>, den: UPoly },
}

/// `p(nums/den) · den²` as a polynomial in `t`.
pub fn compose(p: &QPoly, nums: &[UPoly], den: &UPoly) -> UPoly {
    let den2 = den.mul(den);
    let mut acc = den2.scale(&p.constant);
    for (i, c) in p.linear.iter().enumerate() {
        if !c.is_zero() {
            acc = acc.add(&nums[i].mul(den).scale(c));
        }
    }
    for (&(i, j), c) in &p.quad {
        acc = acc.add(&nums[i].mul(&nums[j]).scale(c));
    }
    acc
}

impl Point {
    pub fn sign_of(&self, p: &QPoly) -> Ordering {
        match self {
            Point::Rational(x) => p.eval(x).cmp(&Rational::zero()),
            Point::Algebraic { root, nums, den } => root.sign_of(&compose(p, nums, den)),
        }
    }

    pub fn value_of(&self, p: &QPoly) -> Value {
        match self {
            Point::Rational(x) => Value::Exact(p.eval(x)),
            Point::Algebraic { root, nums, den } => {
                Value::Algebraic { root: root.clone(), num: compose(p, nums, den), den: den.mul(den) }
            }
        }
    }

    pub fn coordinates(&self, width: &Rational) -> Vec<Enclosure> {
        match self {
            Point::Rational(x) => x.iter().cloned().map(Enclosure::exact).collect(),
            Point::Algebraic { root, nums, den } => nums.iter().map(|n| root.enclose(n, den, width)).collect(),
        }
    }

    pub fn as_rational(&self) -> Option<&[Rational]> {
        match self {
            Point::Rational(x) => Some(x),
            Point::Algebraic { .. } => None,
        }
    }
}

/// An exact real value: rational, or `num(t)/den(t)` at an algebraic `t`.
#[derive(Clone, Debug)]
pub enum Value {
    Exact(Rational),
    Algebraic { root: RealRoot, num: UPoly, den: UPoly },
}

impl Value {
    pub fn enclose(&self, width: &Rational) -> Enclosure {
        match self {
            Value::Exact(v) => Enclosure::exact(v.clone()),
            Value::Algebraic { root, num, den } => root.enclose(num, den, width),
        }
    }

    pub fn neg(&self) -> Value {
        match self {
            Value::Exact(v) => Value::Exact(-v),
            Value::Algebraic { root, num, den } => {
                Value::Algebraic { root: root.clone(), num: num.scale(&-Rational::one()), den: den.clone() }
            }
        }
    }

    /// Exact when both are rational; otherwise by refining enclosures, and
    /// values within `2^-256` of each other compare equal.
    pub fn compare(&self, other: &Value) -> Ordering {
        if let (Value::Exact(a), Value::Exact(b)) = (self, other) {
            return a.cmp(b);
        }
        let mut width = Rational::new(BigInt::one(), BigInt::one() << 32);
        loop {
            let a = self.enclose(&width);
            let b = other.enclose(&width);
            if a.hi < b.lo {
                return Ordering::Less;
            }
            if b.hi < a.lo {
                return Ordering::Greater;
            }
            if a.is_exact() && b.is_exact() {
                return a.lo.cmp(&b.lo);
            }
            if *width.denom() > BigInt::one() << 256 {
                return Ordering::Equal;
            }
            width = &width * &width;
        }
    }
}

/// A feasible candidate of one case.
#[derive(Clone, Debug)]
pub struct CaseSolution {
    pub mask: u64,
    /// Tight constraints, by index into the program's constraint list.
    pub active: Vec<usize>,
    pub point: Point,
    /// Objective value in the program's own sense.
    pub value: Value,
    /// Lagrange multipliers of the tight constraints (for the maximized
    /// objective, negated for minimization), when computed.
    pub multipliers: Vec<Enclosure>,
}

#[derive(Clone, Debug)]
pub struct Optimum {
    /// Index into `Solution::candidates`.
    pub best: usize,
    /// All candidates attaining the optimum, `best` first.
    pub ties: Vec<usize>,
    pub value: Enclosure,
    pub point: Vec<Enclosure>,
    /// The argmax satisfies every constraint, rechecked by substitution.
    pub verified: bool,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub name: String,
    pub anchor: String,
    pub notes: Vec<String>,
    pub goal: Goal,
    pub vars: Vec<String>,
    /// Indices of the enumerated non-strict inequalities, in mask-bit order.
    pub enumerated: Vec<usize>,
    /// `2^k` for `k` enumerated inequalities.
    pub raw_cases: u64,
    pub pruned: u64,
    pub log: Vec<CaseRecord>,
    pub candidates: Vec<CaseSolution>,
    pub optimum: Option<Optimum>,
}

/// Report width for irrational values.
pub fn report_width() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(10u64.pow(15)))
}

// ---- integer data for the linear path ---------------------------------------

struct LinearData<T> {
    n: usize,
    h: Vec<Vec<T>>,
    c: Vec<T>,
    /// `(a, β)` for `a·x + β`, scaled to integers; `None` for the quadratic
    /// constraint.
    rows: Vec<Option<(Vec<T>, T)>>,
    /// For rows with one nonzero coefficient: `(j, p, q)` with `x_j = p/q`
    /// when tight, `q > 0`.
    fixing: Vec<Option<(usize, T, T)>>,
}

fn lcm_of_denoms<'a>(xs: impl Iterator<Item = &'a Rational>) -> BigInt {
    xs.fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

fn scaled(x: &Rational, l: &BigInt) -> BigInt {
    (x * Rational::from_integer(l.clone())).to_integer()
}

fn build_linear<T: Ring>(h: &QPoly, constraints: &[super::program::Constraint]) -> Option<LinearData<T>> {
    let n = h.nvars();
    let hess = h.hessian();
    let l = lcm_of_denoms(hess.iter().flatten().chain(&h.linear));
    let conv = |x: &Rational, l: &BigInt| T::from_bigint(&scaled(x, l));
    let hh = hess.iter().map(|row| row.iter().map(|x| conv(x, &l)).collect::<Option<Vec<T>>>()).collect::<Option<_>>()?;
    let c = h.linear.iter().map(|x| conv(x, &l)).collect::<Option<_>>()?;
    let mut rows = Vec::new();
    let mut fixing = Vec::new();
    for con in constraints {
        if !con.poly.is_linear() {
            rows.push(None);
            fixing.push(None);
            continue;
        }
        let p = &con.poly;
        let l = lcm_of_denoms(p.linear.iter().chain(std::iter::once(&p.constant)));
        let a: Vec<T> = p.linear.iter().map(|x| conv(x, &l)).collect::<Option<_>>()?;
        let beta = conv(&p.constant, &l)?;
        let nz: Vec<usize> = (0..n).filter(|&j| !p.linear[j].is_zero()).collect();
        let fix = if nz.len() == 1 {
            let j = nz[0];
            let v = -&p.constant / &p.linear[j];
            Some((j, T::from_bigint(v.numer())?, T::from_bigint(v.denom())?))
        } else {
            None
        };
        rows.push(Some((a, beta)));
        fixing.push(fix);
    }
    Some(LinearData { n, h: hh, c, rows, fixing })
}

enum LinearOutcome<T> {
    Degenerate,
    Inconsistent,
    /// `x = nums / den` with `den > 0`.
    Point(Vec<T>, T),
}

fn dot<T: Ring>(a: &[T], x: &[T]) -> std::result::Result<T, Overflow> {
    let mut acc = T::from_i64(0);
    for (u, v) in a.iter().zip(x) {
        if !u.is_zero() && !v.is_zero() {
            acc = acc.add(&u.mul(v)?)?;
        }
    }
    Ok(acc)
}

fn linear_case<T: Ring>(d: &LinearData<T>, active: &[usize]) -> std::result::Result<LinearOutcome<T>, Overflow> {
    let n = d.n;
    let mut fixed: Vec<Option<(T, T)>> = vec![None; n];
    let mut rest = Vec::new();
    let mut degenerate = false;
    for &l in active {
        match &d.fixing[l] {
            Some((j, p, q)) => match &fixed[*j] {
                Some((p2, q2)) => {
                    if p.mul(q2)?.sub(&p2.mul(q)?)?.is_zero() {
                        degenerate = true;
                    } else {
                        return Ok(LinearOutcome::Inconsistent);
                    }
                }
                None => fixed[*j] = Some((p.clone(), q.clone())),
            },
            None => rest.push(l),
        }
    }
    let mut big_q = T::from_i64(1);
    for (_, q) in fixed.iter().flatten() {
        let g = big_q.gcd(q);
        big_q = big_q.div(&g).mul(q)?;
    }
    // scaled fixed values X_j = Q x_j
    let mut xs: Vec<Option<T>> = Vec::with_capacity(n);
    for f in &fixed {
        xs.push(match f {
            Some((p, q)) => Some(p.mul(&big_q.div(q))?),
            None => None,
        });
    }
    let free: Vec<usize> = (0..n).filter(|&j| fixed[j].is_none()).collect();
    let fixed_part = |a: &[T]| -> std::result::Result<T, Overflow> {
        let mut acc = T::from_i64(0);
        for (j, x) in xs.iter().enumerate() {
            if let Some(x) = x {
                if !a[j].is_zero() {
                    acc = acc.add(&a[j].mul(x)?)?;
                }
            }
        }
        Ok(acc)
    };
    let mut rest_rhs = Vec::with_capacity(rest.len());
    for &l in &rest {
        let (a, beta) = d.rows[l].as_ref().expect("linear row");
        let rhs = big_q.mul(beta)?.add(&fixed_part(a)?)?.neg()?;
        if free.iter().all(|&j| a[j].is_zero()) {
            if rhs.is_zero() {
                degenerate = true;
            } else {
                return Ok(LinearOutcome::Inconsistent);
            }
        }
        rest_rhs.push(rhs);
    }
    if degenerate {
        return Ok(LinearOutcome::Degenerate);
    }
    let m = free.len() + rest.len();
    let mut mat: Vec<Vec<T>> = Vec::with_capacity(m);
    for &i in &free {
        let mut row = Vec::with_capacity(m + 1);
        for &k in &free {
            row.push(d.h[i][k].clone());
        }
        for &l in &rest {
            row.push(d.rows[l].as_ref().unwrap().0[i].neg()?);
        }
        row.push(big_q.mul(&d.c[i])?.add(&fixed_part(&d.h[i])?)?.neg()?);
        mat.push(row);
    }
    for (&l, rhs) in rest.iter().zip(rest_rhs) {
        let a = &d.rows[l].as_ref().unwrap().0;
        let mut row = Vec::with_capacity(m + 1);
        for &k in &free {
            row.push(a[k].clone());
        }
        row.extend(std::iter::repeat(T::from_i64(0)).take(rest.len()));
        row.push(rhs);
        mat.push(row);
    }
    let Some(sol) = bareiss(mat)? else {
        return Ok(LinearOutcome::Degenerate);
    };
    let mut den = sol.denominator.mul(&big_q)?;
    let mut nums = Vec::with_capacity(n);
    let mut next_free = sol.numerators.iter();
    for x in &xs {
        nums.push(match x {
            Some(x) => x.mul(&sol.denominator)?,
            None => next_free.next().unwrap().clone(),
        });
    }
    if den.signum() < 0 {
        den = den.neg()?;
        for v in nums.iter_mut() {
            *v = v.neg()?;
        }
    }
    Ok(LinearOutcome::Point(nums, den))
}

/// First linear constraint outside `active` violated at `nums/den`.
fn first_violation<T: Ring>(
    d: &LinearData<T>,
    relations: &[Relation],
    active_mask: &[bool],
    nums: &[T],
    den: &T,
) -> std::result::Result<Option<usize>, Overflow> {
    for (l, row) in d.rows.iter().enumerate() {
        let Some((a, beta)) = row else { continue };
        if active_mask[l] {
            continue;
        }
        let s = dot(a, nums)?.add(&beta.mul(den)?)?.signum();
        let ok = match relations[l] {
            Relation::Geq => s >= 0,
            Relation::Gt => s > 0,
            Relation::Eq => s == 0,
        };
        if !ok {
            return Ok(Some(l));
        }
    }
    Ok(None)
}

// ---- the solver -----------------------------------------------------------

struct Prepared<'a> {
    prog: &'a PolyProgram,
    /// The maximized objective: the program's, negated for minimization.
    h: QPoly,
    quad: Option<usize>,
    enumerated: Vec<usize>,
    eqs: Vec<usize>,
    prune_masks: Vec<u64>,
    relations: Vec<Relation>,
    small: Option<LinearData<i128>>,
    big: LinearData<BigInt>,
}

fn validate(prog: &PolyProgram) -> Result<()> {
    let n = prog.vars.len();
    if n == 0 || n > MAX_VARS {
        return Err(Error::Unsupported(format!("{n} variables; the solver takes 1 to {MAX_VARS}")));
    }
    let ok_len = |p: &QPoly| p.nvars() == n;
    if !ok_len(&prog.objective) || !prog.constraints.iter().all(|c| ok_len(&c.poly)) {
        return Err(Error::invalid("polynomial over the wrong number of variables"));
    }
    let quads = prog.constraints.iter().filter(|c| !c.poly.is_linear()).count();
    if quads > 1 {
        return Err(Error::Unsupported(format!("{quads} quadratic constraints; at most one is supported")));
    }
    let k = prog.constraints.iter().filter(|c| c.relation == Relation::Geq).count();
    if k > MAX_ENUMERATED {
        return Err(Error::Unsupported(format!("{k} non-strict inequalities; at most {MAX_ENUMERATED} are enumerated")));
    }
    for g in &prog.prune_groups {
        if g.iter().any(|&i| i >= prog.constraints.len() || prog.constraints[i].relation != Relation::Geq) {
            return Err(Error::invalid("prune groups may only name non-strict inequalities"));
        }
    }
    Ok(())
}

fn prepare(prog: &PolyProgram) -> Result<Prepared<'_>> {
    validate(prog)?;
    let h = match prog.goal {
        Goal::Maximize => prog.objective.clone(),
        Goal::Minimize => prog.objective.scaled(&-Rational::one()),
    };
    let enumerated: Vec<usize> = (0..prog.constraints.len()).filter(|&i| prog.constraints[i].relation == Relation::Geq).collect();
    let eqs = (0..prog.constraints.len()).filter(|&i| prog.constraints[i].relation == Relation::Eq).collect();
    let bit = |c: usize| 1u64 << enumerated.iter().position(|&e| e == c).unwrap();
    let prune_masks = prog.prune_groups.iter().map(|g| g.iter().fold(0, |m, &c| m | bit(c))).collect();
    Ok(Prepared {
        prog,
        quad: prog.constraints.iter().position(|c| !c.poly.is_linear()),
        relations: prog.constraints.iter().map(|c| c.relation).collect(),
        small: build_linear(&h, &prog.constraints),
        big: build_linear(&h, &prog.constraints).expect("big integers always convert"),
        h,
        enumerated,
        eqs,
        prune_masks,
    })
}

impl Prepared<'_> {
    fn n(&self) -> usize {
        self.prog.vars.len()
    }

    fn is_pruned(&self, mask: u64) -> bool {
        mask.count_ones() as usize + self.eqs.len() > self.n() || self.prune_masks.iter().any(|&g| mask & g == g)
    }

    fn active(&self, mask: u64) -> Vec<usize> {
        let mut a: Vec<usize> = self.eqs.clone();
        a.extend(self.enumerated.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &c)| c));
        a.sort_unstable();
        a
    }

    fn solve_case(&self, mask: u64) -> (CaseStatus, Vec<CaseSolution>) {
        let active = self.active(mask);
        match self.quad {
            Some(q) if active.contains(&q) => self.quadratic_case(mask, &active, q),
            _ => self.linear_path(mask, &active),
        }
    }

    fn linear_path(&self, mask: u64, active: &[usize]) -> (CaseStatus, Vec<CaseSolution>) {
        let mut on = vec![false; self.relations.len()];
        for &a in active {
            on[a] = true;
        }
        let small = self.small.as_ref().map(|d| {
            linear_case(d, active).and_then(|o| match o {
                LinearOutcome::Point(nums, den) => {
                    let v = first_violation(d, &self.relations, &on, &nums, &den)?;
                    let to_big = |x: &i128| BigInt::from(*x);
                    Ok((LinearOutcome::Point(nums.iter().map(to_big).collect(), to_big(&den)), v))
                }
                LinearOutcome::Degenerate => Ok((LinearOutcome::Degenerate, None)),
                LinearOutcome::Inconsistent => Ok((LinearOutcome::Inconsistent, None)),
            })
        });
        let (outcome, violated) = match small {
            Some(Ok(r)) => r,
            _ => {
                let o = linear_case(&self.big, active).expect("big integers do not overflow");
                match o {
                    LinearOutcome::Point(nums, den) => {
                        let v = first_violation(&self.big, &self.relations, &on, &nums, &den).unwrap();
                        (LinearOutcome::Point(nums, den), v)
                    }
                    other => (other, None),
                }
            }
        };
        let (nums, den) = match outcome {
            LinearOutcome::Degenerate => return (CaseStatus::Degenerate, Vec::new()),
            LinearOutcome::Inconsistent => return (CaseStatus::Inconsistent, Vec::new()),
            LinearOutcome::Point(nums, den) => (nums, den),
        };
        if let Some(v) = violated {
            return (CaseStatus::Infeasible { violated: v }, Vec::new());
        }
        let x: Vec<Rational> = nums.into_iter().map(|v| Rational::new(v, den.clone())).collect();
        if let Some(q) = self.quad {
            let s = self.prog.constraints[q].poly.eval(&x).cmp(&Rational::zero());
            let ok = match self.relations[q] {
                Relation::Geq => s != Ordering::Less,
                Relation::Gt => s == Ordering::Greater,
                Relation::Eq => s == Ordering::Equal,
            };
            if !ok {
                return (CaseStatus::Infeasible { violated: q }, Vec::new());
            }
        }
        let multipliers = self.rational_multipliers(active, &x);
        let point = Point::Rational(x);
        let value = point.value_of(&self.prog.objective);
        let sol = CaseSolution { mask, active: active.to_vec(), point, value, multipliers };
        (CaseStatus::Feasible { candidates: 1 }, vec![sol])
    }

    /// Solves `Σ λ_l a_l = ∇h(x)` over the tight linear constraints.
    fn rational_multipliers(&self, active: &[usize], x: &[Rational]) -> Vec<Enclosure> {
        let n = self.n();
        let hess = self.h.hessian();
        let grad: Vec<Rational> = (0..n)
            .map(|i| &self.h.linear[i] + hess[i].iter().zip(x).map(|(a, b)| a * b).sum::<Rational>())
            .collect();
        let at: Vec<Vec<Rational>> =
            (0..n).map(|i| active.iter().map(|&l| self.prog.constraints[l].poly.linear[i].clone()).collect()).collect();
        match affine_solutions(&at, &grad, active.len()) {
            Some((lambda, basis)) if basis.is_empty() => lambda.into_iter().map(Enclosure::exact).collect(),
            _ => Vec::new(),
        }
    }

    fn quadratic_case(&self, mask: u64, active: &[usize], q: usize) -> (CaseStatus, Vec<CaseSolution>) {
        let n = self.n();
        let lin: Vec<usize> = active.iter().copied().filter(|&l| l != q).collect();
        let a: Vec<Vec<Rational>> = lin.iter().map(|&l| self.prog.constraints[l].poly.linear.clone()).collect();
        let b: Vec<Rational> = lin.iter().map(|&l| -self.prog.constraints[l].poly.constant.clone()).collect();
        let Some((p0, basis)) = affine_solutions(&a, &b, n) else {
            return (CaseStatus::Inconsistent, Vec::new());
        };
        let qpoly = &self.prog.constraints[q].poly;
        // (point, multipliers) candidates
        let mut points: Vec<(Point, Vec<(UPoly, UPoly)>)> = Vec::new();
        match basis.len() {
            0 => {
                if qpoly.eval(&p0).is_zero() {
                    points.push((Point::Rational(p0), Vec::new()));
                }
            }
            1 => match self.line_points(&p0, &basis[0], qpoly) {
                Ok(pts) => points.extend(pts.into_iter().map(|p| (p, Vec::new()))),
                Err(s) => return (s, Vec::new()),
            },
            _ => {
                let mat = self.lagrange_matrix(&lin, q);
                match solve_poly(mat.clone()).filter(|s| !s.denominator.is_zero()) {
                    Some(sol) => {
                        let nums = sol.numerators[..n].to_vec();
                        let den = sol.denominator;
                        let mut extra: Vec<(UPoly, UPoly)> =
                            sol.numerators[n..].iter().map(|p| (p.clone(), den.clone())).collect();
                        extra.push((UPoly::t(), UPoly::constant(Rational::one())));
                        let pq = compose(qpoly, &nums, &den);
                        if pq.is_zero() {
                            return (CaseStatus::Degenerate, Vec::new());
                        }
                        let mut any_root = false;
                        for root in all_real_roots(&pq) {
                            any_root = true;
                            if root.is_root_of(&den) {
                                continue;
                            }
                            points.push((Point::Algebraic { root, nums: nums.clone(), den: den.clone() }, extra.clone()));
                        }
                        if any_root && points.is_empty() {
                            return (CaseStatus::Degenerate, Vec::new());
                        }
                    }
                    None => match self.singular_mu(&mat, qpoly) {
                        Ok(pts) => points.extend(pts),
                        Err(s) => return (s, Vec::new()),
                    },
                }
            }
        }
        if points.is_empty() {
            return (CaseStatus::NoCandidate, Vec::new());
        }
        let mut out = Vec::new();
        let mut first_violation = None;
        for (raw, mults) in points {
            let point = exactify(raw.clone());
            match self.violation(&point, active) {
                Some(v) => {
                    first_violation.get_or_insert(v);
                }
                None => {
                    let multipliers = match &raw {
                        Point::Algebraic { root, .. } => {
                            mults.iter().map(|(num, den)| root.enclose(num, den, &report_width())).collect()
                        }
                        Point::Rational(_) => mults
                            .iter()
                            .map(|(num, den)| Enclosure::exact(num.eval(&Rational::zero()) / den.eval(&Rational::zero())))
                            .collect(),
                    };
                    let value = point.value_of(&self.prog.objective);
                    out.push(CaseSolution { mask, active: active.to_vec(), point, value, multipliers });
                }
            }
        }
        if out.is_empty() {
            return (CaseStatus::Infeasible { violated: first_violation.unwrap() }, out);
        }
        (CaseStatus::Feasible { candidates: out.len() as u32 }, out)
    }

    /// Points of the line `p0 + t·d` on `q = 0`. If the whole line lies on
    /// `q = 0`, the stationary points of the objective along it.
    fn line_points(&self, p0: &[Rational], d: &[Rational], qpoly: &QPoly) -> std::result::Result<Vec<Point>, CaseStatus> {
        let nums: Vec<UPoly> = p0.iter().zip(d).map(|(a, b)| UPoly::new(vec![a.clone(), b.clone()])).collect();
        let one = UPoly::constant(Rational::one());
        let qt = compose(qpoly, &nums, &one);
        let target = if qt.is_zero() {
            let g = compose(&self.h, &nums, &one).derivative();
            if g.is_zero() {
                return Err(CaseStatus::Degenerate);
            }
            g
        } else {
            qt
        };
        Ok(all_real_roots(&target)
            .into_iter()
            .map(|root| Point::Algebraic { root, nums: nums.clone(), den: one.clone() })
            .collect())
    }

    /// The Lagrange system in the unknowns `x` and the multipliers `λ` of
    /// the tight linear rows, with the multiplier `t = μ` of the quadratic
    /// constraint as a parameter. Augmented: `(n + |lin|) × (n + |lin| + 1)`.
    fn lagrange_matrix(&self, lin: &[usize], q: usize) -> Vec<Vec<UPoly>> {
        let n = self.n();
        let hh = self.h.hessian();
        let qp = &self.prog.constraints[q].poly;
        let hq = qp.hessian();
        let m = n + lin.len();
        let c = |x: &Rational| UPoly::constant(x.clone());
        let mut mat = vec![vec![UPoly::zero(); m + 1]; m];
        for i in 0..n {
            for j in 0..n {
                mat[i][j] = UPoly::new(vec![hh[i][j].clone(), -hq[i][j].clone()]);
            }
            for (k, &l) in lin.iter().enumerate() {
                mat[i][n + k] = c(&-self.prog.constraints[l].poly.linear[i].clone());
            }
            mat[i][m] = UPoly::new(vec![-self.h.linear[i].clone(), qp.linear[i].clone()]);
        }
        for (k, &l) in lin.iter().enumerate() {
            let row = &self.prog.constraints[l].poly;
            for j in 0..n {
                mat[n + k][j] = c(&row.linear[j]);
            }
            mat[n + k][m] = c(&-row.constant.clone());
        }
        mat
    }

    /// The Lagrange system is singular for every `μ`. This happens when `q`
    /// is linear in a variable the objective treats linearly: that row only
    /// pins `μ`, and `q = 0` then fixes the variable. Solves at each rational
    /// `μ` where the system is consistent and intersects the solution set
    /// with `q = 0`.
    #[allow(clippy::type_complexity)]
    fn singular_mu(
        &self,
        mat: &[Vec<UPoly>],
        qpoly: &QPoly,
    ) -> std::result::Result<Vec<(Point, Vec<(UPoly, UPoly)>)>, CaseStatus> {
        let n = self.n();
        let m = mat.len();
        let Some((g, minor)) = poly_consistency(mat.to_vec(), m) else {
            return Err(CaseStatus::Degenerate);
        };
        let mut out = Vec::new();
        for root in all_real_roots(&g) {
            let Some(mu) = root.try_rational() else {
                // rank drops there; the generic path skips these as well
                if root.is_root_of(&minor) {
                    continue;
                }
                // TODO: irrational μ needs the solution set over Q(μ); none of the library programs reach it
                return Err(CaseStatus::Degenerate);
            };
            let a: Vec<Vec<Rational>> = mat.iter().map(|row| row[..m].iter().map(|p| p.eval(&mu)).collect()).collect();
            let b: Vec<Rational> = mat.iter().map(|row| row[m].eval(&mu)).collect();
            let Some((p, basis)) = affine_solutions(&a, &b, m) else {
                continue;
            };
            let px = p[..n].to_vec();
            let dirs = row_basis(&basis.iter().map(|v| v[..n].to_vec()).collect::<Vec<_>>());
            let mults = vec![(UPoly::constant(mu), UPoly::constant(Rational::one()))];
            match dirs.len() {
                0 => {
                    if qpoly.eval(&px).is_zero() {
                        out.push((Point::Rational(px), mults));
                    }
                }
                1 => {
                    for pt in self.line_points(&px, &dirs[0], qpoly)? {
                        out.push((pt, mults.clone()));
                    }
                }
                _ => return Err(CaseStatus::Degenerate),
            }
        }
        Ok(out)
    }

    /// First constraint outside `active` violated at `point`.
    fn violation(&self, point: &Point, active: &[usize]) -> Option<usize> {
        for (l, con) in self.prog.constraints.iter().enumerate() {
            if active.contains(&l) {
                continue;
            }
            let s = point.sign_of(&con.poly);
            let ok = match con.relation {
                Relation::Geq => s != Ordering::Less,
                Relation::Gt => s == Ordering::Greater,
                Relation::Eq => s == Ordering::Equal,
            };
            if !ok {
                return Some(l);
            }
        }
        None
    }
}

/// Replaces an algebraic point whose parameter is rational by the rational
/// point.
fn exactify(point: Point) -> Point {
    if let Point::Algebraic { root, nums, den } = &point {
        if let Some(t) = root.try_rational() {
            let d = den.eval(&t);
            return Point::Rational(nums.iter().map(|n| n.eval(&t) / &d).collect());
        }
    }
    point
}

/// Cauchy's bound: every real root lies strictly inside `(-B, B)`.
fn root_bound(p: &UPoly) -> Rational {
    let lead = p.lead().abs();
    let m = p.coeffs().iter().map(|c| c.abs() / &lead).max().unwrap_or_else(Rational::zero);
    m + Rational::one()
}

fn all_real_roots(p: &UPoly) -> Vec<RealRoot> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let b = root_bound(p);
    real_roots(p, &-b.clone(), &b).expect("nonzero polynomial")
}

/// Checks every constraint at `point` by direct substitution.
pub fn verify_point(prog: &PolyProgram, point: &Point) -> bool {
    prog.constraints.iter().all(|c| {
        let s = point.sign_of(&c.poly);
        match c.relation {
            Relation::Geq => s != Ordering::Less,
            Relation::Gt => s == Ordering::Greater,
            Relation::Eq => s == Ordering::Equal,
        }
    })
}

/// Enumerates all active subsets, solves each case exactly and returns the
/// optimum over the feasible candidates with the complete case log. Runs on
/// the current rayon pool; the result does not depend on its size.
pub fn solve_case_enumeration(prog: &PolyProgram) -> Result<Solution> {
    let p = prepare(prog)?;
    let k = p.enumerated.len();
    let raw = 1u64 << k;
    let masks: Vec<u64> = (0..raw).filter(|&m| !p.is_pruned(m)).collect();
    let results: Vec<(CaseStatus, Vec<CaseSolution>)> =
        masks.par_iter().with_min_len(256).map(|&m| p.solve_case(m)).collect();
    let mut log = Vec::with_capacity(masks.len());
    let mut candidates = Vec::new();
    for (&mask, (status, sols)) in masks.iter().zip(results) {
        log.push(CaseRecord { mask, status });
        candidates.extend(sols);
    }
    let optimum = best_of(prog, &candidates);
    Ok(Solution {
        name: prog.name.clone(),
        anchor: prog.anchor.clone(),
        notes: prog.notes.clone(),
        goal: prog.goal,
        vars: prog.vars.clone(),
        enumerated: p.enumerated.clone(),
        raw_cases: raw,
        pruned: raw - masks.len() as u64,
        log,
        candidates,
        optimum,
    })
}

fn best_of(prog: &PolyProgram, candidates: &[CaseSolution]) -> Option<Optimum> {
    let better = |a: &Value, b: &Value| {
        let o = a.compare(b);
        if prog.goal == Goal::Maximize {
            o
        } else {
            o.reverse()
        }
    };
    let mut best: Option<usize> = None;
    for (i, c) in candidates.iter().enumerate() {
        if best.is_none_or(|b| better(&c.value, &candidates[b].value) == Ordering::Greater) {
            best = Some(i);
        }
    }
    let best = best?;
    let ties = (0..candidates.len())
        .filter(|&i| i == best || candidates[i].value.compare(&candidates[best].value) == Ordering::Equal)
        .collect::<Vec<_>>();
    let mut ties = ties;
    ties.sort_by_key(|&i| (i != best, i));
    let c = &candidates[best];
    Some(Optimum {
        best,
        ties,
        value: c.value.enclose(&report_width()),
        point: c.point.coordinates(&report_width()),
        verified: verify_point(prog, &c.point),
    })
}

// ---- reports --------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct Coordinate {
    pub name: String,
    #[serde(flatten)]
    pub value: EnclosureReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimumReport {
    pub value: EnclosureReport,
    pub point: Vec<Coordinate>,
    pub tight: Vec<usize>,
    pub multipliers: Vec<EnclosureReport>,
    pub ties: usize,
    pub verified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub program: String,
    pub anchor: String,
    pub notes: Vec<String>,
    pub goal: &'static str,
    pub variables: Vec<String>,
    pub raw_cases: u64,
    pub pruned_cases: u64,
    pub logged_cases: u64,
    pub status_counts: BTreeMap<&'static str, u64>,
    pub feasible_candidates: usize,
    pub infeasible: bool,
    pub optimum: Option<OptimumReport>,
}

impl Solution {
    pub fn is_infeasible(&self) -> bool {
        self.optimum.is_none()
    }

    pub fn status_counts(&self) -> BTreeMap<&'static str, u64> {
        let mut m = BTreeMap::new();
        for r in &self.log {
            *m.entry(r.status.label()).or_insert(0) += 1;
        }
        m
    }

    /// Constraint indices tight in the case `mask`.
    pub fn active_set(&self, mask: u64, eqs: &[usize]) -> Vec<usize> {
        let mut a = eqs.to_vec();
        a.extend(self.enumerated.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &c)| c));
        a.sort_unstable();
        a
    }

    pub fn best(&self) -> Option<&CaseSolution> {
        self.optimum.as_ref().map(|o| &self.candidates[o.best])
    }

    /// Coordinate of the argmax by variable name, as a float.
    pub fn argmax_f64(&self, var: &str) -> Option<f64> {
        let o = self.optimum.as_ref()?;
        let i = self.vars.iter().position(|v| v == var)?;
        Some(o.point[i].to_f64())
    }

    pub fn value_f64(&self) -> Option<f64> {
        self.optimum.as_ref().map(|o| o.value.to_f64())
    }

    pub fn report(&self) -> SolveReport {
        let optimum = self.optimum.as_ref().map(|o| {
            let c = &self.candidates[o.best];
            OptimumReport {
                value: o.value.report(),
                point: self.vars.iter().zip(&o.point).map(|(n, v)| Coordinate { name: n.clone(), value: v.report() }).collect(),
                tight: c.active.clone(),
                multipliers: c.multipliers.iter().map(Enclosure::report).collect(),
                ties: o.ties.len(),
                verified: o.verified,
            }
        });
        SolveReport {
            program: self.name.clone(),
            anchor: self.anchor.clone(),
            notes: self.notes.clone(),
            goal: if self.goal == Goal::Maximize { "max" } else { "min" },
            variables: self.vars.clone(),
            raw_cases: self.raw_cases,
            pruned_cases: self.pruned,
            logged_cases: self.log.len() as u64,
            status_counts: self.status_counts(),
            feasible_candidates: self.candidates.len(),
            infeasible: self.optimum.is_none(),
            optimum,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.report()).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "program {}", self.name).unwrap();
        if !self.anchor.is_empty() {
            writeln!(out, "anchor {}", self.anchor).unwrap();
        }
        for n in &self.notes {
            writeln!(out, "note {n}").unwrap();
        }
        writeln!(out, "cases raw={} pruned={} logged={}", self.raw_cases, self.pruned, self.log.len()).unwrap();
        let counts: Vec<String> = self.status_counts().iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(out, "status {}", counts.join(" ")).unwrap();
        match &self.optimum {
            None => writeln!(out, "INFEASIBLE no feasible candidate in any case").unwrap(),
            Some(o) => {
                let goal = if self.goal == Goal::Maximize { "max" } else { "min" };
                writeln!(out, "{goal} {}", render_enclosure(&o.value)).unwrap();
                for (name, v) in self.vars.iter().zip(&o.point) {
                    writeln!(out, "  {name} = {}", render_enclosure(v)).unwrap();
                }
                writeln!(out, "tight {:?}", self.candidates[o.best].active).unwrap();
                writeln!(out, "ties {}", o.ties.len()).unwrap();
                writeln!(out, "verified {}", o.verified).unwrap();
            }
        }
        out
    }
}

/// `p/q (decimal)` for exact values, `[lo, hi]` otherwise.
pub fn render_enclosure(e: &Enclosure) -> String {
    if e.is_exact() {
        crate::rational::fmt_both(&e.lo)
    } else {
        format!("[{}, {}]", fmt_decimal(&e.lo, 12), fmt_decimal(&e.hi, 12))
    }
}
