//! Blow-ups of colorings, the iterated blow-up of RB1111, the balanced
//! rainbow-triangle recurrence and exact limit densities of the iterated
//! blow-up.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::densities::Expression;
use crate::error::{Error, Result};
use crate::graph::{edge_count, edge_index, Color, ColoredGraph};
use crate::rational::{fmt_rational, Rational};

pub const MAX_ITERATION: usize = 4;

/// What fills one part of a blow-up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inner {
    Graph(ColoredGraph),
    Spec(Box<BlowupSpec>),
}

impl Inner {
    pub fn n(&self) -> usize {
        match self {
            Inner::Graph(g) => g.n(),
            Inner::Spec(s) => s.n(),
        }
    }

    fn materialize(&self) -> Result<ColoredGraph> {
        match self {
            Inner::Graph(g) => Ok(g.clone()),
            Inner::Spec(s) => blow_up(s),
        }
    }
}

/// Replace vertex `i` of `base` by a part of `part_sizes[i]` vertices
/// colored like `inner[i]`; edges between parts inherit the base color.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupSpec {
    pub base: ColoredGraph,
    pub part_sizes: Vec<usize>,
    pub inner: Vec<Inner>,
}

impl BlowupSpec {
    /// Checks the size invariants and takes the part sizes from `inner`.
    pub fn new(base: ColoredGraph, inner: Vec<Inner>) -> Result<Self> {
        let part_sizes = inner.iter().map(Inner::n).collect();
        let spec = BlowupSpec { base, part_sizes, inner };
        spec.validate()?;
        Ok(spec)
    }

    pub fn n(&self) -> usize {
        self.part_sizes.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.part_sizes.len() != self.base.n() || self.inner.len() != self.base.n() {
            return Err(Error::invalid(format!(
                "base has {} vertices but {} part sizes and {} inner colorings were given",
                self.base.n(),
                self.part_sizes.len(),
                self.inner.len()
            )));
        }
        for (i, (&s, inner)) in self.part_sizes.iter().zip(&self.inner).enumerate() {
            if s == 0 {
                return Err(Error::invalid(format!("part {i} is empty")));
            }
            if inner.n() != s {
                return Err(Error::invalid(format!("part {i} has size {s} but its inner coloring has {}", inner.n())));
            }
            if let Inner::Spec(spec) = inner {
                spec.validate()?;
            }
        }
        Ok(())
    }
}

pub fn blow_up(spec: &BlowupSpec) -> Result<ColoredGraph> {
    spec.validate()?;
    let inner: Vec<ColoredGraph> = spec.inner.iter().map(Inner::materialize).collect::<Result<_>>()?;
    let mut owner = Vec::with_capacity(spec.n());
    let mut local = Vec::with_capacity(spec.n());
    for (i, &s) in spec.part_sizes.iter().enumerate() {
        for k in 0..s {
            owner.push(i);
            local.push(k);
        }
    }
    Ok(ColoredGraph::from_fn(owner.len(), |a, b| {
        if owner[a] == owner[b] {
            inner[owner[a]].color(local[a], local[b])
        } else {
            spec.base.color(owner[a], owner[b])
        }
    }))
}

/// Every vertex of `g` replaced by a copy of `h`.
pub fn uniform_blowup(g: &ColoredGraph, h: &ColoredGraph) -> Result<ColoredGraph> {
    let inner = vec![Inner::Graph(h.clone()); g.n()];
    blow_up(&BlowupSpec::new(g.clone(), inner)?)
}

/// `R^k`: RB1111 blown up `k − 1` times into itself, on `4^k` vertices.
pub fn iterated_blowup(k: usize) -> Result<ColoredGraph> {
    if !(1..=MAX_ITERATION).contains(&k) {
        return Err(Error::invalid(format!("iteration depth must be in 1..={MAX_ITERATION}, got {k}")));
    }
    let q = ColoredGraph::rb1111();
    let mut g = q.clone();
    for _ in 1..k {
        g = uniform_blowup(&q, &g)?;
    }
    Ok(g)
}

/// `n` split into four parts as equal as possible, largest first.
pub fn balanced_parts(n: usize) -> [usize; 4] {
    let mut p = [n / 4; 4];
    for slot in p.iter_mut().take(n % 4) {
        *slot += 1;
    }
    p
}

/// The balanced recursive blow-up of RB1111 on `n` vertices; below four
/// vertices the best coloring (single vertex, edge, rainbow triangle).
pub fn balanced_construction(n: usize) -> Result<ColoredGraph> {
    balanced_spec(n).and_then(|i| i.materialize())
}

fn balanced_spec(n: usize) -> Result<Inner> {
    match n {
        0 => Err(Error::invalid("a coloring needs at least one vertex")),
        1 | 2 => Ok(Inner::Graph(ColoredGraph::monochromatic(n, 0))),
        3 => Ok(Inner::Graph(ColoredGraph::rainbow_triangle())),
        _ => {
            let inner = balanced_parts(n).iter().map(|&s| balanced_spec(s)).collect::<Result<_>>()?;
            Ok(Inner::Spec(Box::new(BlowupSpec::new(ColoredGraph::rb1111(), inner)?)))
        }
    }
}

/// The value of the balanced recurrence
/// `F(n) = F(a)+F(b)+F(c)+F(d) + abc+abd+acd+bcd`, with `F(1) = F(2) = 0`
/// and `F(3) = 1` fixed by exhaustion.
pub fn conjectured_f(n: usize) -> u128 {
    fn go(n: usize, memo: &mut HashMap<usize, u128>) -> u128 {
        match n {
            0..=2 => return 0,
            3 => return 1,
            _ => {}
        }
        if let Some(&v) = memo.get(&n) {
            return v;
        }
        let p = balanced_parts(n).map(|x| x as u128);
        let [a, b, c, d] = p;
        let mut v = a * b * c + a * b * d + a * c * d + b * c * d;
        for x in balanced_parts(n) {
            v += go(x, memo);
        }
        memo.insert(n, v);
        v
    }
    go(n, &mut HashMap::new())
}

// ---- text format ----------------------------------------------------------

impl fmt::Display for BlowupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(blowup {}", self.base.encode())?;
        for inner in &self.inner {
            match inner {
                Inner::Graph(g) => write!(f, " {}", g.encode())?,
                Inner::Spec(s) => write!(f, " {s}")?,
            }
        }
        f.write_str(")")
    }
}

/// Parses `(blowup <base> <inner>...)`, where each inner is a graph in text
/// form, a nested `(blowup ...)`, `(iterated <k>)` or `(balanced <n>)`.
/// The top level may also be `(iterated <k>)` or `(balanced <n>)`.
pub fn parse_spec(text: &str) -> Result<Inner> {
    let tokens = tokenize(text);
    let mut pos = 0;
    let out = parse_inner(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(Error::invalid(format!("trailing input after blow-up spec: {:?}", tokens[pos..].join(" "))));
    }
    Ok(out)
}

/// Materializes a parsed spec.
pub fn materialize(spec: &Inner) -> Result<ColoredGraph> {
    spec.materialize()
}

impl FromStr for BlowupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match parse_spec(s)? {
            Inner::Spec(spec) => Ok(*spec),
            Inner::Graph(_) => Err(Error::invalid("expected a (blowup ...) expression")),
        }
    }
}

fn tokenize(text: &str) -> Vec<String> {
    let spaced = text.replace('(', " ( ").replace(')', " ) ");
    spaced.split_whitespace().map(str::to_string).collect()
}

fn parse_inner(tokens: &[String], pos: &mut usize) -> Result<Inner> {
    let tok = tokens.get(*pos).ok_or_else(|| Error::invalid("unexpected end of blow-up spec"))?;
    *pos += 1;
    if tok != "(" {
        if tok == ")" {
            return Err(Error::invalid("unexpected `)` in blow-up spec"));
        }
        return Ok(Inner::Graph(ColoredGraph::decode(tok)?));
    }
    let head = tokens.get(*pos).ok_or_else(|| Error::invalid("unexpected end of blow-up spec"))?.clone();
    *pos += 1;
    let number = |pos: &mut usize| -> Result<usize> {
        let t = tokens.get(*pos).ok_or_else(|| Error::invalid(format!("`{head}` needs a number")))?;
        *pos += 1;
        t.parse().map_err(|_| Error::invalid(format!("`{head}` needs a number, got {t:?}")))
    };
    let out = match head.as_str() {
        "blowup" => {
            let base_tok = tokens.get(*pos).ok_or_else(|| Error::invalid("blowup needs a base graph"))?;
            *pos += 1;
            let base = ColoredGraph::decode(base_tok)?;
            let mut inner = Vec::new();
            while tokens.get(*pos).is_some_and(|t| t != ")") {
                inner.push(parse_inner(tokens, pos)?);
            }
            Inner::Spec(Box::new(BlowupSpec::new(base, inner)?))
        }
        "iterated" => Inner::Graph(iterated_blowup(number(pos)?)?),
        "balanced" => balanced_spec(number(pos)?)?,
        other => return Err(Error::invalid(format!("unknown blow-up form `{other}`"))),
    };
    match tokens.get(*pos) {
        Some(t) if t == ")" => {
            *pos += 1;
            Ok(out)
        }
        _ => Err(Error::invalid(format!("missing `)` after `{head}`"))),
    }
}

// ---- limit densities ------------------------------------------------------

/// Distribution of the coloring induced on `j` labelled vertices drawn
/// independently and uniformly from the infinitely iterated blow-up,
/// keyed by the row-major color vector packed two bits per edge.
type Distribution = Vec<(u32, Rational)>;

fn pack(colors: &[Color]) -> u32 {
    colors.iter().fold(0u32, |acc, &c| (acc << 2) | c as u32)
}

fn unpack(code: u32, n: usize) -> Vec<Color> {
    let m = edge_count(n);
    (0..m).map(|e| ((code >> (2 * (m - 1 - e))) & 3) as Color).collect()
}

/// Probability `1/4^m` of one assignment of `m` vertices to parts, divided
/// by `1 − 4^{1−m}` to absorb the all-in-one-part term.
fn assignment_weight(m: usize) -> Rational {
    let four_m = BigInt::from(4u32).pow(m as u32);
    let stay = Rational::new(BigInt::one(), BigInt::from(4u32).pow(m as u32 - 1));
    Rational::new(BigInt::one(), four_m) / (Rational::one() - stay)
}

/// Every assignment of `m` vertices to the four parts that does not put all
/// of them in one part.
fn split_assignments(m: usize) -> Vec<Vec<usize>> {
    (0..4usize.pow(m as u32))
        .map(|mut code| {
            (0..m)
                .map(|_| {
                    let p = code % 4;
                    code /= 4;
                    p
                })
                .collect::<Vec<usize>>()
        })
        .filter(|parts| parts.iter().any(|&p| p != parts[0]))
        .collect()
}

/// Expands one assignment into the joint distribution of full colorings,
/// combining the independent distributions of each part's members.
fn expand_assignment(parts: &[usize], lower: &[Distribution], mut f: impl FnMut(&[Color], &Rational)) {
    let m = parts.len();
    let q = ColoredGraph::rb1111();
    let groups: Vec<Vec<usize>> = (0..4).map(|p| (0..m).filter(|&v| parts[v] == p).collect()).collect();
    let mut local = vec![0usize; m];
    for g in &groups {
        for (k, &v) in g.iter().enumerate() {
            local[v] = k;
        }
    }
    let mut colors = vec![0 as Color; edge_count(m)];
    for a in 0..m {
        for b in a + 1..m {
            if parts[a] != parts[b] {
                colors[edge_index(m, a, b)] = q.color(parts[a], parts[b]);
            }
        }
    }
    let active: Vec<usize> = (0..4).filter(|&p| groups[p].len() >= 2).collect();
    fn go(
        idx: usize,
        active: &[usize],
        groups: &[Vec<usize>],
        lower: &[Distribution],
        colors: &mut Vec<Color>,
        prob: Rational,
        m: usize,
        f: &mut impl FnMut(&[Color], &Rational),
    ) {
        if idx == active.len() {
            f(colors, &prob);
            return;
        }
        let g = &groups[active[idx]];
        let j = g.len();
        for (code, p) in &lower[j] {
            let inner = unpack(*code, j);
            for x in 0..j {
                for y in x + 1..j {
                    colors[edge_index(m, g[x], g[y])] = inner[edge_index(j, x, y)];
                }
            }
            go(idx + 1, active, groups, lower, colors, &prob * p, m, f);
        }
    }
    go(0, &active, &groups, lower, &mut colors, Rational::one(), m, &mut f);
}

/// `lower[j]` for `j < max`.
fn distributions(max: usize) -> &'static [Distribution] {
    static MEMO: OnceLock<Vec<Distribution>> = OnceLock::new();
    let all = MEMO.get_or_init(|| {
        let mut lower: Vec<Distribution> = vec![vec![(0, Rational::one())], vec![(0, Rational::one())]];
        for j in 2..=5 {
            let w = assignment_weight(j);
            let mut acc: HashMap<u32, Rational> = HashMap::new();
            for parts in split_assignments(j) {
                expand_assignment(&parts, &lower, |colors, p| {
                    *acc.entry(pack(colors)).or_insert_with(Rational::zero) += p * &w;
                });
            }
            let mut dist: Distribution = acc.into_iter().collect();
            dist.sort_by_key(|(c, _)| *c);
            lower.push(dist);
        }
        lower
    });
    &all[..max]
}

/// Exact density of `e` in the iterated blow-up of RB1111 as the number of
/// iterations goes to infinity.
pub fn limit_density(e: Expression) -> Rational {
    let m = e.arity();
    let lower = distributions(m);
    let w = assignment_weight(m);
    let total: Rational = split_assignments(m)
        .par_iter()
        .map(|parts| {
            let mut acc = Rational::zero();
            expand_assignment(parts, lower, |colors, p| {
                let g = ColoredGraph::new(m, colors.to_vec()).expect("valid colors");
                if e.recognizes(&g) {
                    acc += p;
                }
            });
            acc
        })
        .sum();
    total * w
}

/// Limit densities of all named expressions.
pub fn limit_densities() -> Vec<(Expression, Rational)> {
    Expression::ALL.iter().map(|&e| (e, limit_density(e))).collect()
}

/// Formats the table of limit densities as `NAME p/q ≈ decimal` lines.
pub fn limit_table() -> String {
    let mut out = String::new();
    for (e, d) in limit_densities() {
        out.push_str(&format!("{} {} {:.9}\n", e.name(), fmt_rational(&d), crate::rational::to_f64(&d)));
    }
    out
}
