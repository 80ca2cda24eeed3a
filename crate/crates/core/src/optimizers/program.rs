//! Polynomial programs of degree at most two: the polynomial type, the
//! expression parser and the `PROGRAM v1` text format.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, parse_rational, Rational};

/// A polynomial of degree at most two in `n` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPoly {
    pub constant: Rational,
    pub linear: Vec<Rational>,
    /// Coefficients of `x_i x_j` for `i ≤ j`.
    pub quad: BTreeMap<(usize, usize), Rational>,
}

impl QPoly {
    pub fn zero(n: usize) -> Self {
        QPoly { constant: Rational::zero(), linear: vec![Rational::zero(); n], quad: BTreeMap::new() }
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut p = Self::zero(n);
        p.linear[i] = Rational::one();
        p
    }

    pub fn nvars(&self) -> usize {
        self.linear.len()
    }

    pub fn degree(&self) -> usize {
        if !self.quad.is_empty() {
            2
        } else if self.linear.iter().any(|c| !c.is_zero()) {
            1
        } else {
            0
        }
    }

    pub fn is_linear(&self) -> bool {
        self.quad.is_empty()
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        let mut acc = self.constant.clone();
        for (c, xi) in self.linear.iter().zip(x) {
            if !c.is_zero() {
                acc += c * xi;
            }
        }
        for (&(i, j), c) in &self.quad {
            acc += c * &x[i] * &x[j];
        }
        acc
    }

    /// `H` with `∇p(x) = H x + linear`.
    pub fn hessian(&self) -> Vec<Vec<Rational>> {
        let n = self.nvars();
        let mut h = vec![vec![Rational::zero(); n]; n];
        for (&(i, j), c) in &self.quad {
            if i == j {
                h[i][i] += c * Rational::from_integer(2.into());
            } else {
                h[i][j] += c;
                h[j][i] += c;
            }
        }
        h
    }

    pub fn scaled(&self, s: &Rational) -> QPoly {
        QPoly {
            constant: &self.constant * s,
            linear: self.linear.iter().map(|c| c * s).collect(),
            quad: self.quad.iter().map(|(k, c)| (*k, c * s)).filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let mut out = self.clone();
        out.constant += &other.constant;
        for (a, b) in out.linear.iter_mut().zip(&other.linear) {
            *a += b;
        }
        for (k, c) in &other.quad {
            let e = out.quad.entry(*k).or_insert_with(Rational::zero);
            *e += c;
            if e.is_zero() {
                out.quad.remove(k);
            }
        }
        out
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        self.add(&other.scaled(&-Rational::one()))
    }

    /// Renders in `coef*mono` syntax with the given variable names.
    pub fn render(&self, names: &[String]) -> String {
        let mut terms: Vec<(Rational, String)> = Vec::new();
        for (&(i, j), c) in &self.quad {
            let mono = if i == j { format!("{}^2", names[i]) } else { format!("{}*{}", names[i], names[j]) };
            terms.push((c.clone(), mono));
        }
        for (i, c) in self.linear.iter().enumerate() {
            if !c.is_zero() {
                terms.push((c.clone(), names[i].clone()));
            }
        }
        if !self.constant.is_zero() || terms.is_empty() {
            terms.push((self.constant.clone(), String::new()));
        }
        let mut out = String::new();
        for (k, (c, mono)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            if mono.is_empty() {
                out.push_str(&fmt_rational(&a));
            } else if a.is_one() {
                out.push_str(mono);
            } else {
                write!(out, "{}*{mono}", fmt_rational(&a)).unwrap();
            }
        }
        out
    }
}

// ---- expression parser ----------------------------------------------------

/// Sparse multivariate polynomial used while parsing: exponent vector to
/// coefficient.
type Sparse = BTreeMap<Vec<u32>, Rational>;

fn sparse_add(a: &mut Sparse, b: &Sparse, s: &Rational) {
    for (m, c) in b {
        let e = a.entry(m.clone()).or_insert_with(Rational::zero);
        *e += c * s;
        if e.is_zero() {
            a.remove(m);
        }
    }
}

fn sparse_mul(a: &Sparse, b: &Sparse) -> Sparse {
    let mut out = Sparse::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            let mut single = Sparse::new();
            single.insert(m, ca * cb);
            sparse_add(&mut out, &single, &Rational::one());
        }
    }
    out
}

struct Parser<'a> {
    tokens: Vec<String>,
    pos: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&str> {
        self.tokens.get(self.pos).map(String::as_str)
    }

    fn next(&mut self) -> Option<String> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn constant(&self, c: Rational) -> Sparse {
        let mut s = Sparse::new();
        if !c.is_zero() {
            s.insert(vec![0; self.names.len()], c);
        }
        s
    }

    fn expr(&mut self) -> Result<Sparse> {
        let mut acc = Sparse::new();
        let mut sign = Rational::one();
        if let Some(op @ ("+" | "-")) = self.peek() {
            if op == "-" {
                sign = -sign;
            }
            self.pos += 1;
        }
        loop {
            let t = self.term()?;
            sparse_add(&mut acc, &t, &sign);
            match self.peek() {
                Some("+") => sign = Rational::one(),
                Some("-") => sign = -Rational::one(),
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Sparse> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some("*") => {
                    self.pos += 1;
                    let f = self.power()?;
                    acc = sparse_mul(&acc, &f);
                }
                Some("/") => {
                    self.pos += 1;
                    let f = self.power()?;
                    let c = match (f.len(), f.iter().next()) {
                        (1, Some((m, c))) if m.iter().all(|&e| e == 0) => c.clone(),
                        _ => return Err(Error::invalid("division is only allowed by a nonzero constant")),
                    };
                    let inv = Sparse::from([(vec![0; self.names.len()], Rational::one() / c)]);
                    acc = sparse_mul(&acc, &inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Sparse> {
        let base = self.atom()?;
        if self.peek() == Some("^") {
            self.pos += 1;
            let e: u32 = self
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::invalid("exponent must be a non-negative integer"))?;
            let mut out = self.constant(Rational::one());
            for _ in 0..e {
                out = sparse_mul(&out, &base);
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Sparse> {
        let t = self.next().ok_or_else(|| Error::invalid("unexpected end of polynomial"))?;
        if t == "(" {
            let inner = self.expr()?;
            if self.next().as_deref() != Some(")") {
                return Err(Error::invalid("missing `)` in polynomial"));
            }
            return Ok(inner);
        }
        if t == "-" {
            let inner = self.power()?;
            let mut out = Sparse::new();
            sparse_add(&mut out, &inner, &-Rational::one());
            return Ok(out);
        }
        if let Some(i) = self.names.iter().position(|n| *n == t) {
            let mut m = vec![0; self.names.len()];
            m[i] = 1;
            return Ok(Sparse::from([(m, Rational::one())]));
        }
        if t.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
            return Ok(self.constant(parse_rational(&t)?));
        }
        Err(Error::invalid(format!("unknown variable or token {t:?}")))
    }
}

fn tokenize(text: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if "+-*^()".contains(c) {
            out.push(c.to_string());
            i += 1;
        } else if c == '/' {
            out.push("/".into());
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            // a number, possibly `p/q` or with an exponent
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '-' || chars[j] == '+') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let exponent = out.last().is_some_and(|t| t == "^");
            let integer = chars[start..i].iter().all(|c| c.is_ascii_digit());
            if !exponent && integer && i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            out.push(chars[start..i].iter().collect());
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push(chars[start..i].iter().collect());
        } else {
            return Err(Error::invalid(format!("unexpected character {c:?} in polynomial")));
        }
    }
    Ok(out)
}

/// Parses a polynomial of degree at most two over the named variables.
pub fn parse_qpoly(text: &str, names: &[String]) -> Result<QPoly> {
    let mut p = Parser { tokens: tokenize(text)?, pos: 0, names };
    if p.tokens.is_empty() {
        return Err(Error::invalid("empty polynomial"));
    }
    let sparse = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::invalid(format!("unexpected {:?} in polynomial", p.tokens[p.pos])));
    }
    let n = names.len();
    let mut out = QPoly::zero(n);
    for (m, c) in sparse {
        let deg: u32 = m.iter().sum();
        match deg {
            0 => out.constant += c,
            1 => out.linear[m.iter().position(|&e| e == 1).unwrap()] += c,
            2 => {
                let idx: Vec<usize> = m.iter().enumerate().flat_map(|(i, &e)| std::iter::repeat(i).take(e as usize)).collect();
                out.quad.insert((idx[0], idx[1]), c);
            }
            _ => return Err(Error::Unsupported(format!("polynomial of degree {deg}; programs allow degree ≤ 2"))),
        }
    }
    Ok(out)
}

// ---- programs -------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Goal {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `p ≥ 0`; may be tight.
    Geq,
    /// `p = 0`; always tight.
    Eq,
    /// `p > 0`; a case condition that is never tight.
    Gt,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Geq => ">=",
            Relation::Eq => "==",
            Relation::Gt => ">",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub poly: QPoly,
    pub relation: Relation,
    /// Not part of the displayed program; added from elsewhere to make it
    /// bounded or to encode a side bound.
    pub auxiliary: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyProgram {
    pub name: String,
    pub anchor: String,
    pub notes: Vec<String>,
    pub vars: Vec<String>,
    pub goal: Goal,
    pub objective: QPoly,
    pub constraints: Vec<Constraint>,
    /// Groups of constraint indices that can never be tight together.
    pub prune_groups: Vec<Vec<usize>>,
}

impl PolyProgram {
    pub fn new(name: &str, vars: &[&str], goal: Goal, objective: &str) -> Result<Self> {
        let vars: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
        let objective = parse_qpoly(objective, &vars)?;
        Ok(PolyProgram {
            name: name.into(),
            anchor: String::new(),
            notes: Vec::new(),
            vars,
            goal,
            objective,
            constraints: Vec::new(),
            prune_groups: Vec::new(),
        })
    }

    pub fn anchor(mut self, a: &str) -> Self {
        self.anchor = a.into();
        self
    }

    pub fn note(mut self, n: &str) -> Self {
        self.notes.push(n.into());
        self
    }

    fn push(mut self, poly: &str, relation: Relation, auxiliary: bool) -> Result<Self> {
        let poly = parse_qpoly(poly, &self.vars)?;
        self.constraints.push(Constraint { poly, relation, auxiliary });
        Ok(self)
    }

    /// Adds `poly ≥ 0`.
    pub fn geq(self, poly: &str) -> Result<Self> {
        self.push(poly, Relation::Geq, false)
    }

    pub fn eq(self, poly: &str) -> Result<Self> {
        self.push(poly, Relation::Eq, false)
    }

    pub fn gt(self, poly: &str) -> Result<Self> {
        self.push(poly, Relation::Gt, false)
    }

    pub fn aux_geq(self, poly: &str) -> Result<Self> {
        self.push(poly, Relation::Geq, true)
    }

    pub fn prune(mut self, group: &[usize]) -> Self {
        self.prune_groups.push(group.to_vec());
        self
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("PROGRAM v1\n");
        writeln!(out, "NAME {}", self.name).unwrap();
        if !self.anchor.is_empty() {
            writeln!(out, "ANCHOR {}", self.anchor).unwrap();
        }
        for n in &self.notes {
            writeln!(out, "NOTE {n}").unwrap();
        }
        for v in &self.vars {
            writeln!(out, "VAR {v}").unwrap();
        }
        let goal = if self.goal == Goal::Maximize { "MAX" } else { "MIN" };
        writeln!(out, "{goal} {}", self.objective.render(&self.vars)).unwrap();
        for c in &self.constraints {
            let word = if c.auxiliary { "AUX" } else { "ST" };
            writeln!(out, "{word} {} {} 0", c.poly.render(&self.vars), c.relation.symbol()).unwrap();
        }
        for g in &self.prune_groups {
            let ids: Vec<String> = g.iter().map(|i| i.to_string()).collect();
            writeln!(out, "PRUNE {}", ids.join(" ")).unwrap();
        }
        out
    }

    /// Parses the `PROGRAM v1` format:
    ///
    /// ```text
    /// PROGRAM v1
    /// NAME <name>            (optional)
    /// ANCHOR <text>          (optional)
    /// NOTE <text>            (any number)
    /// VAR <name>             (one per variable, before any polynomial)
    /// MAX|MIN <polynomial>
    /// ST <polynomial> >= 0 | == 0 | > 0
    /// AUX <polynomial> >= 0  (auxiliary constraint)
    /// PRUNE <i> <j> ...      (constraints, by 0-based position, never tight together)
    /// ```
    pub fn from_text(text: &str) -> Result<Self> {
        let mut prog = PolyProgram {
            name: "unnamed".into(),
            anchor: String::new(),
            notes: Vec::new(),
            vars: Vec::new(),
            goal: Goal::Maximize,
            objective: QPoly::zero(0),
            constraints: Vec::new(),
            prune_groups: Vec::new(),
        };
        let mut saw_header = false;
        let mut saw_objective = false;
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: String| Error::parse(ln, m);
            if !saw_header {
                if line != "PROGRAM v1" {
                    return Err(err(format!("expected `PROGRAM v1`, found {line:?}")));
                }
                saw_header = true;
                continue;
            }
            let (word, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match word {
                "NAME" => prog.name = rest.into(),
                "ANCHOR" => prog.anchor = rest.into(),
                "NOTE" => prog.notes.push(rest.into()),
                "VAR" => {
                    if saw_objective || !prog.constraints.is_empty() {
                        return Err(err("VAR lines must precede the objective and constraints".into()));
                    }
                    if rest.is_empty() || prog.vars.iter().any(|v| v == rest) {
                        return Err(err(format!("bad or repeated variable name {rest:?}")));
                    }
                    prog.vars.push(rest.into());
                }
                "MAX" | "MIN" => {
                    if saw_objective {
                        return Err(err("second objective".into()));
                    }
                    prog.goal = if word == "MAX" { Goal::Maximize } else { Goal::Minimize };
                    prog.objective = parse_qpoly(rest, &prog.vars).map_err(|e| err(e.to_string()))?;
                    saw_objective = true;
                }
                "ST" | "AUX" => {
                    let (poly, relation) = split_relation(rest).ok_or_else(|| {
                        err(format!("constraint must end in `>= 0`, `== 0` or `> 0`: {rest:?}"))
                    })?;
                    let poly = parse_qpoly(poly, &prog.vars).map_err(|e| err(e.to_string()))?;
                    prog.constraints.push(Constraint { poly, relation, auxiliary: word == "AUX" });
                }
                "PRUNE" => {
                    let ids: Vec<usize> = rest
                        .split_whitespace()
                        .map(|t| t.parse().map_err(|_| err(format!("bad constraint index {t:?}"))))
                        .collect::<Result<_>>()?;
                    prog.prune_groups.push(ids);
                }
                _ => return Err(err(format!("unknown directive {word:?}"))),
            }
        }
        if !saw_header {
            return Err(Error::parse(1, "empty program"));
        }
        if !saw_objective {
            return Err(Error::parse(1, "program has no MAX or MIN line"));
        }
        let m = prog.constraints.len();
        if prog.prune_groups.iter().flatten().any(|&i| i >= m) {
            return Err(Error::invalid("PRUNE refers to a constraint that does not exist"));
        }
        Ok(prog)
    }
}

fn split_relation(text: &str) -> Option<(&str, Relation)> {
    for (sym, rel) in [(">=", Relation::Geq), ("==", Relation::Eq), (">", Relation::Gt)] {
        if let Some(poly) = text.strip_suffix("0").map(str::trim_end).and_then(|t| t.strip_suffix(sym)) {
            return Some((poly.trim(), rel));
        }
    }
    None
}

impl fmt::Display for PolyProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_sparse_syntax() {
        let n = names(&["x1", "x2", "x0"]);
        let p = parse_qpoly("6*x1*x2 - 8/3*x2^2 - 26/9*x1^2 + 0.027*x0 - 0.02760856", &n).unwrap();
        assert_eq!(p.quad[&(0, 1)], rat(6, 1));
        assert_eq!(p.quad[&(1, 1)], rat(-8, 3));
        assert_eq!(p.linear[2], rat(27, 1000));
        assert_eq!(p.constant, rat(-2760856, 100000000));
        let q = parse_qpoly("(1 - x1)^2/3 + 2*(x1 + x0)", &n).unwrap();
        assert_eq!(q.eval(&[rat(1, 2), rat(0, 1), rat(1, 4)]), rat(1, 12) + rat(3, 2));
        assert!(parse_qpoly("x1^3", &n).is_err());
        assert!(parse_qpoly("y + 1", &n).is_err());
        assert!(parse_qpoly("x1 / x2", &n).is_err());
    }

    #[test]
    fn render_round_trip() {
        let n = names(&["a", "b"]);
        for text in ["a^2 - 2*a*b + 3/7*b - 1", "-a", "0", "2.5e-3*b^2 + 1"] {
            let p = parse_qpoly(text, &n).unwrap();
            assert_eq!(parse_qpoly(&p.render(&n), &n).unwrap(), p, "{text}");
        }
    }

    #[test]
    fn program_text_round_trip() {
        let prog = PolyProgram::new("demo", &["x", "y"], Goal::Minimize, "x*y - x")
            .unwrap()
            .anchor("a demo")
            .geq("x")
            .unwrap()
            .eq("x + y - 1")
            .unwrap()
            .gt("y")
            .unwrap()
            .aux_geq("1 - y")
            .unwrap()
            .prune(&[0, 3]);
        let back = PolyProgram::from_text(&prog.to_text()).unwrap();
        assert_eq!(back, prog);
        assert!(PolyProgram::from_text("PROGRAM v1\nVAR x\nMAX x\nST x <= 0\n").is_err());
        assert!(PolyProgram::from_text("PROGRAM v1\nVAR x\nST x >= 0\n").is_err());
    }
}
