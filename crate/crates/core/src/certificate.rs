//! Sum-of-squares certificates for linear density inequalities at level 6,
//! and their exact verification.
//!
//! A certificate for `target ≥ z` (or `≤ z`) lists squared flag combinations,
//! regularity terms `w·⟦F × (RBT^σ − ¼)⟧` and non-negative slack. It is
//! accepted when
//!
//! `s·(target − z·Σ_{F ∈ F_6} F) − Σ squares − Σ regularity − Σ slack`
//!
//! vanishes identically, where `s = +1` for `GEQ` and `s = −1` for `LEQ`.

use std::fmt::Write as _;
use std::path::Path;

use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::Serialize;

use crate::canon::Mode;
use crate::census::census;
use crate::densities::Expression;
use crate::error::{Error, Result};
use crate::flags::{expand_regularity, expand_square, flag_basis, FlagCombination, FlagKey, FlagType};
use crate::lincomb::{parse_census_term, LinearCombination};
use crate::rational::{fmt_rational, parse_rational, rat, Rational};

pub const CERT_LEVEL: usize = 6;
pub const DEFAULT_MAX_DIAGNOSTICS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sense {
    #[serde(rename = "GEQ")]
    Geq,
    #[serde(rename = "LEQ")]
    Leq,
}

impl Sense {
    fn sign(self) -> Rational {
        match self {
            Sense::Geq => Rational::one(),
            Sense::Leq => -Rational::one(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Sense::Geq => "GEQ",
            Sense::Leq => "LEQ",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularityTerm {
    pub flag: FlagKey,
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub sense: Sense,
    pub bound: Rational,
    /// The bounded expression over `F_6`.
    pub target: LinearCombination,
    pub squares: Vec<FlagCombination>,
    pub regularities: Vec<RegularityTerm>,
    /// Non-negative slack over `F_6`.
    pub slack: LinearCombination,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Offender {
    pub census_id: usize,
    pub key: String,
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub accepted: bool,
    pub residual: LinearCombination,
    /// Number of census classes with a nonzero residual.
    pub nonzero: usize,
    /// The first offending classes in census order, at most the requested count.
    pub diagnostics: Vec<Offender>,
}

impl Certificate {
    /// Certificate with no terms yet for `target` against `bound`.
    pub fn new(sense: Sense, bound: Rational, target: LinearCombination) -> Result<Self> {
        Ok(Certificate {
            sense,
            bound,
            target: target.lift(CERT_LEVEL)?,
            squares: Vec::new(),
            regularities: Vec::new(),
            slack: LinearCombination::zero(CERT_LEVEL),
        })
    }

    /// Checks the structural invariants the parser enforces.
    pub fn validate(&self) -> Result<()> {
        if self.target.level() != CERT_LEVEL || self.slack.level() != CERT_LEVEL {
            return Err(Error::invalid("target and slack must live on level 6"));
        }
        for (id, y) in self.slack.terms() {
            if y.is_negative() {
                return Err(Error::invalid(format!("negative slack {} on census class {id}", fmt_rational(y))));
            }
        }
        for r in &self.regularities {
            if r.weight.is_negative() {
                return Err(Error::invalid(format!("negative weight {} on {}", fmt_rational(&r.weight), r.flag)));
            }
            if r.flag.n() != 4 || r.flag.root_count() != 1 {
                return Err(Error::invalid(format!("regularity flag {} must have 4 vertices and one root", r.flag)));
            }
        }
        for sq in &self.squares {
            let s = sq.flag_type().size();
            if 2 * sq.level() - s != CERT_LEVEL {
                return Err(Error::invalid(format!(
                    "level arithmetic mismatch: square of {}-vertex flags over a {s}-vertex type is not level 6",
                    sq.level()
                )));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> Result<String> {
        let c6 = census(CERT_LEVEL, Mode::ColorBlind)?;
        let mut out = String::from("CERT v1\n");
        writeln!(out, "SENSE {}", self.sense.name()).unwrap();
        writeln!(out, "BOUND {}", fmt_rational(&self.bound)).unwrap();
        out.push_str("TARGET\n");
        for (id, c) in self.target.terms() {
            writeln!(out, "  {} {}", c6.key(id), fmt_rational(c)).unwrap();
        }
        for sq in &self.squares {
            writeln!(out, "SQUARE TYPE={} LEVEL={}", sq.flag_type(), sq.level()).unwrap();
            for (k, c) in sq.terms() {
                writeln!(out, "  {k} {}", fmt_rational(&c)).unwrap();
            }
        }
        for r in &self.regularities {
            writeln!(out, "REG FLAG={} W={}", r.flag, fmt_rational(&r.weight)).unwrap();
        }
        out.push_str("SLACK\n");
        for (id, c) in self.slack.terms() {
            writeln!(out, "  {} {}", c6.key(id), fmt_rational(c)).unwrap();
        }
        out.push_str("END\n");
        Ok(out)
    }
}

enum Section {
    None,
    Target,
    Square,
    Slack,
}

/// Parses the line-oriented certificate format (see the crate README).
pub fn parse_certificate(text: &str) -> Result<Certificate> {
    let mut sense = None;
    let mut bound = None;
    // target terms may be given on any level up to 6; collected per level
    let mut targets: Vec<LinearCombination> = (0..=CERT_LEVEL).map(LinearCombination::zero).collect();
    let mut squares: Vec<FlagCombination> = Vec::new();
    let mut regularities = Vec::new();
    let mut slack = LinearCombination::zero(CERT_LEVEL);
    let c6 = census(CERT_LEVEL, Mode::ColorBlind)?;
    let mut section = Section::None;
    let mut saw_header = false;
    let mut ended = false;

    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::parse(ln, msg);
        if ended {
            return Err(err("content after END".into()));
        }
        if !saw_header {
            if line != "CERT v1" {
                return Err(err(format!("expected `CERT v1`, found {line:?}")));
            }
            saw_header = true;
            continue;
        }
        let (word, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match word {
            "SENSE" => {
                sense = Some(match rest {
                    "GEQ" => Sense::Geq,
                    "LEQ" => Sense::Leq,
                    _ => return Err(err(format!("SENSE must be GEQ or LEQ, found {rest:?}"))),
                });
                section = Section::None;
            }
            "BOUND" => {
                bound = Some(parse_rational(rest).map_err(|e| err(e.to_string()))?);
                section = Section::None;
            }
            "TARGET" => section = Section::Target,
            "SLACK" => section = Section::Slack,
            "END" => ended = true,
            "SQUARE" => {
                let mut ty = None;
                let mut level = None;
                for field in rest.split_whitespace() {
                    if let Some(v) = field.strip_prefix("TYPE=") {
                        ty = Some(FlagType::parse(v).map_err(|e| err(e.to_string()))?);
                    } else if let Some(v) = field.strip_prefix("LEVEL=") {
                        level = Some(v.parse::<usize>().map_err(|_| err(format!("bad LEVEL {v:?}")))?);
                    } else {
                        return Err(err(format!("unexpected field {field:?} in SQUARE header")));
                    }
                }
                let (Some(ty), Some(level)) = (ty, level) else {
                    return Err(err("SQUARE needs TYPE=<type-key> LEVEL=<k>".into()));
                };
                if level < ty.size() || 2 * level - ty.size() != CERT_LEVEL {
                    return Err(err(format!(
                        "level arithmetic mismatch: 2*{level} - {} != {CERT_LEVEL}",
                        ty.size()
                    )));
                }
                squares.push(FlagCombination::zero(&ty, level).map_err(|e| err(e.to_string()))?);
                section = Section::Square;
            }
            "REG" => {
                let mut flag = None;
                let mut weight = None;
                for field in rest.split_whitespace() {
                    if let Some(v) = field.strip_prefix("FLAG=") {
                        flag = Some(FlagKey::parse(v).map_err(|e| err(e.to_string()))?);
                    } else if let Some(v) = field.strip_prefix("W=") {
                        weight = Some(parse_rational(v).map_err(|e| err(e.to_string()))?);
                    } else {
                        return Err(err(format!("unexpected field {field:?} in REG line")));
                    }
                }
                let (Some(flag), Some(weight)) = (flag, weight) else {
                    return Err(err("REG needs FLAG=<flag-key> W=<p/q>".into()));
                };
                if weight.is_negative() {
                    return Err(err(format!("negative weight {}", fmt_rational(&weight))));
                }
                if flag.n() != 4 || flag.root_count() != 1 {
                    return Err(err(format!("regularity flag {flag} must have 4 vertices and one root")));
                }
                regularities.push(RegularityTerm { flag, weight });
                section = Section::None;
            }
            _ => match section {
                Section::Target => {
                    let key = line.split_whitespace().next().unwrap_or("");
                    let level: usize = key
                        .split_once(':')
                        .and_then(|(n, _)| n.parse().ok())
                        .filter(|&n| (1..=CERT_LEVEL).contains(&n))
                        .ok_or_else(|| err(format!("bad target key {key:?}")))?;
                    let c = census(level, Mode::ColorBlind)?;
                    let (id, v) = parse_census_term(&c, line).map_err(|e| err(e.to_string()))?;
                    targets[level].add_term(id, v);
                }
                Section::Slack => {
                    let (id, v) = parse_census_term(&c6, line).map_err(|e| err(e.to_string()))?;
                    if v.is_negative() {
                        return Err(err(format!("negative slack {}", fmt_rational(&v))));
                    }
                    slack.add_term(id, v);
                }
                Section::Square => {
                    let sq = squares.last_mut().expect("square section");
                    let basis = flag_basis(sq.flag_type(), sq.level())?;
                    let (key, v) =
                        crate::flags::parse_flag_term(&basis, line).map_err(|e| err(e.to_string()))?;
                    sq.add(&key, v).map_err(|e| err(e.to_string()))?;
                }
                Section::None => return Err(err(format!("unexpected line {line:?}"))),
            },
        }
    }
    if !saw_header {
        return Err(Error::parse(1, "empty certificate"));
    }
    if !ended {
        return Err(Error::parse(text.lines().count().max(1), "missing END"));
    }
    let sense = sense.ok_or_else(|| Error::parse(1, "missing SENSE"))?;
    let bound = bound.ok_or_else(|| Error::parse(1, "missing BOUND"))?;
    let mut target = LinearCombination::zero(CERT_LEVEL);
    for t in targets.iter().filter(|t| !t.is_zero()) {
        target.add_scaled(&t.lift(CERT_LEVEL)?, &Rational::one())?;
    }
    Ok(Certificate { sense, bound, target, squares, regularities, slack })
}

pub fn load_certificate(path: &Path) -> Result<Certificate> {
    parse_certificate(&std::fs::read_to_string(path)?)
}

/// The residual combination of a certificate.
pub fn residual(c: &Certificate) -> Result<LinearCombination> {
    c.validate()?;
    let sign = c.sense.sign();
    let mut res = c.target.scaled(&sign);
    res.add_scaled(&LinearCombination::all_ones(CERT_LEVEL)?, &(-(&sign * &c.bound)))?;
    let squares: Vec<LinearCombination> = c.squares.par_iter().map(expand_square).collect::<Result<_>>()?;
    let regs: Vec<LinearCombination> =
        c.regularities.par_iter().map(|r| expand_regularity(&r.flag, &r.weight)).collect::<Result<_>>()?;
    let minus = -Rational::one();
    for term in squares.iter().chain(&regs) {
        res.add_scaled(term, &minus)?;
    }
    res.add_scaled(&c.slack, &minus)?;
    Ok(res)
}

pub fn verify_certificate(c: &Certificate) -> Result<Verdict> {
    verify_with_limit(c, DEFAULT_MAX_DIAGNOSTICS)
}

pub fn verify_with_limit(c: &Certificate, max_diagnostics: usize) -> Result<Verdict> {
    let res = residual(c)?;
    let c6 = census(CERT_LEVEL, Mode::ColorBlind)?;
    let diagnostics = res
        .terms()
        .take(max_diagnostics)
        .map(|(id, v)| Offender { census_id: id, key: c6.key(id).text(), residual: fmt_rational(v) })
        .collect();
    Ok(Verdict { accepted: res.is_zero(), nonzero: res.len(), residual: res, diagnostics })
}

/// Built-in targets with the bounds they are certified against.
#[derive(Clone, Debug)]
pub struct Template {
    pub name: &'static str,
    pub description: &'static str,
    pub sense: Sense,
    /// Exact bound of the flag computation.
    pub exact_bound: Rational,
    /// Rounded bound used downstream (strict inequality).
    pub rounded_bound: Rational,
    pub target: LinearCombination,
}

pub const TEMPLATE_NAMES: [&str; 4] = ["main", "rbt", "rb1111", "tct_monot"];

fn big(num: &str, den: &str) -> Rational {
    parse_rational(&format!("{num}/{den}")).expect("valid literal")
}

pub fn template(name: &str) -> Result<Template> {
    let e = |x: Expression| LinearCombination::from_expression(x).and_then(|c| c.lift(CERT_LEVEL));
    let t = match name {
        "main" => {
            let mut target = e(Expression::Rb2211)?.scaled(&rat(4, 15));
            target.add_scaled(&e(Expression::Rb3111)?, &rat(-26, 45))?;
            target.add_scaled(&e(Expression::Rb1111Plus)?, &rat(27, 5000))?;
            Template {
                name: "main",
                description: "4/15 RB2211 - 26/45 RB3111 + 27/5000 RB1111PLUS >= z",
                sense: Sense::Geq,
                exact_bound: big(
                    "14659368409762259334120822071345940493779",
                    "5575186299632655785383929568162090376495104",
                ),
                rounded_bound: parse_rational("0.002629395")?,
                target,
            }
        }
        "rbt" => Template {
            name: "rbt",
            description: "RBT <= z",
            sense: Sense::Leq,
            exact_bound: big(
                "11151645199111581268390153119301740786646069",
                "27875931498163278926919647840810451882475520",
            ),
            rounded_bound: parse_rational("0.40005")?,
            target: e(Expression::Rbt)?,
        },
        "rb1111" => Template {
            name: "rb1111",
            description: "RB1111 <= z",
            sense: Sense::Leq,
            exact_bound: big(
                "265485807942351943716784898403205143897069",
                "2787593149816327892691964784081045188247552",
            ),
            rounded_bound: parse_rational("0.09523837")?,
            target: e(Expression::Rb1111)?,
        },
        "tct_monot" => {
            let mut target = e(Expression::Tct)?.scaled(&rat(1, 3));
            target.add_scaled(&e(Expression::Monot)?, &Rational::one())?;
            Template {
                name: "tct_monot",
                description: "TCT/3 + MONOT <= z",
                sense: Sense::Leq,
                exact_bound: big(
                    "5576885389284149539505627500589996258413877",
                    "16725558898897967356151788704486271129485312",
                ),
                rounded_bound: parse_rational("0.33343492")?,
                target,
            }
        }
        _ => {
            return Err(Error::invalid(format!(
                "unknown template {name:?} (expected one of {})",
                TEMPLATE_NAMES.join(", ")
            )))
        }
    };
    Ok(t)
}

impl Template {
    /// Certificate skeleton with the exact bound and no terms.
    pub fn certificate(&self) -> Certificate {
        Certificate {
            sense: self.sense,
            bound: self.exact_bound.clone(),
            target: self.target.clone(),
            squares: Vec::new(),
            regularities: Vec::new(),
            slack: LinearCombination::zero(CERT_LEVEL),
        }
    }
}

/// Slack that closes a certificate whose residual is non-negative
/// coefficientwise; `None` if some coefficient is negative.
pub fn complete_with_slack(c: &Certificate) -> Result<Option<Certificate>> {
    let res = residual(c)?;
    if res.terms().any(|(_, v)| v.is_negative()) {
        return Ok(None);
    }
    let mut out = c.clone();
    out.slack.add_scaled(&res, &Rational::one())?;
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trivial() -> Certificate {
        Certificate::new(Sense::Geq, rat(1, 1), LinearCombination::all_ones(6).unwrap()).unwrap()
    }

    #[test]
    fn trivial_certificate() {
        let v = verify_certificate(&trivial()).unwrap();
        assert!(v.accepted);
        let mut c = trivial();
        c.bound = rat(1, 1) + rat(1, 1_000_000);
        let v = verify_with_limit(&c, 5).unwrap();
        assert!(!v.accepted);
        assert_eq!(v.nonzero, 4300);
        assert_eq!(v.diagnostics.len(), 5);
        assert!(v.residual.terms().all(|(_, r)| *r == rat(-1, 1_000_000)));
    }

    #[test]
    fn minimal_file_parses() {
        let text = "CERT v1\nSENSE GEQ\nBOUND 1\nTARGET\n  1: 1/1\nSLACK\nEND\n";
        let c = parse_certificate(text).unwrap();
        assert_eq!(c.target, LinearCombination::all_ones(6).unwrap());
        assert!(verify_certificate(&c).unwrap().accepted);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let neg = "CERT v1\nSENSE GEQ\nBOUND 0\nTARGET\nSLACK\n  6:000000000000000 -1/2\nEND\n";
        let e = parse_certificate(neg).unwrap_err().to_string();
        assert!(e.contains("line 6") && e.contains("negative slack"), "{e}");
        let bad_level = "CERT v1\nSENSE GEQ\nBOUND 0\nSQUARE TYPE=2:0 LEVEL=3\nEND\n";
        assert!(parse_certificate(bad_level).unwrap_err().to_string().contains("level arithmetic"));
        let unknown = "CERT v1\nSENSE GEQ\nBOUND 0\nTARGET\n  3:111 1\nEND\n";
        assert!(parse_certificate(unknown).unwrap_err().to_string().contains("line 5"));
        let neg_w = "CERT v1\nSENSE GEQ\nBOUND 0\nREG FLAG=4:000000|0 W=-1\nEND\n";
        assert!(parse_certificate(neg_w).unwrap_err().to_string().contains("negative weight"));
        assert!(parse_certificate("CERT v1\nSENSE GEQ\nBOUND 0\n").is_err());
        assert!(parse_certificate("CERT v2\n").is_err());
    }

    #[test]
    fn monot_with_own_slack() {
        let monot = LinearCombination::from_expression(Expression::Monot).unwrap();
        let mut c = Certificate::new(Sense::Geq, rat(0, 1), monot).unwrap();
        c.slack = c.target.clone();
        assert!(verify_certificate(&c).unwrap().accepted);
        let again = parse_certificate(&c.to_text().unwrap()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn templates_round_to_stated_bounds() {
        let main = template("main").unwrap();
        assert!(main.exact_bound > main.rounded_bound);
        for name in ["rbt", "rb1111", "tct_monot"] {
            let t = template(name).unwrap();
            assert!(t.exact_bound < t.rounded_bound, "{name}");
        }
        assert!(template("nope").is_err());
    }
}
