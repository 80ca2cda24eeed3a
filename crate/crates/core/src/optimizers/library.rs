//! The built-in programs of the stability argument for extremal colorings.
//!
//! Notation: a near-extremal coloring is split into parts `X_1..X_4` of
//! relative sizes `x_1..x_4` that look like the four vertices of a rainbow
//! K4, plus a leftover part of size `x_0`; `f` is the normalized number of
//! funky edges. The partition inequality
//!
//! ```text
//! 2 Σ_{i<j} x_i x_j − 2f − (26/9) Σ x_i² + (27/1000) x_0 > 0.02760856
//! ```
//!
//! bounds the part sizes. Strict inequalities that would be tight at the
//! optimum are solved as their closures, which can only raise a maximum.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::Serialize;

use super::program::{Goal, PolyProgram};
use super::solver::{render_enclosure, report_width, solve_case_enumeration, Solution, SolveReport};
use super::univariate::{maximize_univariate, UnivariateMax, UnivariateReport};
use super::upoly::{isolate_roots, Enclosure, EnclosureReport, RootIsolation, UPoly};
use crate::error::{Error, Result};
use crate::rational::{fmt_decimal, parse_rational, Rational};

const PARTITION: &str = "2*(x1*x2 + x1*x3 + x1*x4 + x2*x3 + x2*x4 + x3*x4) - 2*f \
                         - 26/9*(x1^2 + x2^2 + x3^2 + x4^2) + 27/1000*x0 - 0.02760856";

/// A linear form bounded through the partition inequality, with the
/// published bound it must respect.
#[derive(Clone, Copy, Debug)]
pub struct BoundTarget {
    pub name: &'static str,
    pub goal: Goal,
    pub objective: &'static str,
    /// Decimal; an upper bound for `Maximize`, a lower bound for `Minimize`.
    pub bound: &'static str,
}

pub const BOUND_TARGETS: [BoundTarget; 9] = [
    BoundTarget { name: "max_x0", goal: Goal::Maximize, objective: "x0", bound: "0.0059605" },
    BoundTarget { name: "max_x1", goal: Goal::Maximize, objective: "x1", bound: "0.255713" },
    BoundTarget { name: "min_x1", goal: Goal::Minimize, objective: "x1", bound: "0.244287" },
    BoundTarget { name: "max_x1_x2", goal: Goal::Maximize, objective: "x1 + x2", bound: "0.506597" },
    BoundTarget { name: "min_x1_x2", goal: Goal::Minimize, objective: "x1 + x2", bound: "0.493403" },
    BoundTarget { name: "max_f", goal: Goal::Maximize, objective: "f", bound: "0.000084609" },
    BoundTarget {
        name: "max_funky_coefficient",
        goal: Goal::Maximize,
        objective: "-25/27*x1 + 2*x2 - 1/3*x2 - 1/3*x3 - 1/3*x4",
        bound: "0.0315",
    },
    BoundTarget { name: "min_skew_sum", goal: Goal::Minimize, objective: "2*x1 - x2 + x3 - x0", bound: "0.484987" },
    BoundTarget { name: "max_x1_x0", goal: Goal::Maximize, objective: "x1 + x0", bound: "0.2563" },
];

/// The program "extremize `objective` subject to the partition inequality,
/// `Σ x_i = 1` and non-negativity" over `x0..x4, f`.
pub fn partition_program(name: &str, goal: Goal, objective: &str) -> Result<PolyProgram> {
    Ok(PolyProgram::new(name, &["x0", "x1", "x2", "x3", "x4", "f"], goal, objective)?
        .anchor("part sizes and funky edges of a near-extremal coloring")
        .note("strict partition inequality solved as its closure")
        .geq(PARTITION)?
        .eq("x0 + x1 + x2 + x3 + x4 - 1")?
        .geq("x0")?
        .geq("x1")?
        .geq("x2")?
        .geq("x3")?
        .geq("x4")?
        .geq("f")?)
}

/// A vertex of `X_1` with almost all edges to `X_1` of one color: bound on
/// its normalized rainbow degree after symmetrizing `x_2 = x_3 = x_4` and
/// removing its funky edges.
pub fn one_color_vertex() -> Result<PolyProgram> {
    Ok(PolyProgram::new("one_color_vertex", &["x1", "x2", "x0", "f"], Goal::Maximize, "(x1 - 0.033 + 0.033/4)*0.033 + 3*x2^2 + f + x0")?
        .anchor("rainbow degree of a vertex with one dominant color inside its part; value < 0.1991")
        .note("strict partition inequality solved as its closure")
        .geq("6*x1*x2 - 8/3*x2^2 - 26/9*x1^2 + 0.027*x0 - 2*f - 0.02760856")?
        .eq("x1 + 3*x2 + x0 - 1")?
        .geq("x1")?
        .geq("x2")?
        .geq("x0")?
        .geq("f")?)
}

/// The four sign cases of `f` and `x_0` for [`one_color_vertex`], with `x_0`
/// or `x_2` substituted out.
pub fn one_color_case(case: u8) -> Result<PolyProgram> {
    const C: &str = "3/4*0.033^2";
    let prog = match case {
        1 => PolyProgram::new("one_color_case1", &["x1"], Goal::Maximize, &format!("0.033*x1 + (1 - x1)^2/3 - {C}"))?
            .anchor("f = 0 and x0 = 0: optimum near x1 = 0.24424, value < 0.1985")
            .note("strict partition inequality solved as its closure")
            .geq("2*x1*(1 - x1) - 8/27*(1 - x1)^2 - 26/9*x1^2 - 0.02760856")?,
        2 => PolyProgram::new(
            "one_color_case2",
            &["x1", "x2"],
            Goal::Maximize,
            &format!("0.033*x1 + 3*x2^2 - x1 - 3*x2 + 1 - {C}"),
        )?
        .anchor("f = 0 and x0 > 0: optimum near (0.24662, 0.24936), value < 0.19991")
        .note("strict partition inequality solved as its closure")
        .geq("6*x1*x2 - 8/3*x2^2 - 26/9*x1^2 + 0.027*(1 - x1 - 3*x2) - 0.02760856")?
        .geq("x1 - 0.24")?
        .geq("0.26 - x1")?
        .geq("x2 - 0.24")?
        .geq("0.26 - x2")?
        .gt("1 - x1 - 3*x2")?,
        3 => PolyProgram::new("one_color_case3", &["x1", "f"], Goal::Maximize, &format!("0.033*x1 + (1 - x1)^2/3 + f - {C}"))?
            .anchor("f > 0 and x0 = 0: the stationary point forces f < 0")
            .note("strict partition inequality solved as its closure")
            .geq("2*x1*(1 - x1) - 8/27*(1 - x1)^2 - 26/9*x1^2 - 2*f - 0.02760856")?
            .gt("f")?,
        4 => PolyProgram::new("one_color_case4", &["x1", "x2", "f"], Goal::Maximize, "0.033*x1 + 3*x2^2 + 1 - x1 - 3*x2 + f")?
            .anchor("f > 0 and x0 > 0: the stationary point forces f < 0")
            .note("strict partition inequality solved as its closure")
            .note("objective as displayed, without the constant -3/4*0.033^2; it does not move the argmax")
            .geq("6*x1*x2 - 8/3*x2^2 - 26/9*x1^2 + 0.027*(1 - x1 - 3*x2) - 2*f - 0.02760856")?
            .gt("f")?
            .gt("1 - x1 - 3*x2")?,
        _ => return Err(Error::invalid(format!("no case {case}; cases are 1 to 4"))),
    };
    Ok(prog)
}

/// A black vertex `v ∈ X_1` with a funky neighbor `w ∈ X_2`: the largest
/// value of `x_1 − b_1(v)` the recoloring argument allows.
pub fn black_vertex_funky() -> Result<PolyProgram> {
    Ok(PolyProgram::new(
        "black_vertex_funky",
        &["x1", "x2", "x0", "dv", "dw"],
        Goal::Maximize,
        "2*(x1 + x2 + x0) - 0.033 - 1 + 2*dv + 2*dw",
    )?
    .anchor("funky edge at a black vertex; value < 0.075")
    .note("o(1) terms dropped")
    .note("x1 <= x2 without loss of generality")
    .note("auxiliary constraints: funky degrees non-negative, the bound on x0, and x_i + x0 <= 0.2563")
    .geq("2*0.000084609 - dv*dw")?
    .geq("1 - 35/9*x1 - dv")?
    .geq("1 - 35/9*x2 - dw")?
    .geq("x1 - 0.244287")?
    .geq("0.255713 - x1")?
    .geq("x2 - 0.244287")?
    .geq("0.255713 - x2")?
    .geq("x2 - x1")?
    .aux_geq("dv")?
    .aux_geq("dw")?
    .aux_geq("x0")?
    .aux_geq("0.0059605 - x0")?
    .aux_geq("0.2563 - x1 - x0")?
    .aux_geq("0.2563 - x2 - x0")?)
}

/// A univariate program `max num/den` on `[lo, hi]`.
#[derive(Clone, Debug)]
pub struct UnivariateProgram {
    pub name: String,
    pub anchor: String,
    pub num: UPoly,
    pub den: UPoly,
    pub lo: Rational,
    pub hi: Rational,
}

fn dec(s: &str) -> Rational {
    parse_rational(s).expect("literal")
}

/// [`black_vertex_funky`] reduced to `x_1`:
/// `1.4796 − (52/9) x_1 + 0.003045924 / (9 − 35 x_1)`.
pub fn black_vertex_funky_1d() -> UnivariateProgram {
    let den = UPoly::new(vec![dec("9"), dec("-35")]);
    let lin = UPoly::new(vec![dec("1.4796"), -dec("52") / dec("9")]);
    let num = lin.mul(&den).add(&UPoly::constant(dec("0.003045924")));
    UnivariateProgram {
        name: "black_vertex_funky_1d".into(),
        anchor: "one-variable relaxation; maximum at x1 = 0.244287, value < 0.075".into(),
        num,
        den,
        lo: dec("0.244287"),
        hi: dec("0.255713"),
    }
}

const RGB: [&str; 3] = ["r", "g", "b"];

/// Rainbow triangles at a vertex of `X_0` whose colors to `X_i` split as
/// `r_i, g_i, b_i`, with the funky-degree lower bounds for each placement.
pub fn x0_vertex_triangles() -> Result<PolyProgram> {
    let vars: Vec<String> = (1..=4).flat_map(|i| RGB.iter().map(move |c| format!("{c}{i}"))).collect();
    let names: Vec<&str> = vars.iter().map(String::as_str).collect();
    let mut obj = String::new();
    for i in 1..=4 {
        write!(obj, "r{i}*g{i} + r{i}*b{i} + g{i}*b{i} + ").unwrap();
    }
    obj.push_str(
        "r1*(b2 + g4) + b2*g4 + g1*(b3 + r4) + b3*r4 + b1*(r2 + g3) + r2*g3 + g2*(r3 + b4) + r3*b4",
    );
    let mut prog = PolyProgram::new("x0_vertex_triangles", &names, Goal::Maximize, &obj)?
        .anchor("rainbow degree of a leftover vertex; value < 0.1945")
        .eq(&format!("{} - 1", vars.join(" + ")))?;
    for i in 1..=4 {
        prog = prog.geq(&format!("r{i} + g{i} + b{i} - 0.244287"))?;
    }
    for s in [
        "r2 + b2 + g3 + b3 + r4 + g4",
        "r1 + b1 + r3 + g3 + g4 + b4",
        "g1 + b1 + r2 + g2 + r4 + b4",
        "r1 + g1 + g2 + b2 + r3 + b3",
    ] {
        prog = prog.geq(&format!("{s} - 0.12866"))?;
    }
    let first = prog.constraints.len();
    for v in &vars {
        prog = prog.geq(v)?;
    }
    for i in 0..4 {
        // r_i = g_i = b_i = 0 contradicts r_i + g_i + b_i >= 0.244287
        let base = first + 3 * i;
        prog = prog.prune(&[base, base + 1, base + 2]);
    }
    Ok(prog)
}

/// Real roots of a polynomial on an interval, to a given width.
#[derive(Clone, Debug)]
pub struct RootProgram {
    pub name: String,
    pub anchor: String,
    pub poly: UPoly,
    pub lo: Rational,
    pub hi: Rational,
    pub width: Rational,
}

/// `(3/2)t³ − 0.454961t² + 0.03449825t − 0.000102` on `[0, 1]`, whose
/// non-positive set bounds the funky degree of a leftover vertex.
pub fn funky_degree_cubic() -> RootProgram {
    RootProgram {
        name: "funky_degree_cubic".into(),
        anchor: "non-positive set inside [0, 0.0031] ∪ [0.12866, 0.1716]".into(),
        poly: UPoly::new(vec![dec("-0.000102"), dec("0.03449825"), dec("-0.454961"), dec("1.5")]),
        lo: dec("0"),
        hi: dec("1"),
        width: dec("1e-9"),
    }
}

/// The certified answer for [`funky_degree_cubic`].
#[derive(Clone, Debug)]
pub struct CubicCertificate {
    pub isolation: RootIsolation,
    /// Maximal intervals of `[lo, hi]` on which the polynomial is ≤ 0, as
    /// outer enclosures.
    pub nonpositive: Vec<(Rational, Rational)>,
    /// Whether `nonpositive` lies inside `[0, 0.0031] ∪ [0.12866, 0.1716]`.
    pub contained: bool,
}

/// Outer enclosures of the maximal intervals where `p ≤ 0` on `[lo, hi]`.
pub fn nonpositive_set(iso: &RootIsolation, lo: &Rational, hi: &Rational) -> Vec<(Rational, Rational)> {
    // gaps and roots alternate: gap 0, root 0, gap 1, ..., root k-1, gap k
    let mut segments: Vec<(Rational, Rational, bool)> = Vec::new();
    let mut left = lo.clone();
    for (i, sign) in iso.signs.iter().enumerate() {
        let right = iso.roots.get(i).map_or_else(|| hi.clone(), |r| r.lo.clone());
        segments.push((left, right, *sign != Ordering::Greater));
        if let Some(r) = iso.roots.get(i) {
            segments.push((r.lo.clone(), r.hi.clone(), true));
            left = r.hi.clone();
        } else {
            left = hi.clone();
        }
    }
    let mut out: Vec<(Rational, Rational)> = Vec::new();
    let mut extend = false;
    for (a, b, nonpositive) in segments {
        if !nonpositive {
            extend = false;
            continue;
        }
        match out.last_mut() {
            Some(last) if extend => last.1 = b,
            _ => out.push((a, b)),
        }
        extend = true;
    }
    out
}

pub fn certify_cubic() -> Result<CubicCertificate> {
    let c = funky_degree_cubic();
    let isolation = isolate_roots(&c.poly, &c.lo, &c.hi, &c.width)?;
    let nonpositive = nonpositive_set(&isolation, &c.lo, &c.hi);
    let allowed = [(dec("0"), dec("0.0031")), (dec("0.12866"), dec("0.1716"))];
    let contained = nonpositive.iter().all(|(a, b)| allowed.iter().any(|(u, v)| u <= a && b <= v));
    Ok(CubicCertificate { isolation, nonpositive, contained })
}

// ---- bounds report --------------------------------------------------------

#[derive(Clone, Debug)]
pub struct BoundCheck {
    pub target: BoundTarget,
    pub solution: Solution,
    pub bound: Rational,
    pub consistent: bool,
}

impl BoundCheck {
    pub fn value(&self) -> Option<&Enclosure> {
        self.solution.optimum.as_ref().map(|o| &o.value)
    }
}

/// Solves every bound target and compares each optimum with its published
/// bound: a maximum must not exceed it and a minimum must not fall below it.
pub fn derive_x_bounds() -> Result<Vec<BoundCheck>> {
    BOUND_TARGETS
        .iter()
        .map(|t| {
            let prog = partition_program(&format!("partition_{}", t.name), t.goal, t.objective)?;
            let solution = solve_case_enumeration(&prog)?;
            let bound = dec(t.bound);
            let consistent = match (&solution.optimum, t.goal) {
                (None, _) => false,
                (Some(o), Goal::Maximize) => o.value.hi <= bound && o.verified,
                (Some(o), Goal::Minimize) => o.value.lo >= bound && o.verified,
            };
            Ok(BoundCheck { target: *t, solution, bound, consistent })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundLine {
    pub target: String,
    pub goal: &'static str,
    pub objective: String,
    pub optimum: Option<EnclosureReport>,
    pub bound: String,
    pub consistent: bool,
}

pub fn bounds_report(checks: &[BoundCheck]) -> Vec<BoundLine> {
    checks
        .iter()
        .map(|c| BoundLine {
            target: c.target.name.into(),
            goal: if c.target.goal == Goal::Maximize { "max" } else { "min" },
            objective: c.target.objective.into(),
            optimum: c.value().map(Enclosure::report),
            bound: c.target.bound.into(),
            consistent: c.consistent,
        })
        .collect()
}

pub fn bounds_text(checks: &[BoundCheck]) -> String {
    let mut out = String::new();
    for c in checks {
        let goal = if c.target.goal == Goal::Maximize { "max" } else { "min" };
        let rel = if c.target.goal == Goal::Maximize { "<=" } else { ">=" };
        let v = c.value().map(render_enclosure).unwrap_or_else(|| "infeasible".into());
        let verdict = if c.consistent { "OK" } else { "VIOLATED" };
        writeln!(out, "{verdict} {} {goal} {} = {v} {rel} {}", c.target.name, c.target.objective, c.target.bound).unwrap();
    }
    out
}

// ---- by name --------------------------------------------------------------

pub enum LibraryEntry {
    Program(PolyProgram),
    Univariate(UnivariateProgram),
    Roots(RootProgram),
}

pub fn library_names() -> Vec<String> {
    let mut names: Vec<String> = BOUND_TARGETS.iter().map(|t| format!("partition_{}", t.name)).collect();
    names.extend((1..=4).map(|c| format!("one_color_case{c}")));
    for n in ["one_color_vertex", "black_vertex_funky", "black_vertex_funky_1d", "x0_vertex_triangles", "funky_degree_cubic"] {
        names.push(n.into());
    }
    names
}

pub fn library_entry(name: &str) -> Result<LibraryEntry> {
    if let Some(t) = name.strip_prefix("partition_").and_then(|s| BOUND_TARGETS.iter().find(|t| t.name == s)) {
        return partition_program(name, t.goal, t.objective).map(LibraryEntry::Program);
    }
    if let Some(c) = name.strip_prefix("one_color_case").and_then(|s| s.parse::<u8>().ok()) {
        return one_color_case(c).map(LibraryEntry::Program);
    }
    Ok(match name {
        "one_color_vertex" => LibraryEntry::Program(one_color_vertex()?),
        "black_vertex_funky" => LibraryEntry::Program(black_vertex_funky()?),
        "black_vertex_funky_1d" => LibraryEntry::Univariate(black_vertex_funky_1d()),
        "x0_vertex_triangles" => LibraryEntry::Program(x0_vertex_triangles()?),
        "funky_degree_cubic" => LibraryEntry::Roots(funky_degree_cubic()),
        _ => return Err(Error::invalid(format!("no built-in program {name:?}; known: {}", library_names().join(", ")))),
    })
}

/// Result of running a library entry, for reports.
#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum EntryReport {
    Program(SolveReport),
    Univariate { program: String, anchor: String, maximum: UnivariateReport },
    Roots { program: String, anchor: String, roots: Vec<EnclosureReport>, nonpositive: Vec<[String; 2]>, contained: bool },
}

pub enum EntryResult {
    Program(Solution),
    Univariate(UnivariateProgram, UnivariateMax),
    Roots(RootProgram, CubicCertificate),
}

pub fn run_entry(entry: LibraryEntry) -> Result<EntryResult> {
    Ok(match entry {
        LibraryEntry::Program(p) => EntryResult::Program(solve_case_enumeration(&p)?),
        LibraryEntry::Univariate(u) => {
            let m = maximize_univariate(&u.num, &u.den, &u.lo, &u.hi)?;
            EntryResult::Univariate(u, m)
        }
        LibraryEntry::Roots(r) => {
            let isolation = isolate_roots(&r.poly, &r.lo, &r.hi, &r.width)?;
            let nonpositive = nonpositive_set(&isolation, &r.lo, &r.hi);
            let cert = if r.name == "funky_degree_cubic" {
                certify_cubic()?
            } else {
                CubicCertificate { isolation, nonpositive, contained: true }
            };
            EntryResult::Roots(r, cert)
        }
    })
}

impl EntryResult {
    pub fn report(&self) -> EntryReport {
        match self {
            EntryResult::Program(s) => EntryReport::Program(s.report()),
            EntryResult::Univariate(u, m) => {
                EntryReport::Univariate { program: u.name.clone(), anchor: u.anchor.clone(), maximum: m.report() }
            }
            EntryResult::Roots(r, c) => EntryReport::Roots {
                program: r.name.clone(),
                anchor: r.anchor.clone(),
                roots: c.isolation.roots.iter().map(|x| x.value(&r.width).report()).collect(),
                nonpositive: c.nonpositive.iter().map(|(a, b)| [fmt_decimal(a, 10), fmt_decimal(b, 10)]).collect(),
                contained: c.contained,
            },
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            EntryResult::Program(s) => s.to_text(),
            EntryResult::Univariate(u, m) => format!(
                "program {}\nanchor {}\nmax {}\n  at {}\nendpoint {}\n",
                u.name,
                u.anchor,
                render_enclosure(&m.value),
                render_enclosure(&m.arg),
                m.at_endpoint
            ),
            EntryResult::Roots(r, c) => {
                let mut out = format!("program {}\nanchor {}\n", r.name, r.anchor);
                for x in &c.isolation.roots {
                    writeln!(out, "root {}", render_enclosure(&x.value(&report_width()))).unwrap();
                }
                for (a, b) in &c.nonpositive {
                    writeln!(out, "nonpositive [{}, {}]", fmt_decimal(a, 10), fmt_decimal(b, 10)).unwrap();
                }
                writeln!(out, "contained {}", c.contained).unwrap();
                out
            }
        }
    }
}
