//! Induced subgraph counts and densities, the named density expressions and
//! their rooted versions.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canon::{canonical_form, Mode};
use crate::census::{census, Census};
use crate::error::{Error, Result};
use crate::graph::{for_each_subset, is_rainbow, matrix_is_rb1111, Color, ColoredGraph};
use crate::rational::{fmt_rational, ratio_over_binomial, Rational};

/// Named density expressions. Each is the probability that a random set of
/// `arity()` vertices induces a graph accepted by `recognizes`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Expression {
    #[serde(rename = "RBT")]
    Rbt,
    #[serde(rename = "TCT")]
    Tct,
    #[serde(rename = "MONOT")]
    Monot,
    #[serde(rename = "RB1111")]
    Rb1111,
    #[serde(rename = "RB2111")]
    Rb2111,
    #[serde(rename = "RB1111PLUS")]
    Rb1111Plus,
    #[serde(rename = "RB3111")]
    Rb3111,
    #[serde(rename = "RB2211")]
    Rb2211,
}

impl Expression {
    pub const ALL: [Expression; 8] = [
        Expression::Rbt,
        Expression::Tct,
        Expression::Monot,
        Expression::Rb1111,
        Expression::Rb2111,
        Expression::Rb1111Plus,
        Expression::Rb3111,
        Expression::Rb2211,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Expression::Rbt => "RBT",
            Expression::Tct => "TCT",
            Expression::Monot => "MONOT",
            Expression::Rb1111 => "RB1111",
            Expression::Rb2111 => "RB2111",
            Expression::Rb1111Plus => "RB1111PLUS",
            Expression::Rb3111 => "RB3111",
            Expression::Rb2211 => "RB2211",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Expression::Rbt | Expression::Tct | Expression::Monot => 3,
            Expression::Rb1111 => 4,
            Expression::Rb2111 | Expression::Rb1111Plus => 5,
            Expression::Rb3111 | Expression::Rb2211 => 6,
        }
    }

    /// Membership test on a graph with exactly `arity()` vertices.
    pub fn recognizes(self, g: &ColoredGraph) -> bool {
        if g.n() != self.arity() {
            return false;
        }
        match self {
            Expression::Rbt => is_rainbow(g.color(0, 1), g.color(0, 2), g.color(1, 2)),
            Expression::Tct => distinct_colors(g) == 2,
            Expression::Monot => distinct_colors(g) == 1,
            Expression::Rb1111 => g.is_rb1111([0, 1, 2, 3]),
            Expression::Rb2111 => rb1111_copies(g) == 2,
            Expression::Rb1111Plus => rb1111_copies(g) == 1,
            Expression::Rb3111 => blowup_class_sizes(g).is_some_and(|s| s == [3, 1, 1, 1]),
            Expression::Rb2211 => blowup_class_sizes(g).is_some_and(|s| s == [2, 2, 1, 1]),
        }
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Expression {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        let upper = upper.replace('+', "PLUS");
        Expression::ALL
            .into_iter()
            .find(|e| e.name() == upper)
            .ok_or_else(|| Error::invalid(format!("unknown density expression {s:?}")))
    }
}

fn distinct_colors(g: &ColoredGraph) -> usize {
    let mut seen = [false; 3];
    for &c in g.colors() {
        seen[c as usize] = true;
    }
    seen.iter().filter(|&&s| s).count()
}

/// Number of 4-subsets inducing a properly 3-edge-colored `K_4`.
pub fn rb1111_copies(g: &ColoredGraph) -> usize {
    let m = g.matrix();
    let n = g.n();
    let mut count = 0;
    for_each_subset(n, 4, |q| {
        if matrix_is_rb1111(&m, n, q[0], q[1], q[2], q[3]) {
            count += 1;
        }
    });
    count
}

/// Index `i` such that `v` is a twin of `q[i]` relative to the seed
/// `q`: `v` sees every other seed vertex in the color `q[i]` sees it in.
/// At most one such index exists because the seed is properly colored.
#[inline]
pub(crate) fn twin_of(m: &[Color], n: usize, q: &[usize; 4], v: usize) -> Option<usize> {
    (0..4).find(|&i| (0..4).all(|j| j == i || m[v * n + q[j]] == m[q[i] * n + q[j]]))
}

/// Partition of `V(g)` into blow-up classes of some induced properly colored
/// `K_4`, if `g` is a blow-up of one (cross edges inherit the seed's colors,
/// edges inside a class are arbitrary). Class `i` contains seed vertex `i`.
pub fn blowup_classes(g: &ColoredGraph) -> Option<Vec<Vec<usize>>> {
    let n = g.n();
    let m = g.matrix();
    let mut seed = None;
    for_each_subset(n, 4, |q| {
        if seed.is_none() && matrix_is_rb1111(&m, n, q[0], q[1], q[2], q[3]) {
            seed = Some([q[0], q[1], q[2], q[3]]);
        }
    });
    // When no class holds an RB1111 of its own (always the case for classes
    // of at most three vertices) every seed takes one vertex per class, so
    // the first seed found decides. Larger hosts go through the search
    // module's detector, which tries every seed.
    let q = seed?;
    let mut class = vec![usize::MAX; n];
    for (i, &qi) in q.iter().enumerate() {
        class[qi] = i;
    }
    for v in 0..n {
        if class[v] == usize::MAX {
            class[v] = twin_of(&m, n, &q, v)?;
        }
    }
    for u in 0..n {
        for v in u + 1..n {
            let (a, b) = (class[u], class[v]);
            if a != b && m[u * n + v] != m[q[a] * n + q[b]] {
                return None;
            }
        }
    }
    let mut classes = vec![Vec::new(); 4];
    for v in 0..n {
        classes[class[v]].push(v);
    }
    Some(classes)
}

/// Class sizes of [`blowup_classes`], in non-increasing order.
pub fn blowup_class_sizes(g: &ColoredGraph) -> Option<[usize; 4]> {
    let classes = blowup_classes(g)?;
    let mut sizes = [0; 4];
    for (s, c) in sizes.iter_mut().zip(&classes) {
        *s = c.len();
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    Some(sizes)
}

/// `P(H, G)`: number of `v(H)`-subsets of `V(G)` inducing a copy of `H`.
pub fn count_induced(h: &ColoredGraph, g: &ColoredGraph, mode: Mode) -> Result<u64> {
    let t = h.n();
    if t > g.n() {
        return Ok(0);
    }
    let target = canonical_form(h, mode)?;
    let m = g.matrix();
    let n = g.n();
    Ok(par_subset_fold(n, t, |s| {
        let sub = induced_from_matrix(&m, n, s);
        (canonical_form(&sub, mode).expect("size checked") == target) as u64
    }))
}

/// `p(H, G) = P(H, G) / C(v(G), v(H))`, zero when `H` is larger than `G`.
pub fn density(h: &ColoredGraph, g: &ColoredGraph, mode: Mode) -> Result<Rational> {
    if h.n() > g.n() {
        return Ok(Rational::zero());
    }
    Ok(ratio_over_binomial(count_induced(h, g, mode)?, g.n(), h.n()))
}

pub(crate) fn induced_from_matrix(m: &[Color], n: usize, s: &[usize]) -> ColoredGraph {
    ColoredGraph::from_fn(s.len(), |a, b| m[s[a] * n + s[b]])
}

/// Sums `f` over all `k`-subsets of `0..n`, split across workers by smallest
/// element.
pub(crate) fn par_subset_fold(n: usize, k: usize, f: impl Fn(&[usize]) -> u64 + Sync) -> u64 {
    if k == 0 {
        return f(&[]);
    }
    if k > n {
        return 0;
    }
    (0..=n - k)
        .into_par_iter()
        .map(|first| {
            let mut total = 0u64;
            let mut s = vec![first; k];
            for_each_subset(n - first - 1, k - 1, |rest| {
                for (slot, &r) in s[1..].iter_mut().zip(rest) {
                    *slot = first + 1 + r;
                }
                total += f(&s);
            });
            total
        })
        .sum()
}

/// Induced densities of all level-`ℓ` classes in a host graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityVector {
    pub level: usize,
    pub mode: Mode,
    /// `counts[id]` is the number of `ℓ`-subsets inducing census class `id`.
    pub counts: Vec<u64>,
    pub total: u64,
}

impl DensityVector {
    pub fn entry(&self, id: usize) -> Rational {
        Rational::new(self.counts[id].into(), self.total.into())
    }

    pub fn entries(&self) -> Vec<Rational> {
        (0..self.counts.len()).map(|i| self.entry(i)).collect()
    }

    /// CSV lines `census_id,key,p/q` for the nonzero entries.
    pub fn to_csv(&self, census: &Census) -> String {
        let mut out = String::from("census_id,key,density\n");
        for (id, &c) in self.counts.iter().enumerate() {
            if c != 0 {
                writeln!(out, "{id},{},{}", census.key(id), fmt_rational(&self.entry(id))).unwrap();
            }
        }
        out
    }
}

pub fn density_profile(g: &ColoredGraph, level: usize, mode: Mode) -> Result<DensityVector> {
    if level > g.n() || level == 0 {
        return Err(Error::invalid(format!("density level {level} does not fit a host on {} vertices", g.n())));
    }
    let c = census(level, mode)?;
    let n = g.n();
    let m = g.matrix();
    let counts = (0..=n - level)
        .into_par_iter()
        .map(|first| {
            let mut local = vec![0u64; c.len()];
            let mut s = vec![first; level];
            for_each_subset(n - first - 1, level - 1, |rest| {
                for (slot, &r) in s[1..].iter_mut().zip(rest) {
                    *slot = first + 1 + r;
                }
                let id = c.id_of_graph(&induced_from_matrix(&m, n, &s)).expect("census is complete");
                local[id] += 1;
            });
            local
        })
        .reduce(
            || vec![0u64; c.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(DensityVector { level, mode, counts, total: crate::rational::binomial_u64(n, level) })
}

/// Number of `arity`-subsets whose induced graph the recognizer accepts.
pub fn expression_count(e: Expression, g: &ColoredGraph) -> Result<u64> {
    check_arity(e, g.n())?;
    let n = g.n();
    let m = g.matrix();
    Ok(match e {
        Expression::Rbt | Expression::Tct | Expression::Monot => {
            let [rbt, tct, monot] = triangle_counts(&m, n);
            match e {
                Expression::Rbt => rbt,
                Expression::Tct => tct,
                _ => monot,
            }
        }
        Expression::Rb1111 => seeds(&m, n).len() as u64,
        _ => {
            let s = rb_family_counts(&m, n);
            match e {
                Expression::Rb2111 => s.rb2111,
                Expression::Rb1111Plus => s.rb1111plus,
                Expression::Rb3111 => s.rb3111,
                _ => s.rb2211,
            }
        }
    })
}

/// Reference for [`expression_count`]: applies the recognizer to every subset.
pub fn expression_count_scan(e: Expression, g: &ColoredGraph) -> Result<u64> {
    check_arity(e, g.n())?;
    let n = g.n();
    let m = g.matrix();
    Ok(par_subset_fold(n, e.arity(), |s| e.recognizes(&induced_from_matrix(&m, n, s)) as u64))
}

pub fn density_expression(e: Expression, g: &ColoredGraph) -> Result<Rational> {
    Ok(ratio_over_binomial(expression_count(e, g)?, g.n(), e.arity()))
}

fn check_arity(e: Expression, n: usize) -> Result<()> {
    if e.arity() > n {
        return Err(Error::invalid(format!("{e} needs at least {} vertices, host has {n}", e.arity())));
    }
    Ok(())
}

/// Numbers of rainbow, two-colored and monochromatic triangles.
fn triangle_counts(m: &[Color], n: usize) -> [u64; 3] {
    let per_first: Vec<[u64; 3]> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut t = [0u64; 3];
            for b in a + 1..n {
                let ab = m[a * n + b];
                for c in b + 1..n {
                    let (ac, bc) = (m[a * n + c], m[b * n + c]);
                    let k = if ab == ac && ac == bc {
                        2
                    } else if is_rainbow(ab, ac, bc) {
                        0
                    } else {
                        1
                    };
                    t[k] += 1;
                }
            }
            t
        })
        .collect();
    per_first.iter().fold([0; 3], |acc, t| [acc[0] + t[0], acc[1] + t[1], acc[2] + t[2]])
}

pub fn count_rainbow_triangles(g: &ColoredGraph) -> u64 {
    triangle_counts(&g.matrix(), g.n())[0]
}

/// All induced properly colored `K_4`s, in lexicographic order.
pub(crate) fn seeds(m: &[Color], n: usize) -> Vec<[usize; 4]> {
    let per_first: Vec<Vec<[usize; 4]>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut out = Vec::new();
            for b in a + 1..n {
                for c in b + 1..n {
                    if !is_rainbow(m[a * n + b], m[a * n + c], m[b * n + c]) {
                        continue;
                    }
                    for d in c + 1..n {
                        if matrix_is_rb1111(m, n, a, b, c, d) {
                            out.push([a, b, c, d]);
                        }
                    }
                }
            }
            out
        })
        .collect();
    per_first.into_iter().flatten().collect()
}

#[derive(Default)]
struct RbFamily {
    rb2111: u64,
    rb1111plus: u64,
    rb3111: u64,
    rb2211: u64,
}

/// Counts of the 5- and 6-vertex blow-up shapes from the seed list. A 5-set
/// `Q + v` contains two RB1111 copies exactly when `v` is a twin of a seed
/// vertex and one copy otherwise; 3111 and 2211 blow-ups contain three and
/// four copies, each seeding the same class structure.
fn rb_family_counts(m: &[Color], n: usize) -> RbFamily {
    let list = seeds(m, n);
    let parts: Vec<[u64; 4]> = list
        .par_iter()
        .map(|q| {
            let mut twins: [Vec<usize>; 4] = Default::default();
            let mut others = 0u64;
            for v in 0..n {
                if q.contains(&v) {
                    continue;
                }
                match twin_of(m, n, q, v) {
                    Some(i) => twins[i].push(v),
                    None => others += 1,
                }
            }
            let twin_total: u64 = twins.iter().map(|t| t.len() as u64).sum();
            let same: u64 = twins.iter().map(|t| (t.len() * t.len().saturating_sub(1) / 2) as u64).sum();
            let mut cross = 0u64;
            for i in 0..4 {
                for j in i + 1..4 {
                    let want = m[q[i] * n + q[j]];
                    for &v in &twins[i] {
                        cross += twins[j].iter().filter(|&&w| m[v * n + w] == want).count() as u64;
                    }
                }
            }
            [twin_total, others, same, cross]
        })
        .collect();
    let sum = parts.iter().fold([0u64; 4], |a, p| [a[0] + p[0], a[1] + p[1], a[2] + p[2], a[3] + p[3]]);
    debug_assert!(sum[0] % 2 == 0 && sum[2] % 3 == 0 && sum[3] % 4 == 0);
    RbFamily { rb2111: sum[0] / 2, rb1111plus: sum[1], rb3111: sum[2] / 3, rb2211: sum[3] / 4 }
}

/// `D(X)`: the fraction of `(arity - |X|)`-subsets `S` of `V \ X` such that
/// `X ∪ S` induces a member of the expression's class.
pub fn rooted_density(e: Expression, g: &ColoredGraph, x: &[usize]) -> Result<Rational> {
    let n = g.n();
    let mut roots = x.to_vec();
    roots.sort_unstable();
    roots.dedup();
    if roots.len() != x.len() {
        return Err(Error::invalid("rooted set has repeated vertices"));
    }
    if let Some(&v) = roots.iter().find(|&&v| v >= n) {
        return Err(Error::invalid(format!("vertex {v} out of range for n = {n}")));
    }
    if roots.len() > e.arity() {
        return Err(Error::invalid(format!("{e} has arity {}, rooted at {} vertices", e.arity(), roots.len())));
    }
    let rest: Vec<usize> = (0..n).filter(|v| !roots.contains(v)).collect();
    let free = e.arity() - roots.len();
    if free > rest.len() {
        return Err(Error::invalid(format!("{e} does not fit: {} free vertices needed", free)));
    }
    let m = g.matrix();
    let hits = par_subset_fold(rest.len(), free, |s| {
        let mut set: Vec<usize> = roots.iter().copied().chain(s.iter().map(|&i| rest[i])).collect();
        set.sort_unstable();
        e.recognizes(&induced_from_matrix(&m, n, &set)) as u64
    });
    Ok(ratio_over_binomial(hits, rest.len(), free))
}

/// Color statistics of the edges at one vertex. All densities are divided by
/// `n`, the number of vertices of the host.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorProfile {
    /// Fraction of vertices joined to `v` in colors 0, 1, 2.
    pub color_degrees: [Rational; 3],
    /// Largest entry of `color_degrees`.
    pub mono_degree: Rational,
    /// Per part of the partition: edge counts from `v` in each color.
    pub per_part: Vec<[u64; 3]>,
    /// Edges from `v` to other parts whose color differs from the pattern,
    /// divided by `n`; present when a pattern is given and `v` lies in a part.
    pub funky_degree: Option<Rational>,
}

/// Color degrees of `v`, optionally split by a vertex partition. `pattern`
/// prescribes the color between parts `i` and `j` as its edge `{i, j}`.
pub fn rooted_color_profile(
    g: &ColoredGraph,
    v: usize,
    partition: Option<&[Vec<usize>]>,
    pattern: Option<&ColoredGraph>,
) -> Result<ColorProfile> {
    let n = g.n();
    if v >= n {
        return Err(Error::invalid(format!("vertex {v} out of range for n = {n}")));
    }
    let mut counts = [0u64; 3];
    for u in (0..n).filter(|&u| u != v) {
        counts[g.color(u, v) as usize] += 1;
    }
    let frac = |c: u64| Rational::new(c.into(), (n as u64).into());
    let color_degrees = counts.map(frac);
    let mono_degree = color_degrees.iter().max().cloned().expect("three colors");

    let mut per_part = Vec::new();
    let mut funky_degree = None;
    if let Some(parts) = partition {
        let mut owner = vec![usize::MAX; n];
        for (i, part) in parts.iter().enumerate() {
            for &u in part {
                if u >= n {
                    return Err(Error::invalid(format!("vertex {u} out of range for n = {n}")));
                }
                if owner[u] != usize::MAX {
                    return Err(Error::invalid(format!("vertex {u} appears in two parts")));
                }
                owner[u] = i;
            }
        }
        per_part = parts
            .iter()
            .map(|part| {
                let mut c = [0u64; 3];
                for &u in part.iter().filter(|&&u| u != v) {
                    c[g.color(u, v) as usize] += 1;
                }
                c
            })
            .collect();
        if let Some(p) = pattern {
            if p.n() != parts.len() {
                return Err(Error::invalid(format!("pattern has {} vertices for {} parts", p.n(), parts.len())));
            }
            if owner[v] != usize::MAX {
                let home = owner[v];
                let funky = (0..n)
                    .filter(|&u| owner[u] != usize::MAX && owner[u] != home)
                    .filter(|&u| g.color(u, v) != p.color(home, owner[u]))
                    .count() as u64;
                funky_degree = Some(frac(funky));
            }
        }
    }
    Ok(ColorProfile { color_degrees, mono_degree, per_part, funky_degree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn blowup(base: &ColoredGraph, sizes: &[usize], inner: Color) -> ColoredGraph {
        let owner: Vec<usize> = sizes.iter().enumerate().flat_map(|(i, &s)| std::iter::repeat_n(i, s)).collect();
        ColoredGraph::from_fn(owner.len(), |a, b| {
            if owner[a] == owner[b] {
                inner
            } else {
                base.color(owner[a], owner[b])
            }
        })
    }

    #[test]
    fn rainbow_in_rb1111() {
        let q = ColoredGraph::rb1111();
        let t = ColoredGraph::rainbow_triangle();
        assert_eq!(count_induced(&t, &q, Mode::ColorBlind).unwrap(), 4);
        assert_eq!(density(&t, &q, Mode::ColorBlind).unwrap(), rat(1, 1));
        assert_eq!(count_induced(&t, &ColoredGraph::monochromatic(5, 0), Mode::ColorBlind).unwrap(), 0);
        assert_eq!(density(&ColoredGraph::monochromatic(6, 0), &q, Mode::Exact).unwrap(), rat(0, 1));
        assert_eq!(count_rainbow_triangles(&q), 4);
        assert_eq!(count_rainbow_triangles(&ColoredGraph::monochromatic(10, 1)), 0);
    }

    #[test]
    fn profiles_sum_to_one() {
        let g = ColoredGraph::from_fn(8, |a, b| ((a * 7 + b * 3) % 3) as Color);
        let p = density_profile(&g, 3, Mode::ColorBlind).unwrap();
        assert_eq!(p.entries().iter().sum::<Rational>(), rat(1, 1));
        let mono = density_profile(&ColoredGraph::monochromatic(6, 0), 3, Mode::ColorBlind).unwrap();
        assert_eq!(mono.counts, vec![20, 0, 0]);
        let q = density_profile(&ColoredGraph::rb1111(), 3, Mode::ColorBlind).unwrap();
        assert_eq!(q.entry(2), rat(1, 1));
        assert!(density_profile(&q_graph(), 5, Mode::Exact).is_err());
    }

    fn q_graph() -> ColoredGraph {
        ColoredGraph::rb1111()
    }

    #[test]
    fn expression_values() {
        assert_eq!(density_expression(Expression::Rbt, &ColoredGraph::rb1111()).unwrap(), rat(1, 1));
        assert_eq!(density_expression(Expression::Monot, &ColoredGraph::monochromatic(7, 2)).unwrap(), rat(1, 1));
        let g = blowup(&ColoredGraph::rb1111(), &[2, 2, 1, 1], 1);
        assert_eq!(density_expression(Expression::Rb2211, &g).unwrap(), rat(1, 1));
        assert_eq!(density_expression(Expression::Rb3111, &g).unwrap(), rat(0, 1));
        let h = blowup(&ColoredGraph::rb1111(), &[3, 1, 1, 1], 0);
        assert_eq!(expression_count(Expression::Rb3111, &h).unwrap(), 1);
        assert_eq!(rb1111_copies(&h), 3);
        assert_eq!(rb1111_copies(&g), 4);
        assert!(density_expression(Expression::Rb2211, &ColoredGraph::rb1111()).is_err());
    }

    #[test]
    fn names_parse() {
        for e in Expression::ALL {
            assert_eq!(e.name().parse::<Expression>().unwrap(), e);
        }
        assert_eq!("rb1111+".parse::<Expression>().unwrap(), Expression::Rb1111Plus);
        assert!("RB9".parse::<Expression>().is_err());
    }

    #[test]
    fn single_twin_gives_2111() {
        for inner in 0..3 {
            let g = blowup(&ColoredGraph::rb1111(), &[2, 1, 1, 1], inner);
            assert!(Expression::Rb2111.recognizes(&g));
            assert!(!Expression::Rb1111Plus.recognizes(&g));
        }
    }

    #[test]
    fn rooted_rainbow_density_in_monochromatic_host() {
        let g = ColoredGraph::monochromatic(6, 0);
        assert_eq!(rooted_density(Expression::Rbt, &g, &[2]).unwrap(), rat(0, 1));
        assert!(rooted_density(Expression::Rbt, &g, &[9]).is_err());
        assert!(rooted_density(Expression::Rbt, &g, &[0, 1, 2, 3]).is_err());
    }

    #[test]
    fn color_profile_of_monochromatic_host() {
        let g = ColoredGraph::monochromatic(5, 0);
        let p = rooted_color_profile(&g, 3, None, None).unwrap();
        assert_eq!(p.color_degrees, [rat(4, 5), rat(0, 1), rat(0, 1)]);
        assert_eq!(p.mono_degree, rat(4, 5));
        let overlapping = [vec![0, 1], vec![1, 2]];
        assert!(rooted_color_profile(&g, 0, Some(&overlapping), None).is_err());
        assert!(rooted_color_profile(&g, 7, None, None).is_err());
    }

    #[test]
    fn funky_degrees_after_one_flip() {
        let base = ColoredGraph::rb1111();
        let sizes = [3, 3, 2, 2];
        let mut g = blowup(&base, &sizes, 0);
        let parts = vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7], vec![8, 9]];
        for v in 0..10 {
            let p = rooted_color_profile(&g, v, Some(&parts), Some(&base)).unwrap();
            assert_eq!(p.funky_degree, Some(rat(0, 1)));
        }
        let c = g.color(0, 3);
        g.set_color(0, 3, (c + 1) % 3);
        let funky: Vec<usize> = (0..10)
            .filter(|&v| {
                let p = rooted_color_profile(&g, v, Some(&parts), Some(&base)).unwrap();
                p.funky_degree.unwrap() == rat(1, 10)
            })
            .collect();
        assert_eq!(funky, [0, 3]);
    }
}
