//! Exhaustive search for colorings with the most rainbow triangles at small
//! `n`, detection of blow-up structure, and the per-vertex balance check.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::canon::{canonical_form, CanonicalKey, Mode};
use crate::census::{census, MAX_CENSUS_LEVEL};
use crate::densities::{count_rainbow_triangles, seeds, twin_of};
use crate::error::{Error, Result};
use crate::graph::{edge_count, is_rainbow, Color, ColoredGraph};

pub const MAX_UNPRUNED_N: usize = 6;
pub const MAX_PRUNED_N: usize = MAX_CENSUS_LEVEL + 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub n: usize,
    pub maximum: u64,
    /// Color-blind classes of all colorings attaining the maximum, sorted.
    pub witnesses: Vec<CanonicalKey>,
    /// Raw colorings (unpruned) or census extensions (pruned) examined.
    pub explored: u64,
}

impl SearchResult {
    pub fn to_text(&self) -> String {
        let mut out = format!("SEARCH v1 n={} max={} witnesses={}\n", self.n, self.maximum, self.witnesses.len());
        for w in &self.witnesses {
            writeln!(out, "{w}").unwrap();
        }
        out
    }

    /// Parses the text form; `explored` is not stored and reads back as 0.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty search report"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let field = |i: usize, name: &str| -> Result<usize> {
            fields
                .get(i)
                .and_then(|f| f.strip_prefix(name))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::parse(1, format!("expected `SEARCH v1 n=<n> max=<F> witnesses=<m>`, got {header:?}")))
        };
        if fields.len() != 5 || fields[0] != "SEARCH" || fields[1] != "v1" {
            return Err(Error::parse(1, format!("expected `SEARCH v1 ...`, got {header:?}")));
        }
        let n = field(2, "n=")?;
        let maximum = field(3, "max=")? as u64;
        let count = field(4, "witnesses=")?;
        let mut witnesses = Vec::with_capacity(count);
        for (i, line) in lines {
            let key = CanonicalKey::parse(line.trim(), Mode::ColorBlind).map_err(|e| Error::parse(i + 1, e.to_string()))?;
            if key.n() != n {
                return Err(Error::parse(i + 1, format!("witness on {} vertices in a report for n = {n}", key.n())));
            }
            witnesses.push(key);
        }
        if witnesses.len() != count {
            return Err(Error::parse(1, format!("header announces {count} witnesses, found {}", witnesses.len())));
        }
        Ok(SearchResult { n, maximum, witnesses, explored: 0 })
    }

    /// Witnesses that are not a recursive blow-up of RB1111.
    pub fn outside_construction(&self) -> Vec<CanonicalKey> {
        self.witnesses.iter().filter(|k| !matches_construction(&k.graph())).cloned().collect()
    }
}

/// Triangles of `K_n` as triples of edge indices.
fn triangle_edges(n: usize) -> Vec<[usize; 3]> {
    let idx = |i: usize, j: usize| crate::graph::edge_index(n, i, j);
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                out.push([idx(a, b), idx(a, c), idx(b, c)]);
            }
        }
    }
    out
}

/// Maximum number of rainbow triangles over all 3-edge-colorings of `K_n`
/// and every coloring attaining it. Without pruning all colorings with the
/// first edge in color 0 are scanned (`n ≤ 6`); with pruning every
/// color-blind class on `n − 1` vertices is extended by one vertex in all
/// ways (`n ≤ 7`).
pub fn max_rainbow_exhaustive(n: usize, prune: bool) -> Result<SearchResult> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if prune {
        if n > MAX_PRUNED_N {
            return Err(Error::Unsupported(format!("pruned search supports n ≤ {MAX_PRUNED_N}, got {n}")));
        }
        if n >= 2 {
            return search_by_extension(n);
        }
    }
    if n > MAX_UNPRUNED_N {
        return Err(Error::Unsupported(format!("unpruned search supports n ≤ {MAX_UNPRUNED_N}, got {n}")));
    }
    search_all_colorings(n)
}

fn decode(mut code: u64, m: usize, out: &mut [Color]) {
    // the first edge stays 0; the rest are base-3 digits of `code`
    for e in (1..m).rev() {
        out[e] = (code % 3) as Color;
        code /= 3;
    }
}

fn search_all_colorings(n: usize) -> Result<SearchResult> {
    let m = edge_count(n);
    if m == 0 {
        let key = canonical_form(&ColoredGraph::monochromatic(n, 0), Mode::ColorBlind)?;
        return Ok(SearchResult { n, maximum: 0, witnesses: vec![key], explored: 1 });
    }
    let tri = triangle_edges(n);
    let total = 3u64.pow(m as u32 - 1);
    let chunks: u64 = 3u64.pow(((m as u32) - 1).min(6));
    let per = total / chunks;
    let (maximum, codes) = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut colors = vec![0 as Color; m];
            let mut best = 0u64;
            let mut at_best = Vec::new();
            for code in chunk * per..(chunk + 1) * per {
                decode(code, m, &mut colors);
                let count = tri.iter().filter(|t| is_rainbow(colors[t[0]], colors[t[1]], colors[t[2]])).count() as u64;
                if count > best {
                    best = count;
                    at_best.clear();
                }
                if count == best {
                    at_best.push(code);
                }
            }
            (best, at_best)
        })
        .reduce(|| (0, Vec::new()), merge_best);
    let witnesses: BTreeSet<CanonicalKey> = codes
        .par_iter()
        .map(|&code| {
            let mut colors = vec![0 as Color; m];
            decode(code, m, &mut colors);
            canonical_form(&ColoredGraph::new(n, colors).expect("valid colors"), Mode::ColorBlind)
        })
        .collect::<Result<_>>()?;
    Ok(SearchResult { n, maximum, witnesses: witnesses.into_iter().collect(), explored: total })
}

fn merge_best<T>(a: (u64, Vec<T>), b: (u64, Vec<T>)) -> (u64, Vec<T>) {
    match a.0.cmp(&b.0) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            let mut v = a.1;
            v.extend(b.1);
            (a.0, v)
        }
    }
}

fn search_by_extension(n: usize) -> Result<SearchResult> {
    let base = census(n - 1, Mode::ColorBlind)?;
    let k = n - 1;
    let ways = 3u64.pow(k as u32);
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let (maximum, found) = base
        .members()
        .par_iter()
        .map(|key| {
            let g = key.graph();
            let inside = count_rainbow_triangles(&g);
            let mut new = vec![0 as Color; k];
            let mut best = 0u64;
            let mut at_best = Vec::new();
            for mut code in 0..ways {
                for c in new.iter_mut() {
                    *c = (code % 3) as Color;
                    code /= 3;
                }
                let through = pairs.iter().filter(|&&(i, j)| is_rainbow(new[i], new[j], g.color(i, j))).count() as u64;
                let count = inside + through;
                if count > best {
                    best = count;
                    at_best.clear();
                }
                if count == best {
                    at_best.push(g.extend(&new));
                }
            }
            (best, at_best)
        })
        .reduce(|| (0, Vec::new()), merge_best);
    let witnesses: BTreeSet<CanonicalKey> =
        found.par_iter().map(|g| canonical_form(g, Mode::ColorBlind)).collect::<Result<_>>()?;
    Ok(SearchResult {
        n,
        maximum,
        witnesses: witnesses.into_iter().collect(),
        explored: base.len() as u64 * ways,
    })
}

/// Every partition of `V(g)` into four classes that is colored like a
/// blow-up of an induced RB1111 (one seed vertex per class, all cross edges
/// in the seed's colors), deduplicated, in order of first seed.
pub fn blowup_partitions(g: &ColoredGraph) -> Vec<[Vec<usize>; 4]> {
    let n = g.n();
    let m = g.matrix();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for q in seeds(&m, n) {
        let mut class = vec![0usize; n];
        let ok = (0..n).all(|v| match q.iter().position(|&x| x == v).or_else(|| twin_of(&m, n, &q, v)) {
            Some(i) => {
                class[v] = i;
                true
            }
            None => false,
        });
        if !ok {
            continue;
        }
        let clean = (0..n).all(|u| {
            (u + 1..n).all(|v| class[u] == class[v] || m[u * n + v] == m[q[class[u]] * n + q[class[v]]])
        });
        if !clean {
            continue;
        }
        let mut parts: [Vec<usize>; 4] = Default::default();
        for v in 0..n {
            parts[class[v]].push(v);
        }
        let mut canonical = parts.clone();
        canonical.sort();
        if seen.insert(canonical) {
            out.push(parts);
        }
    }
    out
}

/// A 4-partition with no funky edges: every edge between classes `i` and
/// `j` has the color of edge `{i, j}` of a properly colored `K_4`.
pub fn detect_blowup_partition(g: &ColoredGraph) -> Option<[Vec<usize>; 4]> {
    if g.n() < 4 {
        return None;
    }
    blowup_partitions(g).into_iter().next()
}

/// Edges between different parts whose color differs from the color
/// `pattern` puts between those parts.
pub fn funky_edges(g: &ColoredGraph, parts: &[Vec<usize>], pattern: &ColoredGraph) -> Result<Vec<(usize, usize)>> {
    if pattern.n() != parts.len() {
        return Err(Error::invalid(format!("pattern has {} vertices for {} parts", pattern.n(), parts.len())));
    }
    let mut owner = vec![usize::MAX; g.n()];
    for (i, part) in parts.iter().enumerate() {
        for &v in part {
            if v >= g.n() || owner[v] != usize::MAX {
                return Err(Error::invalid(format!("vertex {v} is out of range or in two parts")));
            }
            owner[v] = i;
        }
    }
    if owner.contains(&usize::MAX) {
        return Err(Error::invalid("parts do not cover every vertex"));
    }
    let mut out = Vec::new();
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            if owner[u] != owner[v] && g.color(u, v) != pattern.color(owner[u], owner[v]) {
                out.push((u, v));
            }
        }
    }
    Ok(out)
}

/// Whether `g` is a recursive blow-up of RB1111: at most three vertices
/// with the most rainbow triangles possible, or a clean blow-up of RB1111
/// whose classes are again of this form.
pub fn matches_construction(g: &ColoredGraph) -> bool {
    match g.n() {
        0..=2 => true,
        3 => count_rainbow_triangles(g) == 1,
        _ => blowup_partitions(g).iter().any(|parts| {
            parts.iter().all(|p| matches_construction(&g.induced_subgraph(p).expect("vertices in range")))
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BalanceReport {
    pub holds: bool,
    /// The ordered pair `(u, v)` maximizing `t(u) − t(v)`.
    pub worst: (usize, usize),
    /// `C(n−1, 2)·(RBT(u) − RBT(v))`, i.e. the difference of the numbers
    /// of rainbow triangles through `u` and through `v`.
    pub difference: i64,
    /// `n − 2`.
    pub allowed: i64,
}

/// Checks `C(n−1,2)·(RBT(u) − RBT(v)) ≤ n − 2` for all ordered pairs, where
/// `RBT(u)` is the rainbow-triangle density at `u`. Since `C(n−1,2)·RBT(u)`
/// is the number of rainbow triangles through `u`, the check is exact
/// integer arithmetic.
pub fn check_vertex_balance(g: &ColoredGraph) -> Result<BalanceReport> {
    let n = g.n();
    if n < 3 {
        return Err(Error::invalid(format!("vertex balance needs at least 3 vertices, got {n}")));
    }
    let mut through = vec![0i64; n];
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if g.is_rainbow_triangle(a, b, c) {
                    through[a] += 1;
                    through[b] += 1;
                    through[c] += 1;
                }
            }
        }
    }
    let hi = (0..n).max_by_key(|&v| (through[v], std::cmp::Reverse(v))).expect("n ≥ 3");
    let lo = (0..n).min_by_key(|&v| (through[v], v)).expect("n ≥ 3");
    let difference = through[hi] - through[lo];
    let allowed = n as i64 - 2;
    Ok(BalanceReport { holds: difference <= allowed, worst: (hi, lo), difference, allowed })
}
