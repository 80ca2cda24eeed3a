//! Canonical forms and isomorphism of 3-edge-colored complete graphs.
//!
//! The canonical key of a graph is its lexicographically smallest color string
//! over all vertex relabelings (and, in color-blind mode, all six color
//! permutations). Production code uses a refinement search that only explores
//! orderings whose rows are already minimal; [`canonical_form_brute`] is the
//! plain permutation scan it is tested against.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{edge_count, edge_index, Color, ColoredGraph, COLOR_PERMUTATIONS};

/// Largest vertex count accepted by [`canonical_form`].
pub const MAX_CANONICAL_N: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    ColorBlind,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::ColorBlind => "colorblind",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(Mode::Exact),
            "colorblind" | "color-blind" | "blind" => Ok(Mode::ColorBlind),
            _ => Err(Error::invalid(format!("unknown mode {s:?} (expected exact|colorblind)"))),
        }
    }
}

/// Canonical identifier of an isomorphism class: the minimal color string,
/// packed two bits per edge with the first edge most significant, so numeric
/// order equals lexicographic order of the text form for a fixed `n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct CanonicalKey {
    n: u8,
    mode: Mode,
    code: u128,
}

pub(crate) fn pack(colors: &[Color]) -> u128 {
    debug_assert!(colors.len() <= 64);
    colors.iter().fold(0u128, |acc, &c| (acc << 2) | c as u128)
}

pub(crate) fn unpack(code: u128, len: usize) -> Vec<Color> {
    (0..len).map(|k| ((code >> (2 * (len - 1 - k))) & 3) as Color).collect()
}

impl CanonicalKey {
    pub(crate) fn from_canonical_colors(n: usize, mode: Mode, colors: &[Color]) -> Self {
        CanonicalKey { n: n as u8, mode, code: pack(colors) }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn code(&self) -> u128 {
        self.code
    }

    /// The canonical representative graph.
    pub fn graph(&self) -> ColoredGraph {
        let n = self.n();
        ColoredGraph::from_parts_unchecked(n, unpack(self.code, edge_count(n)))
    }

    pub fn text(&self) -> String {
        self.graph().encode()
    }

    /// Parses a key and checks that it already is the canonical string.
    pub fn parse(text: &str, mode: Mode) -> Result<Self> {
        let g = ColoredGraph::decode(text)?;
        let key = canonical_form(&g, mode)?;
        if key.graph() != g {
            return Err(Error::UnknownKey(format!(
                "{} is not a canonical {mode} key (canonical form is {})",
                text.trim(),
                key
            )));
        }
        Ok(key)
    }
}

impl Ord for CanonicalKey {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.n, self.code, self.mode).cmp(&(other.n, other.code, other.mode))
    }
}

impl PartialOrd for CanonicalKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.text(), self.mode)
    }
}

/// Relabels colors in order of first appearance; the lexicographically
/// smallest image of a sequence under the six color permutations.
pub fn normalize_colors(seq: &[Color]) -> Vec<Color> {
    let mut map = [u8::MAX; 3];
    let mut next = 0u8;
    seq.iter()
        .map(|&c| {
            let slot = &mut map[c as usize];
            if *slot == u8::MAX {
                *slot = next;
                next += 1;
            }
            *slot
        })
        .collect()
}

pub fn canonical_form(g: &ColoredGraph, mode: Mode) -> Result<CanonicalKey> {
    if g.n() > MAX_CANONICAL_N {
        return Err(Error::Unsupported(format!(
            "canonical form supports n <= {MAX_CANONICAL_N}, got n = {}",
            g.n()
        )));
    }
    let (colors, _) = canonical_rooted(g, &[], mode);
    Ok(CanonicalKey::from_canonical_colors(g.n(), mode, &colors))
}

pub fn is_isomorphic(g: &ColoredGraph, h: &ColoredGraph, mode: Mode) -> bool {
    if g.n() != h.n() {
        return false;
    }
    if g.n() > MAX_CANONICAL_N {
        return false;
    }
    let (a, _) = canonical_rooted(g, &[], mode);
    let (b, _) = canonical_rooted(h, &[], mode);
    a == b
}

/// Canonical color string of `g` with `roots` pinned, in order, to positions
/// `0..roots.len()`; the remaining vertices are ordered freely. Returns the
/// string and the vertex order realizing it (`order[k]` is the vertex of `g`
/// placed at position `k`).
pub(crate) fn canonical_rooted(g: &ColoredGraph, roots: &[usize], mode: Mode) -> (Vec<Color>, Vec<usize>) {
    match mode {
        Mode::Exact => {
            let m = g.matrix();
            exact_search(&m, g.n(), roots)
        }
        Mode::ColorBlind => {
            let mut best: Option<(Vec<Color>, Vec<usize>)> = None;
            for perm in COLOR_PERMUTATIONS {
                let m: Vec<Color> = g
                    .matrix()
                    .into_iter()
                    .map(|c| if c == u8::MAX { c } else { perm[c as usize] })
                    .collect();
                let cand = exact_search(&m, g.n(), roots);
                if best.as_ref().is_none_or(|b| cand.0 < b.0) {
                    best = Some(cand);
                }
            }
            best.expect("six color permutations")
        }
    }
}

struct Search<'a> {
    m: &'a [Color],
    n: usize,
    cur: Vec<Color>,
    order: Vec<usize>,
    best: Vec<Color>,
    best_order: Vec<usize>,
    epoch: u64,
}

fn exact_search(m: &[Color], n: usize, roots: &[usize]) -> (Vec<Color>, Vec<usize>) {
    let mut cells: Vec<Vec<usize>> = roots.iter().map(|&r| vec![r]).collect();
    let rest: Vec<usize> = (0..n).filter(|v| !roots.contains(v)).collect();
    if !rest.is_empty() {
        cells.push(rest);
    }
    let mut s = Search {
        m,
        n,
        cur: Vec::with_capacity(edge_count(n)),
        order: Vec::with_capacity(n),
        best: Vec::new(),
        best_order: Vec::new(),
        epoch: 0,
    };
    s.dfs(&cells, true);
    (s.best, s.best_order)
}

impl Search<'_> {
    /// `improving`: the current prefix is already smaller than the best string.
    fn dfs(&mut self, cells: &[Vec<usize>], mut improving: bool) {
        if cells.is_empty() {
            if improving || self.best.is_empty() || self.cur < self.best {
                self.best.clone_from(&self.cur);
                self.best_order.clone_from(&self.order);
                self.epoch += 1;
            }
            return;
        }
        let n = self.n;
        for idx in 0..cells[0].len() {
            let v = cells[0][idx];
            let row_start = self.cur.len();
            let mut next: Vec<Vec<usize>> = Vec::with_capacity(cells.len() + 2);
            for (ci, cell) in cells.iter().enumerate() {
                let mut split: [Vec<usize>; 3] = Default::default();
                for &u in cell {
                    if ci == 0 && u == v {
                        continue;
                    }
                    split[self.m[v * n + u] as usize].push(u);
                }
                for (c, part) in split.into_iter().enumerate() {
                    if !part.is_empty() {
                        self.cur.extend(std::iter::repeat_n(c as Color, part.len()));
                        next.push(part);
                    }
                }
            }
            let child_improving = if improving || self.best.is_empty() {
                true
            } else {
                let end = self.cur.len();
                match self.cur[row_start..end].cmp(&self.best[row_start..end]) {
                    Ordering::Greater => {
                        self.cur.truncate(row_start);
                        continue;
                    }
                    Ordering::Less => true,
                    Ordering::Equal => false,
                }
            };
            let epoch = self.epoch;
            self.order.push(v);
            self.dfs(&next, child_improving);
            self.order.pop();
            self.cur.truncate(row_start);
            if self.epoch != epoch {
                // the new best extends the current prefix
                improving = false;
            }
        }
    }
}

/// Reference canonical form by scanning every vertex permutation (and every
/// color permutation in color-blind mode). Exponential; intended for `n <= 8`.
pub fn canonical_form_brute(g: &ColoredGraph, mode: Mode) -> Result<CanonicalKey> {
    if g.n() > 8 {
        return Err(Error::Unsupported(format!("brute-force canonical form supports n <= 8, got {}", g.n())));
    }
    let colors = brute_rooted(g, &[], mode);
    Ok(CanonicalKey::from_canonical_colors(g.n(), mode, &colors))
}

/// Brute-force counterpart of [`canonical_rooted`] (string only).
pub(crate) fn brute_rooted(g: &ColoredGraph, roots: &[usize], mode: Mode) -> Vec<Color> {
    let n = g.n();
    let rest: Vec<usize> = (0..n).filter(|v| !roots.contains(v)).collect();
    let mut best: Option<Vec<Color>> = None;
    for_each_permutation(&rest, |perm| {
        let order: Vec<usize> = roots.iter().copied().chain(perm.iter().copied()).collect();
        let mut seq = Vec::with_capacity(edge_count(n));
        for i in 0..n {
            for j in i + 1..n {
                seq.push(g.colors()[edge_index(n, order[i], order[j])]);
            }
        }
        if mode == Mode::ColorBlind {
            seq = normalize_colors(&seq);
        }
        if best.as_ref().is_none_or(|b| seq < *b) {
            best = Some(seq);
        }
    });
    best.unwrap_or_default()
}

/// Calls `f` on every permutation of `items` (Heap's algorithm).
pub fn for_each_permutation<T: Clone>(items: &[T], mut f: impl FnMut(&[T])) {
    let mut a = items.to_vec();
    let k = a.len();
    let mut c = vec![0usize; k];
    f(&a);
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_graph(rng: &mut StdRng, n: usize) -> ColoredGraph {
        ColoredGraph::from_fn(n, |_, _| rng.gen_range(0..3))
    }

    fn random_relabel(rng: &mut StdRng, g: &ColoredGraph) -> ColoredGraph {
        let mut order: Vec<usize> = (0..g.n()).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        g.relabel(&order).unwrap()
    }

    #[test]
    fn relabeling_rb1111_keeps_key() {
        let g = ColoredGraph::rb1111();
        let key = canonical_form(&g, Mode::Exact).unwrap();
        for_each_permutation(&[0usize, 1, 2, 3], |p| {
            let h = g.relabel(p).unwrap();
            assert_eq!(canonical_form(&h, Mode::Exact).unwrap(), key);
        });
        let cycled = g.permute_colors([1, 2, 0]);
        assert_eq!(
            canonical_form(&cycled, Mode::ColorBlind).unwrap(),
            canonical_form(&g, Mode::ColorBlind).unwrap()
        );
    }

    #[test]
    fn monochromatic_triangles_by_mode() {
        let a = ColoredGraph::monochromatic(3, 0);
        let b = ColoredGraph::monochromatic(3, 1);
        assert!(is_isomorphic(&a, &b, Mode::ColorBlind));
        assert!(!is_isomorphic(&a, &b, Mode::Exact));
        assert_eq!(canonical_form(&b, Mode::ColorBlind).unwrap().text(), "3:000");
        assert_eq!(canonical_form(&b, Mode::Exact).unwrap().text(), "3:111");
    }

    #[test]
    fn rainbow_versus_two_colored() {
        let r = ColoredGraph::rainbow_triangle();
        let t = ColoredGraph::decode("3:001").unwrap();
        for mode in [Mode::Exact, Mode::ColorBlind] {
            assert!(!is_isomorphic(&r, &t, mode));
        }
        assert!(!is_isomorphic(&r, &ColoredGraph::rb1111(), Mode::Exact));
    }

    #[test]
    fn search_agrees_with_brute_force() {
        let mut rng = StdRng::seed_from_u64(7);
        for n in 1..=7 {
            for _ in 0..60 {
                let g = random_graph(&mut rng, n);
                for mode in [Mode::Exact, Mode::ColorBlind] {
                    assert_eq!(canonical_form(&g, mode).unwrap(), canonical_form_brute(&g, mode).unwrap(), "{g} {mode}");
                }
            }
        }
        // highly symmetric inputs
        for n in 1..=7 {
            let g = ColoredGraph::monochromatic(n, 2);
            assert_eq!(canonical_form(&g, Mode::Exact).unwrap(), canonical_form_brute(&g, Mode::Exact).unwrap());
        }
    }

    #[test]
    fn search_agrees_with_brute_force_exhaustively_at_four() {
        for code in 0..729u32 {
            let mut x = code;
            let g = ColoredGraph::from_fn(4, |_, _| {
                let c = (x % 3) as u8;
                x /= 3;
                c
            });
            for mode in [Mode::Exact, Mode::ColorBlind] {
                assert_eq!(canonical_form(&g, mode).unwrap(), canonical_form_brute(&g, mode).unwrap());
            }
        }
    }

    #[test]
    fn rooted_search_agrees_with_brute_force() {
        let mut rng = StdRng::seed_from_u64(11);
        for n in 2..=6 {
            for s in 0..=n.min(4) {
                for _ in 0..20 {
                    let g = random_graph(&mut rng, n);
                    let mut roots: Vec<usize> = (0..n).collect();
                    for i in (1..n).rev() {
                        roots.swap(i, rng.gen_range(0..=i));
                    }
                    roots.truncate(s);
                    for mode in [Mode::Exact, Mode::ColorBlind] {
                        let (colors, order) = canonical_rooted(&g, &roots, mode);
                        assert_eq!(colors, brute_rooted(&g, &roots, mode));
                        assert_eq!(&order[..s], &roots[..]);
                    }
                }
            }
        }
    }

    #[test]
    fn color_swapped_random_graph() {
        let mut rng = StdRng::seed_from_u64(3);
        let g = random_graph(&mut rng, 5);
        let h = random_relabel(&mut rng, &g.permute_colors([2, 0, 1]));
        assert!(is_isomorphic(&g, &h, Mode::ColorBlind));
        // The exact answer agrees with a direct permutation scan.
        let mut direct = false;
        for_each_permutation(&(0..5).collect::<Vec<_>>(), |p| {
            if h.relabel(p).unwrap() == g {
                direct = true;
            }
        });
        assert_eq!(is_isomorphic(&g, &h, Mode::Exact), direct);
    }

    #[test]
    fn key_round_trip_and_validation() {
        let g = ColoredGraph::decode("5:0120120120").unwrap();
        let key = canonical_form(&g, Mode::ColorBlind).unwrap();
        assert_eq!(CanonicalKey::parse(&key.text(), Mode::ColorBlind).unwrap(), key);
        assert!(CanonicalKey::parse("3:111", Mode::ColorBlind).is_err());
        assert!(matches!(
            canonical_form(&ColoredGraph::monochromatic(11, 0), Mode::Exact),
            Err(Error::Unsupported(_))
        ));
        assert_eq!(canonical_form(&ColoredGraph::monochromatic(10, 1), Mode::ColorBlind).unwrap().text().len(), 48);
    }

    #[test]
    fn normalization_is_min_over_color_permutations() {
        let seq = [2u8, 2, 0, 1, 0];
        let best = COLOR_PERMUTATIONS
            .iter()
            .map(|p| seq.iter().map(|&c| p[c as usize]).collect::<Vec<_>>())
            .min()
            .unwrap();
        assert_eq!(normalize_colors(&seq), best);
    }
}
