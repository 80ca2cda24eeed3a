//! 3-edge-colored complete graphs.
//!
//! Colors are `0`, `1`, `2` (red, green, blue). Edges are stored row-major in
//! upper-triangular order: edge `{i, j}` with `i < j` lives at
//! `i*n - i*(i+1)/2 + j - i - 1`. The text form is `n:c1c2...`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub type Color = u8;

pub const NUM_COLORS: u8 = 3;

/// A 3-edge-coloring of `K_n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColoredGraph {
    n: usize,
    colors: Vec<Color>,
}

#[inline]
pub fn edge_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

#[inline]
pub fn edge_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    debug_assert!(j < n && i != j);
    i * n - i * (i + 1) / 2 + j - i - 1
}

#[inline]
pub fn is_rainbow(a: Color, b: Color, c: Color) -> bool {
    a != b && b != c && a != c
}

impl ColoredGraph {
    pub fn new(n: usize, colors: Vec<Color>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("a colored graph needs at least one vertex"));
        }
        if colors.len() != edge_count(n) {
            return Err(Error::invalid(format!(
                "expected {} colors for n = {n}, got {}",
                edge_count(n),
                colors.len()
            )));
        }
        if let Some(c) = colors.iter().find(|&&c| c >= NUM_COLORS) {
            return Err(Error::invalid(format!("color {c} outside 0..=2")));
        }
        Ok(ColoredGraph { n, colors })
    }

    pub(crate) fn from_parts_unchecked(n: usize, colors: Vec<Color>) -> Self {
        debug_assert_eq!(colors.len(), edge_count(n));
        ColoredGraph { n, colors }
    }

    pub fn monochromatic(n: usize, color: Color) -> Self {
        assert!(n >= 1 && color < NUM_COLORS);
        ColoredGraph { n, colors: vec![color; edge_count(n)] }
    }

    /// Builds a graph from a color function evaluated on every pair `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Color) -> Self {
        let mut colors = Vec::with_capacity(edge_count(n));
        for i in 0..n {
            for j in i + 1..n {
                let c = f(i, j);
                assert!(c < NUM_COLORS, "color {c} outside 0..=2");
                colors.push(c);
            }
        }
        ColoredGraph { n, colors }
    }

    /// The properly 3-edge-colored `K_4` (every triangle rainbow).
    pub fn rb1111() -> Self {
        ColoredGraph { n: 4, colors: vec![0, 1, 2, 2, 1, 0] }
    }

    pub fn rainbow_triangle() -> Self {
        ColoredGraph { n: 3, colors: vec![0, 1, 2] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    #[inline]
    pub fn color(&self, i: usize, j: usize) -> Color {
        self.colors[edge_index(self.n, i, j)]
    }

    pub fn set_color(&mut self, i: usize, j: usize, c: Color) {
        assert!(c < NUM_COLORS);
        let idx = edge_index(self.n, i, j);
        self.colors[idx] = c;
    }

    /// Dense symmetric `n x n` color matrix; the diagonal holds `u8::MAX`.
    pub fn matrix(&self) -> Vec<Color> {
        let n = self.n;
        let mut m = vec![u8::MAX; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                m[i * n + j] = self.colors[k];
                m[j * n + i] = self.colors[k];
                k += 1;
            }
        }
        m
    }

    pub fn encode(&self) -> String {
        let mut s = String::with_capacity(self.colors.len() + 4);
        s.push_str(&self.n.to_string());
        s.push(':');
        s.extend(self.colors.iter().map(|&c| char::from(b'0' + c)));
        s
    }

    pub fn decode(text: &str) -> Result<Self> {
        let malformed = |reason: &str| Error::MalformedGraph {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let (n, body) = text.trim().split_once(':').ok_or_else(|| malformed("missing ':'"))?;
        if n.is_empty() || !n.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed("vertex count is not a number"));
        }
        let n: usize = n.parse().map_err(|_| malformed("vertex count is not a number"))?;
        if n == 0 {
            return Err(malformed("vertex count must be positive"));
        }
        if body.len() != edge_count(n) {
            return Err(malformed(&format!(
                "expected {} color digits, found {}",
                edge_count(n),
                body.len()
            )));
        }
        let mut colors = Vec::with_capacity(body.len());
        for b in body.bytes() {
            match b {
                b'0'..=b'2' => colors.push(b - b'0'),
                _ => return Err(malformed(&format!("color digit {:?} outside 0..=2", b as char))),
            }
        }
        Ok(ColoredGraph { n, colors })
    }

    /// `G[U]`, with vertices renumbered in ascending order of `U`.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::invalid("induced subgraph of an empty vertex set"));
        }
        let mut u = vertices.to_vec();
        u.sort_unstable();
        u.dedup();
        if let Some(&v) = u.iter().find(|&&v| v >= self.n) {
            return Err(Error::invalid(format!("vertex {v} out of range for n = {}", self.n)));
        }
        Ok(self.induced_ordered(&u))
    }

    /// Induced subgraph with vertex `k` of the result being `order[k]`; no checks.
    pub fn induced_ordered(&self, order: &[usize]) -> Self {
        let k = order.len();
        let mut colors = Vec::with_capacity(edge_count(k));
        for a in 0..k {
            for b in a + 1..k {
                colors.push(self.color(order[a], order[b]));
            }
        }
        ColoredGraph { n: k, colors }
    }

    /// Applies a color permutation: every color `c` becomes `perm[c]`.
    pub fn permute_colors(&self, perm: [Color; 3]) -> Self {
        ColoredGraph { n: self.n, colors: self.colors.iter().map(|&c| perm[c as usize]).collect() }
    }

    /// Graph with vertex `i` playing the role of `order[i]` of `self`.
    pub fn relabel(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n];
        if order.len() != self.n {
            return Err(Error::invalid("relabeling must be a permutation"));
        }
        for &v in order {
            if v >= self.n || seen[v] {
                return Err(Error::invalid("relabeling must be a permutation"));
            }
            seen[v] = true;
        }
        Ok(self.induced_ordered(order))
    }

    /// Adds a vertex joined to the existing vertices with the given colors.
    pub fn extend(&self, new_edges: &[Color]) -> Self {
        assert_eq!(new_edges.len(), self.n);
        let n = self.n + 1;
        Self::from_fn(n, |i, j| if j == n - 1 { new_edges[i] } else { self.color(i, j) })
    }

    pub fn is_rainbow_triangle(&self, a: usize, b: usize, c: usize) -> bool {
        is_rainbow(self.color(a, b), self.color(a, c), self.color(b, c))
    }

    /// Whether `{a, b, c, d}` induces a properly 3-edge-colored `K_4`.
    pub fn is_rb1111(&self, q: [usize; 4]) -> bool {
        let [a, b, c, d] = q;
        let ab = self.color(a, b);
        let ac = self.color(a, c);
        let ad = self.color(a, d);
        is_rainbow(ab, ac, ad)
            && self.color(c, d) == ab
            && self.color(b, d) == ac
            && self.color(b, c) == ad
    }
}

/// Proper 3-edge-coloring test on a dense matrix, used by the hot loops.
#[inline]
pub(crate) fn matrix_is_rb1111(m: &[Color], n: usize, a: usize, b: usize, c: usize, d: usize) -> bool {
    let ab = m[a * n + b];
    let ac = m[a * n + c];
    let ad = m[a * n + d];
    ab != ac && ab != ad && ac != ad && m[c * n + d] == ab && m[b * n + d] == ac && m[b * n + c] == ad
}

impl fmt::Display for ColoredGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

impl fmt::Debug for ColoredGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ColoredGraph({})", self.encode())
    }
}

impl FromStr for ColoredGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::decode(s)
    }
}

/// The six permutations of the three colors.
pub const COLOR_PERMUTATIONS: [[Color; 3]; 6] =
    [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Iterates over all `k`-subsets of `0..n` in lexicographic order.
pub fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_examples() {
        assert_eq!(ColoredGraph::monochromatic(3, 0).encode(), "3:000");
        let g = ColoredGraph::decode("2:2").unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.color(0, 1), 2);
        assert_eq!(ColoredGraph::decode("1:").unwrap().n(), 1);
    }

    #[test]
    fn rb1111_representative_has_only_rainbow_triangles() {
        let g = ColoredGraph::decode("4:012210").unwrap();
        assert_eq!(g, ColoredGraph::rb1111());
        let mut rainbow = 0;
        for_each_subset(4, 3, |t| {
            if g.is_rainbow_triangle(t[0], t[1], t[2]) {
                rainbow += 1;
            }
        });
        assert_eq!(rainbow, 4);
        assert!(g.is_rb1111([0, 1, 2, 3]));
        // The string 4:012120 is not a proper coloring: triangle {0,1,2} reads 0,1,1.
        let h = ColoredGraph::decode("4:012120").unwrap();
        assert!(!h.is_rainbow_triangle(0, 1, 2));
        assert!(!h.is_rb1111([0, 1, 2, 3]));
    }

    #[test]
    fn decode_errors() {
        assert!(ColoredGraph::decode("3:00").is_err());
        assert!(ColoredGraph::decode("3:003").is_err());
        assert!(ColoredGraph::decode("x:0").is_err());
        assert!(ColoredGraph::decode("0:").is_err());
        assert!(ColoredGraph::decode("2").is_err());
        assert!(ColoredGraph::decode("-2:0").is_err());
    }

    #[test]
    fn edge_index_is_row_major() {
        let n = 5;
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                assert_eq!(edge_index(n, i, j), k);
                assert_eq!(edge_index(n, j, i), k);
                k += 1;
            }
        }
    }

    #[test]
    fn induced_subgraphs() {
        let g = ColoredGraph::rb1111();
        assert_eq!(g.induced_subgraph(&[0, 1, 2, 3]).unwrap(), g);
        for_each_subset(4, 3, |t| {
            let h = g.induced_subgraph(t).unwrap();
            assert!(h.is_rainbow_triangle(0, 1, 2));
        });
        assert_eq!(g.induced_subgraph(&[2]).unwrap().n(), 1);
        assert!(g.induced_subgraph(&[]).is_err());
        assert!(g.induced_subgraph(&[0, 7]).is_err());
        // order of U does not matter
        assert_eq!(g.induced_subgraph(&[3, 1]).unwrap(), g.induced_subgraph(&[1, 3]).unwrap());
    }

    #[test]
    fn subsets_enumeration() {
        let mut count = 0;
        for_each_subset(6, 3, |_| count += 1);
        assert_eq!(count, 20);
        let mut all = Vec::new();
        for_each_subset(3, 0, |s| all.push(s.to_vec()));
        assert_eq!(all, vec![Vec::<usize>::new()]);
        let mut none = 0;
        for_each_subset(2, 3, |_| none += 1);
        assert_eq!(none, 0);
    }
}
