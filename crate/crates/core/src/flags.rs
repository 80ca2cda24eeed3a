//! Types, rooted flags, flag products, the averaging operator and expansion
//! of squares and regularity terms into the unrooted census basis.
//!
//! Flags are compared with color-blind isomorphisms that keep every root in
//! place; the color permutation acts on root and non-root edges alike. A type
//! is therefore a labeled graph up to a global color permutation and is stored
//! with colors relabeled in order of first appearance.
//!
//! Averaging follows the finite definition: `⟦F⟧` puts weight
//! `P[θ is an embedding and (H, θ) ≅ F]` on `H`, with `θ` a uniformly random
//! injection of the type's vertices. Products of two flags pick their
//! non-root vertex sets disjointly, so evaluating `⟦F_a × F_b⟧` on a host is
//! exactly the average over injections and disjoint pairs of extension sets.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::canon::{canonical_form, canonical_rooted, normalize_colors, pack, unpack, Mode};
use crate::census::{census, MAX_CENSUS_LEVEL};
use crate::densities::induced_from_matrix;
use crate::error::{Error, Result};
use crate::graph::{edge_count, for_each_subset, Color, ColoredGraph};
use crate::lincomb::LinearCombination;
use crate::rational::{binomial, parse_rational, rat, Rational};

/// A labeled type `σ`, up to a global color permutation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlagType {
    size: usize,
    colors: Vec<Color>,
}

impl FlagType {
    pub fn new(g: &ColoredGraph) -> Self {
        FlagType { size: g.n(), colors: normalize_colors(g.colors()) }
    }

    pub fn empty() -> Self {
        FlagType { size: 0, colors: Vec::new() }
    }

    pub fn vertex() -> Self {
        FlagType { size: 1, colors: Vec::new() }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Color string of the normalized labeled representative.
    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn graph(&self) -> Option<ColoredGraph> {
        (self.size > 0).then(|| ColoredGraph::new(self.size, self.colors.clone()).expect("valid type"))
    }

    pub fn key(&self) -> String {
        let digits: String = self.colors.iter().map(|&c| char::from(b'0' + c)).collect();
        format!("{}:{digits}", self.size)
    }

    /// Parses `s:colors`; the colors must already be relabeled in order of
    /// first appearance.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let ty = if text == "0:" {
            FlagType::empty()
        } else {
            FlagType::new(&ColoredGraph::decode(text)?)
        };
        if ty.key() != text {
            return Err(Error::UnknownKey(format!("{text} is not a normalized type key (expected {})", ty.key())));
        }
        Ok(ty)
    }

    /// Whether the labeled graph with these colors is this type.
    fn admits(&self, root_colors: &[Color]) -> bool {
        let mut map = [u8::MAX; 3];
        let mut next = 0u8;
        root_colors.len() == self.colors.len()
            && root_colors.iter().zip(&self.colors).all(|(&c, &want)| {
                let slot = &mut map[c as usize];
                if *slot == u8::MAX {
                    *slot = next;
                    next += 1;
                }
                *slot == want
            })
    }
}

impl fmt::Display for FlagType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

impl fmt::Debug for FlagType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FlagType({})", self.key())
    }
}

/// One type per color-blind isomorphism class of `s`-vertex graphs, labeled
/// by the class's canonical representative.
pub fn enumerate_types(s: usize) -> Result<Vec<FlagType>> {
    if s == 0 {
        return Ok(vec![FlagType::empty()]);
    }
    Ok(census(s, Mode::ColorBlind)?.members().iter().map(|k| FlagType::new(&k.graph())).collect())
}

/// Canonical flag: the color-blind minimal color string with the roots at
/// positions `0..s`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlagKey {
    n: u8,
    roots: u8,
    code: u128,
}

impl FlagKey {
    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn root_count(&self) -> usize {
        self.roots as usize
    }

    pub fn graph(&self) -> ColoredGraph {
        ColoredGraph::new(self.n(), unpack(self.code, edge_count(self.n()))).expect("valid flag")
    }

    pub fn flag_type(&self) -> FlagType {
        let g = self.graph();
        let s = self.root_count();
        if s == 0 {
            return FlagType::empty();
        }
        FlagType::new(&g.induced_ordered(&(0..s).collect::<Vec<_>>()))
    }

    pub fn text(&self) -> String {
        let roots: Vec<String> = (0..self.root_count()).map(|r| r.to_string()).collect();
        format!("{}|{}", self.graph().encode(), roots.join(","))
    }

    /// Parses `graph-key|0,1,...`, requiring the canonical form.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (graph, roots) = text
            .split_once('|')
            .ok_or_else(|| Error::UnknownKey(format!("{text}: flag keys look like `<graph>|0,1,...`")))?;
        let g = ColoredGraph::decode(graph)?;
        let roots: Vec<usize> = if roots.is_empty() {
            Vec::new()
        } else {
            roots
                .split(',')
                .map(|r| r.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::UnknownKey(format!("{text}: bad root list")))?
        };
        if roots.iter().enumerate().any(|(i, &r)| i != r) || roots.len() > g.n() {
            return Err(Error::UnknownKey(format!("{text}: roots must be 0,1,...,s-1")));
        }
        let key = canonical_flag(&g, &roots)?;
        if key.graph() != g {
            return Err(Error::UnknownKey(format!("{text} is not canonical (canonical form is {key})")));
        }
        Ok(key)
    }
}

impl fmt::Display for FlagKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

impl fmt::Debug for FlagKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FlagKey({})", self.text())
    }
}

/// Canonical key of the flag `(g, roots)`.
pub fn canonical_flag(g: &ColoredGraph, roots: &[usize]) -> Result<FlagKey> {
    let n = g.n();
    if n > MAX_CENSUS_LEVEL {
        return Err(Error::Unsupported(format!("flags support at most {MAX_CENSUS_LEVEL} vertices, got {n}")));
    }
    let mut seen = vec![false; n];
    for &r in roots {
        if r >= n || std::mem::replace(&mut seen[r], true) {
            return Err(Error::invalid("roots must be distinct vertices of the flag"));
        }
    }
    let (colors, _) = canonical_rooted(g, roots, Mode::ColorBlind);
    Ok(FlagKey { n: n as u8, roots: roots.len() as u8, code: pack(&colors) })
}

/// The canonical flags of one type and size, sorted by key.
pub struct FlagBasis {
    ty: FlagType,
    level: usize,
    flags: Vec<FlagKey>,
    index: HashMap<FlagKey, usize>,
}

impl FlagBasis {
    pub fn flag_type(&self) -> &FlagType {
        &self.ty
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn flags(&self) -> &[FlagKey] {
        &self.flags
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn id_of(&self, key: &FlagKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn id_of_text(&self, text: &str) -> Result<usize> {
        let key = FlagKey::parse(text)?;
        self.id_of(&key).ok_or_else(|| {
            Error::UnknownKey(format!("{text} is not a flag of type {} on {} vertices", self.ty, self.level))
        })
    }
}

/// Calls `f` on every injective sequence of `s` vertices out of `n`.
fn for_each_injection(n: usize, s: usize, f: &mut impl FnMut(&[usize])) {
    fn go(n: usize, s: usize, cur: &mut Vec<usize>, used: &mut [bool], f: &mut impl FnMut(&[usize])) {
        if cur.len() == s {
            f(cur);
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                go(n, s, cur, used, f);
                cur.pop();
                used[v] = false;
            }
        }
    }
    go(n, s, &mut Vec::with_capacity(s), &mut vec![false; n], f);
}

fn falling_factorial(n: usize, s: usize) -> u64 {
    (0..s).map(|i| (n - i) as u64).product()
}

fn root_colors(m: &[Color], n: usize, theta: &[usize]) -> Vec<Color> {
    let mut out = Vec::with_capacity(edge_count(theta.len()));
    for a in 0..theta.len() {
        for b in a + 1..theta.len() {
            out.push(m[theta[a] * n + theta[b]]);
        }
    }
    out
}

/// Memoized classification of labeled induced flags by their raw colors.
struct Classifier<'a> {
    s: usize,
    basis: Option<&'a FlagBasis>,
    cache: HashMap<(usize, u128), FlagKey>,
}

impl<'a> Classifier<'a> {
    fn new(s: usize, basis: Option<&'a FlagBasis>) -> Self {
        Classifier { s, basis, cache: HashMap::new() }
    }

    /// Flag induced on `order` (roots first) of the host matrix.
    fn key(&mut self, m: &[Color], n: usize, order: &[usize]) -> FlagKey {
        let g = induced_from_matrix(m, n, order);
        let raw = (order.len(), pack(g.colors()));
        let s = self.s;
        *self.cache.entry(raw).or_insert_with(|| {
            canonical_flag(&g, &(0..s).collect::<Vec<_>>()).expect("flag size within bound")
        })
    }

    fn id(&mut self, m: &[Color], n: usize, order: &[usize]) -> usize {
        let key = self.key(m, n, order);
        self.basis.and_then(|b| b.id_of(&key)).expect("basis is complete")
    }
}

fn basis_memo() -> &'static Mutex<HashMap<(FlagType, usize), Arc<FlagBasis>>> {
    static MEMO: OnceLock<Mutex<HashMap<(FlagType, usize), Arc<FlagBasis>>>> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

/// `F_ℓ^σ`, memoized per process.
pub fn flag_basis(ty: &FlagType, level: usize) -> Result<Arc<FlagBasis>> {
    if level < ty.size() {
        return Err(Error::invalid(format!("flags of type {ty} need at least {} vertices", ty.size())));
    }
    if level > MAX_CENSUS_LEVEL || level == 0 {
        return Err(Error::Unsupported(format!("flag level must be in 1..={MAX_CENSUS_LEVEL}, got {level}")));
    }
    if let Some(b) = basis_memo().lock().unwrap().get(&(ty.clone(), level)) {
        return Ok(b.clone());
    }
    let s = ty.size();
    let c = census(level, Mode::ColorBlind)?;
    let found: Vec<Vec<FlagKey>> = c
        .members()
        .par_iter()
        .map(|k| {
            let g = k.graph();
            let m = g.matrix();
            let mut cls = Classifier::new(s, None);
            let mut keys = Vec::new();
            for_each_injection(level, s, &mut |theta| {
                if ty.admits(&root_colors(&m, level, theta)) {
                    let order: Vec<usize> = theta.iter().copied().chain((0..level).filter(|v| !theta.contains(v))).collect();
                    keys.push(cls.key(&m, level, &order));
                }
            });
            keys
        })
        .collect();
    let mut flags: Vec<FlagKey> = found.into_iter().flatten().collect();
    flags.sort_unstable();
    flags.dedup();
    let index = flags.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let basis = Arc::new(FlagBasis { ty: ty.clone(), level, flags, index });
    Ok(basis_memo().lock().unwrap().entry((ty.clone(), level)).or_insert(basis).clone())
}

pub fn enumerate_flags(ty: &FlagType, level: usize) -> Result<Vec<FlagKey>> {
    Ok(flag_basis(ty, level)?.flags().to_vec())
}

/// `p(H1, H2; H)`: probability that a random `v(H1)`-subset of `V(H)` and
/// its complement induce copies of `H1` and `H2`.
pub fn pair_density(h1: &ColoredGraph, h2: &ColoredGraph, h: &ColoredGraph, mode: Mode) -> Result<Rational> {
    if h1.n() + h2.n() != h.n() {
        return Err(Error::invalid(format!(
            "pair density needs v(h1) + v(h2) = v(h), got {} + {} != {}",
            h1.n(),
            h2.n(),
            h.n()
        )));
    }
    let k1 = canonical_form(h1, mode)?;
    let k2 = canonical_form(h2, mode)?;
    let n = h.n();
    let mut hits = 0u64;
    for_each_subset(n, h1.n(), |s| {
        let rest: Vec<usize> = (0..n).filter(|v| !s.contains(v)).collect();
        if canonical_form(&h.induced_ordered(s), mode).unwrap() == k1
            && canonical_form(&h.induced_ordered(&rest), mode).unwrap() == k2
        {
            hits += 1;
        }
    });
    Ok(Rational::new(hits.into(), binomial(n, h1.n())))
}

/// A linear combination of flags of one type and size.
#[derive(Clone)]
pub struct FlagCombination {
    basis: Arc<FlagBasis>,
    coeffs: BTreeMap<usize, Rational>,
}

impl FlagCombination {
    pub fn zero(ty: &FlagType, level: usize) -> Result<Self> {
        Ok(FlagCombination { basis: flag_basis(ty, level)?, coeffs: BTreeMap::new() })
    }

    /// Single flag with coefficient 1.
    pub fn single(key: &FlagKey) -> Result<Self> {
        let mut c = Self::zero(&key.flag_type(), key.n())?;
        c.add(key, Rational::one())?;
        Ok(c)
    }

    /// `Σ_{F ∈ F_ℓ^σ} F`, the unit of the rooted algebra at level `ℓ`.
    pub fn unit(ty: &FlagType, level: usize) -> Result<Self> {
        let mut c = Self::zero(ty, level)?;
        for id in 0..c.basis.len() {
            c.coeffs.insert(id, Rational::one());
        }
        Ok(c)
    }

    pub fn from_terms(ty: &FlagType, level: usize, terms: &[(FlagKey, Rational)]) -> Result<Self> {
        let mut c = Self::zero(ty, level)?;
        for (k, v) in terms {
            c.add(k, v.clone())?;
        }
        Ok(c)
    }

    pub fn flag_type(&self) -> &FlagType {
        &self.basis.ty
    }

    pub fn level(&self) -> usize {
        self.basis.level
    }

    pub fn basis(&self) -> &FlagBasis {
        &self.basis
    }

    pub fn add(&mut self, key: &FlagKey, c: Rational) -> Result<()> {
        let id = self.basis.id_of(key).ok_or_else(|| {
            Error::UnknownKey(format!("{key} is not a flag of type {} on {} vertices", self.basis.ty, self.basis.level))
        })?;
        self.add_id(id, c);
        Ok(())
    }

    fn add_id(&mut self, id: usize, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(id).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&id);
        }
    }

    pub fn get(&self, key: &FlagKey) -> Rational {
        self.basis.id_of(key).and_then(|id| self.coeffs.get(&id).cloned()).unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> Vec<(FlagKey, Rational)> {
        self.coeffs.iter().map(|(&id, c)| (self.basis.flags[id], c.clone())).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scaled(&self, s: &Rational) -> Self {
        let mut out = FlagCombination { basis: self.basis.clone(), coeffs: BTreeMap::new() };
        for (&id, c) in &self.coeffs {
            out.add_id(id, c * s);
        }
        out
    }

    fn dense(&self) -> Vec<Option<Rational>> {
        let mut v = vec![None; self.basis.len()];
        for (&id, c) in &self.coeffs {
            v[id] = Some(c.clone());
        }
        v
    }
}

impl PartialEq for FlagCombination {
    fn eq(&self, other: &Self) -> bool {
        self.flag_type() == other.flag_type() && self.level() == other.level() && self.coeffs == other.coeffs
    }
}

impl Eq for FlagCombination {}

impl fmt::Debug for FlagCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms().iter().map(|(k, c)| (k.text(), c.to_string()))).finish()
    }
}

/// Counts behind `⟦F_a × F_b⟧` for one type and pair of sizes: for every
/// `H ∈ F_ℓ`, the number of (injection, split) pairs realizing each `(a, b)`.
struct ProductTable {
    level: usize,
    denom: BigInt,
    rows: Vec<Vec<(u32, u32, u64)>>,
}

type ProductKey = (FlagType, usize, usize);

fn product_table(ty: &FlagType, k1: usize, k2: usize) -> Result<Arc<ProductTable>> {
    static MEMO: OnceLock<Mutex<HashMap<ProductKey, Arc<ProductTable>>>> = OnceLock::new();
    let memo = MEMO.get_or_init(Default::default);
    let key = (ty.clone(), k1, k2);
    if let Some(t) = memo.lock().unwrap().get(&key) {
        return Ok(t.clone());
    }
    let s = ty.size();
    if k1 < s || k2 < s {
        return Err(Error::invalid(format!("flag sizes {k1}, {k2} below type size {s}")));
    }
    let level = k1 + k2 - s;
    if level > MAX_CENSUS_LEVEL {
        return Err(Error::Unsupported(format!(
            "product of flags on {k1} and {k2} vertices over a {s}-vertex type has level {level} > {MAX_CENSUS_LEVEL}"
        )));
    }
    let b1 = flag_basis(ty, k1)?;
    let b2 = flag_basis(ty, k2)?;
    let c = census(level, Mode::ColorBlind)?;
    let rows: Vec<Vec<(u32, u32, u64)>> = c
        .members()
        .par_iter()
        .map(|k| {
            let g = k.graph();
            let m = g.matrix();
            let mut cls1 = Classifier::new(s, Some(&b1));
            let mut cls2 = Classifier::new(s, Some(&b2));
            let mut counts: BTreeMap<(u32, u32), u64> = BTreeMap::new();
            for_each_injection(level, s, &mut |theta| {
                if !ty.admits(&root_colors(&m, level, theta)) {
                    return;
                }
                let rest: Vec<usize> = (0..level).filter(|v| !theta.contains(v)).collect();
                for_each_subset(rest.len(), k1 - s, |pick| {
                    let mut o1 = theta.to_vec();
                    let mut o2 = theta.to_vec();
                    for (i, &v) in rest.iter().enumerate() {
                        if pick.contains(&i) {
                            o1.push(v);
                        } else {
                            o2.push(v);
                        }
                    }
                    let a = cls1.id(&m, level, &o1) as u32;
                    let b = cls2.id(&m, level, &o2) as u32;
                    *counts.entry((a, b)).or_default() += 1;
                });
            });
            counts.into_iter().map(|((a, b), c)| (a, b, c)).collect()
        })
        .collect();
    let denom = BigInt::from(falling_factorial(level, s)) * binomial(level - s, k1 - s);
    let table = Arc::new(ProductTable { level, denom, rows });
    Ok(memo.lock().unwrap().entry(key).or_insert(table).clone())
}

/// `⟦x × y⟧_σ` in the census basis of level `v(x) + v(y) - v(σ)`.
pub fn expand_product(x: &FlagCombination, y: &FlagCombination) -> Result<LinearCombination> {
    if x.flag_type() != y.flag_type() {
        return Err(Error::invalid(format!("type mismatch: {} vs {}", x.flag_type(), y.flag_type())));
    }
    let table = product_table(x.flag_type(), x.level(), y.level())?;
    let (dx, dy) = (x.dense(), y.dense());
    let coeffs: Vec<Rational> = table
        .rows
        .par_iter()
        .map(|row| {
            let mut acc = Rational::zero();
            for &(a, b, count) in row {
                if let (Some(xa), Some(yb)) = (&dx[a as usize], &dy[b as usize]) {
                    acc += xa * yb * Rational::from_integer(count.into());
                }
            }
            acc / Rational::from_integer(table.denom.clone())
        })
        .collect();
    let mut out = LinearCombination::zero(table.level);
    for (id, c) in coeffs.into_iter().enumerate() {
        out.add_term(id, c);
    }
    Ok(out)
}

/// `⟦(Σ x_F F)²⟧_σ`.
pub fn expand_square(x: &FlagCombination) -> Result<LinearCombination> {
    expand_product(x, x)
}

/// The rooted rainbow triangle over the one-vertex type.
pub fn rooted_rainbow_triangle() -> FlagKey {
    canonical_flag(&ColoredGraph::rainbow_triangle(), &[0]).expect("three vertices")
}

/// `w · ⟦F × (RBT^σ − ¼ Σ_{F' ∈ F_3^σ} F')⟧_σ` for a 4-vertex flag over
/// the one-vertex type.
pub fn expand_regularity(f: &FlagKey, w: &Rational) -> Result<LinearCombination> {
    if f.root_count() != 1 || f.n() != 4 {
        return Err(Error::invalid(format!("regularity terms take a 4-vertex flag with one root, got {f}")));
    }
    if w.is_negative() {
        return Err(Error::invalid(format!("regularity weight must be non-negative, got {w}")));
    }
    let ty = FlagType::vertex();
    let mut y = FlagCombination::unit(&ty, 3)?.scaled(&rat(-1, 4));
    y.add(&rooted_rainbow_triangle(), Rational::one())?;
    let mut out = expand_product(&FlagCombination::single(f)?, &y)?;
    out.scale(w);
    Ok(out)
}

/// Rooted product `f1 × f2` in the flag basis of the combined size: the
/// coefficient of `F` is the fraction of splits of its non-root vertices that
/// induce `f1` and `f2`.
pub fn flag_product(f1: &FlagKey, f2: &FlagKey) -> Result<FlagCombination> {
    let ty = f1.flag_type();
    if f2.flag_type() != ty || f2.root_count() != f1.root_count() {
        return Err(Error::invalid(format!("type mismatch: {f1} vs {f2}")));
    }
    let s = ty.size();
    let level = f1.n() + f2.n() - s;
    if level > MAX_CENSUS_LEVEL {
        return Err(Error::Unsupported(format!("product level {level} exceeds {MAX_CENSUS_LEVEL}")));
    }
    let basis = flag_basis(&ty, level)?;
    let roots: Vec<usize> = (0..s).collect();
    let splits = binomial(level - s, f1.n() - s);
    let mut out = FlagCombination { basis: basis.clone(), coeffs: BTreeMap::new() };
    for (id, key) in basis.flags().iter().enumerate() {
        let g = key.graph();
        let rest: Vec<usize> = (s..level).collect();
        let mut hits = 0u64;
        for_each_subset(rest.len(), f1.n() - s, |pick| {
            let mut o1 = roots.clone();
            let mut o2 = roots.clone();
            for (i, &v) in rest.iter().enumerate() {
                if pick.contains(&i) {
                    o1.push(v);
                } else {
                    o2.push(v);
                }
            }
            if canonical_flag(&g.induced_ordered(&o1), &roots).unwrap() == *f1
                && canonical_flag(&g.induced_ordered(&o2), &roots).unwrap() == *f2
            {
                hits += 1;
            }
        });
        out.add_id(id, Rational::new(hits.into(), splits.clone()));
    }
    Ok(out)
}

/// `⟦c⟧_σ` in the census basis of the same level.
pub fn downward_average(c: &FlagCombination) -> Result<LinearCombination> {
    let ty = c.flag_type();
    let level = c.level();
    let s = ty.size();
    let census = census(level, Mode::ColorBlind)?;
    let basis = c.basis.clone();
    let dense = c.dense();
    let denom = Rational::from_integer(falling_factorial(level, s).into());
    let coeffs: Vec<Rational> = census
        .members()
        .par_iter()
        .map(|k| {
            let g = k.graph();
            let m = g.matrix();
            let mut cls = Classifier::new(s, Some(&basis));
            let mut acc = Rational::zero();
            for_each_injection(level, s, &mut |theta| {
                if ty.admits(&root_colors(&m, level, theta)) {
                    let order: Vec<usize> = theta.iter().copied().chain((0..level).filter(|v| !theta.contains(v))).collect();
                    if let Some(x) = &dense[cls.id(&m, level, &order)] {
                        acc += x;
                    }
                }
            });
            acc / &denom
        })
        .collect();
    let mut out = LinearCombination::zero(level);
    for (id, v) in coeffs.into_iter().enumerate() {
        out.add_term(id, v);
    }
    Ok(out)
}

/// Density of the flag `f` at the labeled root `theta` of a host: the
/// fraction of extension sets `S ⊆ V \ θ` with `(g[θ ∪ S], θ) ≅ f`.
pub fn rooted_flag_density(g: &ColoredGraph, theta: &[usize], f: &FlagKey) -> Result<Rational> {
    let c = FlagCombination::single(f)?;
    rooted_value(g, theta, &c)
}

/// `Σ x_F · F(θ)` at the labeled root `theta`.
pub fn rooted_value(g: &ColoredGraph, theta: &[usize], x: &FlagCombination) -> Result<Rational> {
    let n = g.n();
    let s = x.flag_type().size();
    if theta.len() != s {
        return Err(Error::invalid(format!("root has {} vertices, type has {s}", theta.len())));
    }
    let rest: Vec<usize> = (0..n).filter(|v| !theta.contains(v)).collect();
    let k = x.level() - s;
    if k > rest.len() {
        return Err(Error::invalid("host too small for the flag"));
    }
    let m = g.matrix();
    let mut cls = Classifier::new(s, Some(&x.basis));
    let dense = x.dense();
    let mut acc = Rational::zero();
    for_each_subset(rest.len(), k, |pick| {
        let order: Vec<usize> = theta.iter().copied().chain(pick.iter().map(|&i| rest[i])).collect();
        if let Some(v) = &dense[cls.id(&m, n, &order)] {
            acc += v;
        }
    });
    Ok(acc / Rational::from_integer(binomial(rest.len(), k)))
}

/// Direct value of `⟦x × y⟧_σ` on a host: the average over all injections
/// `θ` (non-embeddings contribute 0) and all disjoint extension sets
/// `S1, S2` of `x(θ, S1) · y(θ, S2)`.
pub fn averaged_product_value(g: &ColoredGraph, x: &FlagCombination, y: &FlagCombination) -> Result<Rational> {
    let ty = x.flag_type();
    if y.flag_type() != ty {
        return Err(Error::invalid("type mismatch"));
    }
    let n = g.n();
    let s = ty.size();
    let (k1, k2) = (x.level() - s, y.level() - s);
    if s + k1 + k2 > n {
        return Err(Error::invalid("host too small for the product"));
    }
    let m = g.matrix();
    let (dx, dy) = (x.dense(), y.dense());
    let mut thetas = Vec::new();
    for_each_injection(n, s, &mut |t| thetas.push(t.to_vec()));
    let total: Rational = thetas
        .par_iter()
        .map(|theta| {
            let mut cx = Classifier::new(s, Some(&x.basis));
            let mut cy = Classifier::new(s, Some(&y.basis));
            let mut acc = Rational::zero();
            if !ty.admits(&root_colors(&m, n, theta)) {
                return acc;
            }
            let rest: Vec<usize> = (0..n).filter(|v| !theta.contains(v)).collect();
            for_each_subset(rest.len(), k1, |p1| {
                let o1: Vec<usize> = theta.iter().copied().chain(p1.iter().map(|&i| rest[i])).collect();
                let Some(xa) = &dx[cx.id(&m, n, &o1)] else { return };
                let rest2: Vec<usize> = rest.iter().enumerate().filter(|(i, _)| !p1.contains(i)).map(|(_, &v)| v).collect();
                for_each_subset(rest2.len(), k2, |p2| {
                    let o2: Vec<usize> = theta.iter().copied().chain(p2.iter().map(|&i| rest2[i])).collect();
                    if let Some(yb) = &dy[cy.id(&m, n, &o2)] {
                        acc += xa * yb;
                    }
                });
            });
            acc
        })
        .sum();
    let count = BigInt::from(falling_factorial(n, s)) * binomial(n - s, k1) * binomial(n - s - k1, k2);
    Ok(total / Rational::from_integer(count))
}

/// Parses `<flag-key> <rational>` lines into a combination of one type/size.
pub(crate) fn parse_flag_term(basis: &FlagBasis, line: &str) -> Result<(FlagKey, Rational)> {
    let mut parts = line.split_whitespace();
    let (Some(key), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(Error::invalid(format!("expected `<flag-key> <p/q>`, got {line:?}")));
    };
    let id = basis.id_of_text(key)?;
    Ok((basis.flags()[id], parse_rational(value)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_type_small_bases() {
        let v = FlagType::vertex();
        assert_eq!(enumerate_flags(&v, 1).unwrap().len(), 1);
        let f3 = enumerate_flags(&v, 3).unwrap();
        let rbt = rooted_rainbow_triangle();
        assert_eq!(f3.iter().filter(|k| **k == rbt).count(), 1);
        // every relabeling and recoloring of the rooted rainbow triangle is the same flag
        let t = ColoredGraph::rainbow_triangle();
        for r in 0..3 {
            assert_eq!(canonical_flag(&t, &[r]).unwrap(), rbt);
        }
    }

    #[test]
    fn type_keys() {
        let ty = FlagType::new(&ColoredGraph::decode("3:221").unwrap());
        assert_eq!(ty.key(), "3:001");
        assert_eq!(FlagType::parse("3:001").unwrap(), ty);
        assert!(FlagType::parse("3:221").is_err());
        assert_eq!(FlagType::parse("0:").unwrap(), FlagType::empty());
        assert_eq!(FlagType::parse("1:").unwrap(), FlagType::vertex());
        assert!(ty.admits(&[1, 1, 2]));
        assert!(!ty.admits(&[1, 2, 2]));
    }

    #[test]
    fn flag_keys_round_trip() {
        let ty = FlagType::parse("2:0").unwrap();
        for k in enumerate_flags(&ty, 4).unwrap() {
            assert_eq!(FlagKey::parse(&k.text()).unwrap(), k);
            assert_eq!(k.flag_type(), ty);
        }
        assert!(FlagKey::parse("3:012|1").is_err());
        assert!(FlagKey::parse("3:120|0").is_err());
        assert!(FlagKey::parse("3:012").is_err());
    }

    #[test]
    fn averaging_rooted_triangles() {
        let rbt = FlagCombination::single(&rooted_rainbow_triangle()).unwrap();
        let avg = downward_average(&rbt).unwrap();
        let c3 = census(3, Mode::ColorBlind).unwrap();
        assert_eq!(avg.get(c3.id_of_text("3:012").unwrap()), rat(1, 1));
        assert_eq!(avg.len(), 1);
        // root on the vertex meeting both 0-colored edges
        let g = ColoredGraph::decode("3:001").unwrap();
        let f = canonical_flag(&g, &[0]).unwrap();
        let avg = downward_average(&FlagCombination::single(&f).unwrap()).unwrap();
        assert_eq!(avg.get(c3.id_of_text("3:001").unwrap()), rat(1, 3));
    }

    #[test]
    fn unit_is_identity_for_products() {
        let ty = FlagType::vertex();
        let unit = enumerate_flags(&ty, 1).unwrap()[0];
        for f in enumerate_flags(&ty, 3).unwrap() {
            let p = flag_product(&f, &unit).unwrap();
            assert_eq!(p.terms(), vec![(f, rat(1, 1))]);
        }
    }

    #[test]
    fn regularity_input_checks() {
        let f = enumerate_flags(&FlagType::vertex(), 4).unwrap()[0];
        assert!(expand_regularity(&f, &rat(0, 1)).unwrap().is_zero());
        assert!(expand_regularity(&f, &rat(-1, 2)).is_err());
        let g = enumerate_flags(&FlagType::vertex(), 3).unwrap()[0];
        assert!(expand_regularity(&g, &rat(1, 1)).is_err());
    }
}
