//! Exact linear combinations of color-blind isomorphism classes at a fixed
//! level, with evaluation on host graphs and lifting to higher levels.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::canon::Mode;
use crate::census::{census, Census, MAX_CENSUS_LEVEL};
use crate::densities::{density_profile, induced_from_matrix, Expression};
use crate::error::{Error, Result};
use crate::graph::{for_each_subset, ColoredGraph};
use crate::rational::{binomial, fmt_rational, parse_rational, Rational};

/// `Σ c_H · H` over the color-blind census of one level, keyed by census ID.
/// Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCombination {
    level: usize,
    coeffs: BTreeMap<usize, Rational>,
}

impl LinearCombination {
    pub fn zero(level: usize) -> Self {
        LinearCombination { level, coeffs: BTreeMap::new() }
    }

    /// `Σ_{H ∈ F_ℓ} H`, which evaluates to 1 on every host.
    pub fn all_ones(level: usize) -> Result<Self> {
        let c = census(level, Mode::ColorBlind)?;
        let mut out = Self::zero(level);
        for id in 0..c.len() {
            out.add_term(id, Rational::one());
        }
        Ok(out)
    }

    /// Indicator combination of the classes an expression recognizes.
    pub fn from_expression(e: Expression) -> Result<Self> {
        let c = census(e.arity(), Mode::ColorBlind)?;
        let mut out = Self::zero(e.arity());
        for (id, k) in c.members().iter().enumerate() {
            if e.recognizes(&k.graph()) {
                out.add_term(id, Rational::one());
            }
        }
        Ok(out)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn get(&self, id: usize) -> Rational {
        self.coeffs.get(&id).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.coeffs.iter().map(|(&id, c)| (id, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, id: usize, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(id).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&id);
        }
    }

    pub fn scale(&mut self, s: &Rational) {
        if s.is_zero() {
            self.coeffs.clear();
            return;
        }
        for c in self.coeffs.values_mut() {
            *c *= s;
        }
    }

    pub fn scaled(&self, s: &Rational) -> Self {
        let mut out = self.clone();
        out.scale(s);
        out
    }

    /// `self += s · other`; both must live on the same level.
    pub fn add_scaled(&mut self, other: &LinearCombination, s: &Rational) -> Result<()> {
        if other.level != self.level {
            return Err(Error::invalid(format!(
                "cannot add a level-{} combination to a level-{} one",
                other.level, self.level
            )));
        }
        for (&id, c) in &other.coeffs {
            self.add_term(id, c * s);
        }
        Ok(())
    }

    /// `Σ c_H · p(H, g)`.
    pub fn evaluate(&self, g: &ColoredGraph) -> Result<Rational> {
        let p = density_profile(g, self.level, Mode::ColorBlind)?;
        let mut acc = Rational::zero();
        for (&id, c) in &self.coeffs {
            if p.counts[id] != 0 {
                acc += c * Rational::from_integer(BigInt::from(p.counts[id]));
            }
        }
        Ok(acc / Rational::from_integer(BigInt::from(p.total)))
    }

    /// Rewrites the combination over `F_target` using
    /// `H = Σ_{H'} p(H, H') · H'`, which leaves every evaluation unchanged.
    pub fn lift(&self, target: usize) -> Result<LinearCombination> {
        if target < self.level || target > MAX_CENSUS_LEVEL {
            return Err(Error::invalid(format!("cannot lift level {} to level {target}", self.level)));
        }
        if target == self.level {
            return Ok(self.clone());
        }
        let table = subgraph_table(self.level, target)?;
        let denom = Rational::from_integer(binomial(target, self.level));
        let mut out = LinearCombination::zero(target);
        for (big, row) in table.iter().enumerate() {
            let mut acc = Rational::zero();
            for &(small, count) in row {
                if let Some(c) = self.coeffs.get(&small) {
                    acc += c * Rational::from_integer(BigInt::from(count));
                }
            }
            out.add_term(big, acc / &denom);
        }
        Ok(out)
    }

    pub fn to_text(&self) -> Result<String> {
        let c = census(self.level, Mode::ColorBlind)?;
        let mut out = format!("COMB v1 level={}\n", self.level);
        for (&id, coef) in &self.coeffs {
            writeln!(out, "{} {}", c.key(id), fmt_rational(coef)).unwrap();
        }
        Ok(out)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "empty combination file"))?;
        let level = header
            .strip_prefix("COMB v1 level=")
            .and_then(|l| l.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::parse(ln, "expected `COMB v1 level=<l>`"))?;
        let c = census(level, Mode::ColorBlind).map_err(|e| Error::parse(ln, e.to_string()))?;
        let mut out = LinearCombination::zero(level);
        for (ln, line) in lines {
            let (id, coef) = parse_census_term(&c, line).map_err(|e| Error::parse(ln, e.to_string()))?;
            out.add_term(id, coef);
        }
        Ok(out)
    }
}

/// Parses `<census-key> <rational>` against a census.
pub(crate) fn parse_census_term(c: &Census, line: &str) -> Result<(usize, Rational)> {
    let mut parts = line.split_whitespace();
    let (Some(key), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(Error::invalid(format!("expected `<key> <p/q>`, got {line:?}")));
    };
    Ok((c.id_of_text(key)?, parse_rational(value)?))
}

type SubgraphTable = Arc<Vec<Vec<(usize, u64)>>>;

/// For each `H' ∈ F_big`, the level-`small` classes of its `small`-subsets
/// with multiplicities (the numerators of `p(H, H')`).
pub(crate) fn subgraph_table(small: usize, big: usize) -> Result<SubgraphTable> {
    static MEMO: OnceLock<Mutex<HashMap<(usize, usize), SubgraphTable>>> = OnceLock::new();
    let memo = MEMO.get_or_init(Default::default);
    if let Some(t) = memo.lock().unwrap().get(&(small, big)) {
        return Ok(t.clone());
    }
    let cs = census(small, Mode::ColorBlind)?;
    let cb = census(big, Mode::ColorBlind)?;
    let rows: Vec<Vec<(usize, u64)>> = cb
        .members()
        .par_iter()
        .map(|k| {
            let g = k.graph();
            let m = g.matrix();
            let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
            for_each_subset(big, small, |s| {
                let id = cs.id_of_graph(&induced_from_matrix(&m, big, s)).expect("census is complete");
                *counts.entry(id).or_default() += 1;
            });
            counts.into_iter().collect()
        })
        .collect();
    let table = Arc::new(rows);
    memo.lock().unwrap().insert((small, big), table.clone());
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn all_ones_lifts_to_all_ones() {
        let ones3 = LinearCombination::all_ones(3).unwrap();
        assert_eq!(ones3.lift(6).unwrap(), LinearCombination::all_ones(6).unwrap());
    }

    #[test]
    fn lifting_composes() {
        let rbt = LinearCombination::from_expression(Expression::Rbt).unwrap();
        let twice = rbt.lift(4).unwrap().lift(6).unwrap();
        assert_eq!(twice, rbt.lift(6).unwrap());
        assert!(rbt.lift(2).is_err());
        assert!(rbt.lift(7).is_err());
    }

    #[test]
    fn evaluation_of_expressions() {
        let rbt = LinearCombination::from_expression(Expression::Rbt).unwrap();
        assert_eq!(rbt.evaluate(&ColoredGraph::rb1111()).unwrap(), rat(1, 1));
        let mono = LinearCombination::from_expression(Expression::Monot).unwrap();
        assert_eq!(mono.evaluate(&ColoredGraph::monochromatic(6, 1)).unwrap(), rat(1, 1));
    }

    #[test]
    fn arithmetic_drops_zeros() {
        let mut a = LinearCombination::zero(3);
        a.add_term(1, rat(1, 2));
        a.add_term(1, rat(-1, 2));
        assert!(a.is_zero());
        a.add_term(0, rat(2, 3));
        let b = a.scaled(&rat(3, 1));
        assert_eq!(b.get(0), rat(2, 1));
        let mut c = a.clone();
        c.add_scaled(&b, &rat(-1, 3)).unwrap();
        assert!(c.is_zero());
        assert!(c.add_scaled(&LinearCombination::zero(4), &rat(1, 1)).is_err());
    }

    #[test]
    fn text_round_trip() {
        let rbt = LinearCombination::from_expression(Expression::Tct).unwrap().lift(4).unwrap();
        let text = rbt.to_text().unwrap();
        assert_eq!(LinearCombination::from_text(&text).unwrap(), rbt);
        assert!(LinearCombination::from_text("COMB v1 level=3\n3:111 1/2\n").is_err());
        assert!(LinearCombination::from_text("COMB v1 level=3\n3:001 x\n").is_err());
    }
}
