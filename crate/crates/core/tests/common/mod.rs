#![allow(dead_code)]

use num_traits::One;
use rand::rngs::StdRng;
use rand::Rng;

use rainbow_core::certificate::{residual, Certificate, RegularityTerm, Sense};
use rainbow_core::flags::{enumerate_flags, enumerate_types, FlagCombination, FlagKey, FlagType};
use rainbow_core::graph::ColoredGraph;
use rainbow_core::lincomb::LinearCombination;
use rainbow_core::rational::{rat, Rational};

pub fn random_graph(rng: &mut StdRng, n: usize) -> ColoredGraph {
    ColoredGraph::from_fn(n, |_, _| rng.gen_range(0..3))
}

pub fn random_rational(rng: &mut StdRng) -> Rational {
    let mut q = rat(rng.gen_range(1..=9), rng.gen_range(1..=7));
    if rng.gen_bool(0.5) {
        q = -q;
    }
    q
}

/// A combination of `terms` distinct flags with nonzero coefficients.
pub fn random_block(rng: &mut StdRng, ty: &FlagType, level: usize, terms: usize) -> FlagCombination {
    let flags = enumerate_flags(ty, level).unwrap();
    let mut picked: Vec<(FlagKey, Rational)> = Vec::new();
    while picked.len() < terms.min(flags.len()) {
        let f = flags[rng.gen_range(0..flags.len())];
        if picked.iter().all(|(k, _)| *k != f) {
            picked.push((f, random_rational(rng)));
        }
    }
    FlagCombination::from_terms(ty, level, &picked).unwrap()
}

/// The types and levels whose squares land on level 6, cycling through a
/// few four-vertex types, the two-vertex type and the empty type.
pub fn block_shapes(count: usize) -> Vec<(FlagType, usize)> {
    let four = enumerate_types(4).unwrap();
    let two = enumerate_types(2).unwrap();
    (0..count)
        .map(|i| match i % 5 {
            3 => (two[0].clone(), 4),
            4 => (FlagType::empty(), 3),
            _ => (four[(i * 7) % four.len()].clone(), 5),
        })
        .collect()
}

/// An accepted certificate assembled from random squares, regularity terms
/// and slack: the target is chosen as their sum plus the bound.
pub fn assembled_certificate(rng: &mut StdRng, blocks: usize, sense: Sense) -> Certificate {
    let bound = rat(rng.gen_range(1..=20), 97);
    let mut c = Certificate::new(sense, bound, LinearCombination::zero(6)).unwrap();
    for (ty, level) in block_shapes(blocks) {
        c.squares.push(random_block(rng, &ty, level, 3));
    }
    let reg_flags = enumerate_flags(&FlagType::vertex(), 4).unwrap();
    for _ in 0..2 {
        let flag = reg_flags[rng.gen_range(0..reg_flags.len())];
        c.regularities.push(RegularityTerm { flag, weight: rat(rng.gen_range(1..=5), 3) });
    }
    for _ in 0..10 {
        c.slack.add_term(rng.gen_range(0..4300), rat(rng.gen_range(1..=5), 11));
    }
    // with an empty target the residual is -s·z·ΣF - (squares + regs + slack)
    let r = residual(&c).unwrap();
    let sign = if sense == Sense::Geq { -Rational::one() } else { Rational::one() };
    c.target = r.scaled(&sign);
    c
}
