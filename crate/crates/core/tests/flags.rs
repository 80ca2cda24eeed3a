use std::collections::BTreeSet;

use rainbow_core::flags::{
    averaged_product_value, canonical_flag, downward_average, enumerate_flags, enumerate_types, expand_product,
    expand_regularity, expand_square, flag_product, pair_density, rooted_flag_density, rooted_rainbow_triangle,
    rooted_value, FlagCombination, FlagKey, FlagType,
};
use rainbow_core::graph::{ColoredGraph, COLOR_PERMUTATIONS};
use rainbow_core::lincomb::LinearCombination;
use rainbow_core::rational::{rat, Rational};
use rainbow_core::Mode;

use num_traits::{Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_graph(rng: &mut StdRng, n: usize) -> ColoredGraph {
    ColoredGraph::from_fn(n, |_, _| rng.gen_range(0..3))
}

fn blowup(base: &ColoredGraph, sizes: &[usize], inner: &ColoredGraph) -> ColoredGraph {
    let owner: Vec<usize> = sizes.iter().enumerate().flat_map(|(i, &s)| std::iter::repeat_n(i, s)).collect();
    let local: Vec<usize> = sizes.iter().flat_map(|&s| 0..s).collect();
    ColoredGraph::from_fn(owner.len(), |a, b| {
        if owner[a] == owner[b] {
            inner.color(local[a], local[b])
        } else {
            base.color(owner[a], owner[b])
        }
    })
}

fn random_combination(rng: &mut StdRng, ty: &FlagType, level: usize, terms: usize) -> FlagCombination {
    let flags = enumerate_flags(ty, level).unwrap();
    let picked: Vec<(FlagKey, Rational)> = (0..terms)
        .map(|_| (flags[rng.gen_range(0..flags.len())], rat(rng.gen_range(-5..=5), rng.gen_range(1..=4))))
        .collect();
    FlagCombination::from_terms(ty, level, &picked).unwrap()
}

#[test]
fn edge_type_extensions_to_three_vertices() {
    let ty = FlagType::parse("2:0").unwrap();
    let flags = enumerate_flags(&ty, 3).unwrap();
    // Oracle: the 9 ways to attach a third vertex, identified when a global
    // color permutation maps one to the other (roots stay fixed).
    let mut orbits = BTreeSet::new();
    for a in 0..3u8 {
        for b in 0..3u8 {
            let best = COLOR_PERMUTATIONS
                .iter()
                .filter(|p| p[0] == 0)
                .map(|p| (p[a as usize], p[b as usize]))
                .min()
                .unwrap();
            orbits.insert(best);
        }
    }
    assert_eq!(flags.len(), orbits.len());
    assert_eq!(flags.len(), 5);
}

#[test]
fn basis_sizes_are_recorded() {
    // Global color permutations identify flags; these sizes are what the
    // certificate bases use.
    assert_eq!(enumerate_types(2).unwrap().len(), 1);
    let v = FlagType::vertex();
    assert_eq!(enumerate_flags(&v, 3).unwrap().len(), 4);
    let sizes: Vec<usize> = enumerate_types(4).unwrap().iter().map(|t| enumerate_flags(t, 5).unwrap().len()).collect();
    assert!(sizes.iter().all(|&s| s > 0));
    let total_f5: usize = enumerate_flags(&FlagType::empty(), 5).unwrap().len();
    assert_eq!(total_f5, rainbow_core::census(5, Mode::ColorBlind).unwrap().len());
}

#[test]
fn pair_density_examples() {
    let e = ColoredGraph::monochromatic(2, 1);
    let mut rng = StdRng::seed_from_u64(1);
    for _ in 0..10 {
        let h = random_graph(&mut rng, 4);
        assert_eq!(pair_density(&e, &e, &h, Mode::ColorBlind).unwrap(), rat(1, 1));
    }
    let t = ColoredGraph::rainbow_triangle();
    assert_eq!(pair_density(&t, &t, &ColoredGraph::monochromatic(6, 0), Mode::ColorBlind).unwrap(), rat(0, 1));
    // Clean 2211 blow-up: vertices {0,1} and {2,3} are twins. A split into two
    // rainbow triangles must separate both twin pairs; brute force below.
    let h = blowup(&ColoredGraph::rb1111(), &[2, 2, 1, 1], &ColoredGraph::monochromatic(2, 0));
    let mut hits = 0;
    rainbow_core::graph::for_each_subset(6, 3, |s| {
        let rest: Vec<usize> = (0..6).filter(|v| !s.contains(v)).collect();
        let a = h.induced_subgraph(s).unwrap();
        let b = h.induced_subgraph(&rest).unwrap();
        if a.is_rainbow_triangle(0, 1, 2) && b.is_rainbow_triangle(0, 1, 2) {
            hits += 1;
        }
    });
    assert_eq!(pair_density(&t, &t, &h, Mode::ColorBlind).unwrap(), rat(hits, 20));
    assert!(hits > 0);
    assert!(pair_density(&t, &e, &h, Mode::ColorBlind).is_err());
}

#[test]
fn rooted_product_matches_double_scan() {
    let rbt = rooted_rainbow_triangle();
    let product = flag_product(&rbt, &rbt).unwrap();
    assert_eq!(product.level(), 5);
    let mut rng = StdRng::seed_from_u64(2);
    for _ in 0..20 {
        let n = rng.gen_range(5..=8);
        let g = random_graph(&mut rng, n);
        for v in 0..n {
            // direct: ordered disjoint pairs of extension sets
            let rest: Vec<usize> = (0..n).filter(|&u| u != v).collect();
            let mut hits = 0i64;
            let mut total = 0i64;
            for i in 0..rest.len() {
                for j in i + 1..rest.len() {
                    for k in 0..rest.len() {
                        for l in k + 1..rest.len() {
                            if [k, l].iter().any(|x| *x == i || *x == j) {
                                continue;
                            }
                            total += 1;
                            if g.is_rainbow_triangle(v, rest[i], rest[j]) && g.is_rainbow_triangle(v, rest[k], rest[l]) {
                                hits += 1;
                            }
                        }
                    }
                }
            }
            assert_eq!(rooted_value(&g, &[v], &product).unwrap(), rat(hits, total));
        }
    }
}

#[test]
fn product_with_forced_repeat_is_zero_on_rainbow_root() {
    // Both factors attach the new vertex with two edges of the root's color;
    // no extension containing both can realize a properly colored K4 flag.
    let ty = FlagType::parse("2:0").unwrap();
    let f1 = canonical_flag(&ColoredGraph::decode("3:000").unwrap(), &[0, 1]).unwrap();
    let f2 = canonical_flag(&ColoredGraph::decode("3:011").unwrap(), &[0, 1]).unwrap();
    assert_ne!(f1, f2);
    let p = flag_product(&f1, &f2).unwrap();
    let rb = canonical_flag(&ColoredGraph::rb1111(), &[0, 1]).unwrap();
    assert_eq!(p.get(&rb), rat(0, 1));
    assert!(!p.is_zero());
    assert_eq!(p.flag_type(), &ty);
}

#[test]
fn averaged_products_match_direct_evaluation() {
    let mut rng = StdRng::seed_from_u64(3);
    let cases: Vec<(FlagType, usize, usize)> = vec![
        (FlagType::empty(), 3, 3),
        (FlagType::vertex(), 4, 3),
        (FlagType::vertex(), 2, 3),
        (FlagType::parse("2:0").unwrap(), 4, 4),
        (enumerate_types(4).unwrap()[5].clone(), 5, 5),
        (FlagType::parse("4:012210").unwrap(), 5, 5),
    ];
    let mut hosts = 0;
    for (ty, k1, k2) in &cases {
        for _ in 0..9 {
            let n = rng.gen_range(6..=9);
            let g = if rng.gen_bool(0.5) {
                random_graph(&mut rng, n)
            } else {
                let mut sizes = [1usize; 4];
                for _ in 4..n {
                    sizes[rng.gen_range(0..4)] += 1;
                }
                blowup(&ColoredGraph::rb1111(), &sizes, &random_graph(&mut rng, 6))
            };
            let x = random_combination(&mut rng, ty, *k1, 3);
            let y = random_combination(&mut rng, ty, *k2, 3);
            let expanded = expand_product(&x, &y).unwrap();
            assert_eq!(expanded.evaluate(&g).unwrap(), averaged_product_value(&g, &x, &y).unwrap(), "{ty:?}");
            hosts += 1;
        }
    }
    assert!(hosts >= 50);
}

#[test]
fn squares_scale_quadratically_and_single_terms_are_nonnegative() {
    let mut rng = StdRng::seed_from_u64(4);
    let ty = enumerate_types(4).unwrap()[3].clone();
    let x = random_combination(&mut rng, &ty, 5, 4);
    let t = rat(-3, 2);
    let mut scaled = expand_square(&x).unwrap();
    scaled.scale(&(&t * &t));
    assert_eq!(expand_square(&x.scaled(&t)).unwrap(), scaled);
    for f in enumerate_flags(&ty, 5).unwrap() {
        let sq = expand_square(&FlagCombination::single(&f).unwrap()).unwrap();
        assert!(sq.terms().all(|(_, c)| !c.is_negative()));
        assert!(!sq.is_zero());
        assert_eq!(sq.level(), 6);
    }
}

#[test]
fn square_of_two_flags_on_six_vertex_hosts() {
    let mut rng = StdRng::seed_from_u64(5);
    let ty = FlagType::parse("4:012210").unwrap();
    let x = random_combination(&mut rng, &ty, 5, 2);
    let sq = expand_square(&x).unwrap();
    for _ in 0..10 {
        let g = random_graph(&mut rng, 6);
        // With two extension vertices left, the square's average is over
        // roots and the two ordered ways to split them.
        let mut direct = Rational::zero();
        let mut count = 0i64;
        for_each_injection4(6, |theta| {
            let rest: Vec<usize> = (0..6).filter(|v| !theta.contains(v)).collect();
            for (a, b) in [(rest[0], rest[1]), (rest[1], rest[0])] {
                let s1 = [theta[0], theta[1], theta[2], theta[3], a];
                let s2 = [theta[0], theta[1], theta[2], theta[3], b];
                direct += flag_value(&g, &s1, &x) * flag_value(&g, &s2, &x);
            }
            count += 2;
        });
        assert_eq!(sq.evaluate(&g).unwrap(), direct / rat(count, 1));
    }
}

fn for_each_injection4(n: usize, mut f: impl FnMut([usize; 4])) {
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let t = [a, b, c, d];
                    if (0..4).all(|i| (i + 1..4).all(|j| t[i] != t[j])) {
                        f(t);
                    }
                }
            }
        }
    }
}

/// Coefficient of the flag induced on `order` (roots first); 0 when the root
/// is not of the combination's type.
fn flag_value(g: &ColoredGraph, order: &[usize], x: &FlagCombination) -> Rational {
    let key = canonical_flag(&g.induced_ordered(order), &[0, 1, 2, 3]).unwrap();
    if key.flag_type() != *x.flag_type() {
        return Rational::zero();
    }
    x.get(&key)
}

#[test]
fn averaging_matches_injection_counts() {
    let mut rng = StdRng::seed_from_u64(6);
    for ty in [FlagType::vertex(), FlagType::parse("2:0").unwrap(), FlagType::parse("4:001122").unwrap()] {
        let x = random_combination(&mut rng, &ty, 5, 3);
        let avg = downward_average(&x).unwrap();
        for _ in 0..5 {
            let g = random_graph(&mut rng, 7);
            // direct: average over injections of the rooted value
            let s = ty.size();
            let mut acc = Rational::zero();
            let mut count = 0i64;
            let mut theta = Vec::new();
            inject(7, s, &mut theta, &mut |t| {
                count += 1;
                let root = g.induced_ordered(t);
                if s == 0 || FlagType::new(&root) == ty {
                    acc += rooted_value(&g, t, &x).unwrap();
                }
            });
            assert_eq!(avg.evaluate(&g).unwrap(), acc / rat(count, 1));
        }
    }
    let single = FlagCombination::single(&enumerate_flags(&FlagType::vertex(), 4).unwrap()[2]).unwrap();
    for (_, c) in downward_average(&single).unwrap().terms() {
        assert!(*c > rat(0, 1) && *c <= rat(1, 1));
    }
}

fn inject(n: usize, s: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if cur.len() == s {
        f(cur);
        return;
    }
    for v in 0..n {
        if !cur.contains(&v) {
            cur.push(v);
            inject(n, s, cur, f);
            cur.pop();
        }
    }
}

#[test]
fn regularity_terms() {
    let v = FlagType::vertex();
    let mono4 = canonical_flag(&ColoredGraph::monochromatic(4, 0), &[0]).unwrap();
    let reg = expand_regularity(&mono4, &rat(1, 1)).unwrap();
    assert_eq!(reg.evaluate(&ColoredGraph::monochromatic(6, 0)).unwrap(), rat(-1, 4));
    // On an iterated blow-up every vertex has rooted rainbow density 17/35,
    // so each regularity term is at least its value with the root fixed.
    let q = ColoredGraph::rb1111();
    let r2 = blowup(&q, &[4, 4, 4, 4], &ColoredGraph::from_fn(4, |a, b| q.color(a, b)));
    let rbt = rooted_flag_density(&r2, &[0], &rooted_rainbow_triangle()).unwrap();
    assert_eq!(rbt, rat(17, 35));
    for f in enumerate_flags(&v, 4).unwrap().into_iter().take(6) {
        let reg = expand_regularity(&f, &rat(2, 1)).unwrap();
        let value = reg.evaluate(&r2).unwrap();
        let fx = FlagCombination::single(&f).unwrap();
        let mut y = FlagCombination::unit(&v, 3).unwrap().scaled(&rat(-1, 4));
        y.add(&rooted_rainbow_triangle(), rat(1, 1)).unwrap();
        assert_eq!(value, averaged_product_value(&r2, &fx, &y).unwrap() * rat(2, 1));
        assert!(!value.is_negative(), "{f}");
    }
}

#[test]
fn lift_preserves_evaluation() {
    let mut rng = StdRng::seed_from_u64(7);
    let rbt = LinearCombination::from_expression(rainbow_core::densities::Expression::Rbt).unwrap();
    let lifted = rbt.lift(6).unwrap();
    for _ in 0..10 {
        let n = rng.gen_range(6..=9);
        let g = random_graph(&mut rng, n);
        assert_eq!(lifted.evaluate(&g).unwrap(), rbt.evaluate(&g).unwrap());
    }
    let q = ColoredGraph::rb1111();
    let host = blowup(&q, &[2, 2, 2, 2], &ColoredGraph::monochromatic(2, 0));
    assert_eq!(
        lifted.evaluate(&host).unwrap(),
        rainbow_core::densities::density_expression(rainbow_core::densities::Expression::Rbt, &host).unwrap()
    );
}
