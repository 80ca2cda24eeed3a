use std::collections::BTreeSet;

use rainbow_core::canon::{canonical_form, Mode};
use rainbow_core::census::census;
use rainbow_core::densities::{
    blowup_class_sizes, count_rainbow_triangles, density_expression, density_profile, expression_count,
    expression_count_scan, rb1111_copies, rooted_density, Expression,
};
use rainbow_core::graph::{for_each_subset, ColoredGraph, COLOR_PERMUTATIONS};
use rainbow_core::rational::{rat, Rational};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn blowup(base: &ColoredGraph, sizes: &[usize], inner: &[ColoredGraph]) -> ColoredGraph {
    let mut owner = Vec::new();
    let mut local = Vec::new();
    for (i, &s) in sizes.iter().enumerate() {
        for k in 0..s {
            owner.push(i);
            local.push(k);
        }
    }
    ColoredGraph::from_fn(owner.len(), |a, b| {
        if owner[a] == owner[b] {
            inner[owner[a]].color(local[a], local[b])
        } else {
            base.color(owner[a], owner[b])
        }
    })
}

fn random_graph(rng: &mut StdRng, n: usize) -> ColoredGraph {
    ColoredGraph::from_fn(n, |_, _| rng.gen_range(0..3))
}

/// A blow-up of RB1111 with random inner colors and a few recolored edges.
fn noisy_blowup(rng: &mut StdRng, n: usize) -> ColoredGraph {
    let mut sizes = [1usize; 4];
    for _ in 4..n {
        sizes[rng.gen_range(0..4)] += 1;
    }
    let inner: Vec<ColoredGraph> = sizes.iter().map(|&s| random_graph(rng, s)).collect();
    let mut g = blowup(&ColoredGraph::rb1111(), &sizes, &inner);
    for _ in 0..rng.gen_range(0..3) {
        let a = rng.gen_range(0..n);
        let b = (a + rng.gen_range(1..n)) % n;
        g.set_color(a, b, rng.gen_range(0..3));
    }
    g
}

fn hosts(seed: u64, count: usize, sizes: std::ops::RangeInclusive<usize>) -> Vec<ColoredGraph> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(sizes.clone());
            if i % 2 == 0 {
                noisy_blowup(&mut rng, n)
            } else {
                random_graph(&mut rng, n)
            }
        })
        .collect()
}

#[test]
fn fast_counts_match_subset_scans() {
    for g in hosts(1, 60, 6..=9) {
        for e in Expression::ALL {
            assert_eq!(expression_count(e, &g).unwrap(), expression_count_scan(e, &g).unwrap(), "{e} on {g}");
        }
    }
}

#[test]
fn partition_and_five_point_identity() {
    for g in hosts(2, 100, 5..=9) {
        let d = |e| density_expression(e, &g).unwrap();
        assert_eq!(d(Expression::Rbt) + d(Expression::Tct) + d(Expression::Monot), rat(1, 1));
        assert_eq!(
            d(Expression::Rb1111),
            (rat(2, 1) * d(Expression::Rb2111) + d(Expression::Rb1111Plus)) / rat(5, 1)
        );
    }
}

#[test]
fn no_five_set_holds_three_copies() {
    for g in hosts(3, 40, 5..=9) {
        for_each_subset(g.n(), 5, |s| {
            assert!(rb1111_copies(&g.induced_subgraph(s).unwrap()) <= 2);
        });
    }
}

#[test]
fn rainbow_count_matches_induced_scan() {
    let t = ColoredGraph::rainbow_triangle();
    for g in hosts(4, 20, 3..=9) {
        assert_eq!(
            count_rainbow_triangles(&g),
            rainbow_core::densities::count_induced(&t, &g, Mode::ColorBlind).unwrap()
        );
    }
}

#[test]
fn expression_equals_sum_over_recognized_classes() {
    for g in hosts(5, 10, 6..=8) {
        for e in Expression::ALL {
            let c = census(e.arity(), Mode::ColorBlind).unwrap();
            let p = density_profile(&g, e.arity(), Mode::ColorBlind).unwrap();
            let sum: Rational = c
                .members()
                .iter()
                .enumerate()
                .filter(|(_, k)| e.recognizes(&k.graph()))
                .map(|(id, _)| p.entry(id))
                .sum();
            assert_eq!(sum, density_expression(e, &g).unwrap(), "{e}");
        }
    }
}

/// Canonical keys of all blow-ups of RB1111 with the given class sizes and
/// every choice of inner colors.
fn blowup_keys(sizes: &[usize]) -> BTreeSet<String> {
    let inner_edges: usize = sizes.iter().map(|s| s * (s - 1) / 2).sum();
    let mut keys = BTreeSet::new();
    for code in 0..3usize.pow(inner_edges as u32) {
        let mut x = code;
        let inner: Vec<ColoredGraph> = sizes
            .iter()
            .map(|&s| {
                ColoredGraph::from_fn(s, |_, _| {
                    let c = (x % 3) as u8;
                    x /= 3;
                    c
                })
            })
            .collect();
        let g = blowup(&ColoredGraph::rb1111(), sizes, &inner);
        keys.insert(canonical_form(&g, Mode::ColorBlind).unwrap().text());
    }
    keys
}

fn recognized(e: Expression) -> BTreeSet<String> {
    census(e.arity(), Mode::ColorBlind)
        .unwrap()
        .members()
        .iter()
        .filter(|k| e.recognizes(&k.graph()))
        .map(|k| k.text())
        .collect()
}

#[test]
fn copy_counts_agree_with_blowup_descriptions() {
    // Exactly two copies in a 5-set is the same as being a 5-vertex blow-up.
    assert_eq!(recognized(Expression::Rb2111), blowup_keys(&[2, 1, 1, 1]));
    assert_eq!(recognized(Expression::Rb3111), blowup_keys(&[3, 1, 1, 1]));
    assert_eq!(recognized(Expression::Rb2211), blowup_keys(&[2, 2, 1, 1]));
    let c6 = census(6, Mode::ColorBlind).unwrap();
    for k in c6.members() {
        let g = k.graph();
        match blowup_class_sizes(&g) {
            Some([3, 1, 1, 1]) => assert_eq!(rb1111_copies(&g), 3),
            Some([2, 2, 1, 1]) => assert_eq!(rb1111_copies(&g), 4),
            _ => {}
        }
    }
    let plus = recognized(Expression::Rb1111Plus);
    assert!(!plus.is_empty());
    assert!(plus.is_disjoint(&recognized(Expression::Rb2111)));
}

#[test]
fn recognizers_are_color_blind() {
    let mut rng = StdRng::seed_from_u64(6);
    for _ in 0..50 {
        let g = noisy_blowup(&mut rng, 6);
        let sub5 = g.induced_subgraph(&[0, 1, 2, 3, 4]).unwrap();
        for p in COLOR_PERMUTATIONS {
            for e in [Expression::Rb3111, Expression::Rb2211] {
                assert_eq!(e.recognizes(&g), e.recognizes(&g.permute_colors(p)));
            }
            for e in [Expression::Rb2111, Expression::Rb1111Plus] {
                assert_eq!(e.recognizes(&sub5), e.recognizes(&sub5.permute_colors(p)));
            }
        }
    }
}

fn r2() -> ColoredGraph {
    let q = ColoredGraph::rb1111();
    blowup(&q, &[4, 4, 4, 4], &[q.clone(), q.clone(), q.clone(), q.clone()])
}

#[test]
fn iterated_blowup_on_sixteen_vertices() {
    let g = r2();
    assert_eq!(count_rainbow_triangles(&g), 272);
    assert_eq!(density_expression(Expression::Rbt, &g).unwrap(), rat(272, 560));
    for v in 0..16 {
        assert_eq!(rooted_density(Expression::Rbt, &g, &[v]).unwrap(), rat(17, 35));
    }
}

#[test]
fn rooted_2211_counts_duplicated_pairs() {
    // Clean blow-up with classes {0,1,2}, {3,4,5}, {6,7}, {8,9}; roots one per class.
    let q = ColoredGraph::rb1111();
    let inner: Vec<ColoredGraph> = [3, 3, 2, 2].iter().map(|&s| ColoredGraph::monochromatic(s, 0)).collect();
    let g = blowup(&q, &[3, 3, 2, 2], &inner);
    let roots = [0, 3, 6, 8];
    // Pairs from two different classes: 2*2 + 2*1 + 2*1 + 2*1 + 2*1 + 1*1 = 13.
    let mut direct = 0;
    let rest: Vec<usize> = (0..10).filter(|v| !roots.contains(v)).collect();
    for_each_subset(rest.len(), 2, |s| {
        let mut set = roots.to_vec();
        set.extend(s.iter().map(|&i| rest[i]));
        set.sort_unstable();
        if Expression::Rb2211.recognizes(&g.induced_subgraph(&set).unwrap()) {
            direct += 1;
        }
    });
    assert_eq!(direct, 13);
    assert_eq!(rooted_density(Expression::Rb2211, &g, &roots).unwrap(), rat(13, 15));
    for x in [vec![0], vec![0, 3], vec![0, 3, 6, 8]] {
        for e in Expression::ALL {
            if x.len() <= e.arity() {
                let d = rooted_density(e, &g, &x).unwrap();
                assert!(d >= rat(0, 1) && d <= rat(1, 1));
            }
        }
    }
}
