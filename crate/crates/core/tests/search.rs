use rainbow_core::constructions::{balanced_construction, conjectured_f, iterated_blowup};
use rainbow_core::densities::count_rainbow_triangles;
use rainbow_core::graph::ColoredGraph;
use rainbow_core::parallel::with_workers;
use rainbow_core::search::{
    check_vertex_balance, detect_blowup_partition, funky_edges, matches_construction, max_rainbow_exhaustive,
};
use rainbow_core::{canonical_form, Mode};

#[test]
fn four_and_five_vertices() {
    let r4 = max_rainbow_exhaustive(4, false).unwrap();
    assert_eq!(r4.maximum, 4);
    assert_eq!(r4.explored, 3u64.pow(5));
    let rb = canonical_form(&ColoredGraph::rb1111(), Mode::ColorBlind).unwrap();
    assert!(r4.witnesses.contains(&rb));
    let r5 = max_rainbow_exhaustive(5, false).unwrap();
    assert_eq!(r5.maximum, 7);
    assert_eq!(r5.maximum as u128, conjectured_f(5));
}

#[test]
fn pruned_and_unpruned_agree() {
    for n in 1..=6 {
        let a = max_rainbow_exhaustive(n, false).unwrap();
        let b = max_rainbow_exhaustive(n, true).unwrap();
        assert_eq!(a.maximum, b.maximum, "n = {n}");
        assert_eq!(a.witnesses, b.witnesses, "n = {n}");
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let one = with_workers(1, || max_rainbow_exhaustive(5, false)).unwrap().unwrap();
    let four = with_workers(4, || max_rainbow_exhaustive(5, false)).unwrap().unwrap();
    assert_eq!(one, four);
}

#[test]
fn witnesses_are_balanced_and_counted() {
    for n in 4..=6 {
        let r = max_rainbow_exhaustive(n, true).unwrap();
        for w in &r.witnesses {
            let g = w.graph();
            assert_eq!(count_rainbow_triangles(&g), r.maximum);
            assert!(check_vertex_balance(&g).unwrap().holds, "{w}");
        }
    }
}

#[test]
fn seven_vertices_by_extension() {
    let r = max_rainbow_exhaustive(7, true).unwrap();
    assert_eq!(r.explored, 4300 * 729);
    assert_eq!(r.maximum as u128, conjectured_f(7));
    let balanced = canonical_form(&balanced_construction(7).unwrap(), Mode::ColorBlind).unwrap();
    assert!(r.witnesses.contains(&balanced));
}

#[test]
fn blowup_partitions_of_iterated_constructions() {
    for k in 2..=3 {
        let g = iterated_blowup(k).unwrap();
        let parts = detect_blowup_partition(&g).expect("clean partition");
        let size = 4usize.pow(k as u32 - 1);
        assert!(parts.iter().all(|p| p.len() == size));
        let seed: Vec<usize> = parts.iter().map(|p| p[0]).collect();
        let pattern = g.induced_ordered(&seed);
        assert!(funky_edges(&g, &parts, &pattern).unwrap().is_empty());
    }
    assert!(matches_construction(&iterated_blowup(2).unwrap()));
    assert!(detect_blowup_partition(&ColoredGraph::monochromatic(8, 1)).is_none());
}

#[test]
fn one_recolored_cross_edge_breaks_the_partition() {
    let mut g = iterated_blowup(2).unwrap();
    // vertices 0 and 4 lie in different classes
    let c = g.color(0, 4);
    g.set_color(0, 4, (c + 1) % 3);
    assert!(detect_blowup_partition(&g).is_none());
    assert!(!matches_construction(&g));
}

#[test]
fn balance_violator() {
    // RB1111 plus a vertex joined in one color sits exactly on the bound:
    // 3 rainbow triangles at every old vertex, none at the new one
    let g = ColoredGraph::rb1111().extend(&[0, 0, 0, 0]);
    let r = check_vertex_balance(&g).unwrap();
    assert!(r.holds);
    assert_eq!((r.worst.1, r.difference, r.allowed), (4, 3, 3));
    // the same attachment to the 5-vertex construction exceeds it
    let g = balanced_construction(5).unwrap().extend(&[0; 5]);
    let r = check_vertex_balance(&g).unwrap();
    assert!(!r.holds);
    assert_eq!(r.worst.1, 5);
    assert!(r.difference > r.allowed);
}
