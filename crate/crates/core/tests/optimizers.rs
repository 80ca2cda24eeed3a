use std::cmp::Ordering;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use rainbow_core::optimizers::library::{
    black_vertex_funky, black_vertex_funky_1d, certify_cubic, derive_x_bounds, library_entry, library_names,
    one_color_case, one_color_vertex, run_entry,
};
use rainbow_core::optimizers::solver::{solve_case_enumeration, CaseStatus, Solution};
use rainbow_core::optimizers::univariate::maximize_univariate;
use rainbow_core::optimizers::{isolate_roots, Enclosure, Goal, PolyProgram, Relation, UPoly};
use rainbow_core::rational::{parse_rational, rat, to_f64, Rational};

fn dec(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn coord(s: &Solution, var: &str) -> f64 {
    s.argmax_f64(var).unwrap()
}

#[test]
fn maximize_on_an_interval() {
    let prog = PolyProgram::new("t", &["x"], Goal::Maximize, "x").unwrap().geq("1 - x").unwrap().geq("x").unwrap();
    let s = solve_case_enumeration(&prog).unwrap();
    let o = s.optimum.unwrap();
    assert_eq!(o.value, Enclosure::exact(rat(1, 1)));
    assert_eq!(o.point, vec![Enclosure::exact(rat(1, 1))]);
}

#[test]
fn library_programs_round_trip_as_text() {
    for name in library_names() {
        if let rainbow_core::optimizers::library::LibraryEntry::Program(p) = library_entry(&name).unwrap() {
            assert_eq!(PolyProgram::from_text(&p.to_text()).unwrap(), p, "{name}");
        }
    }
}

// ---- grid oracle ----------------------------------------------------------

/// A program on the simplex with box bounds and one two-variable cap, all
/// on the 1/200 grid, so every feasible point rounds to a feasible grid
/// point within 1/200 per coordinate.
struct GridProgram {
    n: usize,
    lo: Vec<i64>,
    hi: Vec<i64>,
    cap: i64,
    quad: Vec<Vec<i64>>,
    lin: Vec<i64>,
}

const STEPS: i64 = 200;

impl GridProgram {
    fn random(rng: &mut StdRng) -> Self {
        let n = rng.gen_range(2..=4);
        loop {
            let lo: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=40)).collect();
            let hi: Vec<i64> = lo.iter().map(|&l| l + rng.gen_range(20..=STEPS - l)).collect();
            let cap = rng.gen_range(lo[0] + lo[1]..=STEPS);
            if lo.iter().sum::<i64>() > STEPS || hi.iter().sum::<i64>() < STEPS {
                continue;
            }
            let quad = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect()).collect();
            let lin = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
            let g = GridProgram { n, lo, hi, cap, quad, lin };
            if g.grid_max().is_finite() {
                return g;
            }
        }
    }

    fn names(&self) -> Vec<String> {
        (0..self.n).map(|i| format!("x{i}")).collect()
    }

    fn program(&self) -> PolyProgram {
        let names = self.names();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let mut obj = String::from("0");
        for i in 0..self.n {
            obj += &format!(" + {}*x{i}", self.lin[i]);
            for j in 0..self.n {
                obj += &format!(" + {}*x{i}*x{j}", self.quad[i][j]);
            }
        }
        let mut p = PolyProgram::new("grid", &refs, Goal::Maximize, &obj).unwrap();
        p = p.eq(&format!("{} - 1", names.join(" + "))).unwrap();
        for i in 0..self.n {
            p = p.geq(&format!("x{i} - {}/{STEPS}", self.lo[i])).unwrap();
            p = p.geq(&format!("{}/{STEPS} - x{i}", self.hi[i])).unwrap();
        }
        p.geq(&format!("{}/{STEPS} - x0 - x1", self.cap)).unwrap()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let mut v = 0.0;
        for i in 0..self.n {
            v += self.lin[i] as f64 * x[i];
            for j in 0..self.n {
                v += self.quad[i][j] as f64 * x[i] * x[j];
            }
        }
        v
    }

    /// Bound on how much the objective moves when each coordinate moves by
    /// at most one grid step.
    fn resolution(&self) -> f64 {
        let mut l = 0.0;
        for i in 0..self.n {
            l += self.lin[i].abs() as f64;
            for j in 0..self.n {
                l += 2.0 * self.quad[i][j].abs() as f64;
            }
        }
        l / STEPS as f64
    }

    fn grid_max(&self) -> f64 {
        let mut best = f64::NEG_INFINITY;
        let mut k = vec![0i64; self.n];
        self.scan(0, STEPS, &mut k, &mut best);
        best
    }

    fn scan(&self, i: usize, left: i64, k: &mut Vec<i64>, best: &mut f64) {
        if i == self.n - 1 {
            k[i] = left;
            if left < self.lo[i] || left > self.hi[i] || k[0] + k[1] > self.cap {
                return;
            }
            let x: Vec<f64> = k.iter().map(|&v| v as f64 / STEPS as f64).collect();
            *best = best.max(self.eval(&x));
            return;
        }
        for v in self.lo[i]..=self.hi[i].min(left) {
            k[i] = v;
            self.scan(i + 1, left - v, k, best);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn solver_agrees_with_grid_search(seed in any::<u64>()) {
        let g = GridProgram::random(&mut StdRng::seed_from_u64(seed));
        let s = solve_case_enumeration(&g.program()).unwrap();
        let grid = g.grid_max();
        let o = s.optimum.as_ref().expect("grid programs are feasible");
        prop_assert!(o.verified);
        let v = o.value.to_f64();
        prop_assert!(grid <= v + 1e-9, "grid {grid} above exact {v}");
        prop_assert!(v - grid <= g.resolution() + 1e-9, "exact {v} far above grid {grid}");
        // the log holds exactly the non-pruned subsets
        prop_assert_eq!(s.log.len() as u64, s.raw_cases - s.pruned);
    }
}

#[test]
fn argmax_satisfies_constraints_by_substitution() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..20 {
        let g = GridProgram::random(&mut rng);
        let p = g.program();
        let s = solve_case_enumeration(&p).unwrap();
        let best = s.best().unwrap();
        let x = best.point.as_rational().expect("linear constraints give rational points");
        for c in &p.constraints {
            let v = c.poly.eval(x);
            match c.relation {
                Relation::Eq => assert_eq!(v, rat(0, 1)),
                Relation::Geq => assert!(v >= rat(0, 1)),
                Relation::Gt => assert!(v > rat(0, 1)),
            }
        }
    }
}

// ---- root isolation -------------------------------------------------------

#[test]
fn linear_root_is_exact() {
    let p = UPoly::new(vec![rat(-1, 2), rat(1, 1)]);
    let iso = isolate_roots(&p, &rat(0, 1), &rat(1, 1), &rat(1, 1000)).unwrap();
    assert_eq!(iso.roots.len(), 1);
    assert!(iso.roots[0].is_exact());
    assert_eq!(iso.roots[0].lo, rat(1, 2));
}

#[test]
fn random_cubics_match_a_sign_scan() {
    let mut rng = StdRng::seed_from_u64(5);
    let width = rat(1, 1_000_000_000);
    for _ in 0..6 {
        let lead = rat(rng.gen_range(1..=9), rng.gen_range(1..=4)) * if rng.gen_bool(0.5) { rat(1, 1) } else { rat(-1, 1) };
        let mut p = UPoly::constant(lead);
        for _ in 0..3 {
            let r = rat(rng.gen_range(1..100_000), 100_003);
            p = p.mul(&UPoly::new(vec![-r, rat(1, 1)]));
        }
        let coeffs: Vec<f64> = p.coeffs().iter().map(to_f64).collect();
        let f = |t: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c);
        // sign changes on the 1e-6 grid
        let steps = 1_000_000;
        let mut changes = Vec::new();
        let mut prev = f(0.0);
        for k in 1..=steps {
            let t = k as f64 / steps as f64;
            let v = f(t);
            if v == 0.0 || (v > 0.0) != (prev > 0.0) {
                changes.push(t);
            }
            prev = v;
        }
        let iso = isolate_roots(&p, &rat(0, 1), &rat(1, 1), &width).unwrap();
        let mids: Vec<f64> = iso.roots.iter().map(|r| to_f64(&((&r.lo + &r.hi) / rat(2, 1)))).collect();
        for r in &iso.roots {
            assert!(&r.hi - &r.lo <= width);
        }
        // roots closer than the grid step can hide from the scan
        let separated = mids.windows(2).all(|w| w[1] - w[0] > 3e-6);
        if separated {
            assert_eq!(changes.len(), mids.len(), "{p}");
            for (t, m) in changes.iter().zip(&mids) {
                assert!((t - m).abs() <= 1.5e-6, "{t} vs {m}");
            }
        }
        // signs between roots alternate for simple roots
        for w in iso.signs.windows(2) {
            if w[0] != Ordering::Equal && w[1] != Ordering::Equal {
                assert_ne!(w[0], w[1]);
            }
        }
    }
}

#[test]
fn cubic_nonpositive_set_is_certified() {
    let c = certify_cubic().unwrap();
    assert!(c.contained);
    let roots: Vec<f64> = c.isolation.roots.iter().map(|r| to_f64(&r.lo)).collect();
    assert_eq!(roots.len(), 3);
    for (r, want) in roots.iter().zip([0.0031, 0.12866, 0.1716]) {
        assert!((r - want).abs() < 1e-3, "{r}");
    }
    assert!(roots[0] < 0.0031 && roots[1] > 0.12866 && roots[2] < 0.1716);
}

// ---- univariate -----------------------------------------------------------

#[test]
fn univariate_relaxation_peaks_at_left_end() {
    let u = black_vertex_funky_1d();
    let m = maximize_univariate(&u.num, &u.den, &u.lo, &u.hi).unwrap();
    assert_eq!(m.arg, Enclosure::exact(dec("0.244287")));
    assert!(m.value.hi < dec("0.075"));
}

// ---- the library ----------------------------------------------------------

#[test]
fn partition_bounds_are_consistent() {
    let checks = derive_x_bounds().unwrap();
    // independently recomputed optima
    let expected = [
        ("max_x0", 0.0059604740),
        ("max_x1", 0.2557127),
        ("min_x1", 0.2442873),
        ("max_x1_x2", 0.5065964),
        ("min_x1_x2", 0.4934036),
        ("max_f", 8.4608889e-5),
        ("max_funky_coefficient", 0.0314717),
        ("min_skew_sum", 0.484987007),
        ("max_x1_x0", 0.256289),
    ];
    for (c, (name, v)) in checks.iter().zip(expected) {
        assert_eq!(c.target.name, name);
        assert!(c.consistent, "{name}");
        let got = c.value().unwrap().to_f64();
        assert!((got - v).abs() < 1e-6, "{name}: {got} vs {v}");
    }
}

#[test]
fn one_color_cases() {
    let s1 = solve_case_enumeration(&one_color_case(1).unwrap()).unwrap();
    assert!((coord(&s1, "x1") - 0.24424).abs() < 1e-4);
    assert!(s1.value_f64().unwrap() < 0.1985);

    let s2 = solve_case_enumeration(&one_color_case(2).unwrap()).unwrap();
    assert!((coord(&s2, "x1") - 0.24662).abs() < 1e-4);
    assert!((coord(&s2, "x2") - 0.24936).abs() < 1e-4);
    assert!(s2.optimum.as_ref().unwrap().value.hi < dec("0.19991"));

    for case in [3, 4] {
        let p = one_color_case(case).unwrap();
        let f_positive = p.constraints.iter().position(|c| c.relation == Relation::Gt && c.poly.render(&p.vars) == "f").unwrap();
        let s = solve_case_enumeration(&p).unwrap();
        assert!(s.is_infeasible(), "case {case}");
        assert!(s.log.iter().all(|r| !matches!(r.status, CaseStatus::Feasible { .. })));
        assert!(s.log.iter().any(|r| r.status == CaseStatus::Infeasible { violated: f_positive }), "case {case}");
    }
}

#[test]
fn one_color_vertex_program() {
    let s = solve_case_enumeration(&one_color_vertex().unwrap()).unwrap();
    let o = s.optimum.as_ref().unwrap();
    assert!((coord(&s, "x1") - 0.246648).abs() < 1e-5);
    assert!((coord(&s, "x2") - 0.249389).abs() < 1e-5);
    assert_eq!(o.point[3], Enclosure::exact(rat(0, 1)));
    assert!(o.value.hi < dec("0.1991"));
    assert!(o.verified);
}

#[test]
fn black_vertex_program() {
    let s = solve_case_enumeration(&black_vertex_funky().unwrap()).unwrap();
    let o = s.optimum.as_ref().unwrap();
    assert!(o.value.hi < dec("0.075"));
    assert!((o.value.to_f64() - 0.07493).abs() < 1e-5);
    assert!((coord(&s, "x1") - 0.244287).abs() < 1e-9);
    assert_eq!(s.raw_cases, 1 << 14);
}

#[test]
fn library_entries_run() {
    for name in ["one_color_case1", "black_vertex_funky_1d", "funky_degree_cubic"] {
        let r = run_entry(library_entry(name).unwrap()).unwrap();
        assert!(!r.to_text().is_empty());
        assert!(serde_json::to_string(&r.report()).unwrap().contains(name));
    }
    assert!(library_entry("nope").is_err());
}
