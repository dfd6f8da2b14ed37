use bhcube::solvers::{certify, ham_cycle_through, ham_path, ham_path_minus_vertex, two_path_cover, SearchLimits};
use bhcube::{BalancedHypercube, Edge, LinearForest, Vertex};
use std::collections::BTreeSet;

fn bh2() -> BalancedHypercube {
    BalancedHypercube::new(2).unwrap()
}

fn parts(h: &BalancedHypercube) -> (Vec<Vertex>, Vec<Vertex>) {
    h.vertices().partition(|x| x.is_even())
}

/// Checks that `paths` are vertex-disjoint walks along edges of `h` covering
/// exactly `cover`.
fn covers(h: &BalancedHypercube, paths: &[&[Vertex]], cover: &BTreeSet<Vertex>) -> bool {
    let mut seen = BTreeSet::new();
    for p in paths {
        if p.windows(2).any(|w| !h.is_edge(w[0], w[1])) {
            return false;
        }
        if !p.iter().all(|x| seen.insert(*x)) {
            return false;
        }
    }
    &seen == cover
}

#[test]
fn two_disjoint_paths_always_exist() {
    let h = bh2();
    let all: BTreeSet<_> = h.vertices().collect();
    let (even, odd) = parts(&h);
    let mut count = 0;
    for &u in &even {
        for &x in even.iter().filter(|x| **x != u) {
            for &v in &odd {
                for &y in odd.iter().filter(|y| **y != v) {
                    let (p, q) = two_path_cover(&h, u, v, x, y, SearchLimits::default())
                        .unwrap()
                        .unwrap_or_else(|| panic!("no cover for {u} {v} {x} {y}"));
                    assert_eq!((p[0], p[p.len() - 1], q[0], q[q.len() - 1]), (u, v, x, y));
                    assert!(covers(&h, &[&p, &q], &all));
                    count += 1;
                }
            }
        }
    }
    assert_eq!(count, 8 * 7 * 8 * 7);
}

#[test]
fn vertex_deleted_paths_always_exist() {
    let h = bh2();
    let (even, odd) = parts(&h);
    let mut count = 0;
    for (dels, ends) in [(&even, &odd), (&odd, &even)] {
        for &w in dels {
            let rest: BTreeSet<_> = h.vertices().filter(|z| *z != w).collect();
            for (a, &x) in ends.iter().enumerate() {
                for &y in &ends[a + 1..] {
                    let p = ham_path_minus_vertex(&h, w, x, y, SearchLimits::default())
                        .unwrap()
                        .unwrap_or_else(|| panic!("no path avoiding {w} from {x} to {y}"));
                    assert_eq!((p.first(), p.last()), (Some(x), Some(y)));
                    assert!(covers(&h, &[p.vertices()], &rest));
                    count += 1;
                }
            }
        }
    }
    assert_eq!(count, 2 * 8 * 28);
}

#[test]
fn laceable_and_hamiltonian() {
    let h = bh2();
    let all: BTreeSet<_> = h.vertices().collect();
    let (even, odd) = parts(&h);
    let none = BTreeSet::new();
    let empty = LinearForest::empty();
    for &u in &even {
        for &v in &odd {
            let p = ham_path(&h, &none, &empty, u, v, SearchLimits::default()).unwrap().unwrap();
            assert_eq!((p.first(), p.last()), (Some(u), Some(v)));
            assert!(covers(&h, &[p.vertices()], &all));
        }
    }
    let c = ham_cycle_through(&h, &none, &empty, SearchLimits::default()).unwrap().unwrap();
    assert!(covers(&h, &[&c], &all));
    assert!(h.is_edge(c[0], c[c.len() - 1]));
    for e in h.edges() {
        let forest = bhcube::validate_linear_forest(vec![e]).unwrap();
        let c = ham_cycle_through(&h, &none, &forest, SearchLimits::default()).unwrap().unwrap();
        let on_cycle = (0..c.len()).any(|i| Edge::new(c[i], c[(i + 1) % c.len()]).unwrap() == e);
        assert!(on_cycle, "{e}");
    }
}

#[test]
fn pruning_never_loses_a_path() {
    for (n, k) in [(1, 1), (2, 2)] {
        let pruned = certify(n, k, SearchLimits::default()).unwrap();
        let plain = certify(n, k, SearchLimits::default().unpruned()).unwrap();
        assert_eq!(pruned.instances_checked, plain.instances_checked);
        assert!(pruned.inconclusive.is_empty() && plain.inconclusive.is_empty());
        assert_eq!(pruned.failures, plain.failures);
    }
}
