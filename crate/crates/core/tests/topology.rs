use bhcube::topology::{Automorphism, BalancedHypercube, Edge, PartitionView, Sign, Vertex};
use proptest::prelude::*;
use std::collections::BTreeSet;

fn cube(n: usize) -> BalancedHypercube {
    BalancedHypercube::new(n).unwrap()
}

fn neighbor_set(h: &BalancedHypercube, x: Vertex) -> BTreeSet<Vertex> {
    h.neighbors(x).into_iter().collect()
}

#[test]
fn counts_regularity_and_bipartition() {
    for n in 1..=4 {
        let h = cube(n);
        assert_eq!(h.vertices().count(), 4usize.pow(n as u32));
        let even = h.vertices().filter(|x| x.is_even()).count();
        assert_eq!(2 * even, h.vertex_count());
        for x in h.vertices() {
            let nb = neighbor_set(&h, x);
            assert_eq!(nb.len(), 2 * n, "{x}");
            assert!(nb.iter().all(|w| w.parity() != x.parity()));
            assert!(nb.iter().all(|w| h.neighbors(*w).contains(&x)));
        }
        assert_eq!(h.edges().len(), n * h.vertex_count());
    }
}

#[test]
fn shadow_shares_the_neighbor_set() {
    for n in 1..=4 {
        let h = cube(n);
        for x in h.vertices() {
            let s = h.shadow(x);
            assert_ne!(s, x);
            assert_eq!(h.shadow(s), x);
            assert_eq!(neighbor_set(&h, x), neighbor_set(&h, s));
        }
    }
}

#[test]
fn partitions_are_four_copies() {
    for n in 2..=4 {
        let h = cube(n);
        let sub = cube(n - 1);
        for j in 1..n {
            let view = PartitionView::new(&h, j).unwrap();
            for i in 0..4u8 {
                let block = view.block_vertices(i);
                assert_eq!(block.len(), sub.vertex_count());
                for &x in &block {
                    assert_eq!(view.block_of(x), i);
                    assert_eq!(view.lift(i, view.project(x)), x);
                    let inside: BTreeSet<_> = h
                        .neighbors(x)
                        .into_iter()
                        .filter(|w| view.block_of(*w) == i)
                        .map(|w| view.project(w))
                        .collect();
                    assert_eq!(inside, neighbor_set(&sub, view.project(x)));
                    let cross = view.crossing(x);
                    assert!(cross.iter().all(|c| view.block_of(*c) == view.crossing_block(x)));
                    assert!(cross.iter().all(|c| h.edge_dimension(x, *c).unwrap() == j));
                }
            }
        }
    }
}

fn is_automorphism(h: &BalancedHypercube, a: Automorphism) -> bool {
    let image: BTreeSet<Vertex> = h.vertices().map(|x| a.apply(x)).collect();
    image.len() == h.vertex_count()
        && h.edges().iter().all(|e| h.is_edge(a.apply(e.a()), a.apply(e.b())))
        && h.vertices().all(|x| a.inverse().apply(a.apply(x)) == x)
}

#[test]
fn digit_shifts_and_swaps_are_automorphisms() {
    for n in 2..=4 {
        let h = cube(n);
        for d in 1..n {
            for c in 0..4 {
                assert!(is_automorphism(&h, Automorphism::digit_shift(&h, d, c).unwrap()));
            }
            for b in 1..n {
                assert!(is_automorphism(&h, Automorphism::swap_digits(&h, d, b).unwrap()));
            }
        }
        assert!(Automorphism::digit_shift(&h, 0, 1).is_err());
        assert!(Automorphism::swap_digits(&h, 0, 1).is_err());
    }
}

fn vertex_in(n: usize) -> impl Strategy<Value = Vertex> {
    (0..4u32.pow(n as u32)).prop_map(move |c| Vertex::from_code(n, c))
}

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

proptest! {
    #[test]
    fn neighbor_steps_invert(
        (n, x, j) in (1usize..=6).prop_flat_map(|n| (Just(n), vertex_in(n), 0..n)),
        s in sign(),
    ) {
        let h = cube(n);
        let w = h.neighbor(x, j, s).unwrap();
        let back = if s == Sign::Plus { Sign::Minus } else { Sign::Plus };
        prop_assert_eq!(h.neighbor(w, j, back).unwrap(), x);
        prop_assert_eq!(h.edge_dimension(x, w).unwrap(), j);
    }

    #[test]
    fn labels_round_trip((n, x) in (1usize..=8).prop_flat_map(|n| (Just(n), vertex_in(n)))) {
        let label = x.to_string();
        prop_assert_eq!(label.len(), n);
        prop_assert_eq!(Vertex::parse(&label, n).unwrap(), x);
    }

    #[test]
    fn edges_are_order_independent(
        (n, x, j) in (1usize..=6).prop_flat_map(|n| (Just(n), vertex_in(n), 0..n)),
        s in sign(),
    ) {
        let h = cube(n);
        let w = h.neighbor(x, j, s).unwrap();
        let e = Edge::new(x, w).unwrap();
        prop_assert_eq!(e, Edge::new(w, x).unwrap());
        let (a, b) = e.oriented();
        prop_assert!(a.is_even() && !b.is_even());
    }

    #[test]
    fn relabelings_preserve_adjacency(
        (n, x, y, d, b, c) in (2usize..=6).prop_flat_map(|n| (Just(n), vertex_in(n), vertex_in(n), 1..n, 1..n, 0u8..4)),
    ) {
        let h = cube(n);
        let shift = Automorphism::digit_shift(&h, d, c).unwrap();
        let swap = Automorphism::swap_digits(&h, d, b).unwrap();
        for a in [shift, swap] {
            prop_assert_eq!(h.is_edge(x, y), h.is_edge(a.apply(x), a.apply(y)));
            prop_assert_eq!(a.apply(x).parity(), x.parity());
        }
    }
}
