//! Hamiltonian cycles and paths of a block whose load exceeds the budget of
//! `BH_{n-1}`. Everything here works in block coordinates: `m = n - 1` is the
//! block dimension and the budget of the whole instance is `2m`.

use super::{solve_sub, ConstructError, ConstructOptions};
use crate::constraints::LinearForest;
use crate::solvers::{ham_cycle_through, HamPath};
use crate::topology::{BalancedHypercube, Edge, Vertex};
use std::collections::BTreeSet;

/// Block dimension up to which the exhaustive oracle stands in for cited
/// cycle results.
pub const ORACLE_LEVEL: usize = 3;

/// A hamiltonian cycle of a block, listed without repeating its first vertex.
/// `forced` is a withheld fault lying on the cycle, which every cut must
/// include.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tour {
    pub cycle: Vec<Vertex>,
    pub forced: Option<Edge>,
}

impl Tour {
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        let k = self.cycle.len();
        (0..k).map(move |i| (self.cycle[i], self.cycle[(i + 1) % k]))
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.edges().any(|(a, b)| e.contains(a) && e.contains(b))
    }
}

/// Hamiltonian cycle of `BH_m - faults` through `forest` with
/// `|E(forest)| + |faults| = 2m - 1`. The cycle closes an edge `pivot` of
/// the forest (its first edge by default) onto a recursive path between the
/// pivot's ends.
pub fn hcycle_block(
    m: usize,
    forest: &LinearForest,
    faults: &BTreeSet<Edge>,
    pivot: Option<Edge>,
    opts: &ConstructOptions,
) -> Result<Vec<Vertex>, ConstructError> {
    let load = forest.len() + faults.len();
    if load + 1 != 2 * m {
        return Err(ConstructError::Precondition(format!(
            "cycle needs block load {}, got {load}",
            2 * m - 1
        )));
    }
    let pivot = match pivot.or_else(|| forest.edges().iter().next().copied()) {
        Some(p) if forest.contains_edge(&p) => p,
        Some(p) => return Err(ConstructError::Precondition(format!("pivot {p} is not prescribed"))),
        None => return Err(ConstructError::Precondition("cycle needs a prescribed edge".into())),
    };
    let (a, b) = pivot.oriented();
    solve_sub(m, faults, &forest.without_edge(&pivot), a, b, opts)
}

fn oracle_cycle(m: usize, forest: &LinearForest, faults: &BTreeSet<Edge>, opts: &ConstructOptions) -> Result<Vec<Vertex>, ConstructError> {
    if m > ORACLE_LEVEL {
        return Err(ConstructError::UnsupportedCase(format!(
            "fault-only hamiltonian cycle of BH_{m}"
        )));
    }
    let h = BalancedHypercube::new(m).map_err(|e| ConstructError::Precondition(e.to_string()))?;
    ham_cycle_through(&h, faults, forest, opts.limits)?.ok_or(ConstructError::Infeasible)
}

/// Cycle for load `2m - 1`, falling back to the oracle when the forest is
/// empty.
fn cycle_any(
    m: usize,
    forest: &LinearForest,
    faults: &BTreeSet<Edge>,
    pivot: Option<Edge>,
    opts: &ConstructOptions,
) -> Result<Vec<Vertex>, ConstructError> {
    if forest.is_empty() {
        oracle_cycle(m, forest, faults, opts)
    } else {
        hcycle_block(m, forest, faults, pivot, opts)
    }
}

/// Hamiltonian path `P[a, b]` of `BH_m - faults` through `forest` when the
/// load is exactly `2m`. One fault `f` is withheld, a cycle is built for the
/// rest, and `f` is removed from it if present, otherwise some edge outside
/// the forest. Returns the path with `a` even and `b` odd.
pub fn hpath_from_faulty_block(
    m: usize,
    forest: &LinearForest,
    faults: &BTreeSet<Edge>,
    opts: &ConstructOptions,
) -> Result<(HamPath, Vertex, Vertex), ConstructError> {
    if forest.len() + faults.len() != 2 * m {
        return Err(ConstructError::Precondition(format!(
            "path needs block load {}, got {}",
            2 * m,
            forest.len() + faults.len()
        )));
    }
    let f = *faults
        .iter()
        .next()
        .ok_or_else(|| ConstructError::Precondition("no fault to withhold".into()))?;
    let mut rest = faults.clone();
    rest.remove(&f);
    let cycle = cycle_any(m, forest, &rest, None, opts)?;
    let tour = Tour { cycle, forced: None };
    let cut = tour
        .edges()
        .find(|&(a, b)| f.contains(a) && f.contains(b))
        .or_else(|| {
            tour.edges()
                .find(|&(a, b)| !forest.has_edge(a, b))
        })
        .ok_or_else(|| ConstructError::ConstructionFailure {
            context: "every cycle edge is prescribed".into(),
        })?;
    let k = tour.cycle.len();
    let at = tour.cycle.iter().position(|x| *x == cut.1).expect("cycle vertex");
    let mut path: Vec<Vertex> = (0..k).map(|i| tour.cycle[(at + i) % k]).collect();
    if !path[0].is_even() {
        path.reverse();
    }
    let (a, b) = (path[0], path[k - 1]);
    Ok((HamPath(path), a, b))
}

/// The `idx`-th cycle of an overloaded block, or `None` past the last one.
///
/// At load `2m - 1` the variants close each prescribed edge in turn. At load
/// `2m` each fault is withheld in turn; it becomes the forced cut when the
/// cycle uses it.
pub fn tour_variant(
    m: usize,
    forest: &LinearForest,
    faults: &BTreeSet<Edge>,
    idx: usize,
    opts: &ConstructOptions,
) -> Result<Option<Tour>, ConstructError> {
    let load = forest.len() + faults.len();
    if load + 1 == 2 * m {
        if forest.is_empty() {
            if idx > 0 {
                return Ok(None);
            }
            return Ok(Some(Tour {
                cycle: oracle_cycle(m, forest, faults, opts)?,
                forced: None,
            }));
        }
        let Some(pivot) = forest.edges().iter().nth(idx).copied() else {
            return Ok(None);
        };
        return Ok(Some(Tour {
            cycle: hcycle_block(m, forest, faults, Some(pivot), opts)?,
            forced: None,
        }));
    }
    if load == 2 * m {
        let Some(f) = faults.iter().nth(idx).copied() else {
            return Ok(None);
        };
        let mut rest = faults.clone();
        rest.remove(&f);
        let mut tour = Tour {
            cycle: cycle_any(m, forest, &rest, None, opts)?,
            forced: None,
        };
        if tour.contains_edge(&f) {
            tour.forced = Some(f);
        }
        return Ok(Some(tour));
    }
    Err(ConstructError::Precondition(format!("block load {load} is not overloaded for BH_{m}")))
}
