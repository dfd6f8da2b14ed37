//! Faults, prescribed linear forests, endpoint compatibility and block-wise
//! restriction of an instance.

use crate::topology::{BalancedHypercube, Edge, PartitionView, TopologyError, Vertex};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstraintError {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("not a linear forest: {0}")]
    NotAForest(String),
    #[error("|F| + |E(L)| = {used} exceeds the budget {budget}")]
    BudgetExceeded { used: usize, budget: usize },
    #[error("edge {0} is both faulty and prescribed")]
    FaultForestOverlap(Edge),
    #[error("endpoints {0} and {1} lie in the same part")]
    SameParityEndpoints(Vertex, Vertex),
    #[error("endpoints {0} and {1} are not compatible with the prescribed forest")]
    Incompatible(Vertex, Vertex),
    #[error("vertex or edge {0} does not belong to BH_{1}")]
    DimensionMismatch(String, usize),
}

/// A vertex-disjoint union of paths, stored as its edge set.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct LinearForest {
    edges: BTreeSet<Edge>,
    adj: BTreeMap<Vertex, Vec<Vertex>>,
}

impl fmt::Debug for LinearForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.edges.iter()).finish()
    }
}

/// Checks the linear-forest rules and builds the forest.
pub fn validate_linear_forest<I>(edges: I) -> Result<LinearForest, ConstraintError>
where
    I: IntoIterator<Item = Edge>,
{
    let mut forest = LinearForest::default();
    for e in edges {
        forest.insert(e)?;
    }
    Ok(forest)
}

impl LinearForest {
    pub fn empty() -> Self {
        LinearForest::default()
    }

    fn insert(&mut self, e: Edge) -> Result<(), ConstraintError> {
        if self.edges.contains(&e) {
            return Ok(());
        }
        let (a, b) = e.endpoints();
        for x in [a, b] {
            if self.degree(x) >= 2 {
                return Err(ConstraintError::NotAForest(format!("vertex {x} would have degree 3")));
            }
        }
        if self.degree(a) == 1 && self.degree(b) == 1 && self.far_end(a) == Some(b) {
            return Err(ConstraintError::NotAForest(format!("edge {e} closes a cycle")));
        }
        self.edges.insert(e);
        self.adj.entry(a).or_default().push(b);
        self.adj.entry(b).or_default().push(a);
        Ok(())
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.edges.contains(e)
    }

    pub fn has_edge(&self, x: Vertex, y: Vertex) -> bool {
        self.adj.get(&x).is_some_and(|ns| ns.contains(&y))
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj.get(&v).map_or(0, Vec::len)
    }

    /// True when `v` is incident with some edge of the forest.
    pub fn touches(&self, v: Vertex) -> bool {
        self.degree(v) > 0
    }

    pub fn is_internal(&self, v: Vertex) -> bool {
        self.degree(v) == 2
    }

    pub fn is_end(&self, v: Vertex) -> bool {
        self.degree(v) == 1
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        self.adj.get(&v).map_or(&[], Vec::as_slice)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.adj.keys().copied()
    }

    fn other_neighbor(&self, x: Vertex, not: Vertex) -> Vertex {
        let ns = &self.adj[&x];
        if ns[0] == not {
            ns[1]
        } else {
            ns[0]
        }
    }

    /// For an end vertex, the other end of its maximal path.
    pub fn far_end(&self, v: Vertex) -> Option<Vertex> {
        if self.degree(v) != 1 {
            return None;
        }
        let mut prev = v;
        let mut cur = self.adj[&v][0];
        loop {
            let ns = &self.adj[&cur];
            match ns.iter().find(|&&w| w != prev) {
                Some(&next) if ns.len() == 2 => {
                    prev = cur;
                    cur = next;
                }
                _ => return Some(cur),
            }
        }
    }

    /// The maximal path through `v`, listed from its lexicographically smaller end.
    pub fn path_through(&self, v: Vertex) -> Option<Vec<Vertex>> {
        if !self.touches(v) {
            return None;
        }
        let mut start = v;
        if self.degree(v) == 2 {
            let mut prev = v;
            start = self.adj[&v][0];
            while self.degree(start) == 2 {
                let next = self.other_neighbor(start, prev);
                prev = start;
                start = next;
            }
        }
        let mut path = vec![start, self.adj[&start][0]];
        while self.degree(path[path.len() - 1]) == 2 {
            let k = path.len();
            path.push(self.other_neighbor(path[k - 1], path[k - 2]));
        }
        if path.len() > 1 && path[path.len() - 1] < path[0] {
            path.reverse();
        }
        Some(path)
    }

    /// All maximal paths, each from its smaller end, sorted.
    pub fn maximal_paths(&self) -> Vec<Vec<Vertex>> {
        let mut out = Vec::new();
        for (&v, ns) in &self.adj {
            if ns.len() == 1 {
                let p = self.path_through(v).expect("end vertex lies on a path");
                if p[0] == v {
                    out.push(p);
                }
            }
        }
        out.sort();
        out
    }

    /// True when adding `e` keeps a linear forest (and `e` is new).
    pub fn can_add(&self, e: &Edge) -> bool {
        let (a, b) = e.endpoints();
        !self.edges.contains(e)
            && self.degree(a) < 2
            && self.degree(b) < 2
            && !(self.degree(a) == 1 && self.far_end(a) == Some(b))
    }

    pub fn with_edge(&self, e: Edge) -> Result<LinearForest, ConstraintError> {
        let mut out = self.clone();
        out.insert(e)?;
        Ok(out)
    }

    pub fn without_edge(&self, e: &Edge) -> LinearForest {
        validate_linear_forest(self.edges.iter().copied().filter(|x| x != e))
            .expect("sub-forest of a forest")
    }

    /// Image of the forest under a vertex map that preserves adjacency.
    pub fn map(&self, f: impl Fn(Vertex) -> Vertex) -> LinearForest {
        validate_linear_forest(
            self.edges
                .iter()
                .map(|e| Edge::new(f(e.a()), f(e.b())).expect("map preserves adjacency")),
        )
        .expect("isomorphic image of a forest")
    }
}

/// `{u, v}` is compatible with `L` when neither is internal and no maximal
/// path of `L` has both of them as its ends.
pub fn compatible(forest: &LinearForest, u: Vertex, v: Vertex) -> bool {
    !forest.is_internal(u) && !forest.is_internal(v) && forest.far_end(u) != Some(v)
}

/// A hamiltonian path problem: faults `F`, prescribed forest `L`, endpoints.
#[derive(Clone, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    faults: BTreeSet<Edge>,
    forest: LinearForest,
    u: Vertex,
    v: Vertex,
}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Instance {{ n: {}, F: {:?}, L: {:?}, u: {}, v: {} }}",
            self.n, self.faults, self.forest, self.u, self.v
        )
    }
}

/// Validates an instance under the budget `|F| + |E(L)| <= 2n - 2`.
pub fn validate_instance<F, L>(n: usize, faults: F, prescribed: L, u: Vertex, v: Vertex) -> Result<Instance, ConstraintError>
where
    F: IntoIterator<Item = Edge>,
    L: IntoIterator<Item = Edge>,
{
    let inst = Instance::relaxed(n, faults, prescribed, u, v)?;
    let budget = Instance::budget_for(n);
    if inst.load() > budget {
        return Err(ConstraintError::BudgetExceeded {
            used: inst.load(),
            budget,
        });
    }
    Ok(inst)
}

impl Instance {
    /// Validates every instance rule except the budget. Used where larger
    /// fault or forest sets are deliberately explored.
    pub fn relaxed<F, L>(n: usize, faults: F, prescribed: L, u: Vertex, v: Vertex) -> Result<Instance, ConstraintError>
    where
        F: IntoIterator<Item = Edge>,
        L: IntoIterator<Item = Edge>,
    {
        let h = BalancedHypercube::new(n)?;
        for x in [u, v] {
            if !h.contains(x) {
                return Err(ConstraintError::DimensionMismatch(x.to_string(), n));
            }
        }
        let faults: BTreeSet<Edge> = faults.into_iter().collect();
        let prescribed: Vec<Edge> = prescribed.into_iter().collect();
        for e in faults.iter().chain(&prescribed) {
            if e.a().n() != n {
                return Err(ConstraintError::DimensionMismatch(e.to_string(), n));
            }
        }
        let forest = validate_linear_forest(prescribed)?;
        if let Some(e) = forest.edges().iter().find(|e| faults.contains(e)) {
            return Err(ConstraintError::FaultForestOverlap(*e));
        }
        if u.parity() == v.parity() {
            return Err(ConstraintError::SameParityEndpoints(u, v));
        }
        let (u, v) = if u.is_even() { (u, v) } else { (v, u) };
        if !compatible(&forest, u, v) {
            return Err(ConstraintError::Incompatible(u, v));
        }
        Ok(Instance {
            n,
            faults,
            forest,
            u,
            v,
        })
    }

    pub fn budget_for(n: usize) -> usize {
        2 * n - 2
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn graph(&self) -> BalancedHypercube {
        BalancedHypercube::new(self.n).expect("validated dimension")
    }

    pub fn faults(&self) -> &BTreeSet<Edge> {
        &self.faults
    }

    pub fn forest(&self) -> &LinearForest {
        &self.forest
    }

    /// The even endpoint.
    pub fn u(&self) -> Vertex {
        self.u
    }

    /// The odd endpoint.
    pub fn v(&self) -> Vertex {
        self.v
    }

    pub fn load(&self) -> usize {
        self.faults.len() + self.forest.len()
    }

    pub fn within_budget(&self) -> bool {
        self.load() <= Instance::budget_for(self.n)
    }

    pub fn is_fault(&self, x: Vertex, y: Vertex) -> bool {
        Edge::new(x, y).is_ok_and(|e| self.faults.contains(&e))
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceRecord {
    n: usize,
    faults: Vec<Edge>,
    prescribed: Vec<Edge>,
    u: Vertex,
    v: Vertex,
}

impl Serialize for Instance {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        InstanceRecord {
            n: self.n,
            faults: self.faults.iter().copied().collect(),
            prescribed: self.forest.edges().iter().copied().collect(),
            u: self.u,
            v: self.v,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Instance {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let r = InstanceRecord::deserialize(deserializer)?;
        Instance::relaxed(r.n, r.faults, r.prescribed, r.u, r.v).map_err(serde::de::Error::custom)
    }
}

/// Prescribed and faulty edges inside one block.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Block {
    pub forest: LinearForest,
    pub faults: BTreeSet<Edge>,
}

impl Block {
    /// `|E(L_i)| + |F_i|`.
    pub fn load(&self) -> usize {
        self.forest.len() + self.faults.len()
    }

    /// True when `x` is incident with an edge of `L_i` or `F_i`.
    pub fn touches(&self, x: Vertex) -> bool {
        self.forest.touches(x) || self.faults.iter().any(|e| e.contains(x))
    }
}

/// The restriction of an instance to the four blocks of a partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockData {
    pub blocks: [Block; 4],
    /// Prescribed edges between blocks.
    pub lc: BTreeSet<Edge>,
    /// Faulty edges between blocks.
    pub fc: BTreeSet<Edge>,
}

impl BlockData {
    pub fn load(&self, i: u8) -> usize {
        self.blocks[usize::from(i % 4)].load()
    }

    pub fn block(&self, i: u8) -> &Block {
        &self.blocks[usize::from(i % 4)]
    }

    pub fn loads(&self) -> [usize; 4] {
        [self.load(0), self.load(1), self.load(2), self.load(3)]
    }
}

/// Splits `F` and `E(L)` into per-block parts and crossing parts.
pub fn restrict(inst: &Instance, view: &PartitionView) -> BlockData {
    let mut blocks: [Block; 4] = Default::default();
    let mut lc = BTreeSet::new();
    let mut fc = BTreeSet::new();
    let mut block_forest_edges: [Vec<Edge>; 4] = Default::default();
    for e in inst.forest().edges() {
        if view.is_crossing(e) {
            lc.insert(*e);
        } else {
            block_forest_edges[usize::from(view.block_of(e.a()))].push(*e);
        }
    }
    for e in inst.faults() {
        if view.is_crossing(e) {
            fc.insert(*e);
        } else {
            blocks[usize::from(view.block_of(e.a()))].faults.insert(*e);
        }
    }
    for (b, edges) in blocks.iter_mut().zip(block_forest_edges) {
        b.forest = validate_linear_forest(edges).expect("sub-forest of a forest");
    }
    BlockData { blocks, lc, fc }
}
