//! Exhaustive backtracking oracles.
//!
//! Everything reduces to [`path_cover`]: find vertex-disjoint paths joining
//! given endpoint pairs that together cover every non-excluded vertex, avoid
//! faulty edges and traverse every required edge.

use crate::constraints::{compatible, validate_linear_forest, Instance, LinearForest};
use crate::topology::{BalancedHypercube, Edge, Vertex};
use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;
/// Environment variable overriding [`DEFAULT_NODE_BUDGET`].
pub const NODE_BUDGET_ENV: &str = "BHCUBE_NODE_BUDGET";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("search budget of {budget} expansions exceeded")]
    SearchBudgetExceeded { budget: u64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub node_budget: u64,
    /// Forced-edge propagation and degree pruning. Disabling it gives a plain
    /// enumeration used to cross-check the pruned search.
    pub prune: bool,
}

impl Default for SearchLimits {
    fn default() -> Self {
        let node_budget = std::env::var(NODE_BUDGET_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(DEFAULT_NODE_BUDGET);
        SearchLimits {
            node_budget,
            prune: true,
        }
    }
}

impl SearchLimits {
    pub fn with_budget(node_budget: u64) -> Self {
        SearchLimits {
            node_budget,
            prune: true,
        }
    }

    pub fn unpruned(self) -> Self {
        SearchLimits {
            prune: false,
            ..self
        }
    }
}

/// An ordered vertex sequence claimed to be a hamiltonian path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HamPath(pub Vec<Vertex>);

impl HamPath {
    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Vertex> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Vertex> {
        self.0.last().copied()
    }
}

/// A general path-cover query on `BH_n`.
#[derive(Debug, Clone, Default)]
pub struct CoverProblem {
    pub n: usize,
    pub excluded: BTreeSet<Vertex>,
    pub faults: BTreeSet<Edge>,
    pub required: Vec<Edge>,
    /// `(start, end)` of each path; `start == end` asks for a single vertex.
    pub pairs: Vec<(Vertex, Vertex)>,
}

const NONE: u32 = u32::MAX;

struct Search<'a> {
    adj: Vec<Vec<u32>>,
    req: Vec<Vec<u32>>,
    owner: Vec<u32>,
    visited: Vec<bool>,
    remaining: usize,
    pairs: &'a [(u32, u32)],
    paths: Vec<Vec<u32>>,
    required: &'a [(u32, u32)],
    nodes: u64,
    limits: SearchLimits,
}

impl Search<'_> {
    fn visit(&mut self, x: u32) {
        self.visited[x as usize] = true;
        self.remaining -= 1;
    }

    fn unvisit(&mut self, x: u32) {
        self.visited[x as usize] = false;
        self.remaining += 1;
    }

    fn need(&self, z: u32) -> usize {
        match self.owner[z as usize] {
            NONE => 2,
            k => {
                let (s, t) = self.pairs[k as usize];
                if s == t {
                    0
                } else {
                    1
                }
            }
        }
    }

    /// Every unvisited neighbor of `closed` still has enough open neighbors.
    fn degrees_ok(&self, closed: u32, head: u32) -> bool {
        self.adj[closed as usize].iter().all(|&z| {
            if self.visited[z as usize] {
                return true;
            }
            let avail = self.adj[z as usize]
                .iter()
                .filter(|&&y| !self.visited[y as usize] || y == head)
                .count();
            avail >= self.need(z)
        })
    }

    fn required_satisfied(&self) -> bool {
        self.required.iter().all(|&(a, b)| {
            self.paths.iter().any(|p| p.windows(2).any(|w| (w[0] == a && w[1] == b) || (w[0] == b && w[1] == a)))
        })
    }

    fn dfs(&mut self, k: usize) -> Result<bool, SolverError> {
        self.nodes += 1;
        if self.nodes > self.limits.node_budget {
            return Err(SolverError::SearchBudgetExceeded {
                budget: self.limits.node_budget,
            });
        }
        let prune = self.limits.prune;
        let (s, t) = self.pairs[k];
        let len = self.paths[k].len();
        let head = self.paths[k][len - 1];
        let prev = if len >= 2 { self.paths[k][len - 2] } else { NONE };

        if head == t && (len > 1 || s == t) {
            if prune && self.req[head as usize].iter().any(|&r| r != prev) {
                return Ok(false);
            }
            if k + 1 == self.pairs.len() {
                return Ok(self.remaining == 0 && (prune || self.required_satisfied()));
            }
            let next = self.pairs[k + 1].0;
            if self.visited[next as usize] {
                return Ok(false);
            }
            if prune && !self.degrees_ok(head, next) {
                return Ok(false);
            }
            self.visit(next);
            self.paths[k + 1].push(next);
            if self.dfs(k + 1)? {
                return Ok(true);
            }
            self.paths[k + 1].pop();
            self.unvisit(next);
            return Ok(false);
        }

        let mut forced = NONE;
        if prune {
            let pending: Vec<u32> = self.req[head as usize].iter().copied().filter(|&r| r != prev).collect();
            match pending.len() {
                0 => {}
                1 => forced = pending[0],
                _ => return Ok(false),
            }
        }
        let candidates: Vec<u32> = if forced != NONE {
            vec![forced]
        } else {
            self.adj[head as usize].clone()
        };
        for w in candidates {
            if self.visited[w as usize] {
                continue;
            }
            let own = self.owner[w as usize];
            if own != NONE && (own as usize != k || w != t) {
                continue;
            }
            if prune {
                // A non-required step into `w` leaves at most one required
                // edge of `w` to follow; the target may not have any left.
                let wreq = &self.req[w as usize];
                if w == t {
                    if wreq.iter().any(|&r| r != head) {
                        continue;
                    }
                } else if w != forced && wreq.len() > 1 {
                    continue;
                }
            }
            self.visit(w);
            self.paths[k].push(w);
            let ok = !prune || self.degrees_ok(head, w);
            if ok && self.dfs(k)? {
                return Ok(true);
            }
            self.paths[k].pop();
            self.unvisit(w);
        }
        Ok(false)
    }
}

/// Solves a [`CoverProblem`]; `Ok(None)` only after the search space is exhausted.
pub fn path_cover(p: &CoverProblem, limits: SearchLimits) -> Result<Option<Vec<Vec<Vertex>>>, SolverError> {
    let h = BalancedHypercube::new(p.n).map_err(|e| SolverError::Precondition(e.to_string()))?;
    let size = h.vertex_count();
    if p.pairs.is_empty() {
        return Err(SolverError::Precondition("no endpoint pairs".into()));
    }
    let mut allowed = vec![true; size];
    for x in &p.excluded {
        if !h.contains(*x) {
            return Err(SolverError::Precondition(format!("vertex {x} not in BH_{}", p.n)));
        }
        allowed[x.code() as usize] = false;
    }
    let mut owner = vec![NONE; size];
    for (k, &(s, t)) in p.pairs.iter().enumerate() {
        for x in [s, t] {
            if !h.contains(x) || !allowed[x.code() as usize] {
                return Err(SolverError::Precondition(format!("endpoint {x} unavailable")));
            }
            let o = owner[x.code() as usize];
            if o != NONE && (o as usize != k || s != t) {
                return Err(SolverError::Precondition(format!("endpoint {x} used twice")));
            }
            owner[x.code() as usize] = k as u32;
        }
    }
    let forest = match validate_linear_forest(p.required.iter().copied()) {
        Ok(f) => f,
        Err(_) => return Ok(None),
    };
    let mut req = vec![Vec::new(); size];
    let mut required = Vec::new();
    for e in forest.edges() {
        let (a, b) = (e.a().code(), e.b().code());
        if p.faults.contains(e) || !allowed[a as usize] || !allowed[b as usize] {
            return Ok(None);
        }
        req[a as usize].push(b);
        req[b as usize].push(a);
        required.push((a, b));
    }
    let mut adj = vec![Vec::new(); size];
    for x in h.vertices() {
        if !allowed[x.code() as usize] {
            continue;
        }
        let mut ns: Vec<u32> = h
            .neighbors(x)
            .into_iter()
            .filter(|w| allowed[w.code() as usize] && !p.faults.contains(&Edge::new(x, *w).expect("adjacent")))
            .map(Vertex::code)
            .collect();
        ns.sort_unstable();
        ns.dedup();
        adj[x.code() as usize] = ns;
    }
    let pairs: Vec<(u32, u32)> = p.pairs.iter().map(|&(s, t)| (s.code(), t.code())).collect();
    let remaining = allowed.iter().filter(|&&a| a).count();
    let mut search = Search {
        adj,
        req,
        owner,
        visited: vec![false; size],
        remaining,
        pairs: &pairs,
        paths: vec![Vec::new(); pairs.len()],
        required: &required,
        nodes: 0,
        limits,
    };
    let s0 = pairs[0].0;
    search.visit(s0);
    search.paths[0].push(s0);
    if search.dfs(0)? {
        let out = search
            .paths
            .iter()
            .map(|p| p.iter().map(|&c| Vertex::from_code(h.n(), c)).collect())
            .collect();
        Ok(Some(out))
    } else {
        Ok(None)
    }
}

/// Hamiltonian path of `BH_n - F` from `u` to `v` through every edge of `L`.
pub fn ham_path(
    h: &BalancedHypercube,
    faults: &BTreeSet<Edge>,
    forest: &LinearForest,
    u: Vertex,
    v: Vertex,
    limits: SearchLimits,
) -> Result<Option<HamPath>, SolverError> {
    if u == v {
        return Err(SolverError::Precondition("endpoints coincide".into()));
    }
    let problem = CoverProblem {
        n: h.n(),
        excluded: BTreeSet::new(),
        faults: faults.clone(),
        required: forest.edges().iter().copied().collect(),
        pairs: vec![(u, v)],
    };
    Ok(path_cover(&problem, limits)?.map(|mut ps| HamPath(ps.remove(0))))
}

/// Oracle solve of a validated instance.
pub fn solve_instance(inst: &Instance, limits: SearchLimits) -> Result<Option<HamPath>, SolverError> {
    ham_path(&inst.graph(), inst.faults(), inst.forest(), inst.u(), inst.v(), limits)
}

/// Hamiltonian cycle of `BH_n - F` through every edge of `L`, listed without
/// repeating the first vertex.
pub fn ham_cycle_through(
    h: &BalancedHypercube,
    faults: &BTreeSet<Edge>,
    forest: &LinearForest,
    limits: SearchLimits,
) -> Result<Option<Vec<Vertex>>, SolverError> {
    let mut problem = CoverProblem {
        n: h.n(),
        excluded: BTreeSet::new(),
        faults: faults.clone(),
        required: Vec::new(),
        pairs: Vec::new(),
    };
    if let Some(first) = forest.edges().iter().next().copied() {
        problem.required = forest.edges().iter().copied().filter(|e| *e != first).collect();
        problem.pairs = vec![(first.a(), first.b())];
        return Ok(path_cover(&problem, limits)?.map(|mut ps| ps.remove(0)));
    }
    let start = Vertex::from_code(h.n(), 0);
    for w in h.neighbors(start).into_iter().sorted().dedup() {
        let e = Edge::new(start, w).expect("adjacent");
        if faults.contains(&e) {
            continue;
        }
        problem.pairs = vec![(start, w)];
        if let Some(mut ps) = path_cover(&problem, limits)? {
            return Ok(Some(ps.remove(0)));
        }
    }
    Ok(None)
}

pub type PathPair = (Vec<Vertex>, Vec<Vertex>);

/// Two vertex-disjoint paths `P[u,v]` and `P[x,y]` covering `BH_n`, with
/// `u, x` even and `v, y` odd.
pub fn two_path_cover(
    h: &BalancedHypercube,
    u: Vertex,
    v: Vertex,
    x: Vertex,
    y: Vertex,
    limits: SearchLimits,
) -> Result<Option<PathPair>, SolverError> {
    if !(u.is_even() && x.is_even() && !v.is_even() && !y.is_even()) {
        return Err(SolverError::Precondition("expected u, x even and v, y odd".into()));
    }
    if u == x || v == y {
        return Err(SolverError::Precondition("endpoints must be distinct".into()));
    }
    let problem = CoverProblem {
        n: h.n(),
        pairs: vec![(u, v), (x, y)],
        ..CoverProblem::default()
    };
    Ok(path_cover(&problem, limits)?.map(|mut ps| {
        let second = ps.pop().expect("two paths");
        (ps.pop().expect("two paths"), second)
    }))
}

/// Hamiltonian path of `BH_n - w` between `x` and `y`, where `x, y` lie in the
/// part opposite to `w`.
pub fn ham_path_minus_vertex(
    h: &BalancedHypercube,
    w: Vertex,
    x: Vertex,
    y: Vertex,
    limits: SearchLimits,
) -> Result<Option<HamPath>, SolverError> {
    if x == y || x.parity() != y.parity() || w.parity() == x.parity() {
        return Err(SolverError::Precondition(
            "expected distinct x, y in the part opposite to w".into(),
        ));
    }
    let problem = CoverProblem {
        n: h.n(),
        excluded: [w].into_iter().collect(),
        pairs: vec![(x, y)],
        ..CoverProblem::default()
    };
    Ok(path_cover(&problem, limits)?.map(|mut ps| HamPath(ps.remove(0))))
}

/// Result of an exhaustive certification run.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CertReport {
    pub n: usize,
    pub k: usize,
    pub instances_checked: usize,
    pub failures: Vec<Instance>,
    /// Instances where the node budget ran out before a verdict.
    pub inconclusive: Vec<Instance>,
}

impl CertReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty() && self.inconclusive.is_empty()
    }
}

/// Every linear forest in `BH_n - F` with at most `max_edges` edges.
pub fn linear_forests(edges: &[Edge], max_edges: usize) -> Vec<LinearForest> {
    let mut out = Vec::new();
    for size in 0..=max_edges.min(edges.len()) {
        for combo in edges.iter().copied().combinations(size) {
            if let Ok(f) = validate_linear_forest(combo) {
                out.push(f);
            }
        }
    }
    out
}

fn certify_one(inst: &Instance, limits: SearchLimits) -> Option<bool> {
    match solve_instance(inst, limits) {
        Ok(Some(_)) => Some(true),
        Ok(None) => Some(false),
        Err(_) => None,
    }
}

/// Enumerates every fault set `F`, linear forest `L` in `BH_n - F` with
/// `|F| + |E(L)| <= k`, and compatible even/odd endpoint pair, and records the
/// instances without a hamiltonian path.
pub fn certify(n: usize, k: usize, limits: SearchLimits) -> Result<CertReport, SolverError> {
    let h = BalancedHypercube::new(n).map_err(|e| SolverError::Precondition(e.to_string()))?;
    let edges = h.edges();
    let evens: Vec<Vertex> = h.vertices().filter(|x| x.is_even()).collect();
    let odds: Vec<Vertex> = h.vertices().filter(|x| !x.is_even()).collect();
    let mut jobs: Vec<(BTreeSet<Edge>, LinearForest)> = Vec::new();
    for nf in 0..=k.min(edges.len()) {
        for faults in edges.iter().copied().combinations(nf) {
            let faults: BTreeSet<Edge> = faults.into_iter().collect();
            let free: Vec<Edge> = edges.iter().copied().filter(|e| !faults.contains(e)).collect();
            for forest in linear_forests(&free, k - nf) {
                jobs.push((faults.clone(), forest));
            }
        }
    }
    let results: Vec<(usize, Vec<Instance>, Vec<Instance>)> = jobs
        .par_iter()
        .map(|(faults, forest)| {
            let mut checked = 0;
            let mut failed = Vec::new();
            let mut unknown = Vec::new();
            for &u in &evens {
                for &v in &odds {
                    if !compatible(forest, u, v) {
                        continue;
                    }
                    let inst = Instance::relaxed(n, faults.iter().copied(), forest.edges().iter().copied(), u, v)
                        .expect("enumerated instance is well formed");
                    checked += 1;
                    match certify_one(&inst, limits) {
                        Some(true) => {}
                        Some(false) => failed.push(inst),
                        None => unknown.push(inst),
                    }
                }
            }
            (checked, failed, unknown)
        })
        .collect();
    let mut report = CertReport {
        n,
        k,
        ..CertReport::default()
    };
    for (checked, failed, unknown) in results {
        report.instances_checked += checked;
        report.failures.extend(failed);
        report.inconclusive.extend(unknown);
    }
    Ok(report)
}

/// Certification over a seeded sample of instances, for sizes where full
/// enumeration is out of reach.
pub fn certify_sampled(n: usize, k: usize, samples: usize, seed: u64, limits: SearchLimits) -> Result<CertReport, SolverError> {
    let instances: Vec<Instance> = (0..samples as u64)
        .map(|i| crate::harness::gen_random_instance(n, k, seed.wrapping_add(i)))
        .collect::<Result<_, _>>()
        .map_err(|e| SolverError::Precondition(e.to_string()))?;
    let verdicts: Vec<Option<bool>> = instances.par_iter().map(|inst| certify_one(inst, limits)).collect();
    let mut report = CertReport {
        n,
        k,
        instances_checked: instances.len(),
        ..CertReport::default()
    };
    for (inst, verdict) in instances.into_iter().zip(verdicts) {
        match verdict {
            Some(true) => {}
            Some(false) => report.failures.push(inst),
            None => report.inconclusive.push(inst),
        }
    }
    Ok(report)
}
