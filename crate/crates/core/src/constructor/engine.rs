//! Search over block orders and splice vertices.
//!
//! A plan lists the blocks visited by the final path in order. Visit `k` is a
//! segment of block `blocks[k]` running from its entry (variable `2k`) to its
//! exit (variable `2k+1`), and consecutive segments are joined by a crossing
//! edge. Consecutive blocks differ by one, so the parity of every variable is
//! fixed by the plan: an even vertex has both crossing neighbors in the next
//! block and an odd one in the previous block.
//!
//! The search fills in variables and segment paths in a fixed priority order:
//! blocks whose endpoints are all known are solved outright, an overloaded
//! block 0 is covered by cutting one of its hamiltonian cycles into arcs, a
//! block visited twice is split from a single path, and the remaining
//! variables are chosen across crossing edges. Candidate lists come from the
//! selection operations and are capped, so the search is bounded.

use super::heavy::{tour_variant, Tour, ORACLE_LEVEL};
use super::lemmas::{edge_on_path_candidates, extension_neighbor_candidates, LemmaContext};
use super::{solve_sub, CaseTag, ConstructError, ConstructOptions};
use crate::constraints::{compatible, BlockData, Instance, LinearForest};
use crate::solvers::{path_cover, CoverProblem};
use crate::topology::{Edge, Parity, PartitionView, Vertex};
use itertools::Itertools;
use std::collections::{BTreeMap, BTreeSet};

/// An order of block visits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub blocks: Vec<u8>,
    /// Link carrying the prescribed crossing edge.
    pub pin: Option<usize>,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    fn forward(&self, k: usize) -> bool {
        self.blocks[k + 1] == (self.blocks[k] + 1) % 4
    }

    /// Parity forced on variable `var`.
    pub fn parity(&self, var: usize) -> Parity {
        let k = var / 2;
        let m = self.len();
        let even = if var.is_multiple_of(2) {
            k == 0 || !self.forward(k - 1)
        } else {
            k + 1 < m && self.forward(k)
        };
        if even {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Visits of block `b`.
    pub fn visits(&self, b: u8) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.blocks[k] == b).collect()
    }

    /// Every block needs as many even as odd segment ends.
    pub fn balanced(&self) -> bool {
        (0..4u8).all(|b| {
            let even = self
                .visits(b)
                .into_iter()
                .flat_map(|k| [2 * k, 2 * k + 1])
                .filter(|&var| self.parity(var) == Parity::Even)
                .count();
            even == self.visits(b).len()
        })
    }
}

/// The prescribed crossing edge as `(x, x')` with `x` even.
fn pinned_edge(data: &BlockData) -> Option<(Vertex, Vertex)> {
    if data.lc.len() == 1 {
        data.lc.iter().next().map(Edge::oriented)
    } else {
        None
    }
}

/// All plans for a normalized partition, simplest first: fewer segments,
/// then fewer repeated visits, then less load on repeatedly visited light
/// blocks.
pub fn enumerate_plans(inst: &Instance, view: &PartitionView, data: &BlockData, max_segments: usize) -> Vec<Plan> {
    let n = inst.n();
    let heavy = data.load(0) + 3 >= 2 * n;
    let cap = |b: u8| if heavy && b == 0 { 3 } else { 2 };
    let (bu, bv) = (view.block_of(inst.u()), view.block_of(inst.v()));
    let mut walks = Vec::new();
    let mut cur = vec![bu];
    fn grow(cur: &mut Vec<u8>, bv: u8, max: usize, cap: &dyn Fn(u8) -> usize, out: &mut Vec<Vec<u8>>) {
        let last = *cur.last().expect("nonempty walk");
        if last == bv && (0..4u8).all(|b| cur.contains(&b)) {
            out.push(cur.clone());
        }
        if cur.len() == max {
            return;
        }
        for next in [(last + 1) % 4, (last + 3) % 4] {
            if cur.iter().filter(|&&b| b == next).count() < cap(next) {
                cur.push(next);
                grow(cur, bv, max, cap, out);
                cur.pop();
            }
        }
    }
    grow(&mut cur, bv, max_segments, &cap, &mut walks);

    let pin = pinned_edge(data);
    let mut plans = Vec::new();
    for blocks in walks {
        let m = blocks.len();
        let base = Plan { blocks, pin: None };
        if !base.balanced() {
            continue;
        }
        match pin {
            None => plans.push(base),
            Some((x, xp)) => {
                let l = view.block_of(x);
                let crosses = |k: usize| {
                    let (a, b) = (base.blocks[k], base.blocks[k + 1]);
                    (a, b) == (l, (l + 1) % 4) || (a, b) == ((l + 1) % 4, l)
                };
                let ks: Vec<usize> = if x == inst.u() {
                    vec![0]
                } else if xp == inst.v() {
                    vec![m - 2]
                } else {
                    (0..m - 1).collect()
                };
                for k in ks.into_iter().filter(|&k| crosses(k)) {
                    plans.push(Plan {
                        pin: Some(k),
                        ..base.clone()
                    });
                }
            }
        }
    }
    let key = |p: &Plan| {
        let repeats: usize = (0..4u8).map(|b| p.visits(b).len() - 1).sum();
        let repeated_load: usize = (0..4u8)
            .filter(|&b| p.visits(b).len() > 1 && !(heavy && b == 0))
            .map(|b| data.load(b))
            .sum();
        (p.len(), repeats, repeated_load, p.blocks.clone(), p.pin)
    };
    plans.sort_by_key(key);
    plans
}

#[derive(Debug, Clone)]
struct State {
    val: Vec<Option<Vertex>>,
    seg: Vec<Option<Vec<Vertex>>>,
}

enum Stop {
    /// The current plan used up its share of steps.
    PlanBudget,
    Fatal(ConstructError),
}

type Flow = Result<Option<Vec<Vertex>>, Stop>;

/// A tentative assignment: variable values and finished segments.
type Move = (Vec<(usize, Vertex)>, Vec<(usize, Vec<Vertex>)>);

struct Engine<'a> {
    ctx: LemmaContext<'a>,
    view: &'a PartitionView,
    data: &'a BlockData,
    opts: &'a ConstructOptions,
    n: usize,
    heavy: bool,
    pin: Option<(Vertex, Vertex)>,
    steps: usize,
    plan_steps: usize,
    plan_budget: usize,
    singles: BTreeMap<(Vertex, Vertex, Vec<Edge>), Option<Vec<Vertex>>>,
    tours: Vec<Option<Tour>>,
    tours_done: bool,
    budget_err: Option<ConstructError>,
    unsupported: Option<ConstructError>,
    last: Option<String>,
}

/// Runs the search; returns the path in the normalized labeling together
/// with the block order used.
pub fn run(
    inst: &Instance,
    view: &PartitionView,
    data: &BlockData,
    case: CaseTag,
    opts: &ConstructOptions,
) -> Result<(Vec<Vertex>, Vec<u8>), ConstructError> {
    let h = inst.graph();
    let n = inst.n();
    let mut eng = Engine {
        ctx: LemmaContext::new(&h, view, data, inst.u(), inst.v()),
        view,
        data,
        opts,
        n,
        heavy: data.load(0) + 3 >= 2 * n,
        pin: pinned_edge(data),
        steps: 0,
        plan_steps: 0,
        plan_budget: (opts.step_budget / 4).max(200),
        singles: BTreeMap::new(),
        tours: Vec::new(),
        tours_done: false,
        budget_err: None,
        unsupported: None,
        last: None,
    };
    let plans = enumerate_plans(inst, view, data, opts.max_segments);
    for plan in &plans {
        let Some(st) = eng.initial(plan, inst) else {
            continue;
        };
        eng.plan_steps = 0;
        match eng.dfs(plan, st) {
            Ok(Some(path)) => return Ok((path, plan.blocks.clone())),
            Ok(None) | Err(Stop::PlanBudget) => {}
            Err(Stop::Fatal(e)) => return Err(e),
        }
    }
    if let Some(e) = eng.budget_err {
        return Err(e);
    }
    if let Some(e) = eng.unsupported {
        return Err(e);
    }
    Err(ConstructError::ConstructionFailure {
        context: format!(
            "{case:?}, loads {:?}, {} block orders, {} steps, last sub-result: {}",
            data.loads(),
            plans.len(),
            eng.steps,
            eng.last.as_deref().unwrap_or("none")
        ),
    })
}

impl<'a> Engine<'a> {
    fn note(&mut self, e: ConstructError) {
        if e.is_budget() {
            self.budget_err.get_or_insert(e);
        } else if e.is_unsupported() {
            self.unsupported.get_or_insert(e);
        } else {
            self.last = Some(e.to_string());
        }
    }

    fn forest(&self, b: u8) -> &'a LinearForest {
        &self.data.block(b).forest
    }

    fn is_block_fault(&self, b: u8, x: Vertex, y: Vertex) -> bool {
        Edge::new(x, y).is_ok_and(|e| self.data.block(b).faults.contains(&e))
    }

    fn initial(&self, plan: &Plan, inst: &Instance) -> Option<State> {
        let m = plan.len();
        let mut st = State {
            val: vec![None; 2 * m],
            seg: vec![None; m],
        };
        let mut preset = vec![(0, inst.u()), (2 * m - 1, inst.v())];
        if let (Some(k), Some((x, xp))) = (plan.pin, self.pin) {
            if plan.forward(k) {
                preset.extend([(2 * k + 1, x), (2 * k + 2, xp)]);
            } else {
                preset.extend([(2 * k + 1, xp), (2 * k + 2, x)]);
            }
        }
        for (var, x) in preset {
            if !self.admissible(plan, &st, var, x, true) {
                return None;
            }
            st.val[var] = Some(x);
        }
        Some(st)
    }

    /// Whether `x` may be the value of `var` given the current state.
    /// `preset` skips the pin ownership check used for pinned variables.
    fn admissible(&self, plan: &Plan, st: &State, var: usize, x: Vertex, preset: bool) -> bool {
        let k = var / 2;
        let m = plan.len();
        let b = plan.blocks[k];
        if self.view.block_of(x) != b || x.parity() != plan.parity(var) {
            return false;
        }
        let forest = self.forest(b);
        if forest.is_internal(x) {
            return false;
        }
        let sibling = var ^ 1;
        for (w, y) in st.val.iter().enumerate() {
            if w == var || *y != Some(x) {
                continue;
            }
            if w != sibling || forest.touches(x) {
                return false;
            }
        }
        if !preset {
            if let Some((p, q)) = self.pin {
                if x == p || x == q {
                    return false;
                }
            }
        }
        // A segment joining both ends of a prescribed path is that path, which
        // only leaves room for the rest of the block on another visit.
        if let Some(y) = st.val[sibling] {
            if y != x && forest.far_end(x) == Some(y) && plan.visits(b).len() == 1 {
                return false;
            }
        }
        let partner = if var % 2 == 1 {
            (k + 1 < m).then(|| 2 * k + 2)
        } else {
            (k > 0).then(|| 2 * k - 1)
        };
        if let Some(y) = partner.and_then(|w| st.val[w]) {
            if !self.view.crossing(x).contains(&y) {
                return false;
            }
            let e = Edge::new(x, y).expect("crossing neighbors are adjacent");
            if self.data.fc.contains(&e) {
                return false;
            }
        }
        true
    }

    /// Applies a move after checking every new value.
    fn apply(&self, plan: &Plan, st: &State, mv: &Move) -> Option<State> {
        let mut next = st.clone();
        for &(var, x) in &mv.0 {
            match next.val[var] {
                Some(y) if y == x => {}
                Some(_) => return None,
                None => {
                    if !self.admissible(plan, &next, var, x, false) {
                        return None;
                    }
                    next.val[var] = Some(x);
                }
            }
        }
        for (k, path) in &mv.1 {
            if path.first().copied() != next.val[2 * k] || path.last().copied() != next.val[2 * k + 1] {
                return None;
            }
            next.seg[*k] = Some(path.clone());
        }
        Some(next)
    }

    fn try_moves(&mut self, plan: &Plan, st: &State, moves: Vec<Move>) -> Flow {
        for mv in moves {
            if let Some(next) = self.apply(plan, st, &mv) {
                if let Some(p) = self.dfs(plan, next)? {
                    return Ok(Some(p));
                }
            }
        }
        Ok(None)
    }

    fn dfs(&mut self, plan: &Plan, mut st: State) -> Flow {
        self.steps += 1;
        self.plan_steps += 1;
        if self.steps > self.opts.step_budget {
            return Err(Stop::Fatal(ConstructError::ConstructionFailure {
                context: format!("step budget of {} exhausted", self.opts.step_budget),
            }));
        }
        if self.plan_steps > self.plan_budget {
            return Err(Stop::PlanBudget);
        }
        let m = plan.len();

        for b in 0..4u8 {
            if self.heavy && b == 0 {
                continue;
            }
            let segs = plan.visits(b);
            if segs.iter().all(|&k| st.seg[k].is_some()) {
                continue;
            }
            if !segs.iter().all(|&k| st.val[2 * k].is_some() && st.val[2 * k + 1].is_some()) {
                continue;
            }
            let ends: Vec<(Vertex, Vertex)> = segs
                .iter()
                .map(|&k| (st.val[2 * k].expect("known"), st.val[2 * k + 1].expect("known")))
                .collect();
            match self.solve_block(b, &ends) {
                Some(paths) => {
                    for (k, p) in segs.into_iter().zip(paths) {
                        st.seg[k] = Some(p);
                    }
                }
                None => return Ok(None),
            }
        }

        if st.seg.iter().all(Option::is_some) {
            return self.assemble(plan, &st).map(Some);
        }

        if self.heavy && plan.visits(0).iter().any(|&k| st.seg[k].is_none()) {
            return self.heavy_action(plan, &st);
        }

        for b in 0..4u8 {
            if self.heavy && b == 0 {
                continue;
            }
            let segs = plan.visits(b);
            if segs.len() == 2 && segs.iter().any(|&k| st.seg[k].is_none()) {
                let moves = self.cut_moves(plan, &st, b, segs[0], segs[1]);
                if !moves.is_empty() {
                    return self.try_moves(plan, &st, moves);
                }
            }
        }

        for k in 0..m - 1 {
            let (a, c) = (2 * k + 1, 2 * k + 2);
            match (st.val[a], st.val[c]) {
                (Some(x), None) => return self.branch_link(plan, &st, c, x),
                (None, Some(y)) => return self.branch_link(plan, &st, a, y),
                _ => {}
            }
        }
        for k in 0..m - 1 {
            if st.val[2 * k + 1].is_none() && st.val[2 * k + 2].is_none() {
                return self.branch_free(plan, &st, 2 * k + 1);
            }
        }
        Ok(None)
    }

    /// Crossing neighbors of `y` for `var`: clear ones first, `+` before `-`.
    fn branch_link(&mut self, plan: &Plan, st: &State, var: usize, y: Vertex) -> Flow {
        let mut cands: Vec<Vertex> = self
            .view
            .crossing(y)
            .into_iter()
            .filter(|&x| self.admissible(plan, st, var, x, false))
            .collect();
        cands.dedup();
        cands.sort_by_key(|&x| !self.ctx.is_clear(x));
        let moves = cands.into_iter().map(|x| (vec![(var, x)], Vec::new())).collect();
        self.try_moves(plan, st, moves)
    }

    /// An unconstrained exit, ranked by how clear it and its crossing
    /// neighbors are.
    fn branch_free(&mut self, plan: &Plan, st: &State, var: usize) -> Flow {
        let b = plan.blocks[var / 2];
        let mut cands: Vec<Vertex> = self
            .view
            .block_vertices(b)
            .into_iter()
            .filter(|&x| self.admissible(plan, st, var, x, false))
            .collect();
        cands.sort_by_key(|&x| (!self.ctx.is_clear(x), 2 - self.ctx.crossing_clearance(x)));
        cands.truncate(self.opts.free_cap);
        let moves = cands.into_iter().map(|x| (vec![(var, x)], Vec::new())).collect();
        self.try_moves(plan, st, moves)
    }

    fn assemble(&self, plan: &Plan, st: &State) -> Result<Vec<Vertex>, Stop> {
        let fail = |what: String| Stop::Fatal(ConstructError::ConstructionFailure { context: what });
        let mut out: Vec<Vertex> = Vec::new();
        for k in 0..plan.len() {
            let seg = st.seg[k].as_ref().expect("all segments solved");
            if seg.first().copied() != st.val[2 * k] || seg.last().copied() != st.val[2 * k + 1] {
                return Err(fail(format!("segment {k} has the wrong ends")));
            }
            if let Some(&x) = out.last() {
                let y = seg[0];
                let e = Edge::new(x, y).map_err(|_| fail(format!("{x} and {y} are not adjacent")))?;
                if !self.view.is_crossing(&e) || self.data.fc.contains(&e) {
                    return Err(fail(format!("link {e} is not a usable crossing edge")));
                }
            }
            out.extend_from_slice(seg);
        }
        if let (Some(k), Some((x, xp))) = (plan.pin, self.pin) {
            let ends = [st.val[2 * k + 1], st.val[2 * k + 2]];
            if !ends.contains(&Some(x)) || !ends.contains(&Some(xp)) {
                return Err(fail("prescribed crossing edge not used".into()));
            }
        }
        Ok(out)
    }

    fn project_edge(&self, e: &Edge) -> Edge {
        Edge::new(self.view.project(e.a()), self.view.project(e.b())).expect("block edge")
    }

    /// Hamiltonian path of block `b` from `a` to `c` through its forest plus
    /// `extra`, by recursion on `BH_{n-1}`.
    fn solve_single(&mut self, b: u8, a: Vertex, c: Vertex, extra: &[Edge]) -> Option<Vec<Vertex>> {
        let key = (a, c, extra.to_vec());
        if let Some(hit) = self.singles.get(&key) {
            return hit.clone();
        }
        let res = match self.compute_single(b, a, c, extra) {
            Ok(p) => p,
            Err(e) => {
                self.note(e);
                None
            }
        };
        self.singles.insert(key, res.clone());
        res
    }

    fn compute_single(&self, b: u8, a: Vertex, c: Vertex, extra: &[Edge]) -> Result<Option<Vec<Vertex>>, ConstructError> {
        if a == c || a.parity() == c.parity() {
            return Ok(None);
        }
        let blk = self.data.block(b);
        let mut forest = blk.forest.clone();
        for e in extra {
            if blk.faults.contains(e) || !forest.can_add(e) {
                return Ok(None);
            }
            forest = forest.with_edge(*e)?;
        }
        if !compatible(&forest, a, c) {
            return Ok(None);
        }
        let m = self.n - 1;
        if forest.len() + blk.faults.len() > Instance::budget_for(m) {
            return Ok(None);
        }
        let pf = forest.map(|x| self.view.project(x));
        let faults: BTreeSet<Edge> = blk.faults.iter().map(|e| self.project_edge(e)).collect();
        let path = solve_sub(m, &faults, &pf, self.view.project(a), self.view.project(c), self.opts)?;
        Ok(Some(path.into_iter().map(|w| self.view.lift(b, w)).collect()))
    }

    /// Covers block `b` with paths joining the given ends.
    fn solve_block(&mut self, b: u8, ends: &[(Vertex, Vertex)]) -> Option<Vec<Vec<Vertex>>> {
        if let [(a, c)] = ends {
            return self.solve_single(b, *a, *c, &[]).map(|p| vec![p]);
        }
        if ends.len() == 2 {
            for (i, j) in [(0, 1), (1, 0)] {
                let (w, w2) = ends[i];
                if w != w2 {
                    continue;
                }
                let (p, q) = ends[j];
                for (near, far) in [(p, q), (q, p)] {
                    if !self.ctx.h.is_edge(w, near) || self.is_block_fault(b, w, near) {
                        continue;
                    }
                    let e = Edge::new(w, near).expect("adjacent");
                    if let Some(path) = self.solve_single(b, w, far, &[e]) {
                        if path.get(1) == Some(&near) {
                            let mut seg = path[1..].to_vec();
                            if near == q {
                                seg.reverse();
                            }
                            let mut out = vec![Vec::new(), Vec::new()];
                            out[i] = vec![w];
                            out[j] = seg;
                            return Some(out);
                        }
                    }
                }
            }
        }
        self.cover_oracle(b, ends)
    }

    fn cover_oracle(&mut self, b: u8, ends: &[(Vertex, Vertex)]) -> Option<Vec<Vec<Vertex>>> {
        let m = self.n - 1;
        if m > ORACLE_LEVEL {
            self.note(ConstructError::UnsupportedCase(format!(
                "{}-segment cover of BH_{m}",
                ends.len()
            )));
            return None;
        }
        let blk = self.data.block(b);
        let problem = CoverProblem {
            n: m,
            excluded: BTreeSet::new(),
            faults: blk.faults.iter().map(|e| self.project_edge(e)).collect(),
            required: blk.forest.edges().iter().map(|e| self.project_edge(e)).collect(),
            pairs: ends
                .iter()
                .map(|&(a, c)| (self.view.project(a), self.view.project(c)))
                .collect(),
        };
        match path_cover(&problem, self.opts.limits) {
            Ok(Some(paths)) => Some(
                paths
                    .into_iter()
                    .map(|p| p.into_iter().map(|w| self.view.lift(b, w)).collect())
                    .collect(),
            ),
            Ok(None) => None,
            Err(e) => {
                self.note(e.into());
                None
            }
        }
    }

    fn tour(&mut self, idx: usize) -> Option<Option<Tour>> {
        while self.tours.len() <= idx {
            if self.tours_done {
                return None;
            }
            let m = self.n - 1;
            let blk = self.data.block(0);
            let pf = blk.forest.map(|x| self.view.project(x));
            let faults: BTreeSet<Edge> = blk.faults.iter().map(|e| self.project_edge(e)).collect();
            match tour_variant(m, &pf, &faults, self.tours.len(), self.opts) {
                Ok(Some(t)) => {
                    let lift = |w: Vertex| self.view.lift(0, w);
                    let cycle = t.cycle.into_iter().map(lift).collect();
                    let forced = t
                        .forced
                        .map(|f| Edge::new(lift(f.a()), lift(f.b())).expect("lifted edge"));
                    self.tours.push(Some(Tour { cycle, forced }));
                }
                Ok(None) => {
                    self.tours_done = true;
                    return None;
                }
                Err(e) => {
                    self.note(e);
                    self.tours.push(None);
                }
            }
        }
        Some(self.tours[idx].clone())
    }

    fn heavy_action(&mut self, plan: &Plan, st: &State) -> Flow {
        let mut idx = 0;
        while let Some(tour) = self.tour(idx) {
            idx += 1;
            let Some(tour) = tour else { continue };
            let moves = self.arc_moves(plan, st, &tour);
            if let Some(p) = self.try_moves(plan, st, moves)? {
                return Ok(Some(p));
            }
        }
        Ok(None)
    }

    /// Cuts of an overloaded block's cycle into one arc per visit, assigned
    /// to the visits in every order and orientation that fits the known
    /// values. Scored by how clear the new splice vertices are.
    fn arc_moves(&self, plan: &Plan, st: &State, tour: &Tour) -> Vec<Move> {
        let c = &tour.cycle;
        let len = c.len();
        let segs = plan.visits(0);
        let r = segs.len();
        let forest = self.forest(0);
        let forced = tour.forced.and_then(|f| (0..len).find(|&i| f.contains(c[i]) && f.contains(c[(i + 1) % len])));
        let allowed: Vec<usize> = (0..len)
            .filter(|&i| !forest.has_edge(c[i], c[(i + 1) % len]) && Some(i) != forced)
            .collect();
        let known: Vec<Vertex> = segs
            .iter()
            .flat_map(|&k| [st.val[2 * k], st.val[2 * k + 1]])
            .flatten()
            .collect();
        let need = r - usize::from(forced.is_some());
        let mut scored: Vec<(usize, Move)> = Vec::new();
        for mut cuts in allowed.into_iter().combinations(need) {
            cuts.extend(forced);
            cuts.sort_unstable();
            // Arc t runs from position cuts[t]+1 to cuts[t+1], cyclically.
            let arcs: Vec<(usize, usize)> = (0..r)
                .map(|t| {
                    let end = if t + 1 < r { cuts[t + 1] } else { cuts[0] + len };
                    (cuts[t] + 1, end)
                })
                .collect();
            let ends: Vec<(Vertex, Vertex)> = arcs.iter().map(|&(s, e)| (c[s % len], c[e % len])).collect();
            if !known.iter().all(|x| ends.iter().any(|&(s, e)| s == *x || e == *x)) {
                continue;
            }
            for perm in (0..r).permutations(r) {
                for orient in 0..(1u32 << r) {
                    let mut vals = Vec::with_capacity(2 * r);
                    let mut ok = true;
                    for (si, &k) in segs.iter().enumerate() {
                        let (s, e) = ends[perm[si]];
                        let (en, ex) = if orient >> si & 1 == 0 { (s, e) } else { (e, s) };
                        for (var, x) in [(2 * k, en), (2 * k + 1, ex)] {
                            if x.parity() != plan.parity(var) || st.val[var].is_some_and(|y| y != x) {
                                ok = false;
                            }
                            vals.push((var, x));
                        }
                    }
                    if !ok {
                        continue;
                    }
                    let score: usize = vals
                        .iter()
                        .filter(|(var, _)| st.val[*var].is_none())
                        .map(|&(_, x)| self.ctx.crossing_clearance(x))
                        .sum();
                    let paths = segs
                        .iter()
                        .enumerate()
                        .map(|(si, &k)| {
                            let (s, e) = arcs[perm[si]];
                            let mut p: Vec<Vertex> = (s..=e).map(|i| c[i % len]).collect();
                            if orient >> si & 1 == 1 {
                                p.reverse();
                            }
                            (k, p)
                        })
                        .collect();
                    scored.push((score, (vals, paths)));
                }
            }
        }
        scored.sort_by_key(|(s, _)| std::cmp::Reverse(*s));
        scored
            .into_iter()
            .map(|(_, mv)| mv)
            .filter(|mv| self.apply(plan, st, mv).is_some())
            .take(self.opts.heavy_cap)
            .collect()
    }

    /// Splits of a doubly visited light block from one block path, when
    /// enough of its ends are known.
    fn cut_moves(&mut self, plan: &Plan, st: &State, b: u8, k1: usize, k2: usize) -> Vec<Move> {
        let known = |k: usize| [2 * k, 2 * k + 1].into_iter().filter(|&v| st.val[v].is_some()).collect::<Vec<_>>();
        let (kn1, kn2) = (known(k1), known(k2));
        let moves = match (kn1.len(), kn2.len()) {
            (1, 1) => self.cut_two(st, b, (k1, kn1[0]), (k2, kn2[0])),
            (2, 1) => self.cut_three(st, b, k1, (k2, kn2[0])),
            (1, 2) => self.cut_three(st, b, k2, (k1, kn1[0])),
            _ => Vec::new(),
        };
        let mut out: Vec<Move> = moves.into_iter().filter(|mv| self.apply(plan, st, mv).is_some()).collect();
        out.truncate(self.opts.cut_cap);
        out
    }

    /// Orients `piece`, which starts at the known value of `var`, as segment
    /// `var / 2`, returning the segment and the value of the other end.
    fn orient(var: usize, mut piece: Vec<Vertex>) -> (Vec<Vertex>, Vertex) {
        let other = *piece.last().expect("nonempty piece");
        if var % 2 == 1 {
            piece.reverse();
        }
        (piece, other)
    }

    /// One known end per segment: a block path between them cut at an edge.
    fn cut_two(&mut self, st: &State, b: u8, (k1, v1): (usize, usize), (k2, v2): (usize, usize)) -> Vec<Move> {
        let (p, q) = (st.val[v1].expect("known"), st.val[v2].expect("known"));
        if p.parity() == q.parity() {
            return Vec::new();
        }
        let Some(path) = self.solve_single(b, p, q, &[]) else {
            return Vec::new();
        };
        let lemma: BTreeSet<(Vertex, Vertex)> = edge_on_path_candidates(&self.ctx, b, &path, p)
            .map(|v| v.into_iter().collect())
            .unwrap_or_default();
        let forest = self.forest(b);
        let mut ranked: Vec<((bool, usize), Move)> = Vec::new();
        for i in 0..path.len() - 1 {
            let (s, t) = (path[i], path[i + 1]);
            if forest.has_edge(s, t) {
                continue;
            }
            let (seg1, x1) = Self::orient(v1, path[..=i].to_vec());
            let mut tail = path[i + 1..].to_vec();
            tail.reverse();
            let (seg2, x2) = Self::orient(v2, tail);
            let even_first = if s.is_even() { (s, t) } else { (t, s) };
            let rank = (
                !lemma.contains(&even_first),
                4 - self.ctx.crossing_clearance(s) - self.ctx.crossing_clearance(t),
            );
            ranked.push((rank, (vec![(v1 ^ 1, x1), (v2 ^ 1, x2)], vec![(k1, seg1), (k2, seg2)])));
        }
        ranked.sort_by_key(|(r, _)| *r);
        ranked.into_iter().map(|(_, mv)| mv).collect()
    }

    /// Segment `ka` fully known, segment `kb` known at `vb` only.
    fn cut_three(&mut self, st: &State, b: u8, ka: usize, (kb, vb): (usize, usize)) -> Vec<Move> {
        let (ae, ax) = (st.val[2 * ka].expect("known"), st.val[2 * ka + 1].expect("known"));
        let q = st.val[vb].expect("known");
        let forest = self.forest(b);
        let mut moves = Vec::new();
        if ae == ax {
            let w = ae;
            if w.parity() == q.parity() {
                return moves;
            }
            let mut nbrs = self.ctx.block_neighbors(w);
            nbrs.sort_by_key(|&x| 2 - self.ctx.crossing_clearance(x));
            for b1 in nbrs.into_iter().take(self.opts.cut_cap) {
                if self.is_block_fault(b, w, b1) {
                    continue;
                }
                let e = Edge::new(w, b1).expect("adjacent");
                if let Some(path) = self.solve_single(b, w, q, &[e]) {
                    if path.get(1) == Some(&b1) {
                        let mut piece = path[1..].to_vec();
                        piece.reverse();
                        let (seg, x) = Self::orient(vb, piece);
                        moves.push((vec![(vb ^ 1, x)], vec![(ka, vec![w]), (kb, seg)]));
                    }
                }
            }
            return moves;
        }
        let finish = |path: &[Vertex], near: Vertex| -> Option<Move> {
            let pos = path.iter().position(|&x| x == near)?;
            if pos == 0 {
                return None;
            }
            let mut seg_a = path[pos..].to_vec();
            if near == ax {
                seg_a.reverse();
            }
            let (seg_b, x) = Self::orient(vb, path[..pos].to_vec());
            Some((vec![(vb ^ 1, x)], vec![(ka, seg_a), (kb, seg_b)]))
        };
        for (near, far) in [(ae, ax), (ax, ae)] {
            if q.parity() == far.parity() {
                continue;
            }
            if let Some(path) = self.solve_single(b, q, far, &[]) {
                if let Some(pos) = path.iter().position(|&x| x == near) {
                    if pos > 0 && !forest.has_edge(path[pos - 1], near) {
                        moves.extend(finish(&path, near));
                    }
                }
            }
        }
        for (near, far) in [(ae, ax), (ax, ae)] {
            if q.parity() == far.parity() || self.data.load(b) + 5 > 2 * self.n {
                continue;
            }
            let mut nbrs = extension_neighbor_candidates(&self.ctx, near, q, far).unwrap_or_else(|_| self.ctx.block_neighbors(near));
            nbrs.retain(|&r| !self.is_block_fault(b, near, r) && !forest.has_edge(near, r));
            for r in nbrs.into_iter().take(self.opts.cut_cap) {
                let e = Edge::new(near, r).expect("adjacent");
                if let Some(path) = self.solve_single(b, q, far, &[e]) {
                    let pos = path.iter().position(|&x| x == near);
                    if pos.is_some_and(|p| p > 0 && path[p - 1] == r) {
                        moves.extend(finish(&path, near));
                    }
                }
            }
        }
        moves
    }
}
