//! Candidate selection inside a partitioned instance.
//!
//! Each `pick_*` returns the first qualifying candidate in lexicographic order
//! (or scan order along a path) and the matching `*_candidates` function
//! returns all of them. A `NoCandidate` error under satisfied preconditions
//! means either the implementation or the counting argument behind the
//! operation is wrong, so it is never swallowed.

use crate::constraints::{compatible, BlockData, LinearForest};
use crate::topology::{BalancedHypercube, Edge, Parity, PartitionView, Vertex};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LemmaError {
    #[error("{op}: no candidate ({detail})")]
    NoCandidate { op: &'static str, detail: String },
    #[error("{op}: precondition violated ({detail})")]
    Precondition { op: &'static str, detail: String },
}

/// Read-only view of a partitioned instance used by the selection operations.
#[derive(Debug, Clone, Copy)]
pub struct LemmaContext<'a> {
    pub h: &'a BalancedHypercube,
    pub view: &'a PartitionView,
    pub data: &'a BlockData,
    /// Even endpoint.
    pub u: Vertex,
    /// Odd endpoint.
    pub v: Vertex,
}

impl<'a> LemmaContext<'a> {
    pub fn new(h: &'a BalancedHypercube, view: &'a PartitionView, data: &'a BlockData, u: Vertex, v: Vertex) -> Self {
        LemmaContext { h, view, data, u, v }
    }

    pub fn n(&self) -> usize {
        self.h.n()
    }

    fn forest(&self, b: u8) -> &'a LinearForest {
        &self.data.block(b).forest
    }

    fn is_block_fault(&self, b: u8, x: Vertex, y: Vertex) -> bool {
        Edge::new(x, y).is_ok_and(|e| self.data.block(b).faults.contains(&e))
    }

    fn max_load(&self) -> usize {
        self.data.loads().into_iter().max().unwrap_or(0)
    }

    /// Neighbors of `x` inside its own block, in lexicographic order.
    pub fn block_neighbors(&self, x: Vertex) -> Vec<Vertex> {
        let b = self.view.block_of(x);
        let mut out: Vec<Vertex> = self
            .h
            .neighbors(x)
            .into_iter()
            .filter(|w| self.view.block_of(*w) == b)
            .collect();
        out.sort();
        out
    }

    fn adjacent_in_block(&self, a: Vertex, c: Vertex, b: u8) -> bool {
        self.view.block_of(a) == b && self.view.block_of(c) == b && self.h.is_edge(a, c)
    }

    /// True when `x` touches no edge of `L ∪ F` inside its block.
    pub fn is_clear(&self, x: Vertex) -> bool {
        !self.data.block(self.view.block_of(x)).touches(x)
    }

    /// How many of the two crossing neighbors of `x` are clear.
    pub fn crossing_clearance(&self, x: Vertex) -> usize {
        self.view.crossing(x).into_iter().filter(|c| self.is_clear(*c)).count()
    }

    /// The single crossing edge when `|L^c ∪ F^c| = 1`, oriented (even, odd).
    fn sole_crossing(&self) -> Option<(Vertex, Vertex)> {
        if self.data.lc.len() + self.data.fc.len() == 1 {
            self.data.lc.iter().chain(&self.data.fc).next().map(Edge::oriented)
        } else {
            None
        }
    }

    fn prescribed_crossing_only(&self) -> Option<(Vertex, Vertex)> {
        if self.data.fc.is_empty() && self.data.lc.len() == 1 {
            self.data.lc.iter().next().map(Edge::oriented)
        } else {
            None
        }
    }
}

fn pre(op: &'static str, ok: bool, detail: impl FnOnce() -> String) -> Result<(), LemmaError> {
    if ok {
        Ok(())
    } else {
        Err(LemmaError::Precondition { op, detail: detail() })
    }
}

fn first<T>(op: &'static str, mut items: Vec<T>, detail: impl FnOnce() -> String) -> Result<T, LemmaError> {
    if items.is_empty() {
        Err(LemmaError::NoCandidate { op, detail: detail() })
    } else {
        Ok(items.swap_remove(0))
    }
}

/// Forest `f` with the edges in `remove` deleted and those in `add` inserted,
/// or `None` if the result is not a linear forest.
fn modified(f: &LinearForest, remove: &[Edge], add: &[Edge]) -> Option<LinearForest> {
    let mut g = f.clone();
    for e in remove {
        g = g.without_edge(e);
    }
    for e in add {
        if g.contains_edge(e) || !g.can_add(e) {
            return None;
        }
        g = g.with_edge(*e).ok()?;
    }
    Some(g)
}

pub fn vertex_clear_candidates(
    ctx: &LemmaContext,
    i: u8,
    parity: Parity,
    s: Vertex,
) -> Result<Vec<Vertex>, LemmaError> {
    const OP: &str = "pick_vertex_clear";
    let n = ctx.n();
    pre(OP, ctx.max_load() <= 2 * n - 4, || format!("block loads {:?}", ctx.data.loads()))?;
    Ok(ctx
        .view
        .block_vertices(i)
        .into_iter()
        .filter(|x| x.parity() == parity && *x != s)
        .filter(|x| !ctx.forest(i).touches(*x))
        .filter(|x| ctx.view.crossing(*x).iter().all(|c| ctx.is_clear(*c)))
        .collect())
}

/// A vertex of block `i` with the given parity, other than `s`, touching no
/// prescribed edge of its block and with both crossing neighbors clear.
pub fn pick_vertex_clear(ctx: &LemmaContext, i: u8, parity: Parity, s: Vertex) -> Result<Vertex, LemmaError> {
    let all = vertex_clear_candidates(ctx, i, parity, s)?;
    first("pick_vertex_clear", all, || format!("block {i}, {parity:?}, excluded {s}"))
}

/// Clearance required of a cut edge: some crossing neighbor per end when the
/// block load is at most `2n-4`, both crossing neighbors at `2n-3`.
fn cut_edge_clear(ctx: &LemmaContext, i: u8, s: Vertex, t: Vertex) -> bool {
    let strict = ctx.data.load(i) == 2 * ctx.n() - 3;
    [s, t].into_iter().all(|x| {
        let c = ctx.crossing_clearance(x);
        if strict {
            c == 2
        } else {
            c >= 1
        }
    })
}

pub fn edge_on_path_candidates(
    ctx: &LemmaContext,
    i: u8,
    path: &[Vertex],
    y: Vertex,
) -> Result<Vec<(Vertex, Vertex)>, LemmaError> {
    const OP: &str = "pick_edge_on_path";
    let n = ctx.n();
    pre(OP, ctx.data.load(i) <= 2 * n - 3, || format!("block {i} load {}", ctx.data.load(i)))?;
    pre(OP, path.len() >= 2, || "path too short".into())?;
    let (z, w) = (path[0], path[path.len() - 1]);
    let forest = ctx.forest(i);
    Ok(path
        .windows(2)
        .filter(|p| !forest.has_edge(p[0], p[1]))
        .map(|p| if p[0].is_even() { (p[0], p[1]) } else { (p[1], p[0]) })
        .filter(|&(s, t)| ![s, t].iter().any(|x| *x == z || *x == w || *x == y))
        .filter(|&(s, t)| cut_edge_clear(ctx, i, s, t))
        .collect())
}

/// An edge `(s, t)` of the block path `path`, with `s` even, that is not
/// prescribed, avoids both path ends and `y`, and whose ends have clear
/// crossing neighbors. Scans from `path[0]`.
pub fn pick_edge_on_path(
    ctx: &LemmaContext,
    i: u8,
    path: &[Vertex],
    y: Vertex,
) -> Result<(Vertex, Vertex), LemmaError> {
    let all = edge_on_path_candidates(ctx, i, path, y)?;
    first("pick_edge_on_path", all, || format!("block {i}, excluded {y}"))
}

pub fn vertex_unlinked_candidates(ctx: &LemmaContext, i: u8, parity: Parity) -> Result<Vec<Vertex>, LemmaError> {
    const OP: &str = "pick_vertex_unlinked";
    let n = ctx.n();
    let nb = match parity {
        Parity::Even => (i + 1) % 4,
        Parity::Odd => (i + 3) % 4,
    };
    pre(OP, ctx.data.load(i) <= 2 * n - 4, || format!("block {i} load {}", ctx.data.load(i)))?;
    pre(OP, ctx.data.load(nb) + 6 <= 2 * n, || format!("block {nb} load {}", ctx.data.load(nb)))?;
    let far = match parity {
        Parity::Even => ctx.u,
        Parity::Odd => ctx.v,
    };
    let sole = if n >= 4 { ctx.sole_crossing() } else { None };
    Ok(ctx
        .view
        .block_vertices(i)
        .into_iter()
        .filter(|s| s.parity() == parity)
        .filter(|s| !ctx.forest(i).touches(*s))
        .filter(|s| {
            ctx.view.crossing(*s).into_iter().all(|c| {
                let far_ok = !ctx.adjacent_in_block(far, c, nb);
                let sole_ok = sole.is_none_or(|(x, y)| {
                    let anchor = if parity == Parity::Even { x } else { y };
                    !ctx.adjacent_in_block(anchor, c, nb)
                });
                ctx.is_clear(c) && far_ok && sole_ok
            })
        })
        .filter(|s| sole.is_none_or(|(x, y)| *s != x && *s != y))
        .collect())
}

/// A vertex of block `i` with the given parity touching no prescribed edge of
/// its block, whose crossing neighbors are clear and not adjacent to the far
/// endpoint (`u` for even, `v` for odd), nor, for `n >= 4` with a single
/// crossing edge `(x, y)`, to `x` (resp. `y`).
pub fn pick_vertex_unlinked(ctx: &LemmaContext, i: u8, parity: Parity) -> Result<Vertex, LemmaError> {
    let all = vertex_unlinked_candidates(ctx, i, parity)?;
    first("pick_vertex_unlinked", all, || format!("block {i}, {parity:?}"))
}

pub fn two_neighbors_candidates(ctx: &LemmaContext, r: Vertex) -> Result<Vec<(Vertex, Vertex)>, LemmaError> {
    const OP: &str = "pick_two_neighbors";
    let n = ctx.n();
    let i = ctx.view.block_of(r);
    pre(OP, ctx.data.load(i) + 5 <= 2 * n, || format!("block {i} load {}", ctx.data.load(i)))?;
    pre(OP, ctx.is_clear(r), || format!("{r} touches the block constraints"))?;
    let (far, anchor) = if r.is_even() {
        (ctx.v, ctx.prescribed_crossing_only().map(|p| p.1))
    } else {
        (ctx.u, ctx.prescribed_crossing_only().map(|p| p.0))
    };
    pre(OP, !ctx.adjacent_in_block(far, r, i), || format!("{far} adjacent to {r}"))?;
    pre(OP, anchor.is_none_or(|a| !ctx.adjacent_in_block(a, r, i)), || {
        format!("crossing end adjacent to {r}")
    })?;
    let forest = ctx.forest(i);
    let loose = |x: Vertex| {
        ctx.view
            .crossing(x)
            .into_iter()
            .any(|c| !ctx.forest(ctx.view.block_of(c)).touches(c))
    };
    let nbrs = ctx.block_neighbors(r);
    let mut out = Vec::new();
    for (a, &s) in nbrs.iter().enumerate() {
        for &t in &nbrs[a + 1..] {
            let add = [Edge::new(r, s).expect("adjacent"), Edge::new(r, t).expect("adjacent")];
            if modified(forest, &[], &add).is_some() && loose(s) && loose(t) {
                out.push((s, t));
            }
        }
    }
    Ok(out)
}

/// Two neighbors `s, t` of `r` in its block such that `L_i + (r,s) + (r,t)`
/// is a linear forest and each of `s, t` has a crossing neighbor touching no
/// prescribed edge.
pub fn pick_two_neighbors(ctx: &LemmaContext, r: Vertex) -> Result<(Vertex, Vertex), LemmaError> {
    let all = two_neighbors_candidates(ctx, r)?;
    first("pick_two_neighbors", all, || format!("r = {r}"))
}

pub fn extension_neighbor_candidates(
    ctx: &LemmaContext,
    r: Vertex,
    y: Vertex,
    z: Vertex,
) -> Result<Vec<Vertex>, LemmaError> {
    const OP: &str = "pick_extension_neighbor";
    let n = ctx.n();
    let jb = ctx.view.block_of(r);
    let forest = ctx.forest(jb);
    pre(OP, ctx.max_load() + 5 <= 2 * n, || format!("block loads {:?}", ctx.data.loads()))?;
    pre(OP, forest.degree(r) <= 1, || format!("{r} is internal"))?;
    pre(OP, compatible(forest, y, z), || format!("{{{y}, {z}}} incompatible"))?;
    pre(OP, r != y && r != z, || format!("{r} is one of the ends"))?;
    let strong = ctx.max_load() + 6 <= 2 * n && !forest.touches(if r.is_even() { y } else { z });
    Ok(ctx
        .block_neighbors(r)
        .into_iter()
        .filter(|&s| !forest.has_edge(r, s) && !ctx.is_block_fault(jb, r, s))
        .filter(|&s| {
            modified(forest, &[], &[Edge::new(r, s).expect("adjacent")]).is_some_and(|g| compatible(&g, y, z))
        })
        .filter(|&s| {
            let cs = ctx.view.crossing(s);
            let nf = ctx.forest(ctx.view.crossing_block(s));
            cs.iter().any(|c| !nf.is_internal(*c)) && (!strong || cs.iter().any(|c| !nf.touches(*c)))
        })
        .collect())
}

/// A neighbor `s` of `r` in its block such that `(r, s)` can be added to the
/// block forest keeping `{y, z}` compatible, and a crossing neighbor of `s` is
/// not internal to the adjacent block forest (not touching it at all when the
/// loads leave room).
pub fn pick_extension_neighbor(ctx: &LemmaContext, r: Vertex, y: Vertex, z: Vertex) -> Result<Vertex, LemmaError> {
    let all = extension_neighbor_candidates(ctx, r, y, z)?;
    first("pick_extension_neighbor", all, || format!("r = {r}, y = {y}, z = {z}"))
}

fn check_path_from(
    op: &'static str,
    forest: &LinearForest,
    x: Vertex,
    path: &[Vertex],
    y: Vertex,
) -> Result<(), LemmaError> {
    pre(op, path.len() >= 2 && path[0] == x && path[1] == y, || {
        format!("path must start with the edge ({x}, {y})")
    })?;
    pre(op, forest.path_through(x).is_some_and(|p| p.len() == path.len()), || {
        "path is not a maximal path of the block forest".into()
    })?;
    pre(op, path.windows(2).all(|w| forest.has_edge(w[0], w[1])), || {
        "path is not a maximal path of the block forest".into()
    })
}

pub fn detour_pair_candidates(
    ctx: &LemmaContext,
    x: Vertex,
    path: &[Vertex],
    y: Vertex,
    z: Vertex,
) -> Result<Vec<(Vertex, Vertex)>, LemmaError> {
    const OP: &str = "pick_detour_pair";
    let n = ctx.n();
    let l = ctx.view.block_of(x);
    let forest = ctx.forest(l);
    pre(OP, ctx.data.load(l) + 6 <= 2 * n, || format!("block {l} load {}", ctx.data.load(l)))?;
    check_path_from(OP, forest, x, path, y)?;
    let r = path[path.len() - 1];
    pre(OP, z.is_even() && ctx.view.block_of(z) == l && z != x && z != r && forest.degree(z) <= 1, || {
        format!("bad z = {z}")
    })?;
    let xy = Edge::new(x, y).expect("adjacent");
    let nbrs: Vec<Vertex> = ctx
        .block_neighbors(x)
        .into_iter()
        .filter(|&w| w != y && !ctx.is_block_fault(l, x, w))
        .collect();
    let mut out = Vec::new();
    for &s in &nbrs {
        let s_ok = ctx
            .view
            .crossing(s)
            .into_iter()
            .any(|c| !ctx.data.block(ctx.view.crossing_block(s)).touches(c));
        if !s_ok {
            continue;
        }
        for &t in &nbrs {
            if t == s || t == ctx.h.shadow(s) {
                continue;
            }
            let t_ok = ctx
                .view
                .crossing(t)
                .into_iter()
                .any(|c| !ctx.forest(ctx.view.crossing_block(t)).is_internal(c));
            if !t_ok {
                continue;
            }
            let add = [Edge::new(x, s).expect("adjacent"), Edge::new(x, t).expect("adjacent")];
            if modified(forest, &[xy], &add).is_some_and(|g| compatible(&g, y, z)) {
                out.push((s, t));
            }
        }
    }
    Ok(out)
}

/// Two neighbors `s, t` of `x` (other than `y`) rerouting the maximal path
/// `path = P[x, r]` away from its first edge `(x, y)`.
pub fn pick_detour_pair(
    ctx: &LemmaContext,
    x: Vertex,
    path: &[Vertex],
    y: Vertex,
    z: Vertex,
) -> Result<(Vertex, Vertex), LemmaError> {
    let all = detour_pair_candidates(ctx, x, path, y, z)?;
    first("pick_detour_pair", all, || format!("x = {x}, y = {y}, z = {z}"))
}

pub fn crossing_neighbor_candidates(ctx: &LemmaContext, a: Vertex, y: Vertex) -> Result<Vec<Vertex>, LemmaError> {
    const OP: &str = "pick_crossing_neighbor";
    let n = ctx.n();
    let load0 = ctx.data.load(0);
    pre(OP, load0 + 5 == 2 * n || load0 + 4 == 2 * n, || format!("block 0 load {load0}"))?;
    let b = ctx.view.block_of(a);
    let forest = ctx.forest(b);
    Ok(ctx
        .block_neighbors(a)
        .into_iter()
        .filter(|&z| z != y && !forest.has_edge(a, z) && !ctx.is_block_fault(b, a, z))
        .filter(|&z| modified(forest, &[], &[Edge::new(a, z).expect("adjacent")]).is_some())
        .filter(|&z| {
            let nf = ctx.forest(ctx.view.crossing_block(z));
            ctx.view.crossing(z).iter().any(|c| !nf.touches(*c))
        })
        .collect())
}

/// A neighbor `z` of `a` in its block, other than `y`, such that `(a, z)`
/// extends the block forest and a crossing neighbor of `z` touches no
/// prescribed edge of the adjacent block.
pub fn pick_crossing_neighbor(ctx: &LemmaContext, a: Vertex, y: Vertex) -> Result<Vertex, LemmaError> {
    let all = crossing_neighbor_candidates(ctx, a, y)?;
    first("pick_crossing_neighbor", all, || format!("a = {a}, y = {y}"))
}

pub fn crossing_neighbor_l0_candidates(ctx: &LemmaContext, x: Vertex, y: Vertex) -> Result<Vec<Vertex>, LemmaError> {
    const OP: &str = "pick_crossing_neighbor_l0";
    let n = ctx.n();
    pre(OP, ctx.view.block_of(x) == 0, || format!("{x} is not in block 0"))?;
    pre(OP, ctx.data.load(0) + 5 == 2 * n, || format!("block 0 load {}", ctx.data.load(0)))?;
    let forest = ctx.forest(0);
    Ok(ctx
        .block_neighbors(x)
        .into_iter()
        .filter(|&z| z != y && !forest.has_edge(x, z) && !ctx.is_block_fault(0, x, z))
        .filter(|&z| modified(forest, &[], &[Edge::new(x, z).expect("adjacent")]).is_some())
        .filter(|&z| {
            // The clearance is checked against the forest of the block the
            // crossing neighbors of `z` live in.
            let nf = ctx.forest(ctx.view.crossing_block(z));
            ctx.view.crossing(z).iter().any(|c| !nf.touches(*c))
        })
        .collect())
}

/// Block-0 variant of [`pick_crossing_neighbor`].
pub fn pick_crossing_neighbor_l0(ctx: &LemmaContext, x: Vertex, y: Vertex) -> Result<Vertex, LemmaError> {
    let all = crossing_neighbor_l0_candidates(ctx, x, y)?;
    first("pick_crossing_neighbor_l0", all, || format!("x = {x}, y = {y}"))
}

pub fn branch_pair_l0_candidates(
    ctx: &LemmaContext,
    x: Vertex,
    path: &[Vertex],
    y: Vertex,
) -> Result<Vec<(Vertex, Vertex)>, LemmaError> {
    const OP: &str = "pick_branch_pair_l0";
    let n = ctx.n();
    pre(OP, ctx.view.block_of(x) == 0, || format!("{x} is not in block 0"))?;
    pre(OP, ctx.data.load(0) + 5 == 2 * n, || format!("block 0 load {}", ctx.data.load(0)))?;
    let forest = ctx.forest(0);
    check_path_from(OP, forest, x, path, y)?;
    pre(OP, path[path.len() - 1] != ctx.u, || "far end of the path is u".into())?;
    let xy = Edge::new(x, y).expect("adjacent");
    let nbrs: Vec<Vertex> = ctx
        .block_neighbors(x)
        .into_iter()
        .filter(|&w| w != y && !ctx.is_block_fault(0, x, w))
        .collect();
    let mut out = Vec::new();
    for &s in &nbrs {
        let nf = ctx.forest(ctx.view.crossing_block(s));
        if ctx.view.crossing(s).iter().any(|c| nf.touches(*c)) {
            continue;
        }
        for &t in &nbrs {
            if t == s {
                continue;
            }
            let add = [Edge::new(x, s).expect("adjacent"), Edge::new(x, t).expect("adjacent")];
            if modified(forest, &[xy], &add).is_some() {
                out.push((s, t));
            }
        }
    }
    Ok(out)
}

/// Two neighbors `s, t` of `x` in block 0 (other than `y`) replacing the first
/// edge of the maximal path `P[x, r]`, with both crossing neighbors of `s`
/// clear of the adjacent block forest.
pub fn pick_branch_pair_l0(
    ctx: &LemmaContext,
    x: Vertex,
    path: &[Vertex],
    y: Vertex,
) -> Result<(Vertex, Vertex), LemmaError> {
    let all = branch_pair_l0_candidates(ctx, x, path, y)?;
    first("pick_branch_pair_l0", all, || format!("x = {x}, y = {y}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{restrict, validate_instance};

    fn v(s: &str) -> Vertex {
        s.parse().unwrap()
    }

    struct Fixture {
        h: BalancedHypercube,
        view: PartitionView,
        data: BlockData,
    }

    fn empty(n: usize) -> Fixture {
        let h = BalancedHypercube::new(n).unwrap();
        let view = PartitionView::new(&h, n - 1).unwrap();
        let u = Vertex::from_code(n, 0);
        let w = h.neighbors(u)[0];
        let inst = validate_instance(n, vec![], vec![], u, w).unwrap();
        let data = restrict(&inst, &view);
        Fixture { h, view, data }
    }

    #[test]
    fn clear_vertex_on_empty_constraints() {
        let f = empty(3);
        let ctx = LemmaContext::new(&f.h, &f.view, &f.data, v("000"), v("100"));
        assert_eq!(pick_vertex_clear(&ctx, 1, Parity::Even, v("001")).unwrap(), v("011"));
        assert_eq!(pick_vertex_clear(&ctx, 1, Parity::Even, v("111")).unwrap(), v("001"));
    }

    #[test]
    fn unlinked_vertex_on_empty_constraints() {
        let f = empty(3);
        let ctx = LemmaContext::new(&f.h, &f.view, &f.data, v("222"), v("322"));
        let s = pick_vertex_unlinked(&ctx, 0, Parity::Even).unwrap();
        assert_eq!(s, v("000"));
    }

    #[test]
    fn two_neighbors_on_empty_constraints() {
        let f = empty(3);
        let ctx = LemmaContext::new(&f.h, &f.view, &f.data, v("022"), v("322"));
        let r = v("000");
        let nb = ctx.block_neighbors(r);
        assert_eq!(pick_two_neighbors(&ctx, r).unwrap(), (nb[0], nb[1]));
    }

    #[test]
    fn edge_on_path_skips_excluded_vertex() {
        let f = empty(2);
        let ctx = LemmaContext::new(&f.h, &f.view, &f.data, v("00"), v("10"));
        // The 4-cycle of block 0 as a path 00-10-20-30.
        let path = [v("00"), v("10"), v("20"), v("30")];
        assert_eq!(pick_edge_on_path(&ctx, 0, &path, v("33")).unwrap(), (v("20"), v("10")));
        assert!(matches!(
            pick_edge_on_path(&ctx, 0, &path, v("20")),
            Err(LemmaError::NoCandidate { .. })
        ));
    }

    #[test]
    fn detour_pair_avoids_shadow() {
        let h = BalancedHypercube::new(4).unwrap();
        let view = PartitionView::new(&h, 3).unwrap();
        let x = v("0000");
        let y = h.neighbors(x).into_iter().find(|w| view.block_of(*w) == 0).unwrap();
        let inst = validate_instance(4, vec![], vec![Edge::new(x, y).unwrap()], v("2220"), v("1230")).unwrap();
        let data = restrict(&inst, &view);
        let ctx = LemmaContext::new(&h, &view, &data, inst.u(), inst.v());
        let (s, t) = pick_detour_pair(&ctx, x, &[x, y], y, v("0100")).unwrap();
        assert_ne!(t, h.shadow(s));
        assert!(s != y && t != y && s != t);
    }

    #[test]
    fn preconditions_are_enforced() {
        let f = empty(3);
        let ctx = LemmaContext::new(&f.h, &f.view, &f.data, v("000"), v("100"));
        assert!(matches!(
            pick_crossing_neighbor_l0(&ctx, v("000"), v("100")),
            Err(LemmaError::Precondition { .. })
        ));
    }
}
