//! Random context generators for the selection operations. Each entry point
//! draws contexts until `CONTEXTS` of them meet the operation's hypotheses and
//! reports how many it saw, or the first context where the pick failed.

use bhcube::constructor::lemmas::{self, LemmaContext, LemmaError};
use bhcube::constructor::{construct, partition};
use bhcube::harness::gen_instance;
use bhcube::solvers::{solve_instance, SearchLimits};
use bhcube::{compatible, BalancedHypercube, BlockData, Edge, Instance, Parity, PartitionView, Sign, Vertex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const CONTEXTS: usize = 10_000;
const MAX_ATTEMPTS: usize = 400_000;

/// A normalized partition of a random instance with `F` and `E(L)` nonempty
/// and at most one crossing edge.
struct Setup {
    h: BalancedHypercube,
    view: PartitionView,
    data: BlockData,
    inst: Instance,
}

impl Setup {
    fn ctx(&self) -> LemmaContext<'_> {
        LemmaContext::new(&self.h, &self.view, &self.data, self.inst.u(), self.inst.v())
    }

    fn crossing(&self) -> Option<(Vertex, Vertex)> {
        if self.data.fc.is_empty() && self.data.lc.len() == 1 {
            self.data.lc.iter().next().map(Edge::oriented)
        } else {
            None
        }
    }

    fn pick(&self, rng: &mut ChaCha8Rng, i: u8, parity: Option<Parity>) -> Vertex {
        let vs: Vec<Vertex> = self
            .view
            .block_vertices(i)
            .into_iter()
            .filter(|x| parity.is_none_or(|p| x.parity() == p))
            .collect();
        *vs.choose(rng).expect("nonempty block")
    }
}

fn setup(n: usize, rng: &mut ChaCha8Rng) -> Option<Setup> {
    let budget = 2 * n - 2;
    let f = rng.gen_range(1..budget);
    let l = rng.gen_range(1..=budget - f);
    let inst = gen_instance(n, (f, l), rng.gen()).ok()?;
    let part = partition(&inst).ok()?;
    if part.data.lc.len() + part.data.fc.len() > 1 {
        return None;
    }
    Some(Setup {
        h: inst.graph(),
        view: part.view,
        data: part.data,
        inst: part.instance,
    })
}

fn random_in(h: &BalancedHypercube, rng: &mut ChaCha8Rng, block: u8, parity: Parity) -> Vertex {
    let n = h.n();
    loop {
        let x = Vertex::from_code(n, rng.gen_range(0..h.vertex_count() as u32)).with_digit(n - 1, block);
        if x.parity() == parity {
            return x;
        }
    }
}

fn random_block_edge(h: &BalancedHypercube, rng: &mut ChaCha8Rng, block: u8) -> Edge {
    let n = h.n();
    let p = parity(rng);
    let x = random_in(h, rng, block, p);
    let sign = if rng.gen() { Sign::Plus } else { Sign::Minus };
    Edge::new(x, h.neighbor(x, rng.gen_range(0..n - 1), sign).unwrap()).unwrap()
}

/// Like [`setup`], but with one prescribed crossing edge whose even end lies
/// in block `l`, and block 0 carrying exactly `load0` edges. With `touch`,
/// block 0 has a prescribed edge at the even crossing end.
fn setup_crossing(n: usize, rng: &mut ChaCha8Rng, l: u8, load0: usize, touch: bool) -> Option<Setup> {
    let h = BalancedHypercube::new(n).unwrap();
    let budget = 2 * n - 2;
    let x = random_in(&h, rng, l, Parity::Even);
    let sign = if rng.gen() { Sign::Plus } else { Sign::Minus };
    let mut forest = vec![Edge::new(x, h.neighbor(x, n - 1, sign).unwrap()).unwrap()];
    let mut faults = Vec::new();
    if touch {
        let ns = lemmas_free_neighbors(&h, x);
        forest.push(Edge::new(x, *ns.choose(rng).unwrap()).unwrap());
    }
    let extra = rng.gen_range(0..=budget - 1 - load0);
    let mut tries = 0;
    while forest.len() + faults.len() < 1 + load0 + extra {
        tries += 1;
        if tries > 200 {
            return None;
        }
        let in0 = forest.len() + faults.len() - 1 < load0;
        let b = if in0 { 0 } else { rng.gen_range(1..4) };
        let e = random_block_edge(&h, rng, b);
        if forest.contains(&e) || faults.contains(&e) {
            continue;
        }
        if rng.gen() {
            faults.push(e);
        } else if bhcube::validate_linear_forest(forest.iter().copied().chain([e])).is_ok() {
            forest.push(e);
        }
    }
    if faults.is_empty() {
        return None;
    }
    let u = Vertex::from_code(n, rng.gen_range(0..h.vertex_count() as u32));
    let v = *h.neighbors(h.shadow(u)).choose(rng).unwrap();
    let inst = bhcube::validate_instance(n, faults, forest, u, v).ok()?;
    let part = partition(&inst).ok()?;
    if part.data.lc.len() + part.data.fc.len() != 1 || part.data.load(0) != load0 {
        return None;
    }
    Some(Setup {
        h,
        view: part.view,
        data: part.data,
        inst: part.instance,
    })
}

/// Neighbors of `x` across every dimension but the last.
fn lemmas_free_neighbors(h: &BalancedHypercube, x: Vertex) -> Vec<Vertex> {
    let n = h.n();
    h.neighbors(x).into_iter().filter(|w| w.digit(n - 1) == x.digit(n - 1)).collect()
}

fn parity(rng: &mut ChaCha8Rng) -> Parity {
    if rng.gen() {
        Parity::Even
    } else {
        Parity::Odd
    }
}

/// What one attempt produced.
enum Trial {
    /// The context violated a hypothesis.
    Rejected,
    Found,
    Missed(String),
}

fn judge<T>(res: Result<T, LemmaError>, check: impl FnOnce(T) -> Result<(), String>, dump: impl FnOnce() -> String) -> Trial {
    match res {
        Err(LemmaError::Precondition { .. }) => Trial::Rejected,
        Err(e @ LemmaError::NoCandidate { .. }) => Trial::Missed(format!("{e}\n{}", dump())),
        Ok(x) => match check(x) {
            Ok(()) => Trial::Found,
            Err(msg) => Trial::Missed(format!("bad pick: {msg}\n{}", dump())),
        },
    }
}

fn ensure(ok: bool, msg: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

/// Runs attempts until `CONTEXTS` conforming contexts have been seen and
/// returns how many there were.
fn run(op: u64, n: usize, attempt: impl Fn(&Setup, &mut ChaCha8Rng) -> Trial + Sync) -> Result<usize, String> {
    run_with(op, n, setup, attempt)
}

fn run_with(
    op: u64,
    n: usize,
    gen: impl Fn(usize, &mut ChaCha8Rng) -> Option<Setup> + Sync,
    attempt: impl Fn(&Setup, &mut ChaCha8Rng) -> Trial + Sync,
) -> Result<usize, String> {
    let chunk = 20_000;
    let mut found = 0;
    let mut start = 0;
    while found < CONTEXTS && start < MAX_ATTEMPTS {
        let trials: Vec<Trial> = (start..start + chunk)
            .into_par_iter()
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64((op << 40) ^ ((n as u64) << 32) ^ k as u64);
                match gen(n, &mut rng) {
                    Some(s) => attempt(&s, &mut rng),
                    None => Trial::Rejected,
                }
            })
            .collect();
        for t in trials {
            match t {
                Trial::Rejected => {}
                Trial::Found => found += 1,
                Trial::Missed(msg) => return Err(format!("n = {n}: {msg}")),
            }
        }
        start += chunk;
    }
    Ok(found)
}

fn dump(s: &Setup) -> String {
    serde_json::to_string(&s.inst).unwrap()
}


pub fn vertex_clear(n: usize) -> Result<usize, String> {
    run(1, n, |s, rng| {
        let i = rng.gen_range(0..4u8);
        let p = parity(rng);
        let excl = s.pick(rng, i, Some(p));
        judge(
            lemmas::pick_vertex_clear(&s.ctx(), i, p, excl),
            |x| ensure(x != excl && x.parity() == p && s.view.block_of(x) == i, "wrong vertex"),
            || dump(s),
        )
    })
}

/// A hamiltonian path of block `i` minus its faults through its forest,
/// between random ends, lifted back into `BH_n`.
fn block_path(s: &Setup, i: u8, rng: &mut ChaCha8Rng) -> Option<Vec<Vertex>> {
    let n = s.h.n();
    let blk = s.data.block(i);
    let z = s.pick(rng, i, Some(Parity::Even));
    let w = s.pick(rng, i, Some(Parity::Odd));
    if !compatible(&blk.forest, z, w) {
        return None;
    }
    let proj = |e: &Edge| Edge::new(s.view.project(e.a()), s.view.project(e.b())).unwrap();
    let sub = Instance::relaxed(
        n - 1,
        blk.faults.iter().map(proj),
        blk.forest.edges().iter().map(proj),
        s.view.project(z),
        s.view.project(w),
    )
    .ok()?;
    let path = match construct(&sub) {
        Ok(p) => p,
        Err(_) => solve_instance(&sub, SearchLimits::with_budget(2_000_000)).ok()??,
    };
    Some(path.vertices().iter().map(|x| s.view.lift(i, *x)).collect())
}

pub fn edge_on_path(n: usize) -> Result<usize, String> {
    run(2, n, |s, rng| {
        let i = rng.gen_range(0..4u8);
        if s.data.load(i) > 2 * n - 3 {
            return Trial::Rejected;
        }
        let Some(path) = block_path(s, i, rng) else {
            return Trial::Rejected;
        };
        let y = s.pick(rng, i, None);
        let ends = (path[0], path[path.len() - 1]);
        judge(
            lemmas::pick_edge_on_path(&s.ctx(), i, &path, y),
            |(a, b)| {
                ensure(a.is_even() && s.h.is_edge(a, b), "not an edge")?;
                ensure(![a, b].iter().any(|x| *x == y || *x == ends.0 || *x == ends.1), "touches an excluded vertex")?;
                ensure(!s.data.block(i).forest.has_edge(a, b), "prescribed edge")
            },
            || dump(s),
        )
    })
}

pub fn vertex_unlinked(n: usize) -> Result<usize, String> {
    run(3, n, |s, rng| {
        let i = rng.gen_range(0..4u8);
        let p = parity(rng);
        judge(
            lemmas::pick_vertex_unlinked(&s.ctx(), i, p),
            |x| ensure(x.parity() == p && s.view.block_of(x) == i && !s.data.block(i).forest.touches(x), "wrong vertex"),
            || dump(s),
        )
    })
}

pub fn two_neighbors(n: usize) -> Result<usize, String> {
    run(4, n, |s, rng| {
        let i = rng.gen_range(0..4u8);
        let r = s.pick(rng, i, None);
        judge(
            lemmas::pick_two_neighbors(&s.ctx(), r),
            |(a, b)| ensure(a != b && s.h.is_edge(r, a) && s.h.is_edge(r, b), "not neighbors"),
            || format!("r = {r}, {}", dump(s)),
        )
    })
}

pub fn extension_neighbor(n: usize) -> Result<usize, String> {
    run(5, n, |s, rng| {
        let j = rng.gen_range(0..4u8);
        let r = s.pick(rng, j, None);
        let y = s.pick(rng, j, Some(Parity::Even));
        let z = s.pick(rng, j, Some(Parity::Odd));
        judge(
            lemmas::pick_extension_neighbor(&s.ctx(), r, y, z),
            |x| ensure(s.h.is_edge(r, x) && s.view.block_of(x) == j, "not a block neighbor"),
            || format!("r = {r}, y = {y}, z = {z}, {}", dump(s)),
        )
    })
}

/// A maximal path of the forest of block `i`, oriented from a random end.
fn forest_path(s: &Setup, i: u8, rng: &mut ChaCha8Rng) -> Option<Vec<Vertex>> {
    let mut p = s.data.block(i).forest.maximal_paths().choose(rng)?.clone();
    if rng.gen() {
        p.reverse();
    }
    Some(p)
}

/// The hypothesis |E(L_l) ∪ F_l| <= 2n-6 leaves no prescribed edge in the
/// block at n = 3, so there the count is zero and any conforming context is
/// an error.
pub fn detour_pair(n: usize) -> Result<usize, String> {
    if n == 3 {
        return run(6, 3, |s, rng| {
            let l = rng.gen_range(0..4u8);
            match forest_path(s, l, rng) {
                Some(_) if s.data.load(l) + 6 <= 6 => Trial::Missed("conforming context at n = 3".into()),
                _ => Trial::Rejected,
            }
        });
    }
    run(6, n, |s, rng| {
        let l = rng.gen_range(0..4u8);
        let Some(path) = forest_path(s, l, rng) else {
            return Trial::Rejected;
        };
        let (x, y) = (path[0], path[1]);
        let z = s.pick(rng, l, Some(Parity::Even));
        judge(
            lemmas::pick_detour_pair(&s.ctx(), x, &path, y, z),
            |(a, b)| {
                ensure(a != b && a != y && b != y, "repeated vertex")?;
                ensure(b != s.h.shadow(a), "shadow pair")
            },
            || format!("x = {x}, y = {y}, z = {z}, {}", dump(s)),
        )
    })
}

pub fn crossing_neighbor(n: usize) -> Result<usize, String> {
    let gen = |n: usize, rng: &mut ChaCha8Rng| {
        let load0 = 2 * n - rng.gen_range(4..=5);
        let l = rng.gen_range(1..=2);
        setup_crossing(n, rng, l, load0, false)
    };
    run_with(7, n, gen, |s, rng| {
        let Some((x, xp)) = s.crossing() else {
            return Trial::Rejected;
        };
        let (a, yb) = match s.view.block_of(x) {
            1 => (x, 1),
            2 => (xp, 3),
            _ => return Trial::Rejected,
        };
        let y = s.pick(rng, yb, Some(Parity::Odd));
        if s.data.block(yb).forest.touches(y) {
            return Trial::Rejected;
        }
        judge(
            lemmas::pick_crossing_neighbor(&s.ctx(), a, y),
            |z| ensure(z != y && s.h.is_edge(a, z) && s.view.block_of(z) == yb, "not a block neighbor"),
            || format!("a = {a}, y = {y}, {}", dump(s)),
        )
    })
}

pub fn crossing_neighbor_l0(n: usize) -> Result<usize, String> {
    let gen = |n: usize, rng: &mut ChaCha8Rng| {
        let touch = rng.gen();
        setup_crossing(n, rng, 0, 2 * n - 5, touch)
    };
    run_with(8, n, gen, |s, rng| {
        let Some((x, _)) = s.crossing() else {
            return Trial::Rejected;
        };
        let y = s.pick(rng, 0, Some(Parity::Odd));
        if s.data.block(0).forest.touches(y) {
            return Trial::Rejected;
        }
        judge(
            lemmas::pick_crossing_neighbor_l0(&s.ctx(), x, y),
            |z| ensure(z != y && s.h.is_edge(x, z), "not a neighbor"),
            || format!("x = {x}, y = {y}, {}", dump(s)),
        )
    })
}

pub fn branch_pair_l0(n: usize) -> Result<usize, String> {
    let gen = |n: usize, rng: &mut ChaCha8Rng| setup_crossing(n, rng, 0, 2 * n - 5, true);
    run_with(9, n, gen, |s, _rng| {
        let Some((x, _)) = s.crossing() else {
            return Trial::Rejected;
        };
        let forest = &s.data.block(0).forest;
        if s.view.block_of(x) != 0 || !forest.touches(x) {
            return Trial::Rejected;
        }
        let mut path = forest.path_through(x).expect("x touches the forest");
        if path[0] != x {
            path.reverse();
        }
        let y = path[1];
        judge(
            lemmas::pick_branch_pair_l0(&s.ctx(), x, &path, y),
            |(a, b)| ensure(a != b && a != y && b != y && s.h.is_edge(x, a) && s.h.is_edge(x, b), "bad pair"),
            || format!("x = {x}, {}", dump(s)),
        )
    })
}

type Margin = fn(usize) -> Result<usize, String>;

/// Every selection operation with its entry point.
pub const OPERATIONS: [(&str, Margin); 9] = [
    ("pick_vertex_clear", vertex_clear),
    ("pick_edge_on_path", edge_on_path),
    ("pick_vertex_unlinked", vertex_unlinked),
    ("pick_two_neighbors", two_neighbors),
    ("pick_extension_neighbor", extension_neighbor),
    ("pick_detour_pair", detour_pair),
    ("pick_crossing_neighbor", crossing_neighbor),
    ("pick_crossing_neighbor_l0", crossing_neighbor_l0),
    ("pick_branch_pair_l0", branch_pair_l0),
];

/// Contexts expected for `op` at `n`: zero where the hypotheses cannot hold.
pub fn expected(op: &str, n: usize) -> usize {
    if op == "pick_detour_pair" && n == 3 {
        0
    } else {
        CONTEXTS
    }
}
