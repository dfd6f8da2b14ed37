//! Instance generation, independent path validation, constructor/oracle
//! comparison runs and JSON file helpers.

use crate::constraints::{validate_instance, ConstraintError, Instance, LinearForest};
use crate::constructor::{construct_traced, ConstructOptions};
use crate::solvers::{solve_instance, HamPath, SearchLimits, SolverError};
use crate::topology::{BalancedHypercube, Edge, Vertex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::Path;
use std::time::Instant;
use thiserror::Error;

const MAX_ATTEMPTS: usize = 1000;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
    #[error("no instance with |F| = {faults}, |E(L)| = {prescribed} found after {attempts} attempts")]
    SamplingExhausted {
        faults: usize,
        prescribed: usize,
        attempts: usize,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
}

fn random_edge(h: &BalancedHypercube, rng: &mut ChaCha8Rng) -> Edge {
    let x = Vertex::from_code(h.n(), rng.gen_range(0..h.vertex_count() as u32));
    let ns = h.neighbors(x);
    let y = ns[rng.gen_range(0..ns.len())];
    Edge::new(x, y).expect("neighbor")
}

/// Samples an instance with exactly `faults` faulty edges and `prescribed`
/// prescribed edges. Deterministic for a fixed seed.
pub fn gen_instance(n: usize, split: (usize, usize), seed: u64) -> Result<Instance, HarnessError> {
    let (nf, nl) = split;
    let budget = Instance::budget_for(n.max(1));
    if nf + nl > budget {
        return Err(ConstraintError::BudgetExceeded {
            used: nf + nl,
            budget,
        }
        .into());
    }
    let h = BalancedHypercube::new(n).map_err(ConstraintError::from)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let evens: Vec<Vertex> = h.vertices().filter(|x| x.is_even()).collect();
    let odds: Vec<Vertex> = h.vertices().filter(|x| !x.is_even()).collect();
    for _ in 0..MAX_ATTEMPTS {
        let mut faults = BTreeSet::new();
        let mut tries = 0;
        while faults.len() < nf && tries < 50 * (nf + 1) {
            faults.insert(random_edge(&h, &mut rng));
            tries += 1;
        }
        if faults.len() < nf {
            continue;
        }
        let mut forest = LinearForest::empty();
        tries = 0;
        while forest.len() < nl && tries < 50 * (nl + 1) {
            let e = random_edge(&h, &mut rng);
            tries += 1;
            if !faults.contains(&e) && forest.can_add(&e) {
                forest = forest.with_edge(e).expect("checked");
            }
        }
        if forest.len() < nl {
            continue;
        }
        for _ in 0..50 {
            let u = *evens.choose(&mut rng).expect("nonempty");
            let v = *odds.choose(&mut rng).expect("nonempty");
            if crate::constraints::compatible(&forest, u, v) {
                return Ok(validate_instance(n, faults, forest.edges().iter().copied(), u, v)?);
            }
        }
    }
    Err(HarnessError::SamplingExhausted {
        faults: nf,
        prescribed: nl,
        attempts: MAX_ATTEMPTS,
    })
}

/// Samples an instance whose load is uniform in `0..=budget`, split uniformly
/// between faults and prescribed edges.
pub fn gen_random_instance(n: usize, budget: usize, seed: u64) -> Result<Instance, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let total = rng.gen_range(0..=budget);
    let nf = rng.gen_range(0..=total);
    gen_instance(n, (nf, total - nf), seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    NotHamiltonian,
    NonEdgeStep,
    UsesFault,
    MissesPrescribed,
    WrongEndpoints,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn push(&mut self, kind: ViolationKind, detail: String) {
        self.violations.push(Violation { kind, detail });
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

// Adjacency re-derived from the digit formulas, deliberately sharing nothing
// with the topology module.
fn digits_adjacent(a: &[u8], b: &[u8]) -> bool {
    let n = a.len();
    if b.len() != n {
        return false;
    }
    let step: i32 = if a[0].is_multiple_of(2) { 1 } else { -1 };
    for sign in [1i32, -1] {
        let first = ((a[0] as i32 + sign).rem_euclid(4)) as u8;
        if b[0] != first {
            continue;
        }
        let diff: Vec<usize> = (1..n).filter(|&i| a[i] != b[i]).collect();
        match diff.as_slice() {
            [] => return true,
            [j]
                if b[*j] == ((a[*j] as i32 + step).rem_euclid(4)) as u8 => {
                    return true;
                }
            _ => {}
        }
    }
    false
}

fn same_pair(x: (Vec<u8>, Vec<u8>), e: &Edge) -> bool {
    let (p, q) = (e.a().digits(), e.b().digits());
    (x.0 == p && x.1 == q) || (x.0 == q && x.1 == p)
}

/// Checks, in order: the vertex multiset is `V(BH_n)`, consecutive vertices are
/// adjacent, no step is faulty, every prescribed edge is a step, and the ends
/// are `{u, v}`.
pub fn validate_path(inst: &Instance, path: &[Vertex]) -> ValidationReport {
    let n = inst.n();
    let mut report = ValidationReport::default();
    let total = 4usize.pow(n as u32);
    let mut seen = vec![0u32; total];
    let mut foreign = 0;
    for x in path {
        let d = x.digits();
        if d.len() != n || d.iter().any(|&c| c > 3) {
            foreign += 1;
            continue;
        }
        let idx = d.iter().fold(0usize, |acc, &c| acc * 4 + c as usize);
        seen[idx] += 1;
    }
    let missing = seen.iter().filter(|&&c| c == 0).count();
    let repeated = seen.iter().filter(|&&c| c > 1).count();
    if missing + repeated + foreign > 0 || path.len() != total {
        report.push(
            ViolationKind::NotHamiltonian,
            format!(
                "{} vertices listed, {missing} missing, {repeated} repeated, {foreign} foreign",
                path.len()
            ),
        );
    }
    let steps: Vec<(Vec<u8>, Vec<u8>)> = path.windows(2).map(|w| (w[0].digits(), w[1].digits())).collect();
    for (a, b) in &steps {
        if !digits_adjacent(a, b) {
            report.push(ViolationKind::NonEdgeStep, format!("{} -> {}", fmt_digits(a), fmt_digits(b)));
        }
    }
    for f in inst.faults() {
        if steps.iter().any(|s| same_pair(s.clone(), f)) {
            report.push(ViolationKind::UsesFault, format!("{f}"));
        }
    }
    for e in inst.forest().edges() {
        if !steps.iter().any(|s| same_pair(s.clone(), e)) {
            report.push(ViolationKind::MissesPrescribed, format!("{e}"));
        }
    }
    let ends = (path.first().map(|x| x.digits()), path.last().map(|x| x.digits()));
    let (u, v) = (inst.u().digits(), inst.v().digits());
    let good = match ends {
        (Some(a), Some(b)) => (a == u && b == v) || (a == v && b == u),
        _ => false,
    };
    if !good {
        report.push(
            ViolationKind::WrongEndpoints,
            format!(
                "path ends {:?}, expected {{{}, {}}}",
                (path.first(), path.last()),
                inst.u(),
                inst.v()
            ),
        );
    }
    report.ok = report.violations.is_empty();
    report
}

fn fmt_digits(d: &[u8]) -> String {
    d.iter().map(|c| char::from(b'0' + c)).collect()
}

#[derive(Debug, Clone)]
pub struct CompareConfig {
    pub n: usize,
    pub count: usize,
    /// Upper bound on `|F| + |E(L)|`.
    pub budget: usize,
    pub seed: u64,
    /// Instances with index below this are also solved by the oracle.
    pub oracle_checks: usize,
    pub limits: SearchLimits,
}

impl CompareConfig {
    /// Oracle cross-checks every instance when `n <= 3` and none above.
    pub fn new(n: usize, count: usize, budget: usize, seed: u64) -> Self {
        CompareConfig {
            n,
            count,
            budget,
            seed,
            oracle_checks: if n <= 3 { count } else { 0 },
            limits: SearchLimits::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub n: usize,
    pub seed: u64,
    pub instances: usize,
    /// Validated paths, including unsupported instances the oracle solved.
    pub successes: usize,
    pub oracle_agreements: usize,
    pub failures: usize,
    /// Instances that fell outside the construction and went to the oracle.
    pub unsupported: usize,
    /// Oracle runs that hit the node budget.
    pub inconclusive: usize,
    pub wall_time: f64,
}

#[derive(Debug, Error)]
pub enum CompareAbort {
    #[error(transparent)]
    Generation(#[from] HarnessError),
    #[error("path failed validation: {report:?}\ninstance: {instance}")]
    Invalid { instance: String, report: ValidationReport },
    #[error("constructor and oracle disagree ({detail})\ninstance: {instance}")]
    Disagreement { instance: String, detail: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Success { agreed: bool, unsupported: bool },
    Failure { unsupported: bool },
    Inconclusive { constructed: bool, unsupported: bool },
}

fn to_json(inst: &Instance) -> String {
    serde_json::to_string(inst).expect("instances serialize")
}

fn oracle_check(inst: &Instance, limits: SearchLimits) -> Result<Option<HamPath>, SolverError> {
    solve_instance(inst, limits)
}

fn compare_one(inst: &Instance, with_oracle: bool, opts: &ConstructOptions) -> Result<Outcome, CompareAbort> {
    match construct_traced(inst, opts) {
        Ok((path, trace)) => {
            let delegated = trace.delegated;
            let report = validate_path(inst, path.vertices());
            if !report.ok {
                return Err(CompareAbort::Invalid {
                    instance: to_json(inst),
                    report,
                });
            }
            if !with_oracle {
                return Ok(Outcome::Success {
                    agreed: false,
                    unsupported: delegated,
                });
            }
            match oracle_check(inst, opts.limits) {
                Ok(Some(_)) => Ok(Outcome::Success {
                    agreed: true,
                    unsupported: delegated,
                }),
                Ok(None) => Err(CompareAbort::Disagreement {
                    instance: to_json(inst),
                    detail: "constructor built a path, oracle reports none".into(),
                }),
                Err(_) => Ok(Outcome::Inconclusive {
                    constructed: true,
                    unsupported: delegated,
                }),
            }
        }
        Err(err) => {
            let unsupported = err.is_unsupported();
            if !with_oracle && !unsupported {
                return Ok(Outcome::Failure { unsupported });
            }
            match oracle_check(inst, opts.limits) {
                Ok(Some(p)) => {
                    let report = validate_path(inst, p.vertices());
                    if !report.ok {
                        return Err(CompareAbort::Invalid {
                            instance: to_json(inst),
                            report,
                        });
                    }
                    if unsupported {
                        Ok(Outcome::Success {
                            agreed: with_oracle,
                            unsupported,
                        })
                    } else {
                        Err(CompareAbort::Disagreement {
                            instance: to_json(inst),
                            detail: format!("oracle found a path, constructor failed: {err}"),
                        })
                    }
                }
                Ok(None) => Ok(Outcome::Failure { unsupported }),
                Err(_) => Ok(Outcome::Inconclusive {
                    constructed: false,
                    unsupported,
                }),
            }
        }
    }
}

/// Constructs, validates and (for the first `oracle_checks` instances)
/// oracle-solves `count` seeded random instances. Instance `i` uses seed
/// `seed + i`; results are merged in index order.
pub fn run_compare(cfg: &CompareConfig) -> Result<RunStats, CompareAbort> {
    let start = Instant::now();
    let opts = ConstructOptions {
        limits: cfg.limits,
        ..ConstructOptions::default()
    };
    let outcomes: Vec<Result<Outcome, CompareAbort>> = (0..cfg.count)
        .into_par_iter()
        .map(|i| {
            let inst = gen_random_instance(cfg.n, cfg.budget, cfg.seed.wrapping_add(i as u64))?;
            compare_one(&inst, i < cfg.oracle_checks, &opts)
        })
        .collect();
    let mut stats = RunStats {
        n: cfg.n,
        seed: cfg.seed,
        instances: cfg.count,
        ..RunStats::default()
    };
    for o in outcomes {
        match o? {
            Outcome::Success { agreed, unsupported } => {
                stats.successes += 1;
                stats.oracle_agreements += usize::from(agreed);
                stats.unsupported += usize::from(unsupported);
            }
            Outcome::Failure { unsupported } => {
                stats.failures += 1;
                stats.unsupported += usize::from(unsupported);
            }
            Outcome::Inconclusive { constructed, unsupported } => {
                stats.inconclusive += 1;
                stats.unsupported += usize::from(unsupported);
                if constructed {
                    stats.successes += 1;
                } else {
                    stats.failures += 1;
                }
            }
        }
    }
    stats.wall_time = start.elapsed().as_secs_f64();
    Ok(stats)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| HarnessError::Json {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let text = serde_json::to_string_pretty(value).expect("serializable value");
    std::fs::write(path, text + "\n").map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::ham_path;

    fn v(s: &str) -> Vertex {
        s.parse().unwrap()
    }

    #[test]
    fn generated_instances_respect_the_split() {
        let a = gen_instance(3, (0, 0), 1).unwrap();
        assert!(a.faults().is_empty() && a.forest().is_empty());
        let b = gen_instance(3, (2, 2), 7).unwrap();
        assert_eq!((b.faults().len(), b.forest().len()), (2, 2));
        assert!(matches!(
            gen_instance(2, (2, 1), 0),
            Err(HarnessError::Constraint(ConstraintError::BudgetExceeded { .. }))
        ));
        assert_eq!(gen_instance(3, (2, 2), 7).unwrap(), b);
    }

    #[test]
    fn digit_adjacency_matches_topology() {
        let h = BalancedHypercube::new(3).unwrap();
        for x in h.vertices() {
            for y in h.vertices() {
                assert_eq!(digits_adjacent(&x.digits(), &y.digits()), h.is_edge(x, y), "{x} {y}");
            }
        }
    }

    #[test]
    fn validator_reports_each_violation() {
        let inst = validate_instance(1, vec![], vec![], v("0"), v("1")).unwrap();
        let h = BalancedHypercube::new(1).unwrap();
        let p = ham_path(&h, inst.faults(), inst.forest(), inst.u(), inst.v(), SearchLimits::default())
            .unwrap()
            .unwrap();
        assert!(validate_path(&inst, p.vertices()).ok);

        let faulty = validate_instance(2, vec![Edge::new(v("00"), v("10")).unwrap()], vec![], v("00"), v("11")).unwrap();
        let route: Vec<Vertex> = ["00", "10", "20", "30"].iter().map(|s| v(s)).collect();
        let r = validate_path(&faulty, &route);
        assert!(r.has(ViolationKind::UsesFault));
        assert!(r.has(ViolationKind::NotHamiltonian));
        assert!(r.has(ViolationKind::WrongEndpoints));

        let pres = Instance::relaxed(1, vec![], vec![Edge::new(v("0"), v("1")).unwrap()], v("2"), v("1")).unwrap();
        let r = validate_path(&pres, &[v("2"), v("3"), v("0"), v("1")]);
        assert!(r.ok);
        let r = validate_path(&pres, &[v("1"), v("2"), v("3"), v("0")]);
        assert!(r.has(ViolationKind::MissesPrescribed));
        let r = validate_path(&pres, &[v("0"), v("2"), v("3"), v("1")]);
        assert!(r.has(ViolationKind::NonEdgeStep));
    }

    #[test]
    fn small_compare_runs() {
        let s = run_compare(&CompareConfig::new(1, 5, 0, 3)).unwrap();
        assert_eq!(s.successes, 5);
        let s = run_compare(&CompareConfig::new(2, 20, 2, 42)).unwrap();
        assert_eq!(s.successes, 20);
        assert_eq!(s.oracle_agreements, 20);
    }
}
