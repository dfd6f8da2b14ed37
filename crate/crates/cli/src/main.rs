//! `bhcube`: generate, solve, check and certify prescribed hamiltonian path
//! instances on balanced hypercubes.

use bhcube::constructor::{construct_traced, ConstructError, ConstructOptions};
use bhcube::harness::{gen_instance, gen_random_instance, read_json, run_compare, validate_path, write_json, CompareConfig};
use bhcube::solvers::{certify, certify_sampled, solve_instance, CertReport, SearchLimits, SolverError};
use bhcube::{HamPath, Instance};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

const EXIT_OK: u8 = 0;
const EXIT_VIOLATION: u8 = 1;
const EXIT_UNSUPPORTED: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "bhcube", version, about = "Prescribed hamiltonian paths in faulty balanced hypercubes")]
struct Cli {
    /// Node budget for exhaustive searches (defaults to $BHCUBE_NODE_BUDGET or 10^7).
    #[arg(long, global = true)]
    node_budget: Option<u64>,
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a random instance.
    Gen(GenArgs),
    /// Build a path with the recursive construction.
    Solve(SolveArgs),
    /// Validate a path against an instance.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        path: PathBuf,
    },
    /// Solve an instance with the exhaustive oracle.
    Oracle {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check every instance with |F| + |E(L)| <= k (or a random sample).
    Certify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Check this many random instances instead of all of them.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the construction against the oracle on random instances.
    Compare {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Maximum |F| + |E(L)| (defaults to 2n-2).
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Time the construction on random instances.
    Bench {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    /// Number of faulty edges.
    #[arg(long, default_value_t = 0)]
    faults: usize,
    /// Number of prescribed edges.
    #[arg(long, default_value_t = 0)]
    prescribed: usize,
    /// `F,L` shorthand overriding --faults and --prescribed.
    #[arg(long, value_parser = parse_split)]
    budget_split: Option<(usize, usize)>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_split(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected F,L")?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

struct Ctx {
    limits: SearchLimits,
    json: bool,
}

impl Ctx {
    fn emit<T: Serialize>(&self, value: &T, text: impl FnOnce() -> String) {
        if self.json {
            println!("{}", serde_json::to_string_pretty(value).expect("serializable report"));
        } else {
            println!("{}", text());
        }
    }
}

fn fail(msg: impl std::fmt::Display, code: u8) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn load_instance(path: &Path) -> Result<Instance, ExitCode> {
    read_json(path).map_err(|e| fail(e, EXIT_VIOLATION))
}

fn save<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), ExitCode> {
    match path {
        Some(p) => write_json(p, value).map_err(|e| fail(e, EXIT_VIOLATION)),
        None => {
            println!("{}", serde_json::to_string(value).expect("serializable value"));
            Ok(())
        }
    }
}

fn construct_code(e: &ConstructError) -> u8 {
    if e.is_unsupported() {
        EXIT_UNSUPPORTED
    } else if e.is_budget() {
        EXIT_BUDGET
    } else {
        EXIT_VIOLATION
    }
}

#[derive(Serialize)]
struct SolveReport<'a> {
    ok: bool,
    path: Option<&'a HamPath>,
    trace: Option<&'a bhcube::constructor::Trace>,
    error: Option<String>,
}

fn run_solve(ctx: &Ctx, args: &SolveArgs) -> Result<u8, ExitCode> {
    let inst = load_instance(&args.input)?;
    let opts = ConstructOptions {
        limits: ctx.limits,
        ..ConstructOptions::default()
    };
    match construct_traced(&inst, &opts) {
        Ok((path, trace)) => {
            if let Some(out) = &args.out {
                save(Some(out), &path)?;
            }
            let report = SolveReport {
                ok: true,
                path: Some(&path),
                trace: Some(&trace),
                error: None,
            };
            ctx.emit(&report, || {
                let mut s = format!("path of {} vertices", path.len());
                if trace.delegated {
                    s.push_str(" (delegated to the oracle)");
                }
                if args.out.is_none() {
                    s.push('\n');
                    s.push_str(&serde_json::to_string(&path).expect("path serializes"));
                }
                s
            });
            Ok(EXIT_OK)
        }
        Err(e) => {
            let report = SolveReport {
                ok: false,
                path: None,
                trace: None,
                error: Some(e.to_string()),
            };
            ctx.emit(&report, || format!("no path: {e}"));
            Ok(construct_code(&e))
        }
    }
}

fn run_check(ctx: &Ctx, input: &Path, path: &Path) -> Result<u8, ExitCode> {
    let inst = load_instance(input)?;
    let p: HamPath = read_json(path).map_err(|e| fail(e, EXIT_VIOLATION))?;
    let report = validate_path(&inst, p.vertices());
    ctx.emit(&report, || {
        if report.ok {
            "ok".into()
        } else {
            report
                .violations
                .iter()
                .map(|v| format!("{:?}: {}", v.kind, v.detail))
                .collect::<Vec<_>>()
                .join("\n")
        }
    });
    Ok(if report.ok { EXIT_OK } else { EXIT_VIOLATION })
}

#[derive(Serialize)]
struct OracleReport {
    feasible: Option<bool>,
    path: Option<HamPath>,
    error: Option<String>,
}

fn run_oracle(ctx: &Ctx, input: &Path, out: Option<&Path>) -> Result<u8, ExitCode> {
    let inst = load_instance(input)?;
    let (report, code) = match solve_instance(&inst, ctx.limits) {
        Ok(Some(p)) => {
            if let Some(o) = out {
                save(Some(o), &p)?;
            }
            (
                OracleReport {
                    feasible: Some(true),
                    path: Some(p),
                    error: None,
                },
                EXIT_OK,
            )
        }
        Ok(None) => (
            OracleReport {
                feasible: Some(false),
                path: None,
                error: None,
            },
            EXIT_VIOLATION,
        ),
        Err(e) => {
            let code = if matches!(e, SolverError::SearchBudgetExceeded { .. }) {
                EXIT_BUDGET
            } else {
                EXIT_VIOLATION
            };
            (
                OracleReport {
                    feasible: None,
                    path: None,
                    error: Some(e.to_string()),
                },
                code,
            )
        }
    };
    ctx.emit(&report, || match report.feasible {
        Some(true) => "feasible".into(),
        Some(false) => "infeasible".into(),
        None => format!("inconclusive: {}", report.error.as_deref().unwrap_or("")),
    });
    Ok(code)
}

fn run_certify(ctx: &Ctx, n: usize, k: usize, samples: Option<usize>, seed: u64) -> Result<u8, ExitCode> {
    let start = Instant::now();
    let report: CertReport = match samples {
        Some(s) => certify_sampled(n, k, s, seed, ctx.limits),
        None => certify(n, k, ctx.limits),
    }
    .map_err(|e| fail(e, EXIT_VIOLATION))?;
    let secs = start.elapsed().as_secs_f64();
    ctx.emit(&report, || {
        let mut s = format!(
            "n = {n}, k = {k}: {} instances, {} failures, {} inconclusive ({secs:.1}s)",
            report.instances_checked,
            report.failures.len(),
            report.inconclusive.len()
        );
        if let Some(w) = report.failures.first() {
            s.push_str(&format!("\nfirst failure: {}", serde_json::to_string(w).expect("instance serializes")));
        }
        s
    });
    Ok(if !report.failures.is_empty() {
        EXIT_VIOLATION
    } else if !report.inconclusive.is_empty() {
        EXIT_BUDGET
    } else {
        EXIT_OK
    })
}

fn run_compare_cmd(ctx: &Ctx, n: usize, count: usize, budget: Option<usize>, seed: u64) -> Result<u8, ExitCode> {
    let mut cfg = CompareConfig::new(n, count, budget.unwrap_or(Instance::budget_for(n)), seed);
    cfg.limits = ctx.limits;
    let stats = run_compare(&cfg).map_err(|e| fail(e, EXIT_VIOLATION))?;
    ctx.emit(&stats, || {
        format!(
            "n = {}: {} instances, {} successes, {} failures, {} oracle agreements, {} unsupported, {} inconclusive ({:.1}s)",
            stats.n,
            stats.instances,
            stats.successes,
            stats.failures,
            stats.oracle_agreements,
            stats.unsupported,
            stats.inconclusive,
            stats.wall_time
        )
    });
    Ok(if stats.failures == 0 { EXIT_OK } else { EXIT_VIOLATION })
}

#[derive(Serialize)]
struct BenchReport {
    n: usize,
    instances: usize,
    built: usize,
    errors: usize,
    total_seconds: f64,
    max_seconds: f64,
}

fn run_bench(ctx: &Ctx, n: usize, count: usize, budget: Option<usize>, seed: u64) -> Result<u8, ExitCode> {
    let opts = ConstructOptions {
        limits: ctx.limits,
        ..ConstructOptions::default()
    };
    let budget = budget.unwrap_or(Instance::budget_for(n));
    let mut report = BenchReport {
        n,
        instances: count,
        built: 0,
        errors: 0,
        total_seconds: 0.0,
        max_seconds: 0.0,
    };
    for i in 0..count as u64 {
        let inst = gen_random_instance(n, budget, seed.wrapping_add(i)).map_err(|e| fail(e, EXIT_VIOLATION))?;
        let start = Instant::now();
        let res = construct_traced(&inst, &opts);
        let secs = start.elapsed().as_secs_f64();
        report.total_seconds += secs;
        report.max_seconds = report.max_seconds.max(secs);
        match res {
            Ok(_) => report.built += 1,
            Err(_) => report.errors += 1,
        }
    }
    ctx.emit(&report, || {
        format!(
            "n = {n}: built {}/{} ({} errors), mean {:.3}s, max {:.3}s",
            report.built,
            report.instances,
            report.errors,
            report.total_seconds / count.max(1) as f64,
            report.max_seconds
        )
    });
    Ok(EXIT_OK)
}

fn run_gen(args: &GenArgs) -> Result<u8, ExitCode> {
    let split = args.budget_split.unwrap_or((args.faults, args.prescribed));
    let inst = gen_instance(args.n, split, args.seed).map_err(|e| fail(e, EXIT_VIOLATION))?;
    save(args.out.as_deref(), &inst)?;
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        limits: cli.node_budget.map(SearchLimits::with_budget).unwrap_or_default(),
        json: cli.json,
    };
    let res = match &cli.cmd {
        Cmd::Gen(a) => run_gen(a),
        Cmd::Solve(a) => run_solve(&ctx, a),
        Cmd::Check { input, path } => run_check(&ctx, input, path),
        Cmd::Oracle { input, out } => run_oracle(&ctx, input, out.as_deref()),
        Cmd::Certify { n, k, samples, seed } => run_certify(&ctx, *n, *k, *samples, *seed),
        Cmd::Compare { n, count, budget, seed } => run_compare_cmd(&ctx, *n, *count, *budget, *seed),
        Cmd::Bench { n, count, budget, seed } => run_bench(&ctx, *n, *count, *budget, *seed),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(code) => code,
    }
}
