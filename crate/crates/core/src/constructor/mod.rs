//! Recursive construction of a prescribed hamiltonian path.
//!
//! For `n >= 3` the instance is split along one dimension into four copies of
//! `BH_{n-1}`. The blocks are relabeled so that the split runs along the last
//! digit and block 0 carries the largest load, and the path is then assembled
//! from block-level pieces joined by crossing edges. Block pieces come from
//! recursive calls on `BH_{n-1}`, from hamiltonian cycles of an overloaded
//! block cut into arcs, and from splitting a block path at a chosen edge. The
//! case analysis is driven by [`engine`], which walks the admissible block
//! orders and picks splice vertices with the selection operations in
//! [`lemmas`].

pub mod engine;
pub mod heavy;
pub mod lemmas;
pub mod select;

use crate::constraints::{restrict, validate_instance, BlockData, ConstraintError, Instance, LinearForest};
use crate::harness::validate_path;
use crate::solvers::{solve_instance, HamPath, SearchLimits, SolverError};
use crate::topology::{Automorphism, Edge, PartitionView, Relabeling, Vertex};
use lemmas::LemmaError;
use select::{map_instance, normalize_blocks, select_dimension, DimensionChoice};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

pub use select::DimensionRule;

/// Largest `n` at which unsupported cases are handed to the oracle.
pub const DELEGATE_LEVEL: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("unsupported case: {0}")]
    UnsupportedCase(String),
    #[error("no admissible partition dimension other than 0")]
    NoAdmissibleDimension,
    #[error("instance has no hamiltonian path")]
    Infeasible,
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Lemma(#[from] LemmaError),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("construction failed: {context}")]
    ConstructionFailure { context: String },
    #[error("constructed path is invalid: {0}")]
    InvalidOutput(String),
}

impl ConstructError {
    /// The instance lies outside the implemented case analysis.
    pub fn is_unsupported(&self) -> bool {
        matches!(self, ConstructError::UnsupportedCase(_) | ConstructError::NoAdmissibleDimension)
    }

    /// A search budget ran out somewhere below this call.
    pub fn is_budget(&self) -> bool {
        matches!(self, ConstructError::Solver(SolverError::SearchBudgetExceeded { .. }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseFamily {
    /// No crossing edge in `L` or `F`.
    NoCrossing,
    /// One prescribed crossing edge.
    PrescribedCrossing,
    /// One faulty crossing edge.
    FaultCrossing,
    /// Two faulty crossing edges. Only delegated to the oracle.
    FaultCrossing2,
}

/// Load of block 0 relative to the working budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LoadBucket {
    /// At most `2n-4`.
    Light,
    /// Exactly `2n-3`.
    Heavy,
    /// Exactly `2n-2`.
    Full,
}

impl LoadBucket {
    pub fn of(n: usize, load: usize) -> LoadBucket {
        if load + 4 <= 2 * n {
            LoadBucket::Light
        } else if load + 3 == 2 * n {
            LoadBucket::Heavy
        } else {
            LoadBucket::Full
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseTag {
    pub family: CaseFamily,
    pub load: usize,
    pub bucket: LoadBucket,
    pub u_block: u8,
    pub v_block: u8,
    /// Block of the even end of the crossing edge, if there is one.
    pub l: Option<u8>,
}

/// Classifies a normalized partition. Block indices refer to the rotated
/// labeling.
pub fn classify(inst: &Instance, view: &PartitionView, data: &BlockData) -> CaseTag {
    let family = match (data.lc.len(), data.fc.len()) {
        (0, 0) => CaseFamily::NoCrossing,
        (1, 0) => CaseFamily::PrescribedCrossing,
        (0, 1) => CaseFamily::FaultCrossing,
        _ => CaseFamily::FaultCrossing2,
    };
    let l = data
        .lc
        .iter()
        .chain(&data.fc)
        .next()
        .map(|e| view.block_of(e.oriented().0));
    CaseTag {
        family,
        load: data.load(0),
        bucket: LoadBucket::of(inst.n(), data.load(0)),
        u_block: view.block_of(inst.u()),
        v_block: view.block_of(inst.v()),
        l,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstructOptions {
    /// Limits for every oracle call made on the way.
    pub limits: SearchLimits,
    /// Search nodes the splice engine may expand per partition level.
    pub step_budget: usize,
    /// Candidates tried for an unconstrained splice vertex.
    pub free_cap: usize,
    /// Cut edges tried when splitting a block path.
    pub cut_cap: usize,
    /// Arc assignments tried per hamiltonian cycle of an overloaded block.
    pub heavy_cap: usize,
    /// Longest block order considered.
    pub max_segments: usize,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions {
            limits: SearchLimits::default(),
            step_budget: 20_000,
            free_cap: 6,
            cut_cap: 12,
            heavy_cap: 24,
            max_segments: 9,
        }
    }
}

/// What happened at the top partition level.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub n: usize,
    pub choice: Option<DimensionChoice>,
    pub case: Option<CaseTag>,
    /// Block order of the assembled path, in rotated labels.
    pub skeleton: Vec<u8>,
    /// `n <= 2`: the oracle is the construction.
    pub base_case: bool,
    /// An unsupported case handed to the oracle.
    pub delegated: bool,
}

pub fn construct(inst: &Instance) -> Result<HamPath, ConstructError> {
    construct_with(inst, &ConstructOptions::default())
}

pub fn construct_with(inst: &Instance, opts: &ConstructOptions) -> Result<HamPath, ConstructError> {
    construct_traced(inst, opts).map(|(p, _)| p)
}

fn oracle(inst: &Instance, limits: SearchLimits) -> Result<HamPath, ConstructError> {
    solve_instance(inst, limits)?.ok_or(ConstructError::Infeasible)
}

/// An instance relabeled so that the chosen dimension is the last one and
/// block 0 carries the largest load.
#[derive(Debug, Clone)]
pub struct Partitioned {
    pub choice: DimensionChoice,
    /// Maps original labels to working labels.
    pub relabel: Relabeling,
    pub view: PartitionView,
    pub instance: Instance,
    pub data: BlockData,
}

/// Selects the partition dimension and normalizes the blocks of `inst`
/// (`n >= 2`).
pub fn partition(inst: &Instance) -> Result<Partitioned, ConstructError> {
    let n = inst.n();
    let choice = select_dimension(inst)?;
    let h = inst.graph();
    let mut relabel = Relabeling::identity();
    if choice.j != n - 1 {
        let swap = Automorphism::swap_digits(&h, choice.j, n - 1).map_err(|e| ConstructError::Precondition(e.to_string()))?;
        relabel = relabel.then(swap);
    }
    let swapped = map_instance(inst, &relabel);
    let view = PartitionView::new(&h, n - 1).map_err(|e| ConstructError::Precondition(e.to_string()))?;
    let data = restrict(&swapped, &view);
    let norm = normalize_blocks(&swapped, &view, &data)?;
    for step in norm.relabel.steps() {
        relabel = relabel.then(*step);
    }
    Ok(Partitioned {
        choice,
        relabel,
        view,
        instance: norm.instance,
        data: norm.data,
    })
}

/// Builds a path for `inst` and reports how it was obtained.
pub fn construct_traced(inst: &Instance, opts: &ConstructOptions) -> Result<(HamPath, Trace), ConstructError> {
    let n = inst.n();
    let mut trace = Trace {
        n,
        ..Trace::default()
    };
    if n <= 2 {
        trace.base_case = true;
        return Ok((oracle(inst, opts.limits)?, trace));
    }
    let part = partition(inst)?;
    trace.choice = Some(part.choice);
    let (relabel, view, work) = (part.relabel, part.view, part.instance);
    let case = classify(&work, &view, &part.data);
    trace.case = Some(case);

    let path = if case.family == CaseFamily::FaultCrossing2 {
        if n > DELEGATE_LEVEL {
            return Err(ConstructError::UnsupportedCase(format!(
                "two faulty crossing edges at n = {n}"
            )));
        }
        trace.delegated = true;
        oracle(inst, opts.limits)?
    } else {
        match engine::run(&work, &view, &part.data, case, opts) {
            Ok((found, skeleton)) => {
                trace.skeleton = skeleton;
                let back = relabel.inverse();
                HamPath(found.into_iter().map(|x| back.apply(x)).collect())
            }
            Err(e) if !e.is_budget() && (inst.faults().is_empty() || inst.forest().is_empty()) => {
                // Fault-free and forest-free instances are covered by known
                // laceability results rather than by the splice analysis.
                if n > DELEGATE_LEVEL {
                    return Err(ConstructError::UnsupportedCase(format!(
                        "{} at n = {n} outside the splice analysis ({e})",
                        if inst.faults().is_empty() { "fault-free instance" } else { "forest-free instance" }
                    )));
                }
                trace.delegated = true;
                oracle(inst, opts.limits)?
            }
            Err(e) => return Err(e),
        }
    };
    let report = validate_path(inst, path.vertices());
    if !report.ok {
        return Err(ConstructError::InvalidOutput(format!("{:?}", report.violations)));
    }
    Ok((path, trace))
}

/// Hamiltonian path of `BH_m - faults` from `a` to `b` through `forest`,
/// obtained recursively. The sub-instance must respect the budget `2m-2`.
pub(crate) fn solve_sub(
    m: usize,
    faults: &BTreeSet<Edge>,
    forest: &LinearForest,
    a: Vertex,
    b: Vertex,
    opts: &ConstructOptions,
) -> Result<Vec<Vertex>, ConstructError> {
    let used = faults.len() + forest.len();
    if used > Instance::budget_for(m) {
        return Err(ConstructError::Precondition(format!(
            "sub-instance load {used} exceeds the budget {} of BH_{m}",
            Instance::budget_for(m)
        )));
    }
    let inst = validate_instance(m, faults.iter().copied(), forest.edges().iter().copied(), a, b)?;
    let mut path = construct_with(&inst, opts)?.0;
    if path.first() != Some(&a) {
        path.reverse();
    }
    Ok(path)
}
