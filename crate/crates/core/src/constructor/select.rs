//! Choosing the partition dimension and rotating the blocks so that block 0
//! carries the largest load.

use super::ConstructError;
use crate::constraints::{restrict, BlockData, Instance};
use crate::topology::{Automorphism, PartitionView, Relabeling, Vertex};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DimensionRule {
    /// `|F| = 2n-3` with every fault at one vertex: split along a dimension
    /// holding a fault but no prescribed edge.
    ConcentratedFaults,
    /// A dimension holding at most one edge of `F ∪ E(L)`.
    SparseDimension,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionChoice {
    pub j: usize,
    pub rule: DimensionRule,
    pub crossing_fault_count: usize,
    pub crossing_prescribed_count: usize,
}

fn common_vertex(inst: &Instance) -> Option<Vertex> {
    let mut faults = inst.faults().iter();
    let first = faults.next()?;
    let rest: Vec<_> = faults.collect();
    [first.a(), first.b()].into_iter().find(|x| rest.iter().all(|e| e.contains(*x)))
}

/// Picks the largest admissible dimension `j >= 1`.
pub fn select_dimension(inst: &Instance) -> Result<DimensionChoice, ConstructError> {
    let n = inst.n();
    if n < 2 {
        return Err(ConstructError::Precondition(format!("cannot partition BH_{n}")));
    }
    let mut f = vec![0usize; n];
    let mut l = vec![0usize; n];
    for e in inst.faults() {
        f[e.dimension()] += 1;
    }
    for e in inst.forest().edges() {
        l[e.dimension()] += 1;
    }
    let concentrated = inst.faults().len() + 3 == 2 * n && common_vertex(inst).is_some();
    let (rule, j) = if concentrated {
        let j = (1..n).rev().find(|&j| f[j] >= 1 && l[j] == 0);
        (DimensionRule::ConcentratedFaults, j)
    } else {
        let j = (1..n).rev().find(|&j| f[j] + l[j] <= 1);
        (DimensionRule::SparseDimension, j)
    };
    let j = j.ok_or(ConstructError::NoAdmissibleDimension)?;
    Ok(DimensionChoice {
        j,
        rule,
        crossing_fault_count: f[j],
        crossing_prescribed_count: l[j],
    })
}

/// Image of an instance under a relabeling.
pub fn map_instance(inst: &Instance, r: &Relabeling) -> Instance {
    Instance::relaxed(
        inst.n(),
        inst.faults().iter().map(|e| r.apply_edge(e)),
        inst.forest().edges().iter().map(|e| r.apply_edge(e)),
        r.apply(inst.u()),
        r.apply(inst.v()),
    )
    .expect("automorphic image of a valid instance")
}

/// Result of rotating the blocks of a partition.
#[derive(Debug, Clone)]
pub struct Normalized {
    /// Added to the partition digit; block `i` becomes block `i + shift`.
    pub shift: u8,
    pub relabel: Relabeling,
    pub instance: Instance,
    pub data: BlockData,
}

/// Applies the digit shift moving a maximum-load block to position 0. Among
/// several maximum blocks the smallest shift wins.
pub fn normalize_blocks(inst: &Instance, view: &PartitionView, data: &BlockData) -> Result<Normalized, ConstructError> {
    let loads = data.loads();
    let max = loads.iter().copied().max().unwrap_or(0);
    let shift = (0..4u8)
        .filter(|&a| loads[usize::from(a)] == max)
        .map(|a| (4 - a) % 4)
        .min()
        .unwrap_or(0);
    let step = Automorphism::digit_shift(&inst.graph(), view.dimension(), shift)
        .map_err(|e| ConstructError::Precondition(e.to_string()))?;
    let relabel = Relabeling::identity().then(step);
    let instance = map_instance(inst, &relabel);
    let rotated = restrict(&instance, view);
    let after = rotated.loads();
    for i in 0..4 {
        assert_eq!(after[(i + usize::from(shift)) % 4], loads[i], "rotation moved block loads");
    }
    assert_eq!(after[0], max, "block 0 must carry the maximum load");
    Ok(Normalized {
        shift,
        relabel,
        instance,
        data: rotated,
    })
}
