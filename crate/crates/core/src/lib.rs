//! The balanced hypercube `BH_n` and hamiltonian paths in it that avoid a set
//! of faulty edges and pass through a prescribed linear forest.
//!
//! * [`topology`]: labels, adjacency, automorphisms, the 4-way partition.
//! * [`constraints`]: linear forests, instances, block restriction.
//! * [`solvers`]: exhaustive backtracking oracles and certification.
//! * [`constructor`]: the recursive partition-and-splice construction.
//! * [`harness`]: instance generation, path validation, comparison runs.

pub mod constraints;
pub mod constructor;
pub mod harness;
pub mod solvers;
pub mod topology;

pub use constraints::{compatible, restrict, validate_instance, validate_linear_forest, BlockData, Instance, LinearForest};
pub use constructor::{construct, ConstructError};
pub use harness::{validate_path, ValidationReport};
pub use solvers::{ham_path, HamPath, SearchLimits, SolverError};
pub use topology::{BalancedHypercube, Edge, Parity, PartitionView, Sign, Vertex};
