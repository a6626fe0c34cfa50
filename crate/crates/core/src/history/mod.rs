//! Projector families, history grids, branch vectors and the decoherence
//! functional.

mod branch;
mod chain;
mod coarse;
mod family;
mod functional;
mod grid;
mod projector;

pub use branch::BranchSet;
pub use chain::{branch_vector, class_operator, class_operators_built, EvalMode, EvalOptions};
pub use coarse::{coarse_grain, Partition};
pub use family::{validate_family, FamilyIssue, FamilyViolation, Picture, ProjectorFamily};
pub use functional::{decoherence_functional, probabilities, DecoherenceReport};
pub use grid::{Histories, History, HistoryGrid};
pub use projector::Projector;

use crate::error::Result;
use crate::linalg::{Dynamics, StateVector};

/// Builds the branch set for `grid` and its decoherence report in one go.
pub fn evaluate(
    grid: &HistoryGrid,
    dynamics: &Dynamics,
    psi: &StateVector,
    options: &EvalOptions,
) -> Result<(BranchSet, DecoherenceReport)> {
    let branches = BranchSet::build(grid, dynamics, psi, options)?;
    let report = decoherence_functional(&branches, options.epsilon);
    Ok((branches, report))
}
