//! Exact feasibility and optimization over the execution grid.
//!
//! The solver runs a deterministic depth-first branch-and-bound over one
//! decision variable per (task, period window): the slot and channel of that
//! window's execution. Slot collisions, intersections, jitter gaps,
//! dependency ages and (for adaptation) allocation-change bounds are pruned
//! eagerly; every complete assignment is confirmed against the validator
//! before it counts as feasible, so the validator remains the single source
//! of truth for what the solver may emit.

mod lp;
mod merge;
mod solver;

pub use lp::{export_milp, export_solution, import_solution, LpError};
pub use merge::{merge_schedules, MergeError, MergeResult};
pub use solver::{
    misalignment_count, solve, solve_adaptation, SolveOutcome, SolveStats, SolveStatus,
};

use crate::model::{Schedule, TaskSet};

/// Objective selector for [`solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Objective {
    /// Pure decision problem: stop at the first feasible schedule.
    #[default]
    None,
    /// Minimize the number of tasks changing their relative time-slot
    /// between consecutive own-periods (jitter objective).
    MinimizeSlotChanges,
    /// Maximize unmoved allocations against a combined schedule; only
    /// meaningful for adaptation runs.
    MaximizeStability,
}

/// A task set together with the objective and optional combined schedule,
/// ready for export in LP text format.
#[derive(Debug, Clone, Copy)]
pub struct MilpInstance<'a> {
    pub taskset: &'a TaskSet,
    pub objective: Objective,
    /// Combined schedule C for adaptation; may violate constraint 1.
    pub combined: Option<&'a Schedule>,
}

impl<'a> MilpInstance<'a> {
    pub fn new(taskset: &'a TaskSet, objective: Objective) -> Self {
        MilpInstance {
            taskset,
            objective,
            combined: None,
        }
    }

    pub fn with_combined(taskset: &'a TaskSet, combined: &'a Schedule) -> Self {
        MilpInstance {
            taskset,
            objective: Objective::MaximizeStability,
            combined: Some(combined),
        }
    }
}
