//! The partition-and-resolve outer loop: penalties, subplan merging,
//! violation counting and producible-resource reduction.

mod engine;
mod penalty;
mod producible;

pub use engine::{
    count_active, count_violations, merge, resolve, start_states, Merged, PlanOutcome, ResolveConfig, ResolveError,
    StartState, Subplan,
};
pub use penalty::{update_penalties, PenaltyMatrix, Strategy, ViolationMatrix};
pub use producible::{plan, reduced_task};
