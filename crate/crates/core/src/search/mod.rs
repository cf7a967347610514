//! Subproblem solver: delete-relaxed layering, relaxed-plan heuristic,
//! backward relevance reduction and penalty-biased greedy best-first search.

mod gbfs;
mod reduce;
mod relaxed;

pub use gbfs::{biased_objective, estimate_conflicts, solve_subproblem, Bias, SearchConfig, SearchFailure, SearchOutcome};
pub use reduce::reduce_actions;
pub use relaxed::{ff_heuristic, relaxed_graph, HeuristicValue, RelaxedGraph, Relaxation};
