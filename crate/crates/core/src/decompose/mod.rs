//! Goal partitioning, landmark chains, fact groups and their transition
//! paths, and producible-resource handling.

mod groups;
mod landmarks;
mod partition;
mod paths;
mod producible;

use thiserror::Error;

use crate::task::{FactId, ResourceId};

pub use groups::{fact_groups, FactGroup};
pub use landmarks::landmarks;
pub use partition::{partition, partition_bundles, Subproblem, SubproblemSet};
pub use paths::{path_find, path_optimize, shortest_path, EdgeWeight, PathFix};
pub use producible::{detect_producible, generator_prefix, required_amounts, resource_loop, LoopOutcome, ProducibleSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecomposeError {
    #[error("fact {} is unreachable in the relaxation", .0.0)]
    Unreachable(FactId),
    #[error("no path to the goal in the transition graph")]
    NoPath,
    #[error("negative edge weight")]
    NegativeWeight,
    #[error("no applicable generator for resource {}", .0.0)]
    GeneratorStuck(ResourceId),
}
