use fixedbitset::FixedBitSet;

use crate::search::{reduce_actions, Relaxation};
use crate::task::{FactId, GroundTask};

use super::landmarks::landmarks;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subproblem {
    pub index: usize,
    /// Goal facts of this subproblem; a single conjunct unless bundled.
    pub goals: Vec<FactId>,
    pub relevant: FixedBitSet,
    /// Landmark chain ending with the goals, computed once from the initial
    /// state. Just the goals when no landmark analysis was possible.
    pub landmarks: Vec<FactId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubproblemSet {
    pub subproblems: Vec<Subproblem>,
}

impl SubproblemSet {
    pub fn len(&self) -> usize {
        self.subproblems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subproblems.is_empty()
    }

    /// Subproblem owning each goal fact, for goals listed in some subproblem.
    pub fn owner_of(&self, fact: FactId) -> Option<usize> {
        self.subproblems.iter().position(|s| s.goals.contains(&fact))
    }
}

/// One subproblem per goal conjunct, in the order the problem lists them.
pub fn partition(task: &GroundTask) -> SubproblemSet {
    partition_bundles(task, 1)
}

/// Groups consecutive goal conjuncts into bundles of `size` (the last bundle
/// may be smaller) and builds one subproblem per bundle.
pub fn partition_bundles(task: &GroundTask, size: usize) -> SubproblemSet {
    let size = size.max(1);
    let subproblems = task
        .goals
        .chunks(size)
        .enumerate()
        .map(|(index, goals)| {
            let relevant = reduce_actions(task, goals);
            let relax = Relaxation::new(task, &relevant);
            let chain = landmarks(&relax, &task.init, goals).unwrap_or_else(|_| goals.to_vec());
            Subproblem {
                index,
                goals: goals.to_vec(),
                relevant,
                landmarks: chain,
            }
        })
        .collect();
    SubproblemSet { subproblems }
}
