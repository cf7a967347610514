//! Partition-and-resolve planning for STRIPS and temporal tasks.

pub mod decompose;
pub mod harness;
pub mod mutex;
pub mod pddl;
pub mod pert;
pub mod resolve;
pub mod search;
pub mod task;
