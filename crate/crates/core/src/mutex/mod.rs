//! Persistent mutexes, activation conditions on scheduled pairs, plan
//! validation and constraint-locality metrics.

mod active;
mod locality;
mod table;
mod validate;

pub use active::{is_active, Activation, Condition};
pub use locality::{locality, stage_of, LocalityReport, PartitionError};
pub use table::{persistent_mutexes, self_mutex, Cause, MutexTable, Witness};
pub(crate) use table::clobbers;
pub use validate::{active_pairs, validate, ActiveMutex, Missing, MissingGoal, Unsupported, ValidationReport};
pub(crate) use validate::event_times;
