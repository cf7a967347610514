use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;

use crate::task::{ActionId, FactId, GroundAction, GroundTask, Timing};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cause {
    /// One action deletes an add effect of the other.
    InconsistentEffects,
    /// One action deletes a precondition of the other.
    Interference,
}

/// One clashing fact, with the timing bucket it sits in on each side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Witness {
    pub cause: Cause,
    pub fact: FactId,
    pub on_a: Timing,
    pub on_b: Timing,
}

impl Witness {
    fn flipped(self) -> Self {
        Witness {
            on_a: self.on_b,
            on_b: self.on_a,
            ..self
        }
    }
}

/// Symmetric, irreflexive persistent-mutex relation over ground actions.
#[derive(Debug, Clone)]
pub struct MutexTable {
    n: usize,
    adjacency: Vec<FixedBitSet>,
    // Witnesses are stored once, oriented from the lower id to the higher.
    witnesses: BTreeMap<(ActionId, ActionId), Vec<Witness>>,
}

impl MutexTable {
    pub fn num_actions(&self) -> usize {
        self.n
    }

    pub fn contains(&self, a: ActionId, b: ActionId) -> bool {
        self.adjacency[a.index()].contains(b.index())
    }

    /// Number of unordered pairs in the relation.
    pub fn len(&self) -> usize {
        self.witnesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }

    /// Witnesses oriented so that `on_a` refers to `a`.
    pub fn witnesses(&self, a: ActionId, b: ActionId) -> Vec<Witness> {
        if a <= b {
            self.witnesses.get(&(a, b)).cloned().unwrap_or_default()
        } else {
            self.witnesses
                .get(&(b, a))
                .map(|v| v.iter().map(|w| w.flipped()).collect())
                .unwrap_or_default()
        }
    }

    pub fn neighbors(&self, a: ActionId) -> impl Iterator<Item = ActionId> + '_ {
        self.adjacency[a.index()].ones().map(|i| ActionId(i as u32))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (ActionId, ActionId)> + '_ {
        self.witnesses.keys().copied()
    }
}

fn bucketed_pre(a: &GroundAction) -> impl Iterator<Item = (FactId, Timing)> + '_ {
    a.pre_start
        .iter()
        .map(|&f| (f, Timing::Start))
        .chain(a.pre_overall.iter().map(|&f| (f, Timing::OverAll)))
        .chain(a.pre_end.iter().map(|&f| (f, Timing::End)))
}

fn bucketed_add(a: &GroundAction) -> impl Iterator<Item = (FactId, Timing)> + '_ {
    a.add_start
        .iter()
        .map(|&f| (f, Timing::Start))
        .chain(a.add_end.iter().map(|&f| (f, Timing::End)))
}

fn bucketed_del(a: &GroundAction) -> impl Iterator<Item = (FactId, Timing)> + '_ {
    a.del_start
        .iter()
        .map(|&f| (f, Timing::Start))
        .chain(a.del_end.iter().map(|&f| (f, Timing::End)))
}

/// True when `a` deletes something `b` adds or requires, in any bucket.
pub(crate) fn clobbers(a: &GroundAction, b: &GroundAction) -> bool {
    a.all_del().any(|f| b.adds(f) || b.requires(f))
}

/// Actions that can conflict with another instance of themselves.
pub fn self_mutex(a: &GroundAction) -> bool {
    clobbers(a, a)
}

pub fn persistent_mutexes(task: &GroundTask) -> MutexTable {
    let n = task.actions.len();
    let nf = task.num_facts();
    let mut adders: Vec<Vec<(ActionId, Timing)>> = vec![Vec::new(); nf];
    let mut deleters: Vec<Vec<(ActionId, Timing)>> = vec![Vec::new(); nf];
    let mut needers: Vec<Vec<(ActionId, Timing)>> = vec![Vec::new(); nf];
    for a in &task.actions {
        for (f, t) in bucketed_add(a) {
            adders[f.index()].push((a.id, t));
        }
        for (f, t) in bucketed_del(a) {
            deleters[f.index()].push((a.id, t));
        }
        for (f, t) in bucketed_pre(a) {
            needers[f.index()].push((a.id, t));
        }
    }

    let mut witnesses: BTreeMap<(ActionId, ActionId), Vec<Witness>> = BTreeMap::new();
    let mut record = |d: ActionId, td: Timing, o: ActionId, to: Timing, cause: Cause, fact: FactId| {
        if d == o {
            return;
        }
        // Orient from deleter `d` to other `o`, then normalize to (low, high).
        let w = Witness {
            cause,
            fact,
            on_a: td,
            on_b: to,
        };
        let (key, w) = if d < o { ((d, o), w) } else { ((o, d), w.flipped()) };
        witnesses.entry(key).or_default().push(w);
    };
    for f in 0..nf {
        let fact = FactId(f as u32);
        for &(d, td) in &deleters[f] {
            for &(o, to) in &adders[f] {
                record(d, td, o, to, Cause::InconsistentEffects, fact);
            }
            for &(o, to) in &needers[f] {
                record(d, td, o, to, Cause::Interference, fact);
            }
        }
    }

    let mut adjacency = vec![FixedBitSet::with_capacity(n); n];
    for (&(a, b), ws) in witnesses.iter_mut() {
        ws.sort();
        ws.dedup();
        adjacency[a.index()].insert(b.index());
        adjacency[b.index()].insert(a.index());
    }
    MutexTable {
        n,
        adjacency,
        witnesses,
    }
}
