use fixedbitset::FixedBitSet;

use crate::task::{ActionId, FactId, GroundTask};

/// Backward relevance: every achiever of an open fact becomes relevant and
/// its preconditions become open, until nothing is left open. Numeric
/// conditions make every action increasing that resource relevant.
pub fn reduce_actions(task: &GroundTask, goals: &[FactId]) -> FixedBitSet {
    let nf = task.num_facts();
    let mut adders: Vec<Vec<ActionId>> = vec![Vec::new(); nf];
    let mut increasers: Vec<Vec<ActionId>> = vec![Vec::new(); task.resources.len()];
    for a in &task.actions {
        for f in a.all_add() {
            adders[f.index()].push(a.id);
        }
        for e in a.numeric_effects.iter().filter(|e| e.delta > num_traits::zero()) {
            increasers[e.resource.index()].push(a.id);
        }
    }

    let mut open: Vec<FactId> = Vec::new();
    let mut closed = FixedBitSet::with_capacity(nf);
    let mut relevant = FixedBitSet::with_capacity(task.actions.len());
    let mut resources_seen = FixedBitSet::with_capacity(task.resources.len());
    for &g in goals {
        if !closed.put(g.index()) {
            open.push(g);
        }
    }
    let mut pending: Vec<ActionId> = Vec::new();
    loop {
        if let Some(f) = open.pop() {
            pending.extend(adders[f.index()].iter().copied());
        } else if pending.is_empty() {
            break;
        }
        while let Some(a) = pending.pop() {
            if relevant.put(a.index()) {
                continue;
            }
            let action = task.action(a);
            for f in action.all_pre() {
                if !closed.put(f.index()) {
                    open.push(f);
                }
            }
            for c in &action.numeric_pre {
                if !resources_seen.put(c.resource.index()) {
                    pending.extend(increasers[c.resource.index()].iter().copied());
                }
            }
        }
    }
    relevant
}
