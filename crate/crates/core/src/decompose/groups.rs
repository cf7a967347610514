use std::collections::BTreeMap;

use crate::task::{ActionId, FactId, GroundTask, State};

/// Statically exclusive facts and the transitions between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactGroup {
    pub members: Vec<FactId>,
    /// `(from, to, actions)`: each action needs `from` and adds `to`.
    pub edges: Vec<(FactId, FactId, Vec<ActionId>)>,
}

impl FactGroup {
    pub fn contains(&self, f: FactId) -> bool {
        self.members.binary_search(&f).is_ok()
    }

    /// The member that holds in `state`, if any.
    pub fn current(&self, state: &State) -> Option<FactId> {
        self.members.iter().copied().find(|&f| state.holds(f))
    }

    /// Members with an edge into `f`, in id order.
    pub fn predecessors(&self, f: FactId) -> Vec<FactId> {
        let mut v: Vec<FactId> = self.edges.iter().filter(|e| e.1 == f).map(|e| e.0).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn reaches(&self, from: FactId, to: FactId) -> bool {
        let mut seen = vec![from];
        let mut stack = vec![from];
        while let Some(f) = stack.pop() {
            if f == to {
                return true;
            }
            for e in self.edges.iter().filter(|e| e.0 == f) {
                if !seen.contains(&e.1) {
                    seen.push(e.1);
                    stack.push(e.1);
                }
            }
        }
        false
    }
}

/// Groups of the form "one value of the last argument per fixed prefix",
/// kept when at most one member holds initially and every action adding a
/// member consumes another member it requires.
pub fn fact_groups(task: &GroundTask) -> Vec<FactGroup> {
    let mut candidates: BTreeMap<(String, Vec<String>), Vec<FactId>> = BTreeMap::new();
    for (i, atom) in task.facts.iter().enumerate() {
        if let Some((_, prefix)) = atom.args.split_last() {
            candidates
                .entry((atom.predicate.clone(), prefix.to_vec()))
                .or_default()
                .push(FactId(i as u32));
        }
    }
    let mut groups = Vec::new();
    for members in candidates.into_values() {
        if members.len() < 2 {
            continue;
        }
        let is_member = |f: &FactId| members.binary_search(f).is_ok();
        if members.iter().filter(|&&f| task.init.holds(f)).count() > 1 {
            continue;
        }
        let sound = task.actions.iter().all(|a| {
            let added: Vec<FactId> = a.all_add().filter(is_member).collect();
            match added.as_slice() {
                [] => true,
                [m] => a.all_pre().filter(is_member).any(|p| p == *m || a.deletes(p)),
                _ => false,
            }
        });
        if !sound {
            continue;
        }
        let mut edges: BTreeMap<(FactId, FactId), Vec<ActionId>> = BTreeMap::new();
        for a in &task.actions {
            for from in a.all_pre().filter(is_member) {
                for to in a.all_add().filter(is_member) {
                    if from != to {
                        edges.entry((from, to)).or_default().push(a.id);
                    }
                }
            }
        }
        groups.push(FactGroup {
            members,
            edges: edges.into_iter().map(|((f, t), a)| (f, t, a)).collect(),
        });
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::load;

    const DOMAIN: &str = "(define (domain g) (:types loc)
        (:predicates (at ?l - loc) (link ?a ?b - loc) (seen ?l - loc))
        (:action go :parameters (?a ?b - loc) :precondition (and (at ?a) (link ?a ?b))
           :effect (and (not (at ?a)) (at ?b)))
        (:action look :parameters (?a - loc) :precondition (at ?a) :effect (seen ?a)))";

    #[test]
    fn location_invariant_is_found() {
        let t = load(
            DOMAIN,
            "(define (problem p) (:domain g) (:objects l1 l2 l3 - loc)
               (:init (at l1) (link l1 l2) (link l2 l3) (link l3 l1)) (:goal (and (at l3))))",
        )
        .unwrap();
        let groups = fact_groups(&t);
        let at: Vec<&FactGroup> = groups
            .iter()
            .filter(|g| t.fact(g.members[0]).predicate == "at")
            .collect();
        assert_eq!(at.len(), 1);
        assert_eq!(at[0].members.len(), 3);
        // `seen` is added without consuming a sibling, so it is not a group.
        assert!(groups.iter().all(|g| t.fact(g.members[0]).predicate != "seen"));
        let l3 = t.lookup("(at l3)").unwrap();
        assert_eq!(at[0].predecessors(l3), vec![t.lookup("(at l2)").unwrap()]);
    }
}
