//! Breadth-first search over the collapsed sequential semantics, used as a
//! ground-truth oracle on small tasks.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::task::{goal_satisfied, try_apply, ActionId, GroundTask, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum BfsError {
    #[error("more than {0} reachable states")]
    CapExceeded(usize),
}

/// A shortest plan, `Ok(None)` when the goal is unreachable, or an error once
/// more than `cap` states have been seen.
pub fn bfs(task: &GroundTask, cap: usize) -> Result<Option<Vec<ActionId>>, BfsError> {
    let mut parent: HashMap<State, Option<(State, ActionId)>> = HashMap::new();
    let mut queue = VecDeque::new();
    parent.insert(task.init.clone(), None);
    queue.push_back(task.init.clone());
    while let Some(s) = queue.pop_front() {
        if goal_satisfied(&s, &task.goals) {
            let mut plan = Vec::new();
            let mut cur = s;
            while let Some(Some((prev, a))) = parent.get(&cur) {
                plan.push(*a);
                cur = prev.clone();
            }
            plan.reverse();
            return Ok(Some(plan));
        }
        for a in &task.actions {
            let Some(Ok(next)) = try_apply(&s, a) else { continue };
            if parent.contains_key(&next) {
                continue;
            }
            if parent.len() >= cap {
                return Err(BfsError::CapExceeded(cap));
            }
            parent.insert(next.clone(), Some((s.clone(), a.id)));
            queue.push_back(next);
        }
    }
    Ok(None)
}

/// Number of reachable states, or an error past `cap`.
pub fn count_states(task: &GroundTask, cap: usize) -> Result<usize, BfsError> {
    let mut seen: std::collections::HashSet<State> = std::collections::HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(task.init.clone());
    queue.push_back(task.init.clone());
    while let Some(s) = queue.pop_front() {
        for a in &task.actions {
            if let Some(Ok(next)) = try_apply(&s, a) {
                if seen.insert(next.clone()) {
                    if seen.len() > cap {
                        return Err(BfsError::CapExceeded(cap));
                    }
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(seen.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::GroundAction;

    #[test]
    fn satisfied_goal_gives_empty_plan() {
        let t = GroundTask::propositional(1, vec![], &[0], &[0]);
        assert_eq!(bfs(&t, 10), Ok(Some(vec![])));
    }

    #[test]
    fn unreachable_goal_on_two_states() {
        let t = GroundTask::propositional(
            3,
            vec![GroundAction::instant(0, "a", &[0], &[1], &[])],
            &[0],
            &[2],
        );
        assert_eq!(bfs(&t, 10), Ok(None));
        assert_eq!(count_states(&t, 10), Ok(2));
    }

    #[test]
    fn shortest_plan_and_cap() {
        let t = GroundTask::propositional(
            3,
            vec![
                GroundAction::instant(0, "a", &[0], &[1], &[]),
                GroundAction::instant(1, "b", &[1], &[2], &[]),
                GroundAction::instant(2, "c", &[0], &[2], &[]),
            ],
            &[0],
            &[2],
        );
        assert_eq!(bfs(&t, 10), Ok(Some(vec![ActionId(2)])));
        assert_eq!(bfs(&t, 1), Err(BfsError::CapExceeded(1)));
    }
}
