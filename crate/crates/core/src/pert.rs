//! Greedy earliest-start scheduling of sequential plans (enhanced PERT).

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::mutex::{active_pairs, clobbers, event_times, is_active, ActiveMutex};
use crate::task::{ActionId, GroundAction, GroundTask, Rational, ScheduledAction, SequentialPlan, Timing};

/// Separation used when an action cannot start exactly at a boundary.
pub fn epsilon() -> Rational {
    Rational::new(1, 100)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TemporalSchedule {
    pub actions: Vec<ScheduledAction>,
    pub makespan: Rational,
    pub residual_conflicts: Vec<ActiveMutex>,
}

impl TemporalSchedule {
    /// Wraps a list of timed actions; the makespan is the latest end.
    pub fn from_actions(actions: Vec<ScheduledAction>) -> Self {
        let makespan = actions.iter().map(|a| a.end).max().unwrap_or_else(Rational::zero);
        TemporalSchedule {
            actions,
            makespan,
            residual_conflicts: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Entries ordered by start time, then action id.
    pub fn sorted(&self) -> Vec<ScheduledAction> {
        let mut v = self.actions.clone();
        v.sort_by_key(|a| (a.start, a.action));
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PertError {
    #[error("no start time keeps the resources of step {step} within bounds")]
    NumericInfeasible { step: usize },
}

/// Schedules a sequential plan: every step is ordered after all earlier steps.
pub fn schedule(task: &GroundTask, plan: &SequentialPlan) -> Result<TemporalSchedule, PertError> {
    let steps: Vec<(ActionId, Option<usize>)> = plan
        .steps
        .iter()
        .enumerate()
        .map(|(i, &a)| (a, i.checked_sub(1)))
        .collect();
    schedule_tree(task, &steps)
}

/// Schedules a forest of steps where each step names its parent. A step is
/// ordered only against its ancestors; clashes between different branches
/// are left in `residual_conflicts`.
pub fn schedule_tree(task: &GroundTask, steps: &[(ActionId, Option<usize>)]) -> Result<TemporalSchedule, PertError> {
    let mut placed = place(task, steps, true)?;
    placed.residual_conflicts = active_pairs(task, &placed);
    Ok(placed)
}

/// Makespan of the flattened subplans followed by the relaxed plan, scheduled
/// as one chain. Resource bounds are ignored.
pub fn estimate_makespan(task: &GroundTask, subplans: &[&[ActionId]], relaxed_plan: &[ActionId]) -> Rational {
    let flat: Vec<ActionId> = subplans.iter().flat_map(|p| p.iter().copied()).chain(relaxed_plan.iter().copied()).collect();
    let steps: Vec<(ActionId, Option<usize>)> = flat.iter().enumerate().map(|(i, &a)| (a, i.checked_sub(1))).collect();
    match place(task, &steps, false) {
        Ok(s) => s.makespan,
        Err(_) => flat.iter().map(|&a| task.action(a).duration).sum(),
    }
}

fn ancestors(steps: &[(ActionId, Option<usize>)], j: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut cur = steps[j].1;
    while let Some(i) = cur {
        out.push(i);
        cur = steps[i].1;
    }
    out.reverse();
    out
}

fn touches_resources(a: &GroundAction) -> bool {
    !a.numeric_pre.is_empty() || !a.numeric_effects.is_empty()
}

fn place(task: &GroundTask, steps: &[(ActionId, Option<usize>)], check_numeric: bool) -> Result<TemporalSchedule, PertError> {
    let mut out: Vec<ScheduledAction> = Vec::with_capacity(steps.len());
    for (j, &(id, parent)) in steps.iter().enumerate() {
        debug_assert!(parent.is_none_or(|p| p < j));
        let a = task.action(id);
        let anc = ancestors(steps, j);

        let mut lower = Rational::zero();
        for f in a.sequential_pre() {
            if let Some(&i) = anc.iter().rev().find(|&&i| task.action(steps[i].0).adds(f)) {
                lower = lower.max(out[i].end);
            }
        }
        for &i in &anc {
            let b = task.action(steps[i].0);
            if clobbers(a, b) || clobbers(b, a) {
                lower = lower.max(out[i].end);
            }
        }

        let eps = epsilon();
        let mut candidates = vec![lower, lower + eps];
        for &i in &anc {
            for t in [out[i].start, out[i].end] {
                if t > lower {
                    candidates.push(t);
                    candidates.push(t + eps);
                }
            }
        }
        candidates.sort();
        candidates.dedup();

        let numeric = check_numeric && touches_resources(a);
        let chosen = candidates.into_iter().find(|&s| {
            let me = ScheduledAction::new(a, s);
            if anc.iter().any(|&i| is_active(task, &out[i], &me).is_some()) {
                return false;
            }
            if numeric {
                let mut trial: Vec<ScheduledAction> = anc.iter().map(|&i| out[i].clone()).collect();
                trial.push(me);
                return numeric_trace_ok(task, &trial);
            }
            true
        });
        match chosen {
            Some(s) => out.push(ScheduledAction::new(a, s)),
            None => return Err(PertError::NumericInfeasible { step: j }),
        }
    }
    Ok(TemporalSchedule::from_actions(out))
}

/// Replays the resource side of the timeline: all numeric conditions hold
/// and no amount drops below zero.
pub fn numeric_trace_ok(task: &GroundTask, entries: &[ScheduledAction]) -> bool {
    let mut amounts = task.init.numerics.clone();
    let cond_ok = |amounts: &[Rational], a: &GroundAction, timing: Timing| {
        a.numeric_pre
            .iter()
            .filter(|c| c.timing == timing)
            .all(|c| amounts[c.resource.index()] >= c.bound)
    };
    let effects = |amounts: &mut Vec<Rational>, a: &GroundAction, timing: Timing| {
        for e in a.numeric_effects.iter().filter(|e| e.timing == timing) {
            amounts[e.resource.index()] += e.delta;
        }
    };
    let schedule = TemporalSchedule::from_actions(entries.to_vec());
    for time in event_times(&schedule) {
        let ending: Vec<&GroundAction> = entries
            .iter()
            .filter(|e| e.end == time && e.start < time)
            .map(|e| task.action(e.action))
            .collect();
        if !ending.iter().all(|a| cond_ok(&amounts, a, Timing::End)) {
            return false;
        }
        for a in &ending {
            effects(&mut amounts, a, Timing::End);
        }
        if amounts.iter().any(|v| v.is_negative()) {
            return false;
        }
        let starting: Vec<&ScheduledAction> = entries.iter().filter(|e| e.start == time).collect();
        if !starting.iter().all(|e| cond_ok(&amounts, task.action(e.action), Timing::Start)) {
            return false;
        }
        for e in &starting {
            effects(&mut amounts, task.action(e.action), Timing::Start);
        }
        for e in starting.iter().filter(|e| e.end == time) {
            let a = task.action(e.action);
            if !cond_ok(&amounts, a, Timing::End) {
                return false;
            }
            effects(&mut amounts, a, Timing::End);
        }
        if amounts.iter().any(|v| v.is_negative()) {
            return false;
        }
        let running_ok = entries
            .iter()
            .filter(|e| e.start <= time && time < e.end)
            .all(|e| cond_ok(&amounts, task.action(e.action), Timing::OverAll));
        if !running_ok {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::{FactId, NumericCondition, NumericEffect, ResourceId, Resource};

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn independent_actions_start_together() {
        let mut a = GroundAction::instant(0, "a", &[0], &[1], &[]);
        a.duration = r(3);
        let b = GroundAction::instant(1, "b", &[0], &[2], &[]);
        let task = GroundTask::propositional(3, vec![a, b], &[0], &[1, 2]);
        let s = schedule(&task, &SequentialPlan::new(vec![ActionId(0), ActionId(1)])).unwrap();
        assert!(s.actions.iter().all(|a| a.start == r(0)));
        assert_eq!(s.makespan, r(3));
        assert!(s.residual_conflicts.is_empty());
    }

    #[test]
    fn causal_chain_waits_for_the_supporter() {
        let mut a = GroundAction::instant(0, "a", &[], &[0], &[]);
        a.duration = r(2);
        let b = GroundAction::instant(1, "b", &[0], &[1], &[]);
        let task = GroundTask::propositional(2, vec![a, b], &[], &[1]);
        let s = schedule(&task, &SequentialPlan::new(vec![ActionId(0), ActionId(1)])).unwrap();
        assert_eq!(s.actions[1].start, s.actions[0].end);
    }

    #[test]
    fn capacity_serializes_consumers() {
        let consumer = |id: u32, d: i64| {
            let mut a = GroundAction::instant(id, "use", &[], &[FactId(0).0 + 1 + id], &[]);
            a.duration = r(d);
            a.durative = true;
            a.numeric_pre = vec![NumericCondition {
                resource: ResourceId(0),
                bound: r(3),
                timing: Timing::Start,
            }];
            a.numeric_effects = vec![NumericEffect {
                resource: ResourceId(0),
                delta: r(-3),
                timing: Timing::Start,
            }];
            a
        };
        let mut task = GroundTask::propositional(3, vec![consumer(0, 2), consumer(1, 5)], &[], &[]);
        task.resources = vec![Resource {
            function: "cap".into(),
            args: vec![],
        }];
        task.init.numerics = vec![r(5)];
        let plan = SequentialPlan::new(vec![ActionId(0), ActionId(1)]);
        // Sequentially the second consumer fails, so scheduling cannot succeed either.
        assert!(schedule(&task, &plan).is_err());
        // Give back the capacity at the end and the pair serializes.
        for a in &mut task.actions {
            a.numeric_effects.push(NumericEffect {
                resource: ResourceId(0),
                delta: r(3),
                timing: Timing::End,
            });
        }
        let s = schedule(&task, &plan).unwrap();
        assert_eq!(s.makespan, r(7));
    }

    #[test]
    fn estimate_of_nothing_is_zero() {
        let task = GroundTask::propositional(1, vec![], &[], &[]);
        assert_eq!(estimate_makespan(&task, &[], &[]), r(0));
    }
}
