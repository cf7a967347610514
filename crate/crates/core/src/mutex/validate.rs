use std::fmt::Write as _;

use num_traits::Zero;

use crate::pddl::format_rational;
use crate::pert::TemporalSchedule;
use crate::task::{FactId, GroundAction, GroundTask, NumericCondition, Rational, ResourceId, State, Timing};

use super::active::{is_active, Activation};

/// An active mutex between two schedule entries (indices into the schedule).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ActiveMutex {
    pub first: usize,
    pub second: usize,
    pub activation: Activation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Missing {
    Fact(FactId),
    /// A numeric condition failed or the amount went negative.
    Resource(ResourceId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Unsupported {
    pub entry: usize,
    pub missing: Missing,
    pub time: Rational,
    /// The entry that most recently deleted the fact or drew down the resource.
    pub culprit: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MissingGoal {
    pub fact: FactId,
    pub culprit: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub goal_ok: bool,
    pub missing_goals: Vec<MissingGoal>,
    pub conflicts: Vec<ActiveMutex>,
    pub unsupported: Vec<Unsupported>,
    pub verdict: bool,
}

struct Timeline<'a> {
    task: &'a GroundTask,
    schedule: &'a TemporalSchedule,
    state: State,
    last_deleter: Vec<Option<usize>>,
    last_decreaser: Vec<Vec<usize>>,
    unsupported: Vec<Unsupported>,
}

impl Timeline<'_> {
    fn action(&self, i: usize) -> &GroundAction {
        self.task.action(self.schedule.actions[i].action)
    }

    fn culprit_for_resource(&self, r: ResourceId, entry: usize) -> Option<usize> {
        self.last_decreaser[r.index()].iter().rev().find(|&&d| d != entry).copied()
    }

    fn check(&mut self, i: usize, facts: &[FactId], timing: Timing, time: Rational) {
        let action = self.action(i);
        let mut found = Vec::new();
        for &f in facts {
            if !self.state.holds(f) {
                found.push(Unsupported {
                    entry: i,
                    missing: Missing::Fact(f),
                    time,
                    culprit: self.last_deleter[f.index()],
                });
            }
        }
        let conds: Vec<&NumericCondition> = action.numeric_pre.iter().filter(|c| c.timing == timing).collect();
        for c in conds {
            if self.state.amount(c.resource) < c.bound {
                found.push(Unsupported {
                    entry: i,
                    missing: Missing::Resource(c.resource),
                    time,
                    culprit: self.culprit_for_resource(c.resource, i),
                });
            }
        }
        self.unsupported.extend(found);
    }

    fn apply(&mut self, entries: &[usize], timing: Timing, time: Rational) {
        let bucket = |a: &GroundAction| match timing {
            Timing::End => (a.add_end.clone(), a.del_end.clone()),
            _ => (a.add_start.clone(), a.del_start.clone()),
        };
        for &i in entries {
            let (_, del) = bucket(self.action(i));
            for f in del {
                self.state.set(f, false);
                self.last_deleter[f.index()] = Some(i);
            }
        }
        for &i in entries {
            let (add, _) = bucket(self.action(i));
            for f in add {
                self.state.set(f, true);
            }
        }
        for &i in entries {
            let effects: Vec<_> = self
                .action(i)
                .numeric_effects
                .iter()
                .filter(|e| e.timing == timing)
                .cloned()
                .collect();
            for e in effects {
                let r = e.resource.index();
                self.state.numerics[r] += e.delta;
                if e.delta < Rational::zero() {
                    self.last_decreaser[r].push(i);
                }
            }
        }
        for &i in entries {
            let effects: Vec<ResourceId> = self
                .action(i)
                .numeric_effects
                .iter()
                .filter(|e| e.timing == timing && e.delta < Rational::zero())
                .map(|e| e.resource)
                .collect();
            for r in effects {
                if self.state.amount(r) < Rational::zero() {
                    self.unsupported.push(Unsupported {
                        entry: i,
                        missing: Missing::Resource(r),
                        time,
                        culprit: self.culprit_for_resource(r, i),
                    });
                }
            }
        }
    }
}

/// Event times of a schedule in order, with the entries ending, starting and
/// running at each.
pub(crate) fn event_times(schedule: &TemporalSchedule) -> Vec<Rational> {
    let mut times: Vec<Rational> = schedule.actions.iter().flat_map(|a| [a.start, a.end]).collect();
    times.sort();
    times.dedup();
    times
}

/// Simulates the timeline: at each event time, end conditions are checked and
/// end effects applied, then start conditions and start effects, then the
/// over-all conditions of every running action.
pub fn validate(task: &GroundTask, schedule: &TemporalSchedule) -> ValidationReport {
    let mut tl = Timeline {
        task,
        schedule,
        state: task.init.clone(),
        last_deleter: vec![None; task.num_facts()],
        last_decreaser: vec![Vec::new(); task.resources.len()],
        unsupported: Vec::new(),
    };
    let entries = &schedule.actions;
    for time in event_times(schedule) {
        let ending: Vec<usize> = (0..entries.len())
            .filter(|&i| entries[i].end == time && entries[i].start < time)
            .collect();
        for &i in &ending {
            let pre = tl.action(i).pre_end.clone();
            tl.check(i, &pre, Timing::End, time);
        }
        tl.apply(&ending, Timing::End, time);

        let starting: Vec<usize> = (0..entries.len()).filter(|&i| entries[i].start == time).collect();
        for &i in &starting {
            let pre = tl.action(i).pre_start.clone();
            tl.check(i, &pre, Timing::Start, time);
        }
        tl.apply(&starting, Timing::Start, time);

        let instant: Vec<usize> = starting.iter().copied().filter(|&i| entries[i].end == time).collect();
        for &i in &instant {
            let a = tl.action(i);
            let pre: Vec<FactId> = a.pre_overall.iter().chain(&a.pre_end).copied().collect();
            tl.check(i, &pre, Timing::End, time);
        }
        tl.apply(&instant, Timing::End, time);

        for (i, e) in entries.iter().enumerate() {
            if e.start <= time && time < e.end {
                let pre = tl.action(i).pre_overall.clone();
                tl.check(i, &pre, Timing::OverAll, time);
            }
        }
    }

    let missing_goals: Vec<MissingGoal> = task
        .goals
        .iter()
        .filter(|&&g| !tl.state.holds(g))
        .map(|&g| MissingGoal {
            fact: g,
            culprit: tl.last_deleter[g.index()],
        })
        .collect();
    let conflicts = active_pairs(task, schedule);
    let unsupported = tl.unsupported;
    let goal_ok = missing_goals.is_empty();
    ValidationReport {
        verdict: goal_ok && conflicts.is_empty() && unsupported.is_empty(),
        goal_ok,
        missing_goals,
        conflicts,
        unsupported,
    }
}

/// Every pair of schedule entries satisfying an activation condition.
pub fn active_pairs(task: &GroundTask, schedule: &TemporalSchedule) -> Vec<ActiveMutex> {
    let entries = &schedule.actions;
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by_key(|&i| (entries[i].start, i));
    let mut out = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        // Activation needs the closed intervals to touch.
        for &j in order[pos + 1..].iter().take_while(|&&j| entries[j].start <= entries[i].end) {
            if let Some(activation) = is_active(task, &entries[i], &entries[j]) {
                let (first, second) = (i.min(j), i.max(j));
                out.push(ActiveMutex {
                    first,
                    second,
                    activation,
                });
            }
        }
    }
    out.sort_by_key(|m| (m.first, m.second));
    out
}

impl ValidationReport {
    /// One finding per line.
    pub fn to_text(&self, task: &GroundTask, schedule: &TemporalSchedule) -> String {
        let name = |i: usize| task.action(schedule.actions[i].action).name();
        let mut s = String::new();
        for m in &self.conflicts {
            let _ = writeln!(
                s,
                "conflict ({}) at {}: {} vs {} on {}",
                m.activation.condition,
                format_rational(m.activation.time),
                name(m.first),
                name(m.second),
                task.fact(m.activation.fact)
            );
        }
        for u in &self.unsupported {
            let _ = writeln!(
                s,
                "unsupported at {}: {} needs {}",
                format_rational(u.time),
                name(u.entry),
                missing_name(task, u.missing)
            );
        }
        for g in &self.missing_goals {
            let _ = writeln!(s, "goal not achieved: {}", task.fact(g.fact));
        }
        let _ = writeln!(s, "verdict: {}", if self.verdict { "valid" } else { "invalid" });
        s
    }

    /// `key: value` lines with indexed list entries.
    pub fn to_structured(&self, task: &GroundTask, schedule: &TemporalSchedule) -> String {
        let name = |i: usize| task.action(schedule.actions[i].action).name();
        let mut s = String::new();
        let _ = writeln!(s, "verdict: {}", self.verdict);
        let _ = writeln!(s, "goal_ok: {}", self.goal_ok);
        let _ = writeln!(s, "conflicts: {}", self.conflicts.len());
        for (k, m) in self.conflicts.iter().enumerate() {
            let _ = writeln!(
                s,
                "conflicts[{k}]: {} {} {} {} {}",
                m.activation.condition,
                format_rational(m.activation.time),
                name(m.first),
                name(m.second),
                task.fact(m.activation.fact)
            );
        }
        let _ = writeln!(s, "unsupported: {}", self.unsupported.len());
        for (k, u) in self.unsupported.iter().enumerate() {
            let _ = writeln!(
                s,
                "unsupported[{k}]: {} {} {}",
                format_rational(u.time),
                name(u.entry),
                missing_name(task, u.missing)
            );
        }
        let _ = writeln!(s, "missing_goals: {}", self.missing_goals.len());
        for (k, g) in self.missing_goals.iter().enumerate() {
            let _ = writeln!(s, "missing_goals[{k}]: {}", task.fact(g.fact));
        }
        s
    }
}

fn missing_name(task: &GroundTask, m: Missing) -> String {
    match m {
        Missing::Fact(f) => task.fact(f).to_string(),
        Missing::Resource(r) => task.resources[r.index()].to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::{ActionId, GroundAction, ScheduledAction};

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn empty_schedule_with_no_goals_is_valid() {
        let task = GroundTask::propositional(1, vec![], &[], &[]);
        assert!(validate(&task, &TemporalSchedule::default()).verdict);
    }

    #[test]
    fn missing_precondition_is_reported() {
        let a = GroundAction::instant(0, "a", &[0], &[1], &[]);
        let task = GroundTask::propositional(2, vec![a], &[], &[1]);
        let s = TemporalSchedule::from_actions(vec![ScheduledAction::new(task.action(ActionId(0)), r(0))]);
        let rep = validate(&task, &s);
        assert!(!rep.verdict);
        assert_eq!(rep.unsupported.len(), 1);
        assert_eq!(rep.unsupported[0].missing, Missing::Fact(FactId(0)));
    }

    #[test]
    fn clobbered_goal_names_the_deleter() {
        let a = GroundAction::instant(0, "a", &[], &[0], &[]);
        let b = GroundAction::instant(1, "b", &[], &[1], &[0]);
        let task = GroundTask::propositional(2, vec![a, b], &[], &[0]);
        let s = TemporalSchedule::from_actions(vec![
            ScheduledAction::new(task.action(ActionId(0)), r(0)),
            ScheduledAction::new(task.action(ActionId(1)), r(1)),
        ]);
        let rep = validate(&task, &s);
        assert!(!rep.goal_ok);
        assert_eq!(rep.missing_goals[0].culprit, Some(1));
    }

    #[test]
    fn chain_of_instant_actions_validates() {
        let a = GroundAction::instant(0, "a", &[0], &[1], &[0]);
        let b = GroundAction::instant(1, "b", &[1], &[2], &[1]);
        let task = GroundTask::propositional(3, vec![a, b], &[0], &[2]);
        let s = TemporalSchedule::from_actions(vec![
            ScheduledAction::new(task.action(ActionId(1)), r(1)),
            ScheduledAction::new(task.action(ActionId(0)), r(0)),
        ]);
        assert!(validate(&task, &s).verdict);
    }
}
