//! Grounded planning tasks and their sequential semantics.
//!
//! A [`GroundTask`] is the output of grounding: an indexed fact universe,
//! a list of [`GroundAction`]s, the initial [`State`] and the ordered goal
//! conjuncts. Temporal actions keep their start/over-all/end buckets, but
//! during search they are applied with the collapsed sequential semantics
//! of [`apply`].

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use thiserror::Error;

/// Exact time and amount arithmetic.
pub type Rational = Rational64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FactId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResourceId(pub u32);

impl FactId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ActionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ResourceId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// When a condition or effect of a durative action takes place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Timing {
    Start,
    OverAll,
    End,
}

impl fmt::Display for Timing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Timing::Start => "start",
            Timing::OverAll => "over-all",
            Timing::End => "end",
        })
    }
}

/// A ground atom such as `(at truck1 depot)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: &[&str]) -> Self {
        Atom {
            predicate: predicate.into(),
            args: args.iter().map(|a| a.to_string()).collect(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

/// `resource >= bound`, checked at the given timing point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NumericCondition {
    pub resource: ResourceId,
    pub bound: Rational,
    pub timing: Timing,
}

/// `resource += delta` (negative delta for decrease) applied at `timing`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NumericEffect {
    pub resource: ResourceId,
    pub delta: Rational,
    pub timing: Timing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAction {
    pub id: ActionId,
    pub schema: String,
    pub args: Vec<String>,
    pub pre_start: Vec<FactId>,
    pub pre_overall: Vec<FactId>,
    pub pre_end: Vec<FactId>,
    pub add_start: Vec<FactId>,
    pub add_end: Vec<FactId>,
    pub del_start: Vec<FactId>,
    pub del_end: Vec<FactId>,
    pub numeric_pre: Vec<NumericCondition>,
    pub numeric_effects: Vec<NumericEffect>,
    /// Duration of the action. Non-durative actions occupy one unit step.
    pub duration: Rational,
    pub durative: bool,
}

impl GroundAction {
    /// A non-durative action with all conditions and effects in the start buckets.
    pub fn instant(id: u32, name: &str, pre: &[u32], add: &[u32], del: &[u32]) -> Self {
        let ids = |v: &[u32]| {
            let mut v: Vec<FactId> = v.iter().map(|&f| FactId(f)).collect();
            v.sort();
            v.dedup();
            v
        };
        GroundAction {
            id: ActionId(id),
            schema: name.to_string(),
            args: Vec::new(),
            pre_start: ids(pre),
            pre_overall: Vec::new(),
            pre_end: Vec::new(),
            add_start: ids(add),
            add_end: Vec::new(),
            del_start: ids(del),
            del_end: Vec::new(),
            numeric_pre: Vec::new(),
            numeric_effects: Vec::new(),
            duration: Rational::from_integer(1),
            durative: false,
        }
    }

    pub fn name(&self) -> String {
        let mut s = format!("({}", self.schema);
        for a in &self.args {
            s.push(' ');
            s.push_str(a);
        }
        s.push(')');
        s
    }

    /// Union of all precondition buckets.
    pub fn all_pre(&self) -> impl Iterator<Item = FactId> + '_ {
        self.pre_start
            .iter()
            .chain(&self.pre_overall)
            .chain(&self.pre_end)
            .copied()
    }

    pub fn all_add(&self) -> impl Iterator<Item = FactId> + '_ {
        self.add_start.iter().chain(&self.add_end).copied()
    }

    pub fn all_del(&self) -> impl Iterator<Item = FactId> + '_ {
        self.del_start.iter().chain(&self.del_end).copied()
    }

    pub fn adds(&self, f: FactId) -> bool {
        self.add_start.contains(&f) || self.add_end.contains(&f)
    }

    pub fn deletes(&self, f: FactId) -> bool {
        self.del_start.contains(&f) || self.del_end.contains(&f)
    }

    pub fn requires(&self, f: FactId) -> bool {
        self.pre_start.contains(&f) || self.pre_overall.contains(&f) || self.pre_end.contains(&f)
    }

    /// Facts the collapsed sequential action needs in the state it is applied to.
    /// Over-all and end conditions supplied by the action's own start effects are
    /// not external requirements.
    pub fn sequential_pre(&self) -> Vec<FactId> {
        let mut v: Vec<FactId> = self
            .pre_start
            .iter()
            .copied()
            .chain(
                self.pre_overall
                    .iter()
                    .chain(&self.pre_end)
                    .copied()
                    .filter(|f| !self.add_start.contains(f)),
            )
            .collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn increases(&self, r: ResourceId) -> bool {
        self.numeric_effects
            .iter()
            .any(|e| e.resource == r && e.delta.is_positive())
    }

    pub fn decreases(&self, r: ResourceId) -> bool {
        self.numeric_effects
            .iter()
            .any(|e| e.resource == r && e.delta.is_negative())
    }
}

/// A world state: the set of true facts plus the amount of every resource.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct State {
    pub facts: FixedBitSet,
    pub numerics: Vec<Rational>,
}

impl State {
    pub fn new(num_facts: usize, num_resources: usize) -> Self {
        State {
            facts: FixedBitSet::with_capacity(num_facts),
            numerics: vec![Rational::zero(); num_resources],
        }
    }

    pub fn from_facts(num_facts: usize, facts: &[u32]) -> Self {
        let mut s = State::new(num_facts, 0);
        for &f in facts {
            s.facts.insert(f as usize);
        }
        s
    }

    pub fn holds(&self, f: FactId) -> bool {
        self.facts.contains(f.index())
    }

    pub fn set(&mut self, f: FactId, value: bool) {
        self.facts.set(f.index(), value);
    }

    pub fn amount(&self, r: ResourceId) -> Rational {
        self.numerics[r.index()]
    }

    pub fn true_facts(&self) -> impl Iterator<Item = FactId> + '_ {
        self.facts.ones().map(|i| FactId(i as u32))
    }

    fn numeric_ok(&self, conds: &[NumericCondition], timing: Timing) -> bool {
        conds
            .iter()
            .filter(|c| c.timing == timing)
            .all(|c| self.amount(c.resource) >= c.bound)
    }

    fn apply_bucket(
        &mut self,
        action: &GroundAction,
        add: &[FactId],
        del: &[FactId],
        timing: Timing,
    ) -> Result<(), TaskError> {
        for &f in del {
            self.set(f, false);
        }
        for &f in add {
            self.set(f, true);
        }
        for e in action.numeric_effects.iter().filter(|e| e.timing == timing) {
            let v = self.numerics[e.resource.index()] + e.delta;
            if v.is_negative() {
                return Err(TaskError::NumericUnderflow {
                    action: action.id,
                    resource: e.resource,
                });
            }
            self.numerics[e.resource.index()] = v;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskError {
    #[error("action {} drives resource {} below zero", .action.0, .resource.0)]
    NumericUnderflow { action: ActionId, resource: ResourceId },
}

/// True when the collapsed sequential action can be applied in `state`.
pub fn applicable(state: &State, action: &GroundAction) -> bool {
    try_apply(state, action).is_some()
}

/// Applies an action if it is applicable; `None` on the no-op branch.
///
/// Start effects are applied before the over-all and end conditions are
/// checked, then the end effects follow.
pub fn try_apply(state: &State, action: &GroundAction) -> Option<Result<State, TaskError>> {
    if !action.pre_start.iter().all(|&f| state.holds(f))
        || !state.numeric_ok(&action.numeric_pre, Timing::Start)
    {
        return None;
    }
    let mut next = state.clone();
    if let Err(e) = next.apply_bucket(action, &action.add_start, &action.del_start, Timing::Start) {
        return Some(Err(e));
    }
    if !action
        .pre_overall
        .iter()
        .chain(&action.pre_end)
        .all(|&f| next.holds(f))
        || !next.numeric_ok(&action.numeric_pre, Timing::OverAll)
        || !next.numeric_ok(&action.numeric_pre, Timing::End)
    {
        return None;
    }
    if let Err(e) = next.apply_bucket(action, &action.add_end, &action.del_end, Timing::End) {
        return Some(Err(e));
    }
    Some(Ok(next))
}

/// Result of applying `action` to `state`; an inapplicable action leaves the
/// state unchanged.
pub fn apply(state: &State, action: &GroundAction) -> Result<State, TaskError> {
    match try_apply(state, action) {
        Some(r) => r,
        None => Ok(state.clone()),
    }
}

/// Left fold of [`apply`] over the plan's steps.
pub fn apply_sequence(task: &GroundTask, state: &State, plan: &SequentialPlan) -> Result<State, TaskError> {
    plan.steps
        .iter()
        .try_fold(state.clone(), |s, &a| apply(&s, task.action(a)))
}

pub fn goal_satisfied(state: &State, goals: &[FactId]) -> bool {
    goals.iter().all(|&g| state.holds(g))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SequentialPlan {
    pub steps: Vec<ActionId>,
}

impl SequentialPlan {
    pub fn new(steps: Vec<ActionId>) -> Self {
        SequentialPlan { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduledAction {
    pub action: ActionId,
    pub start: Rational,
    pub end: Rational,
}

impl ScheduledAction {
    pub fn new(action: &GroundAction, start: Rational) -> Self {
        ScheduledAction {
            action: action.id,
            start,
            end: start + action.duration,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resource {
    pub function: String,
    pub args: Vec<String>,
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.function)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone)]
pub struct GroundTask {
    pub domain_name: String,
    pub problem_name: String,
    pub facts: Vec<Atom>,
    pub actions: Vec<GroundAction>,
    pub init: State,
    /// Goal conjuncts in the order the problem file lists them.
    pub goals: Vec<FactId>,
    pub resources: Vec<Resource>,
    fact_index: HashMap<Atom, FactId>,
}

impl GroundTask {
    pub fn new(
        domain_name: String,
        problem_name: String,
        facts: Vec<Atom>,
        actions: Vec<GroundAction>,
        init: State,
        goals: Vec<FactId>,
        resources: Vec<Resource>,
    ) -> Self {
        let fact_index = facts
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), FactId(i as u32)))
            .collect();
        GroundTask {
            domain_name,
            problem_name,
            facts,
            actions,
            init,
            goals,
            resources,
            fact_index,
        }
    }

    /// Builds an anonymous propositional task, mostly for tests and examples.
    /// Fact `i` is named `(f<i>)`.
    pub fn propositional(num_facts: usize, actions: Vec<GroundAction>, init: &[u32], goals: &[u32]) -> Self {
        let facts = (0..num_facts)
            .map(|i| Atom::new(format!("f{i}"), &[]))
            .collect();
        GroundTask::new(
            "anonymous".into(),
            "anonymous".into(),
            facts,
            actions,
            State::from_facts(num_facts, init),
            goals.iter().map(|&g| FactId(g)).collect(),
            Vec::new(),
        )
    }

    pub fn action(&self, id: ActionId) -> &GroundAction {
        &self.actions[id.index()]
    }

    pub fn fact(&self, id: FactId) -> &Atom {
        &self.facts[id.index()]
    }

    pub fn fact_id(&self, atom: &Atom) -> Option<FactId> {
        self.fact_index.get(atom).copied()
    }

    /// Looks up a fact written as `(pred arg ...)`.
    pub fn lookup(&self, text: &str) -> Option<FactId> {
        let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
        let mut parts = inner.split_whitespace();
        let pred = parts.next()?.to_ascii_lowercase();
        let args: Vec<String> = parts.map(|s| s.to_ascii_lowercase()).collect();
        self.fact_id(&Atom { predicate: pred, args })
    }

    /// Finds an action by schema name and arguments.
    pub fn find_action(&self, schema: &str, args: &[&str]) -> Option<ActionId> {
        self.actions
            .iter()
            .find(|a| a.schema == schema && a.args.iter().map(String::as_str).eq(args.iter().copied()))
            .map(|a| a.id)
    }

    pub fn num_facts(&self) -> usize {
        self.facts.len()
    }

    pub fn is_temporal(&self) -> bool {
        self.actions.iter().any(|a| a.durative)
    }

    pub fn has_numeric_preconditions(&self) -> bool {
        self.actions.iter().any(|a| !a.numeric_pre.is_empty())
    }

    /// Returns a copy of the task whose initial resource amounts are replaced.
    pub fn with_initial_amounts(&self, amounts: &[Rational]) -> GroundTask {
        let mut t = self.clone();
        t.init.numerics = amounts.to_vec();
        t
    }

    /// Returns a copy without the listed actions. Action ids are renumbered.
    pub fn without_actions(&self, removed: &[ActionId]) -> GroundTask {
        let mut t = self.clone();
        t.actions = self
            .actions
            .iter()
            .filter(|a| !removed.contains(&a.id))
            .cloned()
            .enumerate()
            .map(|(i, mut a)| {
                a.id = ActionId(i as u32);
                a
            })
            .collect();
        t
    }
}
