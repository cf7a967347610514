use fixedbitset::FixedBitSet;
use num_traits::Zero;

use crate::pert::TemporalSchedule;
use crate::task::{try_apply, ActionId, GroundAction, GroundTask, Rational, ResourceId, State, Timing};

use super::DecomposeError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProducibleSet {
    pub facts: FixedBitSet,
    pub resources: Vec<bool>,
    /// Producing actions that add each fact.
    pub fact_generators: Vec<Vec<ActionId>>,
    /// Producing actions that increase each resource.
    pub resource_generators: Vec<Vec<ActionId>>,
}

impl ProducibleSet {
    pub fn is_empty(&self) -> bool {
        self.facts.is_clear() && !self.resources.iter().any(|&r| r)
    }

    /// Every generator of a producible resource, in id order.
    pub fn resource_generator_actions(&self) -> Vec<ActionId> {
        let mut v: Vec<ActionId> = self.resource_generators.iter().flatten().copied().collect();
        v.sort();
        v.dedup();
        v
    }
}

/// Facts that hold initially and are never deleted.
fn permanent_facts(task: &GroundTask) -> FixedBitSet {
    let mut perm = task.init.facts.clone();
    for a in &task.actions {
        for f in a.all_del() {
            perm.set(f.index(), false);
        }
    }
    perm
}

/// Least fixpoint: an action produces when all its conditions are
/// producible (or permanently true), and everything it adds or increases is
/// then producible too.
pub fn detect_producible(task: &GroundTask) -> ProducibleSet {
    let nf = task.num_facts();
    let nr = task.resources.len();
    let perm = permanent_facts(task);
    let mut facts = FixedBitSet::with_capacity(nf);
    let mut resources = vec![false; nr];
    let mut producing = FixedBitSet::with_capacity(task.actions.len());
    loop {
        let mut changed = false;
        for a in &task.actions {
            if producing.contains(a.id.index()) {
                continue;
            }
            let ok = a.all_pre().all(|f| facts.contains(f.index()) || perm.contains(f.index()))
                && a.numeric_pre.iter().all(|c| resources[c.resource.index()]);
            if !ok {
                continue;
            }
            producing.insert(a.id.index());
            changed = true;
            for f in a.all_add() {
                facts.insert(f.index());
            }
            for e in a.numeric_effects.iter().filter(|e| e.delta > Rational::zero()) {
                resources[e.resource.index()] = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut fact_generators = vec![Vec::new(); nf];
    let mut resource_generators = vec![Vec::new(); nr];
    for i in producing.ones() {
        let a = &task.actions[i];
        for f in a.all_add() {
            fact_generators[f.index()].push(a.id);
        }
        for e in a.numeric_effects.iter().filter(|e| e.delta > Rational::zero()) {
            resource_generators[e.resource.index()].push(a.id);
        }
    }
    for v in fact_generators.iter_mut().chain(resource_generators.iter_mut()) {
        v.dedup();
    }
    ProducibleSet {
        facts,
        resources,
        fact_generators,
        resource_generators,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopOutcome<P> {
    pub plan: P,
    /// Initial amounts the final plan was made with.
    pub amounts: Vec<Rational>,
    /// Amounts tried, in order, including ones whose re-planning failed.
    pub history: Vec<Vec<Rational>>,
}

/// Plans with `initial` amounts, removes what the plan left unused and plans
/// again, until nothing is left over or re-planning fails. `plan_fn` returns
/// the plan and the unused amount of each resource.
pub fn resource_loop<P, E>(
    initial: Vec<Rational>,
    mut plan_fn: impl FnMut(&[Rational]) -> Result<(P, Vec<Rational>), E>,
) -> Result<LoopOutcome<P>, E> {
    let (mut plan, mut unused) = plan_fn(&initial)?;
    let mut amounts = initial;
    let mut history = vec![amounts.clone()];
    while unused.iter().any(|u| *u > Rational::zero()) {
        let next: Vec<Rational> = amounts
            .iter()
            .zip(&unused)
            .map(|(a, u)| (*a - *u).max(Rational::zero()))
            .collect();
        history.push(next.clone());
        match plan_fn(&next) {
            Ok((p, u)) => {
                plan = p;
                unused = u;
                amounts = next;
            }
            Err(_) => break,
        }
    }
    Ok(LoopOutcome { plan, amounts, history })
}

/// Smallest starting amount of each resource that keeps the schedule's
/// trace non-negative and its numeric conditions satisfied.
pub fn required_amounts(task: &GroundTask, schedule: &TemporalSchedule) -> Vec<Rational> {
    let nr = task.resources.len();
    let mut delta = vec![Rational::zero(); nr];
    let mut need = vec![Rational::zero(); nr];
    let mut times: Vec<Rational> = schedule.actions.iter().flat_map(|a| [a.start, a.end]).collect();
    times.sort();
    times.dedup();
    let entries = &schedule.actions;
    let demand = |need: &mut Vec<Rational>, delta: &[Rational], a: &GroundAction, timing: Timing| {
        for c in a.numeric_pre.iter().filter(|c| c.timing == timing) {
            let r = c.resource.index();
            need[r] = need[r].max(c.bound - delta[r]);
        }
    };
    let effects = |need: &mut Vec<Rational>, delta: &mut Vec<Rational>, a: &GroundAction, timing: Timing| {
        for e in a.numeric_effects.iter().filter(|e| e.timing == timing) {
            let r = e.resource.index();
            delta[r] += e.delta;
            need[r] = need[r].max(-delta[r]);
        }
    };
    for time in times {
        for e in entries.iter().filter(|e| e.end == time && e.start < time) {
            demand(&mut need, &delta, task.action(e.action), Timing::End);
        }
        for e in entries.iter().filter(|e| e.end == time && e.start < time) {
            effects(&mut need, &mut delta, task.action(e.action), Timing::End);
        }
        for e in entries.iter().filter(|e| e.start == time) {
            demand(&mut need, &delta, task.action(e.action), Timing::Start);
        }
        for e in entries.iter().filter(|e| e.start == time) {
            effects(&mut need, &mut delta, task.action(e.action), Timing::Start);
        }
        for e in entries.iter().filter(|e| e.start == time && e.end == time) {
            demand(&mut need, &delta, task.action(e.action), Timing::End);
            effects(&mut need, &mut delta, task.action(e.action), Timing::End);
        }
        for e in entries.iter().filter(|e| e.start <= time && time < e.end) {
            demand(&mut need, &delta, task.action(e.action), Timing::OverAll);
        }
    }
    need
}

/// A sequence of producing actions, applied from the task's initial state,
/// that brings every resource up to at least `targets[r]`.
pub fn generator_prefix(
    task: &GroundTask,
    producible: &ProducibleSet,
    targets: &[Rational],
) -> Result<(Vec<ActionId>, State), DecomposeError> {
    const STEP_LIMIT: usize = 100_000;
    let mut state = task.init.clone();
    let mut out = Vec::new();

    fn produce(
        task: &GroundTask,
        producible: &ProducibleSet,
        state: &mut State,
        out: &mut Vec<ActionId>,
        r: ResourceId,
        target: Rational,
        depth: usize,
    ) -> Result<(), DecomposeError> {
        while state.amount(r) < target {
            if out.len() > STEP_LIMIT || depth > task.resources.len() {
                return Err(DecomposeError::GeneratorStuck(r));
            }
            let g = producible.resource_generators[r.index()]
                .iter()
                .copied()
                .find(|&g| task.action(g).all_pre().all(|f| state.holds(f)))
                .ok_or(DecomposeError::GeneratorStuck(r))?;
            for c in task.action(g).numeric_pre.clone() {
                produce(task, producible, state, out, c.resource, c.bound, depth + 1)?;
            }
            match try_apply(state, task.action(g)) {
                Some(Ok(next)) => *state = next,
                _ => return Err(DecomposeError::GeneratorStuck(r)),
            }
            out.push(g);
        }
        Ok(())
    }

    loop {
        let short: Vec<usize> = (0..targets.len()).filter(|&r| state.amount(ResourceId(r as u32)) < targets[r]).collect();
        if short.is_empty() {
            return Ok((out, state));
        }
        for r in short {
            produce(task, producible, &mut state, &mut out, ResourceId(r as u32), targets[r], 0)?;
        }
        if out.len() > STEP_LIMIT {
            return Err(DecomposeError::GeneratorStuck(ResourceId(0)));
        }
    }
}
