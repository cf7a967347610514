use num_traits::Zero;

use crate::decompose::{detect_producible, generator_prefix, required_amounts, resource_loop};
use crate::mutex::validate;
use crate::pert::{schedule, TemporalSchedule};
use crate::search::reduce_actions;
use crate::task::{ActionId, GroundTask, Rational, ScheduledAction, SequentialPlan};

use super::engine::{resolve, PlanOutcome, ResolveConfig, ResolveError};

/// Generators that only touch resources; these can be replayed up front.
fn pure_generators(task: &GroundTask) -> Vec<ActionId> {
    detect_producible(task)
        .resource_generator_actions()
        .into_iter()
        .filter(|&g| {
            let a = task.action(g);
            a.all_add().next().is_none() && a.all_del().next().is_none()
        })
        .collect()
}

/// Starting amount large enough for any plan the search could find: for each
/// generated resource, the initial amount plus the largest single consumption
/// of every goal-relevant consumer times the node limit.
fn large_bound(reduced: &GroundTask, generated: &[bool], node_limit: usize) -> Vec<Rational> {
    let relevant = reduce_actions(reduced, &reduced.goals);
    let mut amounts = reduced.init.numerics.clone();
    for a in relevant.ones().map(|i| &reduced.actions[i]) {
        for (r, amount) in amounts.iter_mut().enumerate() {
            if !generated[r] {
                continue;
            }
            let most = a
                .numeric_effects
                .iter()
                .filter(|e| e.resource.index() == r && e.delta < Rational::zero())
                .map(|e| -e.delta)
                .chain(
                    a.numeric_pre
                        .iter()
                        .filter(|c| c.resource.index() == r)
                        .map(|c| c.bound),
                )
                .max();
            if let Some(m) = most {
                *amount += m * Rational::from_integer(node_limit as i64);
            }
        }
    }
    amounts
}

/// Plans a task whose resources can be generated: generators are taken out,
/// generated resources start at a large bound that is shrunk to what the plan
/// actually uses, and the generator steps needed to reach those amounts are
/// scheduled ahead of the plan.
pub fn plan(task: &GroundTask, config: &ResolveConfig) -> Result<PlanOutcome, ResolveError> {
    let generators = pure_generators(task);
    if generators.is_empty() {
        return resolve(task, config);
    }
    let mut generated = vec![false; task.resources.len()];
    for &g in &generators {
        for e in task.action(g).numeric_effects.iter().filter(|e| e.delta > Rational::zero()) {
            generated[e.resource.index()] = true;
        }
    }
    let kept: Vec<ActionId> = task.actions.iter().map(|a| a.id).filter(|a| !generators.contains(a)).collect();
    let reduced = task.without_actions(&generators);
    let initial = large_bound(&reduced, &generated, config.node_limit);

    let looped = resource_loop(initial, |amounts| {
        let t = reduced.with_initial_amounts(amounts);
        let out = resolve(&t, config)?;
        let need = required_amounts(&t, &out.schedule);
        let unused = (0..amounts.len())
            .map(|r| if generated[r] { amounts[r] - need[r].max(task.init.numerics[r]) } else { Rational::zero() })
            .collect();
        Ok::<_, ResolveError>((out, unused))
    })?;
    let mut out = looped.plan;
    let base = reduced.with_initial_amounts(&looped.amounts);
    let need = required_amounts(&base, &out.schedule);
    let amounts: Vec<Rational> = (0..need.len())
        .map(|r| if generated[r] { need[r].max(task.init.numerics[r]) } else { task.init.numerics[r] })
        .collect();

    let producible = detect_producible(task);
    let (prefix, _) = generator_prefix(task, &producible, &amounts)
        .map_err(|e| ResolveError::Unsolvable(e.to_string()))?;
    let head = schedule(task, &SequentialPlan::new(prefix.clone()))?;
    let shift = head.makespan;

    let mut actions: Vec<ScheduledAction> = head.actions.clone();
    let mut attribution = Vec::with_capacity(prefix.len() + out.schedule.len());
    for &g in &prefix {
        // Credit each generator to the subproblem that first draws on what it makes.
        let makes: Vec<usize> = task
            .action(g)
            .numeric_effects
            .iter()
            .filter(|e| e.delta > Rational::zero())
            .map(|e| e.resource.index())
            .collect();
        let first = out
            .schedule
            .actions
            .iter()
            .enumerate()
            .filter(|(_, e)| {
                reduced
                    .action(e.action)
                    .numeric_effects
                    .iter()
                    .any(|x| x.delta < Rational::zero() && makes.contains(&x.resource.index()))
            })
            .min_by_key(|(i, e)| (e.start, *i))
            .map_or(0, |(i, _)| out.attribution[i]);
        attribution.push(first);
    }
    for (e, &origin) in out.schedule.actions.iter().zip(&out.attribution) {
        actions.push(ScheduledAction {
            action: kept[e.action.index()],
            start: e.start + shift,
            end: e.end + shift,
        });
        attribution.push(origin);
    }
    let mut combined = TemporalSchedule::from_actions(actions);
    let report = validate(task, &combined);
    combined.residual_conflicts = report.conflicts.clone();
    out.schedule = combined;
    out.attribution = attribution;
    out.initial_amounts = Some(amounts);
    out.generators = prefix.len();
    if !report.verdict {
        return Err(ResolveError::Budget(Box::new(out)));
    }
    Ok(out)
}

/// The task with generators removed and the given starting amounts, as the
/// inner planner sees it.
pub fn reduced_task(task: &GroundTask, amounts: &[Rational]) -> GroundTask {
    task.without_actions(&pure_generators(task)).with_initial_amounts(amounts)
}
