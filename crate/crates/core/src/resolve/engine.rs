use std::collections::HashMap;
use std::time::{Duration, Instant};

use num_traits::Zero;
use thiserror::Error;

use crate::decompose::{
    fact_groups, partition_bundles, path_find, path_optimize, EdgeWeight, FactGroup, SubproblemSet,
};
use crate::mutex::{active_pairs, persistent_mutexes, validate, MutexTable, ValidationReport};
use crate::pddl::format_rational;
use crate::pert::{schedule_tree, PertError, TemporalSchedule};
use crate::search::{solve_subproblem, Bias, Relaxation, SearchConfig, SearchFailure};
use crate::task::{apply, ActionId, FactId, GroundTask, Rational, State};

use super::penalty::{PenaltyMatrix, Strategy, ViolationMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolveConfig {
    pub strategy: Strategy,
    pub gamma0: Rational,
    pub xi: Rational,
    pub tau: Rational,
    pub node_limit: usize,
    pub max_iters: usize,
    pub time_budget: Option<Duration>,
    pub quality: bool,
    /// Goal conjuncts per subproblem.
    pub bundle: usize,
}

impl Default for ResolveConfig {
    fn default() -> Self {
        ResolveConfig {
            strategy: Strategy::Ipc4,
            gamma0: Rational::from_integer(100),
            xi: Rational::new(1, 10),
            tau: Rational::new(1, 10000),
            node_limit: 3000,
            max_iters: 50,
            time_budget: Some(Duration::from_secs(1800)),
            quality: false,
            bundle: 1,
        }
    }
}

/// A subproblem's plan from the initial state. Each step carries the
/// subproblem it came from; steps borrowed as a starting prefix keep the
/// origin of the subplan they were borrowed from.
pub type Subplan = Vec<(ActionId, usize)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanOutcome {
    pub schedule: TemporalSchedule,
    /// Subproblem of each schedule entry.
    pub attribution: Vec<usize>,
    pub subproblems: usize,
    pub iterations: usize,
    /// Number of subproblem solves, counting every outer iteration.
    pub evaluations: usize,
    pub expansions: u64,
    /// Violated cross-subproblem constraints after each outer iteration.
    pub history: Vec<u64>,
    pub telemetry: Vec<String>,
    /// Starting resource amounts the plan was built with, when producible
    /// resources were reduced.
    pub initial_amounts: Option<Vec<Rational>>,
    /// Generator steps placed ahead of the plan.
    pub generators: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("unsolvable: {0}")]
    Unsolvable(String),
    #[error("budget exhausted after {} iterations", .0.iterations)]
    Budget(Box<PlanOutcome>),
    #[error(transparent)]
    Schedule(#[from] PertError),
}

/// A candidate starting state: `source` is `(k, p)` when it is reached by the
/// first `p` steps of subplan `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StartState {
    pub state: State,
    pub source: Option<(usize, usize)>,
}

/// The initial state, then every state reached by a prefix of another
/// subplan, by subproblem index and prefix length. Repeated states keep
/// their first occurrence.
pub fn start_states(task: &GroundTask, subplans: &[Subplan], t: usize) -> Vec<StartState> {
    let mut out = vec![StartState {
        state: task.init.clone(),
        source: None,
    }];
    for (k, plan) in subplans.iter().enumerate() {
        if k == t {
            continue;
        }
        let mut s = task.init.clone();
        for (p, &(a, _)) in plan.iter().enumerate() {
            s = match apply(&s, task.action(a)) {
                Ok(next) => next,
                Err(_) => break,
            };
            if out.iter().all(|c| c.state != s) {
                out.push(StartState {
                    state: s.clone(),
                    source: Some((k, p + 1)),
                });
            }
        }
    }
    out
}

/// Subplans folded into a prefix tree: identical leading steps are emitted
/// once, and each step is ordered only after its own prefix.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Merged {
    pub steps: Vec<(ActionId, Option<usize>)>,
    /// Origin tag of each step.
    pub origins: Vec<usize>,
    /// Subplan that first inserted each step.
    pub owners: Vec<usize>,
}

pub fn merge(subplans: &[Subplan]) -> Merged {
    let mut m = Merged::default();
    let mut index: HashMap<(Option<usize>, ActionId), usize> = HashMap::new();
    for (owner, plan) in subplans.iter().enumerate() {
        let mut parent = None;
        for &(a, origin) in plan {
            let node = *index.entry((parent, a)).or_insert_with(|| {
                m.steps.push((a, parent));
                m.origins.push(origin);
                m.owners.push(owner);
                m.steps.len() - 1
            });
            parent = Some(node);
        }
    }
    m
}

/// Pairs of entries from different subproblems that are active mutexes.
pub fn count_active(task: &GroundTask, schedule: &TemporalSchedule, origins: &[usize], n: usize) -> ViolationMatrix {
    let mut m = ViolationMatrix::zeros(n);
    for c in active_pairs(task, schedule) {
        m.add(origins[c.first], origins[c.second], 1);
    }
    m
}

/// Violated cross-subproblem constraints in a validation report: active
/// mutexes, preconditions broken by another subproblem's step, and goals
/// undone by another subproblem. Entries with equal origin fall back to the
/// subplan that inserted them.
pub fn count_violations(
    report: &ValidationReport,
    merged: &Merged,
    set: &SubproblemSet,
) -> ViolationMatrix {
    let n = set.len();
    let mut m = ViolationMatrix::zeros(n);
    let pair = |i: usize, j: usize, m: &mut ViolationMatrix| {
        if merged.origins[i] != merged.origins[j] {
            m.add(merged.origins[i], merged.origins[j], 1);
        } else {
            m.add(merged.owners[i], merged.owners[j], 1);
        }
    };
    for c in &report.conflicts {
        pair(c.first, c.second, &mut m);
    }
    for u in &report.unsupported {
        if let Some(c) = u.culprit {
            pair(u.entry, c, &mut m);
        }
    }
    for g in &report.missing_goals {
        if let (Some(owner), Some(c)) = (set.owner_of(g.fact), g.culprit) {
            m.add(owner, merged.origins[c], 1);
        }
    }
    m
}

struct Evaluation {
    schedule: TemporalSchedule,
    merged: Merged,
    report: ValidationReport,
    violations: ViolationMatrix,
}

struct Engine<'a> {
    task: &'a GroundTask,
    config: &'a ResolveConfig,
    table: MutexTable,
    set: SubproblemSet,
    groups: Vec<FactGroup>,
    penalties: PenaltyMatrix,
    subplans: Vec<Subplan>,
    solved: Vec<bool>,
    deadline: Option<Instant>,
    expansions: u64,
    evaluations: usize,
    telemetry: Vec<String>,
}

enum Failure {
    Search(SearchFailure),
    Fallback,
}

impl<'a> Engine<'a> {
    fn search_config(&self) -> SearchConfig {
        SearchConfig {
            node_limit: self.config.node_limit,
            tau: self.config.tau,
            quality: self.config.quality,
            deadline: self.deadline,
        }
    }

    fn evaluate(&self, subplans: &[Subplan]) -> Result<Evaluation, PertError> {
        let merged = merge(subplans);
        let schedule = schedule_tree(self.task, &merged.steps)?;
        let report = validate(self.task, &schedule);
        let violations = count_violations(&report, &merged, &self.set);
        Ok(Evaluation {
            schedule,
            merged,
            report,
            violations,
        })
    }

    /// Own step count, plus τ·makespan in quality mode, plus Σ_k γ_{t,k}·m_{t,k}.
    fn objective(&self, t: usize, subplans: &[Subplan], eval: &Evaluation) -> Rational {
        let own = subplans[t].iter().filter(|s| s.1 == t).count();
        let mut v = Rational::from_integer(own as i64);
        if self.config.quality {
            v += self.config.tau * eval.schedule.makespan;
        }
        for k in 0..self.set.len() {
            if k != t {
                v += self.penalties.get(t, k) * Rational::from_integer(eval.violations.get(t, k) as i64);
            }
        }
        v
    }

    fn bias(&self, t: usize, source: Option<(usize, usize)>) -> Bias {
        let n = self.set.len();
        let mut others = vec![Vec::new(); n];
        let mut context = Vec::new();
        for k in (0..n).filter(|&k| k != t) {
            let skip = match source {
                Some((j, p)) if j == k => p,
                _ => 0,
            };
            others[k] = self.subplans[k][skip..].iter().filter(|s| s.1 == k).map(|s| s.0).collect();
            context.extend(self.subplans[k].iter().map(|s| s.0));
        }
        Bias {
            gammas: self.penalties.row(t),
            others,
            context,
        }
    }

    fn run_search(
        &mut self,
        relax: &Relaxation,
        start: &State,
        goals: &[FactId],
        bias: Option<&Bias>,
    ) -> Result<(Vec<ActionId>, Option<usize>), SearchFailure> {
        let config = self.search_config();
        let r = solve_subproblem(relax, start, goals, bias, &self.table, &config);
        self.expansions += match &r {
            Ok(o) => o.expansions,
            Err(e) => e.expansions(),
        };
        r.map(|o| (o.plan, o.root_h))
    }

    /// Solves landmark by landmark, then the goals together.
    fn segments(
        &mut self,
        relax: &Relaxation,
        start: &State,
        chain: &[FactId],
        goals: &[FactId],
        bias: Option<&Bias>,
    ) -> Result<Vec<ActionId>, Failure> {
        let mut state = start.clone();
        let mut plan = Vec::new();
        for &l in chain {
            if state.holds(l) {
                continue;
            }
            let (steps, _) = self.run_search(relax, &state, &[l], bias).map_err(Failure::Search)?;
            for &a in &steps {
                state = apply(&state, self.task.action(a)).map_err(|_| Failure::Fallback)?;
            }
            plan.extend(steps);
        }
        let (steps, _) = self.run_search(relax, &state, goals, bias).map_err(Failure::Search)?;
        plan.extend(steps);
        Ok(plan)
    }

    fn path_weight(&self) -> Option<EdgeWeight> {
        let task = self.task;
        if task.has_numeric_preconditions() {
            let r = task
                .actions
                .iter()
                .flat_map(|a| a.numeric_effects.iter())
                .find(|e| e.delta < Rational::zero())
                .map(|e| e.resource)?;
            return Some(EdgeWeight::Consumption(r));
        }
        let mut durations = task.actions.iter().filter(|a| a.durative).map(|a| a.duration);
        let first = durations.next()?;
        durations.any(|d| d != first).then_some(EdgeWeight::Duration)
    }

    /// Direct search, then landmark segments, then a forced route through
    /// the goal's fact group.
    fn solve(&mut self, t: usize, start: &State, bias: Option<&Bias>) -> Result<(Vec<ActionId>, Option<usize>), Failure> {
        let task = self.task;
        let sub = self.set.subproblems[t].clone();
        let relax = Relaxation::new(task, &sub.relevant);
        let root_h = match self.run_search(&relax, start, &sub.goals, bias) {
            Ok(found) => return Ok(found),
            Err(SearchFailure::Timeout { root_h, .. }) => root_h,
            Err(e) => return Err(Failure::Search(e)),
        };
        let non_goal = sub.landmarks.len().saturating_sub(sub.goals.len());
        if non_goal > 1 {
            let chain = &sub.landmarks[..non_goal];
            match self.segments(&relax, start, chain, &sub.goals, bias) {
                Ok(plan) => return Ok((plan, root_h)),
                Err(Failure::Search(SearchFailure::Deadline { expansions, root_h })) => {
                    return Err(Failure::Search(SearchFailure::Deadline { expansions, root_h }))
                }
                Err(_) => {}
            }
        }
        let goal = sub.goals[0];
        let Some(group) = self.groups.iter().find(|g| g.contains(goal)).cloned() else {
            return Err(Failure::Fallback);
        };
        let (chain, mask) = match self.path_weight() {
            Some(w) => {
                let chain = path_optimize(task, &sub.relevant, &group, goal, start, w).map_err(|_| Failure::Fallback)?;
                (chain, sub.relevant.clone())
            }
            None => {
                let fix = path_find(task, &sub.relevant, &group, goal, start).map_err(|_| Failure::Fallback)?;
                let mut mask = sub.relevant.clone();
                for a in &fix.disabled {
                    mask.set(a.index(), false);
                }
                (fix.landmarks, mask)
            }
        };
        let relax = Relaxation::new(task, &mask);
        let chain: Vec<FactId> = chain.into_iter().filter(|f| !sub.goals.contains(f)).collect();
        self.segments(&relax, start, &chain, &sub.goals, bias)
            .map(|plan| (plan, root_h))
    }

    fn log(&mut self, iter: usize, t: usize, h: Option<usize>, violations: u64) {
        let line = format!(
            "iter={iter} subgoal={t} h={} violations={violations} gamma_max={}",
            h.map_or_else(|| "inf".to_string(), |h| h.to_string()),
            format_rational(self.penalties.max())
        );
        log::info!("{line}");
        self.telemetry.push(line);
    }

    fn out_of_time(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn first_iteration(&mut self) -> Result<(), ResolveError> {
        let init = self.task.init.clone();
        for t in 0..self.set.len() {
            self.evaluations += 1;
            let h = match self.solve(t, &init, None) {
                Ok((plan, h)) => {
                    self.subplans[t] = plan.into_iter().map(|a| (a, t)).collect();
                    self.solved[t] = true;
                    h
                }
                Err(Failure::Search(SearchFailure::Exhausted { .. })) => {
                    return Err(ResolveError::Unsolvable(format!(
                        "goal {} cannot be reached from the initial state",
                        self.task.fact(self.set.subproblems[t].goals[0])
                    )))
                }
                Err(Failure::Search(e)) => e.root_h(),
                Err(Failure::Fallback) => None,
            };
            let total = self.evaluate(&self.subplans)?.violations.total();
            self.log(1, t, h, total);
        }
        Ok(())
    }

    fn later_iteration(&mut self, iter: usize, last: &ViolationMatrix) -> Result<(), ResolveError> {
        for t in 0..self.set.len() {
            if self.out_of_time() {
                return Ok(());
            }
            if self.solved[t] && last.row_total(t) == 0 && last.total() > 0 {
                continue;
            }
            self.evaluations += 1;
            let current = self.evaluate(&self.subplans)?;
            let incumbent = self.solved[t].then(|| self.objective(t, &self.subplans, &current));
            let mut shown_h = None;
            let mut best: Option<(Rational, Vec<Subplan>)> = None;
            for start in start_states(self.task, &self.subplans, t) {
                if self.out_of_time() {
                    break;
                }
                let bias = self.bias(t, start.source);
                let Ok((steps, h)) = self.solve(t, &start.state, Some(&bias)) else {
                    continue;
                };
                if shown_h.is_none() {
                    shown_h = h;
                }
                let mut candidate: Subplan = match start.source {
                    Some((k, p)) => self.subplans[k][..p].to_vec(),
                    None => Vec::new(),
                };
                candidate.extend(steps.into_iter().map(|a| (a, t)));
                let mut trial = self.subplans.clone();
                trial[t] = candidate;
                let Ok(eval) = self.evaluate(&trial) else { continue };
                let value = self.objective(t, &trial, &eval);
                if best.as_ref().is_none_or(|(b, _)| value < *b) {
                    best = Some((value, trial));
                }
            }
            // Keep the incumbent unless some start state does strictly better.
            if let Some((value, trial)) = best {
                if incumbent.is_none_or(|inc| value < inc) {
                    self.subplans = trial;
                    self.solved[t] = true;
                }
            }
            let total = self.evaluate(&self.subplans)?.violations.total();
            self.log(iter, t, shown_h, total);
        }
        Ok(())
    }

    fn outcome(&self, eval: Evaluation, iterations: usize, history: Vec<u64>) -> PlanOutcome {
        PlanOutcome {
            schedule: eval.schedule,
            attribution: eval.merged.origins,
            subproblems: self.set.len(),
            iterations,
            evaluations: self.evaluations,
            expansions: self.expansions,
            history,
            telemetry: self.telemetry.clone(),
            initial_amounts: None,
            generators: 0,
        }
    }
}

/// The partition-and-resolve loop without producible-resource handling.
pub fn resolve(task: &GroundTask, config: &ResolveConfig) -> Result<PlanOutcome, ResolveError> {
    let full = Relaxation::full(task);
    let graph = full.graph(&task.init, &task.goals, None);
    if let Some(&g) = task.goals.iter().find(|g| graph.fact_levels[g.index()].is_none()) {
        return Err(ResolveError::Unsolvable(format!(
            "goal {} is unreachable even ignoring deletes",
            task.fact(g)
        )));
    }
    let set = partition_bundles(task, config.bundle);
    let n = set.len();
    let mut engine = Engine {
        task,
        config,
        table: persistent_mutexes(task),
        groups: fact_groups(task),
        penalties: PenaltyMatrix::new(n, config.strategy, config.gamma0, config.xi),
        subplans: vec![Vec::new(); n],
        solved: vec![false; n],
        set,
        deadline: config.time_budget.map(|b| Instant::now() + b),
        expansions: 0,
        evaluations: 0,
        telemetry: Vec::new(),
    };
    let mut history = Vec::new();
    let mut iter = 1;
    engine.first_iteration()?;
    loop {
        let eval = engine.evaluate(&engine.subplans)?;
        history.push(eval.violations.total());
        if eval.report.verdict && engine.solved.iter().all(|&s| s) {
            return Ok(engine.outcome(eval, iter, history));
        }
        if iter >= config.max_iters || engine.out_of_time() {
            return Err(ResolveError::Budget(Box::new(engine.outcome(eval, iter, history))));
        }
        engine.penalties.update(&eval.violations);
        iter += 1;
        engine.later_iteration(iter, &eval.violations)?;
    }
}
