use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::time::Instant;

use num_traits::Zero;
use thiserror::Error;

use crate::mutex::{self_mutex, MutexTable};
use crate::pert::estimate_makespan;
use crate::resolve::PenaltyMatrix;
use crate::task::{goal_satisfied, try_apply, ActionId, FactId, GroundTask, Rational, State};

use super::relaxed::{HeuristicValue, Relaxation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub node_limit: usize,
    pub tau: Rational,
    pub quality: bool,
    pub deadline: Option<Instant>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            node_limit: 3000,
            tau: Rational::new(1, 10000),
            quality: false,
            deadline: None,
        }
    }
}

/// What the search is biased against: the other subproblems' actions and
/// the penalties on clashing with them.
#[derive(Debug, Clone, Default)]
pub struct Bias {
    /// `gammas[k]` weighs estimated conflicts with subproblem `k`.
    pub gammas: Vec<Rational>,
    /// `others[k]` are the actions of subproblem `k` not shared with this one.
    pub others: Vec<Vec<ActionId>>,
    /// Other subplans flattened in order, ahead of this one in the makespan estimate.
    pub context: Vec<ActionId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub plan: Vec<ActionId>,
    pub expansions: u64,
    pub root_h: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SearchFailure {
    #[error("node limit reached after {expansions} expansions")]
    Timeout { expansions: u64, root_h: Option<usize> },
    #[error("search space exhausted after {expansions} expansions")]
    Exhausted { expansions: u64, root_h: Option<usize> },
    #[error("time budget exceeded")]
    Deadline { expansions: u64, root_h: Option<usize> },
}

impl SearchFailure {
    pub fn expansions(&self) -> u64 {
        match *self {
            SearchFailure::Timeout { expansions, .. }
            | SearchFailure::Exhausted { expansions, .. }
            | SearchFailure::Deadline { expansions, .. } => expansions,
        }
    }

    pub fn root_h(&self) -> Option<usize> {
        match *self {
            SearchFailure::Timeout { root_h, .. }
            | SearchFailure::Exhausted { root_h, .. }
            | SearchFailure::Deadline { root_h, .. } => root_h,
        }
    }
}

/// Π + Σ_k γ_{t,k}·m̃_{t,k}, plus τ·T̃ in quality mode.
pub fn biased_objective(h: &HeuristicValue, penalties: &PenaltyMatrix, t: usize, quality: bool, tau: Rational) -> Rational {
    let gammas: Vec<Rational> = (0..penalties.n()).map(|k| if k == t { Rational::zero() } else { penalties.get(t, k) }).collect();
    objective(h, &gammas, quality, tau)
}

fn objective(h: &HeuristicValue, gammas: &[Rational], quality: bool, tau: Rational) -> Rational {
    let mut v = Rational::from_integer(h.h.unwrap_or(0) as i64);
    for (g, &m) in gammas.iter().zip(&h.m_tilde) {
        v += *g * Rational::from_integer(m as i64);
    }
    if quality {
        v += tau * h.t_tilde;
    }
    v
}

fn clash(task: &GroundTask, table: &MutexTable, x: ActionId, y: ActionId) -> bool {
    if x == y {
        self_mutex(task.action(x))
    } else {
        table.contains(x, y)
    }
}

/// Counts clashing pairs between `own` and each list in `others`.
pub fn estimate_conflicts(task: &GroundTask, table: &MutexTable, own: &[ActionId], others: &[Vec<ActionId>]) -> Vec<u64> {
    others
        .iter()
        .map(|ys| {
            own.iter()
                .map(|&x| ys.iter().filter(|&&y| clash(task, table, x, y)).count() as u64)
                .sum()
        })
        .collect()
}

struct Node {
    state: State,
    parent: Option<usize>,
    action: Option<ActionId>,
    path_m: Vec<u64>,
}

type Key = Reverse<(Rational, usize, u8, ActionId, u64, usize)>;

struct Search<'a> {
    relax: &'a Relaxation<'a>,
    goals: &'a [FactId],
    bias: Option<&'a Bias>,
    table: &'a MutexTable,
    config: &'a SearchConfig,
    conflict_cache: HashMap<ActionId, Vec<u64>>,
    nodes: Vec<Node>,
}

impl Search<'_> {
    fn conflicts_of(&mut self, a: ActionId) -> Vec<u64> {
        let Some(bias) = self.bias else { return Vec::new() };
        if let Some(v) = self.conflict_cache.get(&a) {
            return v.clone();
        }
        let v = estimate_conflicts(self.relax.task(), self.table, &[a], &bias.others);
        self.conflict_cache.insert(a, v.clone());
        v
    }

    fn path(&self, mut i: usize) -> Vec<ActionId> {
        let mut p = Vec::new();
        while let Some(a) = self.nodes[i].action {
            p.push(a);
            i = self.nodes[i].parent.unwrap_or(0);
        }
        p.reverse();
        p
    }

    fn evaluate(&mut self, node: usize) -> (HeuristicValue, Rational) {
        let mut hv = self.relax.heuristic(&self.nodes[node].state, self.goals);
        if hv.h.is_none() {
            return (hv, Rational::zero());
        }
        let Some(bias) = self.bias else {
            let v = Rational::from_integer(hv.h.unwrap_or(0) as i64);
            return (hv, v);
        };
        let mut m = self.nodes[node].path_m.clone();
        for a in hv.relaxed_plan.clone() {
            for (slot, c) in m.iter_mut().zip(self.conflicts_of(a)) {
                *slot += c;
            }
        }
        hv.m_tilde = m;
        if self.config.quality {
            let path = self.path(node);
            hv.t_tilde = estimate_makespan(self.relax.task(), &[&bias.context, &path], &hv.relaxed_plan);
        }
        let v = objective(&hv, &bias.gammas, self.config.quality, self.config.tau);
        (hv, v)
    }
}

/// Greedy best-first search from `start` until every fact in `goals` holds.
/// Children are ordered by the biased objective, then `h`, then helpful
/// actions first, then action id, then insertion order.
pub fn solve_subproblem(
    relax: &Relaxation,
    start: &State,
    goals: &[FactId],
    bias: Option<&Bias>,
    table: &MutexTable,
    config: &SearchConfig,
) -> Result<SearchOutcome, SearchFailure> {
    let task = relax.task();
    let width = bias.map_or(0, |b| b.others.len());
    let mut s = Search {
        relax,
        goals,
        bias,
        table,
        config,
        conflict_cache: HashMap::new(),
        nodes: vec![Node {
            state: start.clone(),
            parent: None,
            action: None,
            path_m: vec![0; width],
        }],
    };
    let (root, root_value) = s.evaluate(0);
    let root_h = root.h;
    if goal_satisfied(start, goals) {
        return Ok(SearchOutcome {
            plan: Vec::new(),
            expansions: 0,
            root_h,
        });
    }
    if root_h.is_none() {
        return Err(SearchFailure::Exhausted { expansions: 0, root_h });
    }

    let mut open: BinaryHeap<Key> = BinaryHeap::new();
    let mut helpful_of: Vec<Vec<ActionId>> = vec![root.helpful];
    let mut seen: HashSet<State> = HashSet::new();
    seen.insert(start.clone());
    open.push(Reverse((root_value, root_h.unwrap_or(0), 0, ActionId(0), 0, 0)));
    let mut seq = 1u64;
    let mut expansions = 0u64;

    while let Some(Reverse((_, _, _, _, _, idx))) = open.pop() {
        if expansions as usize >= config.node_limit {
            return Err(SearchFailure::Timeout { expansions, root_h });
        }
        if config.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(SearchFailure::Deadline { expansions, root_h });
        }
        expansions += 1;
        let helpful = std::mem::take(&mut helpful_of[idx]);
        for &a in relax.actions() {
            let Some(Ok(next)) = try_apply(&s.nodes[idx].state, task.action(a)) else {
                continue;
            };
            if !seen.insert(next.clone()) {
                continue;
            }
            let mut path_m = s.nodes[idx].path_m.clone();
            for (slot, c) in path_m.iter_mut().zip(s.conflicts_of(a)) {
                *slot += c;
            }
            let done = goal_satisfied(&next, goals);
            s.nodes.push(Node {
                state: next,
                parent: Some(idx),
                action: Some(a),
                path_m,
            });
            let child = s.nodes.len() - 1;
            if done {
                return Ok(SearchOutcome {
                    plan: s.path(child),
                    expansions,
                    root_h,
                });
            }
            let (hv, value) = s.evaluate(child);
            let Some(h) = hv.h else {
                helpful_of.push(Vec::new());
                continue;
            };
            let rank = u8::from(helpful.binary_search(&a).is_err());
            helpful_of.push(hv.helpful);
            open.push(Reverse((value, h, rank, a, seq, child)));
            seq += 1;
        }
    }
    Err(SearchFailure::Exhausted { expansions, root_h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mutex::persistent_mutexes;
    use crate::task::GroundAction;

    fn chain() -> GroundTask {
        GroundTask::propositional(
            4,
            vec![
                GroundAction::instant(0, "a", &[0], &[1], &[0]),
                GroundAction::instant(1, "b", &[1], &[2], &[1]),
                GroundAction::instant(2, "c", &[0], &[3], &[]),
            ],
            &[0],
            &[2],
        )
    }

    #[test]
    fn satisfied_goal_gives_empty_plan() {
        let t = chain();
        let r = Relaxation::full(&t);
        let out = solve_subproblem(&r, &t.init, &[FactId(0)], None, &persistent_mutexes(&t), &SearchConfig::default()).unwrap();
        assert!(out.plan.is_empty());
    }

    #[test]
    fn one_step_gap() {
        let t = chain();
        let r = Relaxation::full(&t);
        let out = solve_subproblem(&r, &t.init, &[FactId(1)], None, &persistent_mutexes(&t), &SearchConfig::default()).unwrap();
        assert_eq!(out.plan, vec![ActionId(0)]);
    }

    #[test]
    fn two_step_chain() {
        let t = chain();
        let r = Relaxation::full(&t);
        let out = solve_subproblem(&r, &t.init, &t.goals, None, &persistent_mutexes(&t), &SearchConfig::default()).unwrap();
        assert_eq!(out.plan, vec![ActionId(0), ActionId(1)]);
    }

    #[test]
    fn unreachable_goal_is_exhausted() {
        let t = chain();
        let r = Relaxation::full(&t);
        let mut s = t.init.clone();
        s.set(FactId(0), false);
        let err = solve_subproblem(&r, &s, &t.goals, None, &persistent_mutexes(&t), &SearchConfig::default()).unwrap_err();
        assert!(matches!(err, SearchFailure::Exhausted { .. }));
    }

    #[test]
    fn objective_substitution() {
        let hv = HeuristicValue {
            h: Some(4),
            m_tilde: vec![0, 2],
            t_tilde: Rational::from_integer(50),
            ..Default::default()
        };
        let gammas = [Rational::zero(), Rational::from_integer(100)];
        assert_eq!(objective(&hv, &gammas, false, Rational::new(1, 10000)), Rational::from_integer(204));
        let zero = [Rational::zero(), Rational::zero()];
        assert_eq!(objective(&hv, &zero, true, Rational::new(1, 10000)), Rational::new(4005, 1000));
    }
}
