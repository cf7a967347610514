use fixedbitset::FixedBitSet;

use crate::task::{ActionId, FactId, GroundTask, Rational, ResourceId, State};

/// Delete-relaxed layering from a seed state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelaxedGraph {
    /// First layer a fact appears in; `None` when unreachable.
    pub fact_levels: Vec<Option<u32>>,
    pub action_levels: Vec<Option<u32>>,
    /// Achiever chosen for each fact: lowest id among the earliest.
    pub supporters: Vec<Option<ActionId>>,
    /// Layer at which a resource first gets an increasing action.
    pub resource_levels: Vec<Option<u32>>,
    pub resource_supporters: Vec<Option<ActionId>>,
}

impl RelaxedGraph {
    pub fn reaches(&self, goals: &[FactId]) -> bool {
        goals.iter().all(|g| self.fact_levels[g.index()].is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HeuristicValue {
    /// Relaxed plan length; `None` stands for infinity.
    pub h: Option<usize>,
    pub relaxed_plan: Vec<ActionId>,
    /// First-layer actions that add a first-layer subgoal of the relaxed plan.
    pub helpful: Vec<ActionId>,
    /// Estimated conflicts against every other subproblem.
    pub m_tilde: Vec<u64>,
    pub t_tilde: Rational,
}

#[derive(Debug, Clone, Copy)]
enum Need {
    Fact(FactId),
    Resource(ResourceId),
}

/// Precomputed indices over an action subset, reused across many graph builds.
#[derive(Debug, Clone)]
pub struct Relaxation<'a> {
    task: &'a GroundTask,
    actions: Vec<ActionId>,
    allowed: FixedBitSet,
    pre: Vec<Vec<FactId>>,
    fact_consumers: Vec<Vec<ActionId>>,
    resource_consumers: Vec<Vec<ActionId>>,
}

impl<'a> Relaxation<'a> {
    pub fn new(task: &'a GroundTask, allowed: &FixedBitSet) -> Self {
        let n = task.actions.len();
        let mut pre = vec![Vec::new(); n];
        let mut fact_consumers = vec![Vec::new(); task.num_facts()];
        let mut resource_consumers = vec![Vec::new(); task.resources.len()];
        let mut actions = Vec::new();
        for a in task.actions.iter().filter(|a| allowed.contains(a.id.index())) {
            actions.push(a.id);
            let p = a.sequential_pre();
            for f in &p {
                fact_consumers[f.index()].push(a.id);
            }
            for c in &a.numeric_pre {
                resource_consumers[c.resource.index()].push(a.id);
            }
            pre[a.id.index()] = p;
        }
        for list in &mut resource_consumers {
            list.dedup();
        }
        let mut mask = FixedBitSet::with_capacity(n);
        for a in &actions {
            mask.insert(a.index());
        }
        Relaxation {
            task,
            actions,
            allowed: mask,
            pre,
            fact_consumers,
            resource_consumers,
        }
    }

    /// All actions of the task.
    pub fn full(task: &'a GroundTask) -> Self {
        let mut all = FixedBitSet::with_capacity(task.actions.len());
        all.insert_range(..);
        Self::new(task, &all)
    }

    pub fn task(&self) -> &'a GroundTask {
        self.task
    }

    pub fn allowed(&self) -> &FixedBitSet {
        &self.allowed
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.actions
    }

    fn unmet_numeric(&self, state: &State, a: ActionId) -> Vec<ResourceId> {
        let mut v: Vec<ResourceId> = self
            .task
            .action(a)
            .numeric_pre
            .iter()
            .filter(|c| state.amount(c.resource) < c.bound)
            .map(|c| c.resource)
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// Builds the layering. Facts in `suppressed` never become true, which
    /// also blocks every action needing them. Stops once all goals appear.
    pub fn graph(&self, state: &State, goals: &[FactId], suppressed: Option<&FixedBitSet>) -> RelaxedGraph {
        let task = self.task;
        let nf = task.num_facts();
        let nr = task.resources.len();
        let blocked = |f: FactId| suppressed.is_some_and(|s| s.contains(f.index()));
        let mut g = RelaxedGraph {
            fact_levels: vec![None; nf],
            action_levels: vec![None; task.actions.len()],
            supporters: vec![None; nf],
            resource_levels: vec![None; nr],
            resource_supporters: vec![None; nr],
        };
        let mut frontier: Vec<FactId> = Vec::new();
        for f in state.true_facts() {
            if !blocked(f) {
                g.fact_levels[f.index()] = Some(0);
                frontier.push(f);
            }
        }
        let mut counters = vec![0usize; task.actions.len()];
        let mut ready: Vec<ActionId> = Vec::new();
        for &a in &self.actions {
            let c = self.pre[a.index()].len() + self.unmet_numeric(state, a).len();
            counters[a.index()] = c;
            if c == 0 {
                ready.push(a);
            }
        }
        let mut new_resources: Vec<ResourceId> = Vec::new();
        let mut level = 0u32;
        loop {
            if g.reaches(goals) {
                break;
            }
            for f in frontier.drain(..) {
                for &a in &self.fact_consumers[f.index()] {
                    counters[a.index()] -= 1;
                    if counters[a.index()] == 0 {
                        ready.push(a);
                    }
                }
            }
            for r in new_resources.drain(..) {
                for &a in &self.resource_consumers[r.index()] {
                    if g.action_levels[a.index()].is_some() {
                        continue;
                    }
                    let waiting = self.unmet_numeric(state, a).contains(&r);
                    if waiting {
                        counters[a.index()] -= 1;
                        if counters[a.index()] == 0 {
                            ready.push(a);
                        }
                    }
                }
            }
            if ready.is_empty() {
                break;
            }
            level += 1;
            ready.sort();
            ready.dedup();
            for a in ready.drain(..) {
                g.action_levels[a.index()] = Some(level);
                let action = task.action(a);
                for f in action.all_add() {
                    if g.fact_levels[f.index()].is_none() && !blocked(f) {
                        g.fact_levels[f.index()] = Some(level);
                        g.supporters[f.index()] = Some(a);
                        frontier.push(f);
                    }
                }
                for e in action.numeric_effects.iter().filter(|e| e.delta > Rational::from_integer(0)) {
                    let r = e.resource.index();
                    if g.resource_levels[r].is_none() {
                        g.resource_levels[r] = Some(level);
                        g.resource_supporters[r] = Some(a);
                        new_resources.push(e.resource);
                    }
                }
            }
            if frontier.is_empty() && new_resources.is_empty() {
                break;
            }
        }
        g
    }

    /// Relaxed-plan heuristic: backward extraction over the chosen supporters.
    pub fn heuristic(&self, state: &State, goals: &[FactId]) -> HeuristicValue {
        let g = self.graph(state, goals, None);
        self.extract(state, goals, &g)
    }

    pub fn extract(&self, state: &State, goals: &[FactId], g: &RelaxedGraph) -> HeuristicValue {
        if !g.reaches(goals) {
            return HeuristicValue::default();
        }
        let nf = self.task.num_facts();
        let level_of = |n: Need| match n {
            Need::Fact(f) => g.fact_levels[f.index()].unwrap_or(0),
            Need::Resource(r) => g.resource_levels[r.index()].unwrap_or(0),
        };
        let max_level = goals.iter().map(|&f| level_of(Need::Fact(f))).max().unwrap_or(0) as usize;
        let mut layers: Vec<Vec<Need>> = vec![Vec::new(); max_level + 1];
        let mut queued = FixedBitSet::with_capacity(nf + self.task.resources.len());
        let key = |n: Need| match n {
            Need::Fact(f) => f.index(),
            Need::Resource(r) => nf + r.index(),
        };
        for &f in goals {
            let n = Need::Fact(f);
            if !queued.put(key(n)) {
                layers[level_of(n) as usize].push(n);
            }
        }
        let mut chosen = FixedBitSet::with_capacity(self.task.actions.len());
        // Lowest action level at which each need is already added by a chosen action.
        let mut achieved: Vec<Option<u32>> = vec![None; nf + self.task.resources.len()];
        let mut plan: Vec<ActionId> = Vec::new();
        let mut first_layer: Vec<FactId> = Vec::new();
        for lvl in (1..=max_level).rev() {
            let needs = std::mem::take(&mut layers[lvl]);
            for n in needs {
                if achieved[key(n)].is_some_and(|l| l as usize <= lvl) {
                    continue;
                }
                if lvl == 1 {
                    if let Need::Fact(f) = n {
                        first_layer.push(f);
                    }
                }
                let supporter = match n {
                    Need::Fact(f) => g.supporters[f.index()],
                    Need::Resource(r) => g.resource_supporters[r.index()],
                };
                let Some(a) = supporter else { continue };
                if chosen.put(a.index()) {
                    continue;
                }
                plan.push(a);
                let action = self.task.action(a);
                let at = g.action_levels[a.index()].unwrap_or(0);
                let added = action
                    .all_add()
                    .map(|f| f.index())
                    .chain(action.numeric_effects.iter().filter(|e| e.delta > Rational::from_integer(0)).map(|e| nf + e.resource.index()));
                for k in added {
                    achieved[k] = Some(achieved[k].map_or(at, |l| l.min(at)));
                }
                let mut pre: Vec<Need> = self.pre[a.index()].iter().map(|&f| Need::Fact(f)).collect();
                pre.extend(self.unmet_numeric(state, a).into_iter().map(Need::Resource));
                for p in pre {
                    let l = level_of(p) as usize;
                    if l > 0 && !queued.put(key(p)) {
                        layers[l].push(p);
                    }
                }
            }
        }
        plan.sort_by_key(|a| (g.action_levels[a.index()], *a));
        let mut helpful: Vec<ActionId> = self
            .actions
            .iter()
            .copied()
            .filter(|a| g.action_levels[a.index()] == Some(1))
            .filter(|&a| first_layer.iter().any(|&f| self.task.action(a).adds(f)))
            .collect();
        helpful.sort();
        HeuristicValue {
            h: Some(plan.len()),
            relaxed_plan: plan,
            helpful,
            m_tilde: Vec::new(),
            t_tilde: Rational::from_integer(0),
        }
    }
}

pub fn relaxed_graph(task: &GroundTask, state: &State, actions: &FixedBitSet, goals: &[FactId]) -> RelaxedGraph {
    Relaxation::new(task, actions).graph(state, goals, None)
}

/// `h` and the relaxed plan only; the conflict and makespan fields stay empty.
pub fn ff_heuristic(task: &GroundTask, state: &State, actions: &FixedBitSet, goals: &[FactId]) -> HeuristicValue {
    Relaxation::new(task, actions).heuristic(state, goals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::GroundAction;

    fn chain() -> GroundTask {
        GroundTask::propositional(
            3,
            vec![
                GroundAction::instant(0, "a", &[0], &[1], &[0]),
                GroundAction::instant(1, "b", &[1], &[2], &[1]),
            ],
            &[0],
            &[2],
        )
    }

    fn all(task: &GroundTask) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(task.actions.len());
        s.insert_range(..);
        s
    }

    #[test]
    fn chain_levels_are_forced() {
        let t = chain();
        let g = relaxed_graph(&t, &t.init, &all(&t), &t.goals);
        assert_eq!(g.fact_levels, vec![Some(0), Some(1), Some(2)]);
        assert_eq!(g.action_levels, vec![Some(1), Some(2)]);
    }

    #[test]
    fn satisfied_goals_cost_nothing() {
        let t = chain();
        let h = ff_heuristic(&t, &t.init, &all(&t), &[FactId(0)]);
        assert_eq!(h.h, Some(0));
        assert!(h.relaxed_plan.is_empty());
    }

    #[test]
    fn unreachable_goal_is_infinite() {
        let t = GroundTask::propositional(2, vec![GroundAction::instant(0, "a", &[0], &[0], &[])], &[0], &[1]);
        assert_eq!(ff_heuristic(&t, &t.init, &all(&t), &t.goals).h, None);
    }

    #[test]
    fn chain_heuristic_counts_both_steps() {
        let t = chain();
        let h = ff_heuristic(&t, &t.init, &all(&t), &t.goals);
        assert_eq!(h.h, Some(2));
        assert_eq!(h.relaxed_plan, vec![ActionId(0), ActionId(1)]);
        assert_eq!(h.helpful, vec![ActionId(0)]);
    }
}
