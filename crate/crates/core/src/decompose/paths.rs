use std::cmp::Reverse;
use std::collections::BinaryHeap;

use fixedbitset::FixedBitSet;
use num_traits::Zero;

use crate::search::Relaxation;
use crate::task::{ActionId, FactId, GroundTask, Rational, ResourceId, State};

use super::groups::FactGroup;
use super::landmarks::landmarks;
use super::DecomposeError;

/// A landmark chain forced onto one route, and the actions switched off to
/// force it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathFix {
    pub landmarks: Vec<FactId>,
    pub disabled: Vec<ActionId>,
}

/// Keeps the lowest-id predecessor of `goal` in the transition graph,
/// disables the actions entering `goal` from the other predecessors, and
/// reruns landmark analysis on what is left.
pub fn path_find(
    task: &GroundTask,
    allowed: &FixedBitSet,
    group: &FactGroup,
    goal: FactId,
    state: &State,
) -> Result<PathFix, DecomposeError> {
    let from = group.current(state).ok_or(DecomposeError::NoPath)?;
    if !group.reaches(from, goal) {
        return Err(DecomposeError::NoPath);
    }
    let preds = group.predecessors(goal);
    let mut disabled: Vec<ActionId> = Vec::new();
    if let Some((&keep, _)) = preds.split_first() {
        for (f, t, actions) in &group.edges {
            if *t == goal && *f != keep {
                disabled.extend(actions.iter().copied());
            }
        }
    }
    disabled.sort();
    disabled.dedup();
    let mut mask = allowed.clone();
    for a in &disabled {
        mask.set(a.index(), false);
    }
    let relax = Relaxation::new(task, &mask);
    let chain = landmarks(&relax, state, &[goal])?;
    Ok(PathFix {
        landmarks: chain,
        disabled,
    })
}

/// Dijkstra over a graph of `n` nodes. Returns the node sequence from
/// `from` to `to` and its cost. Ties go to the lower node index.
pub fn shortest_path(
    n: usize,
    edges: &[(usize, usize, Rational)],
    from: usize,
    to: usize,
) -> Result<(Vec<usize>, Rational), DecomposeError> {
    if edges.iter().any(|e| e.2 < Rational::zero()) {
        return Err(DecomposeError::NegativeWeight);
    }
    let mut adj: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
    for &(a, b, w) in edges {
        adj[a].push((b, w));
    }
    let mut dist: Vec<Option<Rational>> = vec![None; n];
    let mut prev: Vec<Option<usize>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[from] = Some(Rational::zero());
    heap.push(Reverse((Rational::zero(), from)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if u == to {
            break;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            let better = match dist[v] {
                None => true,
                Some(old) => nd < old || (nd == old && prev[v].is_some_and(|p| u < p)),
            };
            if better && !done[v] {
                dist[v] = Some(nd);
                prev[v] = Some(u);
                heap.push(Reverse((nd, v)));
            }
        }
    }
    let cost = dist[to].ok_or(DecomposeError::NoPath)?;
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = prev[cur].ok_or(DecomposeError::NoPath)?;
        path.push(cur);
    }
    path.reverse();
    Ok((path, cost))
}

/// How transitions are weighed when optimizing a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeWeight {
    Duration,
    /// Amount of the resource the action uses up.
    Consumption(ResourceId),
}

fn weight_of(task: &GroundTask, a: ActionId, w: EdgeWeight) -> Rational {
    let action = task.action(a);
    match w {
        EdgeWeight::Duration => action.duration,
        EdgeWeight::Consumption(r) => action
            .numeric_effects
            .iter()
            .filter(|e| e.resource == r && e.delta < Rational::zero())
            .map(|e| -e.delta)
            .sum(),
    }
}

/// The cheapest route through the group's transition graph from the member
/// true in `state` to `goal`, as a landmark chain (start member excluded).
pub fn path_optimize(
    task: &GroundTask,
    allowed: &FixedBitSet,
    group: &FactGroup,
    goal: FactId,
    state: &State,
    weight: EdgeWeight,
) -> Result<Vec<FactId>, DecomposeError> {
    let from = group.current(state).ok_or(DecomposeError::NoPath)?;
    let pos = |f: FactId| group.members.binary_search(&f).ok();
    let to = pos(goal).ok_or(DecomposeError::NoPath)?;
    let mut edges = Vec::new();
    for (f, t, actions) in &group.edges {
        let w = actions
            .iter()
            .filter(|a| allowed.contains(a.index()))
            .map(|&a| weight_of(task, a, weight))
            .min();
        if let (Some(w), Some(a), Some(b)) = (w, pos(*f), pos(*t)) {
            edges.push((a, b, w));
        }
    }
    let (path, _) = shortest_path(group.members.len(), &edges, pos(from).ok_or(DecomposeError::NoPath)?, to)?;
    Ok(path.into_iter().skip(1).map(|i| group.members[i]).collect())
}
