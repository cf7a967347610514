use fixedbitset::FixedBitSet;

use crate::search::Relaxation;
use crate::task::{FactId, State};

use super::DecomposeError;

/// Facts every delete-relaxed plan for `goals` must pass through, ordered by
/// relaxed level (ties by fact id), followed by the goals themselves.
///
/// Candidates are facts reachable in the relaxation that do not already hold
/// in `init`. A candidate is a landmark when suppressing it in every layer
/// leaves some goal unreachable.
pub fn landmarks(relax: &Relaxation, init: &State, goals: &[FactId]) -> Result<Vec<FactId>, DecomposeError> {
    let base = relax.graph(init, goals, None);
    if let Some(&g) = goals.iter().find(|g| base.fact_levels[g.index()].is_none()) {
        return Err(DecomposeError::Unreachable(g));
    }
    let nf = relax.task().num_facts();
    let mut found: Vec<(u32, FactId)> = Vec::new();
    let mut suppressed = FixedBitSet::with_capacity(nf);
    for (i, level) in base.fact_levels.iter().enumerate() {
        let f = FactId(i as u32);
        let Some(level) = *level else { continue };
        if level == 0 || goals.contains(&f) {
            continue;
        }
        suppressed.insert(i);
        if !relax.graph(init, goals, Some(&suppressed)).reaches(goals) {
            found.push((level, f));
        }
        suppressed.set(i, false);
    }
    found.sort();
    let mut chain: Vec<FactId> = found.into_iter().map(|(_, f)| f).collect();
    chain.extend_from_slice(goals);
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::{GroundAction, GroundTask};

    #[test]
    fn linear_chain_yields_intermediate_landmark() {
        let t = GroundTask::propositional(
            3,
            vec![
                GroundAction::instant(0, "a", &[0], &[1], &[0]),
                GroundAction::instant(1, "b", &[1], &[2], &[1]),
            ],
            &[0],
            &[2],
        );
        let chain = landmarks(&Relaxation::full(&t), &t.init, &t.goals).unwrap();
        assert_eq!(chain, vec![FactId(1), FactId(2)]);
    }

    #[test]
    fn two_disjoint_paths_leave_only_the_goal() {
        let t = GroundTask::propositional(
            4,
            vec![
                GroundAction::instant(0, "a", &[0], &[1], &[]),
                GroundAction::instant(1, "b", &[0], &[2], &[]),
                GroundAction::instant(2, "c", &[1], &[3], &[]),
                GroundAction::instant(3, "d", &[2], &[3], &[]),
            ],
            &[0],
            &[3],
        );
        let chain = landmarks(&Relaxation::full(&t), &t.init, &t.goals).unwrap();
        assert_eq!(chain, vec![FactId(3)]);
    }
}
