#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use subplan::harness::cli;
use subplan::harness::suite::Suite;
use subplan::task::{try_apply, ActionId, GroundAction, GroundTask};

pub fn bundled_tasks() -> Vec<(String, GroundTask)> {
    let suite = Suite::bundled();
    suite
        .instances
        .iter()
        .map(|i| (i.name.clone(), suite.task(i).unwrap()))
        .collect()
}

/// Runs the CLI in-process; returns (exit code, stdout, stderr).
pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("subplan").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// A sequential plan built by taking, at each step, the applicable action
/// picked by the next number.
pub fn random_walk(task: &GroundTask, picks: &[u32]) -> Vec<ActionId> {
    let mut state = task.init.clone();
    let mut steps = Vec::new();
    for &p in picks {
        let options: Vec<(ActionId, _)> = task
            .actions
            .iter()
            .filter_map(|a| match try_apply(&state, a) {
                Some(Ok(next)) => Some((a.id, next)),
                _ => None,
            })
            .collect();
        if options.is_empty() {
            break;
        }
        let (a, next) = options[p as usize % options.len()].clone();
        steps.push(a);
        state = next;
    }
    steps
}

pub fn random_delete_free_task(seed: u64) -> GroundTask {
    let mut rng = StdRng::seed_from_u64(seed);
    let nf = rng.gen_range(2..12);
    let na = rng.gen_range(0..14);
    let pick = |rng: &mut StdRng, lo: usize, hi: usize| -> Vec<u32> {
        let k = rng.gen_range(lo..=hi);
        (0..k).map(|_| rng.gen_range(0..nf as u32)).collect()
    };
    let actions = (0..na)
        .map(|i| {
            let pre = pick(&mut rng, 0, 3);
            let add = pick(&mut rng, 1, 3);
            GroundAction::instant(i as u32, "act", &pre, &add, &[])
        })
        .collect();
    let init = pick(&mut rng, 0, 3);
    let goals = pick(&mut rng, 1, 3);
    GroundTask::propositional(nf, actions, &init, &goals)
}

/// Facts reachable when deletes are ignored, by naive fixpoint.
pub fn delete_free_closure(task: &GroundTask) -> Vec<bool> {
    let mut have: Vec<bool> = (0..task.num_facts()).map(|f| task.init.holds(subplan::task::FactId(f as u32))).collect();
    loop {
        let mut changed = false;
        for a in &task.actions {
            if a.all_pre().all(|f| have[f.index()]) {
                for f in a.all_add() {
                    if !have[f.index()] {
                        have[f.index()] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return have;
        }
    }
}
