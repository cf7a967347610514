//! Relaxed planning graph and FF heuristic at the initial state, then along
//! the plan the base search finds.
//!
//! ```text
//! cargo run --example relaxed_heuristic
//! ```

use subplan::harness::suite::Suite;
use subplan::mutex::persistent_mutexes;
use subplan::search::{solve_subproblem, Relaxation, SearchConfig};
use subplan::task::apply;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let suite = Suite::bundled();
    let task = suite.task(suite.find("t02").ok_or("t02 missing")?)?;
    let relax = Relaxation::full(&task);
    let names = |v: &[subplan::task::ActionId]| v.iter().map(|&a| task.action(a).name()).collect::<Vec<_>>().join(" ");

    let g = relax.graph(&task.init, &task.goals, None);
    let depth = task.goals.iter().filter_map(|f| g.fact_levels[f.index()]).max();
    println!("goals first appear by level {depth:?}");
    let hv = relax.heuristic(&task.init, &task.goals);
    println!("h(init) = {:?}", hv.h);
    println!("relaxed plan: {}", names(&hv.relaxed_plan));
    println!("helpful: {}", names(&hv.helpful));

    let out = solve_subproblem(&relax, &task.init, &task.goals, None, &persistent_mutexes(&task), &SearchConfig::default())?;
    println!("search: {} steps, {} expansions", out.plan.len(), out.expansions);
    let mut state = task.init.clone();
    for a in out.plan {
        state = apply(&state, task.action(a))?;
        println!("  {:<30} h = {:?}", task.action(a).name(), relax.heuristic(&state, &task.goals).h);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
