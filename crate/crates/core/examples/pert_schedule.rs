//! Turn a sequential plan into a parallel schedule and compare it with the
//! sequential length.
//!
//! ```text
//! cargo run --example pert_schedule
//! ```

use num_traits::Zero;
use subplan::harness::bfs::bfs;
use subplan::harness::planfile::write_plan;
use subplan::harness::suite::Suite;
use subplan::pert::{schedule, TemporalSchedule};
use subplan::task::{Rational, SequentialPlan};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let suite = Suite::bundled();
    for name in ["t04", "tt03"] {
        let task = suite.task(suite.find(name).ok_or("instance missing")?)?;
        let steps = bfs(&task, 100_000)?.ok_or("no plan")?;
        let serial: Rational = steps.iter().map(|&a| task.action(a).duration).fold(Rational::zero(), |s, d| s + d);
        let sched: TemporalSchedule = schedule(&task, &SequentialPlan::new(steps))?;
        println!("{name}: {} steps, sequential length {serial}, makespan {}", sched.len(), sched.makespan);
        print!("{}", write_plan(&task, &sched));
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
