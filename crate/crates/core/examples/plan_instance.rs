//! Plan one bundled instance and print the plan file and subgoal attribution.
//!
//! ```text
//! cargo run --release --example plan_instance -- ph02
//! ```

use subplan::harness::planfile::{write_attribution, write_plan};
use subplan::harness::suite::Suite;
use subplan::resolve::{plan, ResolveConfig};

pub fn run_on(name: &str) -> Result<(), Box<dyn std::error::Error>> {
    let suite = Suite::bundled();
    let inst = suite.find(name).ok_or_else(|| format!("no instance `{name}`"))?;
    let task = suite.task(inst)?;
    let out = plan(&task, &ResolveConfig::default())?;
    println!(
        "{name}: {} goals, {} steps, makespan {}, {} iterations, {} expansions",
        task.goals.len(),
        out.schedule.len(),
        out.schedule.makespan,
        out.iterations,
        out.expansions
    );
    for line in &out.telemetry {
        println!("  {line}");
    }
    print!("{}", write_plan(&task, &out.schedule));
    println!("attribution:");
    print!("{}", write_attribution(&out.schedule, &out.attribution));
    Ok(())
}

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    run_on("ph02")
}

#[allow(dead_code)]
fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "ph02".into());
    if let Err(e) = run_on(&name) {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
