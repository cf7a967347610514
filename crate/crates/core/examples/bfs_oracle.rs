//! Check the planner against exhaustive breadth-first search on every
//! bundled instance small enough to enumerate.
//!
//! ```text
//! cargo run --release --example bfs_oracle
//! ```

use subplan::harness::bfs::{bfs, BfsError};
use subplan::harness::suite::Suite;
use subplan::resolve::{plan, ResolveConfig};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let suite = Suite::bundled();
    let mut disagree = 0;
    for inst in &suite.instances {
        let task = suite.task(inst)?;
        let oracle = match bfs(&task, 100_000) {
            Ok(found) => found,
            Err(BfsError::CapExceeded(n)) => {
                println!("{:<6} skipped, more than {n} states", inst.name);
                continue;
            }
        };
        let ours = plan(&task, &ResolveConfig::default());
        let agree = oracle.is_some() == ours.is_ok();
        disagree += usize::from(!agree);
        println!(
            "{:<6} bfs {:<10} planner {:<10} {}",
            inst.name,
            oracle.map_or("none".to_string(), |p| format!("{} steps", p.len())),
            ours.as_ref().map_or("failed".to_string(), |o| format!("{} steps", o.schedule.len())),
            if agree { "ok" } else { "MISMATCH" }
        );
    }
    println!("{disagree} disagreements");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
