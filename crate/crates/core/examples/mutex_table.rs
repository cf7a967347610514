//! Persistent mutexes of a small instance, with the fact and timing behind
//! each pair.
//!
//! ```text
//! cargo run --example mutex_table
//! ```

use subplan::harness::suite::Suite;
use subplan::mutex::persistent_mutexes;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let suite = Suite::bundled();
    let task = suite.task(suite.find("ph01").ok_or("ph01 missing")?)?;
    let table = persistent_mutexes(&task);
    println!("{} actions, {} mutex pairs", task.actions.len(), table.len());
    for (a, b) in table.pairs().take(12) {
        let why: Vec<String> = table
            .witnesses(a, b)
            .iter()
            .map(|w| format!("{:?} on {} ({:?}/{:?})", w.cause, task.fact(w.fact), w.on_a, w.on_b))
            .collect();
        println!("{} x {}: {}", task.action(a).name(), task.action(b).name(), why.join("; "));
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
