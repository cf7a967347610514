//! How many mutex constraints between plan steps cross a partition boundary,
//! partitioning by time stage and by subgoal.
//!
//! ```text
//! cargo run --release --example locality
//! ```

use subplan::harness::suite::Suite;
use subplan::mutex::{locality, persistent_mutexes};
use subplan::resolve::{plan, ResolveConfig};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let suite = Suite::bundled();
    println!("instance\tn_c\tr_g_T\tr_g_G\tr_ga_G");
    for inst in suite.tagged("multi").filter(|i| !i.has_tag("sweep")) {
        let task = suite.task(inst)?;
        let out = plan(&task, &ResolveConfig::default())?;
        let attr: Vec<Option<usize>> = out.attribution.iter().map(|&g| Some(g)).collect();
        let rep = locality(&task, &persistent_mutexes(&task), &out.schedule, &attr, task.goals.len())?;
        println!("{}\t{}", inst.name, rep.to_line());
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
