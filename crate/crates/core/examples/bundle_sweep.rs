//! Search effort as goals are solved in bundles of 5, 4, ... 1 on the
//! five-truck transport instance.
//!
//! ```text
//! cargo run --release --example bundle_sweep
//! ```

use subplan::harness::cli::SWEEP_NODE_LIMIT;
use subplan::harness::suite::{bundle_sweep, Suite};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let suite = Suite::bundled();
    let task = suite.task(suite.find("fu01").ok_or("fu01 missing")?)?;
    println!("bundle\texpansions");
    for (size, expansions) in bundle_sweep(&task, 5, SWEEP_NODE_LIMIT) {
        println!("{size}\t{expansions}");
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
