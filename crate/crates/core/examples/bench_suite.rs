//! Plan the whole bundled suite on a few threads and print the table the
//! bench subcommand prints.
//!
//! ```text
//! cargo run --release --example bench_suite
//! ```

use subplan::harness::suite::{bench, format_table, Suite};
use subplan::resolve::ResolveConfig;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let rows = bench(&Suite::bundled(), &ResolveConfig::default(), 4);
    print!("{}", format_table(&rows));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
