//! Penalty growth under repeated violations, then a full resolution run on a
//! two-goal instance where the subplans clash.
//!
//! ```text
//! cargo run --example penalties
//! ```

use subplan::harness::suite::Suite;
use subplan::resolve::{resolve, PenaltyMatrix, ResolveConfig, Strategy, ViolationMatrix};
use subplan::task::Rational;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    for strategy in [Strategy::Ipc4, Strategy::New] {
        let gamma0 = if strategy == Strategy::Ipc4 { 100 } else { 0 };
        let mut p = PenaltyMatrix::new(2, strategy, Rational::from_integer(gamma0), Rational::new(1, 10));
        let mut trace = vec![p.get(0, 1).to_string()];
        for m in [3, 0, 5, 1] {
            let mut v = ViolationMatrix::zeros(2);
            v.add(0, 1, m);
            p.update(&v);
            trace.push(p.get(0, 1).to_string());
        }
        println!("{strategy}: gamma = {}", trace.join(" -> "));
    }

    let suite = Suite::bundled();
    let task = suite.task(suite.find("ph01").ok_or("ph01 missing")?)?;
    let out = resolve(&task, &ResolveConfig::default())?;
    println!("ph01: {} evaluations, violations per iteration {:?}", out.evaluations, out.history);
    for line in &out.telemetry {
        println!("  {line}");
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
