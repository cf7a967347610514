//! Resources that actions can generate: find them, plan with a generous
//! stock, shrink the stock to what the plan needs and prepend the generators.
//!
//! ```text
//! cargo run --example producible
//! ```

use subplan::decompose::{detect_producible, resource_loop};
use subplan::harness::planfile::write_plan;
use subplan::harness::suite::Suite;
use subplan::resolve::{plan, ResolveConfig};
use subplan::task::Rational;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    // A consumer that always needs 100 units, started from 1000.
    let mock = resource_loop(vec![Rational::from_integer(1000)], |a| {
        if a[0] < Rational::from_integer(100) {
            return Err("short");
        }
        Ok(((), vec![a[0] - Rational::from_integer(100)]))
    })?;
    let tried: Vec<String> = mock.history.iter().map(|h| h[0].to_string()).collect();
    println!("mock consumer: {}", tried.join(" -> "));

    let suite = Suite::bundled();
    let task = suite.task(suite.find("se02").ok_or("se02 missing")?)?;
    let p = detect_producible(&task);
    for (r, res) in task.resources.iter().enumerate() {
        println!("{:<24} producible: {}", res.to_string(), p.resources[r]);
    }
    let out = plan(&task, &ResolveConfig::default())?;
    let amounts = out.initial_amounts.clone().unwrap_or_default();
    let shown: Vec<String> = amounts.iter().map(Rational::to_string).collect();
    println!("initial amounts used: [{}], {} generator steps", shown.join(", "), out.generators);
    print!("{}", write_plan(&task, &out.schedule));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
