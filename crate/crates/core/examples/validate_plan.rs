//! Validate a plan, then break it by squeezing every step to time zero and
//! look at what the validator reports.
//!
//! ```text
//! cargo run --example validate_plan
//! ```

use subplan::harness::planfile::{parse_plan, write_plan};
use subplan::harness::suite::Suite;
use subplan::mutex::validate;
use subplan::pert::TemporalSchedule;
use subplan::resolve::{plan, ResolveConfig};
use subplan::task::ScheduledAction;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let suite = Suite::bundled();
    let task = suite.task(suite.find("t02").ok_or("t02 missing")?)?;
    let good = plan(&task, &ResolveConfig::default())?.schedule;

    // Through the text format and back, as the validate subcommand sees it.
    let text = write_plan(&task, &good);
    let parsed = parse_plan(&task, &text)?;
    let report = validate(&task, &parsed);
    println!("planned schedule valid: {}", report.verdict);

    let squeezed = TemporalSchedule::from_actions(
        good.actions
            .iter()
            .map(|e| ScheduledAction::new(task.action(e.action), 0.into()))
            .collect(),
    );
    let report = validate(&task, &squeezed);
    println!("squeezed schedule valid: {}", report.verdict);
    print!("{}", report.to_text(&task, &squeezed));
    println!("--- structured ---");
    print!("{}", report.to_structured(&task, &squeezed));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
