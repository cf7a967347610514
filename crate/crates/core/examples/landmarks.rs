//! Landmarks on a map with two equal routes, and the single route path_find
//! forces by switching off one way into the goal.
//!
//! ```text
//! cargo run --example landmarks
//! ```

use subplan::decompose::{fact_groups, landmarks, path_find, path_optimize, EdgeWeight};
use subplan::pddl;
use subplan::search::Relaxation;
use subplan::task::{FactId, GroundTask};

const DOMAIN: &str = "
(define (domain walk)
  (:predicates (at ?x) (road ?x ?y))
  (:action move :parameters (?x ?y)
    :precondition (and (at ?x) (road ?x ?y))
    :effect (and (not (at ?x)) (at ?y))))";

/// Two routes from n1 to n8: n1-n2-n3-n4-n8 and n1-n5-n6-n7-n8.
pub const PROBLEM: &str = "
(define (problem two-routes) (:domain walk)
  (:objects n1 n2 n3 n4 n5 n6 n7 n8)
  (:init (at n1)
    (road n1 n2) (road n2 n3) (road n3 n4) (road n4 n8)
    (road n1 n5) (road n5 n6) (road n6 n7) (road n7 n8))
  (:goal (at n8)))";

pub fn task() -> Result<GroundTask, pddl::PddlError> {
    pddl::load(DOMAIN, PROBLEM)
}

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let task = task()?;
    let show = |v: &[FactId]| v.iter().map(|&f| task.fact(f).to_string()).collect::<Vec<_>>().join(" ");
    let relax = Relaxation::full(&task);
    let goal = task.goals[0];
    println!("landmarks: {}", show(&landmarks(&relax, &task.init, &task.goals)?));

    let group = fact_groups(&task)
        .into_iter()
        .find(|g| g.contains(goal))
        .ok_or("no group holds the goal")?;
    let fix = path_find(&task, relax.allowed(), &group, goal, &task.init)?;
    println!("after path_find: {}", show(&fix.landmarks));
    let off: Vec<String> = fix.disabled.iter().map(|&a| task.action(a).name()).collect();
    println!("disabled: {}", off.join(" "));

    let cheapest = path_optimize(&task, relax.allowed(), &group, goal, &task.init, EdgeWeight::Duration)?;
    println!("cheapest route: {}", show(&cheapest));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
