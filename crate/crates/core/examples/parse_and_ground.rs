//! Parse a domain and problem from text and look at the grounded task.
//!
//! ```text
//! cargo run --example parse_and_ground
//! ```

use subplan::pddl;

const DOMAIN: &str = "
(define (domain hallway)
  (:requirements :strips :typing :durative-actions)
  (:types room)
  (:predicates (at ?r - room) (door ?a ?b - room) (lit ?r - room))
  (:durative-action walk
    :parameters (?a ?b - room)
    :duration (= ?duration 2)
    :condition (and (at start (at ?a)) (over all (door ?a ?b)))
    :effect (and (at start (not (at ?a))) (at end (at ?b))))
  (:action switch-on
    :parameters (?r - room)
    :precondition (at ?r)
    :effect (lit ?r)))";

const PROBLEM: &str = "
(define (problem two-rooms) (:domain hallway)
  (:objects hall kitchen - room)
  (:init (at hall) (door hall kitchen))
  (:goal (and (lit kitchen))))";

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let task = pddl::load(DOMAIN, PROBLEM)?;
    println!("{} facts, {} actions, temporal: {}", task.num_facts(), task.actions.len(), task.is_temporal());
    for a in &task.actions {
        println!("  {:<28} duration {}", a.name(), a.duration);
    }
    let goal = task.lookup("(lit kitchen)").ok_or("goal fact missing")?;
    println!("goal {} is fact #{}", task.fact(goal), goal.index());

    match pddl::load(DOMAIN, "(define (problem broken) (:domain hallway) (:init (at hall)") {
        Ok(_) => println!("unexpectedly parsed"),
        Err(e) => println!("malformed input rejected: {}", e.diagnostic("broken.pddl")),
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
