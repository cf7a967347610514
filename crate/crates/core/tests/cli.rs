mod common;

use std::path::PathBuf;

use subplan::harness::cli::{EXIT_BUDGET, EXIT_INPUT, EXIT_INVALID, EXIT_OK, EXIT_UNSOLVABLE};
use subplan::harness::suite::Suite;

use common::run_cli;

fn paths(name: &str) -> (String, String) {
    let suite = Suite::bundled();
    let inst = suite.find(name).unwrap();
    let s = |p: PathBuf| p.to_str().unwrap().to_string();
    (s(suite.domain_path(inst)), s(suite.problem_path(inst)))
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const DEAD_DOMAIN: &str = "(define (domain dead) (:predicates (p) (q)) (:action a :precondition (q) :effect (p)))";
const DEAD_PROBLEM: &str = "(define (problem dead1) (:domain dead) (:init) (:goal (p)))";

#[test]
fn plan_to_stdout_then_validate() {
    let (d, p) = paths("t03");
    let (code, plan, _) = run_cli(&["plan", "-q", &d, &p]);
    assert_eq!(code, EXIT_OK);
    assert!(plan.lines().all(|l| l.contains(": (") && l.ends_with(']')));
    let dir = tempfile::tempdir().unwrap();
    let file = write(&dir, "t03.plan", &plan);
    let (code, out, _) = run_cli(&["validate", &d, &p, &file]);
    assert_eq!(code, EXIT_OK, "{out}");
    let (code, out, _) = run_cli(&["validate", "--structured", &d, &p, &file]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("verdict"), "{out}");
}

#[test]
fn telemetry_goes_to_stderr_unless_quiet() {
    let (d, p) = paths("ph01");
    let (_, out, err) = run_cli(&["plan", &d, &p]);
    assert!(err.lines().any(|l| l.starts_with("iter=1 subgoal=0 h=")));
    assert!(!out.contains("iter="));
    let (_, _, err) = run_cli(&["plan", "-q", &d, &p]);
    assert!(err.is_empty());
}

#[test]
fn missing_file_is_an_input_error() {
    let (code, _, err) = run_cli(&["plan", "/nonexistent/d.pddl", "/nonexistent/p.pddl"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(!err.is_empty());
}

#[test]
fn malformed_pddl_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(&dir, "d.pddl", "(define (domain x) (:predicates (p)");
    let p = write(&dir, "p.pddl", DEAD_PROBLEM);
    let (code, _, err) = run_cli(&["plan", &d, &p]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("d.pddl"), "{err}");
}

#[test]
fn unsolvable_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(&dir, "d.pddl", DEAD_DOMAIN);
    let p = write(&dir, "p.pddl", DEAD_PROBLEM);
    assert_eq!(run_cli(&["plan", &d, &p]).0, EXIT_UNSOLVABLE);
    assert_eq!(run_cli(&["bfs", &d, &p]).0, EXIT_UNSOLVABLE);
}

#[test]
fn broken_plan_is_invalid() {
    let (d, p) = paths("t01");
    let dir = tempfile::tempdir().unwrap();
    let (_, plan, _) = run_cli(&["plan", "-q", &d, &p]);
    let first = plan.lines().next().unwrap();
    let file = write(&dir, "bad.plan", &format!("{first}\n"));
    let (code, out, _) = run_cli(&["validate", &d, &p, &file]);
    assert_eq!(code, EXIT_INVALID);
    assert!(out.contains("goal"), "{out}");
}

#[test]
fn unknown_action_in_plan_is_input_error() {
    let (d, p) = paths("t01");
    let dir = tempfile::tempdir().unwrap();
    let file = write(&dir, "x.plan", "0: (fly t1 l1 l2) [1]\n");
    assert_eq!(run_cli(&["validate", &d, &p, &file]).0, EXIT_INPUT);
}

#[test]
fn bfs_plan_validates_and_cap_is_reported() {
    let (d, p) = paths("t02");
    let (code, plan, _) = run_cli(&["bfs", &d, &p]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(plan.lines().count(), 7);
    let dir = tempfile::tempdir().unwrap();
    let file = write(&dir, "bfs.plan", &plan);
    assert_eq!(run_cli(&["validate", &d, &p, &file]).0, EXIT_OK);
    assert_eq!(run_cli(&["--state-cap", "3", "bfs", &d, &p]).0, EXIT_BUDGET);
}

#[test]
fn analyze_reads_attribution() {
    let (d, p) = paths("ph02");
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("ph02.plan");
    let attr = dir.path().join("ph02.attr");
    let (plan, attr) = (plan.to_str().unwrap(), attr.to_str().unwrap());
    assert_eq!(run_cli(&["plan", "-q", &d, &p, "-o", plan, "--attribution", attr]).0, EXIT_OK);
    let (code, out, err) = run_cli(&["analyze", &d, &p, plan, attr]);
    assert_eq!(code, EXIT_OK, "{err}");
    for key in ["r_g_T", "r_g_G", "r_ga_G"] {
        assert!(out.contains(key), "{out}");
    }
    let short = write(&dir, "short.attr", "0\n");
    assert_eq!(run_cli(&["analyze", &d, &p, plan, &short]).0, EXIT_INPUT);
}

#[test]
fn tiny_budget_gives_budget_exit() {
    let (d, p) = paths("ph01");
    let (code, _, _) = run_cli(&["--max-iters", "1", "plan", "-q", &d, &p]);
    assert_eq!(code, EXIT_BUDGET);
}

#[test]
fn bench_prints_a_row_per_instance() {
    let suite = Suite::bundled();
    let dir = suite.dir.to_str().unwrap().to_string();
    let (code, out, _) = run_cli(&["--jobs", "4", "bench", "--no-sweep", &dir]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().filter(|l| l.contains("\tsolved\t")).count(), suite.instances.len());
}

#[test]
fn bad_flags_are_rejected() {
    assert_eq!(run_cli(&["--node-limit", "0", "bfs", "a", "b"]).0, EXIT_INPUT);
    assert_eq!(run_cli(&["--strategy", "odd", "bfs", "a", "b"]).0, EXIT_INPUT);
    assert_eq!(run_cli(&["frobnicate"]).0, EXIT_INPUT);
    assert_eq!(run_cli(&["--help"]).0, EXIT_OK);
}
