//! Environment handling lives in its own test binary so setting variables
//! cannot leak into tests running on other threads.

use clap::Parser;
use subplan::harness::cli::Cli;
use subplan::resolve::Strategy;
use subplan::task::Rational;

#[test]
fn flags_beat_environment_beats_defaults() {
    let defaults = Cli::parse_from(["subplan", "bfs", "d", "p"]).config.resolve_config();
    assert_eq!(defaults.gamma0, Rational::from_integer(100));
    assert_eq!(defaults.xi, Rational::new(1, 10));
    assert_eq!(defaults.tau, Rational::new(1, 10000));
    assert_eq!(defaults.node_limit, 3000);
    assert_eq!(defaults.time_budget, Some(std::time::Duration::from_secs(1800)));
    assert_eq!(defaults.strategy, Strategy::Ipc4);

    std::env::set_var("SUBPLAN_NODE_LIMIT", "77");
    std::env::set_var("SUBPLAN_STRATEGY", "new");
    let from_env = Cli::parse_from(["subplan", "bfs", "d", "p"]).config.resolve_config();
    assert_eq!(from_env.node_limit, 77);
    assert_eq!(from_env.strategy, Strategy::New);

    let from_flag = Cli::parse_from(["subplan", "--node-limit", "5", "bfs", "d", "p"]).config.resolve_config();
    assert_eq!(from_flag.node_limit, 5);
    assert_eq!(from_flag.strategy, Strategy::New);
    std::env::remove_var("SUBPLAN_NODE_LIMIT");
    std::env::remove_var("SUBPLAN_STRATEGY");
}
