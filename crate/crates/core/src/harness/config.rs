use std::time::Duration;

use clap::Args;

use crate::pddl::parse_rational;
use crate::resolve::{ResolveConfig, Strategy};
use crate::task::Rational;

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("`{s}` is not a number"))
}

fn nonnegative(s: &str) -> Result<Rational, String> {
    let r = rational(s)?;
    if r < Rational::from_integer(0) {
        return Err(format!("`{s}` must not be negative"));
    }
    Ok(r)
}

fn positive(s: &str) -> Result<Rational, String> {
    let r = rational(s)?;
    if r <= Rational::from_integer(0) {
        return Err(format!("`{s}` must be positive"));
    }
    Ok(r)
}

/// Planner knobs shared by every subcommand. Flags override `SUBPLAN_*`
/// environment variables, which override the defaults.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Penalty initialization: `ipc4` starts at gamma0, `new` at zero.
    #[arg(long, global = true, env = "SUBPLAN_STRATEGY", default_value = "ipc4")]
    pub strategy: Strategy,
    #[arg(long, global = true, env = "SUBPLAN_GAMMA0", default_value = "100", value_parser = nonnegative)]
    pub gamma0: Rational,
    /// Penalty update rate.
    #[arg(long, global = true, env = "SUBPLAN_XI", default_value = "0.1", value_parser = positive)]
    pub xi: Rational,
    /// Weight of the makespan estimate in quality mode.
    #[arg(long, global = true, env = "SUBPLAN_TAU", default_value = "0.0001", value_parser = nonnegative)]
    pub tau: Rational,
    /// Node expansions per subproblem search before falling back.
    #[arg(long, global = true, env = "SUBPLAN_NODE_LIMIT", default_value_t = 3000, value_parser = clap::value_parser!(u64).range(1..))]
    pub node_limit: u64,
    #[arg(long, global = true, env = "SUBPLAN_MAX_ITERS", default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_iters: u64,
    /// Wall-clock budget in seconds.
    #[arg(long, global = true, env = "SUBPLAN_TIME_BUDGET", default_value = "1800", value_parser = positive)]
    pub time_budget: Rational,
    /// Add the makespan estimate to the search objective.
    #[arg(long, global = true, env = "SUBPLAN_QUALITY")]
    pub quality: bool,
    /// Worker threads for `bench`.
    #[arg(long, global = true, env = "SUBPLAN_JOBS", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: u64,
    /// State limit for `bfs`.
    #[arg(long, global = true, env = "SUBPLAN_STATE_CAP", default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub state_cap: u64,
}

impl RunConfig {
    pub fn resolve_config(&self) -> ResolveConfig {
        let millis = (self.time_budget * Rational::from_integer(1000)).ceil().to_integer();
        ResolveConfig {
            strategy: self.strategy,
            gamma0: self.gamma0,
            xi: self.xi,
            tau: self.tau,
            node_limit: self.node_limit as usize,
            max_iters: self.max_iters as usize,
            time_budget: Some(Duration::from_millis(millis.max(1) as u64)),
            quality: self.quality,
            bundle: 1,
        }
    }
}
