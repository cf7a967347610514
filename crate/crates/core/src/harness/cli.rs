//! Subcommands: `plan`, `validate`, `analyze`, `bfs`, `bench`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::mutex::{locality, persistent_mutexes, validate};
use crate::pert::schedule;
use crate::resolve::{plan, ResolveError};
use crate::task::{GroundTask, SequentialPlan};

use super::bfs::{bfs, BfsError};
use super::config::RunConfig;
use super::planfile::{parse_attribution, parse_plan, write_attribution, write_plan};
use super::suite::{bench, bundle_sweep, format_table, load_files, read, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_UNSOLVABLE: i32 = 3;
pub const EXIT_INVALID: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "subplan", version, about = "Partition-and-resolve planner and plan validator")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plan and write the schedule in plan-file format.
    Plan {
        domain: PathBuf,
        problem: PathBuf,
        /// Plan file to write; standard output when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the subgoal of each plan line here.
        #[arg(long)]
        attribution: Option<PathBuf>,
        /// Suppress per-iteration telemetry on standard error.
        #[arg(short, long)]
        quiet: bool,
    },
    /// Check a plan file; exit 0 when it is valid.
    Validate {
        domain: PathBuf,
        problem: PathBuf,
        plan: PathBuf,
        /// `key: value` report instead of one finding per line.
        #[arg(long)]
        structured: bool,
    },
    /// Constraint-locality ratios of a plan under a subgoal attribution.
    Analyze {
        domain: PathBuf,
        problem: PathBuf,
        plan: PathBuf,
        attribution: PathBuf,
        /// Horizon slices; defaults to the number of goal conjuncts.
        #[arg(long)]
        stages: Option<usize>,
    },
    /// Shortest sequential plan by breadth-first search.
    Bfs { domain: PathBuf, problem: PathBuf },
    /// Plan every instance of a suite and tabulate the results.
    Bench {
        suite: PathBuf,
        /// Skip the bundle-size sweep on instances tagged `sweep`.
        #[arg(long)]
        no_sweep: bool,
    },
}

fn load(domain: &Path, problem: &Path, err: &mut dyn Write) -> Option<GroundTask> {
    match load_files(domain, problem) {
        Ok(t) => Some(t),
        Err(e) => {
            let _ = writeln!(err, "{e}");
            None
        }
    }
}

fn write_out(path: &Path, text: &str, err: &mut dyn Write) -> bool {
    match std::fs::write(path, text) {
        Ok(()) => true,
        Err(e) => {
            let _ = writeln!(err, "{}: {e}", path.display());
            false
        }
    }
}

fn read_or_report(path: &Path, err: &mut dyn Write) -> Option<String> {
    match read(path) {
        Ok(s) => Some(s),
        Err(e) => {
            let _ = writeln!(err, "{e}");
            None
        }
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let config = cli.config.resolve_config();
    match cli.command {
        Command::Plan {
            domain,
            problem,
            output,
            attribution,
            quiet,
        } => {
            let Some(task) = load(&domain, &problem, err) else { return EXIT_INPUT };
            let (code, outcome) = match plan(&task, &config) {
                Ok(o) => (EXIT_OK, o),
                Err(ResolveError::Budget(o)) => {
                    let _ = writeln!(err, "budget exhausted after {} iterations", o.iterations);
                    (EXIT_BUDGET, *o)
                }
                Err(ResolveError::Unsolvable(why)) => {
                    let _ = writeln!(err, "unsolvable: {why}");
                    return EXIT_UNSOLVABLE;
                }
                Err(e @ ResolveError::Schedule(_)) => {
                    let _ = writeln!(err, "{e}");
                    return EXIT_BUDGET;
                }
            };
            if !quiet {
                for line in &outcome.telemetry {
                    let _ = writeln!(err, "{line}");
                }
            }
            if code != EXIT_OK {
                return code;
            }
            let text = write_plan(&task, &outcome.schedule);
            match output {
                Some(path) => {
                    if !write_out(&path, &text, err) {
                        return EXIT_INPUT;
                    }
                }
                None => {
                    let _ = write!(out, "{text}");
                }
            }
            if let Some(path) = attribution {
                if !write_out(&path, &write_attribution(&outcome.schedule, &outcome.attribution), err) {
                    return EXIT_INPUT;
                }
            }
            EXIT_OK
        }
        Command::Validate {
            domain,
            problem,
            plan,
            structured,
        } => {
            let Some(task) = load(&domain, &problem, err) else { return EXIT_INPUT };
            let Some(text) = read_or_report(&plan, err) else { return EXIT_INPUT };
            let sched = match parse_plan(&task, &text) {
                Ok(s) => s,
                Err(e) => {
                    let _ = writeln!(err, "{}: {e}", plan.display());
                    return EXIT_INPUT;
                }
            };
            let report = validate(&task, &sched);
            let body = if structured {
                report.to_structured(&task, &sched)
            } else {
                report.to_text(&task, &sched)
            };
            let _ = write!(out, "{body}");
            if report.verdict {
                EXIT_OK
            } else {
                EXIT_INVALID
            }
        }
        Command::Analyze {
            domain,
            problem,
            plan,
            attribution,
            stages,
        } => {
            let Some(task) = load(&domain, &problem, err) else { return EXIT_INPUT };
            let Some(text) = read_or_report(&plan, err) else { return EXIT_INPUT };
            let Some(attr_text) = read_or_report(&attribution, err) else { return EXIT_INPUT };
            let parsed = parse_plan(&task, &text).and_then(|s| Ok((s, parse_attribution(&attr_text)?)));
            let (sched, attr) = match parsed {
                Ok(v) => v,
                Err(e) => {
                    let _ = writeln!(err, "{e}");
                    return EXIT_INPUT;
                }
            };
            let stages = stages.unwrap_or(task.goals.len().max(1));
            match locality(&task, &persistent_mutexes(&task), &sched, &attr, stages) {
                Ok(report) => {
                    let _ = write!(out, "{}", report.to_structured());
                    EXIT_OK
                }
                Err(e) => {
                    let _ = writeln!(err, "{e}");
                    EXIT_INPUT
                }
            }
        }
        Command::Bfs { domain, problem } => {
            let Some(task) = load(&domain, &problem, err) else { return EXIT_INPUT };
            match bfs(&task, cli.config.state_cap as usize) {
                Ok(Some(steps)) => match schedule(&task, &SequentialPlan::new(steps)) {
                    Ok(s) => {
                        let _ = write!(out, "{}", write_plan(&task, &s));
                        EXIT_OK
                    }
                    Err(e) => {
                        let _ = writeln!(err, "{e}");
                        EXIT_BUDGET
                    }
                },
                Ok(None) => {
                    let _ = writeln!(err, "unsolvable: no reachable state satisfies the goal");
                    EXIT_UNSOLVABLE
                }
                Err(e @ BfsError::CapExceeded(_)) => {
                    let _ = writeln!(err, "{e}");
                    EXIT_BUDGET
                }
            }
        }
        Command::Bench { suite, no_sweep } => {
            let suite = match Suite::load(&suite) {
                Ok(s) => s,
                Err(e) => {
                    let _ = writeln!(err, "{e}");
                    return EXIT_INPUT;
                }
            };
            let rows = bench(&suite, &config, cli.config.jobs as usize);
            let _ = write!(out, "{}", format_table(&rows));
            if !no_sweep {
                for inst in suite.tagged("sweep") {
                    let task = match suite.task(inst) {
                        Ok(t) => t,
                        Err(_) => continue,
                    };
                    let _ = writeln!(out, "\nsweep {}\nbundle\texpansions", inst.name);
                    for (size, exp) in bundle_sweep(&task, 5, SWEEP_NODE_LIMIT) {
                        let _ = writeln!(out, "{size}\t{exp}");
                    }
                }
            }
            EXIT_OK
        }
    }
}

/// Expansion cap for the bundle sweep, high enough that large bundles are
/// measured rather than cut off.
pub const SWEEP_NODE_LIMIT: usize = 200_000;
