//! The bundled instance suite and the benchmark driver.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use num_traits::Zero;
use serde::Deserialize;
use thiserror::Error;

use crate::decompose::partition_bundles;
use crate::mutex::persistent_mutexes;
use crate::pddl::{format_rational, PddlError};
use crate::resolve::{plan, ResolveConfig, ResolveError};
use crate::search::{solve_subproblem, Relaxation, SearchConfig};
use crate::task::{GroundTask, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct Instance {
    pub name: String,
    pub family: String,
    pub domain: String,
    pub problem: String,
    /// Length of a shortest sequential plan, when known.
    #[serde(default)]
    pub optimal: Option<usize>,
    #[serde(default)]
    pub tags: Vec<String>,
}

impl Instance {
    pub fn has_tag(&self, tag: &str) -> bool {
        self.tags.iter().any(|t| t == tag)
    }
}

#[derive(Debug, Deserialize)]
struct Manifest {
    #[serde(default)]
    instance: Vec<Instance>,
}

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("{path}: {msg}")]
    Manifest { path: String, msg: String },
    #[error("{}", .error.diagnostic(.file))]
    Pddl { file: String, error: PddlError },
}

#[derive(Debug, Clone)]
pub struct Suite {
    pub dir: PathBuf,
    pub instances: Vec<Instance>,
}

pub(crate) fn read(path: &Path) -> Result<String, SuiteError> {
    std::fs::read_to_string(path).map_err(|e| SuiteError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

/// Loads a domain/problem pair from disk, attributing errors to the file at fault.
pub fn load_files(domain: &Path, problem: &Path) -> Result<GroundTask, SuiteError> {
    let d = read(domain)?;
    let p = read(problem)?;
    let dm = crate::pddl::parse_domain(&d).map_err(|error| SuiteError::Pddl {
        file: domain.display().to_string(),
        error,
    })?;
    let pm = crate::pddl::parse_problem(&p).map_err(|error| SuiteError::Pddl {
        file: problem.display().to_string(),
        error,
    })?;
    crate::pddl::ground(&dm, &pm).map_err(|error| SuiteError::Pddl {
        file: problem.display().to_string(),
        error,
    })
}

impl Suite {
    /// Reads `manifest.toml` in `dir`. A directory without a manifest is an
    /// empty suite.
    pub fn load(dir: impl AsRef<Path>) -> Result<Suite, SuiteError> {
        let dir = dir.as_ref().to_path_buf();
        let path = dir.join("manifest.toml");
        if !path.exists() {
            return Ok(Suite {
                dir,
                instances: Vec::new(),
            });
        }
        let text = read(&path)?;
        let manifest: Manifest = toml::from_str(&text).map_err(|e| SuiteError::Manifest {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        Ok(Suite {
            dir,
            instances: manifest.instance,
        })
    }

    /// The suite shipped with this crate.
    pub fn bundled() -> Suite {
        Suite::load(Path::new(env!("CARGO_MANIFEST_DIR")).join("suite")).expect("bundled suite manifest")
    }

    pub fn domain_path(&self, inst: &Instance) -> PathBuf {
        self.dir.join(&inst.domain)
    }

    pub fn problem_path(&self, inst: &Instance) -> PathBuf {
        self.dir.join(&inst.problem)
    }

    pub fn task(&self, inst: &Instance) -> Result<GroundTask, SuiteError> {
        load_files(&self.domain_path(inst), &self.problem_path(inst))
    }

    pub fn find(&self, name: &str) -> Option<&Instance> {
        self.instances.iter().find(|i| i.name == name)
    }

    pub fn tagged<'a>(&'a self, tag: &'a str) -> impl Iterator<Item = &'a Instance> + 'a {
        self.instances.iter().filter(move |i| i.has_tag(tag))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Solved,
    Budget,
    Unsolvable,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Solved => "solved",
            Status::Budget => "budget",
            Status::Unsolvable => "unsolvable",
            Status::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRow {
    pub name: String,
    pub status: Status,
    pub length: usize,
    pub makespan: Rational,
    pub iterations: usize,
    pub expansions: u64,
    pub millis: u128,
}

fn bench_one(suite: &Suite, inst: &Instance, config: &ResolveConfig) -> BenchRow {
    let started = Instant::now();
    let mut row = BenchRow {
        name: inst.name.clone(),
        status: Status::Error,
        length: 0,
        makespan: Rational::zero(),
        iterations: 0,
        expansions: 0,
        millis: 0,
    };
    if let Ok(task) = suite.task(inst) {
        let (status, out) = match plan(&task, config) {
            Ok(out) => (Status::Solved, Some(out)),
            Err(ResolveError::Budget(out)) => (Status::Budget, Some(*out)),
            Err(ResolveError::Unsolvable(_)) => (Status::Unsolvable, None),
            Err(ResolveError::Schedule(_)) => (Status::Error, None),
        };
        row.status = status;
        if let Some(out) = out {
            row.length = out.schedule.len();
            row.makespan = out.schedule.makespan;
            row.iterations = out.iterations;
            row.expansions = out.expansions;
        }
    }
    row.millis = started.elapsed().as_millis();
    row
}

/// Plans every instance, `jobs` at a time. Rows come back in manifest order.
pub fn bench(suite: &Suite, config: &ResolveConfig, jobs: usize) -> Vec<BenchRow> {
    let next = AtomicUsize::new(0);
    let rows: Mutex<Vec<Option<BenchRow>>> = Mutex::new(vec![None; suite.instances.len()]);
    std::thread::scope(|scope| {
        for _ in 0..jobs.max(1).min(suite.instances.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(inst) = suite.instances.get(i) else { break };
                let row = bench_one(suite, inst, config);
                rows.lock().expect("bench rows")[i] = Some(row);
            });
        }
    });
    rows.into_inner().expect("bench rows").into_iter().flatten().collect()
}

pub fn format_table(rows: &[BenchRow]) -> String {
    let mut s = String::from("instance\tstatus\tlength\tmakespan\titerations\texpansions\tms\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.name,
            r.status.as_str(),
            r.length,
            format_rational(r.makespan),
            r.iterations,
            r.expansions,
            r.millis
        );
    }
    s
}

/// Node expansions of the base planner when the goal conjuncts are grouped
/// into bundles, for bundle sizes `max_size` down to 1. Each bundle is solved
/// from the initial state without penalties; expansions are summed.
pub fn bundle_sweep(task: &GroundTask, max_size: usize, node_limit: usize) -> Vec<(usize, u64)> {
    let table = persistent_mutexes(task);
    let config = SearchConfig {
        node_limit,
        ..SearchConfig::default()
    };
    (1..=max_size.min(task.goals.len()).max(1))
        .rev()
        .map(|size| {
            let set = partition_bundles(task, size);
            let total = set
                .subproblems
                .iter()
                .map(|sub| {
                    let relax = Relaxation::new(task, &sub.relevant);
                    match solve_subproblem(&relax, &task.init, &sub.goals, None, &table, &config) {
                        Ok(o) => o.expansions,
                        Err(e) => e.expansions(),
                    }
                })
                .sum();
            (size, total)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_suite_gives_empty_table() {
        let dir = tempfile::tempdir().unwrap();
        let suite = Suite::load(dir.path()).unwrap();
        let rows = bench(&suite, &ResolveConfig::default(), 2);
        assert!(rows.is_empty());
        assert_eq!(format_table(&rows).lines().count(), 1);
    }

    #[test]
    fn bundled_manifest_parses() {
        let suite = Suite::bundled();
        assert!(suite.instances.len() >= 20);
        for inst in &suite.instances {
            assert!(suite.domain_path(inst).exists(), "{}", inst.domain);
            assert!(suite.problem_path(inst).exists(), "{}", inst.problem);
        }
    }
}
