//! Plan files: one action per line, `<start>: (<name> <args>) [<duration>]`,
//! sorted by start time then action id.

use std::fmt::Write as _;

use thiserror::Error;

use crate::pddl::{format_rational, parse_rational};
use crate::pert::TemporalSchedule;
use crate::task::{GroundTask, ScheduledAction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanFileError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: unknown action {name}")]
    UnknownAction { line: usize, name: String },
    #[error("line {line}: {name} lasts {expected}, not {got}")]
    Duration {
        line: usize,
        name: String,
        expected: String,
        got: String,
    },
}

/// Indices of the schedule entries in file order.
pub fn file_order(schedule: &TemporalSchedule) -> Vec<usize> {
    let mut order: Vec<usize> = (0..schedule.len()).collect();
    order.sort_by_key(|&i| (schedule.actions[i].start, schedule.actions[i].action, i));
    order
}

pub fn write_plan(task: &GroundTask, schedule: &TemporalSchedule) -> String {
    let mut s = String::new();
    for i in file_order(schedule) {
        let e = &schedule.actions[i];
        let _ = writeln!(
            s,
            "{}: {} [{}]",
            format_rational(e.start),
            task.action(e.action).name(),
            format_rational(e.end - e.start)
        );
    }
    s
}

/// Reads a plan file. Blank lines and `;` comments are skipped. Entries are
/// returned in file order.
pub fn parse_plan(task: &GroundTask, text: &str) -> Result<TemporalSchedule, PlanFileError> {
    let mut actions = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split(';').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let bad = |msg: &str| PlanFileError::Malformed {
            line,
            msg: msg.to_string(),
        };
        let (start, rest) = body.split_once(':').ok_or_else(|| bad("missing `:` after the start time"))?;
        let start = parse_rational(start.trim()).ok_or_else(|| bad("start time is not a number"))?;
        let rest = rest.trim();
        let open = rest.find('(').ok_or_else(|| bad("missing `(`"))?;
        let close = rest.find(')').ok_or_else(|| bad("missing `)`"))?;
        let inner = rest[open + 1..close].to_ascii_lowercase();
        let mut words = inner.split_whitespace();
        let schema = words.next().ok_or_else(|| bad("empty action"))?;
        let args: Vec<&str> = words.collect();
        let id = task.find_action(schema, &args).ok_or_else(|| PlanFileError::UnknownAction {
            line,
            name: format!("({})", inner.trim()),
        })?;
        let action = task.action(id);
        let tail = rest[close + 1..].trim();
        if !tail.is_empty() {
            let d = tail
                .strip_prefix('[')
                .and_then(|t| t.strip_suffix(']'))
                .and_then(|t| parse_rational(t.trim()))
                .ok_or_else(|| bad("duration must be written `[d]`"))?;
            if d != action.duration {
                return Err(PlanFileError::Duration {
                    line,
                    name: action.name(),
                    expected: format_rational(action.duration),
                    got: format_rational(d),
                });
            }
        }
        actions.push(ScheduledAction::new(action, start));
    }
    Ok(TemporalSchedule::from_actions(actions))
}

/// One subgoal index per line, aligned with the plan file.
pub fn write_attribution(schedule: &TemporalSchedule, attribution: &[usize]) -> String {
    file_order(schedule).into_iter().map(|i| format!("{}\n", attribution[i])).collect()
}

/// Reads an attribution file; `-` marks an unattributed entry.
pub fn parse_attribution(text: &str) -> Result<Vec<Option<usize>>, PlanFileError> {
    text.lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.split(';').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .map(|(line, l)| {
            if l == "-" {
                return Ok(None);
            }
            l.parse().map(Some).map_err(|_| PlanFileError::Malformed {
                line,
                msg: format!("`{l}` is not a subgoal index"),
            })
        })
        .collect()
}
