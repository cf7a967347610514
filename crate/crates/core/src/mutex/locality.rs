use std::fmt::Write as _;

use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::pddl::format_rational;
use crate::pert::TemporalSchedule;
use crate::task::{GroundTask, Rational};

use super::active::is_active;
use super::table::MutexTable;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("plan entry {0} has no subgoal attribution")]
    Unattributed(usize),
    #[error("attribution lists {got} entries for a plan of {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("number of stages must be positive")]
    NoStages,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalityReport {
    pub n_c: usize,
    pub n_g_t: usize,
    pub n_g_g: usize,
    pub n_ga_g: usize,
    pub r_g_t: Rational,
    pub r_g_g: Rational,
    pub r_ga_g: Rational,
}

fn ratio(n: usize, d: usize) -> Rational {
    if d == 0 {
        Rational::zero()
    } else {
        Rational::new(n as i64, d as i64)
    }
}

/// Stage of a time point when the horizon is cut into `stages` equal slices.
pub fn stage_of(time: Rational, makespan: Rational, stages: usize) -> usize {
    if makespan <= Rational::zero() {
        return 0;
    }
    let k = (time * Rational::from_integer(stages as i64) / makespan).floor().to_integer();
    (k.max(0) as usize).min(stages - 1)
}

/// Counts mutex constraints among plan actions and how many are global under
/// partitioning by time and by subgoal. `attribution[i]` is the subgoal of
/// schedule entry `i`; `None` entries are rejected.
pub fn locality(
    task: &GroundTask,
    table: &MutexTable,
    schedule: &TemporalSchedule,
    attribution: &[Option<usize>],
    stages: usize,
) -> Result<LocalityReport, PartitionError> {
    let entries = &schedule.actions;
    if attribution.len() != entries.len() {
        return Err(PartitionError::LengthMismatch {
            expected: entries.len(),
            got: attribution.len(),
        });
    }
    if stages == 0 {
        return Err(PartitionError::NoStages);
    }
    let owner: Vec<usize> = attribution
        .iter()
        .enumerate()
        .map(|(i, a)| a.ok_or(PartitionError::Unattributed(i)))
        .collect::<Result<_, _>>()?;
    let makespan = schedule.makespan;
    let stage: Vec<usize> = entries.iter().map(|e| stage_of(e.start, makespan, stages)).collect();

    let (mut n_c, mut n_g_t, mut n_g_g, mut n_ga_g) = (0, 0, 0, 0);
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            if !table.contains(entries[i].action, entries[j].action) {
                continue;
            }
            n_c += 1;
            if stage[i] != stage[j] {
                n_g_t += 1;
            }
            if owner[i] != owner[j] {
                n_g_g += 1;
                if is_active(task, &entries[i], &entries[j]).is_some() {
                    n_ga_g += 1;
                }
            }
        }
    }
    Ok(LocalityReport {
        n_c,
        n_g_t,
        n_g_g,
        n_ga_g,
        r_g_t: ratio(n_g_t, n_c),
        r_g_g: ratio(n_g_g, n_c),
        r_ga_g: ratio(n_ga_g, n_c),
    })
}

fn approx(r: Rational) -> String {
    format!("{:.3}", r.to_f64().unwrap_or(0.0))
}

impl LocalityReport {
    pub fn to_line(&self) -> String {
        format!(
            "N_c={} N_g_T={} N_g_G={} N_ga_G={} r_g_T={} r_g_G={} r_ga_G={}",
            self.n_c,
            self.n_g_t,
            self.n_g_g,
            self.n_ga_g,
            approx(self.r_g_t),
            approx(self.r_g_g),
            approx(self.r_ga_g)
        )
    }

    /// `key: value` lines. Ratios are exact.
    pub fn to_structured(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "N_c: {}", self.n_c);
        let _ = writeln!(s, "N_g_T: {}", self.n_g_t);
        let _ = writeln!(s, "N_g_G: {}", self.n_g_g);
        let _ = writeln!(s, "N_ga_G: {}", self.n_ga_g);
        let _ = writeln!(s, "r_g_T: {}", format_rational(self.r_g_t));
        let _ = writeln!(s, "r_g_G: {}", format_rational(self.r_g_g));
        let _ = writeln!(s, "r_ga_G: {}", format_rational(self.r_ga_g));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stages_split_the_horizon_evenly() {
        let m = Rational::from_integer(10);
        assert_eq!(stage_of(Rational::from_integer(0), m, 2), 0);
        assert_eq!(stage_of(Rational::from_integer(4), m, 2), 0);
        assert_eq!(stage_of(Rational::from_integer(5), m, 2), 1);
        assert_eq!(stage_of(Rational::from_integer(10), m, 2), 1);
    }

    #[test]
    fn reference_ratio_from_the_airport_example() {
        // 63 constraints, 52 of them local to a subgoal.
        assert_eq!(ratio(63 - 52, 63), Rational::new(11, 63));
        assert_eq!(approx(ratio(11, 63)), "0.175");
    }
}
