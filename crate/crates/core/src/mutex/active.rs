use std::fmt;

use crate::task::{FactId, GroundAction, GroundTask, Rational, ScheduledAction};

/// The four activation conditions for a scheduled pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    /// Both start together.
    A,
    /// Both end together.
    B,
    /// One ends exactly when the other starts.
    C,
    /// A delete lands strictly inside the other's over-all window.
    D,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Condition::A => 'a',
            Condition::B => 'b',
            Condition::C => 'c',
            Condition::D => 'd',
        };
        write!(f, "{c}")
    }
}

/// Why a scheduled pair clashes: the condition, the fact and the time it happens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Activation {
    pub condition: Condition,
    pub fact: FactId,
    pub time: Rational,
}

fn meet(x: &[FactId], y: &[FactId]) -> Option<FactId> {
    x.iter().find(|f| y.contains(f)).copied()
}

fn meet_any(xs: [&[FactId]; 2], y: &[FactId]) -> Option<FactId> {
    meet(xs[0], y).or_else(|| meet(xs[1], y))
}

fn inside(t: Rational, s: Rational, e: Rational) -> bool {
    s < t && t < e
}

/// The directed half of the test: clashes where `x` is the first argument of
/// each condition as written. [`is_active`] runs it both ways.
fn directed(x: &GroundAction, sx: &ScheduledAction, y: &GroundAction, sy: &ScheduledAction) -> Option<Activation> {
    let hit = |condition, fact: Option<FactId>, time| fact.map(|fact| Activation { condition, fact, time });
    if sx.start == sy.start {
        let f = meet_any([&x.pre_start, &x.add_start], &y.del_start);
        if let Some(a) = hit(Condition::A, f, sx.start) {
            return Some(a);
        }
    }
    if sx.end == sy.end {
        let f = meet_any([&x.pre_end, &x.add_end], &y.del_end);
        if let Some(a) = hit(Condition::B, f, sx.end) {
            return Some(a);
        }
    }
    if sx.end == sy.start {
        let f = meet_any([&y.add_start, &y.pre_start], &x.del_end)
            .or_else(|| meet_any([&x.add_end, &x.pre_end], &y.del_start));
        if let Some(a) = hit(Condition::C, f, sx.end) {
            return Some(a);
        }
    }
    if inside(sx.start, sy.start, sy.end) {
        if let Some(a) = hit(Condition::D, meet(&x.del_start, &y.pre_overall), sx.start) {
            return Some(a);
        }
    }
    if inside(sx.end, sy.start, sy.end) {
        if let Some(a) = hit(Condition::D, meet(&x.del_end, &y.pre_overall), sx.end) {
            return Some(a);
        }
    }
    None
}

/// Tests the activation conditions on a scheduled pair, straight from the
/// actions' condition and effect sets. Symmetric in `a` and `b`.
pub fn is_active(task: &GroundTask, a: &ScheduledAction, b: &ScheduledAction) -> Option<Activation> {
    let ga = task.action(a.action);
    let gb = task.action(b.action);
    let ab = directed(ga, a, gb, b);
    let ba = directed(gb, b, ga, a);
    match (ab, ba) {
        (Some(x), Some(y)) => Some(if (x.condition, x.fact) <= (y.condition, y.fact) { x } else { y }),
        (x, y) => x.or(y),
    }
}
