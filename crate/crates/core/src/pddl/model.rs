//! Lifted domain and problem models, plus a pretty-printer that emits
//! PDDL the parser reads back to an equal model.

use std::fmt::{self, Write};

use crate::task::{Rational, Timing};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedName {
    pub name: String,
    pub ty: String,
}

impl TypedName {
    pub fn new(name: &str, ty: &str) -> Self {
        TypedName {
            name: name.into(),
            ty: ty.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Const(c) => f.write_str(c),
        }
    }
}

/// A predicate or function applied to terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomSchema {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl fmt::Display for AtomSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateSchema {
    pub name: String,
    pub params: Vec<TypedName>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DurationExpr {
    Constant(Rational),
    /// A static numeric function evaluated at grounding time.
    Function(AtomSchema),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumericConditionSchema {
    pub function: AtomSchema,
    pub bound: Rational,
    pub timing: Timing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumericOp {
    Increase,
    Decrease,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumericEffectSchema {
    pub op: NumericOp,
    pub function: AtomSchema,
    pub amount: Rational,
    pub timing: Timing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<TypedName>,
    /// `None` for plain (non-durative) actions.
    pub duration: Option<DurationExpr>,
    pub pre_start: Vec<AtomSchema>,
    pub pre_overall: Vec<AtomSchema>,
    pub pre_end: Vec<AtomSchema>,
    pub add_start: Vec<AtomSchema>,
    pub add_end: Vec<AtomSchema>,
    pub del_start: Vec<AtomSchema>,
    pub del_end: Vec<AtomSchema>,
    pub numeric_pre: Vec<NumericConditionSchema>,
    pub numeric_effects: Vec<NumericEffectSchema>,
}

impl ActionSchema {
    pub fn is_durative(&self) -> bool {
        self.duration.is_some()
    }

    pub fn empty(name: &str, durative: bool) -> Self {
        ActionSchema {
            name: name.into(),
            params: Vec::new(),
            duration: durative.then(|| DurationExpr::Constant(Rational::from_integer(1))),
            pre_start: Vec::new(),
            pre_overall: Vec::new(),
            pre_end: Vec::new(),
            add_start: Vec::new(),
            add_end: Vec::new(),
            del_start: Vec::new(),
            del_end: Vec::new(),
            numeric_pre: Vec::new(),
            numeric_effects: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainModel {
    pub name: String,
    pub requirements: Vec<String>,
    /// `(type, parent)` pairs; the root type is `object`.
    pub types: Vec<(String, String)>,
    pub constants: Vec<TypedName>,
    pub predicates: Vec<PredicateSchema>,
    pub functions: Vec<PredicateSchema>,
    pub actions: Vec<ActionSchema>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAtomSpec {
    pub predicate: String,
    pub args: Vec<String>,
}

impl fmt::Display for GroundAtomSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    MinimizeMakespan,
    MinimizeActions,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemModel {
    pub name: String,
    pub domain_name: String,
    pub objects: Vec<TypedName>,
    pub init: Vec<GroundAtomSpec>,
    pub numeric_init: Vec<(GroundAtomSpec, Rational)>,
    pub goal: Vec<GroundAtomSpec>,
    pub metric: Option<Metric>,
}

/// Writes a rational as an integer, a terminating decimal, or `n/d`.
pub fn format_rational(r: Rational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    let mut d = *r.denom();
    let mut twos = 0;
    let mut fives = 0;
    while d % 2 == 0 {
        d /= 2;
        twos += 1;
    }
    while d % 5 == 0 {
        d /= 5;
        fives += 1;
    }
    if d != 1 {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let digits = twos.max(fives);
    let scale = 10i64.pow(digits);
    let scaled = (r * Rational::from_integer(scale)).to_integer();
    let sign = if scaled < 0 { "-" } else { "" };
    let abs = scaled.abs();
    format!(
        "{sign}{}.{:0width$}",
        abs / scale,
        abs % scale,
        width = digits as usize
    )
}

fn typed_list(out: &mut String, items: &[TypedName], var: bool) {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let prefix = if var { "?" } else { "" };
        let _ = write!(out, "{prefix}{} - {}", item.name, item.ty);
    }
}

fn conj(atoms: &[String]) -> String {
    match atoms.len() {
        0 => "(and)".to_string(),
        1 => atoms[0].clone(),
        _ => format!("(and {})", atoms.join(" ")),
    }
}

fn wrap(timing: Option<&str>, s: String) -> String {
    match timing {
        Some(t) => format!("({t} {s})"),
        None => s,
    }
}

impl fmt::Display for DomainModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (domain {})", self.name)?;
        if !self.requirements.is_empty() {
            writeln!(f, "  (:requirements {})", self.requirements.join(" "))?;
        }
        if !self.types.is_empty() {
            let ts: Vec<String> = self.types.iter().map(|(t, p)| format!("{t} - {p}")).collect();
            writeln!(f, "  (:types {})", ts.join(" "))?;
        }
        if !self.constants.is_empty() {
            let mut s = String::new();
            typed_list(&mut s, &self.constants, false);
            writeln!(f, "  (:constants {s})")?;
        }
        let schemas = |v: &[PredicateSchema]| {
            v.iter()
                .map(|p| {
                    let mut s = format!("({}", p.name);
                    if !p.params.is_empty() {
                        s.push(' ');
                        typed_list(&mut s, &p.params, true);
                    }
                    s.push(')');
                    s
                })
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(f, "  (:predicates {})", schemas(&self.predicates))?;
        if !self.functions.is_empty() {
            writeln!(f, "  (:functions {})", schemas(&self.functions))?;
        }
        for a in &self.actions {
            write!(f, "{a}")?;
        }
        writeln!(f, ")")
    }
}

fn numeric_cond(c: &NumericConditionSchema) -> String {
    format!("(>= {} {})", c.function, format_rational(c.bound))
}

fn numeric_eff(e: &NumericEffectSchema) -> String {
    let op = match e.op {
        NumericOp::Increase => "increase",
        NumericOp::Decrease => "decrease",
    };
    format!("({op} {} {})", e.function, format_rational(e.amount))
}

impl fmt::Display for ActionSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut params = String::new();
        typed_list(&mut params, &self.params, true);
        let show = |a: &AtomSchema| a.to_string();
        let neg = |a: &AtomSchema| format!("(not {a})");
        match &self.duration {
            None => {
                writeln!(f, "  (:action {}", self.name)?;
                writeln!(f, "   :parameters ({params})")?;
                let mut pre: Vec<String> = self.pre_start.iter().map(show).collect();
                pre.extend(self.numeric_pre.iter().map(numeric_cond));
                writeln!(f, "   :precondition {}", conj(&pre))?;
                let mut eff: Vec<String> = self.add_start.iter().map(show).collect();
                eff.extend(self.del_start.iter().map(neg));
                eff.extend(self.numeric_effects.iter().map(numeric_eff));
                writeln!(f, "   :effect {})", conj(&eff))
            }
            Some(d) => {
                writeln!(f, "  (:durative-action {}", self.name)?;
                writeln!(f, "   :parameters ({params})")?;
                let dur = match d {
                    DurationExpr::Constant(c) => format_rational(*c),
                    DurationExpr::Function(a) => a.to_string(),
                };
                writeln!(f, "   :duration (= ?duration {dur})")?;
                let tag = |t: Timing| match t {
                    Timing::Start => "at start",
                    Timing::OverAll => "over all",
                    Timing::End => "at end",
                };
                let mut cond: Vec<String> = Vec::new();
                for (t, v) in [
                    (Timing::Start, &self.pre_start),
                    (Timing::OverAll, &self.pre_overall),
                    (Timing::End, &self.pre_end),
                ] {
                    cond.extend(v.iter().map(|a| wrap(Some(tag(t)), show(a))));
                }
                cond.extend(
                    self.numeric_pre
                        .iter()
                        .map(|c| wrap(Some(tag(c.timing)), numeric_cond(c))),
                );
                writeln!(f, "   :condition {}", conj(&cond))?;
                let mut eff: Vec<String> = Vec::new();
                for (t, add, del) in [
                    (Timing::Start, &self.add_start, &self.del_start),
                    (Timing::End, &self.add_end, &self.del_end),
                ] {
                    eff.extend(add.iter().map(|a| wrap(Some(tag(t)), show(a))));
                    eff.extend(del.iter().map(|a| wrap(Some(tag(t)), neg(a))));
                }
                eff.extend(
                    self.numeric_effects
                        .iter()
                        .map(|e| wrap(Some(tag(e.timing)), numeric_eff(e))),
                );
                writeln!(f, "   :effect {})", conj(&eff))
            }
        }
    }
}

impl fmt::Display for ProblemModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (problem {})", self.name)?;
        writeln!(f, "  (:domain {})", self.domain_name)?;
        let mut objs = String::new();
        typed_list(&mut objs, &self.objects, false);
        writeln!(f, "  (:objects {objs})")?;
        let mut init: Vec<String> = self.init.iter().map(|a| a.to_string()).collect();
        init.extend(
            self.numeric_init
                .iter()
                .map(|(a, v)| format!("(= {a} {})", format_rational(*v))),
        );
        writeln!(f, "  (:init {})", init.join(" "))?;
        let goals: Vec<String> = self.goal.iter().map(|a| a.to_string()).collect();
        writeln!(f, "  (:goal (and {}))", goals.join(" "))?;
        match self.metric {
            Some(Metric::MinimizeMakespan) => writeln!(f, "  (:metric minimize (total-time))")?,
            Some(Metric::MinimizeActions) => writeln!(f, "  (:metric minimize (total-actions))")?,
            None => {}
        }
        writeln!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_formatting() {
        assert_eq!(format_rational(Rational::from_integer(3)), "3");
        assert_eq!(format_rational(Rational::new(7, 2)), "3.5");
        assert_eq!(format_rational(Rational::new(1, 100)), "0.01");
        assert_eq!(format_rational(Rational::new(-1, 4)), "-0.25");
        assert_eq!(format_rational(Rational::new(1, 3)), "1/3");
    }
}
