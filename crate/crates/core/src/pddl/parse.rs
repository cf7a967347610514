use std::collections::{HashMap, HashSet};

use super::model::*;
use super::sexpr::{self, Pos, Sexpr};
use super::PddlError;
use crate::task::{Rational, Timing};

type Result<T> = std::result::Result<T, PddlError>;

fn atom_of<'a>(e: &'a Sexpr, what: &str) -> Result<&'a str> {
    e.as_atom()
        .ok_or_else(|| PddlError::syntax(e.pos(), format!("expected {what}, found a list")))
}

fn list_of<'a>(e: &'a Sexpr, what: &str) -> Result<&'a [Sexpr]> {
    e.as_list()
        .ok_or_else(|| PddlError::syntax(e.pos(), format!("expected {what}, found a symbol")))
}

pub(crate) fn parse_number(s: &str, pos: Pos) -> Result<Rational> {
    let bad = || PddlError::syntax(pos, format!("`{s}` is not a number"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.parse().map_err(|_| bad())?;
        let d: i64 = d.parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let int: i64 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| bad())? };
    let mut value = Rational::from_integer(int);
    if !frac_part.is_empty() {
        let scale = 10i64.checked_pow(frac_part.len() as u32).ok_or_else(bad)?;
        let frac: i64 = frac_part.parse().map_err(|_| bad())?;
        value += Rational::new(frac, scale);
    }
    Ok(if neg { -value } else { value })
}

fn is_number(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_digit() || c == '-' || c == '.')
        && parse_number(s, Pos::default()).is_ok()
}

/// Parses `a b - t c - u d` into typed names; untyped names get `object`.
fn typed_list(items: &[Sexpr], vars: bool) -> Result<Vec<TypedName>> {
    let mut out = Vec::new();
    let mut pending: Vec<(String, Pos)> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let item = &items[i];
        if item.as_atom() == Some("-") {
            let ty = items
                .get(i + 1)
                .ok_or_else(|| PddlError::syntax(item.pos(), "type name expected after `-`"))?;
            if ty.head() == Some("either") {
                return Err(PddlError::unsupported("either", ty.pos()));
            }
            let ty = atom_of(ty, "type name")?;
            for (name, _) in pending.drain(..) {
                out.push(TypedName::new(&name, ty));
            }
            i += 2;
            continue;
        }
        let name = atom_of(item, "name")?;
        let name = if vars {
            name.strip_prefix('?')
                .ok_or_else(|| PddlError::syntax(item.pos(), format!("expected a variable, found `{name}`")))?
        } else {
            name
        };
        pending.push((name.to_string(), item.pos()));
        i += 1;
    }
    for (name, _) in pending {
        out.push(TypedName::new(&name, "object"));
    }
    Ok(out)
}

const UNSUPPORTED_GD: &[&str] = &["not", "or", "forall", "exists", "imply", "when", "=", "<", ">", "<=", "preference"];

struct Scope<'a> {
    predicates: &'a HashMap<String, usize>,
    functions: &'a HashMap<String, usize>,
    vars: HashSet<String>,
}

impl Scope<'_> {
    fn term(&self, e: &Sexpr) -> Result<Term> {
        let s = atom_of(e, "term")?;
        match s.strip_prefix('?') {
            Some(v) => {
                if !self.vars.contains(v) {
                    return Err(PddlError::invalid(e.pos(), format!("undeclared variable `?{v}`")));
                }
                Ok(Term::Var(v.to_string()))
            }
            None => Ok(Term::Const(s.to_string())),
        }
    }

    fn atom(&self, e: &Sexpr, table: &HashMap<String, usize>, kind: &str) -> Result<AtomSchema> {
        let items = list_of(e, kind)?;
        let name = items
            .first()
            .ok_or_else(|| PddlError::syntax(e.pos(), format!("empty {kind}")))?;
        let name = atom_of(name, "predicate name")?;
        let arity = *table
            .get(name)
            .ok_or_else(|| PddlError::invalid(e.pos(), format!("undeclared {kind} `{name}`")))?;
        if items.len() - 1 != arity {
            return Err(PddlError::invalid(
                e.pos(),
                format!("`{name}` takes {arity} arguments, found {}", items.len() - 1),
            ));
        }
        let args = items[1..].iter().map(|a| self.term(a)).collect::<Result<_>>()?;
        Ok(AtomSchema {
            predicate: name.to_string(),
            args,
        })
    }

    fn predicate(&self, e: &Sexpr) -> Result<AtomSchema> {
        self.atom(e, self.predicates, "predicate")
    }

    fn function(&self, e: &Sexpr) -> Result<AtomSchema> {
        self.atom(e, self.functions, "function")
    }
}

#[derive(Default)]
struct Conditions {
    facts: [Vec<AtomSchema>; 3],
    numeric: Vec<NumericConditionSchema>,
}

fn timing_index(t: Timing) -> usize {
    match t {
        Timing::Start => 0,
        Timing::OverAll => 1,
        Timing::End => 2,
    }
}

fn timing_of(e: &Sexpr) -> Option<Timing> {
    let items = e.as_list()?;
    let a = items.first()?.as_atom()?;
    let b = items.get(1)?.as_atom()?;
    match (a, b) {
        ("at", "start") => Some(Timing::Start),
        ("at", "end") => Some(Timing::End),
        ("over", "all") => Some(Timing::OverAll),
        _ => None,
    }
}

fn parse_condition(scope: &Scope, e: &Sexpr, timing: Option<Timing>, durative: bool, out: &mut Conditions) -> Result<()> {
    let items = list_of(e, "condition")?;
    let Some(head) = items.first() else {
        return Ok(());
    };
    let head = atom_of(head, "condition keyword")?;
    if head == "and" {
        for c in &items[1..] {
            parse_condition(scope, c, timing, durative, out)?;
        }
        return Ok(());
    }
    if durative && timing.is_none() {
        let t = timing_of(e).ok_or_else(|| {
            PddlError::syntax(e.pos(), "durative conditions must be wrapped in `at start`, `over all` or `at end`")
        })?;
        let inner = items
            .get(2)
            .ok_or_else(|| PddlError::syntax(e.pos(), "missing condition after timing specifier"))?;
        return parse_condition(scope, inner, Some(t), durative, out);
    }
    let timing = timing.unwrap_or(Timing::Start);
    if head == ">=" {
        if items.len() != 3 {
            return Err(PddlError::syntax(e.pos(), "`>=` takes two arguments"));
        }
        let function = scope.function(&items[1])?;
        let bound_s = atom_of(&items[2], "numeric constant")?;
        let bound = parse_number(bound_s, items[2].pos())?;
        out.numeric.push(NumericConditionSchema { function, bound, timing });
        return Ok(());
    }
    if UNSUPPORTED_GD.contains(&head) {
        return Err(PddlError::unsupported(head, e.pos()));
    }
    let atom = scope.predicate(e)?;
    out.facts[timing_index(timing)].push(atom);
    Ok(())
}

#[derive(Default)]
struct Effects {
    add: [Vec<AtomSchema>; 2],
    del: [Vec<AtomSchema>; 2],
    numeric: Vec<NumericEffectSchema>,
}

fn parse_effect(scope: &Scope, e: &Sexpr, timing: Option<Timing>, durative: bool, out: &mut Effects) -> Result<()> {
    let items = list_of(e, "effect")?;
    let Some(head) = items.first() else {
        return Ok(());
    };
    let head = atom_of(head, "effect keyword")?;
    if head == "and" {
        for c in &items[1..] {
            parse_effect(scope, c, timing, durative, out)?;
        }
        return Ok(());
    }
    if durative && timing.is_none() {
        let t = match timing_of(e) {
            Some(Timing::OverAll) => return Err(PddlError::unsupported("over all effect", e.pos())),
            Some(t) => t,
            None => {
                return Err(PddlError::syntax(e.pos(), "durative effects must be wrapped in `at start` or `at end`"));
            }
        };
        let inner = items
            .get(2)
            .ok_or_else(|| PddlError::syntax(e.pos(), "missing effect after timing specifier"))?;
        return parse_effect(scope, inner, Some(t), durative, out);
    }
    let timing = timing.unwrap_or(Timing::Start);
    let bucket = if timing == Timing::End { 1 } else { 0 };
    match head {
        "not" => {
            let inner = items
                .get(1)
                .ok_or_else(|| PddlError::syntax(e.pos(), "`not` needs an argument"))?;
            out.del[bucket].push(scope.predicate(inner)?);
        }
        "increase" | "decrease" => {
            if items.len() != 3 {
                return Err(PddlError::syntax(e.pos(), format!("`{head}` takes two arguments")));
            }
            let function = scope.function(&items[1])?;
            let amount = match items[2].as_atom() {
                Some(s) => parse_number(s, items[2].pos())?,
                None => return Err(PddlError::unsupported("non-constant numeric effect", items[2].pos())),
            };
            let op = if head == "increase" { NumericOp::Increase } else { NumericOp::Decrease };
            out.numeric.push(NumericEffectSchema { op, function, amount, timing });
        }
        "when" | "forall" | "assign" | "scale-up" | "scale-down" => {
            return Err(PddlError::unsupported(head, e.pos()));
        }
        _ => out.add[bucket].push(scope.predicate(e)?),
    }
    Ok(())
}

fn parse_duration(scope: &Scope, e: &Sexpr) -> Result<DurationExpr> {
    let items = list_of(e, "duration constraint")?;
    match items.first().and_then(Sexpr::as_atom) {
        Some("=") if items.len() == 3 && items[1].as_atom() == Some("?duration") => {
            match &items[2] {
                Sexpr::Atom(s, p) => Ok(DurationExpr::Constant(parse_number(s, *p)?)),
                list => {
                    if list.head().is_some_and(|h| ["+", "-", "*", "/"].contains(&h)) {
                        return Err(PddlError::unsupported("arithmetic duration", list.pos()));
                    }
                    Ok(DurationExpr::Function(scope.function(list)?))
                }
            }
        }
        Some(h @ ("and" | "<=" | ">=" | "<" | ">")) => Err(PddlError::unsupported(h, e.pos())),
        _ => Err(PddlError::syntax(e.pos(), "expected `(= ?duration <value>)`")),
    }
}

fn parse_action(
    items: &[Sexpr],
    pos: Pos,
    durative: bool,
    predicates: &HashMap<String, usize>,
    functions: &HashMap<String, usize>,
) -> Result<ActionSchema> {
    let name = atom_of(
        items.get(1).ok_or_else(|| PddlError::syntax(pos, "action name expected"))?,
        "action name",
    )?;
    let mut action = ActionSchema::empty(name, false);
    let mut scope = Scope {
        predicates,
        functions,
        vars: HashSet::new(),
    };
    let mut conditions = Conditions::default();
    let mut effects = Effects::default();
    let mut duration = None;
    let mut i = 2;
    while i < items.len() {
        let key = atom_of(&items[i], "action keyword")?;
        let value = items
            .get(i + 1)
            .ok_or_else(|| PddlError::syntax(items[i].pos(), format!("value expected after `{key}`")))?;
        match key {
            ":parameters" => {
                action.params = typed_list(list_of(value, "parameter list")?, true)?;
                scope.vars = action.params.iter().map(|p| p.name.clone()).collect();
            }
            ":precondition" if !durative => parse_condition(&scope, value, None, false, &mut conditions)?,
            ":condition" if durative => parse_condition(&scope, value, None, true, &mut conditions)?,
            ":effect" => parse_effect(&scope, value, None, durative, &mut effects)?,
            ":duration" if durative => duration = Some(parse_duration(&scope, value)?),
            other => {
                return Err(PddlError::syntax(items[i].pos(), format!("unexpected `{other}` in action `{name}`")));
            }
        }
        i += 2;
    }
    if durative {
        action.duration = Some(duration.ok_or_else(|| PddlError::invalid(pos, format!("durative action `{name}` has no duration")))?);
    }
    let [ps, po, pe] = conditions.facts;
    action.pre_start = ps;
    action.pre_overall = po;
    action.pre_end = pe;
    action.numeric_pre = conditions.numeric;
    let [add_s, add_e] = effects.add;
    let [del_s, del_e] = effects.del;
    action.add_start = add_s;
    action.add_end = add_e;
    action.del_start = del_s;
    action.del_end = del_e;
    action.numeric_effects = effects.numeric;
    Ok(action)
}

fn expect_define<'a>(e: &'a Sexpr, kind: &str) -> Result<(&'a [Sexpr], String)> {
    let items = list_of(e, "`(define ...)`")?;
    if items.first().and_then(Sexpr::as_atom) != Some("define") {
        return Err(PddlError::syntax(e.pos(), "expected `(define ...)`"));
    }
    let header = items
        .get(1)
        .ok_or_else(|| PddlError::syntax(e.pos(), format!("missing `({kind} <name>)`")))?;
    let h = list_of(header, "header")?;
    if h.len() != 2 || h[0].as_atom() != Some(kind) {
        return Err(PddlError::syntax(header.pos(), format!("expected `({kind} <name>)`")));
    }
    Ok((&items[2..], atom_of(&h[1], "name")?.to_string()))
}

pub fn parse_domain(text: &str) -> Result<DomainModel> {
    let root = sexpr::parse(text)?;
    let (sections, name) = expect_define(&root, "domain")?;
    let mut domain = DomainModel {
        name,
        requirements: Vec::new(),
        types: Vec::new(),
        constants: Vec::new(),
        predicates: Vec::new(),
        functions: Vec::new(),
        actions: Vec::new(),
    };
    let mut pred_arity = HashMap::new();
    let mut func_arity = HashMap::new();
    // Actions may precede declarations in sloppy files; collect them and parse last.
    let mut deferred = Vec::new();
    for section in sections {
        let items = list_of(section, "domain section")?;
        let key = items.first().map(|k| atom_of(k, "section keyword")).transpose()?.unwrap_or("");
        match key {
            ":requirements" => {
                for r in &items[1..] {
                    domain.requirements.push(atom_of(r, "requirement")?.to_string());
                }
            }
            ":types" => {
                for t in typed_list(&items[1..], false)? {
                    domain.types.push((t.name, t.ty));
                }
            }
            ":constants" => domain.constants = typed_list(&items[1..], false)?,
            ":predicates" => {
                for p in &items[1..] {
                    let parts = list_of(p, "predicate declaration")?;
                    let pname = atom_of(
                        parts.first().ok_or_else(|| PddlError::syntax(p.pos(), "empty predicate declaration"))?,
                        "predicate name",
                    )?;
                    let params = typed_list(&parts[1..], true)?;
                    pred_arity.insert(pname.to_string(), params.len());
                    domain.predicates.push(PredicateSchema {
                        name: pname.to_string(),
                        params,
                    });
                }
            }
            ":functions" => {
                let mut i = 1;
                while i < items.len() {
                    if items[i].as_atom() == Some("-") {
                        let ty = items.get(i + 1).and_then(Sexpr::as_atom);
                        if ty != Some("number") {
                            return Err(PddlError::unsupported("non-number function type", items[i].pos()));
                        }
                        i += 2;
                        continue;
                    }
                    let parts = list_of(&items[i], "function declaration")?;
                    let fname = atom_of(
                        parts.first().ok_or_else(|| PddlError::syntax(items[i].pos(), "empty function declaration"))?,
                        "function name",
                    )?;
                    let params = typed_list(&parts[1..], true)?;
                    func_arity.insert(fname.to_string(), params.len());
                    domain.functions.push(PredicateSchema {
                        name: fname.to_string(),
                        params,
                    });
                    i += 1;
                }
            }
            ":action" => deferred.push((items, section.pos(), false)),
            ":durative-action" => deferred.push((items, section.pos(), true)),
            ":derived" => return Err(PddlError::unsupported("derived", section.pos())),
            other => return Err(PddlError::syntax(section.pos(), format!("unknown domain section `{other}`"))),
        }
    }
    for (items, pos, durative) in deferred {
        domain
            .actions
            .push(parse_action(items, pos, durative, &pred_arity, &func_arity)?);
    }
    Ok(domain)
}

fn ground_atom(e: &Sexpr) -> Result<GroundAtomSpec> {
    let items = list_of(e, "ground atom")?;
    let name = atom_of(
        items.first().ok_or_else(|| PddlError::syntax(e.pos(), "empty atom"))?,
        "predicate name",
    )?;
    let args = items[1..]
        .iter()
        .map(|a| {
            let s = atom_of(a, "object name")?;
            if s.starts_with('?') {
                return Err(PddlError::syntax(a.pos(), format!("variable `{s}` in a ground atom")));
            }
            Ok(s.to_string())
        })
        .collect::<Result<_>>()?;
    Ok(GroundAtomSpec {
        predicate: name.to_string(),
        args,
    })
}

fn goal_conjuncts(e: &Sexpr, out: &mut Vec<GroundAtomSpec>) -> Result<()> {
    let items = list_of(e, "goal")?;
    match items.first().and_then(Sexpr::as_atom) {
        None if items.is_empty() => Ok(()),
        Some("and") => {
            for g in &items[1..] {
                goal_conjuncts(g, out)?;
            }
            Ok(())
        }
        Some(h) if UNSUPPORTED_GD.contains(&h) || h == ">=" => Err(PddlError::unsupported(h, e.pos())),
        _ => {
            out.push(ground_atom(e)?);
            Ok(())
        }
    }
}

pub fn parse_problem(text: &str) -> Result<ProblemModel> {
    let root = sexpr::parse(text)?;
    let (sections, name) = expect_define(&root, "problem")?;
    let mut problem = ProblemModel {
        name,
        domain_name: String::new(),
        objects: Vec::new(),
        init: Vec::new(),
        numeric_init: Vec::new(),
        goal: Vec::new(),
        metric: None,
    };
    for section in sections {
        let items = list_of(section, "problem section")?;
        let key = items.first().map(|k| atom_of(k, "section keyword")).transpose()?.unwrap_or("");
        match key {
            ":domain" => {
                problem.domain_name = atom_of(
                    items.get(1).ok_or_else(|| PddlError::syntax(section.pos(), "domain name expected"))?,
                    "domain name",
                )?
                .to_string();
            }
            ":requirements" => {}
            ":objects" => problem.objects = typed_list(&items[1..], false)?,
            ":init" => {
                for fact in &items[1..] {
                    let parts = list_of(fact, "initial fact")?;
                    match parts.first().and_then(Sexpr::as_atom) {
                        Some("=") => {
                            if parts.len() != 3 {
                                return Err(PddlError::syntax(fact.pos(), "`=` takes two arguments"));
                            }
                            let f = ground_atom(&parts[1])?;
                            let v = parse_number(atom_of(&parts[2], "number")?, parts[2].pos())?;
                            if problem.numeric_init.iter().any(|(g, _)| g == &f) {
                                return Err(PddlError::invalid(fact.pos(), format!("{f} assigned twice")));
                            }
                            problem.numeric_init.push((f, v));
                        }
                        Some("not") => return Err(PddlError::unsupported("not", fact.pos())),
                        Some("at")
                            if parts.len() == 3
                                && parts[1].as_atom().is_some_and(is_number)
                                && parts[2].as_list().is_some() =>
                        {
                            return Err(PddlError::unsupported("timed initial literal", fact.pos()));
                        }
                        _ => problem.init.push(ground_atom(fact)?),
                    }
                }
            }
            ":goal" => {
                let g = items
                    .get(1)
                    .ok_or_else(|| PddlError::syntax(section.pos(), "goal expected"))?;
                goal_conjuncts(g, &mut problem.goal)?;
            }
            ":metric" => {
                let dir = items.get(1).and_then(Sexpr::as_atom);
                let what = items.get(2).and_then(Sexpr::head);
                problem.metric = match (dir, what) {
                    (Some("minimize"), Some("total-time")) => Some(Metric::MinimizeMakespan),
                    (Some("minimize"), Some("total-actions")) => Some(Metric::MinimizeActions),
                    _ => return Err(PddlError::unsupported("metric", section.pos())),
                };
            }
            other => return Err(PddlError::syntax(section.pos(), format!("unknown problem section `{other}`"))),
        }
    }
    if problem.domain_name.is_empty() {
        return Err(PddlError::invalid(root.pos(), "problem does not name its domain"));
    }
    Ok(problem)
}
