//! Grounding: every type-consistent instantiation of every schema, minus
//! actions with a precondition atom that is neither initially true nor
//! added by any instantiation.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::model::*;
use super::PddlError;
use crate::task::{
    ActionId, Atom, FactId, GroundAction, GroundTask, NumericCondition, NumericEffect, Rational, Resource, ResourceId,
    State, Timing,
};

type Result<T> = std::result::Result<T, PddlError>;

struct TypeTable {
    parent: HashMap<String, String>,
}

impl TypeTable {
    fn new(domain: &DomainModel) -> Result<Self> {
        let mut parent = HashMap::new();
        for (t, p) in &domain.types {
            if t != "object" {
                parent.insert(t.clone(), p.clone());
            }
        }
        let table = TypeTable { parent };
        for (t, p) in &domain.types {
            if !table.declared(p) {
                return Err(PddlError::Type(format!("type `{t}` has undeclared parent `{p}`")));
            }
        }
        Ok(table)
    }

    fn declared(&self, t: &str) -> bool {
        t == "object" || self.parent.contains_key(t)
    }

    fn is_subtype(&self, t: &str, of: &str) -> bool {
        let mut cur = t;
        for _ in 0..=self.parent.len() {
            if cur == of {
                return true;
            }
            match self.parent.get(cur) {
                Some(p) => cur = p,
                None => return of == "object",
            }
        }
        false
    }
}

struct Instantiator<'a> {
    objects: BTreeMap<String, String>,
    types: TypeTable,
    init: HashSet<Atom>,
    static_preds: HashSet<&'a str>,
    static_funcs: HashSet<&'a str>,
    numeric_init: HashMap<Atom, Rational>,
}

impl Instantiator<'_> {
    fn objects_of(&self, ty: &str) -> Vec<&str> {
        self.objects
            .iter()
            .filter(|(_, t)| self.types.is_subtype(t, ty))
            .map(|(o, _)| o.as_str())
            .collect()
    }

    fn ground(&self, a: &AtomSchema, binding: &HashMap<&str, &str>) -> Result<Atom> {
        let args = a
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => binding
                    .get(v.as_str())
                    .map(|s| s.to_string())
                    .ok_or_else(|| PddlError::Type(format!("unbound variable ?{v}"))),
                Term::Const(c) => {
                    if self.objects.contains_key(c) {
                        Ok(c.clone())
                    } else {
                        Err(PddlError::Type(format!("unknown constant `{c}`")))
                    }
                }
            })
            .collect::<Result<_>>()?;
        Ok(Atom {
            predicate: a.predicate.clone(),
            args,
        })
    }

    fn check_atom(&self, atom: &GroundAtomSpec, schemas: &[PredicateSchema], what: &str) -> Result<Atom> {
        let schema = schemas
            .iter()
            .find(|p| p.name == atom.predicate)
            .ok_or_else(|| PddlError::Type(format!("{what} {atom} uses undeclared symbol `{}`", atom.predicate)))?;
        if schema.params.len() != atom.args.len() {
            return Err(PddlError::Type(format!("{what} {atom} has wrong arity")));
        }
        for (arg, param) in atom.args.iter().zip(&schema.params) {
            let ty = self
                .objects
                .get(arg)
                .ok_or_else(|| PddlError::Type(format!("{what} {atom} mentions unknown object `{arg}`")))?;
            if !self.types.is_subtype(ty, &param.ty) {
                return Err(PddlError::Type(format!(
                    "{what} {atom}: `{arg}` has type `{ty}`, expected `{}`",
                    param.ty
                )));
            }
        }
        Ok(Atom {
            predicate: atom.predicate.clone(),
            args: atom.args.clone(),
        })
    }
}

struct Candidate {
    schema: String,
    args: Vec<String>,
    pre: [Vec<Atom>; 3],
    add: [Vec<Atom>; 2],
    del: [Vec<Atom>; 2],
    numeric_pre: Vec<(Atom, Rational, Timing)>,
    numeric_eff: Vec<(Atom, Rational, Timing)>,
    duration: Rational,
    durative: bool,
}

pub fn ground(domain: &DomainModel, problem: &ProblemModel) -> Result<GroundTask> {
    if problem.domain_name != domain.name {
        return Err(PddlError::Mismatch(format!(
            "problem `{}` is for domain `{}`, not `{}`",
            problem.name, problem.domain_name, domain.name
        )));
    }
    let types = TypeTable::new(domain)?;
    let mut objects = BTreeMap::new();
    for o in domain.constants.iter().chain(&problem.objects) {
        if !types.declared(&o.ty) {
            return Err(PddlError::Type(format!("object `{}` has undeclared type `{}`", o.name, o.ty)));
        }
        objects.insert(o.name.clone(), o.ty.clone());
    }

    let mut fluent_preds = HashSet::new();
    let mut fluent_funcs = HashSet::new();
    for a in &domain.actions {
        for e in a.add_start.iter().chain(&a.add_end).chain(&a.del_start).chain(&a.del_end) {
            fluent_preds.insert(e.predicate.as_str());
        }
        for e in &a.numeric_effects {
            fluent_funcs.insert(e.function.predicate.as_str());
        }
    }
    let static_preds = domain
        .predicates
        .iter()
        .map(|p| p.name.as_str())
        .filter(|p| !fluent_preds.contains(p))
        .collect();
    let static_funcs = domain
        .functions
        .iter()
        .map(|f| f.name.as_str())
        .filter(|f| !fluent_funcs.contains(f))
        .collect();

    let mut inst = Instantiator {
        objects,
        types,
        init: HashSet::new(),
        static_preds,
        static_funcs,
        numeric_init: HashMap::new(),
    };
    let mut init_atoms = BTreeSet::new();
    for a in &problem.init {
        let atom = inst.check_atom(a, &domain.predicates, "initial fact")?;
        init_atoms.insert(atom);
    }
    inst.init = init_atoms.iter().cloned().collect();
    for (f, v) in &problem.numeric_init {
        let atom = inst.check_atom(f, &domain.functions, "numeric assignment")?;
        inst.numeric_init.insert(atom, *v);
    }
    let mut goals = Vec::new();
    for g in &problem.goal {
        let atom = inst.check_atom(g, &domain.predicates, "goal")?;
        if !goals.contains(&atom) {
            goals.push(atom);
        }
    }

    let mut candidates = Vec::new();
    for schema in &domain.actions {
        instantiate(&inst, schema, &mut candidates)?;
    }

    let added: HashSet<&Atom> = candidates
        .iter()
        .flat_map(|c| c.add.iter().flatten())
        .collect();
    let reachable = |c: &Candidate| {
        c.pre
            .iter()
            .flatten()
            .all(|p| inst.init.contains(p) || added.contains(p))
    };
    let kept: Vec<&Candidate> = candidates.iter().filter(|c| reachable(c)).collect();

    let mut universe: BTreeSet<Atom> = init_atoms.clone();
    universe.extend(goals.iter().cloned());
    let mut resources = BTreeSet::new();
    for c in &kept {
        universe.extend(c.pre.iter().flatten().cloned());
        universe.extend(c.add.iter().flatten().cloned());
        universe.extend(c.del.iter().flatten().cloned());
        resources.extend(c.numeric_pre.iter().map(|(r, _, _)| r.clone()));
        resources.extend(c.numeric_eff.iter().map(|(r, _, _)| r.clone()));
    }
    let facts: Vec<Atom> = universe.into_iter().collect();
    let fact_id: HashMap<&Atom, FactId> = facts.iter().enumerate().map(|(i, a)| (a, FactId(i as u32))).collect();
    let resources: Vec<Atom> = resources.into_iter().collect();
    let resource_id: HashMap<&Atom, ResourceId> = resources
        .iter()
        .enumerate()
        .map(|(i, a)| (a, ResourceId(i as u32)))
        .collect();

    let ids = |atoms: &[Atom]| {
        let mut v: Vec<FactId> = atoms.iter().map(|a| fact_id[a]).collect();
        v.sort();
        v.dedup();
        v
    };
    let mut order: Vec<&Candidate> = kept;
    order.sort_by(|a, b| (&a.schema, &a.args).cmp(&(&b.schema, &b.args)));
    let mut actions = Vec::with_capacity(order.len());
    for (i, c) in order.into_iter().enumerate() {
        let add_start = ids(&c.add[0]);
        let add_end = ids(&c.add[1]);
        // Deletes happen before adds, so an atom both deleted and added stays true.
        let del_start: Vec<FactId> = ids(&c.del[0]).into_iter().filter(|f| !add_start.contains(f)).collect();
        let del_end: Vec<FactId> = ids(&c.del[1]).into_iter().filter(|f| !add_end.contains(f)).collect();
        actions.push(GroundAction {
            id: ActionId(i as u32),
            schema: c.schema.clone(),
            args: c.args.clone(),
            pre_start: ids(&c.pre[0]),
            pre_overall: ids(&c.pre[1]),
            pre_end: ids(&c.pre[2]),
            add_start,
            add_end,
            del_start,
            del_end,
            numeric_pre: c
                .numeric_pre
                .iter()
                .map(|(r, bound, timing)| NumericCondition {
                    resource: resource_id[r],
                    bound: *bound,
                    timing: *timing,
                })
                .collect(),
            numeric_effects: c
                .numeric_eff
                .iter()
                .map(|(r, delta, timing)| NumericEffect {
                    resource: resource_id[r],
                    delta: *delta,
                    timing: *timing,
                })
                .collect(),
            duration: c.duration,
            durative: c.durative,
        });
    }

    let mut init = State::new(facts.len(), resources.len());
    for a in &init_atoms {
        init.set(fact_id[a], true);
    }
    for (i, r) in resources.iter().enumerate() {
        init.numerics[i] = inst.numeric_init.get(r).copied().unwrap_or_default();
    }
    let goal_ids = goals.iter().map(|g| fact_id[g]).collect();
    let resources = resources
        .into_iter()
        .map(|a| Resource {
            function: a.predicate,
            args: a.args,
        })
        .collect();
    Ok(GroundTask::new(
        domain.name.clone(),
        problem.name.clone(),
        facts,
        actions,
        init,
        goal_ids,
        resources,
    ))
}

fn instantiate(inst: &Instantiator, schema: &ActionSchema, out: &mut Vec<Candidate>) -> Result<()> {
    let mut domains = Vec::with_capacity(schema.params.len());
    for p in &schema.params {
        if !inst.types.declared(&p.ty) {
            return Err(PddlError::Type(format!(
                "parameter ?{} of `{}` has undeclared type `{}`",
                p.name, schema.name, p.ty
            )));
        }
        domains.push(inst.objects_of(&p.ty));
    }
    if domains.iter().any(Vec::is_empty) {
        return Ok(());
    }
    let mut idx = vec![0usize; domains.len()];
    loop {
        let binding: HashMap<&str, &str> = schema
            .params
            .iter()
            .zip(&idx)
            .zip(&domains)
            .map(|((p, &i), d)| (p.name.as_str(), d[i]))
            .collect();
        if let Some(c) = candidate(inst, schema, &binding, &idx, &domains)? {
            out.push(c);
        }
        // Odometer increment, last parameter fastest.
        let mut k = idx.len();
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < domains[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn candidate(
    inst: &Instantiator,
    schema: &ActionSchema,
    binding: &HashMap<&str, &str>,
    idx: &[usize],
    domains: &[Vec<&str>],
) -> Result<Option<Candidate>> {
    let ground_all = |v: &[AtomSchema]| v.iter().map(|a| inst.ground(a, binding)).collect::<Result<Vec<_>>>();
    let pre = [
        ground_all(&schema.pre_start)?,
        ground_all(&schema.pre_overall)?,
        ground_all(&schema.pre_end)?,
    ];
    if pre
        .iter()
        .flatten()
        .any(|a| inst.static_preds.contains(a.predicate.as_str()) && !inst.init.contains(a))
    {
        return Ok(None);
    }
    let mut numeric_pre = Vec::new();
    for c in &schema.numeric_pre {
        let f = inst.ground(&c.function, binding)?;
        if inst.static_funcs.contains(f.predicate.as_str()) {
            match inst.numeric_init.get(&f) {
                Some(v) if *v >= c.bound => continue,
                _ => return Ok(None),
            }
        }
        numeric_pre.push((f, c.bound, c.timing));
    }
    let mut numeric_eff = Vec::new();
    for e in &schema.numeric_effects {
        let f = inst.ground(&e.function, binding)?;
        let delta = match e.op {
            NumericOp::Increase => e.amount,
            NumericOp::Decrease => -e.amount,
        };
        numeric_eff.push((f, delta, e.timing));
    }
    let (duration, durative) = match &schema.duration {
        None => (Rational::from_integer(1), false),
        Some(DurationExpr::Constant(c)) => (*c, true),
        Some(DurationExpr::Function(fs)) => {
            let f = inst.ground(fs, binding)?;
            if !inst.static_funcs.contains(f.predicate.as_str()) {
                return Err(PddlError::UnsupportedFeature {
                    feature: format!("dynamic duration in `{}`", schema.name),
                    line: 0,
                    col: 0,
                });
            }
            match inst.numeric_init.get(&f) {
                Some(v) => (*v, true),
                None => return Ok(None),
            }
        }
    };
    if duration < Rational::from_integer(0) {
        return Err(PddlError::Type(format!("negative duration for `{}`", schema.name)));
    }
    Ok(Some(Candidate {
        schema: schema.name.clone(),
        args: idx.iter().zip(domains).map(|(&i, d)| d[i].to_string()).collect(),
        pre,
        add: [ground_all(&schema.add_start)?, ground_all(&schema.add_end)?],
        del: [ground_all(&schema.del_start)?, ground_all(&schema.del_end)?],
        numeric_pre,
        numeric_eff,
        duration,
        durative,
    }))
}

#[cfg(test)]
mod tests {
    use super::super::{parse_domain, parse_problem};
    use super::*;

    fn task(d: &str, p: &str) -> GroundTask {
        ground(&parse_domain(d).unwrap(), &parse_problem(p).unwrap()).unwrap()
    }

    #[test]
    fn one_action_per_matching_object() {
        let t = task(
            "(define (domain d) (:types box) (:predicates (p ?b - box) (q ?b - box))
               (:action a :parameters (?b - box) :precondition (p ?b) :effect (q ?b)))",
            "(define (problem x) (:domain d) (:objects b1 b2 b3 - box)
               (:init (p b1) (p b2) (p b3)) (:goal (and (q b1))))",
        );
        assert_eq!(t.actions.len(), 3);
        assert_eq!(t.actions[0].args, vec!["b1"]);
    }

    #[test]
    fn unreachable_preconditions_are_pruned() {
        let t = task(
            "(define (domain d) (:predicates (p) (q) (r))
               (:action a :parameters () :precondition (r) :effect (q)))",
            "(define (problem x) (:domain d) (:init (p)) (:goal (and (q))))",
        );
        assert!(t.actions.is_empty());
    }

    #[test]
    fn type_mismatch_in_init() {
        let d = parse_domain("(define (domain d) (:types a b) (:predicates (p ?x - a)))").unwrap();
        let p = parse_problem("(define (problem x) (:domain d) (:objects o - b) (:init (p o)) (:goal (and)))").unwrap();
        assert!(matches!(ground(&d, &p), Err(PddlError::Type(_))));
    }

    #[test]
    fn domain_name_must_match() {
        let d = parse_domain("(define (domain d) (:predicates (p)))").unwrap();
        let p = parse_problem("(define (problem x) (:domain other) (:init) (:goal (and)))").unwrap();
        assert!(matches!(ground(&d, &p), Err(PddlError::Mismatch(_))));
    }

    #[test]
    fn static_function_durations() {
        let t = task(
            "(define (domain d) (:types loc) (:predicates (at ?l - loc) (road ?a ?b - loc))
               (:functions (dist ?a ?b - loc))
               (:durative-action go :parameters (?a ?b - loc) :duration (= ?duration (dist ?a ?b))
                 :condition (and (at start (at ?a)) (over all (road ?a ?b)))
                 :effect (and (at start (not (at ?a))) (at end (at ?b)))))",
            "(define (problem x) (:domain d) (:objects l1 l2 - loc)
               (:init (at l1) (road l1 l2) (= (dist l1 l2) 2.5)) (:goal (and (at l2))))",
        );
        assert_eq!(t.actions.len(), 1);
        assert_eq!(t.actions[0].duration, Rational::new(5, 2));
        assert!(t.actions[0].durative);
    }

    #[test]
    fn add_and_delete_of_same_atom_keeps_it() {
        let t = task(
            "(define (domain d) (:types l) (:predicates (at ?x - l))
               (:action go :parameters (?a ?b - l) :precondition (at ?a) :effect (and (not (at ?a)) (at ?b))))",
            "(define (problem x) (:domain d) (:objects l1 l2 - l) (:init (at l1)) (:goal (and (at l2))))",
        );
        let same = t.find_action("go", &["l1", "l1"]).unwrap();
        assert!(t.action(same).del_start.is_empty());
    }
}
