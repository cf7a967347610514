//! One test per acceptance criterion. Each prints a `criterion N: PASS|FAIL`
//! line straight to stdout, so the lines show up even when output is captured.

mod common;

use std::io::Write;
use std::time::Instant;

use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use subplan::harness::bfs::{bfs, count_states};
use subplan::harness::cli::{self, SWEEP_NODE_LIMIT};
use subplan::harness::suite::{bundle_sweep, Suite};
use subplan::mutex::{locality, persistent_mutexes};
use subplan::pert::{epsilon, numeric_trace_ok, schedule};
use subplan::resolve::{
    plan, reduced_task, resolve, PenaltyMatrix, ResolveConfig, ResolveError, Strategy, ViolationMatrix,
};
use subplan::search::Relaxation;
use subplan::task::{FactId, GroundAction, GroundTask, Rational, SequentialPlan};

use common::{bundled_tasks, delete_free_closure, random_delete_free_task, random_walk, run_cli};

fn report(n: usize, title: &str, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {n}: {verdict} {title} ({detail})");
}

fn r(n: i64) -> Rational {
    Rational::from_integer(n)
}

#[test]
fn criterion_01_soundness_sweep() {
    let suite = Suite::bundled();
    let dir = tempfile::tempdir().unwrap();
    let started = Instant::now();
    let mut failures = Vec::new();
    for inst in &suite.instances {
        let (d, p) = (suite.domain_path(inst), suite.problem_path(inst));
        let plan_file = dir.path().join(format!("{}.plan", inst.name));
        let (code, _, err) = run_cli(&["plan", "-q", d.to_str().unwrap(), p.to_str().unwrap(), "-o", plan_file.to_str().unwrap()]);
        if code != cli::EXIT_OK {
            failures.push(format!("{} plan exit {code}: {err}", inst.name));
            continue;
        }
        let (code, out, _) = run_cli(&["validate", d.to_str().unwrap(), p.to_str().unwrap(), plan_file.to_str().unwrap()]);
        if code != cli::EXIT_OK {
            failures.push(format!("{} rejected: {out}", inst.name));
        }
    }
    let secs = started.elapsed().as_secs_f64();
    let ok = suite.instances.len() >= 20 && failures.is_empty() && secs < 120.0;
    report(1, "plan + validate on every bundled instance", ok, &format!("{} instances, {secs:.1}s, failures {failures:?}", suite.instances.len()));
    assert!(ok, "{failures:?}");
}

/// Small tasks with no plan, to exercise the "only if" half.
fn unsolvable_tasks() -> Vec<GroundTask> {
    vec![
        GroundTask::propositional(2, vec![GroundAction::instant(0, "a", &[1], &[0], &[])], &[], &[0]),
        GroundTask::propositional(
            3,
            vec![
                GroundAction::instant(0, "a", &[0], &[1], &[0]),
                GroundAction::instant(1, "b", &[0], &[2], &[0]),
            ],
            &[0],
            &[1, 2],
        ),
    ]
}

#[test]
fn criterion_02_oracle_equivalence() {
    let config = ResolveConfig::default();
    let mut tasks = bundled_tasks();
    tasks.extend(unsolvable_tasks().into_iter().enumerate().map(|(i, t)| (format!("dead{i}"), t)));
    let (mut checked, mut mismatches) = (0, Vec::new());
    for (name, task) in &tasks {
        if count_states(task, 100_000).is_err() {
            continue;
        }
        checked += 1;
        let oracle = bfs(task, 100_000).unwrap().is_some();
        let ours = plan(task, &config).is_ok();
        if oracle != ours {
            mismatches.push(name.clone());
        }
    }
    let ok = mismatches.is_empty() && checked >= 20;
    report(2, "planner succeeds iff BFS finds a plan", ok, &format!("{checked} tasks, mismatches {mismatches:?}"));
    assert!(ok);
}

#[test]
fn criterion_03_bundle_sweep() {
    let suite = Suite::bundled();
    let inst = suite.tagged("sweep").next().expect("a sweep instance");
    let task = suite.task(inst).unwrap();
    assert_eq!(task.goals.len(), 5);
    let sweep = bundle_sweep(&task, 5, SWEEP_NODE_LIMIT);
    let sizes: Vec<usize> = sweep.iter().map(|s| s.0).collect();
    let exp: Vec<u64> = sweep.iter().map(|s| s.1).collect();
    let decreasing = exp.windows(2).all(|w| w[0] > w[1]);
    let finite = exp[0] < SWEEP_NODE_LIMIT as u64;
    let ratio = exp[4] * 4 <= exp[0];
    let ok = sizes == [5, 4, 3, 2, 1] && decreasing && finite && ratio;
    report(3, "expansions fall as bundles shrink 5 to 1", ok, &format!("{}: {exp:?}", inst.name));
    assert!(ok);
}

#[test]
fn criterion_04_resolution_progress() {
    let suite = Suite::bundled();
    let inst = suite.find("ph01").unwrap();
    assert!(inst.has_tag("conflict"));
    let task = suite.task(inst).unwrap();
    assert_eq!(task.goals.len(), 2);
    let config = ResolveConfig {
        strategy: Strategy::Ipc4,
        ..ResolveConfig::default()
    };
    let out = resolve(&task, &config).unwrap();
    let h = &out.history;
    let non_increasing = h.windows(2).all(|w| w[0] >= w[1]);
    let conflicted = h.first().is_some_and(|&v| v > 0);
    let reaches_zero = h.last() == Some(&0);
    let in_budget = out.evaluations <= 10 * task.goals.len();
    let ok = non_increasing && conflicted && reaches_zero && in_budget;
    report(4, "violations fall to zero within 10N evaluations", ok, &format!("history {h:?}, {} evaluations", out.evaluations));
    assert!(ok);
}

#[test]
fn criterion_05_locality() {
    let suite = Suite::bundled();
    let config = ResolveConfig::default();
    let (mut sum_t, mut sum_g, mut n) = (Rational::zero(), Rational::zero(), 0);
    let mut bad = Vec::new();
    for inst in suite.tagged("multi") {
        let task = suite.task(inst).unwrap();
        let out = plan(&task, &config).unwrap();
        let attr: Vec<Option<usize>> = out.attribution.iter().map(|&g| Some(g)).collect();
        let rep = locality(&task, &persistent_mutexes(&task), &out.schedule, &attr, task.goals.len()).unwrap();
        let unit = |x: Rational| x >= Rational::zero() && x <= r(1);
        if !(unit(rep.r_g_t) && unit(rep.r_g_g) && unit(rep.r_ga_g) && rep.r_ga_g <= rep.r_g_g) {
            bad.push(inst.name.clone());
        }
        sum_t += rep.r_g_t;
        sum_g += rep.r_g_g;
        n += 1;
    }
    let ok = n >= 5 && bad.is_empty() && sum_g < sum_t;
    let mean = |s: Rational| format!("{:.3}", (s / r(n)).to_f64().unwrap_or(f64::NAN));
    report(
        5,
        "subgoal partitioning leaves fewer global constraints than time stages",
        ok,
        &format!("{n} instances, mean r_g_T {} vs r_g_G {}, bad {bad:?}", mean(sum_t), mean(sum_g)),
    );
    assert!(ok);
}

#[test]
fn criterion_06_penalty_closed_form() {
    let xi = Rational::new(1, 10);
    let mut runner = TestRunner::new(Config::with_cases(256));
    let result = runner.run(&(prop::collection::vec(0u64..1000, 0..40), any::<bool>()), |(ms, ipc4)| {
        let (strategy, gamma0) = if ipc4 { (Strategy::Ipc4, r(100)) } else { (Strategy::New, r(0)) };
        let mut p = PenaltyMatrix::new(2, strategy, gamma0, xi);
        let mut total = 0u64;
        for &m in &ms {
            let mut v = ViolationMatrix::zeros(2);
            v.add(0, 1, m);
            p.update(&v);
            total += m;
            let expected = gamma0 + xi * Rational::from_integer(total as i64);
            prop_assert_eq!(p.get(0, 1), expected);
            prop_assert_eq!(p.get(0, 0), Rational::zero());
        }
        Ok(())
    });
    let ok = result.is_ok();
    report(6, "penalty trace equals gamma0 + xi * sum m", ok, &format!("{result:?}"));
    assert!(ok);
}

/// Nonnegativity replayed pessimistically: at each event time every
/// decrease up to and including it counts, increases only strictly before.
fn resources_nonnegative(task: &GroundTask, sched: &subplan::pert::TemporalSchedule) -> bool {
    use subplan::task::Timing;
    let mut times: Vec<Rational> = sched.actions.iter().flat_map(|e| [e.start, e.end]).collect();
    times.sort();
    times.dedup();
    times.iter().all(|&t| {
        (0..task.resources.len()).all(|res| {
            let mut v = task.init.numerics[res];
            for e in &sched.actions {
                for eff in task.action(e.action).numeric_effects.iter().filter(|x| x.resource.index() == res) {
                    let at = if eff.timing == Timing::End { e.end } else { e.start };
                    if (eff.delta < Rational::zero() && at <= t) || (eff.delta > Rational::zero() && at < t) {
                        v += eff.delta;
                    }
                }
            }
            v >= Rational::zero()
        })
    })
}

#[test]
fn criterion_07_pert_contracts() {
    let tasks = bundled_tasks();
    let mut failures: Vec<String> = Vec::new();
    let mut runner = TestRunner::new(Config::with_cases(1000));
    let result = runner.run(&(0..tasks.len(), prop::collection::vec(any::<u32>(), 0..14)), |(which, picks)| {
        let (name, task) = &tasks[which];
        let steps = random_walk(task, &picks);
        let n = steps.len();
        let serial: Rational = steps.iter().map(|&a| task.action(a).duration).sum();
        let sched = schedule(task, &SequentialPlan::new(steps.clone())).map_err(|e| TestCaseError::fail(format!("{name}: {e}")))?;
        let mut got: Vec<_> = sched.actions.iter().map(|e| e.action).collect();
        let mut want = steps;
        got.sort();
        want.sort();
        prop_assert_eq!(got, want, "{}: multiset changed", name);
        let slack = epsilon() * r(n.saturating_sub(1) as i64);
        prop_assert!(sched.makespan <= serial + slack, "{}: makespan {} over {}", name, sched.makespan, serial);
        if !task.is_temporal() {
            prop_assert!(sched.makespan <= serial, "{}: makespan {} over {}", name, sched.makespan, serial);
        }
        prop_assert!(sched.residual_conflicts.is_empty(), "{}: residual conflicts", name);
        prop_assert!(numeric_trace_ok(task, &sched.actions), "{}: resource trace", name);
        prop_assert!(resources_nonnegative(task, &sched), "{}: negative resource", name);
        Ok(())
    });
    if let Err(e) = &result {
        failures.push(e.to_string());
    }

    let mut runner = TestRunner::new(Config::with_cases(200));
    let independent = runner.run(&prop::collection::vec((1i64..50, 1i64..5), 1..10), |durs| {
        let mut actions = Vec::new();
        for (i, &(num, den)) in durs.iter().enumerate() {
            let mut a = GroundAction::instant(i as u32, "solo", &[], &[], &[]);
            a.add_start.clear();
            a.add_end = vec![FactId(i as u32)];
            a.duration = Rational::new(num, den);
            a.durative = true;
            actions.push(a);
        }
        let task = GroundTask::propositional(durs.len(), actions, &[], &[]);
        let steps = task.actions.iter().map(|a| a.id).collect();
        let sched = schedule(&task, &SequentialPlan::new(steps)).unwrap();
        let longest = durs.iter().map(|&(n, d)| Rational::new(n, d)).max().unwrap();
        prop_assert_eq!(sched.makespan, longest);
        prop_assert!(sched.actions.iter().all(|e| e.start.is_zero()));
        Ok(())
    });
    if let Err(e) = &independent {
        failures.push(e.to_string());
    }
    let ok = failures.is_empty();
    report(7, "schedule contracts over 1000 random sequential plans", ok, &format!("failures {failures:?}"));
    assert!(ok);
}

#[test]
fn criterion_08_heuristic_contracts() {
    let mut runner = TestRunner::new(Config::with_cases(500));
    let result = runner.run(&any::<u64>(), |seed| {
        let task = random_delete_free_task(seed);
        let relax = Relaxation::full(&task);
        let hv = relax.heuristic(&task.init, &task.goals);
        let reachable = delete_free_closure(&task);
        let goals_hold = task.goals.iter().all(|g| task.init.holds(*g));
        let goals_reachable = task.goals.iter().all(|g| reachable[g.index()]);
        prop_assert_eq!(hv.h.is_none(), !goals_reachable);
        prop_assert_eq!(hv.h == Some(0), goals_hold);
        if let Some(h) = hv.h {
            prop_assert_eq!(h, hv.relaxed_plan.len());
            let mut have: Vec<bool> = (0..task.num_facts()).map(|f| task.init.holds(FactId(f as u32))).collect();
            for &a in &hv.relaxed_plan {
                let act = task.action(a);
                prop_assert!(act.all_pre().all(|f| have[f.index()]), "relaxed plan step not executable");
                for f in act.all_add() {
                    have[f.index()] = true;
                }
            }
            prop_assert!(task.goals.iter().all(|g| have[g.index()]));
        }
        Ok(())
    });
    let ok = result.is_ok();
    report(8, "FF heuristic contracts on 500 delete-free tasks", ok, &format!("{result:?}"));
    assert!(ok);
}

#[test]
fn criterion_09_producible_minimality() {
    let mock = subplan::decompose::resource_loop(vec![r(1000)], |a| {
        if a[0] < r(100) {
            return Err(());
        }
        Ok(((), vec![a[0] - r(100)]))
    })
    .unwrap();
    let anecdote = mock.history == vec![vec![r(1000)], vec![r(100)]] && mock.amounts == vec![r(100)];

    let suite = Suite::bundled();
    let inst = suite.tagged("settlers").next().expect("a settlers instance");
    let task = suite.task(inst).unwrap();
    let config = ResolveConfig {
        bundle: task.goals.len(),
        ..ResolveConfig::default()
    };
    let out = plan(&task, &ResolveConfig::default()).unwrap();
    let amounts = out.initial_amounts.clone().expect("resources were generated");
    let mut loose = Vec::new();
    for res in 0..amounts.len() {
        if amounts[res] <= task.init.numerics[res] || amounts[res] < r(1) {
            continue;
        }
        let mut less = amounts.clone();
        less[res] -= r(1);
        let t = reduced_task(&task, &less);
        if !matches!(resolve(&t, &config), Err(ResolveError::Unsolvable(_) | ResolveError::Budget(_))) {
            loose.push(task.resources[res].to_string());
        }
    }
    let ok = anecdote && loose.is_empty() && amounts.iter().any(|a| *a > Rational::zero());
    let shown: Vec<String> = amounts.iter().map(ToString::to_string).collect();
    let tried: Vec<String> = mock.history.iter().map(|h| h[0].to_string()).collect();
    report(
        9,
        "generated resource amounts are tight",
        ok,
        &format!("{}: amounts [{}], loose {loose:?}, mock {}", inst.name, shown.join(", "), tried.join(" -> ")),
    );
    assert!(ok);
}

#[test]
fn criterion_10_determinism() {
    let suite = Suite::bundled();
    let dir = tempfile::tempdir().unwrap();
    let mut differing = Vec::new();
    for inst in &suite.instances {
        let (d, p) = (suite.domain_path(inst), suite.problem_path(inst));
        let mut bytes = Vec::new();
        for run in 0..2 {
            let file = dir.path().join(format!("{}-{run}.plan", inst.name));
            let (code, _, _) = run_cli(&["plan", "-q", d.to_str().unwrap(), p.to_str().unwrap(), "-o", file.to_str().unwrap()]);
            assert_eq!(code, cli::EXIT_OK, "{}", inst.name);
            bytes.push(std::fs::read(&file).unwrap());
        }
        if bytes[0] != bytes[1] {
            differing.push(inst.name.clone());
        }
    }
    let ok = differing.is_empty();
    report(10, "identical inputs give byte-identical plans", ok, &format!("{} instances, differing {differing:?}", suite.instances.len()));
    assert!(ok);
}
