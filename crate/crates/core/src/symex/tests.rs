use super::*;
use crate::solver::SolverKind;

fn engine() -> Engine {
    Engine::new(EngineConfig {
        log_level: Some(LogLevel::Smt),
        ..EngineConfig::default()
    })
}

fn leaves<A: Clone>(bs: &[Branch<A>]) -> Vec<A> {
    bs.iter().map(|b| b.result.clone()).collect()
}

fn pcs<A>(bs: &[Branch<A>]) -> Vec<Vec<String>> {
    bs.iter()
        .map(|b| b.path_condition.iter().map(|t| t.to_string()).collect())
        .collect()
}

fn boxed<'a, A: 'a>(
    c: impl FnOnce() -> Symex<'a, A> + 'a,
) -> Box<dyn FnOnce() -> Symex<'a, A> + 'a> {
    Box::new(c)
}

#[test]
fn return_yields_once() {
    let mut e = engine();
    let bs = e.run(ret(42));
    assert_eq!(leaves(&bs), vec![42]);
    assert!(bs[0].path_condition.is_empty());
}

#[test]
fn bind_sequences_in_order() {
    let mut e = engine();
    let bs = e.run(ret(1).bind(|x| ret(x + 1)));
    assert_eq!(leaves(&bs), vec![2]);
    let m = Symex::branches(vec![boxed(|| ret(1)), boxed(|| ret(2))]);
    let bs = e.run(m.bind(|x| ret(10 * x)));
    assert_eq!(leaves(&bs), vec![10, 20]);
}

#[test]
fn vanish_yields_nothing() {
    let mut e = engine();
    assert!(e.run(vanish::<i32>()).is_empty());
    assert!(e.run(vanish::<i32>().bind(|x| ret(x + 1))).is_empty());
    let bs = e.run(Symex::branches(vec![boxed(vanish), boxed(|| ret(2))]));
    assert_eq!(leaves(&bs), vec![2]);
}

#[test]
fn concrete_guard_needs_no_solver() {
    let mut e = engine();
    let t = e.arena.mk_bool(true);
    let bs = e.run(branch_on(t, || ret(1), || ret(2)));
    assert_eq!(leaves(&bs), vec![1]);
    let st = e.stats();
    assert_eq!(st.guard_concrete_shortcuts, 1);
    assert_eq!(st.sat_checks, 0);
    assert_eq!(st.solver_queries_external, 0);
}

#[test]
fn symbolic_guard_splits() {
    let mut e = engine();
    let arena = e.arena.clone();
    let c = nondet(Sort::Int).bind(move |x| {
        let g = arena.geq(&x, &arena.mk_int(6)).unwrap();
        branch_on(g, || ret("then"), || ret("else"))
    });
    let bs = e.run(c);
    assert_eq!(leaves(&bs), vec!["then", "else"]);
    assert_eq!(pcs(&bs), vec![vec!["(>= v0 6)"], vec!["(not (>= v0 6))"]]);
    let st = e.stats();
    assert_eq!(st.branches, 1);
    assert!((1..=2).contains(&st.sat_checks));
    let tree = e.diag.tree();
    let labels: Vec<_> = tree
        .children
        .iter()
        .filter_map(|n| match n {
            crate::diagnostics::LogNode::Section(s) => Some(s.label.as_str()),
            _ => None,
        })
        .collect();
    assert_eq!(labels, vec!["left branch", "right branch"]);
}

#[test]
fn guard_in_path_condition_is_shortcut() {
    for kind in [SolverKind::Direct, SolverKind::Optimized] {
        let mut e = Engine::new(EngineConfig {
            solver: kind,
            ..EngineConfig::default()
        });
        let arena = e.arena.clone();
        let c = nondet(Sort::Int).bind(move |x| {
            let g = arena.geq(&x, &arena.mk_int(0)).unwrap();
            let g2 = g.clone();
            assume(vec![g.clone()]).bind(move |()| {
                let g3 = g2.clone();
                branch_on(g3, || ret(1), || ret(2))
            })
        });
        let bs = e.run(c);
        assert_eq!(leaves(&bs), vec![1]);
        let st = e.stats();
        assert_eq!(st.guard_in_pc_shortcuts, 1, "{kind:?}");
        // Only the leaf check reaches the solver.
        assert_eq!(st.sat_checks, 1);
    }
}

#[test]
fn branching_fuel_limits_alternatives() {
    let mut e = Engine::new(EngineConfig {
        fuel: Fuel {
            branching: Some(0),
            steps: None,
        },
        ..EngineConfig::default()
    });
    let bs = e.run(Symex::branches(vec![boxed(|| ret(1)), boxed(|| ret(2))]));
    assert_eq!(leaves(&bs), vec![1]);
    assert_eq!(e.stats().unexplored_branches, 1);

    let arena = e.arena.clone();
    let c = nondet(Sort::Int).bind(move |x| {
        let g = arena.geq(&x, &arena.mk_int(6)).unwrap();
        branch_on(g, || ret(1), || ret(2))
    });
    e.diag.clear();
    let bs = e.run(c);
    assert_eq!(bs.len(), 1);
    assert_eq!(e.stats().unexplored_branches, 1);
    assert!(e.run(Symex::<i32>::branches(vec![])).is_empty());
    assert_eq!(e.run(Symex::branches(vec![boxed(|| ret(1))])).len(), 1);
}

#[test]
fn nondet_issues_distinct_variables() {
    let mut e = engine();
    let c = nondet(Sort::Int).bind(|x| nondet(Sort::Int).map(move |y| (x.clone(), y)));
    let bs = e.run(c);
    assert_eq!(bs.len(), 1);
    let (x, y) = &bs[0].result;
    assert_ne!(x, y);
    assert_eq!(x.to_string(), "v0");
    assert!(bs[0].path_condition.is_empty());
}

#[test]
fn assume_false_kills_the_path() {
    let mut e = engine();
    let f = e.arena.mk_bool(false);
    assert!(e.run(assume(vec![f]).bind(|()| ret(1))).is_empty());
    assert_eq!(e.stats().leaves_discarded, 1);
}

#[test]
fn assumptions_are_checked_together() {
    let mut e = engine();
    let arena = e.arena.clone();
    let c = nondet(Sort::Int).bind(move |x| {
        let a = arena.clone();
        let c1 = a.geq(&x, &a.mk_int(0)).unwrap();
        let c2 = a.geq(&a.mk_int(10), &a.add(&x, &x).unwrap()).unwrap();
        let c3 = a.geq(&a.add(&x, &x).unwrap(), &a.mk_int(4)).unwrap();
        assume(vec![c1]).bind(move |()| {
            let c3 = c3.clone();
            assume(vec![c2.clone()]).bind(move |()| branch_on(c3.clone(), || ret(1), || ret(2)))
        })
    });
    let bs = e.run(c);
    assert_eq!(leaves(&bs), vec![1, 2]);
    let msgs = e
        .diag
        .tree()
        .messages()
        .iter()
        .map(|m| m.text.clone())
        .collect::<Vec<_>>();
    let first = msgs.iter().position(|m| m == "> (check-sat)").unwrap();
    let asserts = msgs[..first]
        .iter()
        .filter(|m| m.starts_with("> (assert"))
        .count();
    assert_eq!(asserts, 3);
}

#[test]
fn assert_holds_examples() {
    let mut e = engine();
    let t = e.arena.mk_bool(true);
    assert_eq!(leaves(&e.run(assert_holds(t))), vec![true]);
    assert_eq!(e.stats().solver_queries_external, 0);

    let arena = e.arena.clone();
    let c = nondet(Sort::Int).bind(move |x| {
        let a = arena.clone();
        let pc = a.geq(&x, &a.mk_int(6)).unwrap();
        let goal = a.geq(&x, &a.mk_int(0)).unwrap();
        assume(vec![pc]).bind(move |()| assert_holds(goal.clone()))
    });
    assert_eq!(leaves(&e.run(c)), vec![true]);

    let arena = e.arena.clone();
    let c = nondet(Sort::Int).bind(move |x| assert_holds(arena.geq(&x, &arena.mk_int(0)).unwrap()));
    assert_eq!(leaves(&e.run(c)), vec![false]);
}

#[test]
fn result_layer_short_circuits() {
    let mut e = engine();
    let bs = e.run(result::bind(result::ok::<i32, &str>(1), |v| {
        result::ok(v + 1)
    }));
    assert_eq!(leaves(&bs), vec![Ok(2)]);
    let bs = e.run(result::bind(
        result::error::<i32, &str>("e"),
        |_| -> Symex<'_, Result<i32, &str>> { panic!("not reached") },
    ));
    assert_eq!(leaves(&bs), vec![Err("e")]);
    let two = Symex::branches(vec![
        boxed(|| result::ok::<i32, &str>(1)),
        boxed(|| result::error("boom")),
    ]);
    let bs = e.run(result::bind(two, |v| result::ok(v * 5)));
    assert_eq!(leaves(&bs), vec![Ok(5), Err("boom")]);
}

#[test]
fn step_fuel_cuts_paths() {
    let mut e = Engine::new(EngineConfig {
        fuel: Fuel {
            branching: None,
            steps: Some(2),
        },
        ..EngineConfig::default()
    });
    let c = consume_step().bind(|()| consume_step()).bind(|()| ret(1));
    assert_eq!(e.run(c).len(), 1);
    let c = consume_step()
        .bind(|()| consume_step())
        .bind(|()| consume_step())
        .bind(|()| ret(1));
    assert!(e.run(c).is_empty());
    let st = e.stats();
    assert_eq!(st.unexplored_steps, 1);
    assert_eq!(st.steps_consumed, 4);
}

#[test]
fn state_is_restored_after_run() {
    let mut e = engine();
    let arena = e.arena.clone();
    let c = nondet(Sort::Int).bind(move |x| {
        let a = arena.clone();
        let g = a.geq(&x, &a.mk_int(2)).unwrap();
        assume(vec![g.clone()]).bind(move |()| branch_on(g.clone(), || ret(0), || ret(1)))
    });
    let before = e.solver.as_values();
    e.run(c);
    assert_eq!(e.solver.as_values(), before);
    assert_eq!(e.solver.checkpoint_depth(), 0);
    assert_eq!(e.solver.var_counter(), 0);
}

#[test]
fn non_bool_guard_is_rejected() {
    let e = engine();
    let one = e.arena.mk_int(1);
    assert!(matches!(
        Symex::try_branch_on(one, || ret(1), || ret(2)),
        Err(SymexError::GuardNotBool(Sort::Int))
    ));
}

#[test]
fn ux_discards_unknown_leaves() {
    let cfg = |mode| EngineConfig {
        mode,
        backend: crate::solver::BackendConfig {
            command: vec!["sh".into(), "-c".into(), "sleep 30".into()],
            timeout: Some(std::time::Duration::from_millis(100)),
        },
        ..EngineConfig::default()
    };
    for (mode, expected) in [(Mode::OX, 2), (Mode::UX, 0)] {
        let mut e = Engine::new(cfg(mode));
        let arena = e.arena.clone();
        let c = nondet(Sort::Int).bind(move |x| {
            let a = arena.clone();
            let g = a.geq(&a.add(&x, &x).unwrap(), &a.mk_int(3)).unwrap();
            branch_on(g, || ret(1), || ret(2))
        });
        assert_eq!(e.run(c).len(), expected, "{mode}");
    }
}
