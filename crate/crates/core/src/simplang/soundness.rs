use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use serde::Serialize;

use crate::solver::{DirectSolver, Solver, SolverResult};
use crate::symex::{assume, Branch, Engine, Fuel, Mode, Symex};
use crate::values::{EvalError, Ground, Interpretation, Sort, Term, VarId};

use super::{eval_concrete_all, eval_program, show_outcome, Outcome, SimpError};

/// The result of comparing a symbolic run with the concrete oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub mode: Mode,
    pub passed: bool,
    /// The concretized branches produce exactly the concrete outcomes.
    pub exact: bool,
    pub branches: usize,
    pub concrete_outcomes: Vec<String>,
    pub symbolic_outcomes: Vec<String>,
    /// Why the check failed, when it did.
    pub reason: Option<String>,
}

/// OX soundness: every concrete outcome is produced by some branch.
pub fn check_ox_soundness(engine: &mut Engine, e: &super::Expr, domain: &[BigInt]) -> Verdict {
    check(engine, e, domain, Mode::OX)
}

/// UX soundness: every branch is feasible and produces only concrete
/// outcomes.
pub fn check_ux_soundness(engine: &mut Engine, e: &super::Expr, domain: &[BigInt]) -> Verdict {
    check(engine, e, domain, Mode::UX)
}

#[derive(Default)]
struct Concretized {
    outcomes: BTreeSet<Outcome>,
    /// Some satisfying assignment left the path condition or the result
    /// unspecified.
    unspecified: Option<String>,
    /// A branch with no assignment from the domain.
    empty_branch: Option<usize>,
}

fn check(engine: &mut Engine, e: &super::Expr, domain: &[BigInt], mode: Mode) -> Verdict {
    assert!(!domain.is_empty(), "empty domain");
    let concrete = eval_concrete_all(e, domain);

    let (old_mode, old_fuel) = (engine.mode(), engine.fuel());
    engine.set_mode(mode);
    engine.set_fuel(Fuel::default());
    let lo = domain.iter().min().unwrap().clone();
    let hi = domain.iter().max().unwrap().clone();
    let branches = engine.run(windowed(e, lo, hi));
    engine.set_mode(old_mode);
    engine.set_fuel(old_fuel);

    let conc = concretize(&branches, domain);
    let mut reason = None;
    if mode == Mode::UX {
        if let Some(i) = infeasible_branch(engine, &branches) {
            reason = Some(format!(
                "branch {i} has a path condition the backend does not report sat"
            ));
        } else if let Some(why) = &conc.unspecified {
            reason = Some(why.clone());
        } else if let Some(o) = conc.outcomes.iter().find(|o| !concrete.contains(o)) {
            reason = Some(format!("{} is not a concrete outcome", show_outcome(o)));
        }
    } else if conc.unspecified.is_none() {
        if let Some(o) = concrete.iter().find(|o| !conc.outcomes.contains(o)) {
            reason = Some(format!("{} is not covered by any branch", show_outcome(o)));
        }
    }
    let exact = reason.is_none()
        && conc.unspecified.is_none()
        && conc.empty_branch.is_none()
        && conc.outcomes == concrete;
    if reason.is_none() && !exact {
        engine.diag.log(crate::diagnostics::LogLevel::Info, || {
            conc.unspecified
                .clone()
                .unwrap_or_else(|| "concretized branches differ from the concrete outcomes".into())
        });
    }
    Verdict {
        mode,
        passed: reason.is_none(),
        exact,
        branches: branches.len(),
        concrete_outcomes: concrete.iter().map(show_outcome).collect(),
        symbolic_outcomes: conc.outcomes.iter().map(show_outcome).collect(),
        reason,
    }
}

/// Runs the program, confining every integer variable of a finished path to
/// `[lo, hi]` before the leaf check.
fn windowed(e: &super::Expr, lo: BigInt, hi: BigInt) -> Symex<'_, Result<Term, SimpError>> {
    eval_program(e).bind(move |r| {
        let (lo, hi) = (lo.clone(), hi.clone());
        Symex::with_engine(move |eng| {
            let (lo, hi) = (eng.arena.mk_int(lo), eng.arena.mk_int(hi));
            let mut window = Vec::new();
            for (v, sort) in eng.solver.declared_vars() {
                if sort == Sort::Int {
                    let t = eng.arena.mk_var(v, sort).expect("declared var");
                    window.push(eng.arena.geq(&t, &lo).expect("Int"));
                    window.push(eng.arena.leq(&t, &hi).expect("Int"));
                }
            }
            assume(window).map(move |()| r.clone())
        })
    })
}

fn infeasible_branch(
    engine: &Engine,
    branches: &[Branch<Result<Term, SimpError>>],
) -> Option<usize> {
    branches.iter().position(|b| {
        let mut s = DirectSolver::new(
            engine.arena.clone(),
            engine.diag.clone(),
            engine.backend_config().clone(),
        );
        s.add_constraints(&b.path_condition)
            .expect("Bool path condition");
        engine.diag.bump(|st| st.sat_checks += 1);
        s.check_sat() != SolverResult::Sat
    })
}

fn concretize(branches: &[Branch<Result<Term, SimpError>>], domain: &[BigInt]) -> Concretized {
    let mut out = Concretized::default();
    for (i, b) in branches.iter().enumerate() {
        let mut vars = BTreeMap::new();
        for t in b.path_condition.iter().chain(b.result.as_ref().ok()) {
            crate::solver::collect_vars(t, &mut vars);
        }
        let vars: Vec<(VarId, Sort)> = vars.into_iter().collect();
        let mut any = false;
        for_each_assignment(&vars, domain, &mut Interpretation::new(), 0, &mut |env| {
            match holds(&b.path_condition, env) {
                Some(false) => return,
                Some(true) => {}
                None => {
                    out.unspecified.get_or_insert_with(|| {
                        format!("branch {i} has an unspecified path condition")
                    });
                }
            }
            any = true;
            match &b.result {
                Err(err) => {
                    out.outcomes.insert(Err(err.clone()));
                }
                Ok(t) => match t.eval_ground(env) {
                    Ok(g) => {
                        out.outcomes.insert(Ok(g));
                    }
                    Err(EvalError::Unspecified) => {
                        out.unspecified.get_or_insert_with(|| {
                            format!("branch {i} has an unspecified result {t}")
                        });
                    }
                    Err(other) => panic!("concretization failed: {other}"),
                },
            }
        });
        if !any {
            out.empty_branch.get_or_insert(i);
        }
    }
    out
}

/// `Some(true)` when every constraint holds, `Some(false)` when one fails,
/// `None` when the rest is unspecified.
fn holds(pc: &[Term], env: &Interpretation) -> Option<bool> {
    let mut unspecified = false;
    for c in pc {
        match c.eval_ground(env) {
            Ok(Ground::Bool(false)) => return Some(false),
            Ok(_) => {}
            Err(EvalError::Unspecified) => unspecified = true,
            Err(other) => panic!("concretization failed: {other}"),
        }
    }
    (!unspecified).then_some(true)
}

fn for_each_assignment(
    vars: &[(VarId, Sort)],
    domain: &[BigInt],
    env: &mut Interpretation,
    i: usize,
    f: &mut dyn FnMut(&Interpretation),
) {
    let Some(&(v, sort)) = vars.get(i) else {
        f(env);
        return;
    };
    let values: Vec<Ground> = match sort {
        Sort::Int => domain.iter().cloned().map(Ground::Int).collect(),
        Sort::Bool => vec![Ground::Bool(false), Ground::Bool(true)],
        Sort::BitVec(_) => panic!("bitvector variables are not concretized"),
    };
    for g in values {
        env.insert(v, g);
        for_each_assignment(vars, domain, env, i + 1, f);
    }
}
