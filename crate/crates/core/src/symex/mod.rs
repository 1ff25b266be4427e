//! The execution monad.
//!
//! A [`Symex`] computation is run against an [`Engine`], which owns the
//! solver state shared by every path. Exploration is depth-first: each
//! choice point saves the solver state, runs one alternative to completion
//! (through the continuation), backtracks, then runs the next.

use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::{Diagnostics, LogLevel, Stats};
use crate::mutants::Mutant;
use crate::solver::{make_solver, BackendConfig, Solver, SolverKind, SolverResult};
use crate::values::{Interpretation, Sort, Term, TermArena};

#[cfg(test)]
mod tests;

/// How solver answers of `unknown` are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Mode {
    /// Over-approximate: unknown counts as satisfiable.
    #[default]
    #[serde(rename = "ox")]
    OX,
    /// Under-approximate: unknown counts as unsatisfiable.
    #[serde(rename = "ux")]
    UX,
}

impl Mode {
    pub fn sat(self, r: SolverResult) -> bool {
        match r {
            SolverResult::Sat => true,
            SolverResult::Unsat => false,
            SolverResult::Unknown => self == Mode::OX,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::OX => "ox",
            Mode::UX => "ux",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ox" => Ok(Mode::OX),
            "ux" => Ok(Mode::UX),
            _ => Err(format!("unknown mode `{s}`")),
        }
    }
}

/// Exploration limits. `None` is unlimited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Fuel {
    /// Extra alternatives that may be explored, over the whole run.
    pub branching: Option<u64>,
    /// Steps each path may take.
    pub steps: Option<u64>,
}

/// A leaf of a run: a result and the constraints under which it occurs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch<A> {
    pub result: A,
    pub path_condition: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymexError {
    #[error("branch guard must have sort Bool, found {0}")]
    GuardNotBool(Sort),
}

/// Everything a run needs besides the computation.
#[derive(Debug, Clone, Default)]
pub struct EngineConfig {
    pub mode: Mode,
    pub fuel: Fuel,
    pub solver: SolverKind,
    pub backend: BackendConfig,
    pub log_level: Option<LogLevel>,
}

/// One arena, one solver state, one log. Not shareable across threads;
/// separate engines are independent.
pub struct Engine {
    pub solver: Box<dyn Solver>,
    pub arena: Rc<TermArena>,
    pub diag: Rc<Diagnostics>,
    mode: Mode,
    fuel: Fuel,
    branching_left: Option<u64>,
    steps_left: Option<u64>,
    backend: BackendConfig,
    #[cfg(feature = "mutants")]
    mutants: Vec<Mutant>,
}

impl Engine {
    pub fn new(config: EngineConfig) -> Self {
        let arena = Rc::new(TermArena::new());
        let diag = Rc::new(Diagnostics::new(
            config.log_level.unwrap_or(LogLevel::Warning),
        ));
        let solver = make_solver(
            config.solver,
            arena.clone(),
            diag.clone(),
            config.backend.clone(),
        );
        let mut engine = Self::with_solver(solver, diag, config.mode, config.fuel);
        engine.backend = config.backend;
        engine
    }

    pub fn with_solver(
        solver: Box<dyn Solver>,
        diag: Rc<Diagnostics>,
        mode: Mode,
        fuel: Fuel,
    ) -> Self {
        Engine {
            arena: solver.arena().clone(),
            solver,
            diag,
            mode,
            fuel,
            branching_left: fuel.branching,
            steps_left: fuel.steps,
            backend: BackendConfig::default(),
            #[cfg(feature = "mutants")]
            mutants: Vec::new(),
        }
    }

    /// The backend configuration used for auxiliary queries.
    pub fn backend_config(&self) -> &BackendConfig {
        &self.backend
    }

    pub fn set_backend_config(&mut self, config: BackendConfig) {
        self.backend = config;
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn set_mode(&mut self, mode: Mode) {
        self.mode = mode;
    }

    pub fn fuel(&self) -> Fuel {
        self.fuel
    }

    pub fn set_fuel(&mut self, fuel: Fuel) {
        self.fuel = fuel;
    }

    pub fn stats(&self) -> Stats {
        self.diag.stats_snapshot()
    }

    /// Feasibility under the engine's mode.
    pub fn sat_m(&self, r: SolverResult) -> bool {
        self.mode.sat(r)
    }

    /// A counted call to `check_sat`.
    pub fn check(&mut self) -> SolverResult {
        self.diag.bump(|s| s.sat_checks += 1);
        let r = self.solver.check_sat();
        self.diag.log(LogLevel::Trace, || format!("check-sat: {r}"));
        r
    }

    #[cfg(feature = "mutants")]
    pub fn set_mutants(&mut self, mutants: &[Mutant]) {
        self.mutants = mutants.to_vec();
    }

    /// Whether a fault is injected. Always false without the `mutants`
    /// feature.
    pub fn mutated(&self, m: Mutant) -> bool {
        #[cfg(feature = "mutants")]
        {
            self.mutants.contains(&m)
        }
        #[cfg(not(feature = "mutants"))]
        {
            let _ = m;
            false
        }
    }

    fn take_branching_fuel(&mut self) -> bool {
        match &mut self.branching_left {
            None => true,
            Some(0) => false,
            Some(n) => {
                *n -= 1;
                true
            }
        }
    }

    /// Runs `c` to completion and returns its leaves in exploration order.
    /// The solver is reset afterwards.
    pub fn run<'a, A: 'a>(&mut self, c: Symex<'a, A>) -> Vec<Branch<A>> {
        self.run_inspect(c, |_, _| ())
            .into_iter()
            .map(|(b, ())| b)
            .collect()
    }

    /// Like [`Engine::run`], calling `inspect` at each kept leaf while the
    /// leaf's path condition is still in force.
    pub fn run_inspect<'a, A: 'a, X>(
        &mut self,
        c: Symex<'a, A>,
        mut inspect: impl FnMut(&mut Engine, &A) -> X,
    ) -> Vec<(Branch<A>, X)> {
        self.branching_left = self.fuel.branching;
        self.steps_left = self.fuel.steps;
        let mut out = Vec::new();
        (c.0)(self, &mut |e: &mut Engine, a: A| {
            if e.solver.has_unchecked() && !e.mutated(Mutant::SkipLeafCheck) {
                let r = e.check();
                if !e.sat_m(r) {
                    e.diag.bump(|s| s.leaves_discarded += 1);
                    e.diag
                        .log(LogLevel::Debug, || "leaf discarded: infeasible".into());
                    return;
                }
            }
            let x = inspect(e, &a);
            out.push((
                Branch {
                    result: a,
                    path_condition: e.solver.as_values(),
                },
                x,
            ));
        });
        self.solver.reset();
        out
    }
}

type Cont<'k, A> = dyn FnMut(&mut Engine, A) + 'k;

type Body<'a, A> = Box<dyn FnOnce(&mut Engine, &mut Cont<'_, A>) + 'a>;

/// A branching computation yielding values of type `A`.
pub struct Symex<'a, A>(Body<'a, A>);

impl<'a, A: 'a> Symex<'a, A> {
    /// A computation from its continuation-passing body. The body must leave
    /// the solver state as it found it.
    pub fn new(body: impl FnOnce(&mut Engine, &mut Cont<'_, A>) + 'a) -> Self {
        Symex(Box::new(body))
    }

    /// Runs the body, passing each leaf to `k`.
    pub fn run_with(self, e: &mut Engine, k: &mut Cont<'_, A>) {
        (self.0)(e, k)
    }

    pub fn ret(a: A) -> Self {
        Symex::new(move |e, k| k(e, a))
    }

    pub fn vanish() -> Self {
        Symex::new(|_, _| {})
    }

    pub fn bind<B: 'a>(self, mut f: impl FnMut(A) -> Symex<'a, B> + 'a) -> Symex<'a, B> {
        Symex::new(move |e, k| (self.0)(e, &mut |e: &mut Engine, a: A| (f(a).0)(e, k)))
    }

    pub fn map<B: 'a>(self, mut f: impl FnMut(A) -> B + 'a) -> Symex<'a, B> {
        Symex::new(move |e, k| (self.0)(e, &mut |e: &mut Engine, a: A| k(e, f(a))))
    }

    /// Defers construction until the engine is available.
    pub fn with_engine(f: impl FnOnce(&mut Engine) -> Symex<'a, A> + 'a) -> Self {
        Symex::new(move |e, k| (f(e).0)(e, k))
    }

    /// Explores `then` where `guard` holds and `otherwise` where it does
    /// not.
    ///
    /// # Panics
    ///
    /// If `guard` is not of sort Bool. See [`Symex::try_branch_on`].
    pub fn branch_on(
        guard: Term,
        then: impl FnOnce() -> Symex<'a, A> + 'a,
        otherwise: impl FnOnce() -> Symex<'a, A> + 'a,
    ) -> Self {
        match Self::try_branch_on(guard, then, otherwise) {
            Ok(c) => c,
            Err(e) => panic!("{e}"),
        }
    }

    pub fn try_branch_on(
        guard: Term,
        then: impl FnOnce() -> Symex<'a, A> + 'a,
        otherwise: impl FnOnce() -> Symex<'a, A> + 'a,
    ) -> Result<Self, SymexError> {
        if guard.sort() != Sort::Bool {
            return Err(SymexError::GuardNotBool(guard.sort()));
        }
        Ok(Symex::new(move |e, k| {
            branch_on_body(e, k, guard, then, otherwise)
        }))
    }

    /// Explores each alternative in order under the same path condition.
    pub fn branches(alternatives: Vec<Box<dyn FnOnce() -> Symex<'a, A> + 'a>>) -> Self {
        Symex::new(move |e, k| {
            let total = alternatives.len();
            let steps = e.steps_left;
            for (i, alt) in alternatives.into_iter().enumerate() {
                if i > 0 {
                    if !e.take_branching_fuel() {
                        let skipped = (total - i) as u64;
                        e.diag.bump(|s| s.unexplored_branches += skipped);
                        e.diag.log(LogLevel::Info, || {
                            format!("out of branching fuel: {skipped} alternatives skipped")
                        });
                        break;
                    }
                    e.diag.bump(|s| s.branches += 1);
                }
                e.steps_left = steps;
                let diag = e.diag.clone();
                diag.with_section(&format!("alternative {i}"), || {
                    e.solver.save();
                    (alt().0)(e, k);
                    e.solver.backtrack_n(1).expect("balanced save");
                });
            }
            e.steps_left = steps;
        })
    }
}

fn branch_on_body<'a, A: 'a>(
    e: &mut Engine,
    k: &mut Cont<'_, A>,
    guard: Term,
    then: impl FnOnce() -> Symex<'a, A>,
    otherwise: impl FnOnce() -> Symex<'a, A>,
) {
    e.diag.log(LogLevel::Trace, || format!("branch on {guard}"));
    let mut guard = guard;
    let decided = if let Some(b) = guard.as_bool() {
        e.diag.bump(|s| s.guard_concrete_shortcuts += 1);
        Some(b)
    } else if let Some(b) = e.solver.lookup_in_pc(&guard) {
        e.diag.bump(|s| s.guard_in_pc_shortcuts += 1);
        Some(b)
    } else {
        guard = e.solver.simplify(&guard);
        let b = guard.as_bool();
        if b.is_some() {
            e.diag.bump(|s| s.guard_simplified_shortcuts += 1);
        }
        b
    };
    if let Some(b) = decided {
        e.diag
            .log(LogLevel::Debug, || format!("guard decided: {b}"));
        return if b {
            (then().0)(e, k)
        } else {
            (otherwise().0)(e, k)
        };
    }
    let entry_checked = !e.solver.has_unchecked();
    let steps = e.steps_left;
    let diag = e.diag.clone();

    let left_unsat = diag.with_section("left branch", || {
        e.solver.save();
        e.solver
            .add_constraints(&[guard.clone()])
            .expect("Bool guard");
        let r = e.check();
        if e.sat_m(r) {
            (then().0)(e, k);
        }
        e.solver.backtrack_n(1).expect("balanced save");
        r.is_unsat()
    });
    e.steps_left = steps;

    diag.with_section("right branch", || {
        let negated = e.arena.mk_not(&guard).expect("Bool guard");
        e.solver.save();
        e.solver.add_constraints(&[negated]).expect("Bool guard");
        if left_unsat {
            // The negation is implied by the path condition.
            if entry_checked {
                e.solver.mark_checked();
            }
            (otherwise().0)(e, k);
        } else if !e.take_branching_fuel() {
            e.diag.bump(|s| s.unexplored_branches += 1);
            e.diag.log(LogLevel::Info, || {
                "out of branching fuel: else side skipped".into()
            });
        } else {
            e.diag.bump(|s| s.branches += 1);
            let r = e.check();
            if e.sat_m(r) {
                (otherwise().0)(e, k);
            }
        }
        e.solver.backtrack_n(1).expect("balanced save");
    });
    e.steps_left = steps;
}

/// A fresh variable of `sort`. The path condition is unchanged.
pub fn nondet<'a>(sort: Sort) -> Symex<'a, Term> {
    Symex::new(move |e, k| {
        e.solver.save();
        let v = e.solver.fresh_var(sort);
        let t = e.arena.mk_var(v, sort).expect("fresh id");
        e.diag
            .log(LogLevel::Trace, || format!("nondet {t} : {sort}"));
        k(e, t);
        e.solver.backtrack_n(1).expect("balanced save");
    })
}

/// Adds constraints without checking them. Infeasibility surfaces at the
/// next check or at the leaf.
pub fn assume<'a>(cs: Vec<Term>) -> Symex<'a, ()> {
    Symex::new(move |e, k| {
        e.solver.save();
        e.solver.add_constraints(&cs).expect("Bool constraints");
        k(e, ());
        e.solver.backtrack_n(1).expect("balanced save");
    })
}

/// Yields whether `c` holds on every model of the path condition, as far as
/// the mode's notion of feasibility can tell.
pub fn assert_holds<'a>(c: Term) -> Symex<'a, bool> {
    Symex::new(move |e, k| {
        let c = match e.solver.lookup_in_pc(&c) {
            Some(b) => e.arena.mk_bool(b),
            None => e.solver.simplify(&c),
        };
        let holds = match c.as_bool() {
            Some(b) => b,
            None => {
                let negated = e.arena.mk_not(&c).expect("Bool assertion");
                e.solver.save();
                e.solver
                    .add_constraints(&[negated])
                    .expect("Bool assertion");
                let r = e.check();
                e.solver.backtrack_n(1).expect("balanced save");
                !e.sat_m(r)
            }
        };
        k(e, holds);
    })
}

/// Spends one step of fuel; the path ends when none is left.
pub fn consume_step<'a>() -> Symex<'a, ()> {
    Symex::new(|e, k| {
        let saved = e.steps_left;
        match &mut e.steps_left {
            Some(0) => {
                e.diag.bump(|s| s.unexplored_steps += 1);
                e.diag.log(LogLevel::Info, || "out of step fuel".into());
                return;
            }
            Some(n) => *n -= 1,
            None => {}
        }
        e.diag.bump(|s| s.steps_consumed += 1);
        k(e, ());
        e.steps_left = saved;
    })
}

/// A model of the current path condition, if the solver produces one.
pub fn current_model<'a>() -> Symex<'a, Option<Interpretation>> {
    Symex::new(|e, k| {
        let m = e.solver.get_model();
        k(e, m);
    })
}

pub fn ret<'a, A: 'a>(a: A) -> Symex<'a, A> {
    Symex::ret(a)
}

pub fn vanish<'a, A: 'a>() -> Symex<'a, A> {
    Symex::vanish()
}

/// See [`Symex::branch_on`].
pub fn branch_on<'a, A: 'a>(
    guard: Term,
    then: impl FnOnce() -> Symex<'a, A> + 'a,
    otherwise: impl FnOnce() -> Symex<'a, A> + 'a,
) -> Symex<'a, A> {
    Symex::branch_on(guard, then, otherwise)
}

/// Computations over results, stopping each path at its first error.
pub mod result {
    use super::Symex;

    pub fn ok<'a, V: 'a, E: 'a>(v: V) -> Symex<'a, Result<V, E>> {
        Symex::ret(Ok(v))
    }

    pub fn error<'a, V: 'a, E: 'a>(err: E) -> Symex<'a, Result<V, E>> {
        Symex::ret(Err(err))
    }

    pub fn bind<'a, V: 'a, W: 'a, E: 'a>(
        m: Symex<'a, Result<V, E>>,
        mut f: impl FnMut(V) -> Symex<'a, Result<W, E>> + 'a,
    ) -> Symex<'a, Result<W, E>> {
        m.bind(move |r| match r {
            Ok(v) => f(v),
            Err(e) => Symex::ret(Err(e)),
        })
    }

    pub fn map<'a, V: 'a, W: 'a, E: 'a>(
        m: Symex<'a, Result<V, E>>,
        mut f: impl FnMut(V) -> W + 'a,
    ) -> Symex<'a, Result<W, E>> {
        m.map(move |r| r.map(&mut f))
    }
}
