//! Incremental satisfiability.
//!
//! [`Solver`] is the interface the execution engine talks to. Two
//! implementations ship: [`DirectSolver`] forwards every operation to an
//! SMT-LIB2 process, while [`OptimizedSolver`] filters, slices and caches
//! queries before they reach the process.

mod analysis;
mod backend;
mod direct;
mod optimized;

use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::{Diagnostics, LogLevel};
use crate::values::{
    EvalError, Ground, Interpretation, Kind, Sort, Term, TermArena, ValueError, VarId,
};

pub use backend::{BackendConfig, BackendError, SmtBackend};
pub use direct::DirectSolver;
pub use optimized::OptimizedSolver;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverResult {
    Sat,
    Unsat,
    Unknown,
}

impl SolverResult {
    pub fn is_unsat(self) -> bool {
        self == SolverResult::Unsat
    }
}

impl fmt::Display for SolverResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverResult::Sat => "sat",
            SolverResult::Unsat => "unsat",
            SolverResult::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("constraint must have sort Bool, found {0}")]
    NotBool(Sort),
    #[error("cannot backtrack {requested} checkpoints, only {depth} saved")]
    BacktrackTooFar { requested: usize, depth: usize },
    #[error(transparent)]
    Value(#[from] ValueError),
}

/// Which [`Solver`] implementation to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Direct,
    #[default]
    Optimized,
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(SolverKind::Direct),
            "optimized" => Ok(SolverKind::Optimized),
            _ => Err(format!("unknown solver `{s}`")),
        }
    }
}

/// The operations the execution engine needs from a solver state.
pub trait Solver {
    fn arena(&self) -> &Rc<TermArena>;

    /// Appends constraints without checking them.
    fn add_constraints(&mut self, cs: &[Term]) -> Result<(), SolverError>;

    fn check_sat(&mut self) -> SolverResult;

    fn fresh_var(&mut self, sort: Sort) -> VarId;

    fn save(&mut self);

    fn backtrack_n(&mut self, n: usize) -> Result<(), SolverError>;

    /// Back to the initial empty state. Caches may survive.
    fn reset(&mut self);

    /// The constraints currently in force, in insertion order.
    fn as_values(&self) -> Vec<Term>;

    /// Rewrites `t` to an equivalent term under the current constraints.
    fn simplify(&mut self, t: &Term) -> Term;

    /// A satisfying assignment covering every declared variable, validated
    /// against the constraints before it is returned.
    fn get_model(&mut self) -> Option<Interpretation>;

    /// Whether some constraint has been added since the last satisfiable
    /// check.
    fn has_unchecked(&self) -> bool;

    /// Declares all current constraints jointly satisfiable. Callers must
    /// know this to be true.
    fn mark_checked(&mut self);

    /// `Some(true)` if `t` is one of the constraints, `Some(false)` if its
    /// negation is.
    fn lookup_in_pc(&self, t: &Term) -> Option<bool>;

    fn var_counter(&self) -> u32;

    fn checkpoint_depth(&self) -> usize;

    /// Variables issued by `fresh_var` on the current path, and any others
    /// occurring in the constraints.
    fn declared_vars(&self) -> BTreeMap<VarId, Sort>;

    /// The last unrecoverable backend failure, if any.
    fn backend_error(&self) -> Option<BackendError>;
}

/// Builds a solver of the requested kind.
pub fn make_solver(
    kind: SolverKind,
    arena: Rc<TermArena>,
    diag: Rc<Diagnostics>,
    backend: BackendConfig,
) -> Box<dyn Solver> {
    match kind {
        SolverKind::Direct => Box::new(DirectSolver::new(arena, diag, backend)),
        SolverKind::Optimized => Box::new(OptimizedSolver::new(arena, diag, backend)),
    }
}

pub(crate) fn default_timeout() -> Option<Duration> {
    Some(Duration::from_secs(10))
}

fn check_bool(cs: &[Term]) -> Result<(), SolverError> {
    match cs.iter().find(|c| c.sort() != Sort::Bool) {
        Some(c) => Err(SolverError::NotBool(c.sort())),
        None => Ok(()),
    }
}

/// Every variable occurring in `t`, with its sort.
pub(crate) fn collect_vars(t: &Term, out: &mut BTreeMap<VarId, Sort>) {
    if t.free_vars().iter().all(|v| out.contains_key(v)) {
        return;
    }
    match t.kind() {
        Kind::Var(v, s) => {
            out.insert(*v, *s);
        }
        Kind::Not(a) => collect_vars(a, out),
        Kind::BinOp(_, a, b) => {
            collect_vars(a, out);
            collect_vars(b, out);
        }
        _ => {}
    }
}

/// Fills gaps in a backend model and checks it against `constraints`.
///
/// Constraints whose value is unspecified (division by zero) are accepted.
pub(crate) fn complete_and_validate(
    mut model: Interpretation,
    declared: &BTreeMap<VarId, Sort>,
    constraints: &[Term],
    diag: &Diagnostics,
) -> Option<Interpretation> {
    for (v, s) in declared {
        let well_sorted = model.get(*v).map(|g| g.sort() == *s);
        if well_sorted != Some(true) {
            model.insert(*v, Ground::default_of(*s));
        }
    }
    for c in constraints {
        match c.eval_ground(&model) {
            Ok(Ground::Bool(true)) | Err(EvalError::Unspecified) => {}
            other => {
                diag.log(LogLevel::Warning, || {
                    format!("model rejected: {c} evaluates to {other:?}")
                });
                return None;
            }
        }
    }
    Some(model)
}
