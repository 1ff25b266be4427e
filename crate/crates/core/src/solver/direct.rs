//! Pass-through solver: the backend's assertion stack mirrors ours.

use std::collections::{BTreeMap, HashSet};
use std::rc::Rc;

use super::backend::{declare_cmd, model_from_sexp};
use super::{
    check_bool, collect_vars, complete_and_validate, BackendConfig, BackendError, SmtBackend,
    Solver, SolverError, SolverResult,
};
use crate::diagnostics::{Diagnostics, LogLevel};
use crate::values::{Interpretation, Kind, Sort, Term, TermArena, VarId};

struct Frame {
    constraints: Vec<Term>,
    /// Variable counter when the frame was opened.
    var_counter: u32,
}

/// What the backend process currently holds at one `push` level.
#[derive(Default)]
struct Sent {
    asserted: usize,
    declared: HashSet<VarId>,
}

/// Forwards constraints to the backend unchanged. Commands are sent lazily,
/// when a check needs them.
pub struct DirectSolver {
    arena: Rc<TermArena>,
    diag: Rc<Diagnostics>,
    backend: SmtBackend,
    frames: Vec<Frame>,
    var_sorts: Vec<Sort>,
    checked: usize,
    sent: Vec<Sent>,
}

impl DirectSolver {
    pub fn new(arena: Rc<TermArena>, diag: Rc<Diagnostics>, config: BackendConfig) -> Self {
        DirectSolver {
            backend: SmtBackend::new(config, diag.clone()),
            arena,
            diag,
            frames: vec![Frame {
                constraints: Vec::new(),
                var_counter: 0,
            }],
            var_sorts: Vec::new(),
            checked: 0,
            sent: Vec::new(),
        }
    }

    fn total(&self) -> usize {
        self.frames.iter().map(|f| f.constraints.len()).sum()
    }

    fn constraints(&self) -> impl Iterator<Item = &Term> {
        self.frames.iter().flat_map(|f| f.constraints.iter())
    }

    fn is_declared(&self, v: VarId) -> bool {
        self.sent.iter().any(|s| s.declared.contains(&v))
    }

    /// Brings the backend up to date with our frames.
    fn sync(&mut self) -> Result<(), BackendError> {
        if !self.backend.is_running() {
            self.sent.clear();
        }
        for i in 0..self.frames.len() {
            if i >= self.sent.len() {
                self.backend.send("(push 1)")?;
                self.sent.push(Sent::default());
            }
            while self.sent[i].asserted < self.frames[i].constraints.len() {
                let c = self.frames[i].constraints[self.sent[i].asserted].clone();
                let mut vars = BTreeMap::new();
                collect_vars(&c, &mut vars);
                for (v, s) in vars {
                    if !self.is_declared(v) {
                        self.backend.send(&declare_cmd(v, s))?;
                        self.sent[i].declared.insert(v);
                    }
                }
                self.backend.send(&format!("(assert {c})"))?;
                self.sent[i].asserted += 1;
            }
        }
        Ok(())
    }

    fn pop_backend_to(&mut self, levels: usize) {
        if !self.backend.is_running() {
            self.sent.clear();
            return;
        }
        if self.sent.len() > levels {
            let n = self.sent.len() - levels;
            self.sent.truncate(levels);
            // A failed write kills the process; the next sync starts over.
            let _ = self.backend.send(&format!("(pop {n})"));
        }
    }

    fn try_model(&mut self) -> Result<Option<Interpretation>, BackendError> {
        self.sync()?;
        let declared = self.declared_vars();
        self.backend.send("(push 1)")?;
        for (v, s) in &declared {
            if !self.is_declared(*v) {
                self.backend.send(&declare_cmd(*v, *s))?;
            }
        }
        let answer = match self.backend.check_sat()? {
            SolverResult::Sat => Some(self.backend.get_model()?),
            _ => None,
        };
        self.backend.send("(pop 1)")?;
        let Some(answer) = answer else {
            return Ok(None);
        };
        let model = match model_from_sexp(&answer, &self.arena) {
            Ok(m) => m,
            Err(e) => {
                self.diag
                    .log(LogLevel::Warning, || format!("cannot read model: {e}"));
                return Ok(None);
            }
        };
        let cs = self.as_values();
        Ok(complete_and_validate(model, &declared, &cs, &self.diag))
    }
}

impl Solver for DirectSolver {
    fn arena(&self) -> &Rc<TermArena> {
        &self.arena
    }

    fn add_constraints(&mut self, cs: &[Term]) -> Result<(), SolverError> {
        check_bool(cs)?;
        for c in cs {
            if !self.arena.owns(c) {
                return Err(crate::values::ValueError::ForeignTerm.into());
            }
            if c.as_bool() == Some(true) {
                continue;
            }
            self.frames.last_mut().unwrap().constraints.push(c.clone());
        }
        Ok(())
    }

    fn check_sat(&mut self) -> SolverResult {
        let result = self.sync().and_then(|()| {
            self.diag.bump(|s| s.solver_queries_external += 1);
            self.backend.check_sat()
        });
        match result {
            Ok(r) => {
                if r == SolverResult::Sat {
                    self.checked = self.total();
                }
                r
            }
            Err(e) => {
                self.diag
                    .log(LogLevel::Warning, || format!("check-sat failed: {e}"));
                SolverResult::Unknown
            }
        }
    }

    fn fresh_var(&mut self, sort: Sort) -> VarId {
        let id = VarId(self.var_sorts.len() as u32);
        self.var_sorts.push(sort);
        id
    }

    fn save(&mut self) {
        self.frames.push(Frame {
            constraints: Vec::new(),
            var_counter: self.var_counter(),
        });
    }

    fn backtrack_n(&mut self, n: usize) -> Result<(), SolverError> {
        let depth = self.checkpoint_depth();
        if n > depth {
            return Err(SolverError::BacktrackTooFar {
                requested: n,
                depth,
            });
        }
        if n == 0 {
            return Ok(());
        }
        let keep = self.frames.len() - n;
        let counter = self.frames[keep].var_counter;
        self.frames.truncate(keep);
        self.var_sorts.truncate(counter as usize);
        self.arena.release_vars_from(counter);
        self.checked = self.checked.min(self.total());
        self.pop_backend_to(keep);
        Ok(())
    }

    fn reset(&mut self) {
        self.frames.truncate(1);
        self.frames[0].constraints.clear();
        self.var_sorts.clear();
        self.arena.release_vars_from(0);
        self.checked = 0;
        self.pop_backend_to(0);
    }

    fn as_values(&self) -> Vec<Term> {
        self.constraints().cloned().collect()
    }

    fn simplify(&mut self, t: &Term) -> Term {
        t.clone()
    }

    fn get_model(&mut self) -> Option<Interpretation> {
        match self.try_model() {
            Ok(m) => m,
            Err(e) => {
                self.diag
                    .log(LogLevel::Warning, || format!("get-model failed: {e}"));
                None
            }
        }
    }

    fn has_unchecked(&self) -> bool {
        self.checked < self.total()
    }

    fn mark_checked(&mut self) {
        self.checked = self.total();
    }

    fn lookup_in_pc(&self, t: &Term) -> Option<bool> {
        for c in self.constraints() {
            if c == t {
                return Some(true);
            }
            let negates = matches!(c.kind(), Kind::Not(u) if u == t)
                || matches!(t.kind(), Kind::Not(u) if u == c);
            if negates {
                return Some(false);
            }
        }
        None
    }

    fn var_counter(&self) -> u32 {
        self.var_sorts.len() as u32
    }

    fn checkpoint_depth(&self) -> usize {
        self.frames.len() - 1
    }

    fn declared_vars(&self) -> BTreeMap<VarId, Sort> {
        let mut out: BTreeMap<VarId, Sort> = self
            .var_sorts
            .iter()
            .enumerate()
            .map(|(i, s)| (VarId(i as u32), *s))
            .collect();
        for c in self.constraints() {
            collect_vars(c, &mut out);
        }
        out
    }

    fn backend_error(&self) -> Option<BackendError> {
        self.backend.last_error().cloned()
    }
}
