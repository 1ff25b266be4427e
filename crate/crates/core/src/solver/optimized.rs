//! The optimized pipeline: analyses, check marking, slicing and caching in
//! front of one-shot backend queries.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use super::analysis::{is_bound_shaped, Analysis};
use super::backend::{declare_cmd, model_from_sexp};
use super::{
    check_bool, collect_vars, complete_and_validate, BackendConfig, BackendError, SmtBackend,
    Solver, SolverError, SolverResult,
};
use crate::diagnostics::{Diagnostics, LogLevel};
use crate::values::{Interpretation, Sort, Term, TermArena, ValueError, VarId};

struct Checkpoint {
    len: usize,
    var_counter: u32,
    analysis: Analysis,
}

pub struct OptimizedSolver {
    arena: Rc<TermArena>,
    diag: Rc<Diagnostics>,
    backend: SmtBackend,
    constraints: Vec<Term>,
    /// Constraints `[0, checked)` are known to be jointly satisfiable.
    checked: usize,
    var_sorts: Vec<Sort>,
    analysis: Analysis,
    checkpoints: Vec<Checkpoint>,
    cache: HashMap<Vec<u32>, SolverResult>,
}

impl OptimizedSolver {
    pub fn new(arena: Rc<TermArena>, diag: Rc<Diagnostics>, config: BackendConfig) -> Self {
        OptimizedSolver {
            backend: SmtBackend::new(config, diag.clone()),
            arena,
            diag,
            constraints: Vec::new(),
            checked: 0,
            var_sorts: Vec::new(),
            analysis: Analysis::default(),
            checkpoints: Vec::new(),
            cache: HashMap::new(),
        }
    }

    /// Number of cached verdicts.
    pub fn cache_len(&self) -> usize {
        self.cache.len()
    }

    pub fn contradiction(&self) -> bool {
        self.analysis.contradiction
    }

    /// The unchecked constraints plus every constraint connected to them
    /// through shared variables, in insertion order.
    fn slice(&self) -> Vec<Term> {
        let mut uf: HashMap<VarId, VarId> = HashMap::new();
        fn root(uf: &HashMap<VarId, VarId>, mut v: VarId) -> VarId {
            while let Some(&p) = uf.get(&v) {
                if p == v {
                    break;
                }
                v = p;
            }
            v
        }
        for c in &self.constraints {
            let vs = c.free_vars();
            if let Some((&first, rest)) = vs.split_first() {
                let r0 = root(&uf, first);
                for &v in rest {
                    let r = root(&uf, v);
                    if r != r0 {
                        uf.insert(r, r0);
                    }
                }
            }
        }
        let seeds: BTreeSet<VarId> = self.constraints[self.checked..]
            .iter()
            .filter_map(|c| c.free_vars().first().map(|&v| root(&uf, v)))
            .collect();
        self.constraints
            .iter()
            .enumerate()
            .filter(|(i, c)| match c.free_vars().first() {
                Some(&v) => seeds.contains(&root(&uf, v)),
                None => *i >= self.checked,
            })
            .map(|(_, c)| c.clone())
            .collect()
    }

    fn query(&mut self, slice: &[Term]) -> Result<SolverResult, BackendError> {
        let mut vars = BTreeMap::new();
        for c in slice {
            collect_vars(c, &mut vars);
        }
        self.backend.send("(push 1)")?;
        for (v, s) in vars {
            self.backend.send(&declare_cmd(v, s))?;
        }
        for c in slice {
            self.backend.send(&format!("(assert {c})"))?;
        }
        self.diag.bump(|s| s.solver_queries_external += 1);
        let r = self.backend.check_sat()?;
        self.backend.send("(pop 1)")?;
        Ok(r)
    }

    fn try_model(&mut self) -> Result<Option<Interpretation>, BackendError> {
        let declared = self.declared_vars();
        self.backend.send("(push 1)")?;
        for (v, s) in &declared {
            self.backend.send(&declare_cmd(*v, *s))?;
        }
        for c in &self.constraints {
            self.backend.send(&format!("(assert {c})"))?;
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
        Ok(complete_and_validate(
            model,
            &declared,
            &self.constraints,
            &self.diag,
        ))
    }
}

impl Solver for OptimizedSolver {
    fn arena(&self) -> &Rc<TermArena> {
        &self.arena
    }

    fn add_constraints(&mut self, cs: &[Term]) -> Result<(), SolverError> {
        check_bool(cs)?;
        if cs.iter().any(|c| !self.arena.owns(c)) {
            return Err(ValueError::ForeignTerm.into());
        }
        for c in cs {
            let c = self.analysis.simplify(&self.arena, c);
            match c.as_bool() {
                Some(true) => continue,
                Some(false) => {
                    self.analysis.contradiction = true;
                    self.constraints.push(c);
                }
                None => {
                    self.analysis.learn(&c);
                    self.constraints.push(c);
                }
            }
        }
        Ok(())
    }

    fn check_sat(&mut self) -> SolverResult {
        if self.analysis.contradiction {
            self.diag
                .log(LogLevel::Debug, || "unsat by analysis".to_string());
            return SolverResult::Unsat;
        }
        if self.checked == self.constraints.len() {
            return SolverResult::Sat;
        }
        let slice = self.slice();
        if slice.iter().all(is_bound_shaped) {
            self.diag
                .log(LogLevel::Debug, || "sat by interval analysis".to_string());
            self.checked = self.constraints.len();
            return SolverResult::Sat;
        }
        let mut key: Vec<u32> = slice.iter().map(Term::id).collect();
        key.sort_unstable();
        let result = if let Some(&r) = self.cache.get(&key) {
            self.diag.bump(|s| s.cache_hits += 1);
            self.diag.log(LogLevel::Debug, || format!("cache hit: {r}"));
            r
        } else {
            match self.query(&slice) {
                Ok(r) => {
                    if r != SolverResult::Unknown {
                        self.cache.insert(key, r);
                    }
                    r
                }
                Err(e) => {
                    self.diag
                        .log(LogLevel::Warning, || format!("check-sat failed: {e}"));
                    SolverResult::Unknown
                }
            }
        };
        if result == SolverResult::Sat {
            self.checked = self.constraints.len();
        }
        result
    }

    fn fresh_var(&mut self, sort: Sort) -> VarId {
        let id = VarId(self.var_sorts.len() as u32);
        self.var_sorts.push(sort);
        id
    }

    fn save(&mut self) {
        self.checkpoints.push(Checkpoint {
            len: self.constraints.len(),
            var_counter: self.var_counter(),
            analysis: self.analysis.clone(),
        });
    }

    fn backtrack_n(&mut self, n: usize) -> Result<(), SolverError> {
        let depth = self.checkpoints.len();
        if n > depth {
            return Err(SolverError::BacktrackTooFar {
                requested: n,
                depth,
            });
        }
        if n == 0 {
            return Ok(());
        }
        let cp = self.checkpoints.drain(depth - n..).next().expect("n > 0");
        self.constraints.truncate(cp.len);
        self.checked = self.checked.min(cp.len);
        self.var_sorts.truncate(cp.var_counter as usize);
        self.arena.release_vars_from(cp.var_counter);
        self.analysis = cp.analysis;
        Ok(())
    }

    fn reset(&mut self) {
        self.constraints.clear();
        self.checked = 0;
        self.var_sorts.clear();
        self.arena.release_vars_from(0);
        self.analysis = Analysis::default();
        self.checkpoints.clear();
    }

    fn as_values(&self) -> Vec<Term> {
        self.constraints.clone()
    }

    fn simplify(&mut self, t: &Term) -> Term {
        self.analysis.simplify(&self.arena, t)
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
        self.checked < self.constraints.len()
    }

    fn mark_checked(&mut self) {
        self.checked = self.constraints.len();
    }

    fn lookup_in_pc(&self, t: &Term) -> Option<bool> {
        if self.analysis.is_fact(t) {
            return Some(true);
        }
        if let crate::values::Kind::Not(u) = t.kind() {
            if self.analysis.is_fact(u) {
                return Some(false);
            }
        }
        match self.arena.lookup(&crate::values::Kind::Not(t.clone())) {
            Some(n) if self.analysis.is_fact(&n) => Some(false),
            _ => None,
        }
    }

    fn var_counter(&self) -> u32 {
        self.var_sorts.len() as u32
    }

    fn checkpoint_depth(&self) -> usize {
        self.checkpoints.len()
    }

    fn declared_vars(&self) -> BTreeMap<VarId, Sort> {
        let mut out: BTreeMap<VarId, Sort> = self
            .var_sorts
            .iter()
            .enumerate()
            .map(|(i, s)| (VarId(i as u32), *s))
            .collect();
        for c in &self.constraints {
            collect_vars(c, &mut out);
        }
        out
    }

    fn backend_error(&self) -> Option<BackendError> {
        self.backend.last_error().cloned()
    }
}
