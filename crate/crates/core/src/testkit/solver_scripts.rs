//! Random constraint scripts for comparing solvers and checking backtracking.

use rand::Rng;

use crate::solver::{Solver, SolverResult};
use crate::values::{Sort, Term, TermArena, VarId};

#[derive(Debug, Clone)]
pub enum SolverOp {
    Add(Vec<Term>),
    Save,
    Backtrack(usize),
    Check,
}

/// Variables to declare, in id order, and the operations that follow.
#[derive(Debug, Clone)]
pub struct SolverScript {
    pub sorts: Vec<Sort>,
    pub ops: Vec<SolverOp>,
}

const INT_VARS: u32 = 3;
const BV_VARS: u32 = 2;
const BV_WIDTH: u32 = 8;

struct Gen<'r, R: Rng> {
    rng: &'r mut R,
    arena: &'r TermArena,
}

impl<R: Rng> Gen<'_, R> {
    fn int(&mut self, depth: u32) -> Term {
        let a = self.arena;
        if depth == 0 || self.rng.gen_bool(0.4) {
            return if self.rng.gen_bool(0.6) {
                a.mk_var(VarId(self.rng.gen_range(0..INT_VARS)), Sort::Int)
                    .unwrap()
            } else {
                a.mk_int(self.rng.gen_range(-5..=5))
            };
        }
        let (x, y) = (self.int(depth - 1), self.int(depth - 1));
        match self.rng.gen_range(0..5) {
            0 | 1 => a.add(&x, &y).unwrap(),
            2 | 3 => a.sub(&x, &y).unwrap(),
            // Division by a nonzero literal keeps the problem linear.
            _ => {
                let d = *[-3i64, -2, 2, 3].get(self.rng.gen_range(0..4)).unwrap();
                a.div(&x, &a.mk_int(d)).unwrap()
            }
        }
    }

    fn bv(&mut self, depth: u32) -> Term {
        let a = self.arena;
        if depth == 0 || self.rng.gen_bool(0.4) {
            return if self.rng.gen_bool(0.6) {
                a.mk_var(
                    VarId(INT_VARS + self.rng.gen_range(0..BV_VARS)),
                    Sort::BitVec(BV_WIDTH),
                )
                .unwrap()
            } else {
                a.mk_bv_wrapping(BV_WIDTH, self.rng.gen_range(-128..=127))
                    .unwrap()
            };
        }
        let (x, y) = (self.bv(depth - 1), self.bv(depth - 1));
        match self.rng.gen_range(0..5) {
            0 | 1 => a.add(&x, &y).unwrap(),
            2 | 3 => a.sub(&x, &y).unwrap(),
            _ => a.div(&x, &y).unwrap(),
        }
    }

    fn bool(&mut self, depth: u32) -> Term {
        let a = self.arena;
        let atom = |g: &mut Self| -> Term {
            match g.rng.gen_range(0..6) {
                0 | 1 => a.geq(&g.int(2), &g.int(1)).unwrap(),
                2 => a.eq(&g.int(2), &g.int(1)).unwrap(),
                3 => a.geq(&g.bv(2), &g.bv(1)).unwrap(),
                4 => a.eq(&g.bv(2), &g.bv(1)).unwrap(),
                _ => {
                    // Bound-shaped: `x >= c` or `c >= x`.
                    let x = a
                        .mk_var(VarId(g.rng.gen_range(0..INT_VARS)), Sort::Int)
                        .unwrap();
                    let c = a.mk_int(g.rng.gen_range(-4..=4));
                    if g.rng.gen_bool(0.5) {
                        a.geq(&x, &c).unwrap()
                    } else {
                        a.geq(&c, &x).unwrap()
                    }
                }
            }
        };
        if depth == 0 || self.rng.gen_bool(0.6) {
            return atom(self);
        }
        match self.rng.gen_range(0..3) {
            0 => a.mk_not(&self.bool(depth - 1)).unwrap(),
            1 => a.and(&self.bool(depth - 1), &self.bool(depth - 1)).unwrap(),
            _ => a.or(&self.bool(depth - 1), &self.bool(depth - 1)).unwrap(),
        }
    }
}

fn declare(arena: &TermArena) -> Vec<Sort> {
    let mut sorts = vec![Sort::Int; INT_VARS as usize];
    sorts.extend(std::iter::repeat_n(
        Sort::BitVec(BV_WIDTH),
        BV_VARS as usize,
    ));
    for (i, s) in sorts.iter().enumerate() {
        arena.mk_var(VarId(i as u32), *s).unwrap();
    }
    sorts
}

/// A script of `len` operations over three Int and two 8-bit variables.
pub fn gen_script(rng: &mut impl Rng, arena: &TermArena, len: usize) -> SolverScript {
    let sorts = declare(arena);
    let mut g = Gen { rng, arena };
    let mut depth = 0usize;
    let mut ops = Vec::with_capacity(len);
    for _ in 0..len {
        let op = match g.rng.gen_range(0..10) {
            0..=3 => {
                let n = g.rng.gen_range(1..=2);
                SolverOp::Add((0..n).map(|_| g.bool(2)).collect())
            }
            4 | 5 => {
                depth += 1;
                SolverOp::Save
            }
            6 if depth > 0 => {
                let n = g.rng.gen_range(1..=depth);
                depth -= n;
                SolverOp::Backtrack(n)
            }
            _ => SolverOp::Check,
        };
        ops.push(op);
    }
    SolverScript { sorts, ops }
}

/// Resets `solver`, declares the script's variables and runs it, returning
/// every `check_sat` answer in order.
pub fn drive(solver: &mut dyn Solver, script: &SolverScript) -> Vec<SolverResult> {
    solver.reset();
    declare_on(solver, script);
    let mut out = Vec::new();
    for op in &script.ops {
        match op {
            SolverOp::Add(cs) => solver.add_constraints(cs).expect("Bool constraints"),
            SolverOp::Save => solver.save(),
            SolverOp::Backtrack(n) => solver.backtrack_n(*n).expect("generated within depth"),
            SolverOp::Check => out.push(solver.check_sat()),
        }
    }
    solver.reset();
    out
}

fn declare_on(solver: &mut dyn Solver, script: &SolverScript) {
    for (i, s) in script.sorts.iter().enumerate() {
        let v = solver.fresh_var(*s);
        assert_eq!(v, VarId(i as u32), "solver must start from a fresh counter");
        solver.arena().mk_var(v, *s).expect("declared var");
    }
}

/// Runs the script, checking after each backtrack that `as_values` equals
/// the snapshot taken at the matching save.
pub fn check_backtracking(solver: &mut dyn Solver, script: &SolverScript) -> Result<(), String> {
    solver.reset();
    declare_on(solver, script);
    let mut snapshots: Vec<Vec<Term>> = Vec::new();
    let mut result = Ok(());
    for (i, op) in script.ops.iter().enumerate() {
        match op {
            SolverOp::Add(cs) => solver.add_constraints(cs).expect("Bool constraints"),
            SolverOp::Save => {
                snapshots.push(solver.as_values());
                solver.save();
            }
            SolverOp::Backtrack(n) => {
                solver.backtrack_n(*n).expect("generated within depth");
                let want = snapshots.split_off(snapshots.len() - n).swap_remove(0);
                let got = solver.as_values();
                if got != want {
                    result = Err(format!("after op {i}: expected {want:?}, got {got:?}"));
                    break;
                }
            }
            SolverOp::Check => {
                solver.check_sat();
            }
        }
        if solver.checkpoint_depth() != snapshots.len() {
            result = Err(format!(
                "after op {i}: checkpoint depth {}",
                solver.checkpoint_depth()
            ));
            break;
        }
    }
    solver.reset();
    result
}
