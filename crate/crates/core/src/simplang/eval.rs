use std::rc::Rc;

use crate::mutants::Mutant;
use crate::symex::{branch_on, consume_step, nondet, result, vanish, Engine, Symex};
use crate::values::{BinOp, Sort, Term, TermArena};

use super::{Expr, Op, SimpError};

/// Variable bindings. Persistent, so each path extends its own copy.
pub type Subst = im::HashMap<Rc<str>, Term>;

type Eval<'a> = Symex<'a, Result<Term, SimpError>>;

/// Evaluates a closed program.
pub fn eval_program(e: &Expr) -> Eval<'_> {
    eval_symbolic(Subst::new(), e)
}

/// Evaluates `e` under `env`, charging one step per node.
pub fn eval_symbolic(env: Subst, e: &Expr) -> Eval<'_> {
    consume_step().bind(move |()| eval_node(env.clone(), e))
}

fn eval_node(env: Subst, e: &Expr) -> Eval<'_> {
    match e {
        Expr::Const(c) => Symex::with_engine(move |eng| {
            let t = eng.arena.mk_const(&c.to_ground()).expect("constant");
            result::ok(t)
        }),
        Expr::Var(x) => match env.get(x.as_str()) {
            Some(t) => result::ok(t.clone()),
            None => result::error(SimpError::UnboundVariable(x.clone())),
        },
        Expr::BinOp(op, a, b) => {
            let op = *op;
            let env2 = env.clone();
            result::bind(eval_symbolic(env, a), move |va| {
                result::bind(eval_symbolic(env2.clone(), b), move |vb| {
                    eval_binop_symbolic(op, va.clone(), vb)
                })
            })
        }
        Expr::Let(x, bound, body) => {
            let name: Rc<str> = Rc::from(x.as_str());
            let env2 = env.clone();
            result::bind(eval_symbolic(env, bound), move |v| {
                eval_symbolic(env2.update(name.clone(), v), body)
            })
        }
        Expr::If(c, t, f) => {
            let env2 = env.clone();
            result::bind(eval_symbolic(env, c), move |g| {
                let (et, ef) = (env2.clone(), env2.clone());
                Symex::with_engine(move |eng| {
                    if eng.mutated(Mutant::DropElse) {
                        branch_on(g, move || eval_symbolic(et, t), vanish)
                    } else {
                        branch_on(
                            g,
                            move || eval_symbolic(et, t),
                            move || eval_symbolic(ef, f),
                        )
                    }
                })
            })
        }
        Expr::NondetInt => nondet(Sort::Int).map(Ok),
        Expr::Assert(a) => result::bind(eval_symbolic(env, a), move |v| {
            Symex::with_engine(move |eng| {
                let holds = eng.arena.mk_bool(true);
                let pass = move || result::ok(holds);
                let fail = || result::error(SimpError::AssertError);
                if eng.mutated(Mutant::SwapAssert) {
                    branch_on(v, fail, pass)
                } else {
                    branch_on(v, pass, fail)
                }
            })
        }),
    }
}

fn lift(arena: &TermArena, op: BinOp, a: &Term, b: &Term) -> Result<Term, SimpError> {
    arena
        .mk_binop(op, a, b)
        .map_err(|err| SimpError::SortError(err.to_string()))
}

/// Applies `op` to evaluated operands. Division by a possibly-zero divisor
/// splits into an error branch and a quotient branch.
pub fn eval_binop_symbolic<'a>(op: Op, a: Term, b: Term) -> Eval<'a> {
    Symex::with_engine(move |eng| {
        let arena = eng.arena.clone();
        let simple = |bop| Symex::ret(lift(&arena, bop, &a, &b));
        match op {
            Op::Add => simple(BinOp::Add),
            Op::Sub => simple(BinOp::Sub),
            Op::And => simple(BinOp::And),
            Op::Eq => simple(BinOp::Eq),
            Op::Geq => simple(BinOp::Geq),
            Op::Div => {
                let quotient = lift(&arena, BinOp::Div, &a, &b);
                if eng.mutated(Mutant::SkipDivGuard) {
                    return Symex::ret(quotient);
                }
                let zero = arena.mk_int(0);
                let is_zero = match lift(&arena, BinOp::Eq, &b, &zero) {
                    Ok(t) => t,
                    Err(err) => return result::error(err),
                };
                branch_on(
                    is_zero,
                    || result::error(SimpError::DivisionByZero),
                    move || Symex::ret(quotient),
                )
            }
        }
    })
}

impl Engine {
    /// Runs a closed program to its branches.
    pub fn run_program(&mut self, e: &Expr) -> Vec<crate::symex::Branch<Result<Term, SimpError>>> {
        self.run(eval_program(e))
    }
}
