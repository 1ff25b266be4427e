//! SimpleLang: integers, booleans, `let`, `if`, nondeterministic integers and
//! assertions.

mod concrete;
mod eval;
mod sort_check;
mod soundness;

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::values::Ground;

pub use concrete::eval_concrete_all;
pub use eval::{eval_binop_symbolic, eval_program, eval_symbolic, Subst};
pub use sort_check::{sort_check, SortError, Ty};
pub use soundness::{check_ox_soundness, check_ux_soundness, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Const {
    Int(BigInt),
    Bool(bool),
}

impl Const {
    pub fn to_ground(&self) -> Ground {
        match self {
            Const::Int(z) => Ground::Int(z.clone()),
            Const::Bool(b) => Ground::Bool(*b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Op {
    Add,
    Sub,
    And,
    Div,
    Eq,
    Geq,
}

impl Op {
    pub fn symbol(self) -> &'static str {
        match self {
            Op::Add => "+",
            Op::Sub => "-",
            Op::And => "&&",
            Op::Div => "/",
            Op::Eq => "==",
            Op::Geq => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Expr {
    Const(Const),
    Var(String),
    BinOp(Op, Box<Expr>, Box<Expr>),
    Let(String, Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    NondetInt,
    Assert(Box<Expr>),
}

impl Expr {
    pub fn int(z: impl Into<BigInt>) -> Expr {
        Expr::Const(Const::Int(z.into()))
    }

    pub fn bool(b: bool) -> Expr {
        Expr::Const(Const::Bool(b))
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn bin(op: Op, a: Expr, b: Expr) -> Expr {
        Expr::BinOp(op, Box::new(a), Box::new(b))
    }

    pub fn let_in(name: &str, bound: Expr, body: Expr) -> Expr {
        Expr::Let(name.to_string(), Box::new(bound), Box::new(body))
    }

    pub fn if_then_else(c: Expr, t: Expr, e: Expr) -> Expr {
        Expr::If(Box::new(c), Box::new(t), Box::new(e))
    }

    pub fn assert(e: Expr) -> Expr {
        Expr::Assert(Box::new(e))
    }

    /// Number of `NondetInt` nodes.
    pub fn nondet_count(&self) -> usize {
        match self {
            Expr::NondetInt => 1,
            Expr::Const(_) | Expr::Var(_) => 0,
            Expr::BinOp(_, a, b) | Expr::Let(_, a, b) => a.nondet_count() + b.nondet_count(),
            Expr::If(c, t, e) => c.nondet_count() + t.nondet_count() + e.nondet_count(),
            Expr::Assert(a) => a.nondet_count(),
        }
    }
}

/// Pretty-prints in the surface syntax accepted by the CLI, fully
/// parenthesized.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(Const::Int(z)) if z < &BigInt::from(0) => write!(f, "(0 - {})", -z),
            Expr::Const(Const::Int(z)) => write!(f, "{z}"),
            Expr::Const(Const::Bool(b)) => write!(f, "{b}"),
            Expr::Var(x) => f.write_str(x),
            Expr::BinOp(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Let(x, a, b) => write!(f, "(let {x} = {a} in {b})"),
            Expr::If(c, t, e) => write!(f, "(if {c} then {t} else {e})"),
            Expr::NondetInt => f.write_str("nondet"),
            Expr::Assert(a) => write!(f, "assert ({a})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SimpError {
    DivisionByZero,
    AssertError,
    UnboundVariable(String),
    SortError(String),
}

impl SimpError {
    /// The variant name, as used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            SimpError::DivisionByZero => "DivisionByZero",
            SimpError::AssertError => "AssertError",
            SimpError::UnboundVariable(_) => "UnboundVariable",
            SimpError::SortError(_) => "SortError",
        }
    }
}

impl fmt::Display for SimpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpError::UnboundVariable(x) => write!(f, "UnboundVariable({x})"),
            SimpError::SortError(m) => write!(f, "SortError({m})"),
            other => f.write_str(other.name()),
        }
    }
}

/// A concrete result.
pub type Outcome = Result<Ground, SimpError>;

pub fn show_outcome(o: &Outcome) -> String {
    match o {
        Ok(g) => format!("Ok {g}"),
        Err(e) => format!("Err {e}"),
    }
}
