//! SMT-LIB2 rendering and parsing of terms.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_traits::Num;
use thiserror::Error;

use super::{BinOp, Kind, Sort, Term, TermArena, ValueError, VarId};
use crate::sexp::{self, Sexp};

pub(super) fn write_term(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t.kind() {
        Kind::Var(v, _) => write!(f, "{v}"),
        Kind::Bool(b) => write!(f, "{b}"),
        Kind::Int(z) => {
            if z.sign() == Sign::Minus {
                write!(f, "(- {})", -z)
            } else {
                write!(f, "{z}")
            }
        }
        Kind::BitVec { width, bits } => write!(f, "(_ bv{bits} {width})"),
        Kind::Not(a) => {
            f.write_str("(not ")?;
            write_term(a, f)?;
            f.write_str(")")
        }
        Kind::BinOp(op, a, b) => {
            let bv = matches!(a.sort(), Sort::BitVec(_));
            write!(f, "({} ", op_symbol(*op, bv))?;
            write_term(a, f)?;
            f.write_str(" ")?;
            write_term(b, f)?;
            f.write_str(")")
        }
    }
}

fn op_symbol(op: BinOp, bv: bool) -> &'static str {
    match (op, bv) {
        (BinOp::Add, false) => "+",
        (BinOp::Sub, false) => "-",
        (BinOp::Div, false) => "div",
        (BinOp::Geq, false) => ">=",
        (BinOp::Add, true) => "bvadd",
        (BinOp::Sub, true) => "bvsub",
        (BinOp::Div, true) => "bvsdiv",
        (BinOp::Geq, true) => "bvsge",
        (BinOp::And, _) => "and",
        (BinOp::Or, _) => "or",
        (BinOp::Eq, _) => "=",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseTermError {
    #[error("malformed s-expression: {0}")]
    Syntax(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("sort of variable {0} is unknown")]
    UnknownVar(VarId),
    #[error("operator `{op}` applied to {count} arguments")]
    Arity { op: String, count: usize },
    #[error(transparent)]
    Value(#[from] ValueError),
}

/// Parses a term in the syntax produced by `Display`, plus the literal forms
/// a solver may print in models (`#b…`, `#x…`). Variable sorts come from
/// `sort_of`.
pub fn parse_term(
    arena: &TermArena,
    text: &str,
    sort_of: &dyn Fn(VarId) -> Option<Sort>,
) -> Result<Term, ParseTermError> {
    let s = sexp::parse_one(text).map_err(|e| ParseTermError::Syntax(e.to_string()))?;
    from_sexp(arena, &s, sort_of)
}

pub(crate) fn from_sexp(
    arena: &TermArena,
    s: &Sexp,
    sort_of: &dyn Fn(VarId) -> Option<Sort>,
) -> Result<Term, ParseTermError> {
    match s {
        Sexp::Atom(a) => atom(arena, a, sort_of),
        Sexp::List(items) => {
            let head = items
                .first()
                .and_then(Sexp::as_atom)
                .ok_or_else(|| ParseTermError::Syntax(s.to_string()))?;
            let args = &items[1..];
            if head == "_" {
                return indexed_literal(arena, s, args);
            }
            let arity = |n: usize| -> Result<(), ParseTermError> {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(ParseTermError::Arity {
                        op: head.to_string(),
                        count: args.len(),
                    })
                }
            };
            if head == "-" && args.len() == 1 {
                if let Sexp::Atom(n) = &args[0] {
                    if let Ok(z) = n.parse::<BigInt>() {
                        return Ok(arena.mk_int(-z));
                    }
                }
                let a = from_sexp(arena, &args[0], sort_of)?;
                let zero = arena.zero(a.sort())?;
                return Ok(arena.sub(&zero, &a)?);
            }
            if head == "not" {
                arity(1)?;
                let a = from_sexp(arena, &args[0], sort_of)?;
                return Ok(arena.mk_not(&a)?);
            }
            let terms = args
                .iter()
                .map(|x| from_sexp(arena, x, sort_of))
                .collect::<Result<Vec<_>, _>>()?;
            let op = match head {
                "+" | "bvadd" => BinOp::Add,
                "-" | "bvsub" => BinOp::Sub,
                "div" | "bvsdiv" => BinOp::Div,
                "and" => BinOp::And,
                "or" => BinOp::Or,
                "=" => BinOp::Eq,
                ">=" | "bvsge" => BinOp::Geq,
                "<=" | "bvsle" => {
                    arity(2)?;
                    return Ok(arena.leq(&terms[0], &terms[1])?);
                }
                "<" | "bvslt" => {
                    arity(2)?;
                    return Ok(arena.lt(&terms[0], &terms[1])?);
                }
                ">" | "bvsgt" => {
                    arity(2)?;
                    return Ok(arena.lt(&terms[1], &terms[0])?);
                }
                other => return Err(ParseTermError::UnknownSymbol(other.to_string())),
            };
            if matches!(op, BinOp::Eq | BinOp::Geq | BinOp::Div) {
                arity(2)?;
            } else if terms.len() < 2 {
                return Err(ParseTermError::Arity {
                    op: head.to_string(),
                    count: terms.len(),
                });
            }
            let mut it = terms.into_iter();
            let first = it.next().unwrap();
            it.try_fold(first, |acc, t| arena.mk_binop(op, &acc, &t))
                .map_err(ParseTermError::from)
        }
    }
}

fn atom(
    arena: &TermArena,
    a: &str,
    sort_of: &dyn Fn(VarId) -> Option<Sort>,
) -> Result<Term, ParseTermError> {
    match a {
        "true" => return Ok(arena.mk_bool(true)),
        "false" => return Ok(arena.mk_bool(false)),
        _ => {}
    }
    if let Some(bin) = a.strip_prefix("#b") {
        let bits = BigInt::from_str_radix(bin, 2)
            .map_err(|_| ParseTermError::UnknownSymbol(a.to_string()))?;
        return Ok(arena.mk_bv(bin.len() as u32, bits)?);
    }
    if let Some(hex) = a.strip_prefix("#x") {
        let bits = BigInt::from_str_radix(hex, 16)
            .map_err(|_| ParseTermError::UnknownSymbol(a.to_string()))?;
        return Ok(arena.mk_bv(4 * hex.len() as u32, bits)?);
    }
    if a.bytes().all(|c| c.is_ascii_digit()) && !a.is_empty() {
        let z: BigInt = a.parse().expect("digits");
        return Ok(arena.mk_int(z));
    }
    if let Some(num) = a.strip_prefix('v') {
        if let Ok(id) = num.parse::<u32>() {
            let v = VarId(id);
            let sort = sort_of(v).ok_or(ParseTermError::UnknownVar(v))?;
            return Ok(arena.mk_var(v, sort)?);
        }
    }
    Err(ParseTermError::UnknownSymbol(a.to_string()))
}

fn indexed_literal(arena: &TermArena, s: &Sexp, args: &[Sexp]) -> Result<Term, ParseTermError> {
    let bad = || ParseTermError::Syntax(s.to_string());
    match args {
        [Sexp::Atom(name), Sexp::Atom(width)] => {
            let bits: BigInt = name
                .strip_prefix("bv")
                .ok_or_else(bad)?
                .parse()
                .map_err(|_| bad())?;
            let width: u32 = width.parse().map_err(|_| bad())?;
            Ok(arena.mk_bv(width, bits)?)
        }
        _ => Err(bad()),
    }
}
