use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::{Const, Expr, Op};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ty {
    Int,
    Bool,
    /// An unbound variable; evaluating it is a runtime error, so any sort
    /// is accepted.
    Any,
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ty::Int => "Int",
            Ty::Bool => "Bool",
            Ty::Any => "_",
        })
    }
}

/// A sort error located by the path from the root to the offending node,
/// e.g. `let.body/if.guard`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("sort error at {}: {message}", if path.is_empty() { "root".to_string() } else { path.join("/") })]
pub struct SortError {
    pub path: Vec<&'static str>,
    pub message: String,
}

/// Checks the program and returns its sort.
pub fn sort_check(e: &Expr) -> Result<Ty, SortError> {
    let mut path = Vec::new();
    check(&mut HashMap::new(), e, &mut path)
}

fn unify(a: Ty, b: Ty) -> Option<Ty> {
    match (a, b) {
        (Ty::Any, t) | (t, Ty::Any) => Some(t),
        (x, y) if x == y => Some(x),
        _ => None,
    }
}

fn expect(
    env: &mut HashMap<String, Vec<Ty>>,
    e: &Expr,
    want: Ty,
    path: &mut Vec<&'static str>,
    label: &'static str,
    what: &str,
) -> Result<(), SortError> {
    path.push(label);
    let got = check(env, e, path)?;
    if unify(got, want).is_none() {
        return Err(SortError {
            path: path.clone(),
            message: format!("{what} must be {want}, found {got}"),
        });
    }
    path.pop();
    Ok(())
}

fn check(
    env: &mut HashMap<String, Vec<Ty>>,
    e: &Expr,
    path: &mut Vec<&'static str>,
) -> Result<Ty, SortError> {
    match e {
        Expr::Const(Const::Int(_)) | Expr::NondetInt => Ok(Ty::Int),
        Expr::Const(Const::Bool(_)) => Ok(Ty::Bool),
        Expr::Var(x) => Ok(env
            .get(x)
            .and_then(|s| s.last().copied())
            .unwrap_or(Ty::Any)),
        Expr::BinOp(op, a, b) => {
            let operand = match op {
                Op::And => Ty::Bool,
                Op::Add | Op::Sub | Op::Div | Op::Geq => Ty::Int,
                Op::Eq => {
                    path.push("lhs");
                    let ta = check(env, a, path)?;
                    path.pop();
                    path.push("rhs");
                    let tb = check(env, b, path)?;
                    if unify(ta, tb).is_none() {
                        return Err(SortError {
                            path: path.clone(),
                            message: format!("operands of == must agree, found {ta} and {tb}"),
                        });
                    }
                    path.pop();
                    return Ok(Ty::Bool);
                }
            };
            let what = format!("operand of {}", op.symbol());
            expect(env, a, operand, path, "lhs", &what)?;
            expect(env, b, operand, path, "rhs", &what)?;
            Ok(match op {
                Op::Add | Op::Sub | Op::Div => Ty::Int,
                _ => Ty::Bool,
            })
        }
        Expr::Let(x, bound, body) => {
            path.push("let.bound");
            let tb = check(env, bound, path)?;
            path.pop();
            env.entry(x.clone()).or_default().push(tb);
            path.push("let.body");
            let r = check(env, body, path);
            env.get_mut(x).unwrap().pop();
            path.pop();
            r
        }
        Expr::If(c, t, f) => {
            expect(env, c, Ty::Bool, path, "if.guard", "guard")?;
            path.push("if.then");
            let tt = check(env, t, path)?;
            path.pop();
            path.push("if.else");
            let tf = check(env, f, path)?;
            path.pop();
            unify(tt, tf).ok_or_else(|| SortError {
                path: path.clone(),
                message: format!("branches of if must agree, found {tt} and {tf}"),
            })
        }
        Expr::Assert(a) => {
            expect(env, a, Ty::Bool, path, "assert", "assertion")?;
            Ok(Ty::Bool)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mixed_operands() {
        let e = Expr::bin(Op::And, Expr::int(1), Expr::bool(true));
        let err = sort_check(&e).unwrap_err();
        assert_eq!(err.path, vec!["lhs"]);
    }

    #[test]
    fn rejects_int_guard() {
        let e = Expr::if_then_else(Expr::int(0), Expr::int(1), Expr::int(2));
        assert!(sort_check(&e).is_err());
    }

    #[test]
    fn abs_program_is_well_sorted() {
        let abs = Expr::let_in(
            "y",
            Expr::NondetInt,
            Expr::let_in(
                "v",
                Expr::if_then_else(
                    Expr::bin(Op::Geq, Expr::int(0), Expr::var("y")),
                    Expr::bin(Op::Sub, Expr::int(0), Expr::var("y")),
                    Expr::var("y"),
                ),
                Expr::assert(Expr::bin(Op::Geq, Expr::var("v"), Expr::int(0))),
            ),
        );
        assert_eq!(sort_check(&abs), Ok(Ty::Bool));
    }

    #[test]
    fn shadowing_changes_sort() {
        let e = Expr::let_in(
            "x",
            Expr::int(1),
            Expr::let_in(
                "x",
                Expr::bool(true),
                Expr::bin(Op::And, Expr::var("x"), Expr::var("x")),
            ),
        );
        assert_eq!(sort_check(&e), Ok(Ty::Bool));
        let e = Expr::let_in(
            "x",
            Expr::let_in("x", Expr::bool(true), Expr::var("x")),
            Expr::bin(Op::Add, Expr::var("x"), Expr::int(1)),
        );
        assert!(sort_check(&e).is_err());
    }

    #[test]
    fn unbound_variables_are_deferred() {
        let e = Expr::bin(Op::Add, Expr::var("z"), Expr::int(1));
        assert_eq!(sort_check(&e), Ok(Ty::Int));
    }

    #[test]
    fn error_paths_are_reported() {
        let e = Expr::let_in(
            "x",
            Expr::int(1),
            Expr::if_then_else(Expr::var("x"), Expr::int(1), Expr::int(2)),
        );
        let err = sort_check(&e).unwrap_err();
        assert_eq!(
            err.to_string(),
            "sort error at let.body/if.guard: guard must be Bool, found Int"
        );
    }
}
