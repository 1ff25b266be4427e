use std::collections::BTreeSet;
use std::rc::Rc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::values::Ground;

use super::{Expr, Op, Outcome, SimpError};

type Env = im::HashMap<Rc<str>, Ground>;

/// Every outcome of `e` when each `nondet` ranges over `domain`.
pub fn eval_concrete_all(e: &Expr, domain: &[BigInt]) -> BTreeSet<Outcome> {
    go(&Env::new(), e, domain)
}

fn go(env: &Env, e: &Expr, dom: &[BigInt]) -> BTreeSet<Outcome> {
    match e {
        Expr::Const(c) => BTreeSet::from([Ok(c.to_ground())]),
        Expr::Var(x) => BTreeSet::from([env
            .get(x.as_str())
            .cloned()
            .ok_or_else(|| SimpError::UnboundVariable(x.clone()))]),
        Expr::NondetInt => dom.iter().map(|z| Ok(Ground::Int(z.clone()))).collect(),
        Expr::BinOp(op, a, b) => {
            let mut out = BTreeSet::new();
            for va in go(env, a, dom) {
                let va = match va {
                    Ok(v) => v,
                    Err(err) => {
                        out.insert(Err(err));
                        continue;
                    }
                };
                for vb in go(env, b, dom) {
                    out.insert(vb.and_then(|vb| apply(*op, &va, &vb)));
                }
            }
            out
        }
        Expr::Let(x, bound, body) => {
            let mut out = BTreeSet::new();
            for v in go(env, bound, dom) {
                match v {
                    Ok(v) => out.extend(go(&env.update(Rc::from(x.as_str()), v), body, dom)),
                    Err(err) => {
                        out.insert(Err(err));
                    }
                }
            }
            out
        }
        Expr::If(c, t, f) => {
            let mut out = BTreeSet::new();
            for g in go(env, c, dom) {
                match g {
                    Ok(Ground::Bool(true)) => out.extend(go(env, t, dom)),
                    Ok(Ground::Bool(false)) => out.extend(go(env, f, dom)),
                    Ok(other) => {
                        out.insert(Err(SimpError::SortError(format!(
                            "guard evaluated to {other}"
                        ))));
                    }
                    Err(err) => {
                        out.insert(Err(err));
                    }
                }
            }
            out
        }
        Expr::Assert(a) => go(env, a, dom)
            .into_iter()
            .map(|v| match v {
                Ok(Ground::Bool(true)) => Ok(Ground::Bool(true)),
                Ok(Ground::Bool(false)) => Err(SimpError::AssertError),
                Ok(other) => Err(SimpError::SortError(format!(
                    "assertion evaluated to {other}"
                ))),
                Err(err) => Err(err),
            })
            .collect(),
    }
}

fn apply(op: Op, a: &Ground, b: &Ground) -> Outcome {
    let ill = || SimpError::SortError(format!("{} applied to {a} and {b}", op.symbol()));
    match (op, a, b) {
        (Op::Add, Ground::Int(x), Ground::Int(y)) => Ok(Ground::Int(x + y)),
        (Op::Sub, Ground::Int(x), Ground::Int(y)) => Ok(Ground::Int(x - y)),
        (Op::Div, Ground::Int(_), Ground::Int(y)) if y.is_zero() => Err(SimpError::DivisionByZero),
        (Op::Div, Ground::Int(x), Ground::Int(y)) => {
            Ok(Ground::Int(num_traits::Euclid::div_euclid(x, y)))
        }
        (Op::Geq, Ground::Int(x), Ground::Int(y)) => Ok(Ground::Bool(x >= y)),
        (Op::And, Ground::Bool(x), Ground::Bool(y)) => Ok(Ground::Bool(*x && *y)),
        (Op::Eq, x, y) if x.sort() == y.sort() => Ok(Ground::Bool(x == y)),
        _ => Err(ill()),
    }
}
