use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::build::{bv_sdiv, int_div, to_signed, wrap};
use super::{BinOp, Kind, Sort, Term, VarId};

/// A concrete value of some sort.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ground {
    Bool(bool),
    Int(BigInt),
    BitVec { width: u32, bits: BigInt },
}

impl Ground {
    pub fn sort(&self) -> Sort {
        match self {
            Ground::Bool(_) => Sort::Bool,
            Ground::Int(_) => Sort::Int,
            Ground::BitVec { width, .. } => Sort::BitVec(*width),
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Ground::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Ground::Int(z) => Some(z),
            _ => None,
        }
    }

    /// The default witness used for variables a model leaves unconstrained.
    pub fn default_of(sort: Sort) -> Ground {
        match sort {
            Sort::Bool => Ground::Bool(false),
            Sort::Int => Ground::Int(BigInt::from(0)),
            Sort::BitVec(width) => Ground::BitVec {
                width,
                bits: BigInt::from(0),
            },
        }
    }
}

impl fmt::Display for Ground {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ground::Bool(b) => write!(f, "{b}"),
            Ground::Int(z) => write!(f, "{z}"),
            Ground::BitVec { width, bits } => write!(f, "(_ bv{bits} {width})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable {0} is not bound by the interpretation")]
    Unbound(VarId),
    /// The result depends on an integer division by zero, which the solver
    /// leaves unspecified.
    #[error("value is unspecified (integer division by zero)")]
    Unspecified,
    #[error("interpretation binds {var} to a value of sort {found}, expected {expected}")]
    IllSorted {
        var: VarId,
        expected: Sort,
        found: Sort,
    },
}

/// A well-sorted partial assignment of variables to ground values.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interpretation {
    bindings: BTreeMap<VarId, Ground>,
}

impl Interpretation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: VarId) -> Option<&Ground> {
        self.bindings.get(&v)
    }

    pub fn insert(&mut self, v: VarId, g: Ground) {
        self.bindings.insert(v, g);
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.bindings.contains_key(&v)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarId, &Ground)> {
        self.bindings.iter()
    }

    /// True when `self` agrees with `other` wherever `other` is defined.
    pub fn extends(&self, other: &Interpretation) -> bool {
        other
            .bindings
            .iter()
            .all(|(v, g)| self.bindings.get(v) == Some(g))
    }
}

impl FromIterator<(VarId, Ground)> for Interpretation {
    fn from_iter<T: IntoIterator<Item = (VarId, Ground)>>(iter: T) -> Self {
        Interpretation {
            bindings: iter.into_iter().collect(),
        }
    }
}

impl Term {
    /// The value of a constant term.
    pub fn as_ground(&self) -> Option<Ground> {
        match self.kind() {
            Kind::Bool(b) => Some(Ground::Bool(*b)),
            Kind::Int(z) => Some(Ground::Int(z.clone())),
            Kind::BitVec { width, bits } => Some(Ground::BitVec {
                width: *width,
                bits: bits.clone(),
            }),
            _ => None,
        }
    }

    /// Evaluates the term under `env`. Integer division uses Euclidean
    /// semantics; division by zero yields [`EvalError::Unspecified`].
    pub fn eval_ground(&self, env: &Interpretation) -> Result<Ground, EvalError> {
        match self.kind() {
            Kind::Var(v, sort) => {
                let g = env.get(*v).ok_or(EvalError::Unbound(*v))?;
                if g.sort() != *sort {
                    return Err(EvalError::IllSorted {
                        var: *v,
                        expected: *sort,
                        found: g.sort(),
                    });
                }
                Ok(g.clone())
            }
            Kind::Bool(b) => Ok(Ground::Bool(*b)),
            Kind::Int(z) => Ok(Ground::Int(z.clone())),
            Kind::BitVec { width, bits } => Ok(Ground::BitVec {
                width: *width,
                bits: bits.clone(),
            }),
            Kind::Not(a) => match a.eval_ground(env)? {
                Ground::Bool(b) => Ok(Ground::Bool(!b)),
                _ => unreachable!("sort-checked"),
            },
            Kind::BinOp(op, a, b) => eval_binop(*op, a, b, env),
        }
    }
}

fn eval_binop(op: BinOp, a: &Term, b: &Term, env: &Interpretation) -> Result<Ground, EvalError> {
    // Connectives are decided by either side when possible, so a determining
    // operand masks an unspecified one.
    if matches!(op, BinOp::And | BinOp::Or) {
        let absorbing = op == BinOp::Or;
        let lhs = a.eval_ground(env);
        if let Ok(Ground::Bool(x)) = lhs {
            if x == absorbing {
                return Ok(Ground::Bool(absorbing));
            }
        }
        let rhs = b.eval_ground(env)?;
        if rhs == Ground::Bool(absorbing) {
            return Ok(rhs);
        }
        return lhs.map(|_| rhs);
    }
    let x = a.eval_ground(env)?;
    let y = b.eval_ground(env)?;
    let out = match (x, y) {
        (Ground::Int(x), Ground::Int(y)) => match op {
            BinOp::Add => Ground::Int(x + y),
            BinOp::Sub => Ground::Int(x - y),
            BinOp::Div => Ground::Int(int_div(&x, &y).ok_or(EvalError::Unspecified)?),
            BinOp::Eq => Ground::Bool(x == y),
            BinOp::Geq => Ground::Bool(x >= y),
            _ => unreachable!("sort-checked"),
        },
        (Ground::BitVec { width, bits: x }, Ground::BitVec { bits: y, .. }) => match op {
            BinOp::Add => Ground::BitVec {
                width,
                bits: wrap(width, &(x + y)),
            },
            BinOp::Sub => Ground::BitVec {
                width,
                bits: wrap(width, &(x - y)),
            },
            BinOp::Div => Ground::BitVec {
                width,
                bits: bv_sdiv(width, &x, &y),
            },
            BinOp::Eq => Ground::Bool(x == y),
            BinOp::Geq => Ground::Bool(to_signed(width, &x) >= to_signed(width, &y)),
            _ => unreachable!("sort-checked"),
        },
        (Ground::Bool(x), Ground::Bool(y)) => match op {
            BinOp::Eq => Ground::Bool(x == y),
            _ => unreachable!("sort-checked"),
        },
        _ => unreachable!("sort-checked"),
    };
    Ok(out)
}
