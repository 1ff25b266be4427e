//! Smart constructors.

use num_bigint::BigInt;
use num_traits::{Euclid, One, Zero};

use super::{BinOp, Kind, Sort, Term, TermArena, ValueError};

/// Reduces `value` modulo `2^width` into `[0, 2^width)`.
pub(crate) fn wrap(width: u32, value: &BigInt) -> BigInt {
    let modulus = BigInt::one() << width;
    value.rem_euclid(&modulus)
}

/// Two's-complement reading of an unsigned bitvector value.
pub(crate) fn to_signed(width: u32, bits: &BigInt) -> BigInt {
    let half = BigInt::one() << (width - 1);
    if bits >= &half {
        bits - (BigInt::one() << width)
    } else {
        bits.clone()
    }
}

/// `bvsdiv` as defined by SMT-LIB, including division by zero.
pub(crate) fn bv_sdiv(width: u32, s: &BigInt, t: &BigInt) -> BigInt {
    let udiv = |a: &BigInt, b: &BigInt| -> BigInt {
        if b.is_zero() {
            (BigInt::one() << width) - 1
        } else {
            a / b
        }
    };
    let neg = |a: &BigInt| wrap(width, &-a);
    let half = BigInt::one() << (width - 1);
    let (msb_s, msb_t) = (s >= &half, t >= &half);
    match (msb_s, msb_t) {
        (false, false) => udiv(s, t),
        (true, false) => neg(&udiv(&neg(s), t)),
        (false, true) => neg(&udiv(s, &neg(t))),
        (true, true) => udiv(&neg(s), &neg(t)),
    }
}

/// Euclidean integer division, the semantics of SMT-LIB `div`.
/// `None` when the divisor is zero.
pub(crate) fn int_div(a: &BigInt, b: &BigInt) -> Option<BigInt> {
    if b.is_zero() {
        None
    } else {
        Some(a.div_euclid(b))
    }
}

impl TermArena {
    /// Builds `lhs op rhs`, simplified and with commutative operands in
    /// ascending node-id order.
    pub fn mk_binop(&self, op: BinOp, lhs: &Term, rhs: &Term) -> Result<Term, ValueError> {
        self.check_owned(lhs)?;
        self.check_owned(rhs)?;
        let result_sort = binop_sort(op, lhs.sort(), rhs.sort())?;
        let (a, b) = if op.is_commutative() && lhs.id() > rhs.id() {
            (rhs, lhs)
        } else {
            (lhs, rhs)
        };
        if let Some(t) = self.fold(op, a, b)? {
            return Ok(t);
        }
        if let Some(t) = self.rewrite(op, a, b)? {
            return Ok(t);
        }
        Ok(self.intern(Kind::BinOp(op, a.clone(), b.clone()), result_sort))
    }

    /// Boolean negation with double-negation elimination and folding.
    pub fn mk_not(&self, t: &Term) -> Result<Term, ValueError> {
        self.check_owned(t)?;
        if t.sort() != Sort::Bool {
            return Err(ValueError::ExpectedBool(t.sort()));
        }
        match t.kind() {
            Kind::Bool(b) => Ok(self.mk_bool(!b)),
            Kind::Not(inner) => Ok(inner.clone()),
            _ => Ok(self.intern(Kind::Not(t.clone()), Sort::Bool)),
        }
    }

    pub fn add(&self, a: &Term, b: &Term) -> Result<Term, ValueError> {
        self.mk_binop(BinOp::Add, a, b)
    }

    pub fn sub(&self, a: &Term, b: &Term) -> Result<Term, ValueError> {
        self.mk_binop(BinOp::Sub, a, b)
    }

    pub fn div(&self, a: &Term, b: &Term) -> Result<Term, ValueError> {
        self.mk_binop(BinOp::Div, a, b)
    }

    pub fn and(&self, a: &Term, b: &Term) -> Result<Term, ValueError> {
        self.mk_binop(BinOp::And, a, b)
    }

    pub fn or(&self, a: &Term, b: &Term) -> Result<Term, ValueError> {
        self.mk_binop(BinOp::Or, a, b)
    }

    pub fn eq(&self, a: &Term, b: &Term) -> Result<Term, ValueError> {
        self.mk_binop(BinOp::Eq, a, b)
    }

    pub fn geq(&self, a: &Term, b: &Term) -> Result<Term, ValueError> {
        self.mk_binop(BinOp::Geq, a, b)
    }

    /// `a <= b`, expressed as `b >= a`.
    pub fn leq(&self, a: &Term, b: &Term) -> Result<Term, ValueError> {
        self.mk_binop(BinOp::Geq, b, a)
    }

    /// `a < b`, expressed as `not (a >= b)`.
    pub fn lt(&self, a: &Term, b: &Term) -> Result<Term, ValueError> {
        let ge = self.mk_binop(BinOp::Geq, a, b)?;
        self.mk_not(&ge)
    }

    fn fold(&self, op: BinOp, a: &Term, b: &Term) -> Result<Option<Term>, ValueError> {
        let folded = match (a.kind(), b.kind()) {
            (Kind::Bool(x), Kind::Bool(y)) => match op {
                BinOp::And => self.mk_bool(*x && *y),
                BinOp::Or => self.mk_bool(*x || *y),
                BinOp::Eq => self.mk_bool(x == y),
                _ => unreachable!("sort-checked"),
            },
            (Kind::Int(x), Kind::Int(y)) => match op {
                BinOp::Add => self.mk_int(x + y),
                BinOp::Sub => self.mk_int(x - y),
                BinOp::Div => match int_div(x, y) {
                    Some(q) => self.mk_int(q),
                    // Unspecified: keep the node.
                    None => return Ok(None),
                },
                BinOp::Eq => self.mk_bool(x == y),
                BinOp::Geq => self.mk_bool(x >= y),
                _ => unreachable!("sort-checked"),
            },
            (Kind::BitVec { width, bits: x }, Kind::BitVec { bits: y, .. }) => {
                let w = *width;
                match op {
                    BinOp::Add => self.mk_bv(w, wrap(w, &(x + y)))?,
                    BinOp::Sub => self.mk_bv(w, wrap(w, &(x - y)))?,
                    BinOp::Div => self.mk_bv(w, bv_sdiv(w, x, y))?,
                    BinOp::Eq => self.mk_bool(x == y),
                    BinOp::Geq => self.mk_bool(to_signed(w, x) >= to_signed(w, y)),
                    _ => unreachable!("sort-checked"),
                }
            }
            _ => return Ok(None),
        };
        Ok(Some(folded))
    }

    fn rewrite(&self, op: BinOp, a: &Term, b: &Term) -> Result<Option<Term>, ValueError> {
        let out = match op {
            BinOp::Add => {
                if is_zero(a) {
                    Some(b.clone())
                } else if is_zero(b) {
                    Some(a.clone())
                } else {
                    self.reassociate_add(a, b)?
                }
            }
            BinOp::Sub => {
                if is_zero(b) {
                    Some(a.clone())
                } else if a == b {
                    Some(self.zero(a.sort())?)
                } else {
                    None
                }
            }
            BinOp::Div => {
                if is_one(b) {
                    Some(a.clone())
                } else {
                    None
                }
            }
            BinOp::And => match (a.as_bool(), b.as_bool()) {
                (Some(true), _) => Some(b.clone()),
                (_, Some(true)) => Some(a.clone()),
                (Some(false), _) | (_, Some(false)) => Some(self.mk_bool(false)),
                _ if a == b => Some(a.clone()),
                _ if complementary(a, b) => Some(self.mk_bool(false)),
                _ => None,
            },
            BinOp::Or => match (a.as_bool(), b.as_bool()) {
                (Some(false), _) => Some(b.clone()),
                (_, Some(false)) => Some(a.clone()),
                (Some(true), _) | (_, Some(true)) => Some(self.mk_bool(true)),
                _ if a == b => Some(a.clone()),
                _ if complementary(a, b) => Some(self.mk_bool(true)),
                _ => None,
            },
            BinOp::Eq => {
                if a == b {
                    Some(self.mk_bool(true))
                } else {
                    match (a.as_bool(), b.as_bool()) {
                        (Some(true), _) => Some(b.clone()),
                        (_, Some(true)) => Some(a.clone()),
                        (Some(false), _) => Some(self.mk_not(b)?),
                        (_, Some(false)) => Some(self.mk_not(a)?),
                        _ => None,
                    }
                }
            }
            BinOp::Geq => {
                if a == b {
                    Some(self.mk_bool(true))
                } else {
                    None
                }
            }
        };
        Ok(out)
    }

    /// `(x + c1) + c2` becomes `x + (c1 + c2)`.
    fn reassociate_add(&self, a: &Term, b: &Term) -> Result<Option<Term>, ValueError> {
        let (c, other) = match (a.is_const(), b.is_const()) {
            (true, false) => (a, b),
            (false, true) => (b, a),
            _ => return Ok(None),
        };
        if let Kind::BinOp(BinOp::Add, p, q) = other.kind() {
            let (c1, x) = match (p.is_const(), q.is_const()) {
                (true, false) => (p, q),
                (false, true) => (q, p),
                _ => return Ok(None),
            };
            let sum = self.mk_binop(BinOp::Add, c, c1)?;
            return self.mk_binop(BinOp::Add, x, &sum).map(Some);
        }
        Ok(None)
    }
}

fn binop_sort(op: BinOp, lhs: Sort, rhs: Sort) -> Result<Sort, ValueError> {
    let mismatch = || ValueError::SortMismatch { op, lhs, rhs };
    match op {
        BinOp::And | BinOp::Or => {
            if lhs == Sort::Bool && rhs == Sort::Bool {
                Ok(Sort::Bool)
            } else {
                Err(mismatch())
            }
        }
        BinOp::Add | BinOp::Sub | BinOp::Div => {
            if lhs == rhs && lhs.is_numeric() {
                Ok(lhs)
            } else {
                Err(mismatch())
            }
        }
        BinOp::Geq => {
            if lhs == rhs && lhs.is_numeric() {
                Ok(Sort::Bool)
            } else {
                Err(mismatch())
            }
        }
        BinOp::Eq => {
            if lhs == rhs {
                Ok(Sort::Bool)
            } else {
                Err(mismatch())
            }
        }
    }
}

fn is_zero(t: &Term) -> bool {
    match t.kind() {
        Kind::Int(z) => z.is_zero(),
        Kind::BitVec { bits, .. } => bits.is_zero(),
        _ => false,
    }
}

fn is_one(t: &Term) -> bool {
    match t.kind() {
        Kind::Int(z) => z.is_one(),
        Kind::BitVec { bits, .. } => bits.is_one(),
        _ => false,
    }
}

fn complementary(a: &Term, b: &Term) -> bool {
    matches!(a.kind(), Kind::Not(x) if x == b) || matches!(b.kind(), Kind::Not(x) if x == a)
}
