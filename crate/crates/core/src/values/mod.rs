//! Hash-consed symbolic values.
//!
//! Every [`Term`] lives in a [`TermArena`]. The arena interns nodes so that
//! two structurally identical terms share one node id, and all construction
//! goes through smart constructors that fold constants and apply a small set
//! of local rewrites. As a consequence, terms that are not in normal form can
//! never be observed.

mod build;
mod eval;
mod smtlib;

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::rc::Rc;
use std::sync::atomic::{AtomicU32, Ordering};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use eval::{EvalError, Ground, Interpretation};
pub(crate) use smtlib::from_sexp as smtlib_from_sexp;
pub use smtlib::{parse_term, ParseTermError};

/// The sort of a symbolic value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sort {
    Bool,
    /// Unbounded signed integers.
    Int,
    /// Fixed-width two's-complement bitvectors.
    BitVec(u32),
}

impl Sort {
    pub fn is_numeric(self) -> bool {
        matches!(self, Sort::Int | Sort::BitVec(_))
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Bool => write!(f, "Bool"),
            Sort::Int => write!(f, "Int"),
            Sort::BitVec(w) => write!(f, "(_ BitVec {w})"),
        }
    }
}

/// Identifier of a symbolic variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarId(pub u32);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    And,
    Or,
    Div,
    Eq,
    Geq,
}

impl BinOp {
    pub fn is_commutative(self) -> bool {
        matches!(self, BinOp::Add | BinOp::And | BinOp::Or | BinOp::Eq)
    }
}

/// The shape of a node. Children are interned terms, so hashing and
/// equality are shallow.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Kind {
    Var(VarId, Sort),
    Bool(bool),
    Int(BigInt),
    /// `bits` is the unsigned value, always in `[0, 2^width)`.
    BitVec {
        width: u32,
        bits: BigInt,
    },
    Not(Term),
    BinOp(BinOp, Term, Term),
}

#[derive(Debug)]
struct Node {
    id: u32,
    arena: u32,
    kind: Kind,
    sort: Sort,
    cost: u32,
    free_vars: Rc<[VarId]>,
}

/// An interned symbolic value. Cloning is cheap; equality and hashing use
/// the node id.
#[derive(Clone)]
pub struct Term(Rc<Node>);

impl Term {
    pub fn id(&self) -> u32 {
        self.0.id
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    pub fn sort(&self) -> Sort {
        self.0.sort
    }

    /// Constants cost 0, variables 1, and composite terms one more than the
    /// sum of their children.
    pub fn cost(&self) -> u32 {
        self.0.cost
    }

    /// Variables occurring in the term, sorted and deduplicated.
    pub fn free_vars(&self) -> &[VarId] {
        &self.0.free_vars
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self.kind() {
            Kind::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self.kind() {
            Kind::Int(z) => Some(z),
            _ => None,
        }
    }

    pub fn as_var(&self) -> Option<VarId> {
        match self.kind() {
            Kind::Var(v, _) => Some(*v),
            _ => None,
        }
    }

    pub fn is_const(&self) -> bool {
        matches!(
            self.kind(),
            Kind::Bool(_) | Kind::Int(_) | Kind::BitVec { .. }
        )
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id && self.0.arena == other.0.arena
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.id.hash(state);
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.id.cmp(&other.0.id)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}:{}", self.id(), self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("variable {var} already has sort {existing}, cannot reuse it at sort {requested}")]
    SortConflict {
        var: VarId,
        existing: Sort,
        requested: Sort,
    },
    #[error("bitvector width must be positive")]
    ZeroWidth,
    #[error("bitvector literal {bits} does not fit in {width} bits")]
    BitsExceedWidth { width: u32, bits: BigInt },
    #[error("operator {op:?} cannot be applied to {lhs} and {rhs}")]
    SortMismatch { op: BinOp, lhs: Sort, rhs: Sort },
    #[error("expected a Bool term, found {0}")]
    ExpectedBool(Sort),
    #[error("term belongs to a different arena")]
    ForeignTerm,
}

static NEXT_ARENA: AtomicU32 = AtomicU32::new(0);

/// Interning table for terms. One arena per engine instance.
pub struct TermArena {
    id: u32,
    table: RefCell<HashMap<Kind, Term>>,
    next_node: Cell<u32>,
    var_sorts: RefCell<HashMap<VarId, Sort>>,
}

impl Default for TermArena {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Debug for TermArena {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TermArena")
            .field("id", &self.id)
            .field("nodes", &self.len())
            .finish()
    }
}

impl TermArena {
    pub fn new() -> Self {
        TermArena {
            id: NEXT_ARENA.fetch_add(1, Ordering::Relaxed),
            table: RefCell::new(HashMap::new()),
            next_node: Cell::new(0),
            var_sorts: RefCell::new(HashMap::new()),
        }
    }

    /// Number of distinct nodes interned so far.
    pub fn len(&self) -> usize {
        self.table.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub(crate) fn owns(&self, t: &Term) -> bool {
        t.0.arena == self.id
    }

    fn check_owned(&self, t: &Term) -> Result<(), ValueError> {
        if self.owns(t) {
            Ok(())
        } else {
            Err(ValueError::ForeignTerm)
        }
    }

    fn intern(&self, kind: Kind, sort: Sort) -> Term {
        if let Some(t) = self.table.borrow().get(&kind) {
            return t.clone();
        }
        let (cost, free_vars): (u32, Rc<[VarId]>) = match &kind {
            Kind::Var(v, _) => (1, Rc::from(vec![*v])),
            Kind::Bool(_) | Kind::Int(_) | Kind::BitVec { .. } => (0, Rc::from(Vec::new())),
            Kind::Not(a) => (1 + a.cost(), a.0.free_vars.clone()),
            Kind::BinOp(_, a, b) => {
                let fv = if b.free_vars().is_empty() {
                    a.0.free_vars.clone()
                } else if a.free_vars().is_empty() {
                    b.0.free_vars.clone()
                } else {
                    let mut all: Vec<VarId> =
                        a.free_vars().iter().chain(b.free_vars()).copied().collect();
                    all.sort_unstable();
                    all.dedup();
                    Rc::from(all)
                };
                (1 + a.cost() + b.cost(), fv)
            }
        };
        let id = self.next_node.get();
        self.next_node.set(id + 1);
        let term = Term(Rc::new(Node {
            id,
            arena: self.id,
            kind: kind.clone(),
            sort,
            cost,
            free_vars,
        }));
        self.table.borrow_mut().insert(kind, term.clone());
        term
    }

    /// Creates (or retrieves) the variable `id` at `sort`.
    pub fn mk_var(&self, id: VarId, sort: Sort) -> Result<Term, ValueError> {
        validate_sort(sort)?;
        {
            let mut sorts = self.var_sorts.borrow_mut();
            match sorts.get(&id) {
                Some(&existing) if existing != sort => {
                    return Err(ValueError::SortConflict {
                        var: id,
                        existing,
                        requested: sort,
                    })
                }
                Some(_) => {}
                None => {
                    sorts.insert(id, sort);
                }
            }
        }
        Ok(self.intern(Kind::Var(id, sort), sort))
    }

    /// Sort registered for `id`, if the variable is live.
    pub fn var_sort(&self, id: VarId) -> Option<Sort> {
        self.var_sorts.borrow().get(&id).copied()
    }

    /// Releases the sort binding of every variable with id `>= from`.
    ///
    /// Solvers call this when backtracking rewinds their variable counter, so
    /// a sibling path may reuse an id at another sort. Nodes already interned
    /// stay valid: the sort is part of the node shape.
    pub fn release_vars_from(&self, from: u32) {
        self.var_sorts.borrow_mut().retain(|v, _| v.0 < from);
    }

    pub fn mk_bool(&self, b: bool) -> Term {
        self.intern(Kind::Bool(b), Sort::Bool)
    }

    pub fn mk_int(&self, z: impl Into<BigInt>) -> Term {
        self.intern(Kind::Int(z.into()), Sort::Int)
    }

    /// Bitvector literal from its unsigned value.
    pub fn mk_bv(&self, width: u32, bits: impl Into<BigInt>) -> Result<Term, ValueError> {
        let bits = bits.into();
        validate_sort(Sort::BitVec(width))?;
        if bits < BigInt::from(0) || bits >= (BigInt::from(1) << width) {
            return Err(ValueError::BitsExceedWidth { width, bits });
        }
        Ok(self.intern(Kind::BitVec { width, bits }, Sort::BitVec(width)))
    }

    /// Bitvector literal from a signed value, wrapped modulo `2^width`.
    pub fn mk_bv_wrapping(&self, width: u32, value: impl Into<BigInt>) -> Result<Term, ValueError> {
        validate_sort(Sort::BitVec(width))?;
        let bits = build::wrap(width, &value.into());
        self.mk_bv(width, bits)
    }

    pub fn mk_const(&self, g: &Ground) -> Result<Term, ValueError> {
        match g {
            Ground::Bool(b) => Ok(self.mk_bool(*b)),
            Ground::Int(z) => Ok(self.mk_int(z.clone())),
            Ground::BitVec { width, bits } => self.mk_bv(*width, bits.clone()),
        }
    }

    /// Zero of a numeric sort.
    pub fn zero(&self, sort: Sort) -> Result<Term, ValueError> {
        match sort {
            Sort::Int => Ok(self.mk_int(0)),
            Sort::BitVec(w) => self.mk_bv(w, 0),
            Sort::Bool => Err(ValueError::SortMismatch {
                op: BinOp::Add,
                lhs: sort,
                rhs: sort,
            }),
        }
    }

    /// Looks up an already-interned node without creating it.
    pub fn lookup(&self, kind: &Kind) -> Option<Term> {
        self.table.borrow().get(kind).cloned()
    }
}

fn validate_sort(sort: Sort) -> Result<(), ValueError> {
    match sort {
        Sort::BitVec(0) => Err(ValueError::ZeroWidth),
        _ => Ok(()),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        smtlib::write_term(self, f)
    }
}

#[cfg(test)]
mod tests;
