//! Interval and equality analyses over the constraints of one path.
//!
//! Both use persistent maps so a checkpoint is a cheap clone.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::values::{BinOp, Kind, Sort, Term, TermArena, VarId};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Interval {
    lo: Option<BigInt>,
    hi: Option<BigInt>,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Analysis {
    intervals: im::HashMap<VarId, Interval>,
    /// Union-find parent links; roots are absent.
    parent: im::HashMap<Term, Term>,
    /// Constraints and their top-level conjuncts.
    facts: im::HashSet<Term>,
    pub contradiction: bool,
}

/// Signed value of a numeric constant.
fn numeral(t: &Term) -> Option<BigInt> {
    match t.kind() {
        Kind::Int(z) => Some(z.clone()),
        Kind::BitVec { width, bits } => {
            let half = BigInt::one() << (width - 1);
            Some(if bits >= &half {
                bits - (BigInt::one() << *width)
            } else {
                bits.clone()
            })
        }
        _ => None,
    }
}

fn numeric_var(t: &Term) -> Option<(VarId, Sort)> {
    match t.kind() {
        Kind::Var(v, s) if s.is_numeric() => Some((*v, *s)),
        _ => None,
    }
}

/// Implicit bounds of a sort.
fn domain(sort: Sort) -> Interval {
    match sort {
        Sort::BitVec(w) => {
            let half = BigInt::one() << (w - 1);
            Interval {
                lo: Some(-half.clone()),
                hi: Some(half - 1),
            }
        }
        _ => Interval::default(),
    }
}

/// A single-variable bound: `x >= k`, `k >= x`, their negations, `x = k`,
/// or a boolean variable or its negation. The interval analysis decides
/// conjunctions of these exactly.
pub(crate) fn is_bound_shaped(c: &Term) -> bool {
    let var_const = |a: &Term, b: &Term| {
        (numeric_var(a).is_some() && b.is_const()) || (a.is_const() && numeric_var(b).is_some())
    };
    match c.kind() {
        Kind::Var(_, Sort::Bool) => true,
        Kind::BinOp(BinOp::Geq | BinOp::Eq, a, b) => var_const(a, b),
        Kind::Not(u) => match u.kind() {
            Kind::Var(_, Sort::Bool) => true,
            Kind::BinOp(BinOp::Geq, a, b) => var_const(a, b),
            _ => false,
        },
        _ => false,
    }
}

impl Analysis {
    pub fn bounds(&self, v: VarId, sort: Sort) -> (Option<BigInt>, Option<BigInt>) {
        let d = domain(sort);
        let iv = self.intervals.get(&v).cloned().unwrap_or_default();
        let lo = match (iv.lo, d.lo) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let hi = match (iv.hi, d.hi) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        (lo, hi)
    }

    fn refine(&mut self, v: VarId, sort: Sort, lo: Option<BigInt>, hi: Option<BigInt>) {
        let mut iv = self.intervals.get(&v).cloned().unwrap_or_default();
        if let Some(l) = lo {
            if iv.lo.as_ref().is_none_or(|cur| &l > cur) {
                iv.lo = Some(l);
            }
        }
        if let Some(h) = hi {
            if iv.hi.as_ref().is_none_or(|cur| &h < cur) {
                iv.hi = Some(h);
            }
        }
        self.intervals.insert(v, iv);
        if let (Some(l), Some(h)) = self.bounds(v, sort) {
            if l > h {
                self.contradiction = true;
            }
        }
    }

    pub fn is_fact(&self, t: &Term) -> bool {
        self.facts.contains(t)
    }

    /// Records a constraint already known not to be a constant.
    pub fn learn(&mut self, c: &Term) {
        self.facts.insert(c.clone());
        match c.kind() {
            Kind::BinOp(BinOp::And, a, b) => {
                self.learn(a);
                self.learn(b);
            }
            Kind::BinOp(BinOp::Geq, a, b) => {
                if let (Some((v, s)), Some(k)) = (numeric_var(a), numeral(b)) {
                    self.refine(v, s, Some(k), None);
                } else if let (Some(k), Some((v, s))) = (numeral(a), numeric_var(b)) {
                    self.refine(v, s, None, Some(k));
                }
            }
            Kind::BinOp(BinOp::Eq, a, b) => {
                self.union(a, b);
                let pin = match (numeric_var(a), numeral(b), numeral(a), numeric_var(b)) {
                    (Some(vs), Some(k), _, _) | (_, _, Some(k), Some(vs)) => Some((vs, k)),
                    _ => None,
                };
                if let Some(((v, s), k)) = pin {
                    self.refine(v, s, Some(k.clone()), Some(k));
                }
            }
            Kind::Not(u) => match u.kind() {
                Kind::BinOp(BinOp::Geq, a, b) => {
                    // a < b
                    if let (Some((v, s)), Some(k)) = (numeric_var(a), numeral(b)) {
                        self.refine(v, s, None, Some(k - 1));
                    } else if let (Some(k), Some((v, s))) = (numeral(a), numeric_var(b)) {
                        self.refine(v, s, Some(k + 1), None);
                    }
                }
                Kind::BinOp(BinOp::Eq, a, b) => {
                    let punct = match (numeric_var(a), numeral(b), numeral(a), numeric_var(b)) {
                        (Some(vs), Some(k), _, _) | (_, _, Some(k), Some(vs)) => Some((vs, k)),
                        _ => None,
                    };
                    if let Some(((v, s), k)) = punct {
                        let (lo, hi) = self.bounds(v, s);
                        if lo.as_ref() == Some(&k) {
                            self.refine(v, s, Some(k.clone() + 1), None);
                        } else if hi.as_ref() == Some(&k) {
                            self.refine(v, s, None, Some(k - 1));
                        }
                    }
                    if self.find(a) == self.find(b) {
                        self.contradiction = true;
                    }
                }
                _ => {}
            },
            _ => {}
        }
    }

    pub fn find(&self, t: &Term) -> Term {
        let mut cur = t.clone();
        while let Some(p) = self.parent.get(&cur) {
            cur = p.clone();
        }
        cur
    }

    fn union(&mut self, a: &Term, b: &Term) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if ra.is_const() && rb.is_const() {
            self.contradiction = true;
            return;
        }
        let key = |t: &Term| (t.cost(), t.id());
        let (rep, other) = if key(&ra) <= key(&rb) {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent.insert(other, rep);
    }

    /// Rewrites `t` using the facts, the equality classes and the intervals.
    pub fn simplify(&self, arena: &TermArena, t: &Term) -> Term {
        let mut memo = HashMap::new();
        self.simp(arena, t, &mut memo)
    }

    fn simp(&self, arena: &TermArena, t: &Term, memo: &mut HashMap<Term, Term>) -> Term {
        if t.is_const() {
            return t.clone();
        }
        if let Some(r) = memo.get(t) {
            return r.clone();
        }
        let out = self.simp_uncached(arena, t, memo);
        memo.insert(t.clone(), out.clone());
        out
    }

    fn polarity(&self, arena: &TermArena, t: &Term) -> Option<bool> {
        if t.sort() != Sort::Bool {
            return None;
        }
        if self.facts.contains(t) {
            return Some(true);
        }
        if let Kind::Not(u) = t.kind() {
            if self.facts.contains(u) {
                return Some(false);
            }
        }
        match arena.lookup(&Kind::Not(t.clone())) {
            Some(n) if self.facts.contains(&n) => Some(false),
            _ => None,
        }
    }

    fn simp_uncached(&self, arena: &TermArena, t: &Term, memo: &mut HashMap<Term, Term>) -> Term {
        if let Some(b) = self.polarity(arena, t) {
            return arena.mk_bool(b);
        }
        let rep = self.find(t);
        if rep != *t {
            if rep.is_const() {
                return rep;
            }
            return self.simp(arena, &rep, memo);
        }
        let rebuilt = match t.kind() {
            Kind::Var(v, s) if s.is_numeric() => {
                if let (Some(lo), Some(hi)) = self.bounds(*v, *s) {
                    if lo == hi {
                        return constant(arena, *s, lo);
                    }
                }
                return t.clone();
            }
            Kind::Not(a) => {
                let sa = self.simp(arena, a, memo);
                arena.mk_not(&sa).expect("sort preserved")
            }
            Kind::BinOp(op, a, b) => {
                let (sa, sb) = (self.simp(arena, a, memo), self.simp(arena, b, memo));
                arena.mk_binop(*op, &sa, &sb).expect("sort preserved")
            }
            _ => t.clone(),
        };
        if rebuilt.is_const() {
            return rebuilt;
        }
        if let Some(b) = self.polarity(arena, &rebuilt) {
            return arena.mk_bool(b);
        }
        self.fold_bounds(arena, &rebuilt).unwrap_or(rebuilt)
    }

    /// Decides comparisons between a variable and a constant from bounds.
    fn fold_bounds(&self, arena: &TermArena, t: &Term) -> Option<Term> {
        let decide = |c: &Term| -> Option<bool> {
            match c.kind() {
                Kind::BinOp(BinOp::Geq, a, b) => {
                    if let (Some((v, s)), Some(k)) = (numeric_var(a), numeral(b)) {
                        let (lo, hi) = self.bounds(v, s);
                        if lo.is_some_and(|l| l >= k) {
                            return Some(true);
                        }
                        if hi.is_some_and(|h| h < k) {
                            return Some(false);
                        }
                    } else if let (Some(k), Some((v, s))) = (numeral(a), numeric_var(b)) {
                        let (lo, hi) = self.bounds(v, s);
                        if hi.is_some_and(|h| k >= h) {
                            return Some(true);
                        }
                        if lo.is_some_and(|l| l > k) {
                            return Some(false);
                        }
                    }
                    None
                }
                Kind::BinOp(BinOp::Eq, a, b) => {
                    let (vs, k) = match (numeric_var(a), numeral(b), numeral(a), numeric_var(b)) {
                        (Some(vs), Some(k), _, _) | (_, _, Some(k), Some(vs)) => (vs, k),
                        _ => return None,
                    };
                    let (lo, hi) = self.bounds(vs.0, vs.1);
                    if lo.as_ref().is_some_and(|l| &k < l) || hi.as_ref().is_some_and(|h| &k > h) {
                        return Some(false);
                    }
                    None
                }
                _ => None,
            }
        };
        let verdict = match t.kind() {
            Kind::Not(u) => decide(u).map(|b| !b),
            _ => decide(t),
        };
        verdict.map(|b| arena.mk_bool(b))
    }
}

fn constant(arena: &TermArena, sort: Sort, k: BigInt) -> Term {
    match sort {
        Sort::Int => arena.mk_int(k),
        Sort::BitVec(w) => arena.mk_bv_wrapping(w, k).expect("valid width"),
        Sort::Bool => unreachable!("numeric sorts only"),
    }
}
