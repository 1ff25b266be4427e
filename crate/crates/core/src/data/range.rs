use crate::values::{Term, TermArena, ValueError};

/// The half-open integer interval `[lo, hi)`. Emptiness is a constraint,
/// not a structural property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Range {
    pub lo: Term,
    pub hi: Term,
}

impl Range {
    pub fn new(lo: Term, hi: Term) -> Self {
        Range { lo, hi }
    }

    /// `lo <= x < hi`.
    pub fn contains(&self, arena: &TermArena, x: &Term) -> Result<Term, ValueError> {
        let above = arena.leq(&self.lo, x)?;
        let below = arena.lt(x, &self.hi)?;
        arena.and(&above, &below)
    }

    /// Inclusion; an empty range is included in every range.
    pub fn is_subset(&self, arena: &TermArena, other: &Range) -> Result<Term, ValueError> {
        let lower = arena.leq(&other.lo, &self.lo)?;
        let upper = arena.leq(&self.hi, &other.hi)?;
        let within = arena.and(&lower, &upper)?;
        let empty = arena.geq(&self.lo, &self.hi)?;
        arena.or(&within, &empty)
    }
}
