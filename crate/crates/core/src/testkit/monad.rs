//! Random computations for the monad laws.

use rand::Rng;

use crate::symex::{assume, branch_on, nondet, ret, vanish, Branch, Engine, Symex};
use crate::values::{Sort, Term, TermArena};

/// An integer built from the computation's input.
#[derive(Debug, Clone)]
pub enum ValE {
    Input,
    Const(i64),
    AddC(Box<ValE>, i64),
}

impl ValE {
    pub fn eval(&self, arena: &TermArena, x: &Term) -> Term {
        match self {
            ValE::Input => x.clone(),
            ValE::Const(c) => arena.mk_int(*c),
            ValE::AddC(v, c) => arena
                .add(&v.eval(arena, x), &arena.mk_int(*c))
                .expect("Int"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum GuardE {
    Geq(ValE, i64),
    Eq(ValE, i64),
}

impl GuardE {
    pub fn eval(&self, arena: &TermArena, x: &Term) -> Term {
        match self {
            GuardE::Geq(v, c) => arena
                .geq(&v.eval(arena, x), &arena.mk_int(*c))
                .expect("Int"),
            GuardE::Eq(v, c) => arena.eq(&v.eval(arena, x), &arena.mk_int(*c)).expect("Int"),
        }
    }
}

/// A computation from an integer input to integers.
#[derive(Debug, Clone)]
pub enum Comp {
    Ret(ValE),
    Nondet,
    Vanish,
    Assume(GuardE, Box<Comp>),
    BranchOn(GuardE, Box<Comp>, Box<Comp>),
    Branches(Vec<Comp>),
    Bind(Box<Comp>, Box<Comp>),
}

impl Comp {
    pub fn depth(&self) -> usize {
        match self {
            Comp::Ret(_) | Comp::Nondet | Comp::Vanish => 1,
            Comp::Assume(_, k) => 1 + k.depth(),
            Comp::BranchOn(_, a, b) | Comp::Bind(a, b) => 1 + a.depth().max(b.depth()),
            Comp::Branches(cs) => 1 + cs.iter().map(Comp::depth).max().unwrap_or(0),
        }
    }

    pub fn instantiate<'a>(&self, x: Term) -> Symex<'a, Term> {
        let c = self.clone();
        Symex::with_engine(move |e| {
            let arena = e.arena.clone();
            match c {
                Comp::Ret(v) => ret(v.eval(&arena, &x)),
                Comp::Nondet => nondet(Sort::Int),
                Comp::Vanish => vanish(),
                Comp::Assume(g, k) => {
                    assume(vec![g.eval(&arena, &x)]).bind(move |()| k.instantiate(x.clone()))
                }
                Comp::BranchOn(g, a, b) => {
                    let x2 = x.clone();
                    branch_on(
                        g.eval(&arena, &x),
                        move || a.instantiate(x),
                        move || b.instantiate(x2),
                    )
                }
                Comp::Branches(cs) => Symex::branches(
                    cs.into_iter()
                        .map(|c| {
                            let x = x.clone();
                            Box::new(move || c.instantiate(x))
                                as Box<dyn FnOnce() -> Symex<'a, Term> + 'a>
                        })
                        .collect(),
                ),
                Comp::Bind(m, f) => m.instantiate(x).bind(move |y| f.instantiate(y)),
            }
        })
    }
}

fn gen_val(rng: &mut impl Rng) -> ValE {
    match rng.gen_range(0..4) {
        0 => ValE::Const(rng.gen_range(-3..=3)),
        1 => ValE::AddC(Box::new(ValE::Input), rng.gen_range(-2..=2)),
        _ => ValE::Input,
    }
}

fn gen_guard(rng: &mut impl Rng) -> GuardE {
    let v = gen_val(rng);
    let c = rng.gen_range(-3..=3);
    if rng.gen_bool(0.6) {
        GuardE::Geq(v, c)
    } else {
        GuardE::Eq(v, c)
    }
}

/// A computation of depth at most `depth`.
pub fn gen_comp(rng: &mut impl Rng, depth: usize) -> Comp {
    if depth <= 1 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..10) {
            0 => Comp::Vanish,
            1..=3 => Comp::Nondet,
            _ => Comp::Ret(gen_val(rng)),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..4) {
        0 => Comp::Assume(gen_guard(rng), Box::new(gen_comp(rng, d))),
        1 => Comp::BranchOn(
            gen_guard(rng),
            Box::new(gen_comp(rng, d)),
            Box::new(gen_comp(rng, d)),
        ),
        2 => Comp::Branches(
            (0..rng.gen_range(1..=3))
                .map(|_| gen_comp(rng, d))
                .collect(),
        ),
        _ => Comp::Bind(Box::new(gen_comp(rng, d)), Box::new(gen_comp(rng, d))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    LeftIdentity,
    RightIdentity,
    Associativity,
}

impl Law {
    pub const ALL: [Law; 3] = [Law::LeftIdentity, Law::RightIdentity, Law::Associativity];
}

/// One instance of a law. Each side starts from a fresh symbolic input.
#[derive(Debug, Clone)]
pub struct LawCase {
    pub law: Law,
    pub a: ValE,
    pub m: Comp,
    pub f: Comp,
    pub g: Comp,
}

/// Components have depth at most 2, so each side nests at most 6 deep.
pub fn gen_law_case(rng: &mut impl Rng, law: Law) -> LawCase {
    LawCase {
        law,
        a: gen_val(rng),
        m: gen_comp(rng, 2),
        f: gen_comp(rng, 2),
        g: gen_comp(rng, 2),
    }
}

impl LawCase {
    pub fn lhs<'a>(&self) -> Symex<'a, Term> {
        let c = self.clone();
        nondet(Sort::Int).bind(move |x| {
            let c = c.clone();
            match c.law {
                Law::LeftIdentity => Symex::with_engine(move |e| {
                    let a = c.a.eval(&e.arena, &x);
                    ret(a).bind(move |y| c.f.instantiate(y))
                }),
                Law::RightIdentity => c.m.instantiate(x).bind(ret),
                Law::Associativity => {
                    let (f, g) = (c.f, c.g);
                    c.m.instantiate(x)
                        .bind(move |y| f.instantiate(y))
                        .bind(move |z| g.instantiate(z))
                }
            }
        })
    }

    pub fn rhs<'a>(&self) -> Symex<'a, Term> {
        let c = self.clone();
        nondet(Sort::Int).bind(move |x| {
            let c = c.clone();
            match c.law {
                Law::LeftIdentity => Symex::with_engine(move |e| {
                    let a = c.a.eval(&e.arena, &x);
                    c.f.instantiate(a)
                }),
                Law::RightIdentity => c.m.instantiate(x),
                Law::Associativity => {
                    let (f, g) = (c.f, c.g);
                    c.m.instantiate(x).bind(move |y| {
                        let g = g.clone();
                        f.instantiate(y).bind(move |z| g.instantiate(z))
                    })
                }
            }
        })
    }

    /// Runs both sides; `Err` describes the first difference.
    pub fn check(&self, engine: &mut Engine) -> Result<usize, String> {
        let l: Vec<Branch<Term>> = engine.run(self.lhs());
        let r: Vec<Branch<Term>> = engine.run(self.rhs());
        if l == r {
            Ok(l.len())
        } else {
            Err(format!(
                "{:?} differs: {} vs {} leaves in {self:?}",
                self.law,
                l.len(),
                r.len()
            ))
        }
    }
}
