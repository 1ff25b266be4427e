//! Random well-sorted SimpleLang programs.

use rand::Rng;

use crate::simplang::{Expr, Op, Ty};

struct Gen<'r, R: Rng> {
    rng: &'r mut R,
    nondets_left: usize,
    scope: Vec<(String, Ty)>,
}

const NAMES: [&str; 3] = ["x", "y", "z"];

impl<R: Rng> Gen<'_, R> {
    fn var_of(&mut self, ty: Ty) -> Option<Expr> {
        // Innermost binding of each name decides its sort.
        let visible: Vec<&String> = NAMES
            .iter()
            .filter_map(|n| self.scope.iter().rev().find(|(m, _)| m == n))
            .filter(|(_, t)| *t == ty)
            .map(|(n, _)| n)
            .collect();
        if visible.is_empty() {
            return None;
        }
        let i = self.rng.gen_range(0..visible.len());
        Some(Expr::Var(visible[i].clone()))
    }

    fn leaf(&mut self, ty: Ty) -> Expr {
        if self.rng.gen_bool(0.6) {
            if let Some(v) = self.var_of(ty) {
                return v;
            }
        }
        match ty {
            Ty::Int if self.nondets_left > 0 && self.rng.gen_bool(0.4) => {
                self.nondets_left -= 1;
                Expr::NondetInt
            }
            Ty::Bool => Expr::bool(self.rng.gen_bool(0.5)),
            _ => Expr::int(self.rng.gen_range(0..=6)),
        }
    }

    fn expr(&mut self, ty: Ty, depth: u32) -> Expr {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return self.leaf(ty);
        }
        let d = depth - 1;
        match self.rng.gen_range(0..10) {
            0 | 1 => {
                let name = NAMES[self.rng.gen_range(0..NAMES.len())].to_string();
                let bty = if self.rng.gen_bool(0.75) {
                    Ty::Int
                } else {
                    Ty::Bool
                };
                let bound = self.expr(bty, d);
                self.scope.push((name.clone(), bty));
                let body = self.expr(ty, d);
                self.scope.pop();
                Expr::Let(name, Box::new(bound), Box::new(body))
            }
            2 | 3 => Expr::if_then_else(self.expr(Ty::Bool, d), self.expr(ty, d), self.expr(ty, d)),
            _ => match ty {
                Ty::Int => {
                    let op = [Op::Add, Op::Sub, Op::Div][self.rng.gen_range(0..3)];
                    Expr::bin(op, self.expr(Ty::Int, d), self.expr(Ty::Int, d))
                }
                _ => match self.rng.gen_range(0..4) {
                    0 => Expr::bin(Op::And, self.expr(Ty::Bool, d), self.expr(Ty::Bool, d)),
                    1 => Expr::bin(Op::Eq, self.expr(Ty::Int, d), self.expr(Ty::Int, d)),
                    2 => Expr::assert(self.expr(Ty::Bool, d)),
                    _ => Expr::bin(Op::Geq, self.expr(Ty::Int, d), self.expr(Ty::Int, d)),
                },
            },
        }
    }
}

/// A closed, well-sorted program with at most `max_nondets` `nondet`s.
pub fn gen_program(rng: &mut impl Rng, depth: u32, max_nondets: usize) -> Expr {
    let ty = if rng.gen_bool(0.7) { Ty::Int } else { Ty::Bool };
    let mut g = Gen {
        rng,
        nondets_left: max_nondets,
        scope: Vec::new(),
    };
    g.expr(ty, depth)
}
