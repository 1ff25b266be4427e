//! Random map scripts and their semantic check.

use rand::Rng;

use crate::data::SymMap;
use crate::symex::{nondet, ret, Branch, Engine, Symex};
use crate::values::{Ground, Interpretation, Sort, Term, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Key {
    /// The i-th symbolic key, `v{i}`.
    Var(usize),
    Const(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapOp {
    Set(Key, i64),
    Find(Key),
}

#[derive(Debug, Clone)]
pub struct MapScript {
    pub vars: usize,
    pub ops: Vec<MapOp>,
}

pub fn gen_map_script(rng: &mut impl Rng) -> MapScript {
    let vars = rng.gen_range(1..=3);
    let key = |rng: &mut dyn rand::RngCore| {
        if rng.gen_bool(0.7) {
            Key::Var(rng.gen_range(0..vars))
        } else {
            Key::Const(rng.gen_range(-2..=2))
        }
    };
    let ops = (0..rng.gen_range(1..=6))
        .map(|_| {
            if rng.gen_bool(0.5) {
                MapOp::Set(key(rng), rng.gen_range(0..10))
            } else {
                MapOp::Find(key(rng))
            }
        })
        .collect();
    MapScript { vars, ops }
}

impl MapScript {
    /// Creates the symbolic keys, then runs the operations, yielding every
    /// `find` result in order.
    pub fn symbolic<'a>(&self) -> Symex<'a, Vec<Option<i64>>> {
        let script = self.clone();
        keys(script.vars, Vec::new()).bind(move |vars| {
            let ops = script.ops.clone();
            run_ops(vars, ops, 0, SymMap::new(), Vec::new())
        })
    }

    /// The same script on concrete keys.
    pub fn concrete(&self, env: &[i64]) -> Vec<Option<i64>> {
        let mut map: Vec<(i64, i64)> = Vec::new();
        let mut out = Vec::new();
        let val = |k: Key| match k {
            Key::Var(i) => env[i],
            Key::Const(c) => c,
        };
        for op in &self.ops {
            match *op {
                MapOp::Set(k, v) => {
                    let k = val(k);
                    match map.iter_mut().find(|(k2, _)| *k2 == k) {
                        Some(slot) => slot.1 = v,
                        None => map.push((k, v)),
                    }
                }
                MapOp::Find(k) => {
                    let k = val(k);
                    out.push(map.iter().find(|(k2, _)| *k2 == k).map(|(_, v)| *v));
                }
            }
        }
        out
    }

    /// Every assignment of the keys over `domain` satisfies at least one
    /// branch, and each branch it satisfies gives the concrete results.
    pub fn check(&self, engine: &mut Engine, domain: &[i64]) -> Result<usize, String> {
        let branches = engine.run(self.symbolic());
        let mut env = vec![domain[0]; self.vars];
        loop {
            self.check_assignment(&branches, &env)?;
            if !next_assignment(&mut env, domain) {
                return Ok(branches.len());
            }
        }
    }

    fn check_assignment(
        &self,
        branches: &[Branch<Vec<Option<i64>>>],
        env: &[i64],
    ) -> Result<(), String> {
        let interp: Interpretation = env
            .iter()
            .enumerate()
            .map(|(i, z)| (VarId(i as u32), Ground::Int((*z).into())))
            .collect();
        let want = self.concrete(env);
        let mut covered = false;
        for b in branches {
            let sat = b
                .path_condition
                .iter()
                .all(|c| c.eval_ground(&interp) == Ok(Ground::Bool(true)));
            if !sat {
                continue;
            }
            covered = true;
            if b.result != want {
                return Err(format!(
                    "{self:?} at {env:?}: branch yields {:?}, expected {want:?}",
                    b.result
                ));
            }
        }
        if covered {
            Ok(())
        } else {
            Err(format!(
                "{self:?} at {env:?}: no branch covers the assignment"
            ))
        }
    }
}

fn next_assignment(env: &mut [i64], domain: &[i64]) -> bool {
    for slot in env.iter_mut() {
        let i = domain.iter().position(|d| d == slot).unwrap();
        if i + 1 < domain.len() {
            *slot = domain[i + 1];
            return true;
        }
        *slot = domain[0];
    }
    false
}

fn keys<'a>(n: usize, acc: Vec<Term>) -> Symex<'a, Vec<Term>> {
    if acc.len() == n {
        return ret(acc);
    }
    nondet(Sort::Int).bind(move |v| {
        let mut acc = acc.clone();
        acc.push(v);
        keys(n, acc)
    })
}

fn run_ops<'a>(
    vars: Vec<Term>,
    ops: Vec<MapOp>,
    i: usize,
    map: SymMap<i64>,
    found: Vec<Option<i64>>,
) -> Symex<'a, Vec<Option<i64>>> {
    let Some(&op) = ops.get(i) else {
        return ret(found);
    };
    Symex::with_engine(move |e| {
        let key = match op {
            MapOp::Set(k, _) | MapOp::Find(k) => match k {
                Key::Var(j) => vars[j].clone(),
                Key::Const(c) => e.arena.mk_int(c),
            },
        };
        match op {
            MapOp::Set(_, v) => map
                .set(&key, v)
                .bind(move |m| run_ops(vars.clone(), ops.clone(), i + 1, m, found.clone())),
            MapOp::Find(_) => map.find_opt(&key).bind(move |r| {
                let mut found = found.clone();
                found.push(r);
                run_ops(vars.clone(), ops.clone(), i + 1, map.clone(), found)
            }),
        }
    })
}
