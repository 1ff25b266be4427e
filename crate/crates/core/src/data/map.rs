use std::rc::Rc;

use crate::mutants::Mutant;
use crate::symex::{branch_on, ret, Symex};
use crate::values::Term;

/// A finite map with symbolic keys, kept in insertion order.
///
/// Lookups branch on key equality, so a key that may alias a stored one on
/// some path is treated as equal on exactly those paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymMap<V> {
    entries: Vec<(Term, V)>,
}

impl<V> Default for SymMap<V> {
    fn default() -> Self {
        SymMap {
            entries: Vec::new(),
        }
    }
}

impl<V: Clone + 'static> SymMap<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(Term, V)] {
        &self.entries
    }

    pub fn find_opt<'a>(&self, k: &Term) -> Symex<'a, Option<V>> {
        find_from(Rc::new(self.entries.clone()), k.clone(), 0)
    }

    /// Binds `k` to `v`, replacing the entry of whichever stored key `k`
    /// equals on each path.
    pub fn set<'a>(&self, k: &Term, v: V) -> Symex<'a, SymMap<V>> {
        set_from(Rc::new(self.entries.clone()), k.clone(), v, 0)
    }
}

fn find_from<'a, V: Clone + 'static>(
    entries: Rc<Vec<(Term, V)>>,
    k: Term,
    i: usize,
) -> Symex<'a, Option<V>> {
    let Some((ki, vi)) = entries.get(i).cloned() else {
        return ret(None);
    };
    if ki == k {
        return ret(Some(vi));
    }
    Symex::with_engine(move |e| {
        if e.mutated(Mutant::StaleMapFind) {
            return find_from(entries, k, i + 1);
        }
        let same = e.arena.eq(&k, &ki).expect("keys of one sort");
        branch_on(
            same,
            move || ret(Some(vi)),
            move || find_from(entries, k, i + 1),
        )
    })
}

fn set_from<'a, V: Clone + 'static>(
    entries: Rc<Vec<(Term, V)>>,
    k: Term,
    v: V,
    i: usize,
) -> Symex<'a, SymMap<V>> {
    let replace = move |entries: &[(Term, V)], v: V| {
        let mut out = entries.to_vec();
        out[i].1 = v;
        SymMap { entries: out }
    };
    let Some((ki, _)) = entries.get(i).cloned() else {
        let mut out = entries.to_vec();
        out.push((k, v));
        return ret(SymMap { entries: out });
    };
    if ki == k {
        return ret(replace(&entries, v));
    }
    Symex::with_engine(move |e| {
        let same = e.arena.eq(&k, &ki).expect("keys of one sort");
        let (entries2, v2) = (entries.clone(), v.clone());
        branch_on(
            same,
            move || ret(replace(&entries2, v2)),
            move || set_from(entries, k, v, i + 1),
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symex::{nondet, Engine, EngineConfig};
    use crate::values::Sort;

    fn engine() -> Engine {
        Engine::new(EngineConfig::default())
    }

    #[test]
    fn find_on_empty_map() {
        let mut e = engine();
        let arena = e.arena.clone();
        let x = arena.mk_int(1);
        let bs = e.run(SymMap::<u32>::new().find_opt(&x));
        assert_eq!(bs.len(), 1);
        assert_eq!(bs[0].result, None);
    }

    #[test]
    fn syntactic_hit_needs_no_solver() {
        let mut e = engine();
        let c = nondet(Sort::Int).bind(|x| {
            let x2 = x.clone();
            SymMap::new().set(&x, 1u32).bind(move |m| m.find_opt(&x2))
        });
        let bs = e.run(c);
        assert_eq!(bs.len(), 1);
        assert_eq!(bs[0].result, Some(1));
        assert_eq!(e.stats().sat_checks, 0);
    }

    #[test]
    fn aliasing_keys_branch() {
        let mut e = engine();
        let c = nondet(Sort::Int).bind(|x| {
            nondet(Sort::Int)
                .bind(move |y| SymMap::new().set(&x, 1u32).bind(move |m| m.find_opt(&y)))
        });
        let bs = e.run(c);
        let got: Vec<_> = bs
            .iter()
            .map(|b| {
                let pc: Vec<String> = b.path_condition.iter().map(|t| t.to_string()).collect();
                (b.result, pc)
            })
            .collect();
        assert_eq!(
            got,
            vec![
                (Some(1), vec!["(= v0 v1)".to_string()]),
                (None, vec!["(not (= v0 v1))".to_string()]),
            ]
        );
    }

    #[test]
    fn set_replaces_or_appends() {
        let mut e = engine();
        let c = nondet(Sort::Int).bind(|x| {
            let x2 = x.clone();
            SymMap::new().set(&x, 1u32).bind(move |m| m.set(&x2, 2))
        });
        let bs = e.run(c);
        assert_eq!(bs.len(), 1);
        assert_eq!(bs[0].result.len(), 1);
        assert_eq!(bs[0].result.entries()[0].1, 2);

        let c = nondet(Sort::Int).bind(|x| {
            nondet(Sort::Int).bind(move |y| SymMap::new().set(&x, 1u32).bind(move |m| m.set(&y, 2)))
        });
        let sizes: Vec<usize> = e.run(c).iter().map(|b| b.result.len()).collect();
        assert_eq!(sizes, vec![1, 2]);
    }
}
