use num_bigint::BigInt;
use proptest::prelude::*;

use super::*;

fn int_env(pairs: &[(u32, i64)]) -> Interpretation {
    pairs
        .iter()
        .map(|&(v, z)| (VarId(v), Ground::Int(BigInt::from(z))))
        .collect()
}

#[test]
fn mk_var_is_idempotent() {
    let a = TermArena::new();
    let x = a.mk_var(VarId(0), Sort::Int).unwrap();
    let y = a.mk_var(VarId(0), Sort::Int).unwrap();
    assert_eq!(x.id(), y.id());
    let z = a.mk_var(VarId(1), Sort::Int).unwrap();
    assert_ne!(x.id(), z.id());
}

#[test]
fn mk_var_sort_conflict() {
    let a = TermArena::new();
    a.mk_var(VarId(0), Sort::Int).unwrap();
    assert!(matches!(
        a.mk_var(VarId(0), Sort::Bool),
        Err(ValueError::SortConflict { .. })
    ));
    a.release_vars_from(0);
    assert!(a.mk_var(VarId(0), Sort::Bool).is_ok());
}

#[test]
fn constants_are_interned() {
    let a = TermArena::new();
    assert_eq!(a.mk_bool(true).as_bool(), Some(true));
    assert_eq!(a.mk_int(5).as_int(), Some(&BigInt::from(5)));
    assert_eq!(a.mk_int(5).id(), a.mk_int(5).id());
    assert!(a.mk_bv(3, 8).is_err());
    assert!(a.mk_bv(0, 0).is_err());
    assert_eq!(a.mk_bv_wrapping(8, -1).unwrap(), a.mk_bv(8, 255).unwrap());
}

#[test]
fn binop_folding_and_identities() {
    let a = TermArena::new();
    let x = a.mk_var(VarId(0), Sort::Int).unwrap();
    let b = a.mk_var(VarId(1), Sort::Bool).unwrap();
    let t = a.mk_bool(true);
    let f = a.mk_bool(false);
    assert_eq!(a.add(&a.mk_int(2), &a.mk_int(3)).unwrap(), a.mk_int(5));
    assert_eq!(a.eq(&x, &x).unwrap().as_bool(), Some(true));
    assert_eq!(a.geq(&x, &x).unwrap().as_bool(), Some(true));
    assert_eq!(a.add(&x, &a.mk_int(0)).unwrap(), x);
    assert_eq!(a.add(&a.mk_int(0), &x).unwrap(), x);
    assert_eq!(a.sub(&x, &a.mk_int(0)).unwrap(), x);
    assert_eq!(a.sub(&x, &x).unwrap(), a.mk_int(0));
    assert_eq!(a.and(&b, &t).unwrap(), b);
    assert_eq!(a.and(&b, &f).unwrap(), f);
    assert_eq!(a.or(&b, &f).unwrap(), b);
    assert_eq!(a.or(&b, &t).unwrap(), t);
    assert_eq!(a.mk_not(&a.mk_not(&b).unwrap()).unwrap(), b);
    assert_eq!(a.mk_not(&f).unwrap(), t);
    assert_eq!(a.div(&a.mk_int(7), &a.mk_int(2)).unwrap(), a.mk_int(3));
    assert_eq!(a.div(&a.mk_int(-7), &a.mk_int(2)).unwrap(), a.mk_int(-4));
    // Division by a literal zero stays symbolic.
    let z = a.div(&a.mk_int(1), &a.mk_int(0)).unwrap();
    assert!(!z.is_const());
}

#[test]
fn not_of_geq_is_structural() {
    let a = TermArena::new();
    let x = a.mk_var(VarId(0), Sort::Int).unwrap();
    let g = a.geq(&x, &a.mk_int(0)).unwrap();
    let n = a.mk_not(&g).unwrap();
    assert_eq!(n.sort(), Sort::Bool);
    assert!(matches!(n.kind(), Kind::Not(inner) if *inner == g));
    assert_eq!(g.as_bool(), None);
}

#[test]
fn sort_errors() {
    let a = TermArena::new();
    let x = a.mk_var(VarId(0), Sort::Int).unwrap();
    let b = a.mk_bool(true);
    assert!(a.add(&x, &b).is_err());
    assert!(a.mk_not(&x).is_err());
    assert!(a.and(&x, &x).is_err());
    let bv4 = a.mk_bv(4, 1).unwrap();
    let bv8 = a.mk_bv(8, 1).unwrap();
    assert!(a.add(&bv4, &bv8).is_err());
    let other = TermArena::new();
    assert_eq!(other.mk_not(&b), Err(ValueError::ForeignTerm));
}

#[test]
fn bitvector_semantics() {
    let a = TermArena::new();
    let bv = |z: i64| a.mk_bv_wrapping(8, z).unwrap();
    assert_eq!(a.add(&bv(127), &bv(1)).unwrap(), bv(-128));
    assert_eq!(a.sub(&bv(0), &bv(1)).unwrap(), bv(255));
    assert_eq!(a.geq(&bv(-1), &bv(0)).unwrap().as_bool(), Some(false));
    assert_eq!(a.div(&bv(-7), &bv(2)).unwrap(), bv(-3));
    assert_eq!(a.div(&bv(5), &bv(0)).unwrap(), bv(-1));
    assert_eq!(a.div(&bv(-5), &bv(0)).unwrap(), bv(1));
}

#[test]
fn eval_examples() {
    let a = TermArena::new();
    let x = a.mk_var(VarId(0), Sort::Int).unwrap();
    let y = a.mk_var(VarId(1), Sort::Int).unwrap();
    let inc = a.add(&x, &a.mk_int(1)).unwrap();
    assert_eq!(
        inc.eval_ground(&int_env(&[(0, 4)])),
        Ok(Ground::Int(5.into()))
    );
    let g = a.geq(&x, &a.mk_int(0)).unwrap();
    assert_eq!(g.eval_ground(&int_env(&[(0, -1)])), Ok(Ground::Bool(false)));
    let d = a.div(&x, &y).unwrap();
    assert_eq!(
        d.eval_ground(&int_env(&[(0, 7), (1, 2)])),
        Ok(Ground::Int(3.into()))
    );
    assert_eq!(
        d.eval_ground(&int_env(&[(0, 7), (1, 0)])),
        Err(EvalError::Unspecified)
    );
    assert_eq!(
        d.eval_ground(&int_env(&[(0, 7)])),
        Err(EvalError::Unbound(VarId(1)))
    );
    let bad: Interpretation = [(VarId(0), Ground::Bool(true))].into_iter().collect();
    assert!(matches!(
        x.eval_ground(&bad),
        Err(EvalError::IllSorted { .. })
    ));
}

#[test]
fn connective_masks_unspecified_operand() {
    let a = TermArena::new();
    let x = a.mk_var(VarId(0), Sort::Int).unwrap();
    let b = a.mk_var(VarId(1), Sort::Bool).unwrap();
    let undefined = a
        .eq(&a.div(&x, &a.mk_int(0)).unwrap(), &a.mk_int(1))
        .unwrap();
    let conj = a.and(&b, &undefined).unwrap();
    let env: Interpretation = [
        (VarId(0), Ground::Int(3.into())),
        (VarId(1), Ground::Bool(false)),
    ]
    .into_iter()
    .collect();
    assert_eq!(conj.eval_ground(&env), Ok(Ground::Bool(false)));
}

#[test]
fn free_vars_examples() {
    let a = TermArena::new();
    let x = a.mk_var(VarId(0), Sort::Int).unwrap();
    let y = a.mk_var(VarId(1), Sort::Int).unwrap();
    assert!(a.mk_int(3).free_vars().is_empty());
    assert_eq!(a.add(&x, &y).unwrap().free_vars(), &[VarId(0), VarId(1)]);
    assert!(a.sub(&x, &x).unwrap().free_vars().is_empty());
}

#[test]
fn smt_rendering() {
    let a = TermArena::new();
    let x = a.mk_var(VarId(0), Sort::Int).unwrap();
    let g = a.mk_not(&a.geq(&x, &a.mk_int(-6)).unwrap()).unwrap();
    assert_eq!(g.to_string(), "(not (>= v0 (- 6)))");
    let v = a.mk_var(VarId(1), Sort::BitVec(8)).unwrap();
    let s = a
        .geq(&a.add(&v, &a.mk_bv(8, 3).unwrap()).unwrap(), &v)
        .unwrap();
    assert_eq!(s.to_string(), "(bvsge (bvadd v1 (_ bv3 8)) v1)");
    assert_eq!(Sort::BitVec(8).to_string(), "(_ BitVec 8)");
}

#[test]
fn parse_round_trip_and_model_literals() {
    let a = TermArena::new();
    let sorts = |v: VarId| match v.0 {
        0 => Some(Sort::Int),
        1 => Some(Sort::BitVec(8)),
        _ => None,
    };
    for src in [
        "(not (>= v0 (- 6)))",
        "(and (= v0 3) (>= (div v0 2) 1))",
        "(bvsge (bvsub v1 (_ bv3 8)) v1)",
    ] {
        let t = parse_term(&a, src, &sorts).unwrap();
        assert_eq!(t.to_string(), src);
    }
    assert_eq!(
        parse_term(&a, "#x0f", &sorts).unwrap(),
        a.mk_bv(8, 15).unwrap()
    );
    assert_eq!(
        parse_term(&a, "#b101", &sorts).unwrap(),
        a.mk_bv(3, 5).unwrap()
    );
    assert_eq!(
        parse_term(&a, "(< v0 2)", &sorts).unwrap().to_string(),
        "(not (>= v0 2))"
    );
    assert!(matches!(
        parse_term(&a, "v9", &sorts),
        Err(ParseTermError::UnknownVar(_))
    ));
    assert!(parse_term(&a, "(* v0 2)", &sorts).is_err());
}

// Randomized construction recipes, evaluated both through the smart
// constructors and by a direct interpreter that never rewrites.

#[derive(Debug, Clone)]
enum IntR {
    Var(u32),
    Lit(i64),
    Add(Box<IntR>, Box<IntR>),
    Sub(Box<IntR>, Box<IntR>),
    Div(Box<IntR>, Box<IntR>),
}

#[derive(Debug, Clone)]
enum BoolR {
    Var(u32),
    Lit(bool),
    Not(Box<BoolR>),
    And(Box<BoolR>, Box<BoolR>),
    Or(Box<BoolR>, Box<BoolR>),
    EqB(Box<BoolR>, Box<BoolR>),
    EqI(IntR, IntR),
    Geq(IntR, IntR),
}

fn int_recipe() -> impl Strategy<Value = IntR> {
    let leaf = prop_oneof![
        (0u32..2).prop_map(IntR::Var),
        (-3i64..4).prop_map(IntR::Lit)
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| IntR::Add(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| IntR::Sub(a.into(), b.into())),
            (inner.clone(), inner).prop_map(|(a, b)| IntR::Div(a.into(), b.into())),
        ]
    })
}

fn bool_recipe() -> impl Strategy<Value = BoolR> {
    let leaf = prop_oneof![
        (2u32..4).prop_map(BoolR::Var),
        any::<bool>().prop_map(BoolR::Lit),
        (int_recipe(), int_recipe()).prop_map(|(a, b)| BoolR::Geq(a, b)),
        (int_recipe(), int_recipe()).prop_map(|(a, b)| BoolR::EqI(a, b)),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| BoolR::Not(a.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| BoolR::And(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| BoolR::Or(a.into(), b.into())),
            (inner.clone(), inner).prop_map(|(a, b)| BoolR::EqB(a.into(), b.into())),
        ]
    })
}

fn build_int(a: &TermArena, r: &IntR) -> Term {
    match r {
        IntR::Var(v) => a.mk_var(VarId(*v), Sort::Int).unwrap(),
        IntR::Lit(z) => a.mk_int(*z),
        IntR::Add(x, y) => a.add(&build_int(a, x), &build_int(a, y)).unwrap(),
        IntR::Sub(x, y) => a.sub(&build_int(a, x), &build_int(a, y)).unwrap(),
        IntR::Div(x, y) => a.div(&build_int(a, x), &build_int(a, y)).unwrap(),
    }
}

fn build_bool(a: &TermArena, r: &BoolR) -> Term {
    match r {
        BoolR::Var(v) => a.mk_var(VarId(*v), Sort::Bool).unwrap(),
        BoolR::Lit(b) => a.mk_bool(*b),
        BoolR::Not(x) => a.mk_not(&build_bool(a, x)).unwrap(),
        BoolR::And(x, y) => a.and(&build_bool(a, x), &build_bool(a, y)).unwrap(),
        BoolR::Or(x, y) => a.or(&build_bool(a, x), &build_bool(a, y)).unwrap(),
        BoolR::EqB(x, y) => a.eq(&build_bool(a, x), &build_bool(a, y)).unwrap(),
        BoolR::EqI(x, y) => a.eq(&build_int(a, x), &build_int(a, y)).unwrap(),
        BoolR::Geq(x, y) => a.geq(&build_int(a, x), &build_int(a, y)).unwrap(),
    }
}

/// `None` means the value depends on a division by zero.
fn raw_int(r: &IntR, xs: &[i64; 2]) -> Option<i64> {
    match r {
        IntR::Var(v) => Some(xs[*v as usize]),
        IntR::Lit(z) => Some(*z),
        IntR::Add(a, b) => Some(raw_int(a, xs)? + raw_int(b, xs)?),
        IntR::Sub(a, b) => Some(raw_int(a, xs)? - raw_int(b, xs)?),
        IntR::Div(a, b) => {
            let (p, q) = (raw_int(a, xs)?, raw_int(b, xs)?);
            (q != 0).then(|| p.div_euclid(q))
        }
    }
}

fn raw_bool(r: &BoolR, xs: &[i64; 2], bs: &[bool; 2]) -> Option<bool> {
    match r {
        BoolR::Var(v) => Some(bs[*v as usize - 2]),
        BoolR::Lit(b) => Some(*b),
        BoolR::Not(a) => raw_bool(a, xs, bs).map(|b| !b),
        BoolR::And(a, b) => match (raw_bool(a, xs, bs), raw_bool(b, xs, bs)) {
            (Some(false), _) | (_, Some(false)) => Some(false),
            (Some(x), Some(y)) => Some(x && y),
            _ => None,
        },
        BoolR::Or(a, b) => match (raw_bool(a, xs, bs), raw_bool(b, xs, bs)) {
            (Some(true), _) | (_, Some(true)) => Some(true),
            (Some(x), Some(y)) => Some(x || y),
            _ => None,
        },
        BoolR::EqB(a, b) => Some(raw_bool(a, xs, bs)? == raw_bool(b, xs, bs)?),
        BoolR::EqI(a, b) => Some(raw_int(a, xs)? == raw_int(b, xs)?),
        BoolR::Geq(a, b) => Some(raw_int(a, xs)? >= raw_int(b, xs)?),
    }
}

fn envs() -> impl Iterator<Item = ([i64; 2], [bool; 2], Interpretation)> {
    let mut out = Vec::new();
    for x in -2..=2 {
        for y in -2..=2 {
            for (p, q) in [(false, false), (false, true), (true, false), (true, true)] {
                let env: Interpretation = [
                    (VarId(0), Ground::Int(x.into())),
                    (VarId(1), Ground::Int(y.into())),
                    (VarId(2), Ground::Bool(p)),
                    (VarId(3), Ground::Bool(q)),
                ]
                .into_iter()
                .collect();
                out.push(([x, y], [p, q], env));
            }
        }
    }
    out.into_iter()
}

proptest! {
    #[test]
    fn simplification_preserves_int_semantics(r in int_recipe()) {
        let a = TermArena::new();
        let t = build_int(&a, &r);
        for (xs, _, env) in envs() {
            if let Some(expected) = raw_int(&r, &xs) {
                prop_assert_eq!(t.eval_ground(&env), Ok(Ground::Int(expected.into())));
            }
        }
    }

    #[test]
    fn simplification_preserves_bool_semantics(r in bool_recipe()) {
        let a = TermArena::new();
        let t = build_bool(&a, &r);
        for (xs, bs, env) in envs() {
            if let Some(expected) = raw_bool(&r, &xs, &bs) {
                prop_assert_eq!(t.eval_ground(&env), Ok(Ground::Bool(expected)));
            }
        }
    }

    #[test]
    fn commutative_ops_are_canonical(x in int_recipe(), y in int_recipe(), p in bool_recipe(), q in bool_recipe()) {
        let a = TermArena::new();
        let (tx, ty) = (build_int(&a, &x), build_int(&a, &y));
        let (tp, tq) = (build_bool(&a, &p), build_bool(&a, &q));
        prop_assert_eq!(a.add(&tx, &ty).unwrap(), a.add(&ty, &tx).unwrap());
        prop_assert_eq!(a.eq(&tx, &ty).unwrap(), a.eq(&ty, &tx).unwrap());
        prop_assert_eq!(a.and(&tp, &tq).unwrap(), a.and(&tq, &tp).unwrap());
        prop_assert_eq!(a.or(&tp, &tq).unwrap(), a.or(&tq, &tp).unwrap());
        for t in [a.add(&tx, &ty).unwrap(), a.and(&tp, &tq).unwrap()] {
            if let Kind::BinOp(op, l, r) = t.kind() {
                if op.is_commutative() {
                    prop_assert!(l.id() <= r.id());
                }
            }
        }
    }

    #[test]
    fn interning_matches_structure(r in bool_recipe()) {
        let a = TermArena::new();
        let t1 = build_bool(&a, &r);
        let t2 = build_bool(&a, &r);
        prop_assert_eq!(t1.id(), t2.id());
        // Re-parsing the rendering reaches the same node.
        let sorts = |v: VarId| Some(if v.0 < 2 { Sort::Int } else { Sort::Bool });
        let back = parse_term(&a, &t1.to_string(), &sorts).unwrap();
        prop_assert_eq!(back, t1);
    }

    #[test]
    fn no_foldable_nodes_survive(r in bool_recipe()) {
        let a = TermArena::new();
        let t = build_bool(&a, &r);
        fn check(t: &Term) -> bool {
            match t.kind() {
                Kind::BinOp(op, x, y) => {
                    let foldable = x.is_const() && y.is_const()
                        && !(*op == BinOp::Div && matches!(y.kind(), Kind::Int(z) if z == &BigInt::from(0)));
                    !foldable && check(x) && check(y)
                }
                Kind::Not(x) => !x.is_const() && !matches!(x.kind(), Kind::Not(_)) && check(x),
                _ => true,
            }
        }
        prop_assert!(check(&t));
    }

    #[test]
    fn bitvector_folding_matches_wrapping(x in -128i64..128, y in -128i64..128) {
        let a = TermArena::new();
        let bx = a.mk_bv_wrapping(8, x).unwrap();
        let by = a.mk_bv_wrapping(8, y).unwrap();
        let wrap = |z: i64| a.mk_bv_wrapping(8, z).unwrap();
        prop_assert_eq!(a.add(&bx, &by).unwrap(), wrap(x + y));
        prop_assert_eq!(a.sub(&bx, &by).unwrap(), wrap(x - y));
        prop_assert_eq!(a.geq(&bx, &by).unwrap().as_bool(), Some(x >= y));
        if y != 0 && !(x == -128 && y == -1) {
            prop_assert_eq!(a.div(&bx, &by).unwrap(), wrap(x / y));
        }
    }
}
