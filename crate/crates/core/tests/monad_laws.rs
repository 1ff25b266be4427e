use symex_core::symex::{Engine, EngineConfig};
use symex_core::testkit::monad::{gen_comp, gen_law_case, Law};
use symex_core::testkit::rng;

#[test]
fn laws_hold_on_random_computations() {
    let mut engine = Engine::new(EngineConfig::default());
    let mut r = rng(0x5eed_0001);
    for i in 0..300 {
        let law = Law::ALL[i % 3];
        let case = gen_law_case(&mut r, law);
        if let Err(msg) = case.check(&mut engine) {
            panic!("case {i}: {msg}");
        }
    }
}

#[test]
fn generated_depth_is_bounded() {
    let mut r = rng(7);
    for _ in 0..500 {
        assert!(gen_comp(&mut r, 6).depth() <= 6);
    }
}

#[test]
fn engine_state_is_clean_between_runs() {
    let mut engine = Engine::new(EngineConfig::default());
    let mut r = rng(11);
    for _ in 0..50 {
        let case = gen_law_case(&mut r, Law::Associativity);
        case.check(&mut engine).unwrap();
        assert_eq!(engine.solver.checkpoint_depth(), 0);
        assert!(engine.solver.as_values().is_empty());
        assert_eq!(engine.solver.var_counter(), 0);
    }
}
