mod common;

use common::Gen;
use manipos_core::interp::{run, FuelPolicy, Payload, RunResult, Value};
use manipos_core::syntax::parse;
use proptest::prelude::*;

fn top(r: &RunResult, name: &str) -> Value {
    r.top_env.lookup(name).unwrap_or_else(|| panic!("{name} unbound")).clone()
}

#[test]
fn random_programs_with_holes_never_crash() {
    for seed in 0..500 {
        let src = Gen::new(seed, 20).program(6);
        let p = parse(&src).unwrap_or_else(|e| panic!("seed {seed}: {e:?}\n{src}"));
        let r = run(&p, FuelPolicy::default());
        assert_eq!(r.asserts.len(), p.assertions().count(), "seed {seed}");
    }
}

fn with_operand(e: &str) -> String {
    format!(
        "let e = {e}\n\n\
         let plus = (??) + e\n\n\
         let chained = ((??) + 1) * e\n\n\
         let scrut = match (??) with\n| [] -> 0\n| h :: t -> 1\n\n\
         let cond = if (??) then e else e\n\n\
         let call = (??) e\n\n\
         let pair = (e, (??))\n\n\
         let cons = (??) :: [e]\n\n\
         let ident = (fun z -> z) (??)\n\n\
         let from_let = let q = (??) in q\n"
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn eliminating_a_hole_bombs(seed in any::<u64>()) {
        let e = Gen::new(seed, 0).expr(&[], &[], 3);
        let p = parse(&with_operand(&e)).unwrap();
        let r = run(&p, FuelPolicy::default());
        for name in ["plus", "chained", "scrut", "cond", "call"] {
            prop_assert!(top(&r, name).is_bomb(), "{name} for e = {e}");
        }
    }

    #[test]
    fn introducing_a_hole_keeps_it(seed in any::<u64>()) {
        let e = Gen::new(seed, 0).expr(&[], &[], 3);
        let p = parse(&with_operand(&e)).unwrap();
        let r = run(&p, FuelPolicy::default());
        let pair = top(&r, "pair");
        match pair.payload() {
            Payload::Tuple(vs) => prop_assert!(vs[1].is_hole()),
            _ => prop_assert!(false, "pair is {pair}"),
        }
        let cons = top(&r, "cons").as_list().expect("list");
        prop_assert!(cons[0].is_hole());
        prop_assert!(top(&r, "ident").is_hole());
        prop_assert!(top(&r, "from_let").is_hole());
    }
}

#[test]
fn hole_value_remembers_its_site() {
    let p = parse("let x = 5\n\nlet h = (??)\n").unwrap();
    let r = run(&p, FuelPolicy::default());
    let site = p.top_binding("h").unwrap().expr.id;
    let h = top(&r, "h");
    let Payload::Hole(id, env) = h.payload() else { panic!() };
    assert_eq!(*id, site);
    assert!(env.lookup("x").is_some());
}
