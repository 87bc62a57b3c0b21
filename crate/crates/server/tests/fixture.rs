use manipos_core::interp::{run, FuelPolicy, Verdict};
use manipos_core::syntax::{parse, print};

const EXERCISES: &str = include_str!("../fixtures/exercises.ml");

#[test]
fn exercises_parse_and_pass() {
    let p = parse(EXERCISES).unwrap_or_else(|e| panic!("{e:?}"));
    assert!(p.bindings().count() >= 38);
    let r = run(&p, FuelPolicy::default());
    for a in &r.asserts {
        assert_eq!(a.verdict, Verdict::Pass, "assert {:?}: {} vs {}", a.id, a.actual, a.expected);
    }
    assert_eq!(print(&parse(&print(&p)).unwrap()), print(&p));
}
