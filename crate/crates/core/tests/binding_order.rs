mod common;

use common::Gen;
use manipos_core::nonlinear::{pipeline, reorder, scope};
use manipos_core::syntax::{parse, print};

const FIG: &str = "let a = 1\n\nlet c =\n  let x = (a, b, c, d) in\n  let a = 0 in\n  x\n\nlet b = 2\n";

#[test]
fn scrambled_fixture_becomes_well_scoped() {
    let q = pipeline(&parse(FIG).unwrap()).unwrap();
    assert!(scope::program_free_vars(&q).is_empty(), "{}", print(&q));
    assert!(q.top_binding("c").unwrap().rec);
    assert!(q.top_binding("d").unwrap().expr.is_hole());
    assert!(pipeline(&q).unwrap().same_structure(&q));
}

#[test]
fn reorder_is_idempotent_on_random_programs() {
    for seed in 0..1000 {
        let src = Gen::new(seed, 0).scrambled(6, false);
        let p = parse(&src).unwrap_or_else(|e| panic!("seed {seed}: {e:?}\n{src}"));
        let once = reorder(&p).unwrap();
        let twice = reorder(&once).unwrap();
        assert!(twice.same_structure(&once), "seed {seed}\n{}\n---\n{}", print(&once), print(&twice));
        let full = pipeline(&p).unwrap();
        assert!(pipeline(&full).unwrap().same_structure(&full), "seed {seed}");
    }
}

#[test]
fn acyclic_programs_end_up_well_scoped() {
    for seed in 0..1000 {
        let src = Gen::new(seed, 0).scrambled(6, true);
        let full = pipeline(&parse(&src).unwrap()).unwrap();
        assert!(scope::program_free_vars(&full).is_empty(), "seed {seed}\n{}", print(&full));
        assert!(pipeline(&full).unwrap().same_structure(&full), "seed {seed}");
    }
}
