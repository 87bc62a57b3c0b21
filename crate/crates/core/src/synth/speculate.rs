//! Types guessed for top-level functions from the assertions that call them.

use std::collections::BTreeMap;

use crate::interp::{eval_in, RunResult};
use crate::syntax::{ExprKind, Program};
use crate::types::{infer_program, CtorTable, TyCtx, Type, TypeInfo};

/// For every assertion `f a1 .. an = r` on a top-level `f` whose arguments
/// and result are concrete, `f : t1 -> .. -> tn -> tr` from the runtime
/// types. Assertions on the same name are unified; a name whose assertions
/// disagree is left out.
pub fn speculative_types(p: &Program, run: &RunResult, ctors: &CtorTable, fuel: i64) -> Vec<(String, Type)> {
    let mut cx = TyCtx::new();
    let mut found: BTreeMap<String, Option<Type>> = BTreeMap::new();
    for (a, rec) in p.assertions().zip(&run.asserts) {
        let ExprKind::App(f, args) = &a.lhs.kind else { continue };
        let Some(name) = f.as_var() else { continue };
        if p.top_binding(name).is_none() || !rec.expected.is_concrete() {
            continue;
        }
        let vals: Vec<_> = args.iter().map(|x| eval_in(x, &rec.env, ctors, fuel)).collect();
        if !vals.iter().all(|v| v.is_concrete()) {
            continue;
        }
        let ts = vals.iter().map(|v| v.type_of(ctors, &mut cx)).collect();
        let t = Type::arrows(ts, rec.expected.type_of(ctors, &mut cx));
        let slot = found.entry(name.to_string()).or_insert_with(|| Some(t.clone()));
        if let Some(prev) = slot.clone() {
            if !cx.try_unify(&prev, &t) {
                *slot = None;
            }
        }
    }
    found.into_iter().filter_map(|(n, t)| t.map(|t| (n, cx.resolve(&t)))).collect()
}

/// Inference with speculative types, unless they introduce type errors.
pub fn infer_with_examples(p: &Program, run: &RunResult, ctors: &CtorTable, fuel: i64) -> TypeInfo {
    let plain = infer_program(p, &[]);
    let assumed = speculative_types(p, run, ctors, fuel);
    if assumed.is_empty() {
        return plain;
    }
    let info = infer_program(p, &assumed);
    if info.errors.len() > plain.errors.len() {
        plain
    } else {
        info
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{run, FuelPolicy};
    use crate::syntax::parse;

    fn speculated(src: &str) -> Vec<(String, String)> {
        let p = parse(src).unwrap();
        let r = run(&p, FuelPolicy::default());
        let ctors = CtorTable::new(&p.type_decls);
        speculative_types(&p, &r, &ctors, 1000).into_iter().map(|(n, t)| (n, t.to_string())).collect()
    }

    #[test]
    fn from_examples() {
        let got = speculated("let length x1 = (??)\n\nlet () = assert (length [0; 0] = 2)\n\nlet () = assert (length [] = 0)");
        assert_eq!(got, vec![("length".to_string(), "int list -> int".to_string())]);
    }

    #[test]
    fn conflicting_examples_are_dropped() {
        let got = speculated("let f x1 = (??)\n\nlet () = assert (f 1 = 2)\n\nlet () = assert (f \"a\" = 2)");
        assert!(got.is_empty());
    }

    #[test]
    fn sharpens_hole_types() {
        let p = parse("let f x1 x2 = (??)\n\nlet () = assert (f [1] [2] = [1; 2])").unwrap();
        let r = run(&p, FuelPolicy::default());
        let ctors = CtorTable::new(&[]);
        let info = infer_with_examples(&p, &r, &ctors, 1000);
        let mut hole = None;
        p.walk_exprs(&mut |e| {
            if e.is_hole() {
                hole = Some(e.id)
            }
        });
        assert_eq!(info.type_of(hole.unwrap()).unwrap().to_string(), "int list");
    }
}
