//! Examples for holes, read off the assertions of a run.

use std::collections::BTreeMap;

use crate::interp::{apply_values, eval_in, equality, Env, Payload, RunResult, Value, Verdict};
use crate::syntax::{Expr, ExprKind, NodeId, Program};
use crate::types::CtorTable;

/// What a hole must produce.
#[derive(Clone, Debug)]
pub enum Example {
    /// Evaluated in `env`, the hole must equal `expected`.
    Value { env: Env, expected: Value },
    /// The hole is a function: applied to `args`, it must return `expected`.
    Io { env: Env, args: Vec<Value>, expected: Value },
}

impl Example {
    pub fn env(&self) -> &Env {
        match self {
            Example::Value { env, .. } | Example::Io { env, .. } => env,
        }
    }

    pub fn expected(&self) -> &Value {
        match self {
            Example::Value { expected, .. } | Example::Io { expected, .. } => expected,
        }
    }

    /// Check a candidate for the hole against this example.
    pub fn check(&self, e: &Expr, ctors: &CtorTable, fuel: i64) -> Verdict {
        let v = eval_in(e, self.env(), ctors, fuel);
        match self {
            Example::Value { expected, .. } => equality(&v, expected),
            Example::Io { args, expected, .. } => equality(&apply_values(&v, args, ctors, fuel), expected),
        }
    }
}

pub type Examples = BTreeMap<NodeId, Vec<Example>>;

/// Push each assertion's expected value down to the holes responsible for
/// it. A hole that is the whole result (or a constructor field of it) gets a
/// value example; a hole applied to arguments at the top of the assertion
/// gets an input-output example. Holes reached only through elimination
/// produce Bomb and yield nothing.
pub fn push_down(p: &Program, run: &RunResult, ctors: &CtorTable, fuel: i64) -> Examples {
    let mut out = Examples::new();
    for (a, rec) in p.assertions().zip(&run.asserts) {
        if !rec.expected.is_concrete() {
            continue;
        }
        if let ExprKind::App(f, args) = &a.lhs.kind {
            let fv = eval_in(f, &rec.env, ctors, fuel);
            if let Payload::Hole(h, env) = fv.payload() {
                let args: Vec<Value> = args.iter().map(|x| eval_in(x, &rec.env, ctors, fuel)).collect();
                if args.iter().all(Value::is_concrete) {
                    let ex = Example::Io { env: env.clone(), args, expected: rec.expected.clone() };
                    out.entry(*h).or_default().push(ex);
                }
                continue;
            }
        }
        structural(&rec.actual, &rec.expected, &mut out);
    }
    out
}

fn structural(actual: &Value, expected: &Value, out: &mut Examples) {
    match (actual.payload(), expected.payload()) {
        (Payload::Hole(h, env), _) => {
            out.entry(*h).or_default().push(Example::Value { env: env.clone(), expected: expected.clone() })
        }
        (Payload::Ctor(c, xs), Payload::Ctor(d, ys)) if c == d && xs.len() == ys.len() => {
            xs.iter().zip(ys).for_each(|(x, y)| structural(x, y, out))
        }
        (Payload::Tuple(xs), Payload::Tuple(ys)) if xs.len() == ys.len() => {
            xs.iter().zip(ys).for_each(|(x, y)| structural(x, y, out))
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{run, FuelPolicy};
    use crate::syntax::parse;

    fn examples(src: &str) -> (Program, Examples) {
        let p = parse(src).unwrap();
        let r = run(&p, FuelPolicy::default());
        let ctors = CtorTable::new(&p.type_decls);
        let ex = push_down(&p, &r, &ctors, 1000);
        (p, ex)
    }

    fn hole_ids(p: &Program) -> Vec<NodeId> {
        let mut out = Vec::new();
        p.walk_exprs(&mut |e| {
            if e.is_hole() {
                out.push(e.id)
            }
        });
        out
    }

    #[test]
    fn body_hole_gets_value_examples() {
        let (p, ex) = examples("let f x1 = (??)\n\nlet () = assert (f 1 = 2)\n\nlet () = assert (f 3 = 4)");
        let h = hole_ids(&p)[0];
        assert_eq!(ex[&h].len(), 2);
        let Example::Value { env, expected } = &ex[&h][1] else { panic!() };
        assert_eq!(env.lookup("x1").unwrap().to_string(), "3");
        assert_eq!(expected.to_string(), "4");
    }

    #[test]
    fn applied_hole_gets_io_examples() {
        let (p, ex) = examples("let f = (??)\n\nlet () = assert (f 1 [2] = [1; 2])");
        let h = hole_ids(&p)[0];
        let Example::Io { args, expected, .. } = &ex[&h][0] else { panic!() };
        assert_eq!(args.len(), 2);
        assert_eq!(expected.to_string(), "[1; 2]");
    }

    #[test]
    fn through_constructors_not_eliminations() {
        let (p, ex) = examples("let f x = (x, (??))\n\nlet g x = (??) + 1\n\nlet () = assert (f 1 = (1, 5))\n\nlet () = assert (g 1 = 3)");
        let hs = hole_ids(&p);
        assert_eq!(ex[&hs[0]][0].expected().to_string(), "5");
        assert!(!ex.contains_key(&hs[1]));
    }

    #[test]
    fn candidate_check() {
        let (p, ex) = examples("let f x1 = (??)\n\nlet () = assert (f 1 = 2)");
        let h = hole_ids(&p)[0];
        let ctors = CtorTable::new(&[]);
        let good = crate::syntax::parse_expr("x1 + 1", &[]).unwrap();
        let bad = crate::syntax::parse_expr("x1", &[]).unwrap();
        assert_eq!(ex[&h][0].check(&good, &ctors, 100), Verdict::Pass);
        assert_eq!(ex[&h][0].check(&bad, &ctors, 100), Verdict::Fail);
    }
}
