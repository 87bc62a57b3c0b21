//! Sketches: a hole refined into a function and/or a case split whose
//! branches are new holes.

use std::collections::BTreeSet;

use super::guess::HoleScope;
use super::pushdown::{Example, Examples};
use crate::nonlinear::names::{ctor_arg_names, skeleton_params};
use crate::nonlinear::scope::all_bound_names;
use crate::syntax::{Branch, Expr, ExprKind, NodeId, Pat, PatKind, Program};
use crate::types::{CtorTable, TyCtx};

/// How one hole of the original program was refined.
#[derive(Clone, Debug)]
pub struct Refinement {
    pub hole: NodeId,
    /// Parameters introduced by wrapping the hole in a function.
    pub params: Vec<String>,
    /// Holes of the refined expression.
    pub holes: Vec<NodeId>,
}

#[derive(Clone, Debug)]
pub struct Sketch {
    pub program: Program,
    pub refinement: Option<Refinement>,
}

const MAX_PARAMS: usize = 3;

/// Refinements of `hole`: when all its examples are input-output pairs of
/// the same arity, a function taking that many parameters, optionally with
/// a case split on one of them; otherwise a case split on a variant-typed
/// variable bound inside the enclosing definition, most recent first.
pub fn refinements(p: &Program, ctors: &CtorTable, examples: &Examples, scope: &HoleScope) -> Vec<Sketch> {
    let hole = scope.hole;
    let exs = examples.get(&hole).map(Vec::as_slice).unwrap_or(&[]);
    let arity = io_arity(exs);
    let mut taken = all_bound_names(p);
    let mut out = Vec::new();
    match arity {
        Some(n) => {
            let params = skeleton_params(n, &mut taken);
            out.push(build(p, hole, &params, None, ctors, &taken));
            for (i, x) in params.iter().enumerate() {
                let ty = exs.iter().find_map(|ex| match ex {
                    Example::Io { args, .. } => args[i].type_of(ctors, &mut TyCtx::new()).head().map(str::to_string),
                    Example::Value { .. } => None,
                });
                if let Some(ty) = ty.filter(|t| splittable(ctors, t)) {
                    out.push(build(p, hole, &params, Some((x, &ty)), ctors, &taken));
                }
            }
        }
        None => {
            let outer = enclosing_scrutinees(p, hole);
            for e in scope.entries.iter().filter(|e| e.inner && !outer.contains(&e.name)) {
                if let Some(ty) = e.scheme.ty.head().filter(|t| splittable(ctors, t)) {
                    out.push(build(p, hole, &[], Some((&e.name, ty)), ctors, &taken));
                }
            }
        }
    }
    out
}

fn io_arity(exs: &[Example]) -> Option<usize> {
    let mut n = None;
    for ex in exs {
        let Example::Io { args, .. } = ex else { return None };
        if n.is_some_and(|k| k != args.len()) {
            return None;
        }
        n = Some(args.len());
    }
    n.filter(|k| (1..=MAX_PARAMS).contains(k))
}

fn splittable(ctors: &CtorTable, ty: &str) -> bool {
    ctors.is_adt(ty) && ty != "bool" && ty != "unit"
}

fn build(
    p: &Program,
    hole: NodeId,
    params: &[String],
    split: Option<(&String, &str)>,
    ctors: &CtorTable,
    taken: &BTreeSet<String>,
) -> Sketch {
    let mut q = p.clone();
    let mut body = match split {
        None => Expr::hole(),
        Some((var, ty)) => {
            let mut taken = taken.clone();
            let branches = ctors
                .ctors_of(ty)
                .iter()
                .map(|c| {
                    let args = ctor_arg_names(c, ctors, &mut taken).into_iter().map(Pat::var).collect();
                    Branch { pat: Pat::new(PatKind::Ctor(c.clone(), args)), body: Expr::hole() }
                })
                .collect();
            Expr::matching(Expr::var(var.clone()), branches)
        }
    };
    for x in params.iter().rev() {
        body = Expr::fun(Pat::var(x.clone()), body);
    }
    q.assign_fresh_ids(&mut body);
    body.id = hole;
    let mut holes = Vec::new();
    body.walk(&mut |e| {
        if e.is_hole() {
            holes.push(e.id)
        }
    });
    if let Some(target) = q.find_expr_mut(hole) {
        *target = body;
    }
    Sketch { program: q, refinement: Some(Refinement { hole, params: params.to_vec(), holes }) }
}

/// Names scrutinized by the matches enclosing `hole`.
fn enclosing_scrutinees(p: &Program, hole: NodeId) -> Vec<String> {
    fn go(e: &Expr, hole: NodeId, acc: &mut Vec<String>) -> bool {
        if e.id == hole {
            return true;
        }
        if let ExprKind::Match(s, _) = &e.kind {
            if let Some(v) = s.as_var() {
                acc.push(v.to_string());
                let mut found = false;
                e.for_each_child(|c| found = found || go(c, hole, acc));
                if found {
                    return true;
                }
                acc.pop();
                return false;
            }
        }
        let mut found = false;
        e.for_each_child(|c| found = found || go(c, hole, acc));
        found
    }
    let mut acc = Vec::new();
    for b in p.bindings() {
        if go(&b.expr, hole, &mut acc) {
            break;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{run, FuelPolicy};
    use crate::synth::guess::hole_scope;
    use crate::synth::pcfg::Pcfg;
    use crate::synth::pushdown::push_down;
    use crate::synth::speculate::infer_with_examples;
    use crate::syntax::{parse, print};

    fn sketches(src: &str) -> Vec<String> {
        let p = parse(src).unwrap();
        let r = run(&p, FuelPolicy::default());
        let ctors = CtorTable::new(&p.type_decls);
        let ex = push_down(&p, &r, &ctors, 1000);
        let info = infer_with_examples(&p, &r, &ctors, 1000);
        let mut hole = None;
        p.walk_exprs(&mut |e| {
            if e.is_hole() && hole.is_none() {
                hole = Some(e.id)
            }
        });
        let scope = hole_scope(&p, &info, Pcfg::builtin(), hole.unwrap());
        refinements(&p, &ctors, &ex, &scope).into_iter().map(|s| print(&s.program)).collect()
    }

    #[test]
    fn split_on_list_parameter() {
        let got = sketches("let length x1 = (??)\n\nlet () = assert (length [0; 0] = 2)");
        assert_eq!(got.len(), 1);
        assert!(got[0].starts_with("let length x1 =\n  match x1 with\n  | [] -> (??)\n  | hd :: tail -> (??)\n"), "{}", got[0]);
    }

    #[test]
    fn function_from_io_examples() {
        let got = sketches("let append = (??)\n\nlet () = assert (append [1] [2] = [1; 2])");
        assert_eq!(got.len(), 3);
        assert!(got[0].starts_with("let append x1 x2 = (??)\n"), "{}", got[0]);
        assert!(got[1].contains("match x1 with"));
        assert!(got[2].contains("match x2 with"));
    }

    #[test]
    fn no_split_on_scalars_or_already_split() {
        let got = sketches("let f x1 = (??)\n\nlet () = assert (f 1 = 2)");
        assert!(got.is_empty());
        let got = sketches(
            "let f x1 =\n  match x1 with\n  | [] -> 0\n  | hd :: tail -> (??)\n\nlet () = assert (f [true] = 2)",
        );
        assert_eq!(got.len(), 1);
        assert!(got[0].contains("match tail with"), "{}", got[0]);
    }

    #[test]
    fn user_type_split_names() {
        let got = sketches(
            "type 'a ltree = Leaf | Node of 'a ltree * 'a * 'a ltree\n\nlet mirror x1 = (??)\n\nlet () = assert (mirror (Node (Leaf, 1, Leaf)) = Node (Leaf, 1, Leaf))",
        );
        assert_eq!(got.len(), 1);
        assert!(got[0].contains("| Leaf -> (??)\n  | Node (l1, a1, l2) -> (??)"), "{}", got[0]);
    }
}
