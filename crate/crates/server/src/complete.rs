//! Autocomplete for the expression editor: names in scope, small generated
//! literals, and the values currently on screen. Picking a value inserts
//! the expression that computes it at the edit site.

use std::collections::BTreeSet;

use manipos_core::interp::{FuelPolicy, Value};
use manipos_core::nonlinear::{extraction_expr, scope};
use manipos_core::syntax::{parse, print_expr, Binding, Expr, ExprKind, NodeId, Pat, Program};
use manipos_core::types::{infer_program, CtorTable, TyCtx, Type};
use serde::Serialize;

use crate::action::ValueRef;
use crate::render::{Focus, Painter, Snapshot};

/// Literal nesting depth and elements per level.
const LITERAL_DEPTH: usize = 2;
const LITERAL_BREADTH: usize = 3;

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "camelCase")]
pub enum SuggestionKind {
    Name,
    Literal,
    Value,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct Suggestion {
    /// What the menu shows.
    pub text: String,
    /// What goes into the editor when chosen.
    pub insert: String,
    pub kind: SuggestionKind,
    pub color_key: Option<u32>,
    pub value_ref: Option<ValueRef>,
}

/// Split an editor prefix into the finished part and the operand being typed.
fn split_prefix(prefix: &str) -> (&str, &str) {
    let cut = prefix.rfind(|c: char| c.is_whitespace() || c == '(').map_or(0, |i| i + 1);
    prefix.split_at(cut)
}

/// Variables bound around `node`, outermost first, as their patterns.
fn lexical_binders<'a>(p: &'a Program, node: NodeId) -> (Option<&'a Binding>, Vec<&'a Pat>) {
    fn go<'a>(e: &'a Expr, node: NodeId, acc: &mut Vec<&'a Pat>) -> bool {
        if e.id == node {
            return true;
        }
        let k = acc.len();
        let found = match &e.kind {
            ExprKind::Fun(q, body) => {
                acc.push(q);
                go(body, node, acc)
            }
            ExprKind::Let(b, body) => {
                if b.rec {
                    acc.push(&b.pat);
                }
                if go(&b.expr, node, acc) {
                    true
                } else {
                    acc.truncate(k);
                    acc.push(&b.pat);
                    go(body, node, acc)
                }
            }
            ExprKind::Match(s, branches) => {
                go(s, node, acc)
                    || branches.iter().any(|br| {
                        acc.push(&br.pat);
                        go(&br.body, node, acc) || {
                            acc.pop();
                            false
                        }
                    })
            }
            _ => {
                let mut found = false;
                e.for_each_child(|c| found = found || go(c, node, acc));
                found
            }
        };
        if !found {
            acc.truncate(k);
        }
        found
    }
    for b in p.bindings() {
        let mut acc = Vec::new();
        if go(&b.expr, node, &mut acc) {
            return (Some(b), acc);
        }
    }
    (None, Vec::new())
}

/// Up to `LITERAL_BREADTH` literals of type `t`, nested at most `depth` deep.
fn literals(t: &Type, ctors: &CtorTable, depth: usize) -> Vec<String> {
    let first = |t: &Type| literals(t, ctors, depth.saturating_sub(1)).into_iter().next();
    let out: Vec<String> = match t {
        Type::Var(_) => vec!["0".into(), "1".into(), "2".into()],
        Type::Tuple(ts) => ts.iter().map(first).collect::<Option<Vec<_>>>().map(|xs| format!("({})", xs.join(", "))).into_iter().collect(),
        Type::Arrow(..) => Vec::new(),
        Type::Con(name, args) => match (name.as_str(), args.as_slice()) {
            ("int", _) => vec!["0".into(), "1".into(), "2".into()],
            ("float", _) => vec!["0.".into(), "1.".into()],
            ("string", _) => vec!["\"\"".into(), "\"a\"".into()],
            ("char", _) => vec!["'a'".into()],
            ("bool", _) => vec!["false".into(), "true".into()],
            ("unit", _) => vec!["()".into()],
            ("list", [elem]) => {
                let mut v = vec!["[]".to_string()];
                if depth > 0 {
                    if let Some(x) = first(elem) {
                        for n in 1..=LITERAL_BREADTH {
                            v.push(format!("[{}]", vec![x.clone(); n].join("; ")));
                        }
                    }
                }
                v
            }
            ("option", [elem]) => {
                let mut v = vec!["None".to_string()];
                if depth > 0 {
                    if let Some(x) = first(elem) {
                        v.push(format!("Some {}", paren(&x)));
                    }
                }
                v
            }
            _ => ctors
                .ctors_of(name)
                .iter()
                .filter_map(|c| {
                    let sig = ctors.sigs.get(c)?;
                    if sig.args.is_empty() {
                        return Some(c.clone());
                    }
                    if depth == 0 {
                        return None;
                    }
                    let mut cx = TyCtx::new();
                    let (ats, rt) = cx.ctor_type(sig);
                    cx.try_unify(&rt, t);
                    let xs: Option<Vec<String>> = ats.iter().map(|a| first(&cx.resolve(a))).collect();
                    let xs = xs?;
                    Some(if xs.len() == 1 { format!("{c} {}", paren(&xs[0])) } else { format!("{c} ({})", xs.join(", ")) })
                })
                .collect(),
        },
    };
    // Lists keep their extra element-count row.
    let limit = if matches!(t, Type::Con(n, _) if n == "list") { LITERAL_BREADTH + 1 } else { LITERAL_BREADTH };
    out.into_iter().take(limit).collect()
}

fn paren(s: &str) -> String {
    if s.contains(' ') && !s.starts_with('[') && !s.starts_with('(') {
        format!("({s})")
    } else {
        s.to_string()
    }
}

/// Suggestions for an editor open on `context` (any expression node) with
/// text `prefix` typed so far.
pub fn autocomplete(text: &str, context: Option<NodeId>, prefix: &str, focus: &Focus, fuel: FuelPolicy) -> Vec<Suggestion> {
    let Ok(p) = parse(text) else { return Vec::new() };
    let snap = Snapshot::new(p, fuel);
    let p = &snap.program;
    let (head, token) = split_prefix(prefix);
    let mut out = Vec::new();
    let mut seen_text = BTreeSet::new();
    let mut add = |s: Suggestion, out: &mut Vec<Suggestion>| {
        let matches = s.text[head.len()..].starts_with(token) || s.insert[head.len()..].starts_with(token);
        if matches && (s.kind == SuggestionKind::Value || seen_text.insert(s.text.clone())) {
            out.push(s);
        }
    };

    let (owner, binders) = context.map(|c| lexical_binders(p, c)).unwrap_or((None, Vec::new()));
    let mut names: Vec<String> = Vec::new();
    for q in binders.iter().rev() {
        for n in q.names() {
            if !names.contains(&n) {
                names.push(n);
            }
        }
    }
    for b in p.bindings() {
        for n in b.pat.names() {
            if !names.contains(&n) {
                names.push(n);
            }
        }
    }
    for n in &names {
        add(
            Suggestion { text: format!("{head}{n}"), insert: format!("{head}{n}"), kind: SuggestionKind::Name, color_key: None, value_ref: None },
            &mut out,
        );
    }

    // Values on screen: lexical variables in the focused frame, then
    // top-level values.
    let mut visible: Vec<(String, NodeId, u32, Value)> = Vec::new();
    let frames: Vec<u32> = owner
        .map(|b| {
            let (rows, focused) = snap.function_frames(b, focus);
            focused.map(|i| rows[i].frames.clone()).unwrap_or_default()
        })
        .unwrap_or_default();
    for q in binders.iter().rev() {
        q.walk(&mut |x| {
            let Some(n) = x.as_var() else { return };
            if visible.iter().any(|(m, ..)| m == n) {
                return;
            }
            let found = frames.iter().rev().find_map(|f| snap.run.trace.values_at(x.id, Some(*f)).pop().map(|v| (*f, v)));
            if let Some((f, v)) = found {
                visible.push((n.to_string(), x.id, f, v));
            }
        });
    }
    for b in p.bindings() {
        let Some(n) = b.pat.as_var() else { continue };
        if visible.iter().any(|(m, ..)| m == n) || matches!(b.expr.kind, ExprKind::Fun(..)) {
            continue;
        }
        if let Some(v) = snap.run.top_env.lookup(n) {
            visible.push((n.to_string(), b.pat.id, 0, v.clone()));
        }
    }
    let mut painter = Painter::default();
    let mut taken = scope::all_bound_names(p);
    let mut types: Vec<Type> = Vec::new();
    let mut cx = TyCtx::new();
    for (name, pat, frame, v) in &visible {
        let view = painter.view(v, None, &snap.ctors);
        let mut entries = vec![(Vec::new(), v.to_string(), view.color_key)];
        entries.extend(view.subvalues.iter().map(|s| (s.path.clone(), s.text.clone(), s.color_key)));
        for (path, shown, key) in entries {
            let e = extraction_expr(&path, name, &snap.ctors, &mut taken.clone());
            add(
                Suggestion {
                    text: format!("{head}{shown}"),
                    insert: format!("{head}{}", print_expr(&e)),
                    kind: SuggestionKind::Value,
                    color_key: Some(key),
                    value_ref: Some(ValueRef { node: pat.0, frame: *frame, path }),
                },
                &mut out,
            );
        }
        let t = v.type_of(&snap.ctors, &mut cx);
        if !types.contains(&t) {
            types.push(t);
        }
        taken.insert(name.clone());
    }

    if let Some(c) = context {
        let info = infer_program(p, &[]);
        if let Some(t) = info.type_of(c) {
            types.insert(0, t.clone());
        }
    }
    for t in &types {
        for lit in literals(t, &snap.ctors, LITERAL_DEPTH) {
            add(
                Suggestion { text: format!("{head}{lit}"), insert: format!("{head}{lit}"), kind: SuggestionKind::Literal, color_key: None, value_ref: None },
                &mut out,
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(s: &[Suggestion]) -> Vec<&str> {
        s.iter().map(|x| x.text.as_str()).collect()
    }

    #[test]
    fn list_literals_for_list_in_scope() {
        let s = autocomplete("let xs = [1]\n", None, "[", &Focus::new(), FuelPolicy::default());
        assert!(texts(&s).contains(&"[0; 0; 0]"), "{:?}", texts(&s));
        assert!(texts(&s).contains(&"[]"));
    }

    #[test]
    fn each_visible_zero_gets_its_own_color() {
        let src = "let a = 0\n\nlet b = 0\n\nlet c = 0\n\nlet d = (??)\n";
        let p = parse(src).unwrap();
        let hole = p.top_binding("d").unwrap().expr.id;
        let s = autocomplete(src, Some(hole), "1 + ", &Focus::new(), FuelPolicy::default());
        let zeros: Vec<&Suggestion> = s.iter().filter(|x| x.text == "1 + 0" && x.kind == SuggestionKind::Value).collect();
        assert_eq!(zeros.len(), 3);
        let keys: BTreeSet<u32> = zeros.iter().map(|x| x.color_key.unwrap()).collect();
        assert_eq!(keys.len(), 3);
        assert_eq!(zeros[1].insert, "1 + b");
    }

    #[test]
    fn empty_scope_unknown_prefix() {
        assert!(autocomplete("", None, "zzz", &Focus::new(), FuelPolicy::default()).is_empty());
    }

    #[test]
    fn subvalue_inserts_extraction() {
        let src = "let rec length list =\n  (??)\n\nlet () = assert (length [7; 8] = 2)\n";
        let p = parse(src).unwrap();
        let mut hole = NodeId(0);
        p.walk_exprs(&mut |e| {
            if e.is_hole() {
                hole = e.id
            }
        });
        let s = autocomplete(src, Some(hole), "", &Focus::new(), FuelPolicy::default());
        let tail = s.iter().find(|x| x.text == "[8]").unwrap();
        assert_eq!(tail.insert, "match list with\n| hd :: tail -> tail");
        assert!(texts(&s).contains(&"length"));
    }
}
