//! Free variables, let chains and other scope helpers.

use std::collections::BTreeSet;

use crate::interp::prims;
use crate::syntax::*;

pub fn is_pervasive(name: &str) -> bool {
    prims::lookup(name).is_some()
}

/// Free variables under ordinary lexical scoping (pervasives included).
pub fn free_vars(e: &Expr) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    free_in(e, &mut Vec::new(), &mut out, false);
    out
}

/// Free variables where every name bound anywhere in a let chain counts as
/// bound for the whole chain, regardless of order.
pub fn needed_names(e: &Expr) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    free_in(e, &mut Vec::new(), &mut out, true);
    out
}

fn free_in(e: &Expr, bound: &mut Vec<String>, out: &mut BTreeSet<String>, unordered: bool) {
    match &e.kind {
        ExprKind::Var(n) => {
            if !bound.iter().any(|b| b == n) {
                out.insert(n.clone());
            }
        }
        ExprKind::Fun(p, body) => {
            let k = bound.len();
            bound.extend(p.names());
            free_in(body, bound, out, unordered);
            bound.truncate(k);
        }
        ExprKind::Let(..) if unordered => {
            let (links, tail) = chain_refs(e);
            let k = bound.len();
            for l in &links {
                bound.extend(l.pat.names());
            }
            for l in &links {
                free_in(&l.expr, bound, out, unordered);
            }
            free_in(tail, bound, out, unordered);
            bound.truncate(k);
        }
        ExprKind::Let(b, body) => {
            let k = bound.len();
            if b.rec {
                bound.extend(b.pat.names());
            }
            free_in(&b.expr, bound, out, unordered);
            bound.truncate(k);
            bound.extend(b.pat.names());
            free_in(body, bound, out, unordered);
            bound.truncate(k);
        }
        ExprKind::Match(s, branches) => {
            free_in(s, bound, out, unordered);
            for br in branches {
                let k = bound.len();
                bound.extend(br.pat.names());
                free_in(&br.body, bound, out, unordered);
                bound.truncate(k);
            }
        }
        _ => e.for_each_child(|c| free_in(c, bound, out, unordered)),
    }
}

/// Free variables of the whole program under file-order scoping, excluding
/// pervasives. Each entry is (name, id of the offending Var node).
pub fn program_free_vars(p: &Program) -> Vec<(String, NodeId)> {
    let mut bound: Vec<String> = Vec::new();
    let mut out = Vec::new();
    for item in &p.items {
        match item {
            Item::Let(b) => {
                let k = bound.len();
                if b.rec {
                    bound.extend(b.pat.names());
                }
                free_sites(&b.expr, &mut bound, &mut out);
                bound.truncate(k);
                bound.extend(b.pat.names());
            }
            Item::Assert(a) => {
                free_sites(&a.lhs, &mut bound, &mut out);
                free_sites(&a.rhs, &mut bound, &mut out);
            }
        }
    }
    out.retain(|(n, _)| !is_pervasive(n));
    out
}

fn free_sites(e: &Expr, bound: &mut Vec<String>, out: &mut Vec<(String, NodeId)>) {
    match &e.kind {
        ExprKind::Var(n) => {
            if !bound.iter().any(|b| b == n) {
                out.push((n.clone(), e.id));
            }
        }
        ExprKind::Fun(p, body) => {
            let k = bound.len();
            bound.extend(p.names());
            free_sites(body, bound, out);
            bound.truncate(k);
        }
        ExprKind::Let(b, body) => {
            let k = bound.len();
            if b.rec {
                bound.extend(b.pat.names());
            }
            free_sites(&b.expr, bound, out);
            bound.truncate(k);
            bound.extend(b.pat.names());
            free_sites(body, bound, out);
            bound.truncate(k);
        }
        ExprKind::Match(s, branches) => {
            free_sites(s, bound, out);
            for br in branches {
                let k = bound.len();
                bound.extend(br.pat.names());
                free_sites(&br.body, bound, out);
                bound.truncate(k);
            }
        }
        _ => e.for_each_child(|c| free_sites(c, bound, out)),
    }
}

/// Borrowed view of a let chain: its bindings and final body.
pub fn chain_refs(e: &Expr) -> (Vec<&Binding>, &Expr) {
    let mut links = Vec::new();
    let mut cur = e;
    while let ExprKind::Let(b, body) = &cur.kind {
        links.push(&**b);
        cur = body;
    }
    (links, cur)
}

/// One `let ... in` of a chain, keeping the ids and attributes of the Let node.
#[derive(Clone, Debug)]
pub struct Link {
    pub let_id: NodeId,
    pub let_attrs: Attrs,
    pub binding: Binding,
}

/// Take apart a let chain. Let nodes carrying expression attributes end the
/// chain so their attributes stay attached.
pub fn split_chain(e: Expr) -> (Vec<Link>, Expr) {
    let mut links = Vec::new();
    let mut cur = e;
    loop {
        match cur.kind {
            ExprKind::Let(b, body) if cur.attrs.is_empty() || links.is_empty() => {
                links.push(Link { let_id: cur.id, let_attrs: cur.attrs, binding: *b });
                cur = *body;
                if !links.last().unwrap().let_attrs.is_empty() {
                    break;
                }
            }
            kind => {
                cur = Expr { id: cur.id, kind, attrs: cur.attrs };
                break;
            }
        }
    }
    (links, cur)
}

pub fn join_chain(links: Vec<Link>, tail: Expr) -> Expr {
    links.into_iter().rev().fold(tail, |body, l| Expr {
        id: l.let_id,
        kind: ExprKind::Let(Box::new(l.binding), Box::new(body)),
        attrs: l.let_attrs,
    })
}

/// Peel the `fun` chain of a binding's right-hand side, returning the body.
pub fn fun_body(e: &Expr) -> &Expr {
    let mut cur = e;
    while let ExprKind::Fun(_, body) = &cur.kind {
        cur = body;
    }
    cur
}

pub fn fun_body_mut(e: &mut Expr) -> &mut Expr {
    if !matches!(e.kind, ExprKind::Fun(..)) {
        return e;
    }
    match &mut e.kind {
        ExprKind::Fun(_, body) => fun_body_mut(body),
        _ => unreachable!(),
    }
}

/// Parameter names of the fun chain.
pub fn fun_params(e: &Expr) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = e;
    while let ExprKind::Fun(p, body) = &cur.kind {
        out.extend(p.names());
        cur = body;
    }
    out
}

/// Every name bound anywhere in the program.
pub fn all_bound_names(p: &Program) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for b in p.bindings() {
        out.extend(b.pat.names());
    }
    p.walk_exprs(&mut |e| collect_binders(e, &mut out));
    out
}

pub fn collect_binders(e: &Expr, out: &mut BTreeSet<String>) {
    match &e.kind {
        ExprKind::Fun(p, _) => out.extend(p.names()),
        ExprKind::Let(b, _) => out.extend(b.pat.names()),
        ExprKind::Match(_, branches) => {
            for br in branches {
                out.extend(br.pat.names());
            }
        }
        _ => {}
    }
}

/// Replace free occurrences of `from` with `to` (no capture check; names
/// are unique per scope by assumption).
pub fn rename_free(e: &mut Expr, from: &str, to: &str) {
    match &mut e.kind {
        ExprKind::Var(n) => {
            if n == from {
                *n = to.to_string();
            }
        }
        ExprKind::Fun(p, body) => {
            if !p.binds(from) {
                rename_free(body, from, to);
            }
        }
        ExprKind::Let(b, body) => {
            if !(b.rec && b.pat.binds(from)) {
                rename_free(&mut b.expr, from, to);
            }
            if !b.pat.binds(from) {
                rename_free(body, from, to);
            }
        }
        ExprKind::Match(s, branches) => {
            rename_free(s, from, to);
            for br in branches {
                if !br.pat.binds(from) {
                    rename_free(&mut br.body, from, to);
                }
            }
        }
        _ => e.for_each_child_mut(|c| rename_free(c, from, to)),
    }
}
