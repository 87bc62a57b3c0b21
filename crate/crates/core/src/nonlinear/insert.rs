//! Insertion of hole-valued bindings for names that are used but never
//! defined.

use std::collections::BTreeMap;

use super::names::skeleton_params;
use super::scope::{chain_refs, fun_body_mut, is_pervasive, join_chain, split_chain, Link};
use crate::syntax::*;

/// Where a new binding can go.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Site {
    Top,
    /// Body of the fun chain of the top-level item at this index.
    FunBody(usize),
    /// Body of branch `k` of the match with this id.
    Arm(NodeId, usize),
}

#[derive(Default)]
struct Use {
    first: usize,
    arity: usize,
    common: Option<Vec<Site>>,
}

struct Walker {
    bound: Vec<String>,
    sites: Vec<Site>,
    uses: BTreeMap<String, Use>,
    seen: usize,
}

impl Walker {
    fn record(&mut self, name: &str, arity: usize) {
        if self.bound.iter().any(|b| b == name) || is_pervasive(name) {
            return;
        }
        let order = self.seen;
        self.seen += 1;
        let u = self.uses.entry(name.to_string()).or_insert_with(|| Use { first: order, ..Use::default() });
        u.arity = u.arity.max(arity);
        u.common = Some(match u.common.take() {
            None => self.sites.clone(),
            Some(prev) => prev.iter().zip(&self.sites).take_while(|(a, b)| a == b).map(|(a, _)| *a).collect(),
        });
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Var(n) => self.record(n, 0),
            ExprKind::App(f, args) => {
                match f.as_var() {
                    Some(n) => self.record(n, args.len()),
                    None => self.expr(f),
                }
                args.iter().for_each(|a| self.expr(a));
            }
            ExprKind::Fun(p, body) => {
                let k = self.bound.len();
                self.bound.extend(p.names());
                self.expr(body);
                self.bound.truncate(k);
            }
            ExprKind::Let(..) => {
                let (links, tail) = chain_refs(e);
                let k = self.bound.len();
                for l in &links {
                    self.bound.extend(l.pat.names());
                }
                for l in &links {
                    self.expr(&l.expr);
                }
                self.expr(tail);
                self.bound.truncate(k);
            }
            ExprKind::Match(s, branches) => {
                self.expr(s);
                for (i, br) in branches.iter().enumerate() {
                    let k = self.bound.len();
                    self.bound.extend(br.pat.names());
                    self.sites.push(Site::Arm(e.id, i));
                    self.expr(&br.body);
                    self.sites.pop();
                    self.bound.truncate(k);
                }
            }
            _ => e.for_each_child(|c| self.expr(c)),
        }
    }
}

/// Bind every free, non-pervasive name with a hole: `let x = (??)`, or a
/// skeleton `let f x1 .. xn = (??)` when it is applied to n arguments.
/// Each binding goes in the innermost scope enclosing all uses. Names are
/// looked up regardless of binding order, so uses that only need reordering
/// are left alone.
pub fn insert_missing_bindings(p: &Program) -> Program {
    let mut w = Walker { bound: Vec::new(), sites: vec![Site::Top], uses: BTreeMap::new(), seen: 0 };
    for b in p.bindings() {
        w.bound.extend(b.pat.names());
    }
    for (idx, item) in p.items.iter().enumerate() {
        match item {
            Item::Let(b) => {
                let mut e = &b.expr;
                let k = w.bound.len();
                while let ExprKind::Fun(pat, body) = &e.kind {
                    w.bound.extend(pat.names());
                    e = body;
                }
                let is_fun = !std::ptr::eq(e, &b.expr);
                if is_fun {
                    w.sites.push(Site::FunBody(idx));
                }
                w.expr(e);
                if is_fun {
                    w.sites.pop();
                }
                w.bound.truncate(k);
            }
            Item::Assert(a) => {
                w.expr(&a.lhs);
                w.expr(&a.rhs);
            }
        }
    }

    let mut by_site: BTreeMap<Site, Vec<(usize, String, usize)>> = BTreeMap::new();
    for (name, u) in w.uses {
        let site = *u.common.as_ref().and_then(|c| c.last()).unwrap_or(&Site::Top);
        by_site.entry(site).or_default().push((u.first, name, u.arity));
    }
    let mut out = p.clone();
    // Non-top sites first: top-level insertion shifts item indices.
    let mut top = Vec::new();
    for (site, mut names) in by_site.into_iter().rev() {
        names.sort();
        let bindings: Vec<Binding> = names.into_iter().map(|(_, n, a)| skeleton(&mut out, &n, a)).collect();
        match site {
            Site::Top => top = bindings,
            Site::FunBody(idx) => {
                let mut next = out.next_id;
                if let Item::Let(b) = &mut out.items[idx] {
                    wrap(fun_body_mut(&mut b.expr), bindings, &mut next);
                }
                out.next_id = next;
            }
            Site::Arm(mid, k) => {
                let mut next = out.next_id;
                if let Some(Expr { kind: ExprKind::Match(_, branches), .. }) = out.find_expr_mut(mid) {
                    wrap(&mut branches[k].body, bindings, &mut next);
                }
                out.next_id = next;
            }
        }
    }
    for b in top.into_iter().rev() {
        out.items.insert(0, Item::Let(b));
    }
    out
}

fn skeleton(p: &mut Program, name: &str, arity: usize) -> Binding {
    let mut body = Expr::hole();
    for x in skeleton_params(arity, &mut Default::default()).into_iter().rev() {
        body = Expr::fun(Pat::var(x), body);
    }
    let mut b = Binding::new(Pat::var(name), body);
    p.assign_fresh_binding_ids(&mut b);
    b
}

fn wrap(target: &mut Expr, bindings: Vec<Binding>, next_id: &mut u32) {
    let old = std::mem::replace(target, Expr::hole());
    let (mut links, tail) = split_chain(old);
    let new: Vec<Link> = bindings
        .into_iter()
        .map(|binding| {
            let let_id = NodeId(*next_id);
            *next_id += 1;
            Link { let_id, let_attrs: Attrs::default(), binding }
        })
        .collect();
    links.splice(0..0, new);
    *target = join_chain(links, tail);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn function_skeleton_at_top() {
        let p = parse("let length_int = length [1; 2]").unwrap();
        let q = insert_missing_bindings(&p);
        assert_eq!(print(&q), "let length x1 = (??)\n\nlet length_int = length [1; 2]\n");
    }

    #[test]
    fn tightest_scope() {
        let p = parse("let f l =\n  match l with\n  | [] -> 0\n  | hd :: tail -> k + hd").unwrap();
        let q = insert_missing_bindings(&p);
        assert_eq!(
            print(&q),
            "let f l =\n  match l with\n  | [] -> 0\n  | hd :: tail ->\n      let k = (??) in\n      k + hd\n"
        );
    }

    #[test]
    fn common_scope_is_function_body() {
        let p = parse("let f l =\n  match l with\n  | [] -> k\n  | hd :: tail -> k + hd").unwrap();
        let q = insert_missing_bindings(&p);
        assert!(print(&q).starts_with("let f l =\n  let k = (??) in\n  match l with"));
    }

    #[test]
    fn order_agnostic_names_are_not_inserted() {
        let p = parse("let a = b\n\nlet b = 1").unwrap();
        assert_eq!(insert_missing_bindings(&p), p);
    }

    #[test]
    fn fresh_ids_are_unique() {
        let p = parse("let a = (b, c 1)").unwrap();
        let q = insert_missing_bindings(&p);
        assert!(q.next_id > p.next_id);
        let mut ids = std::collections::HashSet::new();
        q.walk_exprs(&mut |e| assert!(ids.insert(e.id)));
    }
}
