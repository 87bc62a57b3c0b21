//! Case-split normalization, destruction and extraction expressions.
//!
//! Dragging a subvalue out of its branch produces a single-arm "extraction"
//! match in an arbitrary position. Normalization turns such programs back
//! into idiomatic code: matches sit at the outermost level of a function,
//! each split happens once, and every arm is present.

use std::collections::BTreeSet;

use super::names::ctor_arg_names;
use super::scope::{all_bound_names, free_vars, fun_body_mut, join_chain, rename_free, split_chain, Link};
use super::NonlinearError;
use crate::interp::{self, FuelPolicy};
use crate::syntax::*;
use crate::types::{infer_program, CtorTable, TyCtx, Type};

struct Cx {
    ctors: CtorTable,
    taken: BTreeSet<String>,
    /// Id allocator (only `next_id` is used).
    ids: Program,
}

impl Cx {
    fn new(p: &Program) -> Cx {
        Cx {
            ctors: CtorTable::new(&p.type_decls),
            taken: all_bound_names(p),
            ids: Program { next_id: p.next_id, ..Program::default() },
        }
    }

    fn fresh_link(&mut self, l: &Link) -> Link {
        let mut l = l.clone();
        l.let_id = self.ids.fresh_id();
        self.ids.assign_fresh_binding_ids(&mut l.binding);
        l
    }
}

fn take(e: &mut Expr) -> Expr {
    std::mem::replace(e, Expr::hole())
}

fn is_fun(e: &Expr) -> bool {
    matches!(e.kind, ExprKind::Fun(..))
}

/// Normalize every function body (and every non-function top-level
/// right-hand side) of the program.
pub fn normalize_case_splits(p: &Program) -> Program {
    let mut out = p.clone();
    let mut cx = Cx::new(p);
    for item in &mut out.items {
        if let Item::Let(b) = item {
            normalize_root(&mut b.expr, &mut cx);
        }
    }
    out.next_id = cx.ids.next_id;
    out
}

fn normalize_root(e: &mut Expr, cx: &mut Cx) {
    let level = fun_body_mut(e);
    inner_levels(level, cx);
    push_lets(level, cx);
    simplify(level, &mut Vec::new());
    drop_marked(level);
    float(level, &cx.ctors);
    rehoist(level);
    complete(level, cx);
    drop_renamings(level, &mut Vec::new());
}

fn inner_levels(e: &mut Expr, cx: &mut Cx) {
    if is_fun(e) {
        normalize_root(e, cx);
    } else {
        e.for_each_child_mut(|c| inner_levels(c, cx));
    }
}

// Step 1: move leading lets into the arms of a tail match.

fn push_lets(e: &mut Expr, cx: &mut Cx) {
    if is_fun(e) {
        return;
    }
    let (links, mut tail) = split_chain(take(e));
    let ExprKind::Match(s, branches) = &mut tail.kind else {
        *e = join_chain(links, tail);
        return;
    };
    let arm_names: BTreeSet<String> = branches.iter().flat_map(|b| b.pat.names()).collect();
    let mut need = free_vars(s);
    let mut stay: Vec<bool> = links
        .iter()
        .map(|l| free_vars(&l.binding.expr).iter().any(|n| arm_names.contains(n)) || !l.let_attrs.is_empty())
        .collect();
    for (l, st) in links.iter().zip(&stay) {
        if *st {
            need.extend(free_vars(&l.binding.expr));
        }
    }
    loop {
        let mut changed = false;
        for (k, l) in links.iter().enumerate() {
            if !stay[k] && l.binding.pat.names().iter().any(|n| need.contains(n)) {
                stay[k] = true;
                need.extend(free_vars(&l.binding.expr));
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let (staying, moving): (Vec<_>, Vec<_>) = links.into_iter().zip(stay).partition(|(_, st)| *st);
    let moving: Vec<Link> = moving.into_iter().map(|(l, _)| l).collect();
    for (k, br) in branches.iter_mut().enumerate() {
        if !moving.is_empty() {
            let copies = if k == 0 { moving.clone() } else { moving.iter().map(|l| cx.fresh_link(l)).collect() };
            br.body = join_chain(copies, take(&mut br.body));
        }
        push_lets(&mut br.body, cx);
    }
    *e = join_chain(staying.into_iter().map(|(l, _)| l).collect(), tail);
}

// Step 2: a match on a variable already split by an enclosing arm reduces
// to the corresponding arm; a missing arm leaves an empty match.

struct Split {
    var: String,
    ctor: String,
    args: Vec<Pat>,
}

fn shadow(ctx: &[Split], names: &[String]) -> Vec<Split> {
    ctx.iter()
        .filter(|s| !names.contains(&s.var) && !s.args.iter().any(|a| a.names().iter().any(|n| names.contains(n))))
        .map(|s| Split { var: s.var.clone(), ctor: s.ctor.clone(), args: s.args.clone() })
        .collect()
}

fn reduce(ctx: &[Split], e: &mut Expr) -> bool {
    let ExprKind::Match(s, branches) = &mut e.kind else { return false };
    if branches.is_empty() {
        return false;
    }
    let Some(v) = s.as_var() else { return false };
    let Some(split) = ctx.iter().rev().find(|sp| sp.var == v) else { return false };
    let hit = branches.iter().position(|br| match &br.pat.kind {
        PatKind::Ctor(c, _) => *c == split.ctor,
        PatKind::Var(_) | PatKind::Wild => true,
        _ => false,
    });
    let Some(k) = hit else {
        branches.clear();
        return true;
    };
    let mut renames = Vec::new();
    match &branches[k].pat.kind {
        PatKind::Var(x) => renames.push((x.clone(), v.to_string())),
        PatKind::Ctor(_, ps) => {
            for (inner, outer) in ps.iter().zip(&split.args) {
                match (&inner.kind, &outer.kind) {
                    (PatKind::Wild, _) => {}
                    (PatKind::Var(x), PatKind::Var(y)) => renames.push((x.clone(), y.clone())),
                    _ => return false,
                }
            }
        }
        _ => return false,
    }
    let mut body = take(&mut branches[k].body);
    for (x, y) in renames {
        if x != y {
            rename_free(&mut body, &x, &y);
        }
    }
    *e = body;
    true
}

fn simplify(e: &mut Expr, ctx: &mut Vec<Split>) {
    if is_fun(e) {
        return;
    }
    while reduce(ctx, e) {}
    match &mut e.kind {
        ExprKind::Let(b, body) => {
            let mut inner = if b.rec { shadow(ctx, &b.pat.names()) } else { shadow(ctx, &[]) };
            simplify(&mut b.expr, &mut inner);
            let mut after = shadow(ctx, &b.pat.names());
            simplify(body, &mut after);
        }
        ExprKind::Match(s, branches) => {
            simplify(s, ctx);
            let var = s.as_var().map(str::to_string);
            for br in branches {
                let mut inner = shadow(ctx, &br.pat.names());
                if let (Some(v), PatKind::Ctor(c, args)) = (&var, &br.pat.kind) {
                    if !br.pat.binds(v) {
                        inner.push(Split { var: v.clone(), ctor: c.clone(), args: args.clone() });
                    }
                }
                simplify(&mut br.body, &mut inner);
            }
        }
        _ => e.for_each_child_mut(|c| simplify(c, ctx)),
    }
}

// Step 3: drop bindings whose right-hand side contains an empty match;
// any other empty match becomes a hole.

fn has_empty_match(e: &Expr) -> bool {
    let mut found = false;
    e.walk(&mut |x| found |= matches!(&x.kind, ExprKind::Match(_, bs) if bs.is_empty()));
    found
}

fn drop_marked(e: &mut Expr) {
    if is_fun(e) {
        return;
    }
    loop {
        match &mut e.kind {
            ExprKind::Let(b, body) if has_empty_match(&b.expr) => *e = take(body),
            ExprKind::Match(_, bs) if bs.is_empty() => {
                e.kind = ExprKind::Hole;
                e.attrs = Attrs::default();
            }
            _ => break,
        }
    }
    e.for_each_child_mut(drop_marked);
}

// Step 4: float extraction matches outward.

/// A single-arm match on a constructor of a type with several constructors.
fn is_extraction(e: &Expr, ctors: &CtorTable) -> bool {
    let ExprKind::Match(_, bs) = &e.kind else { return false };
    if bs.len() != 1 || !e.attrs.is_empty() {
        return false;
    }
    match &bs[0].pat.kind {
        PatKind::Ctor(c, args) => {
            args.iter().all(|a| matches!(a.kind, PatKind::Var(_) | PatKind::Wild))
                && ctors.sigs.get(c).is_some_and(|s| ctors.ctors_of(&s.type_name).len() > 1)
        }
        _ => false,
    }
}

fn float(e: &mut Expr, ctors: &CtorTable) {
    if is_fun(e) {
        return;
    }
    e.for_each_child_mut(|c| float(c, ctors));
    lift(e, ctors);
}

struct Lifted {
    id: NodeId,
    attrs: Attrs,
    scrutinee: Box<Expr>,
    pat: Pat,
}

fn lift(e: &mut Expr, ctors: &CtorTable) {
    let Some(m) = take_extraction(e, ctors) else { return };
    lift(e, ctors);
    let body = take(e);
    *e = Expr {
        id: m.id,
        kind: ExprKind::Match(m.scrutinee, vec![Branch { pat: m.pat, body }]),
        attrs: m.attrs,
    };
}

/// Find a child in a liftable position holding an extraction match, replace
/// it by the arm body and return the rest of the match.
fn take_extraction(e: &mut Expr, ctors: &CtorTable) -> Option<Lifted> {
    let n = slot_count(e);
    for k in 0..n {
        let candidate = slot(e, k).expect("slot index");
        if !is_extraction(candidate, ctors) {
            continue;
        }
        let m = take(candidate);
        let ExprKind::Match(s, mut bs) = m.kind else { unreachable!() };
        let br = bs.pop().expect("one arm");
        let binders = br.pat.names();
        let others = free_vars(e);
        let mut ok = !binders.iter().any(|b| others.contains(b));
        if let (ExprKind::Let(b, _), 1) = (&e.kind, k) {
            let sfv = free_vars(&s);
            ok &= !b.pat.names().iter().any(|n| sfv.contains(n));
        }
        let slot_ref = slot(e, k).expect("slot index");
        if ok {
            *slot_ref = br.body;
            return Some(Lifted { id: m.id, attrs: m.attrs, scrutinee: s, pat: br.pat });
        }
        *slot_ref = Expr { id: m.id, kind: ExprKind::Match(s, vec![br]), attrs: m.attrs };
    }
    None
}

fn slot_count(e: &Expr) -> usize {
    match &e.kind {
        ExprKind::App(_, args) => 1 + args.len(),
        ExprKind::Tuple(xs) | ExprKind::Ctor(_, xs) => xs.len(),
        ExprKind::If(..) | ExprKind::Match(..) => 1,
        ExprKind::Let(..) => 2,
        _ => 0,
    }
}

fn slot(e: &mut Expr, k: usize) -> Option<&mut Expr> {
    match &mut e.kind {
        ExprKind::App(f, args) => {
            if k == 0 {
                Some(f)
            } else {
                args.get_mut(k - 1)
            }
        }
        ExprKind::Tuple(xs) | ExprKind::Ctor(_, xs) => xs.get_mut(k),
        ExprKind::If(c, _, _) => (k == 0).then_some(&mut **c),
        ExprKind::Match(s, _) => (k == 0).then_some(&mut **s),
        ExprKind::Let(b, body) => match k {
            0 => Some(&mut b.expr),
            1 => Some(body),
            _ => None,
        },
        _ => None,
    }
}

// Step 5: bindings present identically in every arm and independent of
// the arm's variables move above the match.

fn link_key(l: &Link) -> String {
    print_expr(&Expr::let_in(l.binding.clone(), Expr::hole()))
}

fn rhs_needs(l: &Link) -> BTreeSet<String> {
    let mut fv = free_vars(&l.binding.expr);
    if l.binding.rec {
        for n in l.binding.pat.names() {
            fv.remove(&n);
        }
    }
    fv
}

fn rehoist(e: &mut Expr) {
    if is_fun(e) {
        return;
    }
    e.for_each_child_mut(rehoist);
    if !e.attrs.is_empty() {
        return;
    }
    let ExprKind::Match(s, branches) = &mut e.kind else { return };
    if branches.is_empty() {
        return;
    }
    let scrut_fv = free_vars(s);
    let mut arms: Vec<(Vec<String>, Vec<Link>, Expr)> = branches
        .iter_mut()
        .map(|br| {
            let (links, tail) = split_chain(take(&mut br.body));
            (br.pat.names(), links, tail)
        })
        .collect();
    // hoisted[a][k]: link k of arm a moves out.
    let mut hoisted: Vec<Vec<bool>> = arms.iter().map(|(_, ls, _)| vec![false; ls.len()]).collect();
    let mut order: Vec<usize> = Vec::new();
    loop {
        let mut progress = false;
        for k in 0..arms[0].1.len() {
            if hoisted[0][k] || !arms[0].1[k].let_attrs.is_empty() {
                continue;
            }
            let key = link_key(&arms[0].1[k]);
            if arms[0].1[k].binding.pat.names().iter().any(|n| scrut_fv.contains(n)) {
                continue;
            }
            let mut picks = Vec::new();
            for (a, (pat_names, links, _)) in arms.iter().enumerate() {
                let found = links.iter().enumerate().position(|(j, l)| !hoisted[a][j] && link_key(l) == key);
                let Some(j) = found else { break };
                let mut blocked: BTreeSet<String> = pat_names.iter().cloned().collect();
                for (i, other) in links.iter().enumerate() {
                    if i != j && !hoisted[a][i] {
                        blocked.extend(other.binding.pat.names());
                    }
                }
                if rhs_needs(&links[j]).iter().any(|n| blocked.contains(n)) {
                    break;
                }
                picks.push(j);
            }
            if picks.len() == arms.len() {
                for (a, j) in picks.into_iter().enumerate() {
                    hoisted[a][j] = true;
                }
                order.push(k);
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
    let mut out_links = Vec::new();
    for &k in &order {
        out_links.push(arms[0].1[k].clone());
    }
    for (a, (br, (_, links, tail))) in branches.iter_mut().zip(arms.drain(..)).enumerate() {
        let kept: Vec<Link> = links.into_iter().enumerate().filter(|(j, _)| !hoisted[a][*j]).map(|(_, l)| l).collect();
        br.body = join_chain(kept, tail);
    }
    if !out_links.is_empty() {
        let m = take(e);
        *e = join_chain(out_links, m);
    }
}

// Step 6: add missing constructor arms with hole bodies.

fn complete(e: &mut Expr, cx: &mut Cx) {
    if is_fun(e) {
        return;
    }
    e.for_each_child_mut(|c| complete(c, cx));
    let ExprKind::Match(_, branches) = &mut e.kind else { return };
    let mut type_name: Option<String> = None;
    for br in branches.iter() {
        let PatKind::Ctor(c, _) = &br.pat.kind else { return };
        let Some(sig) = cx.ctors.sigs.get(c) else { return };
        match &type_name {
            None => type_name = Some(sig.type_name.clone()),
            Some(t) if *t == sig.type_name => {}
            Some(_) => return,
        }
    }
    let Some(ty) = type_name else { return };
    let all: Vec<String> = cx.ctors.ctors_of(&ty).to_vec();
    let present = |c: &str, bs: &[Branch]| bs.iter().any(|b| matches!(&b.pat.kind, PatKind::Ctor(d, _) if d == c));
    if all.iter().all(|c| present(c, branches)) {
        return;
    }
    let mut old: Vec<Option<Branch>> = std::mem::take(branches).into_iter().map(Some).collect();
    for c in &all {
        let mut any = false;
        for slot in old.iter_mut() {
            if matches!(slot, Some(b) if matches!(&b.pat.kind, PatKind::Ctor(d, _) if d == c)) {
                branches.push(slot.take().unwrap());
                any = true;
            }
        }
        if !any {
            let names = ctor_arg_names(c, &cx.ctors, &mut cx.taken);
            let mut pat = Pat::new(PatKind::Ctor(c.clone(), names.into_iter().map(Pat::var).collect()));
            cx.ids.fresh_pat_ids(&mut pat);
            let mut body = Expr::hole();
            cx.ids.assign_fresh_ids(&mut body);
            branches.push(Branch { pat, body });
        }
    }
}

// Step 7: `let x = y in e`, with y bound by an enclosing arm, becomes e[y/x].

fn drop_renamings(e: &mut Expr, arm_bound: &mut Vec<String>) {
    if is_fun(e) {
        return;
    }
    loop {
        let ExprKind::Let(b, body) = &mut e.kind else { break };
        let renaming = match (&b.pat.kind, &b.expr.kind) {
            (PatKind::Var(x), ExprKind::Var(y))
                if !b.rec && b.expr.attrs.is_empty() && e.attrs.is_empty() && x != y && arm_bound.contains(y) =>
            {
                Some((x.clone(), y.clone()))
            }
            _ => None,
        };
        let Some((x, y)) = renaming else { break };
        let mut rest = take(body);
        rename_free(&mut rest, &x, &y);
        *e = rest;
    }
    match &mut e.kind {
        ExprKind::Match(s, branches) => {
            drop_renamings(s, arm_bound);
            for br in branches {
                let k = arm_bound.len();
                arm_bound.extend(br.pat.names());
                drop_renamings(&mut br.body, arm_bound);
                arm_bound.truncate(k);
            }
        }
        _ => e.for_each_child_mut(|c| drop_renamings(c, arm_bound)),
    }
}

/// Nested match selecting a subvalue of `scrutinee`: each path step names
/// a constructor and the index of the argument to descend into. An empty
/// path is the variable itself. Node ids are left as dummies.
pub fn extraction_expr(path: &[(String, usize)], scrutinee: &str, ctors: &CtorTable, taken: &mut BTreeSet<String>) -> Expr {
    let mut e = Expr::var(scrutinee);
    for (ctor, idx) in path {
        let names = ctor_arg_names(ctor, ctors, taken);
        let body = Expr::var(names.get(*idx).cloned().unwrap_or_default());
        let pat = Pat::new(PatKind::Ctor(ctor.clone(), names.into_iter().map(Pat::var).collect()));
        e = Expr::matching(e, vec![Branch { pat, body }]);
    }
    e
}

/// Type of the variable `name` as bound inside binding `b`, from static
/// inference or, failing that, from the values it takes at runtime.
fn variable_type(p: &Program, b: &Binding, name: &str, ctors: &CtorTable) -> Option<Type> {
    let mut pats = Vec::new();
    b.expr.walk_pats(&mut |q| {
        if q.as_var() == Some(name) {
            pats.push(q.id);
        }
    });
    let info = infer_program(p, &[]);
    if let Some(t) = pats.iter().find_map(|id| info.type_of(*id)).filter(|t| t.head().is_some_and(|h| ctors.is_adt(h))) {
        return Some(t.clone());
    }
    let run = interp::run(p, FuelPolicy::default());
    let mut cx = TyCtx::new();
    pats.iter()
        .flat_map(|id| run.trace.values_at(*id, None))
        .map(|v| v.type_of(ctors, &mut cx))
        .find(|t| t.head().is_some_and(|h| ctors.is_adt(h)))
}

/// Wrap the return positions of function `fun_id` in a match on `name`
/// with one hole-bodied arm per constructor, then normalize.
pub fn destruct(p: &Program, fun_id: NodeId, name: &str) -> Result<Program, NonlinearError> {
    let b = p.find_binding(fun_id).ok_or(NonlinearError::UnknownNode(fun_id))?;
    let ctors = CtorTable::new(&p.type_decls);
    let ty = variable_type(p, b, name, &ctors).ok_or_else(|| NonlinearError::NotAnAdt(name.to_string()))?;
    let type_name = ty.head().expect("adt").to_string();
    let mut cx = Cx::new(p);
    let mut out = p.clone();
    let target = out.find_binding_mut(fun_id).expect("found above");
    let mut arms: Vec<(String, Vec<String>)> = Vec::new();
    for c in ctors.ctors_of(&type_name) {
        arms.push((c.clone(), ctor_arg_names(c, &ctors, &mut cx.taken)));
    }
    let mut first = true;
    wrap_leaves(fun_body_mut(&mut target.expr), name, &arms, &mut cx, &mut first);
    out.next_id = cx.ids.next_id;
    Ok(normalize_case_splits(&out))
}

fn wrap_leaves(e: &mut Expr, name: &str, arms: &[(String, Vec<String>)], cx: &mut Cx, first: &mut bool) {
    match &mut e.kind {
        ExprKind::Let(_, body) => return wrap_leaves(body, name, arms, cx, first),
        ExprKind::Match(s, branches) if e.attrs.is_empty() => {
            if s.as_var() == Some(name) {
                return;
            }
            for br in branches {
                wrap_leaves(&mut br.body, name, arms, cx, first);
            }
            return;
        }
        _ => {}
    }
    let leaf = take(e);
    let mut branches = Vec::new();
    for (c, names) in arms {
        let mut pat = Pat::new(PatKind::Ctor(c.clone(), names.iter().map(Pat::var).collect()));
        cx.ids.fresh_pat_ids(&mut pat);
        let mut body = if leaf.is_hole() { Expr::hole() } else { leaf.clone() };
        if leaf.is_hole() || !*first {
            cx.ids.assign_fresh_ids(&mut body);
        } else {
            *first = false;
        }
        branches.push(Branch { pat, body });
    }
    let mut scrutinee = Expr::var(name);
    scrutinee.id = cx.ids.fresh_id();
    let mut m = Expr::matching(scrutinee, branches);
    m.id = cx.ids.fresh_id();
    *e = m;
}
