//! Type-directed enumeration of hole fillings in decreasing probability.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use super::pcfg::Pcfg;
use super::score::{const_price, ctor_price, Recency};
use crate::syntax::{parse_expr, Const, Expr, ExprKind, Item, NodeId, Program};
use crate::types::{pervasive_type, subst, CtorTable, Scheme, TyCtx, Type, TypeInfo};

/// A name visible at a hole.
#[derive(Clone, Debug)]
pub struct Entry {
    pub name: String,
    pub scheme: Scheme,
    /// Bound inside the enclosing top-level binding (a parameter, pattern
    /// variable or local let), as opposed to a top-level name.
    pub inner: bool,
    /// Visible at the hole in file order; other top-level names need the
    /// program to be reordered first.
    pub lexical: bool,
    /// Probability of picking this name among names.
    pub price: f64,
}

/// Everything the enumerator needs to know about one hole.
#[derive(Clone, Debug)]
pub struct HoleScope {
    pub hole: NodeId,
    pub goal: Type,
    /// Most recent first.
    pub entries: Vec<Entry>,
}

impl HoleScope {
    pub fn recency(&self) -> Recency {
        Recency(self.entries.iter().map(|e| e.name.clone()).collect())
    }

    pub fn inner_names(&self) -> BTreeSet<String> {
        self.entries.iter().filter(|e| e.inner).map(|e| e.name.clone()).collect()
    }
}

/// Variables of `t` not listed in `generic` become rigid constants.
fn skolemize(t: &Type, generic: &[u32]) -> Type {
    match t {
        Type::Var(v) if generic.contains(v) => t.clone(),
        Type::Var(v) => Type::con(&format!("'t{v}")),
        Type::Con(n, ts) => Type::Con(n.clone(), ts.iter().map(|x| skolemize(x, generic)).collect()),
        Type::Tuple(ts) => Type::Tuple(ts.iter().map(|x| skolemize(x, generic)).collect()),
        Type::Arrow(a, b) => Type::arrow(skolemize(a, generic), skolemize(b, generic)),
    }
}

/// Names at `hole` ranked by recency: lexically visible names innermost
/// first, then top-level names that are not yet visible in file order
/// (they become visible once the program is reordered).
pub fn hole_scope(p: &Program, info: &TypeInfo, g: &Pcfg, hole: NodeId) -> HoleScope {
    let env = info.hole_envs.get(&hole).cloned().unwrap_or_default();
    let mut base = 0;
    for item in &p.items {
        let Item::Let(b) = item else { continue };
        let mut inside = false;
        b.expr.walk(&mut |e| inside |= e.id == hole);
        if inside {
            if b.rec {
                base += b.pat.names().len();
            }
            break;
        }
        base += b.pat.names().len();
    }
    let mut seen = BTreeSet::new();
    let mut entries = Vec::new();
    for (i, (name, s)) in env.iter().enumerate().rev() {
        if seen.insert(name.clone()) {
            let scheme = Scheme { vars: s.vars.clone(), ty: skolemize(&s.ty, &s.vars) };
            entries.push(Entry { name: name.clone(), scheme, inner: i >= base, lexical: true, price: 0.0 });
        }
    }
    for b in p.bindings() {
        for n in b.pat.names() {
            if let (Some(s), true) = (info.top.get(&n), !seen.contains(&n)) {
                seen.insert(n.clone());
                let scheme = Scheme { vars: s.vars.clone(), ty: skolemize(&s.ty, &s.vars) };
                entries.push(Entry { name: n, scheme, inner: false, lexical: false, price: 0.0 });
            }
        }
    }
    for (i, e) in entries.iter_mut().enumerate() {
        e.price = g.get("name", "local") * g.local_rank(i + 1);
    }
    let goal = match info.type_of(hole) {
        Some(Type::Var(v)) => Type::Var(*v),
        Some(t) => skolemize(t, &[]),
        None => Type::Var(0),
    };
    HoleScope { hole, goal, entries }
}

/// A guessed term. `constant` terms mention no name bound inside the
/// enclosing top-level binding.
#[derive(Clone, Debug)]
pub struct Guess {
    pub expr: Expr,
    pub p: f64,
    pub constant: bool,
    /// The goal type as refined by this guess, in canonical variables.
    ty: Type,
}

/// Rename variables to 0..k in order of first occurrence.
fn canonical(t: &Type) -> (Type, Vec<u32>) {
    let mut vars = Vec::new();
    t.free_vars(&mut vars);
    let mut order: Vec<u32> = Vec::new();
    for v in vars {
        if !order.contains(&v) {
            order.push(v);
        }
    }
    let map: HashMap<u32, Type> = order.iter().enumerate().map(|(i, v)| (*v, Type::Var(i as u32))).collect();
    (subst(t, &map), order)
}

type Memo = HashMap<Type, (f64, Rc<Vec<Guess>>)>;

pub struct Guesser<'a> {
    g: &'a Pcfg,
    ctors: &'a CtorTable,
    scope: &'a HoleScope,
    consts: Vec<(Const, f64, Type)>,
    ctor_rows: Vec<(String, f64)>,
    pervasives: Vec<(String, f64)>,
    maxp: f64,
    memo: Memo,
    /// Set when some term was skipped for falling under the bound.
    pub cut: bool,
}

impl<'a> Guesser<'a> {
    pub fn new(g: &'a Pcfg, ctors: &'a CtorTable, scope: &'a HoleScope) -> Guesser<'a> {
        let mut consts = Vec::new();
        for (table, ty) in [("int", Type::int()), ("string", Type::string()), ("char", Type::char()), ("float", Type::float())] {
            for (key, _) in g.rows(table) {
                if let Ok(Expr { kind: ExprKind::Const(c), .. }) = parse_expr(key, &[]) {
                    let p = g.get("expr", "const") * const_price(g, &c);
                    if p > 0.0 {
                        consts.push((c, p, ty.clone()));
                    }
                }
            }
        }
        let mut ctor_rows: Vec<(String, f64)> = ctors
            .sigs
            .keys()
            .map(|c| (c.clone(), g.get("expr", "ctor") * ctor_price(g, ctors, c)))
            .filter(|(_, p)| *p > 0.0)
            .collect();
        ctor_rows.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let pervasives = g
            .rows("pervasive")
            .iter()
            .filter(|(n, p)| *p > 0.0 && pervasive_type(n, &mut TyCtx::new()).is_some())
            .map(|(n, p)| (n.clone(), g.get("name", "pervasive") * p))
            .collect();
        Guesser { g, ctors, scope, consts, ctor_rows, pervasives, maxp: g.max_leaf(), memo: HashMap::new(), cut: false }
    }

    /// All terms for the hole with probability at least `min_p`, best first.
    pub fn guesses(&mut self, min_p: f64, non_constant: bool) -> Vec<Guess> {
        let (goal, _) = canonical(&self.scope.goal);
        let all = self.enumerate(&goal, min_p);
        all.iter().take_while(|c| c.p >= min_p).filter(|c| !non_constant || !c.constant).cloned().collect()
    }

    fn enumerate(&mut self, goal: &Type, min_p: f64) -> Rc<Vec<Guess>> {
        if let Some((t, list)) = self.memo.get(goal) {
            if *t <= min_p {
                if list.iter().any(|c| c.p < min_p) {
                    self.cut = true;
                }
                return list.clone();
            }
        }
        let mut cx = TyCtx::new();
        let mut vars = Vec::new();
        goal.free_vars(&mut vars);
        let k = vars.iter().max().map(|m| m + 1).unwrap_or(0);
        for _ in 0..k {
            cx.fresh();
        }
        let mut out = Vec::new();
        self.leaves(&mut cx, goal, min_p, &mut out);
        self.constructions(&mut cx, goal, min_p, &mut out);
        self.applications(&mut cx, goal, min_p, &mut out);
        self.conditionals(&mut cx, goal, min_p, &mut out);
        out.sort_by(|a, b| b.p.total_cmp(&a.p));
        let list = Rc::new(out);
        self.memo.insert(goal.clone(), (min_p, list.clone()));
        list
    }

    fn admit(&mut self, p: f64, min_p: f64) -> bool {
        if p < min_p {
            self.cut = true;
            return false;
        }
        p > 0.0
    }

    fn leaves(&mut self, cx: &mut TyCtx, goal: &Type, min_p: f64, out: &mut Vec<Guess>) {
        let scope = self.scope;
        let var_p = self.g.get("expr", "var");
        for e in &scope.entries {
            let p = var_p * e.price;
            if !self.admit(p, min_p) {
                continue;
            }
            let m = cx.mark();
            let t = cx.instantiate(&e.scheme);
            if cx.unify(goal, &t).is_ok() {
                out.push(Guess { expr: Expr::var(e.name.clone()), p, constant: !e.inner, ty: cx.resolve(goal) });
            }
            cx.undo(m);
        }
        if matches!(cx.shallow(goal), Type::Arrow(..)) {
            for (name, q) in self.pervasives.clone() {
                let p = var_p * q;
                if !self.admit(p, min_p) {
                    continue;
                }
                let m = cx.mark();
                let t = pervasive_type(&name, cx).expect("known pervasive");
                if cx.unify(goal, &t).is_ok() {
                    out.push(Guess { expr: Expr::var(name), p, constant: true, ty: cx.resolve(goal) });
                }
                cx.undo(m);
            }
        }
        for (c, p, ty) in &self.consts {
            if *p < min_p {
                self.cut = true;
                continue;
            }
            let m = cx.mark();
            if cx.unify(goal, ty).is_ok() {
                out.push(Guess { expr: Expr::new(ExprKind::Const(c.clone())), p: *p, constant: true, ty: cx.resolve(goal) });
            }
            cx.undo(m);
        }
    }

    fn constructions(&mut self, cx: &mut TyCtx, goal: &Type, min_p: f64, out: &mut Vec<Guess>) {
        for (c, p0) in self.ctor_rows.clone() {
            if !self.admit(p0, min_p) {
                continue;
            }
            let sig = self.ctors.sigs[&c].clone();
            let m = cx.mark();
            let (ats, rt) = cx.ctor_type(&sig);
            if cx.unify(goal, &rt).is_ok() {
                let mut combos = Vec::new();
                self.args(cx, &ats, 0, p0, min_p, &mut Vec::new(), &mut combos);
                for (args, p) in combos {
                    let constant = args.iter().all(|a| a.1);
                    let exprs = args.into_iter().map(|a| a.0).collect();
                    let ty = cx.resolve(goal);
                    out.push(Guess { expr: Expr::ctor(c.clone(), exprs), p, constant, ty });
                }
            }
            cx.undo(m);
        }
    }

    fn applications(&mut self, cx: &mut TyCtx, goal: &Type, min_p: f64, out: &mut Vec<Guess>) {
        let app_p = self.g.get("expr", "app");
        let scope = self.scope;
        let mut callees: Vec<(String, f64, Option<&Scheme>)> =
            scope.entries.iter().map(|e| (e.name.clone(), app_p * e.price, Some(&e.scheme))).collect();
        callees.extend(self.pervasives.iter().map(|(n, q)| (n.clone(), app_p * q, None)));
        for (name, p0, scheme) in callees {
            if !self.admit(p0 * self.maxp, min_p) {
                continue;
            }
            let m = cx.mark();
            let t = match scheme {
                Some(s) => cx.instantiate(s),
                None => pervasive_type(&name, cx).expect("known pervasive"),
            };
            let t = cx.resolve(&t);
            let (params, res) = t.uncurry();
            if params.is_empty() || cx.unify(goal, res).is_err() {
                cx.undo(m);
                continue;
            }
            let params: Vec<Type> = params.into_iter().cloned().collect();
            let mut combos = Vec::new();
            self.args(cx, &params, 0, p0, min_p, &mut Vec::new(), &mut combos);
            for (args, p) in combos {
                if args.iter().all(|a| a.1) {
                    continue;
                }
                let exprs = args.into_iter().map(|a| a.0).collect();
                let ty = cx.resolve(goal);
                out.push(Guess { expr: Expr::app(Expr::var(name.clone()), exprs), p, constant: false, ty });
            }
            cx.undo(m);
        }
    }

    fn conditionals(&mut self, cx: &mut TyCtx, goal: &Type, min_p: f64, out: &mut Vec<Guess>) {
        let p0 = self.g.get("expr", "if");
        if !self.admit(p0 * self.maxp.powi(3), min_p) {
            return;
        }
        let types = [Type::bool(), goal.clone(), goal.clone()];
        let mut combos = Vec::new();
        self.args(cx, &types, 0, p0, min_p, &mut Vec::new(), &mut combos);
        for (mut args, p) in combos {
            if args[0].1 {
                continue;
            }
            let constant = args.iter().all(|a| a.1);
            let el = args.pop().unwrap().0;
            let th = args.pop().unwrap().0;
            let c = args.pop().unwrap().0;
            let expr = Expr::new(ExprKind::If(Box::new(c), Box::new(th), Box::new(el)));
            out.push(Guess { expr, p, constant, ty: cx.resolve(goal) });
        }
    }

    /// Every combination of arguments whose product with `acc` stays above
    /// `min_p`. Type variables shared between arguments are threaded through
    /// `cx`.
    #[allow(clippy::too_many_arguments)]
    fn args(
        &mut self,
        cx: &mut TyCtx,
        types: &[Type],
        idx: usize,
        acc: f64,
        min_p: f64,
        chosen: &mut Vec<(Expr, bool)>,
        out: &mut Vec<(Vec<(Expr, bool)>, f64)>,
    ) {
        if idx == types.len() {
            out.push((chosen.clone(), acc));
            return;
        }
        let rest = (types.len() - idx - 1) as i32;
        let budget = min_p / (acc * self.maxp.powi(rest));
        if budget > self.maxp {
            self.cut = true;
            return;
        }
        let at = cx.resolve(&types[idx]);
        let (canon, order) = canonical(&at);
        let list = self.enumerate(&canon, budget);
        for cand in list.iter() {
            if cand.p < budget {
                self.cut = true;
                break;
            }
            let m = cx.mark();
            let mut vars = Vec::new();
            cand.ty.free_vars(&mut vars);
            let mut map: HashMap<u32, Type> = HashMap::new();
            for v in vars {
                if !map.contains_key(&v) {
                    let t = match order.get(v as usize) {
                        Some(actual) => Type::Var(*actual),
                        None => cx.fresh(),
                    };
                    map.insert(v, t);
                }
            }
            if cx.unify(&at, &subst(&cand.ty, &map)).is_ok() {
                chosen.push((cand.expr.clone(), cand.constant));
                self.args(cx, types, idx + 1, acc * cand.p, min_p, chosen, out);
                chosen.pop();
            }
            cx.undo(m);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::score::score;
    use crate::syntax::{parse, print_expr};
    use crate::types::infer_program;

    fn setup(src: &str, name: &str, ty: Type) -> (Program, TypeInfo, HoleScope) {
        let p = parse(src).unwrap();
        let info = infer_program(&p, &[(name.to_string(), ty)]);
        let mut hole = None;
        p.walk_exprs(&mut |e| {
            if e.is_hole() {
                hole = Some(e.id)
            }
        });
        let scope = hole_scope(&p, &info, Pcfg::builtin(), hole.unwrap());
        (p, info, scope)
    }

    #[test]
    fn scope_ranks_and_inner_names() {
        let (_, _, s) = setup("let k = 3\n\nlet f x y = (??)\n\nlet later = 1", "f", Type::arrows(vec![Type::int(), Type::int()], Type::int()));
        let names: Vec<&str> = s.entries.iter().map(|e| e.name.as_str()).collect();
        assert_eq!(names, vec!["y", "x", "k", "f", "later"]);
        assert_eq!(s.inner_names(), ["x", "y"].iter().map(|s| s.to_string()).collect());
        assert_eq!(s.goal, Type::int());
    }

    #[test]
    fn guesses_are_sorted_typed_and_scored() {
        let (p, _, s) = setup("let f x l = (??)", "f", Type::arrows(vec![Type::int(), Type::list(Type::int())], Type::int()));
        let ctors = CtorTable::new(&p.type_decls);
        let g = Pcfg::builtin();
        let mut gs = Guesser::new(g, &ctors, &s);
        let out = gs.guesses(1e-6, false);
        assert!(out.len() > 5);
        assert_eq!(print_expr(&out[0].expr), "x");
        assert!(out.windows(2).all(|w| w[0].p >= w[1].p));
        assert!(out.iter().any(|c| print_expr(&c.expr) == "x + x"));
        assert!(!out.iter().any(|c| print_expr(&c.expr) == "l"));
        for c in &out {
            let sc = score(g, &ctors, &s.recency(), &c.expr).unwrap();
            assert!((sc - c.p).abs() <= 1e-12 * sc.max(1e-300), "{}", print_expr(&c.expr));
            assert!(c.p >= 1e-6);
        }
        assert!(gs.cut);
    }

    #[test]
    fn applications_need_a_non_constant_argument() {
        let (p, _, s) = setup("let f x = (??)", "f", Type::arrow(Type::int(), Type::int()));
        let ctors = CtorTable::new(&p.type_decls);
        let out = Guesser::new(Pcfg::builtin(), &ctors, &s).guesses(1e-7, false);
        assert!(out.iter().any(|c| print_expr(&c.expr) == "x + 1"));
        assert!(!out.iter().any(|c| print_expr(&c.expr) == "1 + 1"));
        let nc = Guesser::new(Pcfg::builtin(), &ctors, &s).guesses(1e-7, true);
        assert!(nc.iter().all(|c| !c.constant));
        assert!(!nc.iter().any(|c| print_expr(&c.expr) == "0"));
    }

    #[test]
    fn polymorphic_callees_thread_types() {
        let (p, _, s) = setup("let f a b = (??)", "f", Type::arrows(vec![Type::list(Type::int()); 2], Type::list(Type::int())));
        let ctors = CtorTable::new(&p.type_decls);
        let out = Guesser::new(Pcfg::builtin(), &ctors, &s).guesses(1e-6, false);
        assert!(out.iter().any(|c| print_expr(&c.expr) == "a @ b"));
        assert!(out.iter().any(|c| print_expr(&c.expr) == "b"));
        assert!(!out.iter().any(|c| print_expr(&c.expr) == "0"));
    }
}
