//! Hindley-Milner inference for the mini-ML subset.
//!
//! Inference is best effort: a unification failure is recorded and the
//! offending node gets a fresh type, so every node of a partially broken
//! program still ends up with some type.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use crate::syntax::*;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Var(u32),
    Con(String, Vec<Type>),
    Tuple(Vec<Type>),
    Arrow(Box<Type>, Box<Type>),
}

impl Type {
    pub fn con(name: &str) -> Type {
        Type::Con(name.to_string(), Vec::new())
    }
    pub fn int() -> Type {
        Type::con("int")
    }
    pub fn float() -> Type {
        Type::con("float")
    }
    pub fn string() -> Type {
        Type::con("string")
    }
    pub fn char() -> Type {
        Type::con("char")
    }
    pub fn bool() -> Type {
        Type::con("bool")
    }
    pub fn unit() -> Type {
        Type::con("unit")
    }
    pub fn list(t: Type) -> Type {
        Type::Con("list".into(), vec![t])
    }
    pub fn option(t: Type) -> Type {
        Type::Con("option".into(), vec![t])
    }
    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Box::new(a), Box::new(b))
    }
    /// `a1 -> ... -> an -> r`
    pub fn arrows(args: Vec<Type>, r: Type) -> Type {
        args.into_iter().rev().fold(r, |acc, a| Type::arrow(a, acc))
    }

    /// Split `a1 -> ... -> an -> r` into its arguments and final result.
    pub fn uncurry(&self) -> (Vec<&Type>, &Type) {
        let mut args = Vec::new();
        let mut t = self;
        while let Type::Arrow(a, b) = t {
            args.push(&**a);
            t = b;
        }
        (args, t)
    }

    pub fn free_vars(&self, out: &mut Vec<u32>) {
        match self {
            Type::Var(v) => {
                if !out.contains(v) {
                    out.push(*v)
                }
            }
            Type::Con(_, ts) | Type::Tuple(ts) => ts.iter().for_each(|t| t.free_vars(out)),
            Type::Arrow(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
        }
    }

    pub fn is_ground(&self) -> bool {
        let mut v = Vec::new();
        self.free_vars(&mut v);
        v.is_empty()
    }

    /// Head type name of a constructor type (`list`, `tree`, ...).
    pub fn head(&self) -> Option<&str> {
        match self {
            Type::Con(n, _) => Some(n),
            _ => None,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, names: &BTreeMap<u32, String>, level: u8) -> fmt::Result {
        match self {
            Type::Var(v) => match names.get(v) {
                Some(n) => write!(f, "'{n}"),
                None => write!(f, "'t{v}"),
            },
            Type::Con(n, args) => {
                match args.len() {
                    0 => {}
                    1 => {
                        args[0].fmt_at(f, names, 2)?;
                        write!(f, " ")?;
                    }
                    _ => {
                        write!(f, "(")?;
                        for (i, a) in args.iter().enumerate() {
                            if i > 0 {
                                write!(f, ", ")?;
                            }
                            a.fmt_at(f, names, 0)?;
                        }
                        write!(f, ") ")?;
                    }
                }
                write!(f, "{n}")
            }
            Type::Tuple(ts) => {
                if level > 1 {
                    write!(f, "(")?;
                }
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " * ")?;
                    }
                    t.fmt_at(f, names, 2)?;
                }
                if level > 1 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Type::Arrow(a, b) => {
                if level > 0 {
                    write!(f, "(")?;
                }
                a.fmt_at(f, names, 1)?;
                write!(f, " -> ")?;
                b.fmt_at(f, names, 0)?;
                if level > 0 {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// Type variables print as `'a`, `'b`, ... in order of first appearance.
impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut vars = Vec::new();
        self.free_vars(&mut vars);
        let names = vars
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let letter = (b'a' + (i % 26) as u8) as char;
                let name = if i < 26 { letter.to_string() } else { format!("{letter}{}", i / 26) };
                (*v, name)
            })
            .collect();
        self.fmt_at(f, &names, 0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scheme {
    pub vars: Vec<u32>,
    pub ty: Type,
}

impl Scheme {
    pub fn mono(ty: Type) -> Scheme {
        Scheme { vars: Vec::new(), ty }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum TypeError {
    #[error("cannot unify {0} with {1}")]
    Mismatch(Type, Type),
    #[error("occurs check: {0} in {1}")]
    Occurs(Type, Type),
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("unknown type `{0}`")]
    UnknownType(String),
}

/// Signature of a data constructor.
#[derive(Clone, Debug)]
pub struct CtorSig {
    pub type_name: String,
    pub params: Vec<u32>,
    pub args: Vec<Type>,
    pub result: Type,
}

/// Constructors grouped by type, in declaration order.
#[derive(Clone, Debug, Default)]
pub struct CtorTable {
    pub sigs: HashMap<String, CtorSig>,
    pub by_type: BTreeMap<String, Vec<String>>,
}

impl CtorTable {
    pub fn new(decls: &[TypeDecl]) -> CtorTable {
        let mut t = CtorTable::default();
        let mut next = 1_000_000u32;
        let add = |t: &mut CtorTable, name: &str, ty: &str, params: Vec<u32>, args: Vec<Type>, result: Type| {
            t.sigs.insert(
                name.to_string(),
                CtorSig { type_name: ty.to_string(), params, args, result },
            );
            t.by_type.entry(ty.to_string()).or_default().push(name.to_string());
        };
        let a = Type::Var(0);
        add(&mut t, "false", "bool", vec![], vec![], Type::bool());
        add(&mut t, "true", "bool", vec![], vec![], Type::bool());
        add(&mut t, "()", "unit", vec![], vec![], Type::unit());
        add(&mut t, "[]", "list", vec![0], vec![], Type::list(a.clone()));
        add(&mut t, "::", "list", vec![0], vec![a.clone(), Type::list(a.clone())], Type::list(a.clone()));
        add(&mut t, "None", "option", vec![0], vec![], Type::option(a.clone()));
        add(&mut t, "Some", "option", vec![0], vec![a.clone()], Type::option(a));
        for d in decls {
            let vars: Vec<u32> = d
                .params
                .iter()
                .map(|_| {
                    next += 1;
                    next
                })
                .collect();
            let scope: HashMap<&str, u32> = d.params.iter().map(String::as_str).zip(vars.iter().copied()).collect();
            let result = Type::Con(d.name.clone(), vars.iter().map(|v| Type::Var(*v)).collect());
            for c in &d.ctors {
                let args = c.args.iter().map(|te| from_type_expr(te, &scope)).collect();
                add(&mut t, &c.name, &d.name, vars.clone(), args, result.clone());
            }
        }
        t
    }

    pub fn ctors_of(&self, type_name: &str) -> &[String] {
        self.by_type.get(type_name).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_adt(&self, type_name: &str) -> bool {
        self.by_type.contains_key(type_name)
    }

    pub fn arity(&self, ctor: &str) -> Option<usize> {
        self.sigs.get(ctor).map(|s| s.args.len())
    }

    pub fn user_ctors(&self) -> Vec<&str> {
        let builtin = ["bool", "unit", "list", "option"];
        let mut out = Vec::new();
        for (ty, cs) in &self.by_type {
            if !builtin.contains(&ty.as_str()) {
                out.extend(cs.iter().map(String::as_str));
            }
        }
        out
    }
}

fn from_type_expr(te: &TypeExpr, scope: &HashMap<&str, u32>) -> Type {
    match te {
        TypeExpr::Var(v) => scope.get(v.as_str()).map(|n| Type::Var(*n)).unwrap_or_else(|| Type::con(v)),
        TypeExpr::Con(n, args) => Type::Con(n.clone(), args.iter().map(|a| from_type_expr(a, scope)).collect()),
        TypeExpr::Tuple(ts) => Type::Tuple(ts.iter().map(|a| from_type_expr(a, scope)).collect()),
        TypeExpr::Arrow(a, b) => Type::arrow(from_type_expr(a, scope), from_type_expr(b, scope)),
    }
}

/// Mutable substitution with an undo trail, shared by inference and the
/// type-directed enumerator.
#[derive(Clone, Debug, Default)]
pub struct TyCtx {
    bindings: Vec<Option<Type>>,
    trail: Vec<u32>,
}

impl TyCtx {
    pub fn new() -> TyCtx {
        TyCtx::default()
    }

    pub fn fresh(&mut self) -> Type {
        self.bindings.push(None);
        Type::Var(self.bindings.len() as u32 - 1)
    }

    pub fn mark(&self) -> usize {
        self.trail.len()
    }

    pub fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            self.bindings[v as usize] = None;
        }
    }

    fn lookup(&self, v: u32) -> Option<&Type> {
        self.bindings.get(v as usize).and_then(Option::as_ref)
    }

    /// Follow variable bindings at the head only.
    pub fn shallow(&self, t: &Type) -> Type {
        let mut t = t.clone();
        while let Type::Var(v) = t {
            match self.lookup(v) {
                Some(b) => t = b.clone(),
                None => break,
            }
        }
        t
    }

    pub fn resolve(&self, t: &Type) -> Type {
        match self.shallow(t) {
            Type::Var(v) => Type::Var(v),
            Type::Con(n, ts) => Type::Con(n, ts.iter().map(|x| self.resolve(x)).collect()),
            Type::Tuple(ts) => Type::Tuple(ts.iter().map(|x| self.resolve(x)).collect()),
            Type::Arrow(a, b) => Type::arrow(self.resolve(&a), self.resolve(&b)),
        }
    }

    fn occurs(&self, v: u32, t: &Type) -> bool {
        match self.shallow(t) {
            Type::Var(w) => v == w,
            Type::Con(_, ts) | Type::Tuple(ts) => ts.iter().any(|x| self.occurs(v, x)),
            Type::Arrow(a, b) => self.occurs(v, &a) || self.occurs(v, &b),
        }
    }

    fn bind(&mut self, v: u32, t: Type) {
        if v as usize >= self.bindings.len() {
            self.bindings.resize(v as usize + 1, None);
        }
        self.bindings[v as usize] = Some(t);
        self.trail.push(v);
    }

    pub fn unify(&mut self, a: &Type, b: &Type) -> Result<(), TypeError> {
        let (a, b) = (self.shallow(a), self.shallow(b));
        match (&a, &b) {
            (Type::Var(x), Type::Var(y)) if x == y => Ok(()),
            (Type::Var(x), t) | (t, Type::Var(x)) => {
                if self.occurs(*x, t) {
                    return Err(TypeError::Occurs(Type::Var(*x), self.resolve(t)));
                }
                self.bind(*x, t.clone());
                Ok(())
            }
            (Type::Con(n, xs), Type::Con(m, ys)) if n == m && xs.len() == ys.len() => {
                xs.iter().zip(ys).try_for_each(|(x, y)| self.unify(x, y))
            }
            (Type::Tuple(xs), Type::Tuple(ys)) if xs.len() == ys.len() => {
                xs.iter().zip(ys).try_for_each(|(x, y)| self.unify(x, y))
            }
            (Type::Arrow(a1, b1), Type::Arrow(a2, b2)) => {
                self.unify(a1, a2)?;
                self.unify(b1, b2)
            }
            _ => Err(TypeError::Mismatch(self.resolve(&a), self.resolve(&b))),
        }
    }

    /// Unify, rolling back partial bindings on failure.
    pub fn try_unify(&mut self, a: &Type, b: &Type) -> bool {
        let m = self.mark();
        if self.unify(a, b).is_ok() {
            true
        } else {
            self.undo(m);
            false
        }
    }

    pub fn instantiate(&mut self, s: &Scheme) -> Type {
        if s.vars.is_empty() {
            return s.ty.clone();
        }
        let map: HashMap<u32, Type> = s.vars.iter().map(|v| (*v, self.fresh())).collect();
        subst(&s.ty, &map)
    }

    /// Instantiate a type whose variables are all considered generic.
    pub fn instantiate_all(&mut self, t: &Type) -> Type {
        let mut vars = Vec::new();
        t.free_vars(&mut vars);
        self.instantiate(&Scheme { vars, ty: t.clone() })
    }

    pub fn ctor_type(&mut self, sig: &CtorSig) -> (Vec<Type>, Type) {
        let map: HashMap<u32, Type> = sig.params.iter().map(|v| (*v, self.fresh())).collect();
        (sig.args.iter().map(|a| subst(a, &map)).collect(), subst(&sig.result, &map))
    }
}

pub fn subst(t: &Type, map: &HashMap<u32, Type>) -> Type {
    match t {
        Type::Var(v) => map.get(v).cloned().unwrap_or(Type::Var(*v)),
        Type::Con(n, ts) => Type::Con(n.clone(), ts.iter().map(|x| subst(x, map)).collect()),
        Type::Tuple(ts) => Type::Tuple(ts.iter().map(|x| subst(x, map)).collect()),
        Type::Arrow(a, b) => Type::arrow(subst(a, map), subst(b, map)),
    }
}

/// Types of the built-in functions.
pub fn pervasive_type(name: &str, cx: &mut TyCtx) -> Option<Type> {
    let int = Type::int;
    let float = Type::float;
    let bin = |t: Type, r: Type| Type::arrows(vec![t.clone(), t], r);
    Some(match name {
        "+" | "-" | "*" | "/" | "mod" => bin(int(), int()),
        "+." | "-." | "*." | "/." => bin(float(), float()),
        "=" | "<>" | "<" | ">" | "<=" | ">=" | "==" | "!=" => {
            let a = cx.fresh();
            bin(a, Type::bool())
        }
        "&&" | "||" => bin(Type::bool(), Type::bool()),
        "not" => Type::arrow(Type::bool(), Type::bool()),
        "^" => bin(Type::string(), Type::string()),
        "@" => {
            let a = cx.fresh();
            bin(Type::list(a.clone()), Type::list(a))
        }
        "max" | "min" => {
            let a = cx.fresh();
            bin(a.clone(), a)
        }
        "~-" => Type::arrow(int(), int()),
        _ => return None,
    })
}

pub type TypeEnv = Vec<(String, Scheme)>;

/// Result of inferring a whole program.
#[derive(Clone, Debug, Default)]
pub struct TypeInfo {
    /// Resolved type of every expression and pattern node.
    pub node_types: HashMap<NodeId, Type>,
    /// Names in scope at every hole, innermost last, with resolved schemes.
    pub hole_envs: HashMap<NodeId, TypeEnv>,
    /// Schemes of top-level names.
    pub top: HashMap<String, Scheme>,
    pub errors: Vec<(NodeId, TypeError)>,
}

impl TypeInfo {
    pub fn type_of(&self, id: NodeId) -> Option<&Type> {
        self.node_types.get(&id)
    }
}

/// Infer types for `p`. `assumed` gives monotypes that top-level bindings
/// are unified with before their right-hand sides are checked.
pub fn infer_program(p: &Program, assumed: &[(String, Type)]) -> TypeInfo {
    let mut inf = Infer {
        cx: TyCtx::new(),
        ctors: CtorTable::new(&p.type_decls),
        raw: HashMap::new(),
        hole_envs: HashMap::new(),
        errors: Vec::new(),
        assumed: assumed.iter().cloned().collect(),
    };
    let mut env: TypeEnv = Vec::new();
    let mut top = HashMap::new();
    for item in &p.items {
        match item {
            Item::Let(b) => {
                inf.binding(b, &mut env, true);
                for n in b.pat.names() {
                    if let Some((_, s)) = env.iter().rev().find(|(m, _)| *m == n) {
                        top.insert(n, s.clone());
                    }
                }
            }
            Item::Assert(a) => {
                let l = inf.expr(&a.lhs, &env);
                let r = inf.expr(&a.rhs, &env);
                inf.unify_at(a.id, &l, &r);
            }
        }
    }
    let cx = &inf.cx;
    let resolve_scheme = |s: &Scheme| Scheme { vars: s.vars.clone(), ty: cx.resolve(&s.ty) };
    TypeInfo {
        node_types: inf.raw.iter().map(|(k, t)| (*k, cx.resolve(t))).collect(),
        hole_envs: inf
            .hole_envs
            .iter()
            .map(|(k, e)| (*k, e.iter().map(|(n, s)| (n.clone(), resolve_scheme(s))).collect()))
            .collect(),
        top: top.iter().map(|(k, s)| (k.clone(), resolve_scheme(s))).collect(),
        errors: inf.errors,
    }
}

struct Infer {
    cx: TyCtx,
    ctors: CtorTable,
    raw: HashMap<NodeId, Type>,
    hole_envs: HashMap<NodeId, TypeEnv>,
    errors: Vec<(NodeId, TypeError)>,
    assumed: HashMap<String, Type>,
}

impl Infer {
    fn unify_at(&mut self, id: NodeId, a: &Type, b: &Type) {
        let m = self.cx.mark();
        if let Err(e) = self.cx.unify(a, b) {
            self.cx.undo(m);
            self.errors.push((id, e));
        }
    }

    fn record(&mut self, id: NodeId, t: &Type) {
        self.raw.insert(id, t.clone());
    }

    fn env_vars(&self, env: &TypeEnv) -> HashSet<u32> {
        let mut out = Vec::new();
        for (_, s) in env {
            let mut fv = Vec::new();
            self.cx.resolve(&s.ty).free_vars(&mut fv);
            out.extend(fv.into_iter().filter(|v| !s.vars.contains(v)));
        }
        out.into_iter().collect()
    }

    fn generalize(&self, env: &TypeEnv, t: &Type) -> Scheme {
        let t = self.cx.resolve(t);
        let mut fv = Vec::new();
        t.free_vars(&mut fv);
        let fixed = self.env_vars(env);
        Scheme { vars: fv.into_iter().filter(|v| !fixed.contains(v)).collect(), ty: t }
    }

    fn binding(&mut self, b: &Binding, env: &mut TypeEnv, top: bool) {
        let pt = self.pat(&b.pat, &mut Vec::new());
        if top {
            if let Some(name) = b.name() {
                if let Some(t) = self.assumed.get(name).cloned() {
                    let t = self.cx.instantiate_all(&t);
                    self.unify_at(b.id, &pt, &t);
                }
            }
        }
        let mut inner = env.clone();
        if b.rec {
            for (n, t) in pat_bindings(&b.pat, &self.raw) {
                inner.push((n, Scheme::mono(t)));
            }
        }
        let rt = self.expr(&b.expr, &inner);
        self.unify_at(b.id, &pt, &rt);
        let generalizable = matches!(b.expr.kind, ExprKind::Fun(..));
        for (n, t) in pat_bindings(&b.pat, &self.raw) {
            let s = if generalizable { self.generalize(env, &t) } else { Scheme::mono(t) };
            env.push((n, s));
        }
    }

    /// Type a pattern, appending the variables it binds to `out`.
    fn pat(&mut self, p: &Pat, out: &mut Vec<(String, Type)>) -> Type {
        let t = match &p.kind {
            PatKind::Var(n) => {
                let t = self.cx.fresh();
                out.push((n.clone(), t.clone()));
                t
            }
            PatKind::Wild => self.cx.fresh(),
            PatKind::Tuple(ps) => Type::Tuple(ps.iter().map(|q| self.pat(q, out)).collect()),
            PatKind::Ctor(c, args) => match self.ctors.sigs.get(c).cloned() {
                Some(sig) => {
                    let (ats, rt) = self.cx.ctor_type(&sig);
                    for (q, at) in args.iter().zip(ats) {
                        let qt = self.pat(q, out);
                        self.unify_at(q.id, &qt, &at);
                    }
                    rt
                }
                None => {
                    self.errors.push((p.id, TypeError::UnknownType(c.clone())));
                    self.cx.fresh()
                }
            },
        };
        self.record(p.id, &t);
        t
    }

    fn lookup(&mut self, id: NodeId, name: &str, env: &TypeEnv) -> Type {
        if let Some((_, s)) = env.iter().rev().find(|(n, _)| n == name) {
            let s = s.clone();
            return self.cx.instantiate(&s);
        }
        if let Some(t) = pervasive_type(name, &mut self.cx) {
            return t;
        }
        self.errors.push((id, TypeError::Unbound(name.to_string())));
        self.cx.fresh()
    }

    fn expr(&mut self, e: &Expr, env: &TypeEnv) -> Type {
        let t = match &e.kind {
            ExprKind::Hole => {
                self.hole_envs.insert(e.id, env.clone());
                self.cx.fresh()
            }
            ExprKind::Const(c) => match c {
                Const::Int(_) => Type::int(),
                Const::Float(_) => Type::float(),
                Const::Str(_) => Type::string(),
                Const::Char(_) => Type::char(),
            },
            ExprKind::Var(n) => self.lookup(e.id, n, env),
            ExprKind::Ctor(c, args) => {
                let arg_types: Vec<Type> = args.iter().map(|a| self.expr(a, env)).collect();
                match self.ctors.sigs.get(c).cloned() {
                    Some(sig) => {
                        let (ats, rt) = self.cx.ctor_type(&sig);
                        for ((a, at), expect) in args.iter().zip(&arg_types).zip(&ats) {
                            self.unify_at(a.id, at, expect);
                        }
                        rt
                    }
                    None => {
                        self.errors.push((e.id, TypeError::UnknownType(c.clone())));
                        self.cx.fresh()
                    }
                }
            }
            ExprKind::Fun(p, body) => {
                let mut bound = Vec::new();
                let pt = self.pat(p, &mut bound);
                let mut inner = env.clone();
                inner.extend(bound.into_iter().map(|(n, t)| (n, Scheme::mono(t))));
                let bt = self.expr(body, &inner);
                Type::arrow(pt, bt)
            }
            ExprKind::App(f, args) => {
                let mut ft = self.expr(f, env);
                for a in args {
                    let at = self.expr(a, env);
                    let r = self.cx.fresh();
                    self.unify_at(a.id, &ft, &Type::arrow(at, r.clone()));
                    ft = r;
                }
                ft
            }
            ExprKind::Let(b, body) => {
                let mut inner = env.clone();
                self.binding(b, &mut inner, false);
                self.expr(body, &inner)
            }
            ExprKind::Tuple(items) => Type::Tuple(items.iter().map(|x| self.expr(x, env)).collect()),
            ExprKind::If(c, t, el) => {
                let ct = self.expr(c, env);
                self.unify_at(c.id, &ct, &Type::bool());
                let tt = self.expr(t, env);
                let et = self.expr(el, env);
                self.unify_at(el.id, &tt, &et);
                tt
            }
            ExprKind::Match(s, branches) => {
                let st = self.expr(s, env);
                let rt = self.cx.fresh();
                for br in branches {
                    let mut bound = Vec::new();
                    let pt = self.pat(&br.pat, &mut bound);
                    self.unify_at(br.pat.id, &st, &pt);
                    let mut inner = env.clone();
                    inner.extend(bound.into_iter().map(|(n, t)| (n, Scheme::mono(t))));
                    let bt = self.expr(&br.body, &inner);
                    self.unify_at(br.body.id, &rt, &bt);
                }
                rt
            }
        };
        self.record(e.id, &t);
        t
    }
}

fn pat_bindings(p: &Pat, raw: &HashMap<NodeId, Type>) -> Vec<(String, Type)> {
    let mut out = Vec::new();
    p.walk(&mut |q| {
        if let PatKind::Var(n) = &q.kind {
            if let Some(t) = raw.get(&q.id) {
                out.push((n.clone(), t.clone()));
            }
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn top_type(src: &str, name: &str) -> String {
        let p = parse(src).unwrap();
        let info = infer_program(&p, &[]);
        assert!(info.errors.is_empty(), "{:?}", info.errors);
        info.top[name].ty.to_string()
    }

    #[test]
    fn length_is_polymorphic() {
        let t = top_type("let rec length l = match l with [] -> 0 | hd :: tail -> 1 + length tail", "length");
        assert_eq!(t, "'a list -> int");
    }

    #[test]
    fn user_tree_mirror() {
        let src = "type 'a ltree = Leaf | Node of 'a ltree * 'a * 'a ltree\n\
                   let rec mirror t = match t with Leaf -> Leaf | Node (l, x, r) -> Node (mirror r, x, mirror l)";
        assert_eq!(top_type(src, "mirror"), "'a ltree -> 'a ltree");
    }

    #[test]
    fn let_polymorphism() {
        let t = top_type("let id x = x\nlet p = (id 1, id \"s\")", "p");
        assert_eq!(t, "int * string");
    }

    #[test]
    fn occurs_check_is_reported() {
        let p = parse("let f x = x x").unwrap();
        let info = infer_program(&p, &[]);
        assert!(info.errors.iter().any(|(_, e)| matches!(e, TypeError::Occurs(..))));
    }

    #[test]
    fn holes_get_types_and_envs() {
        let p = parse("let f x = x + (??)").unwrap();
        let info = infer_program(&p, &[]);
        let mut hole = None;
        p.walk_exprs(&mut |e| {
            if e.is_hole() {
                hole = Some(e.id)
            }
        });
        let h = hole.unwrap();
        assert_eq!(info.type_of(h), Some(&Type::int()));
        assert_eq!(info.hole_envs[&h].last().unwrap().0, "x");
    }

    #[test]
    fn assumed_types_narrow_holes() {
        let p = parse("let length = (??)").unwrap();
        let info = infer_program(&p, &[("length".into(), Type::arrow(Type::list(Type::int()), Type::int()))]);
        assert_eq!(info.top["length"].ty.to_string(), "int list -> int");
    }

    #[test]
    fn unify_undo() {
        let mut cx = TyCtx::new();
        let a = cx.fresh();
        let m = cx.mark();
        cx.unify(&a, &Type::int()).unwrap();
        assert_eq!(cx.resolve(&a), Type::int());
        cx.undo(m);
        assert_eq!(cx.resolve(&a), a);
        assert!(!cx.try_unify(&Type::list(a.clone()), &Type::int()));
    }
}
