//! Syntax tree for the mini-ML subset.
//!
//! Every expression, pattern, binding and assertion carries a [`NodeId`].
//! Ids are assigned in pre-order by the parser; transforms keep the ids of
//! surviving nodes and mint fresh ones through [`Program::fresh_id`].

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    /// Placeholder for freshly built nodes that have not been numbered yet.
    pub const DUMMY: NodeId = NodeId(u32::MAX);
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Attribute payloads attached to bindings (`[@@...]`) or expressions (`[@...]`).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Attrs {
    pub pos: Option<(i64, i64)>,
    /// Short content hashes of rejected fills (`[@not h]`).
    pub not_hashes: Vec<String>,
    /// Anything else, kept verbatim (text between `[@` / `[@@` and `]`).
    pub other: Vec<String>,
}

pub const PENDING_ATTR: &str = "synth";

impl Attrs {
    pub fn is_empty(&self) -> bool {
        self.pos.is_none() && self.not_hashes.is_empty() && self.other.is_empty()
    }

    pub fn is_pending(&self) -> bool {
        self.other.iter().any(|o| o == PENDING_ATTR)
    }

    pub fn set_pending(&mut self, pending: bool) {
        self.other.retain(|o| o != PENDING_ATTR);
        if pending {
            self.other.push(PENDING_ATTR.to_string());
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Const {
    Int(i64),
    Float(f64),
    Str(String),
    Char(char),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Pat {
    pub id: NodeId,
    pub kind: PatKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PatKind {
    Var(String),
    Wild,
    Tuple(Vec<Pat>),
    /// Constructor pattern; `()` is `Ctor("()", [])`, cons is `Ctor("::", [hd, tl])`.
    Ctor(String, Vec<Pat>),
}

impl Pat {
    pub fn new(kind: PatKind) -> Pat {
        Pat { id: NodeId::DUMMY, kind }
    }

    pub fn var(name: impl Into<String>) -> Pat {
        Pat::new(PatKind::Var(name.into()))
    }

    /// Names bound by this pattern, left to right.
    pub fn names(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut Vec<String>) {
        match &self.kind {
            PatKind::Var(n) => out.push(n.clone()),
            PatKind::Wild => {}
            PatKind::Tuple(ps) | PatKind::Ctor(_, ps) => {
                for p in ps {
                    p.collect_names(out);
                }
            }
        }
    }

    pub fn binds(&self, name: &str) -> bool {
        self.names().iter().any(|n| n == name)
    }

    pub fn as_var(&self) -> Option<&str> {
        match &self.kind {
            PatKind::Var(n) => Some(n),
            _ => None,
        }
    }

    pub fn walk(&self, f: &mut impl FnMut(&Pat)) {
        f(self);
        if let PatKind::Tuple(ps) | PatKind::Ctor(_, ps) = &self.kind {
            for p in ps {
                p.walk(f);
            }
        }
    }

    pub fn walk_mut(&mut self, f: &mut impl FnMut(&mut Pat)) {
        f(self);
        if let PatKind::Tuple(ps) | PatKind::Ctor(_, ps) = &mut self.kind {
            for p in ps {
                p.walk_mut(f);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Binding {
    pub id: NodeId,
    pub rec: bool,
    pub pat: Pat,
    pub expr: Expr,
    pub attrs: Attrs,
}

impl Binding {
    pub fn new(pat: Pat, expr: Expr) -> Binding {
        Binding {
            id: NodeId::DUMMY,
            rec: false,
            pat,
            expr,
            attrs: Attrs::default(),
        }
    }

    pub fn name(&self) -> Option<&str> {
        self.pat.as_var()
    }

    /// Parameters of the function chain on the right-hand side, if any.
    pub fn params(&self) -> Vec<&Pat> {
        let mut out = Vec::new();
        let mut e = &self.expr;
        while let ExprKind::Fun(p, body) = &e.kind {
            if !e.attrs.is_empty() {
                break;
            }
            out.push(p);
            e = body;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub pat: Pat,
    pub body: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub id: NodeId,
    pub kind: ExprKind,
    pub attrs: Attrs,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Hole,
    Const(Const),
    Ctor(String, Vec<Expr>),
    Var(String),
    Fun(Pat, Box<Expr>),
    App(Box<Expr>, Vec<Expr>),
    Let(Box<Binding>, Box<Expr>),
    Tuple(Vec<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    Match(Box<Expr>, Vec<Branch>),
}

impl Expr {
    pub fn new(kind: ExprKind) -> Expr {
        Expr {
            id: NodeId::DUMMY,
            kind,
            attrs: Attrs::default(),
        }
    }

    pub fn hole() -> Expr {
        Expr::new(ExprKind::Hole)
    }

    pub fn var(name: impl Into<String>) -> Expr {
        Expr::new(ExprKind::Var(name.into()))
    }

    pub fn int(n: i64) -> Expr {
        Expr::new(ExprKind::Const(Const::Int(n)))
    }

    pub fn ctor(name: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::new(ExprKind::Ctor(name.into(), args))
    }

    pub fn app(f: Expr, args: Vec<Expr>) -> Expr {
        Expr::new(ExprKind::App(Box::new(f), args))
    }

    pub fn fun(param: Pat, body: Expr) -> Expr {
        Expr::new(ExprKind::Fun(param, Box::new(body)))
    }

    pub fn let_in(binding: Binding, body: Expr) -> Expr {
        Expr::new(ExprKind::Let(Box::new(binding), Box::new(body)))
    }

    pub fn matching(scrutinee: Expr, branches: Vec<Branch>) -> Expr {
        Expr::new(ExprKind::Match(Box::new(scrutinee), branches))
    }

    pub fn is_hole(&self) -> bool {
        matches!(self.kind, ExprKind::Hole)
    }

    pub fn as_var(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Var(n) => Some(n),
            _ => None,
        }
    }

    /// Pre-order traversal over expressions (patterns and bindings included
    /// through their expressions only).
    pub fn walk(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        self.for_each_child(|c| c.walk(f));
    }

    pub fn walk_mut(&mut self, f: &mut impl FnMut(&mut Expr)) {
        f(self);
        self.for_each_child_mut(|c| c.walk_mut(f));
    }

    pub fn for_each_child<'a>(&'a self, mut f: impl FnMut(&'a Expr)) {
        match &self.kind {
            ExprKind::Hole | ExprKind::Const(_) | ExprKind::Var(_) => {}
            ExprKind::Ctor(_, args) | ExprKind::Tuple(args) => args.iter().for_each(f),
            ExprKind::Fun(_, body) => f(body),
            ExprKind::App(func, args) => {
                f(func);
                args.iter().for_each(f);
            }
            ExprKind::Let(b, body) => {
                f(&b.expr);
                f(body);
            }
            ExprKind::If(c, t, e) => {
                f(c);
                f(t);
                f(e);
            }
            ExprKind::Match(s, branches) => {
                f(s);
                for b in branches {
                    f(&b.body);
                }
            }
        }
    }

    pub fn for_each_child_mut(&mut self, mut f: impl FnMut(&mut Expr)) {
        match &mut self.kind {
            ExprKind::Hole | ExprKind::Const(_) | ExprKind::Var(_) => {}
            ExprKind::Ctor(_, args) | ExprKind::Tuple(args) => args.iter_mut().for_each(f),
            ExprKind::Fun(_, body) => f(body),
            ExprKind::App(func, args) => {
                f(func);
                args.iter_mut().for_each(f);
            }
            ExprKind::Let(b, body) => {
                f(&mut b.expr);
                f(body);
            }
            ExprKind::If(c, t, e) => {
                f(c);
                f(t);
                f(e);
            }
            ExprKind::Match(s, branches) => {
                f(s);
                for b in branches {
                    f(&mut b.body);
                }
            }
        }
    }

    /// Visit every pattern appearing inside this expression.
    pub fn walk_pats(&self, f: &mut impl FnMut(&Pat)) {
        self.walk(&mut |e| match &e.kind {
            ExprKind::Fun(p, _) => p.walk(f),
            ExprKind::Let(b, _) => b.pat.walk(f),
            ExprKind::Match(_, branches) => branches.iter().for_each(|b| b.pat.walk(f)),
            _ => {}
        });
    }

    pub fn find(&self, id: NodeId) -> Option<&Expr> {
        if self.id == id {
            return Some(self);
        }
        let mut found = None;
        self.for_each_child(|c| {
            if found.is_none() {
                found = c.find(id);
            }
        });
        found
    }

    pub fn find_mut(&mut self, id: NodeId) -> Option<&mut Expr> {
        if self.id == id {
            return Some(self);
        }
        self.children_mut().into_iter().find_map(|c| c.find_mut(id))
    }

    /// Direct child expressions in evaluation order.
    pub fn children_mut(&mut self) -> Vec<&mut Expr> {
        match &mut self.kind {
            ExprKind::Hole | ExprKind::Const(_) | ExprKind::Var(_) => Vec::new(),
            ExprKind::Ctor(_, args) | ExprKind::Tuple(args) => args.iter_mut().collect(),
            ExprKind::Fun(_, body) => vec![&mut **body],
            ExprKind::App(func, args) => {
                let mut v: Vec<&mut Expr> = vec![&mut **func];
                v.extend(args.iter_mut());
                v
            }
            ExprKind::Let(b, body) => vec![&mut b.expr, &mut **body],
            ExprKind::If(c, t, e) => vec![&mut **c, &mut **t, &mut **e],
            ExprKind::Match(s, branches) => {
                let mut v: Vec<&mut Expr> = vec![&mut **s];
                v.extend(branches.iter_mut().map(|b| &mut b.body));
                v
            }
        }
    }

    /// Number of expression nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    /// Copy with every attribute removed, recursively.
    pub fn without_attrs(&self) -> Expr {
        let mut e = self.clone();
        e.walk_mut(&mut |x| {
            x.attrs = Attrs::default();
            if let ExprKind::Let(b, _) = &mut x.kind {
                b.attrs = Attrs::default();
            }
        });
        e
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TypeExpr {
    Var(String),
    Con(String, Vec<TypeExpr>),
    Tuple(Vec<TypeExpr>),
    Arrow(Box<TypeExpr>, Box<TypeExpr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CtorDecl {
    pub name: String,
    pub args: Vec<TypeExpr>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TypeDecl {
    pub name: String,
    pub params: Vec<String>,
    pub ctors: Vec<CtorDecl>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Assertion {
    pub id: NodeId,
    pub lhs: Expr,
    pub rhs: Expr,
    pub attrs: Attrs,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Item {
    Let(Binding),
    Assert(Assertion),
}

impl Item {
    pub fn id(&self) -> NodeId {
        match self {
            Item::Let(b) => b.id,
            Item::Assert(a) => a.id,
        }
    }

    pub fn as_binding(&self) -> Option<&Binding> {
        match self {
            Item::Let(b) => Some(b),
            Item::Assert(_) => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Program {
    pub type_decls: Vec<TypeDecl>,
    pub items: Vec<Item>,
    /// Next unused node id.
    pub next_id: u32,
}

/// A reference to any addressable node.
#[derive(Clone, Copy, Debug)]
pub enum NodeRef<'a> {
    Expr(&'a Expr),
    Pat(&'a Pat),
    Binding(&'a Binding),
    Assert(&'a Assertion),
}

impl Program {
    pub fn fresh_id(&mut self) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        id
    }

    /// Give every node in `e` (expressions, patterns, inner bindings) a fresh id.
    pub fn assign_fresh_ids(&mut self, e: &mut Expr) {
        e.walk_mut(&mut |x| {
            x.id = NodeId(self.next_id);
            self.next_id += 1;
            match &mut x.kind {
                ExprKind::Fun(p, _) => self.fresh_pat_ids(p),
                ExprKind::Let(b, _) => {
                    b.id = NodeId(self.next_id);
                    self.next_id += 1;
                    self.fresh_pat_ids(&mut b.pat);
                }
                ExprKind::Match(_, branches) => {
                    for br in branches {
                        self.fresh_pat_ids(&mut br.pat);
                    }
                }
                _ => {}
            }
        });
    }

    pub fn fresh_pat_ids(&mut self, p: &mut Pat) {
        p.walk_mut(&mut |q| {
            q.id = NodeId(self.next_id);
            self.next_id += 1;
        });
    }

    pub fn assign_fresh_binding_ids(&mut self, b: &mut Binding) {
        b.id = self.fresh_id();
        self.fresh_pat_ids(&mut b.pat);
        self.assign_fresh_ids(&mut b.expr);
    }

    /// Renumber all nodes in pre-order starting at zero. Two programs that
    /// differ only in node ids compare equal after renumbering.
    pub fn renumber(&mut self) {
        let mut next = 0u32;
        let mut take = || {
            let id = NodeId(next);
            next += 1;
            id
        };
        fn pat(p: &mut Pat, take: &mut impl FnMut() -> NodeId) {
            p.id = take();
            if let PatKind::Tuple(ps) | PatKind::Ctor(_, ps) = &mut p.kind {
                for q in ps {
                    pat(q, take);
                }
            }
        }
        fn binding(b: &mut Binding, take: &mut impl FnMut() -> NodeId) {
            b.id = take();
            pat(&mut b.pat, take);
            expr(&mut b.expr, take);
        }
        fn expr(e: &mut Expr, take: &mut impl FnMut() -> NodeId) {
            e.id = take();
            match &mut e.kind {
                ExprKind::Hole | ExprKind::Const(_) | ExprKind::Var(_) => {}
                ExprKind::Ctor(_, args) | ExprKind::Tuple(args) => {
                    args.iter_mut().for_each(|a| expr(a, take))
                }
                ExprKind::Fun(p, body) => {
                    pat(p, take);
                    expr(body, take);
                }
                ExprKind::App(f, args) => {
                    expr(f, take);
                    args.iter_mut().for_each(|a| expr(a, take));
                }
                ExprKind::Let(b, body) => {
                    binding(b, take);
                    expr(body, take);
                }
                ExprKind::If(c, t, el) => {
                    expr(c, take);
                    expr(t, take);
                    expr(el, take);
                }
                ExprKind::Match(s, branches) => {
                    expr(s, take);
                    for br in branches {
                        pat(&mut br.pat, take);
                        expr(&mut br.body, take);
                    }
                }
            }
        }
        for item in &mut self.items {
            match item {
                Item::Let(b) => binding(b, &mut take),
                Item::Assert(a) => {
                    a.id = take();
                    expr(&mut a.lhs, &mut take);
                    expr(&mut a.rhs, &mut take);
                }
            }
        }
        self.next_id = next;
    }

    pub fn renumbered(&self) -> Program {
        let mut p = self.clone();
        p.renumber();
        p
    }

    /// Structural equality ignoring node ids.
    pub fn same_structure(&self, other: &Program) -> bool {
        self.renumbered() == other.renumbered()
    }

    pub fn bindings(&self) -> impl Iterator<Item = &Binding> {
        self.items.iter().filter_map(Item::as_binding)
    }

    pub fn assertions(&self) -> impl Iterator<Item = &Assertion> {
        self.items.iter().filter_map(|it| match it {
            Item::Assert(a) => Some(a),
            Item::Let(_) => None,
        })
    }

    pub fn top_binding(&self, name: &str) -> Option<&Binding> {
        self.bindings().find(|b| b.pat.binds(name))
    }

    /// Visit every expression root (binding right-hand sides, assertion sides).
    pub fn walk_exprs(&self, f: &mut impl FnMut(&Expr)) {
        for item in &self.items {
            match item {
                Item::Let(b) => b.expr.walk(f),
                Item::Assert(a) => {
                    a.lhs.walk(f);
                    a.rhs.walk(f);
                }
            }
        }
    }

    pub fn walk_exprs_mut(&mut self, f: &mut impl FnMut(&mut Expr)) {
        for item in &mut self.items {
            match item {
                Item::Let(b) => b.expr.walk_mut(f),
                Item::Assert(a) => {
                    a.lhs.walk_mut(f);
                    a.rhs.walk_mut(f);
                }
            }
        }
    }

    pub fn find_expr(&self, id: NodeId) -> Option<&Expr> {
        self.items.iter().find_map(|item| match item {
            Item::Let(b) => b.expr.find(id),
            Item::Assert(a) => a.lhs.find(id).or_else(|| a.rhs.find(id)),
        })
    }

    pub fn find_expr_mut(&mut self, id: NodeId) -> Option<&mut Expr> {
        self.items.iter_mut().find_map(|item| match item {
            Item::Let(b) => b.expr.find_mut(id),
            Item::Assert(a) => match a.lhs.find_mut(id) {
                Some(e) => Some(e),
                None => a.rhs.find_mut(id),
            },
        })
    }

    /// Locate any node by id.
    pub fn node(&self, id: NodeId) -> Option<NodeRef<'_>> {
        for item in &self.items {
            match item {
                Item::Let(b) => {
                    if b.id == id {
                        return Some(NodeRef::Binding(b));
                    }
                    if let Some(p) = find_pat(&b.pat, id) {
                        return Some(NodeRef::Pat(p));
                    }
                    if let Some(r) = node_in_expr(&b.expr, id) {
                        return Some(r);
                    }
                }
                Item::Assert(a) => {
                    if a.id == id {
                        return Some(NodeRef::Assert(a));
                    }
                    if let Some(r) = node_in_expr(&a.lhs, id).or_else(|| node_in_expr(&a.rhs, id)) {
                        return Some(r);
                    }
                }
            }
        }
        None
    }

    /// Find a binding (top-level or nested) by id.
    pub fn find_binding(&self, id: NodeId) -> Option<&Binding> {
        match self.node(id) {
            Some(NodeRef::Binding(b)) => Some(b),
            _ => None,
        }
    }

    pub fn find_binding_mut(&mut self, id: NodeId) -> Option<&mut Binding> {
        for item in &mut self.items {
            match item {
                Item::Let(b) => {
                    if b.id == id {
                        return Some(b);
                    }
                    if let Some(found) = binding_in_expr_mut(&mut b.expr, id) {
                        return Some(found);
                    }
                }
                Item::Assert(a) => {
                    if let Some(found) = binding_in_expr_mut(&mut a.lhs, id) {
                        return Some(found);
                    }
                    if let Some(found) = binding_in_expr_mut(&mut a.rhs, id) {
                        return Some(found);
                    }
                }
            }
        }
        None
    }

    /// Arity of every known constructor, builtins included.
    pub fn ctor_arity(&self, name: &str) -> Option<usize> {
        builtin_ctor_arity(name).or_else(|| {
            self.type_decls
                .iter()
                .flat_map(|d| d.ctors.iter())
                .find(|c| c.name == name)
                .map(|c| c.args.len())
        })
    }
}

fn node_in_expr(e: &Expr, id: NodeId) -> Option<NodeRef<'_>> {
    if e.id == id {
        return Some(NodeRef::Expr(e));
    }
    let mut pat_hit: Option<&Pat> = None;
    match &e.kind {
        ExprKind::Fun(p, _) => pat_hit = find_pat(p, id),
        ExprKind::Let(b, _) => {
            if b.id == id {
                return Some(NodeRef::Binding(b));
            }
            pat_hit = find_pat(&b.pat, id);
        }
        ExprKind::Match(_, branches) => {
            pat_hit = branches.iter().find_map(|br| find_pat(&br.pat, id));
        }
        _ => {}
    }
    if let Some(p) = pat_hit {
        return Some(NodeRef::Pat(p));
    }
    let mut found = None;
    e.for_each_child(|c| {
        if found.is_none() {
            found = node_in_expr(c, id);
        }
    });
    found
}

fn find_pat(p: &Pat, id: NodeId) -> Option<&Pat> {
    if p.id == id {
        return Some(p);
    }
    match &p.kind {
        PatKind::Tuple(ps) | PatKind::Ctor(_, ps) => ps.iter().find_map(|q| find_pat(q, id)),
        _ => None,
    }
}

fn binding_in_expr_mut(e: &mut Expr, id: NodeId) -> Option<&mut Binding> {
    if matches!(&e.kind, ExprKind::Let(b, _) if b.id == id) {
        return match &mut e.kind {
            ExprKind::Let(b, _) => Some(b),
            _ => None,
        };
    }
    e.children_mut().into_iter().find_map(|c| binding_in_expr_mut(c, id))
}

pub fn builtin_ctor_arity(name: &str) -> Option<usize> {
    match name {
        "[]" | "()" | "true" | "false" | "None" => Some(0),
        "Some" => Some(1),
        "::" => Some(2),
        _ => None,
    }
}

/// Binary operators recognised by the parser and printer.
pub fn is_binary_op(name: &str) -> bool {
    matches!(
        name,
        "+" | "-" | "*" | "/" | "mod" | "+." | "-." | "*." | "/." | "=" | "<>" | "<" | ">" | "<="
            | ">=" | "==" | "!=" | "&&" | "||" | "^" | "@"
    )
}
