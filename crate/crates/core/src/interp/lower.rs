//! Shared, immutable form of the syntax tree used at runtime. Closures hold
//! `Arc`s into it, so capturing a body is a pointer copy.

use std::sync::Arc;

use crate::syntax::{Binding, Const, Expr, ExprKind, NodeId, Pat};

pub struct RExpr {
    pub id: NodeId,
    pub kind: RKind,
}

pub enum RKind {
    Hole,
    Const(Const),
    Ctor(String, Vec<Arc<RExpr>>),
    Var(String),
    /// Parameter, body, and the name of the binding this function is the
    /// right-hand side of (for display).
    Fun(Arc<Pat>, Arc<RExpr>, Option<String>),
    App(Arc<RExpr>, Vec<Arc<RExpr>>),
    Let(Arc<RBinding>, Arc<RExpr>),
    Tuple(Vec<Arc<RExpr>>),
    If(Arc<RExpr>, Arc<RExpr>, Arc<RExpr>),
    Match(Arc<RExpr>, Vec<(Arc<Pat>, Arc<RExpr>)>),
}

pub struct RBinding {
    pub id: NodeId,
    pub rec: bool,
    pub pat: Arc<Pat>,
    pub expr: Arc<RExpr>,
}

pub fn lower_binding(b: &Binding) -> RBinding {
    RBinding {
        id: b.id,
        rec: b.rec,
        pat: Arc::new(b.pat.clone()),
        expr: lower_named(&b.expr, b.name()),
    }
}

pub fn lower(e: &Expr) -> Arc<RExpr> {
    lower_named(e, None)
}

fn lower_named(e: &Expr, name: Option<&str>) -> Arc<RExpr> {
    let all = |xs: &[Expr]| xs.iter().map(lower).collect::<Vec<_>>();
    let kind = match &e.kind {
        ExprKind::Hole => RKind::Hole,
        ExprKind::Const(c) => RKind::Const(c.clone()),
        ExprKind::Ctor(c, args) => RKind::Ctor(c.clone(), all(args)),
        ExprKind::Var(v) => RKind::Var(v.clone()),
        // Inner functions of a curried chain share the binding's name.
        ExprKind::Fun(p, body) => {
            let inner = if matches!(body.kind, ExprKind::Fun(..)) { lower_named(body, name) } else { lower(body) };
            RKind::Fun(Arc::new(p.clone()), inner, name.map(str::to_string))
        }
        ExprKind::App(f, args) => RKind::App(lower(f), all(args)),
        ExprKind::Let(b, body) => RKind::Let(Arc::new(lower_binding(b)), lower(body)),
        ExprKind::Tuple(items) => RKind::Tuple(all(items)),
        ExprKind::If(c, t, el) => RKind::If(lower(c), lower(t), lower(el)),
        ExprKind::Match(s, branches) => RKind::Match(
            lower(s),
            branches.iter().map(|b| (Arc::new(b.pat.clone()), lower(&b.body))).collect(),
        ),
    };
    Arc::new(RExpr { id: e.id, kind })
}
