//! Client actions and the file mutation each one performs.
//!
//! Every mutating action goes through the same pipeline: parse the file,
//! apply the edit to the tree, run the binding-order passes, print. The
//! printed text is re-parsed before it is accepted so a file on disk always
//! parses.

use std::collections::BTreeSet;
use std::fmt;

use manipos_core::nonlinear::{self, names, scope, NonlinearError};
use manipos_core::synth::{self, FillError, SynthError};
use manipos_core::syntax::{
    self, parse, parse_expr, parse_pat, print, Binding, Expr, ExprKind, Item, NodeId, NodeRef, ParseError, Pat, Program,
};
use manipos_core::types::{infer_program, CtorTable};
use serde::{Deserialize, Serialize};

/// A canvas that new code can be dropped onto: the top level or the body of
/// a function binding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CanvasPath {
    Top,
    Function(NodeId),
}

impl fmt::Display for CanvasPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CanvasPath::Top => write!(f, "top"),
            CanvasPath::Function(id) => write!(f, "fun:{id}"),
        }
    }
}

impl TryFrom<String> for CanvasPath {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        if s == "top" {
            return Ok(CanvasPath::Top);
        }
        s.strip_prefix("fun:")
            .and_then(|n| n.parse().ok())
            .map(|n| CanvasPath::Function(NodeId(n)))
            .ok_or_else(|| format!("bad canvas path `{s}`"))
    }
}

impl From<CanvasPath> for String {
    fn from(c: CanvasPath) -> String {
        c.to_string()
    }
}

impl Serialize for CanvasPath {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CanvasPath {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        CanvasPath::try_from(String::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// A displayed value: the variable bound at pattern `node`, in call frame
/// `frame`, narrowed by a constructor path (constructor, argument index).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueRef {
    pub node: u32,
    pub frame: u32,
    #[serde(default)]
    pub path: Vec<(String, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum DragSource {
    Node(u32),
    Value(ValueRef),
    Template(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum DropTarget {
    Node(u32),
    Canvas(CanvasPath),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", rename_all_fields = "camelCase")]
pub enum Action {
    AddCode { canvas_path: CanvasPath, text: String },
    EditNode { node_id: u32, text: String },
    DeleteNode { node_id: u32 },
    DragDrop { source: DragSource, target: DropTarget },
    SetPos { node_id: u32, x: i64, y: i64 },
    Destruct { value_ref: ValueRef },
    FocusFrame { function_node_id: u32, frame_no: u32 },
    AddAssertColumn { function_node_id: u32, args: Vec<String>, expected: String },
    Synth,
    AcceptFill { node_id: u32 },
    RejectFill { node_id: u32 },
    Undo,
    Redo,
}

impl Action {
    /// Node ids the action refers to.
    pub fn node_ids(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        let canvas = |c: &CanvasPath, out: &mut Vec<NodeId>| {
            if let CanvasPath::Function(id) = c {
                out.push(*id)
            }
        };
        match self {
            Action::AddCode { canvas_path, .. } => canvas(canvas_path, &mut out),
            Action::EditNode { node_id, .. }
            | Action::DeleteNode { node_id }
            | Action::SetPos { node_id, .. }
            | Action::AcceptFill { node_id }
            | Action::RejectFill { node_id } => out.push(NodeId(*node_id)),
            Action::DragDrop { source, target } => {
                match source {
                    DragSource::Node(n) => out.push(NodeId(*n)),
                    DragSource::Value(v) => out.push(NodeId(v.node)),
                    DragSource::Template(_) => {}
                }
                match target {
                    DropTarget::Node(n) => out.push(NodeId(*n)),
                    DropTarget::Canvas(c) => canvas(c, &mut out),
                }
            }
            Action::Destruct { value_ref } => out.push(NodeId(value_ref.node)),
            Action::FocusFrame { function_node_id, .. } | Action::AddAssertColumn { function_node_id, .. } => {
                out.push(NodeId(*function_node_id))
            }
            Action::Synth | Action::Undo | Action::Redo => {}
        }
        out
    }

    /// Whether the action edits the file (as opposed to history or view state).
    pub fn is_edit(&self) -> bool {
        !matches!(self, Action::FocusFrame { .. } | Action::Undo | Action::Redo)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ActionError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("no node with id {0}")]
    UnknownNode(NodeId),
    #[error("node {0} has changed since the document was rendered")]
    StaleNode(NodeId),
    #[error(transparent)]
    Nonlinear(#[from] NonlinearError),
    #[error(transparent)]
    Fill(#[from] FillError),
    #[error("synthesis failed: {0}")]
    Synth(#[from] SynthError),
    #[error("{0}")]
    NotApplicable(String),
    #[error("nothing to undo")]
    NothingToUndo,
    #[error("nothing to redo")]
    NothingToRedo,
}

fn not_applicable(msg: impl Into<String>) -> ActionError {
    ActionError::NotApplicable(msg.into())
}

/// Fills the holes of a program; used by the `synth` action.
pub type Synthesizer<'a> = &'a dyn Fn(&Program) -> Result<Program, SynthError>;

/// Apply an editing action to the tree. History and view actions are not
/// handled here.
pub fn mutate(p: &Program, action: &Action, synth: Synthesizer) -> Result<Program, ActionError> {
    let mut q = p.clone();
    match action {
        Action::AddCode { canvas_path, text } => add_code(&mut q, *canvas_path, text)?,
        Action::EditNode { node_id, text } => edit_node(&mut q, NodeId(*node_id), text)?,
        Action::DeleteNode { node_id } => delete_node(&mut q, NodeId(*node_id))?,
        Action::DragDrop { source, target } => {
            let e = source_expr(&mut q, source)?;
            match target {
                DropTarget::Node(n) => replace_at(&mut q, NodeId(*n), e)?,
                DropTarget::Canvas(c) => add_binding(&mut q, *c, e)?,
            }
        }
        Action::SetPos { node_id, x, y } => {
            syntax::set_pos(&mut q, NodeId(*node_id), *x, *y).map_err(|e| ActionError::UnknownNode(e.0))?
        }
        Action::Destruct { value_ref } => q = destruct(&q, value_ref)?,
        Action::AddAssertColumn { function_node_id, args, expected } => {
            add_assert(&mut q, NodeId(*function_node_id), args, expected)?
        }
        Action::Synth => q = synth(&q)?,
        Action::AcceptFill { node_id } => q = synth::accept_fill(&q, NodeId(*node_id))?,
        Action::RejectFill { node_id } => q = synth::reject_fill(&q, NodeId(*node_id))?,
        Action::FocusFrame { .. } | Action::Undo | Action::Redo => {
            return Err(not_applicable("not an editing action"));
        }
    }
    Ok(q)
}

/// Run the binding-order passes and print. Fails if the result would not
/// parse back.
pub fn finish(p: &Program) -> Result<String, ActionError> {
    let q = nonlinear::pipeline(p)?;
    let text = print(&q);
    parse(&text)?;
    Ok(text)
}

/// Parse, mutate, finish.
pub fn apply_to_text(text: &str, action: &Action, synth: Synthesizer) -> Result<String, ActionError> {
    let p = parse(text)?;
    let q = mutate(&p, action, synth)?;
    finish(&q)
}

fn fresh_expr(p: &mut Program, mut e: Expr) -> Expr {
    p.assign_fresh_ids(&mut e);
    e
}

fn unknown(id: NodeId) -> ActionError {
    ActionError::UnknownNode(id)
}

fn add_code(p: &mut Program, canvas: CanvasPath, text: &str) -> Result<(), ActionError> {
    let err = match parse_expr(text, &p.type_decls) {
        Ok(e) => return add_binding(p, canvas, e),
        Err(err) => err,
    };
    // Not an expression: accept whole definitions.
    let frag = parse(text).map_err(|_| err)?;
    match canvas {
        CanvasPath::Top => {
            p.type_decls.extend(frag.type_decls);
            for mut item in frag.items {
                match &mut item {
                    Item::Let(b) => p.assign_fresh_binding_ids(b),
                    Item::Assert(a) => {
                        a.id = p.fresh_id();
                        p.assign_fresh_ids(&mut a.lhs);
                        p.assign_fresh_ids(&mut a.rhs);
                    }
                }
                p.items.push(item);
            }
            Ok(())
        }
        CanvasPath::Function(_) => {
            if !frag.type_decls.is_empty() || frag.items.iter().any(|i| matches!(i, Item::Assert(_))) {
                return Err(not_applicable("only bindings can go inside a function"));
            }
            for item in frag.items {
                if let Item::Let(mut b) = item {
                    p.assign_fresh_binding_ids(&mut b);
                    insert_binding(p, canvas, b)?;
                }
            }
            Ok(())
        }
    }
}

/// Bind `e` to a generated name on `canvas`.
fn add_binding(p: &mut Program, canvas: CanvasPath, e: Expr) -> Result<(), ActionError> {
    let name = binding_name(p, &e);
    let mut b = Binding::new(Pat::var(name), e);
    p.assign_fresh_binding_ids(&mut b);
    insert_binding(p, canvas, b)
}

fn binding_name(p: &Program, e: &Expr) -> String {
    let mut probe = p.clone();
    let mut b = Binding::new(Pat::var("__probe"), e.clone());
    probe.assign_fresh_binding_ids(&mut b);
    let id = b.expr.id;
    probe.items.push(Item::Let(b));
    let info = infer_program(&probe, &[]);
    let base = names::value_name(e, info.type_of(id));
    let base = if base.chars().next().is_some_and(|c| c.is_ascii_lowercase() || c == '_') { base } else { "value".into() };
    names::fresh(&base, &scope::all_bound_names(p))
}

fn insert_binding(p: &mut Program, canvas: CanvasPath, b: Binding) -> Result<(), ActionError> {
    match canvas {
        CanvasPath::Top => {
            p.items.push(Item::Let(b));
            Ok(())
        }
        CanvasPath::Function(id) => {
            let let_id = p.fresh_id();
            let target = p.find_binding_mut(id).ok_or(unknown(id))?;
            if !matches!(target.expr.kind, ExprKind::Fun(..)) {
                return Err(not_applicable(format!("node {id} is not a function")));
            }
            let body = scope::fun_body_mut(&mut target.expr);
            let old = std::mem::replace(body, Expr::hole());
            let mut wrapped = Expr::let_in(b, old);
            wrapped.id = let_id;
            *body = wrapped;
            Ok(())
        }
    }
}

fn edit_node(p: &mut Program, id: NodeId, text: &str) -> Result<(), ActionError> {
    match p.node(id).ok_or(unknown(id))? {
        NodeRef::Expr(_) => {
            let e = parse_expr(text, &p.type_decls)?;
            let e = fresh_expr(p, e);
            *p.find_expr_mut(id).expect("found") = e;
        }
        NodeRef::Pat(old) => {
            let old_name = old.as_var().map(str::to_string);
            let mut new = parse_pat(text)?;
            p.fresh_pat_ids(&mut new);
            let new_name = new.as_var().map(str::to_string);
            let new_id = new.id;
            replace_pat(p, id, new);
            if let (Some(a), Some(b)) = (old_name, new_name) {
                rename_binder(p, new_id, &a, &b);
            }
        }
        NodeRef::Binding(_) => {
            let frag = parse(&format!("let {text}"))?;
            let Some(Item::Let(mut nb)) = frag.items.into_iter().next() else {
                return Err(not_applicable("expected `pattern = expression`"));
            };
            p.fresh_pat_ids(&mut nb.pat);
            p.assign_fresh_ids(&mut nb.expr);
            let b = p.find_binding_mut(id).expect("found");
            b.pat = nb.pat;
            b.expr = nb.expr;
            b.rec = nb.rec;
        }
        NodeRef::Assert(_) => {
            let frag = parse(&format!("let () = assert ({text})"))?;
            let Some(Item::Assert(mut na)) = frag.items.into_iter().next() else {
                return Err(not_applicable("expected `expression = expected`"));
            };
            p.assign_fresh_ids(&mut na.lhs);
            p.assign_fresh_ids(&mut na.rhs);
            for item in &mut p.items {
                if let Item::Assert(a) = item {
                    if a.id == id {
                        a.lhs = na.lhs;
                        a.rhs = na.rhs;
                        break;
                    }
                }
            }
        }
    }
    Ok(())
}

fn replace_pat(p: &mut Program, id: NodeId, new: Pat) {
    let mut new = Some(new);
    let mut visit = |q: &mut Pat| {
        if q.id == id {
            if let Some(n) = new.take() {
                *q = n;
            }
        }
    };
    for item in &mut p.items {
        match item {
            Item::Let(b) => {
                b.pat.walk_mut(&mut visit);
                walk_pats_mut(&mut b.expr, &mut visit);
            }
            Item::Assert(a) => {
                walk_pats_mut(&mut a.lhs, &mut visit);
                walk_pats_mut(&mut a.rhs, &mut visit);
            }
        }
    }
}

fn walk_pats_mut(e: &mut Expr, f: &mut impl FnMut(&mut Pat)) {
    e.walk_mut(&mut |x| match &mut x.kind {
        ExprKind::Fun(q, _) => q.walk_mut(f),
        ExprKind::Let(b, _) => b.pat.walk_mut(f),
        ExprKind::Match(_, branches) => branches.iter_mut().for_each(|br| br.pat.walk_mut(f)),
        _ => {}
    });
}

/// After renaming the variable bound at `pat`, rename its uses: everywhere
/// for a top-level binding, in the body for anything bound inside an
/// expression.
fn rename_binder(p: &mut Program, pat: NodeId, from: &str, to: &str) {
    if p.bindings().any(|b| b.pat.id == pat) {
        for item in &mut p.items {
            match item {
                Item::Let(b) => scope::rename_free(&mut b.expr, from, to),
                Item::Assert(a) => {
                    scope::rename_free(&mut a.lhs, from, to);
                    scope::rename_free(&mut a.rhs, from, to);
                }
            }
        }
        return;
    }
    p.walk_exprs_mut(&mut |e| match &mut e.kind {
        ExprKind::Fun(q, body) if contains_pat(q, pat) => scope::rename_free(body, from, to),
        ExprKind::Let(b, body) if contains_pat(&b.pat, pat) => {
            if b.rec {
                scope::rename_free(&mut b.expr, from, to);
            }
            scope::rename_free(body, from, to)
        }
        ExprKind::Match(_, branches) => {
            for br in branches {
                if contains_pat(&br.pat, pat) {
                    scope::rename_free(&mut br.body, from, to);
                }
            }
        }
        _ => {}
    });
}

fn contains_pat(q: &Pat, id: NodeId) -> bool {
    let mut found = false;
    q.walk(&mut |x| found |= x.id == id);
    found
}

fn delete_node(p: &mut Program, id: NodeId) -> Result<(), ActionError> {
    match p.node(id).ok_or(unknown(id))? {
        NodeRef::Expr(_) => {
            let e = p.find_expr_mut(id).expect("found");
            *e = Expr { id, kind: ExprKind::Hole, attrs: Default::default() };
        }
        NodeRef::Pat(_) => return Err(not_applicable("patterns cannot be deleted")),
        NodeRef::Assert(_) => p.items.retain(|i| i.id() != id),
        NodeRef::Binding(_) => {
            let before = p.items.len();
            p.items.retain(|i| i.id() != id);
            if p.items.len() == before {
                p.walk_exprs_mut(&mut |e| {
                    let ExprKind::Let(b, body) = &mut e.kind else { return };
                    if b.id == id {
                        let body = std::mem::replace(body.as_mut(), Expr::hole());
                        *e = body;
                    }
                });
            }
        }
    }
    Ok(())
}

fn replace_at(p: &mut Program, id: NodeId, e: Expr) -> Result<(), ActionError> {
    match p.node(id).ok_or(unknown(id))? {
        NodeRef::Expr(_) => *p.find_expr_mut(id).expect("found") = e,
        NodeRef::Binding(_) => p.find_binding_mut(id).expect("found").expr = e,
        _ => return Err(not_applicable("values can only be dropped on expressions")),
    }
    Ok(())
}

/// Name of the variable a value reference is rooted at.
fn root_name(p: &Program, node: NodeId) -> Result<String, ActionError> {
    match p.node(node).ok_or(unknown(node))? {
        NodeRef::Pat(q) => q.as_var().map(str::to_string),
        NodeRef::Binding(b) => b.pat.as_var().map(str::to_string),
        _ => None,
    }
    .ok_or_else(|| not_applicable("value is not bound to a variable"))
}

/// Expression computing a referenced value at the drop site.
pub fn value_expr(p: &Program, v: &ValueRef) -> Result<Expr, ActionError> {
    let name = root_name(p, NodeId(v.node))?;
    let ctors = CtorTable::new(&p.type_decls);
    for (c, i) in &v.path {
        match ctors.arity(c) {
            Some(n) if *i < n => {}
            _ => return Err(not_applicable(format!("`{c}` has no argument {i}"))),
        }
    }
    let mut taken: BTreeSet<String> = scope::all_bound_names(p);
    Ok(nonlinear::extraction_expr(&v.path, &name, &ctors, &mut taken))
}

fn source_expr(p: &mut Program, source: &DragSource) -> Result<Expr, ActionError> {
    let e = match source {
        DragSource::Node(n) => {
            let id = NodeId(*n);
            match p.node(id).ok_or(unknown(id))? {
                NodeRef::Expr(e) => e.without_attrs(),
                NodeRef::Binding(b) => {
                    Expr::var(b.pat.as_var().ok_or_else(|| not_applicable("binding has no single name"))?)
                }
                NodeRef::Pat(q) => Expr::var(q.as_var().ok_or_else(|| not_applicable("pattern is not a variable"))?),
                NodeRef::Assert(_) => return Err(not_applicable("assertions cannot be dragged")),
            }
        }
        DragSource::Value(v) => value_expr(p, v)?,
        DragSource::Template(text) => parse_expr(text, &p.type_decls)?,
    };
    Ok(fresh_expr(p, e))
}

/// The binding (top-level or nested) whose function parameters or body bind
/// pattern `pat`, innermost first.
fn enclosing_function(p: &Program, pat: NodeId) -> Option<NodeId> {
    let mut best = None;
    let mut visit = |b: &Binding| {
        if matches!(b.expr.kind, ExprKind::Fun(..)) {
            let mut inside = false;
            b.expr.walk_pats(&mut |q| inside |= q.id == pat);
            if inside {
                best = Some(b.id);
            }
        }
    };
    for b in p.bindings() {
        visit(b);
        b.expr.walk(&mut |e| {
            if let ExprKind::Let(ib, _) = &e.kind {
                visit(ib);
            }
        });
    }
    best
}

fn destruct(p: &Program, v: &ValueRef) -> Result<Program, ActionError> {
    if !v.path.is_empty() {
        return Err(not_applicable("only variables can be destructed"));
    }
    let node = NodeId(v.node);
    let name = root_name(p, node)?;
    let fun = enclosing_function(p, node).ok_or_else(|| not_applicable("value is not inside a function"))?;
    Ok(nonlinear::destruct(p, fun, &name)?)
}

fn function_name(p: &Program, id: NodeId) -> Result<String, ActionError> {
    let b = match p.node(id).ok_or(unknown(id))? {
        NodeRef::Binding(b) => b,
        NodeRef::Expr(e) => p
            .bindings()
            .find(|b| b.expr.id == e.id)
            .ok_or_else(|| not_applicable("not a top-level function"))?,
        _ => return Err(not_applicable("not a function")),
    };
    if !matches!(b.expr.kind, ExprKind::Fun(..)) || !p.items.iter().any(|i| i.id() == b.id) {
        return Err(not_applicable("not a top-level function"));
    }
    b.pat.as_var().map(str::to_string).ok_or_else(|| not_applicable("function has no name"))
}

fn add_assert(p: &mut Program, fun: NodeId, args: &[String], expected: &str) -> Result<(), ActionError> {
    let name = function_name(p, fun)?;
    let call = std::iter::once(name).chain(args.iter().map(|a| format!("({a})"))).collect::<Vec<_>>().join(" ");
    let mut frag = parse(&format!("let () = assert ({call} = ({expected}))"))?;
    let Some(Item::Assert(mut a)) = frag.items.pop() else {
        return Err(not_applicable("malformed assertion"));
    };
    a.id = p.fresh_id();
    p.assign_fresh_ids(&mut a.lhs);
    p.assign_fresh_ids(&mut a.rhs);
    p.items.push(Item::Assert(a));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn apply(src: &str, a: Action) -> Result<String, ActionError> {
        let synth = |p: &Program| synth::synthesize(p, &Default::default()).map(|s| s.program);
        apply_to_text(src, &a, &synth)
    }

    fn id_of(src: &str, pick: impl Fn(&Program) -> NodeId) -> u32 {
        pick(&parse(src).unwrap()).0
    }

    #[test]
    fn wire_format() {
        let a: Action = serde_json::from_str(r#"{"kind":"addCode","canvasPath":"top","text":"1"}"#).unwrap();
        assert_eq!(a, Action::AddCode { canvas_path: CanvasPath::Top, text: "1".into() });
        let a: Action = serde_json::from_str(
            r#"{"kind":"dragDrop","source":{"value":{"node":3,"frame":1,"path":[["::",1]]}},"target":{"canvas":"fun:2"}}"#,
        )
        .unwrap();
        let Action::DragDrop { source: DragSource::Value(v), target: DropTarget::Canvas(CanvasPath::Function(f)) } = a else {
            panic!()
        };
        assert_eq!((v.path[0].1, f), (1, NodeId(2)));
        assert_eq!(serde_json::to_string(&Action::Undo).unwrap(), r#"{"kind":"undo"}"#);
        assert!(serde_json::from_str::<Action>(r#"{"kind":"addCode","canvasPath":"side","text":""}"#).is_err());
    }

    #[test]
    fn add_code_names_binding_and_creates_skeleton() {
        let out = apply("let int_list = [0; 0; 0]\n", Action::AddCode { canvas_path: CanvasPath::Top, text: "length int_list".into() })
            .unwrap();
        assert!(out.contains("let length_int = length int_list"), "{out}");
        assert!(out.contains("let length x1 = (??)"), "{out}");
    }

    #[test]
    fn delete_turns_expression_into_hole() {
        let src = "let x = 1 + 2\n";
        let id = id_of(src, |p| p.bindings().next().unwrap().expr.id);
        assert_eq!(apply(src, Action::DeleteNode { node_id: id }).unwrap(), "let x = (??)\n");
        let bid = id_of(src, |p| p.bindings().next().unwrap().id);
        assert_eq!(apply(src, Action::DeleteNode { node_id: bid }).unwrap().trim(), "");
    }

    #[test]
    fn edit_renames_uses() {
        let src = "let a = 1\n\nlet b = a + a\n";
        let id = id_of(src, |p| p.bindings().next().unwrap().pat.id);
        assert_eq!(apply(src, Action::EditNode { node_id: id, text: "z".into() }).unwrap(), "let z = 1\n\nlet b = z + z\n");
    }

    #[test]
    fn drag_tail_into_recursive_call() {
        let src = "let rec length list =\n  let length2 = length (??) in\n  (??)\n";
        let p = parse(src).unwrap();
        let b = p.bindings().next().unwrap();
        let ExprKind::Fun(param, _) = &b.expr.kind else { panic!() };
        let mut hole = None;
        b.expr.walk(&mut |e| {
            if e.is_hole() && hole.is_none() {
                hole = Some(e.id)
            }
        });
        let a = Action::DragDrop {
            source: DragSource::Value(ValueRef { node: param.id.0, frame: 1, path: vec![("::".into(), 1)] }),
            target: DropTarget::Node(hole.unwrap().0),
        };
        let out = apply(src, a).unwrap();
        assert_eq!(
            out,
            "let rec length list =\n  match list with\n  | [] -> (??)\n  | hd :: tail ->\n      let length2 = length tail in\n      (??)\n"
        );
    }

    #[test]
    fn unknown_and_inapplicable() {
        let src = "let x = 1\n";
        assert_eq!(apply(src, Action::DeleteNode { node_id: 99 }), Err(ActionError::UnknownNode(NodeId(99))));
        assert!(matches!(apply(src, Action::EditNode { node_id: 2, text: "1 +".into() }), Err(ActionError::Parse(_))));
        assert!(matches!(apply(src, Action::Undo), Err(ActionError::NotApplicable(_))));
    }

    #[test]
    fn assert_column_and_destruct() {
        let src = "let rec length l = (??)\n";
        let fid = id_of(src, |p| p.bindings().next().unwrap().id);
        let out = apply(src, Action::AddAssertColumn { function_node_id: fid, args: vec!["[1; 2]".into()], expected: "2".into() })
            .unwrap();
        assert!(out.ends_with("let () = assert (length [1; 2] = 2)\n"), "{out}");
        let pid = id_of(&out, |p| {
            let ExprKind::Fun(q, _) = &p.bindings().next().unwrap().expr.kind else { panic!() };
            q.id
        });
        let out = apply(&out, Action::Destruct { value_ref: ValueRef { node: pid, frame: 1, path: vec![] } }).unwrap();
        assert!(out.contains("match l with\n  | [] -> (??)\n  | hd :: tail -> (??)"), "{out}");
    }

    #[test]
    fn add_code_inside_function() {
        let src = "let f x = x\n";
        let fid = id_of(src, |p| p.bindings().next().unwrap().id);
        let out = apply(src, Action::AddCode { canvas_path: CanvasPath::Function(NodeId(fid)), text: "x + 1".into() }).unwrap();
        assert_eq!(out, "let f x =\n  let int = x + 1 in\n  x\n");
    }
}
