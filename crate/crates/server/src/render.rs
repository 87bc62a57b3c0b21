//! The document model sent to the canvas client.
//!
//! Rendering is a pure function of the file text and the focused frame of
//! each function. Colour keys are handed out in order of first display so
//! that equal inputs give byte-identical models.

use std::collections::{BTreeMap, HashMap};

use manipos_core::interp::{self, eval_in, equality, FrameRow, FuelPolicy, Payload, RunResult, Value, Verdict};
use manipos_core::synth::pending_fills;
use manipos_core::syntax::{
    parse, print_expr, print_pat, Binding, Expr, ExprKind, Item, NodeId, ParseError, Pat, PatKind, Program,
};
use manipos_core::types::CtorTable;
use serde::Serialize;

use crate::action::{Action, CanvasPath, ValueRef};

pub const FORMAT_VERSION: u32 = 1;
/// Frames shown at each end of an IO grid.
pub const GRID_EDGE: usize = 3;
const MAX_SUBVALUES: usize = 24;
const MAX_SUBVALUE_DEPTH: usize = 6;

/// Focused call frame per function binding id.
pub type Focus = BTreeMap<u32, u32>;

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct DocumentModel {
    pub format: u32,
    pub file: String,
    pub token: String,
    pub source: String,
    pub error: Option<Banner>,
    pub canvases: Vec<Canvas>,
    pub asserts: Vec<AssertView>,
    pub pending_review: Vec<PendingReview>,
    pub synth_job: Option<JobView>,
    pub autocomplete: Corpus,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct Banner {
    pub message: String,
    pub line: Option<usize>,
    pub col: Option<usize>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct Canvas {
    pub id: CanvasPath,
    pub function_node_id: Option<u32>,
    pub name: Option<String>,
    pub tvs: Vec<TvView>,
    pub io_grid: Option<IoGrid>,
    pub scrutinee_text: Option<String>,
    pub return_tvs: Vec<TvView>,
    pub focused_frame: Option<u32>,
}

/// A tangible value: a binding (or parameter, or return expression) with
/// its live result.
#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct TvView {
    pub node_id: u32,
    pub pattern_text: String,
    pub pattern_node_id: Option<u32>,
    pub expr: Option<ExprNode>,
    pub result: Option<ValueView>,
    pub pos: Option<Pos>,
    pub grayed_out: bool,
    pub subcanvas: Option<CanvasPath>,
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct Pos {
    pub x: i64,
    pub y: i64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct ExprNode {
    pub node_id: u32,
    pub kind: &'static str,
    pub text: String,
    pub hole: bool,
    pub pending: bool,
    pub binders: Vec<PatNode>,
    pub children: Vec<ExprNode>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct PatNode {
    pub node_id: u32,
    pub text: String,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct ValueView {
    pub text: String,
    pub color_key: u32,
    pub value_ref: Option<ValueRef>,
    /// Render children below parents.
    pub tree: bool,
    pub subvalues: Vec<SubValue>,
    /// Value an assertion expects here, when it differs from this one.
    pub expected: Option<String>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct SubValue {
    pub path: Vec<(String, usize)>,
    pub text: String,
    pub color_key: u32,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct IoGrid {
    pub params: Vec<String>,
    pub columns: Vec<IoColumn>,
    pub total_frames: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct IoColumn {
    pub frame: u32,
    pub args: Vec<ValueView>,
    pub ret: ValueView,
    pub expected: Option<String>,
    pub focused: bool,
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "camelCase")]
pub enum AssertState {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct AssertView {
    pub node_id: u32,
    pub text: String,
    pub state: AssertState,
    /// Shown only for unsatisfied assertions.
    pub actual: Option<ValueView>,
    pub expected: Option<String>,
    pub pos: Option<Pos>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct PendingReview {
    pub node_id: u32,
    pub text: String,
    pub accept: Action,
    pub reject: Action,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct JobView {
    pub job_id: u64,
    pub status: String,
    pub message: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct Corpus {
    pub names: Vec<String>,
    pub values: Vec<CorpusValue>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct CorpusValue {
    pub name: String,
    pub value: ValueView,
}

/// Colour keys per distinct runtime value, in order of first display.
#[derive(Default)]
pub(crate) struct Painter {
    keys: HashMap<u32, u32>,
}

impl Painter {
    pub fn key(&mut self, v: &Value) -> u32 {
        let n = self.keys.len() as u32;
        *self.keys.entry(v.id()).or_insert(n)
    }

    pub fn view(&mut self, v: &Value, vref: Option<ValueRef>, ctors: &CtorTable) -> ValueView {
        let color_key = self.key(v);
        let mut subvalues = Vec::new();
        self.subvalues(v, &mut Vec::new(), &mut subvalues);
        ValueView { text: v.to_string(), color_key, value_ref: vref, tree: is_tree(v, ctors), subvalues, expected: None }
    }

    fn subvalues(&mut self, v: &Value, path: &mut Vec<(String, usize)>, out: &mut Vec<SubValue>) {
        let Payload::Ctor(c, args) = v.payload() else { return };
        if path.len() >= MAX_SUBVALUE_DEPTH {
            return;
        }
        for (i, a) in args.iter().enumerate() {
            if out.len() >= MAX_SUBVALUES {
                return;
            }
            path.push((c.clone(), i));
            out.push(SubValue { path: path.clone(), text: a.to_string(), color_key: self.key(a) });
            self.subvalues(a, path, out);
            path.pop();
        }
    }
}

/// A user-declared constructor with a child of its own type.
fn is_tree(v: &Value, ctors: &CtorTable) -> bool {
    let Payload::Ctor(c, args) = v.payload() else { return false };
    let Some(sig) = ctors.sigs.get(c) else { return false };
    if ["list", "option", "bool", "unit"].contains(&sig.type_name.as_str()) {
        return false;
    }
    args.iter().any(|a| match a.payload() {
        Payload::Ctor(d, _) => ctors.sigs.get(d).is_some_and(|s| s.type_name == sig.type_name),
        _ => false,
    })
}

fn pos(b: &Binding) -> Option<Pos> {
    b.attrs.pos.map(|(x, y)| Pos { x, y })
}

fn kind_name(e: &Expr) -> &'static str {
    match &e.kind {
        ExprKind::Hole => "hole",
        ExprKind::Const(_) => "const",
        ExprKind::Ctor(..) => "ctor",
        ExprKind::Var(_) => "var",
        ExprKind::Fun(..) => "fun",
        ExprKind::App(..) => "app",
        ExprKind::Let(..) => "let",
        ExprKind::Tuple(_) => "tuple",
        ExprKind::If(..) => "if",
        ExprKind::Match(..) => "match",
    }
}

pub fn expr_node(e: &Expr) -> ExprNode {
    let pat = |q: &Pat| PatNode { node_id: q.id.0, text: print_pat(q) };
    let binders = match &e.kind {
        ExprKind::Fun(q, _) => vec![pat(q)],
        ExprKind::Let(b, _) => vec![pat(&b.pat)],
        ExprKind::Match(_, branches) => branches.iter().map(|br| pat(&br.pat)).collect(),
        _ => Vec::new(),
    };
    let mut children = Vec::new();
    e.for_each_child(|c| children.push(expr_node(c)));
    ExprNode {
        node_id: e.id.0,
        kind: kind_name(e),
        text: print_expr(e),
        hole: e.is_hole(),
        pending: e.attrs.is_pending(),
        binders,
        children,
    }
}

/// Everything derived from one run of the program.
pub(crate) struct Snapshot {
    pub program: Program,
    pub run: RunResult,
    pub ctors: CtorTable,
    pub fuel: FuelPolicy,
}

impl Snapshot {
    pub fn new(program: Program, fuel: FuelPolicy) -> Snapshot {
        let run = interp::run(&program, fuel);
        let ctors = CtorTable::new(&program.type_decls);
        Snapshot { program, run, ctors, fuel }
    }

    fn last_at(&self, node: NodeId, frame: Option<u32>) -> Option<Value> {
        self.run.trace.values_at(node, frame).pop()
    }

    fn visited_in(&self, node: NodeId, frame: u32) -> bool {
        self.run.trace.entries_at(node).any(|e| e.frame == frame)
    }

    /// Calls of function binding `b` with the focused one, if any.
    pub fn function_frames(&self, b: &Binding, focus: &Focus) -> (Vec<FrameRow>, Option<usize>) {
        let rows = self.run.trace.frames_for(b.id).unwrap_or_default();
        let focused = match focus.get(&b.id.0) {
            Some(f) => rows.iter().position(|r| r.frame == *f).or(if rows.is_empty() { None } else { Some(0) }),
            None if rows.is_empty() => None,
            None => Some(0),
        };
        (rows, focused)
    }

    /// Frame in which the body of a function runs for a call row, when the
    /// call supplied every parameter.
    pub fn body_frame(row: &FrameRow, params: usize) -> Option<u32> {
        (row.frames.len() == params).then(|| *row.frames.last().expect("non-empty"))
    }

    /// (argument values, expected result) of every assertion calling `name`
    /// with `arity` arguments.
    fn expectations(&self, name: &str, arity: usize) -> Vec<(Vec<Value>, Value)> {
        let mut out = Vec::new();
        for (a, rec) in self.program.assertions().zip(&self.run.asserts) {
            let ExprKind::App(f, args) = &a.lhs.kind else { continue };
            if f.as_var() != Some(name) || args.len() != arity {
                continue;
            }
            let vals = args.iter().map(|x| eval_in(x, &rec.env, &self.ctors, self.fuel.per_top_binding)).collect();
            out.push((vals, rec.expected.clone()));
        }
        out
    }
}

fn expected_for(expectations: &[(Vec<Value>, Value)], args: &[Value]) -> Option<Value> {
    expectations
        .iter()
        .find(|(xs, _)| xs.len() == args.len() && xs.iter().zip(args).all(|(x, y)| equality(x, y) == Verdict::Pass))
        .map(|(_, e)| e.clone())
}

/// Render `text` with the given focus. The caller fills in file name,
/// token and job status.
pub fn render(text: &str, focus: &Focus, fuel: FuelPolicy) -> Result<DocumentModel, ParseError> {
    let p = parse(text)?;
    Ok(render_program(text, p, focus, fuel))
}

pub(crate) fn render_program(text: &str, p: Program, focus: &Focus, fuel: FuelPolicy) -> DocumentModel {
    let snap = Snapshot::new(p, fuel);
    let mut painter = Painter::default();
    let mut canvases = vec![Canvas {
        id: CanvasPath::Top,
        function_node_id: None,
        name: None,
        tvs: Vec::new(),
        io_grid: None,
        scrutinee_text: None,
        return_tvs: Vec::new(),
        focused_frame: None,
    }];
    for b in snap.program.bindings() {
        let is_fun = matches!(b.expr.kind, ExprKind::Fun(..));
        let result = snap.last_at(b.expr.id, Some(0)).map(|v| {
            let vref = b.pat.as_var().map(|_| ValueRef { node: b.pat.id.0, frame: 0, path: Vec::new() });
            painter.view(&v, vref, &snap.ctors)
        });
        canvases[0].tvs.push(TvView {
            node_id: b.id.0,
            pattern_text: print_pat(&b.pat),
            pattern_node_id: Some(b.pat.id.0),
            expr: Some(expr_node(&b.expr)),
            result,
            pos: pos(b),
            grayed_out: false,
            subcanvas: is_fun.then_some(CanvasPath::Function(b.id)),
        });
        if is_fun {
            canvases.push(function_canvas(&snap, b, focus, &mut painter));
        }
    }
    let asserts = assert_views(&snap, &mut painter);
    let pending_review = pending_fills(&snap.program)
        .into_iter()
        .map(|id| PendingReview {
            node_id: id.0,
            text: print_expr(&snap.program.find_expr(id).expect("pending node").without_attrs()),
            accept: Action::AcceptFill { node_id: id.0 },
            reject: Action::RejectFill { node_id: id.0 },
        })
        .collect();
    let autocomplete = corpus(&snap, &mut painter);
    DocumentModel {
        format: FORMAT_VERSION,
        file: String::new(),
        token: String::new(),
        source: text.to_string(),
        error: None,
        canvases,
        asserts,
        pending_review,
        synth_job: None,
        autocomplete,
    }
}

fn function_canvas(snap: &Snapshot, b: &Binding, focus: &Focus, painter: &mut Painter) -> Canvas {
    let mut params: Vec<&Pat> = Vec::new();
    let mut body = &b.expr;
    while let ExprKind::Fun(q, inner) = &body.kind {
        params.push(q);
        body = inner;
    }
    let (rows, focused) = snap.function_frames(b, focus);
    let row = focused.map(|i| &rows[i]);
    let frame = row.and_then(|r| Snapshot::body_frame(r, params.len()));
    let name = b.pat.as_var().map(str::to_string);
    let expectations = name.as_deref().map(|n| snap.expectations(n, params.len())).unwrap_or_default();
    let focused_expected = row.and_then(|r| expected_for(&expectations, &r.args));

    let mut tvs = Vec::new();
    for (i, q) in params.iter().enumerate() {
        let pframe = row.and_then(|r| r.frames.get(i).copied());
        let result = pframe.and_then(|f| snap.last_at(q.id, Some(f))).map(|v| {
            let vref = q.as_var().map(|_| ValueRef { node: q.id.0, frame: pframe.unwrap_or(0), path: Vec::new() });
            painter.view(&v, vref, &snap.ctors)
        });
        tvs.push(TvView {
            node_id: q.id.0,
            pattern_text: print_pat(q),
            pattern_node_id: Some(q.id.0),
            expr: None,
            result,
            pos: None,
            grayed_out: row.is_some() && pframe.is_none(),
            subcanvas: None,
        });
    }
    let mut returns = Vec::new();
    let mut scrutinee = None;
    collect_body(snap, body, frame, painter, &mut tvs, &mut returns, &mut scrutinee);
    if let Some(exp) = &focused_expected {
        for tv in returns.iter_mut().filter(|t| !t.grayed_out) {
            if let Some(r) = &mut tv.result {
                if let Some(v) = snap.last_at(NodeId(tv.node_id), frame) {
                    if equality(&v, exp) != Verdict::Pass {
                        r.expected = Some(exp.to_string());
                    }
                }
            }
        }
    }
    let io_grid = (!params.is_empty()).then(|| {
        let shown: Vec<usize> = if rows.len() <= 2 * GRID_EDGE {
            (0..rows.len()).collect()
        } else {
            (0..GRID_EDGE).chain(rows.len() - GRID_EDGE..rows.len()).collect()
        };
        let columns = shown
            .into_iter()
            .map(|i| {
                let r = &rows[i];
                let args = r
                    .args
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        let vref = params.get(k).filter(|q| q.as_var().is_some()).map(|q| ValueRef {
                            node: q.id.0,
                            frame: r.frames[k],
                            path: Vec::new(),
                        });
                        painter.view(v, vref, &snap.ctors)
                    })
                    .collect();
                let mut ret = painter.view(&r.ret, None, &snap.ctors);
                let expected = expected_for(&expectations, &r.args);
                if let Some(e) = &expected {
                    if equality(&r.ret, e) != Verdict::Pass {
                        ret.expected = Some(e.to_string());
                    }
                }
                IoColumn { frame: r.frame, args, ret, expected: expected.map(|e| e.to_string()), focused: Some(i) == focused }
            })
            .collect();
        IoGrid { params: params.iter().map(|q| print_pat(q)).collect(), columns, total_frames: rows.len() }
    });
    Canvas {
        id: CanvasPath::Function(b.id),
        function_node_id: Some(b.id.0),
        name,
        tvs,
        io_grid,
        scrutinee_text: scrutinee,
        return_tvs: returns,
        focused_frame: row.map(|r| r.frame),
    }
}

/// Walk a function body: let bindings and branch pattern variables become
/// TVs, the expressions in return position become return TVs.
fn collect_body(
    snap: &Snapshot,
    e: &Expr,
    frame: Option<u32>,
    painter: &mut Painter,
    tvs: &mut Vec<TvView>,
    returns: &mut Vec<TvView>,
    scrutinee: &mut Option<String>,
) {
    let grayed = |node: NodeId| frame.is_some_and(|f| !snap.visited_in(node, f));
    let value = |node: NodeId, painter: &mut Painter, vref: Option<ValueRef>| {
        frame.and_then(|f| snap.last_at(node, Some(f))).map(|v| painter.view(&v, vref, &snap.ctors))
    };
    match &e.kind {
        ExprKind::Let(b, rest) if e.attrs.is_empty() => {
            let vref = b.pat.as_var().map(|_| ValueRef { node: b.pat.id.0, frame: frame.unwrap_or(0), path: Vec::new() });
            tvs.push(TvView {
                node_id: b.id.0,
                pattern_text: print_pat(&b.pat),
                pattern_node_id: Some(b.pat.id.0),
                expr: Some(expr_node(&b.expr)),
                result: value(b.expr.id, painter, vref),
                pos: pos(b),
                grayed_out: grayed(b.expr.id),
                subcanvas: None,
            });
            collect_body(snap, rest, frame, painter, tvs, returns, scrutinee);
        }
        ExprKind::Match(s, branches) if e.attrs.is_empty() => {
            if scrutinee.is_none() {
                *scrutinee = Some(print_expr(s));
            }
            for br in branches {
                let mut vars = Vec::new();
                br.pat.walk(&mut |q| {
                    if let PatKind::Var(_) = q.kind {
                        vars.push(q.clone())
                    }
                });
                for q in vars {
                    let vref = Some(ValueRef { node: q.id.0, frame: frame.unwrap_or(0), path: Vec::new() });
                    tvs.push(TvView {
                        node_id: q.id.0,
                        pattern_text: print_pat(&q),
                        pattern_node_id: Some(q.id.0),
                        expr: None,
                        result: value(q.id, painter, vref),
                        pos: None,
                        grayed_out: grayed(q.id),
                        subcanvas: None,
                    });
                }
                collect_body(snap, &br.body, frame, painter, tvs, returns, scrutinee);
            }
        }
        _ => returns.push(TvView {
            node_id: e.id.0,
            pattern_text: String::new(),
            pattern_node_id: None,
            expr: Some(expr_node(e)),
            result: value(e.id, painter, None),
            pos: None,
            grayed_out: grayed(e.id),
            subcanvas: None,
        }),
    }
}

fn assert_views(snap: &Snapshot, painter: &mut Painter) -> Vec<AssertView> {
    let mut out = Vec::new();
    for item in &snap.program.items {
        let Item::Assert(a) = item else { continue };
        let Some(rec) = snap.run.asserts.iter().find(|r| r.id == a.id) else { continue };
        let state = match rec.verdict {
            Verdict::Pass => AssertState::Pass,
            Verdict::Fail => AssertState::Fail,
            Verdict::Indeterminate => AssertState::Indeterminate,
        };
        let failing = state != AssertState::Pass;
        out.push(AssertView {
            node_id: a.id.0,
            text: format!("{} = {}", print_expr(&a.lhs), print_expr(&a.rhs)),
            state,
            actual: failing.then(|| painter.view(&rec.actual, None, &snap.ctors)),
            expected: failing.then(|| rec.expected.to_string()),
            pos: a.attrs.pos.map(|(x, y)| Pos { x, y }),
        });
    }
    out
}

/// Names and top-level values available to every text editor.
fn corpus(snap: &Snapshot, painter: &mut Painter) -> Corpus {
    let mut names: Vec<String> = Vec::new();
    let mut values = Vec::new();
    for b in snap.program.bindings() {
        for n in b.pat.names() {
            if !names.contains(&n) {
                names.push(n.clone());
            }
        }
        let Some(n) = b.pat.as_var() else { continue };
        if matches!(b.expr.kind, ExprKind::Fun(..)) {
            continue;
        }
        if let Some(v) = snap.run.top_env.lookup(n) {
            let vref = Some(ValueRef { node: b.pat.id.0, frame: 0, path: Vec::new() });
            values.push(CorpusValue { name: n.to_string(), value: painter.view(v, vref, &snap.ctors) });
        }
    }
    Corpus { names, values }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LENGTH: &str = "let rec length list =
  match list with
  | [] -> 0
  | hd :: tail ->
      let length2 = length tail in
      1 + length2

let () = assert (length [0; 0] = 2)
";

    fn doc(text: &str, focus: &Focus) -> DocumentModel {
        render(text, focus, FuelPolicy::default()).unwrap()
    }

    fn canvas<'a>(d: &'a DocumentModel, name: &str) -> &'a Canvas {
        d.canvases.iter().find(|c| c.name.as_deref() == Some(name)).unwrap()
    }

    #[test]
    fn function_canvas_has_grid_and_branch_tvs() {
        let d = doc(LENGTH, &Focus::new());
        let c = canvas(&d, "length");
        let grid = c.io_grid.as_ref().unwrap();
        assert_eq!(grid.total_frames, 3);
        assert_eq!(grid.columns[0].args[0].text, "[0; 0]");
        assert_eq!(grid.columns[0].expected.as_deref(), Some("2"));
        assert_eq!(c.scrutinee_text.as_deref(), Some("list"));
        let names: Vec<&str> = c.tvs.iter().map(|t| t.pattern_text.as_str()).collect();
        assert_eq!(names, vec!["list", "hd", "tail", "length2"]);
        assert!(c.tvs.iter().all(|t| !t.grayed_out));
        assert!(c.return_tvs[0].grayed_out);
        assert!(!c.return_tvs[1].grayed_out);
    }

    #[test]
    fn focusing_base_case_grays_cons_branch() {
        let d = doc(LENGTH, &Focus::new());
        let c = canvas(&d, "length");
        let last = c.io_grid.as_ref().unwrap().columns.last().unwrap();
        assert_eq!(last.args[0].text, "[]");
        let mut focus = Focus::new();
        focus.insert(c.function_node_id.unwrap(), last.frame);
        let d = doc(LENGTH, &focus);
        let c = canvas(&d, "length");
        let grayed: Vec<&str> = c.tvs.iter().filter(|t| t.grayed_out).map(|t| t.pattern_text.as_str()).collect();
        assert_eq!(grayed, vec!["hd", "tail", "length2"]);
        assert!(!c.return_tvs[0].grayed_out);
        assert!(c.return_tvs[1].grayed_out);
    }

    #[test]
    fn io_grid_keeps_first_and_last_three() {
        let src = LENGTH.replace("[0; 0]", "[0; 0; 0; 0; 0; 0; 0]").replace("= 2", "= 7");
        let d = doc(&src, &Focus::new());
        let grid = canvas(&d, "length").io_grid.clone().unwrap();
        assert_eq!(grid.total_frames, 8);
        assert_eq!(grid.columns.len(), 6);
        assert_eq!(grid.columns[2].args[0].text, "[0; 0; 0; 0; 0]");
        assert_eq!(grid.columns[3].args[0].text, "[0; 0]");
    }

    #[test]
    fn asserts_colored_by_state() {
        let src = "let x = 1\n\nlet () = assert (x = 1)\n\nlet () = assert (x = 2)\n";
        let d = doc(src, &Focus::new());
        assert_eq!(d.asserts[0].state, AssertState::Pass);
        assert!(d.asserts[0].actual.is_none());
        assert_eq!(d.asserts[1].state, AssertState::Fail);
        assert_eq!(d.asserts[1].expected.as_deref(), Some("2"));
        assert_eq!(d.asserts[1].actual.as_ref().unwrap().text, "1");
    }

    #[test]
    fn render_is_deterministic_and_marks_trees() {
        let src = "type t = L | N of t * int * t\n\nlet x = N (L, 1, N (L, 2, L))\n";
        let a = doc(src, &Focus::new());
        let b = doc(src, &Focus::new());
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let tv = &a.canvases[0].tvs[0];
        assert!(tv.result.as_ref().unwrap().tree);
        assert_eq!(tv.result.as_ref().unwrap().subvalues[0].path, vec![("N".to_string(), 0)]);
    }

    #[test]
    fn pending_fills_offer_review() {
        let d = doc("let f x1 = (x1 + 1 [@synth])\n", &Focus::new());
        assert_eq!(d.pending_review.len(), 1);
        assert_eq!(d.pending_review[0].text, "x1 + 1");
        assert!(matches!(d.pending_review[0].accept, Action::AcceptFill { .. }));
    }

    #[test]
    fn distinct_values_get_distinct_colors() {
        let d = doc("let a = 0\n\nlet b = 0\n\nlet c = a\n", &Focus::new());
        let keys: Vec<u32> = d.canvases[0].tvs.iter().map(|t| t.result.as_ref().unwrap().color_key).collect();
        assert_eq!(keys, vec![0, 1, 0]);
    }
}
