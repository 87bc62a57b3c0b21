//! Fueled tracing interpreter.
//!
//! Programs with holes run to completion: a hole evaluates to a hole value,
//! and eliminating a hole (or anything that went wrong) yields Bomb. Every
//! evaluation step is logged with its call frame so the canvas can show
//! which values flowed where.

mod eval;
mod lower;
pub mod prims;
mod value;

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::ops::Range;

pub use value::{Closure, Env, Payload, Value};

use crate::syntax::{Expr, ExprKind, Item, NodeId, Program, UnknownNode};
use crate::types::CtorTable;
use eval::Machine;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FuelPolicy {
    pub per_top_binding: i64,
    pub reserve_per_inner_binding: i64,
}

impl Default for FuelPolicy {
    fn default() -> Self {
        FuelPolicy { per_top_binding: 1000, reserve_per_inner_binding: 50 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntryKind {
    Eval,
    PatternBind,
}

#[derive(Clone, Debug)]
pub struct TraceEntry {
    pub node: NodeId,
    pub frame: u32,
    pub value: Value,
    pub env: Env,
    pub kind: EntryKind,
}

/// One closure call. `origin_frame` is the frame the closure was created in,
/// which links the calls of a curried function together.
#[derive(Clone, Debug)]
pub struct CallRecord {
    pub frame: u32,
    pub fun_id: NodeId,
    pub arg: Value,
    pub ret: Option<Value>,
    pub origin_frame: u32,
}

/// One row of a function's input/output table.
#[derive(Clone, Debug)]
pub struct FrameRow {
    pub frame: u32,
    /// Frames of each curried application, outermost first.
    pub frames: Vec<u32>,
    pub args: Vec<Value>,
    pub ret: Value,
}

#[derive(Clone, Debug, Default)]
pub struct Trace {
    pub entries: Vec<TraceEntry>,
    pub calls: Vec<CallRecord>,
    /// Value id to the (frame, node) locations it was seen at.
    pub visits: HashMap<u32, Vec<(u32, NodeId)>>,
    /// Function node chain of every function binding, keyed by binding id.
    pub fun_chains: HashMap<NodeId, Vec<NodeId>>,
    /// Range of `entries` produced by each top-level item.
    pub item_spans: Vec<(NodeId, Range<usize>)>,
    /// Watched nodes that were evaluated at least once.
    pub visited: HashSet<NodeId>,
    by_node: HashMap<NodeId, Vec<usize>>,
}

impl Trace {
    fn index(&mut self) {
        self.by_node.clear();
        for (i, e) in self.entries.iter().enumerate() {
            self.by_node.entry(e.node).or_default().push(i);
        }
    }

    /// All logged entries at `node`, in execution order.
    pub fn entries_at(&self, node: NodeId) -> impl Iterator<Item = &TraceEntry> {
        self.by_node.get(&node).into_iter().flatten().map(|i| &self.entries[*i])
    }

    pub fn values_at(&self, node: NodeId, frame: Option<u32>) -> Vec<Value> {
        self.entries_at(node).filter(|e| frame.map_or(true, |f| e.frame == f)).map(|e| e.value.clone()).collect()
    }

    pub fn was_visited(&self, node: NodeId) -> bool {
        self.visited.contains(&node) || self.by_node.contains_key(&node)
    }

    /// Calls of the function bound by `id` (a binding id or the id of the
    /// outermost `fun` node), with curried applications merged into one row.
    pub fn frames_for(&self, id: NodeId) -> Result<Vec<FrameRow>, UnknownNode> {
        let chain = match self.fun_chains.get(&id) {
            Some(c) => c,
            None => self.fun_chains.values().find(|c| c.first() == Some(&id)).ok_or(UnknownNode(id))?,
        };
        let mut rows = Vec::new();
        for call in self.calls.iter().filter(|c| c.fun_id == chain[0]) {
            let mut args = vec![call.arg.clone()];
            let mut frames = vec![call.frame];
            let mut cur = call;
            for fun in &chain[1..] {
                match self.calls.iter().find(|d| d.fun_id == *fun && d.origin_frame == cur.frame) {
                    Some(d) => {
                        args.push(d.arg.clone());
                        frames.push(d.frame);
                        cur = d;
                    }
                    None => break,
                }
            }
            rows.push(FrameRow {
                frame: call.frame,
                frames,
                args,
                ret: cur.ret.clone().unwrap_or_else(Value::bomb),
            });
        }
        Ok(rows)
    }

    /// Line-oriented dump: `frame<TAB>node<TAB>kind<TAB>value`.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let kind = match e.kind {
                EntryKind::Eval => "eval",
                EntryKind::PatternBind => "bind",
            };
            let _ = writeln!(out, "{}\t{}\t{}\t{}", e.frame, e.node, kind, e.value);
        }
        out
    }
}

/// Three-valued outcome of comparing two runtime values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

/// Structural comparison. A concrete mismatch anywhere is a failure; holes,
/// bombs and functions make an otherwise matching comparison indeterminate.
pub fn equality(a: &Value, b: &Value) -> Verdict {
    use Payload::*;
    match (a.payload(), b.payload()) {
        (Hole(..) | Bomb | Closure(_) | Prim(..), _) | (_, Hole(..) | Bomb | Closure(_) | Prim(..)) => Verdict::Indeterminate,
        (Int(x), Int(y)) => (x == y).into(),
        (Float(x), Float(y)) => (x == y).into(),
        (Str(x), Str(y)) => (x == y).into(),
        (Char(x), Char(y)) => (x == y).into(),
        (Tuple(xs), Tuple(ys)) if xs.len() == ys.len() => combine(xs, ys),
        (Ctor(c, xs), Ctor(d, ys)) if c == d && xs.len() == ys.len() => combine(xs, ys),
        _ => Verdict::Fail,
    }
}

fn combine(xs: &[Value], ys: &[Value]) -> Verdict {
    let mut out = Verdict::Pass;
    for (x, y) in xs.iter().zip(ys) {
        match equality(x, y) {
            Verdict::Fail => return Verdict::Fail,
            Verdict::Indeterminate => out = Verdict::Indeterminate,
            Verdict::Pass => {}
        }
    }
    out
}

impl From<bool> for Verdict {
    fn from(b: bool) -> Verdict {
        if b {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Clone, Debug)]
pub struct AssertRecord {
    pub id: NodeId,
    pub lhs: NodeId,
    pub rhs: NodeId,
    pub actual: Value,
    pub expected: Value,
    pub verdict: Verdict,
    /// Top-level environment the assertion was evaluated in.
    pub env: Env,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub trace: Trace,
    pub asserts: Vec<AssertRecord>,
    pub top_env: Env,
}

impl RunResult {
    pub fn all_pass(&self) -> bool {
        self.asserts.iter().all(|a| a.verdict == Verdict::Pass)
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions<'a> {
    pub fuel: FuelPolicy,
    /// Skip full trace recording (entries and visits).
    pub lean: bool,
    /// Nodes to report in `Trace::visited`.
    pub watch: Option<&'a HashSet<NodeId>>,
}

/// Run every top-level item with full tracing.
pub fn run(p: &Program, fuel: FuelPolicy) -> RunResult {
    run_with(p, &RunOptions { fuel, ..Default::default() })
}

/// Bindings run in file order, each with a fresh fuel budget. Assertions
/// run afterwards, each in the environment of the bindings that precede it,
/// so their calls never shift the frames of binding evaluation.
pub fn run_with(p: &Program, opts: &RunOptions) -> RunResult {
    let ctors = CtorTable::new(&p.type_decls);
    let mut m = Machine {
        ctors: &ctors,
        fuel: 0,
        reserve: opts.fuel.reserve_per_inner_binding,
        frames: 0,
        full: !opts.lean,
        watch: opts.watch,
        trace: Trace::default(),
    };
    if !opts.lean {
        m.trace.fun_chains = fun_chains(p);
    }
    let mut env = Env::empty();
    let mut pending = Vec::new();
    for item in &p.items {
        match item {
            Item::Let(b) => {
                let start = m.trace.entries.len();
                m.fuel = opts.fuel.per_top_binding;
                let rb = lower::lower_binding(b);
                env = m.binding(&rb, &env, 0, false);
                m.trace.item_spans.push((b.id, start..m.trace.entries.len()));
            }
            Item::Assert(a) => pending.push((a, env.clone())),
        }
    }
    let mut asserts = Vec::new();
    for (a, aenv) in pending {
        let start = m.trace.entries.len();
        m.fuel = opts.fuel.per_top_binding;
        let actual = m.eval(&lower::lower(&a.lhs), &aenv, 0).unwrap_or_else(|_| Value::bomb());
        let expected = m.eval(&lower::lower(&a.rhs), &aenv, 0).unwrap_or_else(|_| Value::bomb());
        m.trace.item_spans.push((a.id, start..m.trace.entries.len()));
        asserts.push(AssertRecord {
            id: a.id,
            lhs: a.lhs.id,
            rhs: a.rhs.id,
            verdict: equality(&actual, &expected),
            actual,
            expected,
            env: aenv,
        });
    }
    let mut trace = m.trace;
    trace.index();
    RunResult { trace, asserts, top_env: env }
}

/// Evaluate a detached expression in `env` with the given fuel, without
/// tracing. Exhaustion yields Bomb.
pub fn eval_in(e: &Expr, env: &Env, ctors: &CtorTable, fuel: i64) -> Value {
    let mut m = Machine {
        ctors,
        fuel,
        reserve: FuelPolicy::default().reserve_per_inner_binding,
        frames: 0,
        full: false,
        watch: None,
        trace: Trace::default(),
    };
    m.eval(&lower::lower(e), env, 0).unwrap_or_else(|_| Value::bomb())
}

/// Apply a function value to arguments without tracing.
pub fn apply_values(f: &Value, args: &[Value], ctors: &CtorTable, fuel: i64) -> Value {
    let mut m = Machine {
        ctors,
        fuel,
        reserve: FuelPolicy::default().reserve_per_inner_binding,
        frames: 0,
        full: false,
        watch: None,
        trace: Trace::default(),
    };
    let mut v = f.clone();
    for a in args {
        v = match m.apply(&v, a.clone()) {
            Ok(x) => x,
            Err(_) => return Value::bomb(),
        };
    }
    v
}

/// `fun` node ids along the curried chain of every function binding.
pub fn fun_chains(p: &Program) -> HashMap<NodeId, Vec<NodeId>> {
    let mut out = HashMap::new();
    let mut add = |id: NodeId, e: &Expr| {
        let mut chain = Vec::new();
        let mut cur = e;
        while let ExprKind::Fun(_, body) = &cur.kind {
            chain.push(cur.id);
            cur = body;
        }
        if !chain.is_empty() {
            out.insert(id, chain);
        }
    };
    for item in &p.items {
        if let Item::Let(b) = item {
            add(b.id, &b.expr);
        }
    }
    p.walk_exprs(&mut |e| {
        if let ExprKind::Let(b, _) = &e.kind {
            add(b.id, &b.expr);
        }
    });
    out
}
