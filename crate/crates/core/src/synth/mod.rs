//! Example-driven hole filling.
//!
//! Assertions are pushed down to holes as examples, holes may be refined
//! into functions or case splits, and leaf terms are enumerated under a
//! probability bound that shrinks every round. A candidate is returned only
//! if it passes every assertion and the acceptance heuristics.

pub mod guess;
pub mod pcfg;
pub mod pushdown;
pub mod refine;
pub mod score;
pub mod speculate;

use std::collections::{BTreeSet, HashSet};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::interp::{run_with, FuelPolicy, RunOptions, RunResult, Verdict};
use crate::nonlinear::reorder;
use crate::syntax::{not_hash, Attrs, Expr, ExprKind, NodeId, Program};
use crate::types::CtorTable;
use guess::{hole_scope, Guess, Guesser, HoleScope};
pub use pcfg::{Pcfg, PcfgError};
use pushdown::{push_down, Examples};
use refine::refinements;
pub use score::{score, Recency, ScoreError};
use speculate::infer_with_examples;

#[derive(Clone, Debug)]
pub struct SynthOptions {
    /// No new round starts after this much time.
    pub soft_limit: Duration,
    /// The search stops here and returns the best candidate so far.
    pub hard_limit: Duration,
    pub fuel: FuelPolicy,
    pub first_bound: f64,
    pub bound_divisor: f64,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            soft_limit: Duration::from_secs(10),
            hard_limit: Duration::from_secs(40),
            fuel: FuelPolicy::default(),
            first_bound: 0.05,
            bound_divisor: 20.0,
            cancel: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Synthesis {
    pub program: Program,
    pub probability: f64,
    /// Roots of the guessed terms, each marked pending.
    pub fills: Vec<NodeId>,
    pub rounds: usize,
    pub candidates: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum SynthError {
    #[error("no candidate found before the time limit")]
    Timeout,
    #[error("every candidate was tried")]
    SearchExhausted,
    #[error("synthesis was cancelled")]
    Cancelled,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FillError {
    #[error("no node with id {0}")]
    UnknownNode(NodeId),
    #[error("node {0} is not a pending fill")]
    NotPending(NodeId),
}

/// Holes in top-level bindings, in source order.
pub fn program_holes(p: &Program) -> Vec<NodeId> {
    let mut out = Vec::new();
    for b in p.bindings() {
        b.expr.walk(&mut |e| {
            if e.is_hole() {
                out.push(e.id)
            }
        });
    }
    out
}

/// Fill the holes of `p` with the bundled grammar.
pub fn synthesize(p: &Program, opts: &SynthOptions) -> Result<Synthesis, SynthError> {
    synthesize_with(p, Pcfg::builtin(), opts)
}

pub fn synthesize_with(p: &Program, g: &Pcfg, opts: &SynthOptions) -> Result<Synthesis, SynthError> {
    let start = Instant::now();
    let originals: Vec<(NodeId, Attrs)> =
        program_holes(p).into_iter().map(|h| (h, p.find_expr(h).map(|e| e.attrs.clone()).unwrap_or_default())).collect();
    if originals.is_empty() {
        return Err(SynthError::SearchExhausted);
    }
    let ctors = CtorTable::new(&p.type_decls);
    let base = prepare(p.clone(), None, g, &ctors, opts);
    let mut sketches = Vec::new();
    for scope in &base.scopes {
        for sk in refinements(p, &ctors, &base.examples, scope) {
            sketches.push(prepare(sk.program, sk.refinement, g, &ctors, opts));
        }
    }
    sketches.insert(0, base);

    let mut s = Search { g, ctors: &ctors, opts, start, originals, best: None, tested: 0, cut: false, stop: None };
    let mut bound = opts.first_bound;
    let mut rounds = 0;
    loop {
        rounds += 1;
        s.cut = false;
        for st in &sketches {
            s.sketch(st, bound);
            if s.stop.is_some() {
                break;
            }
        }
        if let Some(f) = s.best.take() {
            return Ok(Synthesis {
                program: f.program,
                probability: f.p,
                fills: f.fills,
                rounds,
                candidates: s.tested,
                elapsed: start.elapsed(),
            });
        }
        if let Some(e) = s.stop {
            return Err(e);
        }
        if !s.cut {
            return Err(SynthError::SearchExhausted);
        }
        if start.elapsed() >= opts.soft_limit {
            return Err(SynthError::Timeout);
        }
        bound /= opts.bound_divisor;
    }
}

/// A sketch with what the search needs about its holes.
struct Prepared {
    program: Program,
    refinement: Option<refine::Refinement>,
    examples: Examples,
    scopes: Vec<HoleScope>,
    /// Indices into `scopes`: holes with examples first.
    order: Vec<usize>,
}

fn lean_run(p: &Program, opts: &SynthOptions, watch: Option<&HashSet<NodeId>>) -> RunResult {
    run_with(p, &RunOptions { fuel: opts.fuel, lean: true, watch })
}

fn prepare(program: Program, refinement: Option<refine::Refinement>, g: &Pcfg, ctors: &CtorTable, opts: &SynthOptions) -> Prepared {
    let fuel = opts.fuel.per_top_binding;
    let r = lean_run(&program, opts, None);
    let examples = push_down(&program, &r, ctors, fuel);
    let info = infer_with_examples(&program, &r, ctors, fuel);
    let scopes: Vec<HoleScope> = program_holes(&program).into_iter().map(|h| hole_scope(&program, &info, g, h)).collect();
    let mut order: Vec<usize> = (0..scopes.len()).collect();
    order.sort_by_key(|&i| !examples.contains_key(&scopes[i].hole));
    Prepared { program, refinement, examples, scopes, order }
}

struct Found {
    program: Program,
    p: f64,
    fills: Vec<NodeId>,
}

struct Search<'a> {
    g: &'a Pcfg,
    ctors: &'a CtorTable,
    opts: &'a SynthOptions,
    start: Instant,
    originals: Vec<(NodeId, Attrs)>,
    best: Option<Found>,
    tested: usize,
    cut: bool,
    stop: Option<SynthError>,
}

impl Search<'_> {
    fn check_stop(&mut self) -> bool {
        if self.stop.is_none() {
            if self.opts.cancel.as_ref().is_some_and(|c| c.load(Ordering::Relaxed)) {
                self.stop = Some(SynthError::Cancelled);
            } else if self.start.elapsed() >= self.opts.hard_limit {
                self.stop = Some(SynthError::Timeout);
            }
        }
        self.stop.is_some()
    }

    fn best_p(&self) -> f64 {
        self.best.as_ref().map_or(0.0, |f| f.p)
    }

    fn sketch(&mut self, st: &Prepared, bound: f64) {
        let mut guessers: Vec<Guesser> = st.scopes.iter().map(|s| Guesser::new(self.g, self.ctors, s)).collect();
        self.joint(st, &mut guessers, 0, &mut Vec::new(), 1.0, &st.examples, 0, bound);
        self.cut |= guessers.iter().any(|g| g.cut);
    }

    #[allow(clippy::too_many_arguments)]
    fn joint(
        &mut self,
        st: &Prepared,
        gs: &mut [Guesser],
        k: usize,
        fills: &mut Vec<(usize, Guess)>,
        p_acc: f64,
        examples: &Examples,
        constants: usize,
        bound: f64,
    ) {
        let n = st.order.len();
        if k == n {
            self.finish(st, fills, p_acc);
            return;
        }
        let idx = st.order[k];
        let hole = st.scopes[idx].hole;
        let maxp = self.g.max_leaf();
        let rest = maxp.powi((n - k - 1) as i32);
        let min_p = bound / (p_acc * rest);
        if min_p > maxp {
            self.cut = true;
            return;
        }
        let exs = examples.get(&hole).map(Vec::as_slice).unwrap_or(&[]);
        let fuel = self.opts.fuel.per_top_binding;
        let cands = gs[idx].guesses(min_p, constants > 0 || exs.len() >= 2);
        for c in cands {
            if self.check_stop() || p_acc * c.p * rest < self.best_p() {
                return;
            }
            if c.constant && exs.len() == 1 && exs[0].check(&c.expr, self.ctors, fuel) != Verdict::Pass {
                continue;
            }
            if exs.iter().any(|ex| ex.check(&c.expr, self.ctors, fuel) == Verdict::Fail) {
                continue;
            }
            let constant = c.constant as usize;
            let p = p_acc * c.p;
            fills.push((idx, c));
            if k + 1 == n {
                self.finish(st, fills, p);
            } else if let Some(partial) = splice(st, fills) {
                let r = lean_run(&partial, self.opts, None);
                if !r.asserts.iter().any(|a| a.verdict == Verdict::Fail) {
                    let next = push_down(&partial, &r, self.ctors, fuel);
                    self.joint(st, gs, k + 1, fills, p, &next, constants + constant, bound);
                }
            }
            fills.pop();
        }
    }

    fn finish(&mut self, st: &Prepared, fills: &[(usize, Guess)], p: f64) {
        self.tested += 1;
        if p <= self.best_p() {
            return;
        }
        let Some(program) = splice(st, fills) else { return };
        let watch: HashSet<NodeId> = fills.iter().map(|(i, _)| st.scopes[*i].hole).collect();
        let r = lean_run(&program, self.opts, Some(&watch));
        let filled = Filled {
            program: &program,
            run: &r,
            fills: fills.iter().map(|(i, c)| (st.scopes[*i].hole, c.constant)).collect(),
            refinement: st.refinement.as_ref(),
            originals: &self.originals,
        };
        if filled.violation().is_some() {
            return;
        }
        let mut fills: Vec<NodeId> = watch.into_iter().collect();
        fills.sort();
        self.best = Some(Found { program, p, fills });
    }
}

/// Acceptance rules for a filled sketch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heuristic {
    /// (a) every assertion passes
    AssertionsPass,
    /// (b) at most one hole is filled with a constant term
    OneConstant,
    /// (c) parameters introduced by refinement are used
    ParamsUsed,
    /// (d) no original hole ends up holding a term rejected there before
    NotRejected,
    /// (e) every guessed term is evaluated by some assertion
    FillsEvaluated,
}

/// A candidate program with what the heuristics look at.
pub struct Filled<'a> {
    pub program: &'a Program,
    /// A run of `program` watching the fill roots.
    pub run: &'a RunResult,
    /// Fill roots and whether each is constant.
    pub fills: Vec<(NodeId, bool)>,
    pub refinement: Option<&'a refine::Refinement>,
    /// Holes of the program before synthesis, with their attributes.
    pub originals: &'a [(NodeId, Attrs)],
}

impl Filled<'_> {
    /// The first rule the candidate breaks.
    pub fn violation(&self) -> Option<Heuristic> {
        if !self.run.all_pass() {
            return Some(Heuristic::AssertionsPass);
        }
        if self.fills.iter().filter(|(_, c)| *c).count() > 1 {
            return Some(Heuristic::OneConstant);
        }
        if let Some(rf) = self.refinement {
            let body = self.program.find_expr(rf.hole);
            if !rf.params.iter().all(|x| body.is_some_and(|b| mentions(b, x))) {
                return Some(Heuristic::ParamsUsed);
            }
        }
        for (h, attrs) in self.originals {
            if let Some(e) = self.program.find_expr(*h) {
                if attrs.not_hashes.contains(&not_hash(e)) {
                    return Some(Heuristic::NotRejected);
                }
            }
        }
        if !self.fills.iter().all(|(h, _)| self.run.trace.visited.contains(h)) {
            return Some(Heuristic::FillsEvaluated);
        }
        None
    }
}

fn mentions(e: &Expr, name: &str) -> bool {
    let mut found = false;
    e.walk(&mut |x| found |= matches!(&x.kind, ExprKind::Var(v) if v == name));
    found
}

/// The sketch with its holes replaced. Each guess keeps the hole's id and
/// attributes and is marked pending. Reorders when a guess names a binding
/// that is not yet in scope.
fn splice(st: &Prepared, fills: &[(usize, Guess)]) -> Option<Program> {
    let mut p = st.program.clone();
    let mut needs_reorder = false;
    for (i, c) in fills {
        let scope = &st.scopes[*i];
        let non_lexical: BTreeSet<&str> = scope.entries.iter().filter(|e| !e.lexical).map(|e| e.name.as_str()).collect();
        c.expr.walk(&mut |x| needs_reorder |= x.as_var().is_some_and(|v| non_lexical.contains(v)));
        let mut e = c.expr.clone();
        p.assign_fresh_ids(&mut e);
        let target = p.find_expr_mut(scope.hole)?;
        e.id = target.id;
        e.attrs = target.attrs.clone();
        e.attrs.set_pending(true);
        *target = e;
    }
    if needs_reorder {
        reorder(&p).ok()
    } else {
        Some(p)
    }
}

/// Ids of expressions marked pending.
pub fn pending_fills(p: &Program) -> Vec<NodeId> {
    let mut out = Vec::new();
    p.walk_exprs(&mut |e| {
        if e.attrs.is_pending() {
            out.push(e.id)
        }
    });
    out
}

/// Keep a pending fill: the mark and the rejection history go away.
pub fn accept_fill(p: &Program, id: NodeId) -> Result<Program, FillError> {
    let mut q = p.clone();
    let e = q.find_expr_mut(id).ok_or(FillError::UnknownNode(id))?;
    if !e.attrs.is_pending() {
        return Err(FillError::NotPending(id));
    }
    e.attrs.set_pending(false);
    e.attrs.not_hashes.clear();
    Ok(q)
}

/// Turn a pending fill back into a hole that remembers the rejected term,
/// so later searches never offer it there again.
pub fn reject_fill(p: &Program, id: NodeId) -> Result<Program, FillError> {
    let mut q = p.clone();
    let e = q.find_expr_mut(id).ok_or(FillError::UnknownNode(id))?;
    if !e.attrs.is_pending() {
        return Err(FillError::NotPending(id));
    }
    let h = not_hash(e);
    let mut attrs = e.attrs.clone();
    attrs.set_pending(false);
    if !attrs.not_hashes.contains(&h) {
        attrs.not_hashes.push(h);
    }
    *e = Expr { id, kind: ExprKind::Hole, attrs };
    Ok(q)
}

#[cfg(test)]
mod tests;
