use std::collections::HashSet;
use std::sync::Arc;

use super::lower::{RBinding, RExpr, RKind};
use super::prims;
use super::value::{Closure, Env, Payload, Value};
use super::{CallRecord, EntryKind, Trace, TraceEntry};
use crate::syntax::{NodeId, Pat, PatKind};
use crate::types::CtorTable;

/// Signalled when the current budget is spent; caught by the nearest
/// enclosing binding.
#[derive(Debug)]
pub(crate) struct OutOfFuel;

type R = Result<Value, OutOfFuel>;

pub(crate) struct Machine<'a> {
    pub ctors: &'a CtorTable,
    pub fuel: i64,
    pub reserve: i64,
    pub frames: u32,
    /// Record full trace entries and visits.
    pub full: bool,
    /// Nodes whose evaluation should be noted in `trace.visited`.
    pub watch: Option<&'a HashSet<NodeId>>,
    pub trace: Trace,
}

impl<'a> Machine<'a> {
    fn tick(&mut self) -> Result<(), OutOfFuel> {
        if self.fuel <= 0 {
            return Err(OutOfFuel);
        }
        self.fuel -= 1;
        Ok(())
    }

    fn log(&mut self, node: NodeId, frame: u32, v: &Value, env: &Env, kind: EntryKind) {
        if let Some(w) = self.watch {
            if w.contains(&node) {
                self.trace.visited.insert(node);
            }
        }
        if self.full {
            self.trace.visits.entry(v.id()).or_default().push((frame, node));
            self.trace.entries.push(TraceEntry { node, frame, value: v.clone(), env: env.clone(), kind });
        }
    }

    pub fn eval(&mut self, e: &Arc<RExpr>, env: &Env, frame: u32) -> R {
        self.tick()?;
        let v = self.eval_inner(e, env, frame)?;
        self.log(e.id, frame, &v, env, EntryKind::Eval);
        Ok(v)
    }

    fn eval_all(&mut self, es: &[Arc<RExpr>], env: &Env, frame: u32) -> Result<Vec<Value>, OutOfFuel> {
        es.iter().map(|x| self.eval(x, env, frame)).collect()
    }

    fn eval_inner(&mut self, e: &Arc<RExpr>, env: &Env, frame: u32) -> R {
        Ok(match &e.kind {
            RKind::Hole => Value::new(Payload::Hole(e.id, env.clone())),
            RKind::Const(c) => Value::from_const(c),
            RKind::Var(n) => match env.lookup(n) {
                Some(v) => v.clone(),
                None => match prims::lookup(n) {
                    Some((name, _)) => Value::new(Payload::Prim(name, Vec::new())),
                    None => Value::bomb(),
                },
            },
            RKind::Ctor(c, args) => Value::ctor(c, self.eval_all(args, env, frame)?),
            RKind::Tuple(items) => Value::tuple(self.eval_all(items, env, frame)?),
            RKind::Fun(..) => self.closure(e, env, frame, None),
            RKind::App(f, args) => {
                if let (RKind::Var(op), 2) = (&f.kind, args.len()) {
                    if (op == "&&" || op == "||") && env.lookup(op).is_none() {
                        return self.short_circuit(op == "&&", f, args, env, frame);
                    }
                }
                let fv = self.eval(f, env, frame)?;
                let argv = self.eval_all(args, env, frame)?;
                let mut v = fv;
                for a in argv {
                    v = self.apply(&v, a)?;
                }
                v
            }
            RKind::Let(b, body) => {
                let env2 = self.binding(b, env, frame, true);
                return self.eval(body, &env2, frame);
            }
            RKind::If(c, t, el) => {
                let cv = self.eval(c, env, frame)?;
                match cv.as_bool() {
                    Some(true) => self.eval(t, env, frame)?,
                    Some(false) => self.eval(el, env, frame)?,
                    None => Value::bomb(),
                }
            }
            RKind::Match(s, branches) => {
                let sv = self.eval(s, env, frame)?;
                if sv.is_stuck() {
                    return Ok(Value::bomb());
                }
                for (pat, body) in branches {
                    if let Some(env2) = self.bind_pat(pat, &sv, env, frame, true)? {
                        return self.eval(body, &env2, frame);
                    }
                }
                Value::bomb()
            }
        })
    }

    fn short_circuit(&mut self, and: bool, f: &Arc<RExpr>, args: &[Arc<RExpr>], env: &Env, frame: u32) -> R {
        self.eval(f, env, frame)?;
        let a = self.eval(&args[0], env, frame)?;
        match a.as_bool() {
            Some(x) if x != and => Ok(Value::bool(x)),
            Some(_) => {
                let b = self.eval(&args[1], env, frame)?;
                Ok(if b.as_bool().is_some() { b } else { Value::bomb() })
            }
            None => Ok(Value::bomb()),
        }
    }

    fn closure(&mut self, e: &Arc<RExpr>, env: &Env, frame: u32, self_name: Option<String>) -> Value {
        let RKind::Fun(param, body, name) = &e.kind else { unreachable!() };
        Value::new(Payload::Closure(Closure {
            fun_id: e.id,
            param: param.clone(),
            body: body.clone(),
            env: env.clone(),
            self_name,
            bound_name: name.clone(),
            origin_frame: frame,
        }))
    }

    pub fn apply(&mut self, f: &Value, arg: Value) -> R {
        match f.payload() {
            Payload::Closure(c) => {
                self.frames += 1;
                let frame = self.frames;
                let mut env = c.env.clone();
                if let Some(n) = &c.self_name {
                    env = env.bind(n.clone(), f.clone());
                }
                let idx = self.trace.calls.len();
                self.trace.calls.push(CallRecord {
                    frame,
                    fun_id: c.fun_id,
                    arg: arg.clone(),
                    ret: None,
                    origin_frame: c.origin_frame,
                });
                let result = match self.bind_pat(&c.param, &arg, &env, frame, false) {
                    Ok(Some(env2)) => self.eval(&c.body, &env2, frame),
                    Ok(None) => Ok(Value::bomb()),
                    Err(e) => Err(e),
                };
                self.trace.calls[idx].ret = Some(result.as_ref().map(Clone::clone).unwrap_or_else(|_| Value::bomb()));
                result
            }
            Payload::Prim(name, held) => {
                let (_, arity) = prims::lookup(name).expect("known primitive");
                let mut args = held.clone();
                args.push(arg);
                if args.len() == arity {
                    // Concatenation copies its left operand; charge for it so
                    // repeated doubling cannot outgrow the budget.
                    let copied = match (*name, args[0].payload()) {
                        ("@", _) => args[0].as_list().map_or(0, |l| l.len()),
                        ("^", Payload::Str(s)) => s.len(),
                        _ => 0,
                    };
                    for _ in 0..copied {
                        self.tick()?;
                    }
                    Ok(prims::apply(name, &args, self.ctors))
                } else {
                    Ok(Value::new(Payload::Prim(name, args)))
                }
            }
            _ => Ok(Value::bomb()),
        }
    }

    /// Match `v` against `p`. `refutable` patterns (match arms) may fail and
    /// return `None`; irrefutable ones bind Bomb to every name on mismatch.
    pub fn bind_pat(&mut self, p: &Pat, v: &Value, env: &Env, frame: u32, refutable: bool) -> Result<Option<Env>, OutOfFuel> {
        match (&p.kind, v.payload()) {
            (PatKind::Var(n), _) => {
                self.tick()?;
                let env2 = env.bind(n.clone(), v.clone());
                self.log(p.id, frame, v, &env2, EntryKind::PatternBind);
                Ok(Some(env2))
            }
            (PatKind::Wild, _) => Ok(Some(env.clone())),
            (PatKind::Tuple(ps), Payload::Tuple(vs)) if ps.len() == vs.len() => self.bind_all(ps, vs, env, frame, refutable),
            (PatKind::Ctor(c, ps), Payload::Ctor(d, vs)) if c == d && ps.len() == vs.len() => {
                self.bind_all(ps, vs, env, frame, refutable)
            }
            _ if refutable => Ok(None),
            _ => {
                let mut env2 = env.clone();
                let bomb = Value::bomb();
                for n in p.names() {
                    env2 = env2.bind(n, bomb.clone());
                }
                Ok(Some(env2))
            }
        }
    }

    fn bind_all(&mut self, ps: &[Pat], vs: &[Value], env: &Env, frame: u32, refutable: bool) -> Result<Option<Env>, OutOfFuel> {
        let mut env2 = env.clone();
        for (q, x) in ps.iter().zip(vs) {
            match self.bind_pat(q, x, &env2, frame, refutable)? {
                Some(e) => env2 = e,
                None => return Ok(None),
            }
        }
        Ok(Some(env2))
    }

    /// Evaluate a binding's right-hand side under its own fuel reserve and
    /// extend `env`. Exhaustion binds every name of the pattern to Bomb.
    pub fn binding(&mut self, b: &RBinding, env: &Env, frame: u32, inner: bool) -> Env {
        let reserved = if inner { self.reserve.min(self.fuel).max(0) } else { 0 };
        self.fuel -= reserved;
        let self_name = if b.rec { b.pat.as_var().map(str::to_string) } else { None };
        let result = match (&b.expr.kind, self_name) {
            (RKind::Fun(..), Some(n)) => self.tick().map(|_| {
                let v = self.closure(&b.expr, env, frame, Some(n));
                self.log(b.expr.id, frame, &v, env, EntryKind::Eval);
                v
            }),
            _ => self.eval(&b.expr, env, frame),
        };
        self.fuel += reserved;
        let bound = match result {
            Ok(v) => self.bind_pat(&b.pat, &v, env, frame, false),
            Err(e) => Err(e),
        };
        match bound {
            Ok(Some(env2)) => env2,
            _ => {
                let bomb = Value::bomb();
                b.pat.names().into_iter().fold(env.clone(), |acc, n| acc.bind(n, bomb.clone()))
            }
        }
    }
}
