use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Arc;

use super::lower::RExpr;
use crate::syntax::{print_const, Const, NodeId, Pat};
use crate::types::{CtorTable, TyCtx, Type};

static NEXT_VALUE_ID: AtomicU32 = AtomicU32::new(1);

fn fresh_value_id() -> u32 {
    NEXT_VALUE_ID.fetch_add(1, Ordering::Relaxed)
}

/// A runtime value. Cloning shares the instance; `id` identifies it for
/// provenance and colouring.
#[derive(Clone)]
pub struct Value(Arc<ValueData>);

pub struct ValueData {
    pub id: u32,
    pub payload: Payload,
}

#[derive(Clone)]
pub enum Payload {
    Int(i64),
    Float(f64),
    Str(String),
    Char(char),
    Ctor(String, Vec<Value>),
    Tuple(Vec<Value>),
    Closure(Closure),
    /// Partially applied primitive.
    Prim(&'static str, Vec<Value>),
    /// Result of evaluating a hole: its location and the environment there.
    Hole(NodeId, Env),
    Bomb,
}

#[derive(Clone)]
pub struct Closure {
    pub fun_id: NodeId,
    pub param: Arc<Pat>,
    pub body: Arc<RExpr>,
    pub env: Env,
    /// Set for `let rec` functions; the closure is rebound to this name on entry.
    pub self_name: Option<String>,
    /// Name the closure was bound to, used for display.
    pub bound_name: Option<String>,
    /// Frame in which the closure was created.
    pub origin_frame: u32,
}

impl Value {
    pub fn new(payload: Payload) -> Value {
        Value(Arc::new(ValueData { id: fresh_value_id(), payload }))
    }

    pub fn int(n: i64) -> Value {
        Value::new(Payload::Int(n))
    }
    pub fn bool(b: bool) -> Value {
        Value::ctor(if b { "true" } else { "false" }, Vec::new())
    }
    pub fn unit() -> Value {
        Value::ctor("()", Vec::new())
    }
    pub fn ctor(name: &str, args: Vec<Value>) -> Value {
        Value::new(Payload::Ctor(name.to_string(), args))
    }
    pub fn tuple(items: Vec<Value>) -> Value {
        Value::new(Payload::Tuple(items))
    }
    pub fn bomb() -> Value {
        Value::new(Payload::Bomb)
    }
    pub fn list(items: Vec<Value>) -> Value {
        items.into_iter().rev().fold(Value::ctor("[]", Vec::new()), |tl, hd| Value::ctor("::", vec![hd, tl]))
    }

    pub fn from_const(c: &Const) -> Value {
        Value::new(match c {
            Const::Int(n) => Payload::Int(*n),
            Const::Float(x) => Payload::Float(*x),
            Const::Str(s) => Payload::Str(s.clone()),
            Const::Char(c) => Payload::Char(*c),
        })
    }

    pub fn id(&self) -> u32 {
        self.0.id
    }

    pub fn payload(&self) -> &Payload {
        &self.0.payload
    }

    pub fn ptr_eq(&self, other: &Value) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn is_bomb(&self) -> bool {
        matches!(self.payload(), Payload::Bomb)
    }

    pub fn is_hole(&self) -> bool {
        matches!(self.payload(), Payload::Hole(..))
    }

    /// Hole or Bomb: a value that cannot be eliminated.
    pub fn is_stuck(&self) -> bool {
        self.is_bomb() || self.is_hole()
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self.payload() {
            Payload::Ctor(c, a) if a.is_empty() && c == "true" => Some(true),
            Payload::Ctor(c, a) if a.is_empty() && c == "false" => Some(false),
            _ => None,
        }
    }

    /// Elements of a nil-terminated list.
    pub fn as_list(&self) -> Option<Vec<Value>> {
        let mut out = Vec::new();
        let mut cur = self.clone();
        loop {
            let next = match cur.payload() {
                Payload::Ctor(c, a) if c == "[]" && a.is_empty() => return Some(out),
                Payload::Ctor(c, a) if c == "::" && a.len() == 2 => {
                    out.push(a[0].clone());
                    a[1].clone()
                }
                _ => return None,
            };
            cur = next;
        }
    }

    /// Whether the value contains a Hole or Bomb anywhere.
    pub fn contains_stuck(&self) -> bool {
        match self.payload() {
            Payload::Hole(..) | Payload::Bomb => true,
            Payload::Ctor(_, vs) | Payload::Tuple(vs) => vs.iter().any(Value::contains_stuck),
            _ => false,
        }
    }

    /// Whether this is a first-order value with no holes, bombs or functions.
    pub fn is_concrete(&self) -> bool {
        match self.payload() {
            Payload::Int(_) | Payload::Float(_) | Payload::Str(_) | Payload::Char(_) => true,
            Payload::Ctor(_, vs) | Payload::Tuple(vs) => vs.iter().all(Value::is_concrete),
            _ => false,
        }
    }

    /// Type of the value, reconstructed from its payload and the constructor
    /// declarations. Unknown parts (empty lists, holes) become type variables.
    pub fn type_of(&self, ctors: &CtorTable, cx: &mut TyCtx) -> Type {
        match self.payload() {
            Payload::Int(_) => Type::int(),
            Payload::Float(_) => Type::float(),
            Payload::Str(_) => Type::string(),
            Payload::Char(_) => Type::char(),
            Payload::Tuple(vs) => Type::Tuple(vs.iter().map(|v| v.type_of(ctors, cx)).collect()),
            Payload::Ctor(c, args) => match ctors.sigs.get(c) {
                Some(sig) => {
                    let (ats, rt) = cx.ctor_type(sig);
                    for (a, at) in args.iter().zip(ats) {
                        let t = a.type_of(ctors, cx);
                        cx.try_unify(&t, &at);
                    }
                    cx.resolve(&rt)
                }
                None => cx.fresh(),
            },
            _ => cx.fresh(),
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_value(f, self, false)
    }
}

/// Structural equality of concrete values (holes, bombs and functions are
/// never equal to anything).
impl PartialEq for Value {
    fn eq(&self, other: &Value) -> bool {
        super::equality(self, other) == super::Verdict::Pass
    }
}

fn write_value(f: &mut fmt::Formatter<'_>, v: &Value, nested: bool) -> fmt::Result {
    match v.payload() {
        Payload::Int(n) => {
            if *n < 0 && nested {
                write!(f, "({n})")
            } else {
                write!(f, "{n}")
            }
        }
        Payload::Float(x) => write!(f, "{}", print_const(&Const::Float(*x))),
        Payload::Str(s) => write!(f, "{}", print_const(&Const::Str(s.clone()))),
        Payload::Char(c) => write!(f, "{}", print_const(&Const::Char(*c))),
        Payload::Hole(..) => write!(f, "?"),
        Payload::Bomb => write!(f, "<bomb>"),
        Payload::Closure(c) => write!(f, "{}", c.bound_name.as_deref().unwrap_or("<fun>")),
        Payload::Prim(name, args) => {
            if args.is_empty() {
                write!(f, "({name})")
            } else {
                write!(f, "<fun>")
            }
        }
        Payload::Tuple(vs) => {
            write!(f, "(")?;
            for (i, x) in vs.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write_value(f, x, false)?;
            }
            write!(f, ")")
        }
        Payload::Ctor(c, args) => {
            if let Some(items) = v.as_list() {
                write!(f, "[")?;
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write_value(f, x, false)?;
                }
                return write!(f, "]");
            }
            if nested && !args.is_empty() {
                write!(f, "(")?;
            }
            match (c.as_str(), args.len()) {
                (_, 0) => write!(f, "{c}")?,
                ("::", 2) => {
                    write_value(f, &args[0], true)?;
                    write!(f, " :: ")?;
                    write_value(f, &args[1], !is_cons(&args[1]))?;
                }
                (_, 1) => {
                    write!(f, "{c} ")?;
                    write_value(f, &args[0], true)?;
                }
                _ => {
                    write!(f, "{c} (")?;
                    for (i, x) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write_value(f, x, false)?;
                    }
                    write!(f, ")")?;
                }
            }
            if nested && !args.is_empty() {
                write!(f, ")")?;
            }
            Ok(())
        }
    }
}

fn is_cons(v: &Value) -> bool {
    matches!(v.payload(), Payload::Ctor(c, _) if c == "::")
}

/// Persistent environment: a shared linked list of bindings.
#[derive(Clone, Default)]
pub struct Env(Option<Arc<EnvNode>>);

pub struct EnvNode {
    pub name: String,
    pub value: Value,
    pub next: Env,
}

impl Env {
    pub fn empty() -> Env {
        Env(None)
    }

    pub fn bind(&self, name: impl Into<String>, value: Value) -> Env {
        Env(Some(Arc::new(EnvNode { name: name.into(), value, next: self.clone() })))
    }

    pub fn lookup(&self, name: &str) -> Option<&Value> {
        let mut cur = &self.0;
        while let Some(node) = cur {
            if node.name == name {
                return Some(&node.value);
            }
            cur = &node.next.0;
        }
        None
    }

    /// Visible bindings, innermost first, shadowed names omitted.
    pub fn entries(&self) -> Vec<(&str, &Value)> {
        let mut out: Vec<(&str, &Value)> = Vec::new();
        let mut cur = &self.0;
        while let Some(node) = cur {
            if !out.iter().any(|(n, _)| *n == node.name) {
                out.push((&node.name, &node.value));
            }
            cur = &node.next.0;
        }
        out
    }

    pub fn ptr_eq(&self, other: &Env) -> bool {
        match (&self.0, &other.0) {
            (None, None) => true,
            (Some(a), Some(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl fmt::Debug for Env {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries()).finish()
    }
}
