use std::cmp::Ordering;

use super::value::{Payload, Value};
use super::{equality, Verdict};
use crate::types::CtorTable;

/// Built-in functions and their arities.
pub const PERVASIVES: &[(&str, usize)] = &[
    ("+", 2),
    ("-", 2),
    ("*", 2),
    ("/", 2),
    ("mod", 2),
    ("+.", 2),
    ("-.", 2),
    ("*.", 2),
    ("/.", 2),
    ("=", 2),
    ("<>", 2),
    ("==", 2),
    ("!=", 2),
    ("<", 2),
    (">", 2),
    ("<=", 2),
    (">=", 2),
    ("&&", 2),
    ("||", 2),
    ("not", 1),
    ("^", 2),
    ("@", 2),
    ("max", 2),
    ("min", 2),
    ("~-", 1),
];

pub fn lookup(name: &str) -> Option<(&'static str, usize)> {
    PERVASIVES.iter().find(|(n, _)| *n == name).copied()
}

/// Ordering on first-order values; `None` when either side is not comparable.
fn compare(a: &Value, b: &Value, ctors: &CtorTable) -> Option<Ordering> {
    match (a.payload(), b.payload()) {
        (Payload::Int(x), Payload::Int(y)) => Some(x.cmp(y)),
        (Payload::Float(x), Payload::Float(y)) => x.partial_cmp(y),
        (Payload::Str(x), Payload::Str(y)) => Some(x.cmp(y)),
        (Payload::Char(x), Payload::Char(y)) => Some(x.cmp(y)),
        (Payload::Tuple(xs), Payload::Tuple(ys)) if xs.len() == ys.len() => lexicographic(xs, ys, ctors),
        (Payload::Ctor(c, xs), Payload::Ctor(d, ys)) => {
            if c == d {
                lexicographic(xs, ys, ctors)
            } else {
                let ty = ctors.sigs.get(c)?.type_name.clone();
                let order = ctors.ctors_of(&ty);
                let i = order.iter().position(|n| n == c)?;
                let j = order.iter().position(|n| n == d)?;
                Some(i.cmp(&j))
            }
        }
        _ => None,
    }
}

fn lexicographic(xs: &[Value], ys: &[Value], ctors: &CtorTable) -> Option<Ordering> {
    for (x, y) in xs.iter().zip(ys) {
        match compare(x, y, ctors)? {
            Ordering::Equal => continue,
            o => return Some(o),
        }
    }
    Some(xs.len().cmp(&ys.len()))
}

/// Apply a saturated primitive. Any stuck or ill-typed operand gives Bomb.
pub fn apply(name: &str, args: &[Value], ctors: &CtorTable) -> Value {
    if args.iter().any(Value::is_stuck) {
        return Value::bomb();
    }
    let bomb = Value::bomb;
    let ints = || match (args[0].payload(), args.get(1).map(Value::payload)) {
        (Payload::Int(a), Some(Payload::Int(b))) => Some((*a, *b)),
        _ => None,
    };
    let floats = || match (args[0].payload(), args.get(1).map(Value::payload)) {
        (Payload::Float(a), Some(Payload::Float(b))) => Some((*a, *b)),
        _ => None,
    };
    let int_op = |f: fn(i64, i64) -> Option<i64>| ints().and_then(|(a, b)| f(a, b)).map(Value::int).unwrap_or_else(bomb);
    let float_op = |f: fn(f64, f64) -> f64| {
        floats().map(|(a, b)| Value::new(Payload::Float(f(a, b)))).unwrap_or_else(bomb)
    };
    let ord = |test: fn(Ordering) -> bool| {
        compare(&args[0], &args[1], ctors).map(|o| Value::bool(test(o))).unwrap_or_else(bomb)
    };
    match name {
        "+" => int_op(|a, b| Some(a.wrapping_add(b))),
        "-" => int_op(|a, b| Some(a.wrapping_sub(b))),
        "*" => int_op(|a, b| Some(a.wrapping_mul(b))),
        "/" => int_op(|a, b| if b == 0 { None } else { Some(a.wrapping_div(b)) }),
        "mod" => int_op(|a, b| if b == 0 { None } else { Some(a.wrapping_rem(b)) }),
        "+." => float_op(|a, b| a + b),
        "-." => float_op(|a, b| a - b),
        "*." => float_op(|a, b| a * b),
        "/." => float_op(|a, b| a / b),
        "=" | "==" | "<>" | "!=" => match equality(&args[0], &args[1]) {
            Verdict::Indeterminate => bomb(),
            v => Value::bool((v == Verdict::Pass) == matches!(name, "=" | "==")),
        },
        "<" => ord(|o| o == Ordering::Less),
        ">" => ord(|o| o == Ordering::Greater),
        "<=" => ord(|o| o != Ordering::Greater),
        ">=" => ord(|o| o != Ordering::Less),
        "&&" | "||" => match (args[0].as_bool(), args[1].as_bool()) {
            (Some(a), Some(b)) => Value::bool(if name == "&&" { a && b } else { a || b }),
            _ => bomb(),
        },
        "not" => args[0].as_bool().map(|b| Value::bool(!b)).unwrap_or_else(bomb),
        "~-" => match args[0].payload() {
            Payload::Int(n) => Value::int(n.wrapping_neg()),
            _ => bomb(),
        },
        "^" => match (args[0].payload(), args[1].payload()) {
            (Payload::Str(a), Payload::Str(b)) => Value::new(Payload::Str(format!("{a}{b}"))),
            _ => bomb(),
        },
        "@" => match (args[0].as_list(), args[1].as_list()) {
            (Some(mut a), Some(_)) => {
                let mut out = args[1].clone();
                while let Some(x) = a.pop() {
                    out = Value::ctor("::", vec![x, out]);
                }
                out
            }
            _ => bomb(),
        },
        "max" | "min" => match compare(&args[0], &args[1], ctors) {
            Some(o) => {
                let first = if name == "max" { o != Ordering::Less } else { o != Ordering::Greater };
                if first {
                    args[0].clone()
                } else {
                    args[1].clone()
                }
            }
            None => bomb(),
        },
        _ => bomb(),
    }
}
