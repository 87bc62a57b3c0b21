//! Canonical pretty printer.
//!
//! Layout: 2-space indent, one blank line between top-level items, one
//! match arm per line. An expression is laid out over several lines exactly
//! when it contains a `let` or a `match`.

use super::ast::*;
use super::parser::{binary_level, right_assoc};

/// Precedence levels, loosest first.
const COMPOUND: usize = 0;
const TUPLE: usize = 1;
const UNARY: usize = 9;
const APP: usize = 10;
const ATOM: usize = 11;

pub fn print_program(p: &Program) -> String {
    let mut parts: Vec<String> = p.type_decls.iter().map(print_type_decl).collect();
    for item in &p.items {
        parts.push(match item {
            Item::Let(b) => binding(b, 0, true),
            Item::Assert(a) => assertion(a),
        });
    }
    let mut out = parts.join("\n\n");
    out.push('\n');
    out
}

/// Print one expression as it would appear as a binding right-hand side.
pub fn print_expr(e: &Expr) -> String {
    expr(e, COMPOUND, 0)
}

pub fn print_pat(p: &Pat) -> String {
    pat(p, false)
}

/// Print the left-hand side of a binding, e.g. `rec f x y`.
pub fn print_binding_head(b: &Binding) -> String {
    let (head, _) = binding_head(b);
    head
}

pub fn print_type_decl(d: &TypeDecl) -> String {
    let params = match d.params.len() {
        0 => String::new(),
        1 => format!("'{} ", d.params[0]),
        _ => format!("({}) ", d.params.iter().map(|p| format!("'{p}")).collect::<Vec<_>>().join(", ")),
    };
    let ctors: Vec<String> = d
        .ctors
        .iter()
        .map(|c| {
            if c.args.is_empty() {
                c.name.clone()
            } else {
                let args: Vec<String> = c.args.iter().map(|t| type_expr_at(t, 2)).collect();
                format!("{} of {}", c.name, args.join(" * "))
            }
        })
        .collect();
    format!("type {params}{} = {}", d.name, ctors.join(" | "))
}

pub fn print_type_expr(t: &TypeExpr) -> String {
    type_expr_at(t, 0)
}

/// Levels: 0 arrow, 1 tuple, 2 application.
fn type_expr_at(t: &TypeExpr, level: usize) -> String {
    let (s, mine) = match t {
        TypeExpr::Var(v) => (format!("'{v}"), 3),
        TypeExpr::Con(n, args) => match args.len() {
            0 => (n.clone(), 3),
            1 => (format!("{} {n}", type_expr_at(&args[0], 2)), 2),
            _ => (
                format!("({}) {n}", args.iter().map(|a| type_expr_at(a, 0)).collect::<Vec<_>>().join(", ")),
                2,
            ),
        },
        TypeExpr::Tuple(items) => (items.iter().map(|a| type_expr_at(a, 2)).collect::<Vec<_>>().join(" * "), 1),
        TypeExpr::Arrow(a, b) => (format!("{} -> {}", type_expr_at(a, 1), type_expr_at(b, 0)), 0),
    };
    if mine < level {
        format!("({s})")
    } else {
        s
    }
}

fn assertion(a: &Assertion) -> String {
    let eq = binary_level("=") + 2;
    let mut s = format!("let () = assert ({} = {})", expr(&a.lhs, eq, 2), expr(&a.rhs, eq + 1, 2));
    let attrs = binding_attrs(&a.attrs);
    if !attrs.is_empty() {
        s.push(' ');
        s.push_str(&attrs);
    }
    s
}

fn binding_attrs(a: &Attrs) -> String {
    let mut parts = Vec::new();
    if let Some((x, y)) = a.pos {
        parts.push(format!("[@@pos {x}, {y}]"));
    }
    for h in &a.not_hashes {
        parts.push(format!("[@@not {h}]"));
    }
    for o in &a.other {
        parts.push(format!("[@@{o}]"));
    }
    parts.join(" ")
}

fn expr_attrs(a: &Attrs) -> String {
    let mut parts = Vec::new();
    if let Some((x, y)) = a.pos {
        parts.push(format!("[@pos {x}, {y}]"));
    }
    for h in &a.not_hashes {
        parts.push(format!("[@not {h}]"));
    }
    for o in &a.other {
        parts.push(format!("[@{o}]"));
    }
    parts.join(" ")
}

/// `rec f x y` plus the body that remains after peeling parameters.
fn binding_head(b: &Binding) -> (String, &Expr) {
    let mut head = String::new();
    if b.rec {
        head.push_str("rec ");
    }
    head.push_str(&pat(&b.pat, true));
    let mut body = &b.expr;
    if b.pat.as_var().is_some() {
        while let ExprKind::Fun(p, inner) = &body.kind {
            if !body.attrs.is_empty() {
                break;
            }
            head.push(' ');
            head.push_str(&pat(p, false));
            body = inner;
        }
    }
    (head, body)
}

/// A full `let ... = ...` binding. `top` omits the trailing `in`.
fn binding(b: &Binding, ind: usize, top: bool) -> String {
    let (head, body) = binding_head(b);
    let attrs = binding_attrs(&b.attrs);
    let pad = " ".repeat(ind);
    let mut s = format!("let {head} =");
    if is_multiline(body) {
        s.push('\n');
        s.push_str(&" ".repeat(ind + 2));
        s.push_str(&expr(body, COMPOUND, ind + 2));
        if !attrs.is_empty() {
            s.push('\n');
            s.push_str(&pad);
            s.push_str(&attrs);
        }
        if !top {
            s.push('\n');
            s.push_str(&pad);
            s.push_str("in");
        }
    } else {
        s.push(' ');
        s.push_str(&expr(body, COMPOUND, ind + 2));
        if !attrs.is_empty() {
            s.push(' ');
            s.push_str(&attrs);
        }
        if !top {
            s.push_str(" in");
        }
    }
    s
}

pub fn is_multiline(e: &Expr) -> bool {
    let mut found = false;
    e.walk(&mut |x| {
        if matches!(x.kind, ExprKind::Let(..) | ExprKind::Match(..)) {
            found = true;
        }
    });
    found
}

fn pat(p: &Pat, binding_pos: bool) -> String {
    match &p.kind {
        PatKind::Var(n) => n.clone(),
        PatKind::Wild => "_".into(),
        PatKind::Tuple(ps) => {
            let inner: Vec<String> = ps.iter().map(|q| pat(q, false)).collect();
            let _ = binding_pos;
            format!("({})", inner.join(", "))
        }
        PatKind::Ctor(c, args) => match (c.as_str(), args.len()) {
            ("::", 2) => format!("{} :: {}", pat(&args[0], false), pat(&args[1], false)),
            (_, 0) => c.clone(),
            (_, 1) => format!("{c} {}", pat(&args[0], false)),
            _ => format!("{c} ({})", args.iter().map(|q| pat(q, false)).collect::<Vec<_>>().join(", ")),
        },
    }
}

fn op_as_value(op: &str) -> String {
    if op == "*" || op.starts_with('*') {
        format!("( {op} )")
    } else {
        format!("({op})")
    }
}

fn is_ident(name: &str) -> bool {
    name.chars().next().is_some_and(|c| c.is_ascii_lowercase() || c == '_')
}

/// Elements of a nil-terminated cons chain without attributes on the spine.
fn list_items(e: &Expr) -> Option<Vec<&Expr>> {
    let mut items = Vec::new();
    let mut cur = e;
    loop {
        match &cur.kind {
            ExprKind::Ctor(c, args) if c == "::" && args.len() == 2 && (cur.attrs.is_empty() || std::ptr::eq(cur, e)) => {
                items.push(&args[0]);
                cur = &args[1];
            }
            ExprKind::Ctor(c, args) if c == "[]" && args.is_empty() && cur.attrs.is_empty() => return Some(items),
            _ => return None,
        }
    }
}

fn escape_str(s: &str, quote: char) -> String {
    let mut out = String::new();
    for c in s.chars() {
        match c {
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            '\u{8}' => out.push_str("\\b"),
            '\\' => out.push_str("\\\\"),
            c if c == quote => {
                out.push('\\');
                out.push(c);
            }
            c => out.push(c),
        }
    }
    out
}

pub fn print_const(c: &Const) -> String {
    match c {
        Const::Int(n) => n.to_string(),
        Const::Float(x) => {
            let s = format!("{x:?}");
            if s.contains(['.', 'e', 'E']) || !x.is_finite() {
                s
            } else {
                format!("{s}.")
            }
        }
        Const::Str(s) => format!("\"{}\"", escape_str(s, '"')),
        Const::Char(c) => format!("'{}'", escape_str(&c.to_string(), '\'')),
    }
}

/// Precedence of the construct `e` prints as (attributes ignored).
fn level_of(e: &Expr) -> usize {
    match &e.kind {
        ExprKind::Hole | ExprKind::Var(_) => ATOM,
        ExprKind::Const(Const::Int(n)) if *n < 0 => UNARY,
        ExprKind::Const(Const::Float(x)) if x.is_sign_negative() => UNARY,
        ExprKind::Const(_) => ATOM,
        ExprKind::Ctor(c, args) => {
            if args.is_empty() || list_items(e).is_some() {
                ATOM
            } else if c == "::" {
                binary_level("::") + 2
            } else {
                APP
            }
        }
        ExprKind::App(f, args) => match (f.as_var(), args.len()) {
            (Some(op), 2) if is_binary_op(op) && f.attrs.is_empty() => binary_level(op) + 2,
            (Some("~-"), 1) if f.attrs.is_empty() => UNARY,
            _ => APP,
        },
        ExprKind::Tuple(_) => TUPLE,
        ExprKind::Fun(..) | ExprKind::Let(..) | ExprKind::If(..) | ExprKind::Match(..) => COMPOUND,
    }
}

/// Print `e` in a context that accepts precedence `min` or tighter. `ind` is
/// the column of the enclosing construct, used for continuation lines.
fn expr(e: &Expr, min: usize, ind: usize) -> String {
    if !e.attrs.is_empty() {
        return format!("({} {})", bare(e, COMPOUND, ind), expr_attrs(&e.attrs));
    }
    let body = bare(e, min, ind);
    if level_of(e) < min {
        format!("({body})")
    } else {
        body
    }
}

fn bare(e: &Expr, _min: usize, ind: usize) -> String {
    let pad = " ".repeat(ind);
    match &e.kind {
        ExprKind::Hole => "(??)".into(),
        ExprKind::Const(c) => print_const(c),
        ExprKind::Var(v) => {
            if is_ident(v) {
                v.clone()
            } else {
                op_as_value(v)
            }
        }
        ExprKind::Ctor(c, args) => {
            if let Some(items) = list_items(e) {
                let parts: Vec<String> = items.iter().map(|x| expr(x, TUPLE, ind)).collect();
                return format!("[{}]", parts.join("; "));
            }
            match (c.as_str(), args.len()) {
                (_, 0) => c.clone(),
                ("::", 2) => {
                    let l = binary_level("::") + 2;
                    format!("{} :: {}", expr(&args[0], l + 1, ind), expr(&args[1], l, ind))
                }
                (_, 1) => format!("{c} {}", expr(&args[0], ATOM, ind)),
                _ => {
                    let parts: Vec<String> = args.iter().map(|a| expr(a, TUPLE + 1, ind)).collect();
                    format!("{c} ({})", parts.join(", "))
                }
            }
        }
        ExprKind::Tuple(items) => {
            let parts: Vec<String> = items.iter().map(|x| expr(x, TUPLE + 1, ind)).collect();
            parts.join(", ")
        }
        ExprKind::App(f, args) => {
            if let (Some(op), 2, true) = (f.as_var(), args.len(), f.attrs.is_empty()) {
                if is_binary_op(op) {
                    let l = binary_level(op) + 2;
                    let (ll, rl) = if right_assoc(op) { (l + 1, l) } else { (l, l + 1) };
                    return format!("{} {op} {}", expr(&args[0], ll, ind), expr(&args[1], rl, ind));
                }
            }
            if let (Some("~-"), 1, true) = (f.as_var(), args.len(), f.attrs.is_empty()) {
                let a = &args[0];
                let literal = matches!(a.kind, ExprKind::Const(Const::Int(_) | Const::Float(_))) && a.attrs.is_empty();
                let inner = if literal && level_of(a) == ATOM { format!("({})", bare(a, ATOM, ind)) } else { expr(a, UNARY, ind) };
                return format!("-{inner}");
            }
            let mut s = expr(f, ATOM, ind);
            for a in args {
                s.push(' ');
                s.push_str(&expr(a, ATOM, ind));
            }
            s
        }
        ExprKind::Fun(..) => {
            let mut params = Vec::new();
            let mut cur = e;
            while let ExprKind::Fun(p, body) = &cur.kind {
                if !std::ptr::eq(cur, e) && !cur.attrs.is_empty() {
                    break;
                }
                params.push(pat(p, false));
                cur = body;
            }
            if is_multiline(cur) {
                format!("fun {} ->\n{}  {}", params.join(" "), pad, expr(cur, COMPOUND, ind + 2))
            } else {
                format!("fun {} -> {}", params.join(" "), expr(cur, COMPOUND, ind))
            }
        }
        ExprKind::Let(b, body) => {
            format!("{}\n{pad}{}", binding(b, ind, false), expr(body, COMPOUND, ind))
        }
        ExprKind::If(c, t, el) => {
            let cs = expr(c, TUPLE, ind);
            if is_multiline(t) || is_multiline(el) {
                format!(
                    "if {cs} then\n{pad}  {}\n{pad}else\n{pad}  {}",
                    expr(t, TUPLE, ind + 2),
                    expr(el, COMPOUND, ind + 2)
                )
            } else {
                format!("if {cs} then {} else {}", expr(t, TUPLE, ind), expr(el, COMPOUND, ind))
            }
        }
        ExprKind::Match(s, branches) => {
            let mut out = format!("match {} with", expr(s, TUPLE, ind));
            for (k, br) in branches.iter().enumerate() {
                let last = k + 1 == branches.len();
                let min = if last { COMPOUND } else { TUPLE };
                out.push('\n');
                out.push_str(&pad);
                out.push_str("| ");
                out.push_str(&pat(&br.pat, false));
                if is_multiline(&br.body) {
                    out.push_str(" ->\n");
                    out.push_str(&pad);
                    out.push_str("    ");
                    out.push_str(&expr(&br.body, min, ind + 4));
                } else {
                    out.push_str(" -> ");
                    out.push_str(&expr(&br.body, min, ind + 4));
                }
            }
            out
        }
    }
}
