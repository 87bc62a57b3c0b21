use super::ast::*;
use super::lexer::{lex, Spanned, Tok};
use super::ParseError;

/// Parse a whole source file.
pub fn parse(src: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(src, Vec::new())?;
    let prog = p.program()?;
    Ok(prog)
}

/// Parse a standalone expression, resolving constructor arities against
/// the type declarations of `context`.
pub fn parse_expr(src: &str, context: &[TypeDecl]) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src, context.to_vec())?;
    let e = p.expr()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(e)
}

/// Parse a single pattern variable name or `_`.
pub fn parse_pat(src: &str) -> Result<Pat, ParseError> {
    let mut p = Parser::new(src, Vec::new())?;
    let pat = p.simple_pat()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(pat)
}

struct Parser {
    toks: Vec<Spanned>,
    i: usize,
    decls: Vec<TypeDecl>,
}

impl Parser {
    fn new(src: &str, decls: Vec<TypeDecl>) -> Result<Parser, ParseError> {
        Ok(Parser { toks: lex(src)?, i: 0, decls })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].tok
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.i].tok.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.advance();
            true
        } else {
            false
        }
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let s = &self.toks[self.i];
        ParseError { line: s.line, col: s.col, message: msg.into() }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.err(format!("expected {what}, found {}", describe(self.peek()))))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.advance() {
            Tok::Ident(s) => Ok(s),
            t => {
                self.i -= 1;
                Err(self.err(format!("expected identifier, found {}", describe(&t))))
            }
        }
    }

    fn arity(&self, name: &str) -> Option<usize> {
        builtin_ctor_arity(name).or_else(|| {
            self.decls
                .iter()
                .flat_map(|d| d.ctors.iter())
                .find(|c| c.name == name)
                .map(|c| c.args.len())
        })
    }

    // ---- program structure -------------------------------------------------

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut prog = Program::default();
        while *self.peek() == Tok::Type {
            let d = self.type_decl()?;
            self.decls.push(d.clone());
            prog.type_decls.push(d);
        }
        while *self.peek() != Tok::Eof {
            if *self.peek() == Tok::Type {
                return Err(self.err("type declarations must precede all bindings"));
            }
            prog.items.push(self.item()?);
        }
        prog.renumber();
        Ok(prog)
    }

    fn type_decl(&mut self) -> Result<TypeDecl, ParseError> {
        self.expect(Tok::Type, "`type`")?;
        let mut params = Vec::new();
        match self.peek().clone() {
            Tok::TyVar(v) => {
                self.advance();
                params.push(v);
            }
            Tok::LParen => {
                self.advance();
                loop {
                    match self.advance() {
                        Tok::TyVar(v) => params.push(v),
                        _ => return Err(self.err("expected type variable")),
                    }
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(Tok::RParen, "`)`")?;
            }
            _ => {}
        }
        let name = self.ident()?;
        self.expect(Tok::Eq, "`=`")?;
        self.eat(&Tok::Bar);
        let mut ctors = Vec::new();
        loop {
            let cname = match self.advance() {
                Tok::UIdent(c) => c,
                _ => {
                    self.i -= 1;
                    return Err(self.err("expected constructor name (only variant types are supported)"));
                }
            };
            let args = if self.eat(&Tok::Of) { self.ty_star_list()? } else { Vec::new() };
            ctors.push(CtorDecl { name: cname, args });
            if !self.eat(&Tok::Bar) {
                break;
            }
        }
        Ok(TypeDecl { name, params, ctors })
    }

    /// `t1 * t2 * ...` as separate constructor arguments.
    fn ty_star_list(&mut self) -> Result<Vec<TypeExpr>, ParseError> {
        let mut out = vec![self.ty_app()?];
        while self.eat(&Tok::Star) {
            out.push(self.ty_app()?);
        }
        Ok(out)
    }

    fn ty(&mut self) -> Result<TypeExpr, ParseError> {
        let parts = self.ty_star_list()?;
        let lhs = if parts.len() == 1 { parts.into_iter().next().unwrap() } else { TypeExpr::Tuple(parts) };
        if self.eat(&Tok::Arrow) {
            Ok(TypeExpr::Arrow(Box::new(lhs), Box::new(self.ty()?)))
        } else {
            Ok(lhs)
        }
    }

    fn ty_app(&mut self) -> Result<TypeExpr, ParseError> {
        let mut args: Vec<TypeExpr> = match self.advance() {
            Tok::TyVar(v) => vec![TypeExpr::Var(v)],
            Tok::Ident(n) => vec![TypeExpr::Con(n, Vec::new())],
            Tok::LParen => {
                let mut items = vec![self.ty()?];
                while self.eat(&Tok::Comma) {
                    items.push(self.ty()?);
                }
                self.expect(Tok::RParen, "`)`")?;
                items
            }
            _ => {
                self.i -= 1;
                return Err(self.err("expected a type"));
            }
        };
        while let Tok::Ident(n) = self.peek().clone() {
            self.advance();
            args = vec![TypeExpr::Con(n, args)];
        }
        if args.len() != 1 {
            return Err(self.err("type argument list must be applied to a type constructor"));
        }
        Ok(args.pop().unwrap())
    }

    fn item(&mut self) -> Result<Item, ParseError> {
        if *self.peek() != Tok::Let {
            return Err(self.err(format!("expected `let`, found {}", describe(self.peek()))));
        }
        // let () = assert (lhs = rhs)
        if *self.peek_at(1) == Tok::LParen && *self.peek_at(2) == Tok::RParen && *self.peek_at(3) == Tok::Eq && *self.peek_at(4) == Tok::Assert {
            for _ in 0..5 {
                self.advance();
            }
            let e = self.app_level()?;
            let attrs = self.binding_attrs()?;
            return match e.kind {
                ExprKind::App(f, mut args) if f.as_var() == Some("=") && args.len() == 2 && f.attrs.is_empty() => {
                    let rhs = args.pop().unwrap();
                    let lhs = args.pop().unwrap();
                    Ok(Item::Assert(Assertion { id: NodeId::DUMMY, lhs, rhs, attrs }))
                }
                _ => Err(self.err("only equality assertions `assert (a = b)` are supported")),
            };
        }
        Ok(Item::Let(self.binding()?))
    }

    /// `let [rec] pat params* = expr attrs*` (the leading `let` included).
    fn binding(&mut self) -> Result<Binding, ParseError> {
        self.expect(Tok::Let, "`let`")?;
        let rec = self.eat(&Tok::Rec);
        let pat = self.binding_pat()?;
        let mut params = Vec::new();
        while *self.peek() != Tok::Eq {
            if pat.as_var().is_none() {
                return Err(self.err("function parameters require a named binding"));
            }
            params.push(self.simple_pat()?);
        }
        self.expect(Tok::Eq, "`=`")?;
        let mut body = self.expr()?;
        for p in params.into_iter().rev() {
            body = Expr::fun(p, body);
        }
        let attrs = self.binding_attrs()?;
        Ok(Binding { id: NodeId::DUMMY, rec, pat, expr: body, attrs })
    }

    fn binding_attrs(&mut self) -> Result<Attrs, ParseError> {
        let mut attrs = Attrs::default();
        while let Tok::Attr { binding: true, body } = self.peek().clone() {
            self.add_attr(&mut attrs, &body)?;
            self.advance();
        }
        Ok(attrs)
    }

    fn expr_attrs(&mut self, attrs: &mut Attrs) -> Result<(), ParseError> {
        while let Tok::Attr { binding: false, body } = self.peek().clone() {
            self.add_attr(attrs, &body)?;
            self.advance();
        }
        Ok(())
    }

    fn add_attr(&self, attrs: &mut Attrs, body: &str) -> Result<(), ParseError> {
        let (name, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        let rest = rest.trim();
        match name {
            "pos" => {
                let (x, y) = rest.split_once(',').ok_or_else(|| self.err("malformed pos attribute"))?;
                let x = x.trim().parse().map_err(|_| self.err("malformed pos attribute"))?;
                let y = y.trim().parse().map_err(|_| self.err("malformed pos attribute"))?;
                attrs.pos = Some((x, y));
            }
            "not" => {
                if rest.len() != 16 || !rest.chars().all(|c| matches!(c, '0'..='9' | 'a'..='f')) {
                    return Err(self.err("`not` attribute expects a 16-digit lowercase hex hash"));
                }
                attrs.not_hashes.push(rest.to_string());
            }
            _ => attrs.other.push(body.to_string()),
        }
        Ok(())
    }

    // ---- patterns ----------------------------------------------------------

    fn binding_pat(&mut self) -> Result<Pat, ParseError> {
        if *self.peek() == Tok::LParen && *self.peek_at(1) != Tok::RParen {
            self.advance();
            let mut items = vec![self.simple_pat()?];
            while self.eat(&Tok::Comma) {
                items.push(self.simple_pat()?);
            }
            self.expect(Tok::RParen, "`)`")?;
            return Ok(if items.len() == 1 { items.pop().unwrap() } else { Pat::new(PatKind::Tuple(items)) });
        }
        self.simple_pat()
    }

    /// Variable, `_` or `()`.
    fn simple_pat(&mut self) -> Result<Pat, ParseError> {
        match self.advance() {
            Tok::Ident(n) => Ok(Pat::var(n)),
            Tok::Underscore => Ok(Pat::new(PatKind::Wild)),
            Tok::LParen => {
                self.expect(Tok::RParen, "`)`")?;
                Ok(Pat::new(PatKind::Ctor("()".into(), Vec::new())))
            }
            t => {
                self.i -= 1;
                Err(self.err(format!("expected a pattern, found {}", describe(&t))))
            }
        }
    }

    fn var_pat(&mut self) -> Result<Pat, ParseError> {
        match self.advance() {
            Tok::Ident(n) => Ok(Pat::var(n)),
            Tok::Underscore => Ok(Pat::new(PatKind::Wild)),
            t => {
                self.i -= 1;
                Err(self.err(format!("expected a variable, found {}", describe(&t))))
            }
        }
    }

    fn branch_pat(&mut self) -> Result<Pat, ParseError> {
        let pat = match self.peek().clone() {
            Tok::LBracket => {
                self.advance();
                self.expect(Tok::RBracket, "`]`")?;
                Pat::new(PatKind::Ctor("[]".into(), Vec::new()))
            }
            Tok::LParen if *self.peek_at(1) != Tok::RParen => self.binding_pat()?,
            Tok::LParen => {
                self.advance();
                self.expect(Tok::RParen, "`)`")?;
                Pat::new(PatKind::Ctor("()".into(), Vec::new()))
            }
            Tok::True | Tok::False => {
                let name = if self.advance() == Tok::True { "true" } else { "false" };
                Pat::new(PatKind::Ctor(name.into(), Vec::new()))
            }
            Tok::Underscore => {
                self.advance();
                Pat::new(PatKind::Wild)
            }
            Tok::Ident(_) => {
                let hd = self.var_pat()?;
                self.expect(Tok::ColonColon, "`::`")?;
                let tl = self.var_pat()?;
                Pat::new(PatKind::Ctor("::".into(), vec![hd, tl]))
            }
            Tok::UIdent(c) => {
                self.advance();
                let arity = self.arity(&c).ok_or_else(|| self.err(format!("unknown constructor `{c}`")))?;
                let args = if arity == 0 {
                    Vec::new()
                } else if *self.peek() == Tok::LParen {
                    self.advance();
                    let mut items = vec![self.var_pat()?];
                    while self.eat(&Tok::Comma) {
                        items.push(self.var_pat()?);
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    items
                } else {
                    vec![self.var_pat()?]
                };
                if args.len() != arity {
                    return Err(self.err(format!("constructor `{c}` expects {arity} argument(s)")));
                }
                Pat::new(PatKind::Ctor(c, args))
            }
            t => return Err(self.err(format!("expected a constructor pattern, found {}", describe(&t)))),
        };
        Ok(pat)
    }

    // ---- expressions -------------------------------------------------------

    pub fn expr(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Let => {
                let b = self.binding()?;
                self.expect(Tok::In, "`in`")?;
                let body = self.expr()?;
                Ok(Expr::let_in(b, body))
            }
            Tok::Fun => {
                self.advance();
                let mut params = vec![self.simple_pat()?];
                while *self.peek() != Tok::Arrow {
                    params.push(self.simple_pat()?);
                }
                self.advance();
                let mut body = self.expr()?;
                for p in params.into_iter().rev() {
                    body = Expr::fun(p, body);
                }
                Ok(body)
            }
            Tok::Match => {
                self.advance();
                let scrut = self.expr()?;
                self.expect(Tok::With, "`with`")?;
                self.eat(&Tok::Bar);
                let mut branches = Vec::new();
                loop {
                    let pat = self.branch_pat()?;
                    self.expect(Tok::Arrow, "`->`")?;
                    let body = self.expr()?;
                    branches.push(Branch { pat, body });
                    if !self.eat(&Tok::Bar) {
                        break;
                    }
                }
                Ok(Expr::matching(scrut, branches))
            }
            Tok::If => {
                self.advance();
                let c = self.expr()?;
                self.expect(Tok::Then, "`then`")?;
                let t = self.expr()?;
                self.expect(Tok::Else, "`else`")?;
                let e = self.expr()?;
                Ok(Expr::new(ExprKind::If(Box::new(c), Box::new(t), Box::new(e))))
            }
            _ => self.tuple(),
        }
    }

    fn tuple(&mut self) -> Result<Expr, ParseError> {
        let first = self.binary(0)?;
        if *self.peek() != Tok::Comma {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat(&Tok::Comma) {
            items.push(self.binary(0)?);
        }
        Ok(Expr::new(ExprKind::Tuple(items)))
    }

    /// Precedence climbing over the infix operators.
    fn binary(&mut self, level: usize) -> Result<Expr, ParseError> {
        const LEVELS: usize = 7;
        if level == LEVELS {
            return self.unary();
        }
        let lhs = self.binary(level + 1)?;
        let op = match self.peek() {
            Tok::Eq => Some("=".to_string()),
            Tok::Star => Some("*".to_string()),
            Tok::ColonColon => Some("::".to_string()),
            Tok::Op(o) => Some(o.clone()),
            _ => None,
        };
        let Some(op) = op.filter(|o| op_level(o) == level) else {
            return Ok(lhs);
        };
        if right_assoc(&op) {
            self.advance();
            let rhs = self.binary(level)?;
            return Ok(make_binary(&op, lhs, rhs));
        }
        let mut acc = lhs;
        loop {
            let op = match self.peek() {
                Tok::Eq => "=".to_string(),
                Tok::Star => "*".to_string(),
                Tok::Op(o) => o.clone(),
                _ => break,
            };
            if op_level(&op) != level {
                break;
            }
            self.advance();
            let rhs = self.binary(level + 1)?;
            acc = make_binary(&op, acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Op("-".into()) {
            self.advance();
            return Ok(match self.peek().clone() {
                Tok::Int(n) => {
                    self.advance();
                    Expr::int(-n)
                }
                Tok::Float(x) => {
                    self.advance();
                    Expr::new(ExprKind::Const(Const::Float(-x)))
                }
                _ => Expr::app(Expr::var("~-"), vec![self.unary()?]),
            });
        }
        self.app_level()
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_)
                | Tok::UIdent(_)
                | Tok::Int(_)
                | Tok::Float(_)
                | Tok::Str(_)
                | Tok::Char(_)
                | Tok::True
                | Tok::False
                | Tok::Hole
                | Tok::LParen
                | Tok::LBracket
        )
    }

    fn app_level(&mut self) -> Result<Expr, ParseError> {
        if let Tok::UIdent(c) = self.peek().clone() {
            self.advance();
            let arity = self.arity(&c).ok_or_else(|| self.err(format!("unknown constructor `{c}`")))?;
            if arity == 0 {
                return Ok(Expr::ctor(c, Vec::new()));
            }
            if !self.starts_atom() {
                return Err(self.err(format!("constructor `{c}` expects {arity} argument(s)")));
            }
            let arg = self.atom()?;
            let args = match arg.kind {
                ExprKind::Tuple(items) if arity > 1 && arg.attrs.is_empty() => items,
                _ => vec![arg],
            };
            if args.len() != arity {
                return Err(self.err(format!("constructor `{c}` expects {arity} argument(s)")));
            }
            return Ok(Expr::ctor(c, args));
        }
        let head = self.atom()?;
        let mut args = Vec::new();
        while self.starts_atom() {
            if let Tok::UIdent(c) = self.peek().clone() {
                // A constructor in argument position takes no argument of its own
                // unless parenthesised.
                if self.arity(&c).unwrap_or(0) > 0 {
                    return Err(self.err(format!("constructor `{c}` applied in argument position needs parentheses")));
                }
            }
            args.push(self.atom()?);
        }
        if args.is_empty() {
            Ok(head)
        } else {
            Ok(Expr::app(head, args))
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let tok = self.advance();
        Ok(match tok {
            Tok::Int(n) => Expr::int(n),
            Tok::Float(x) => Expr::new(ExprKind::Const(Const::Float(x))),
            Tok::Str(s) => Expr::new(ExprKind::Const(Const::Str(s))),
            Tok::Char(c) => Expr::new(ExprKind::Const(Const::Char(c))),
            Tok::Ident(n) => Expr::var(n),
            Tok::True => Expr::ctor("true", Vec::new()),
            Tok::False => Expr::ctor("false", Vec::new()),
            Tok::Hole => Expr::hole(),
            Tok::UIdent(c) => {
                if self.arity(&c).is_none() {
                    self.i -= 1;
                    return Err(self.err(format!("unknown constructor `{c}`")));
                }
                Expr::ctor(c, Vec::new())
            }
            Tok::LBracket => {
                let mut items = Vec::new();
                if !self.eat(&Tok::RBracket) {
                    loop {
                        items.push(self.expr()?);
                        if self.eat(&Tok::Semi) {
                            if self.eat(&Tok::RBracket) {
                                break;
                            }
                            continue;
                        }
                        self.expect(Tok::RBracket, "`;` or `]`")?;
                        break;
                    }
                }
                items.into_iter().rev().fold(Expr::ctor("[]", Vec::new()), |tl, hd| Expr::ctor("::", vec![hd, tl]))
            }
            Tok::LParen => {
                if self.eat(&Tok::RParen) {
                    return Ok(Expr::ctor("()", Vec::new()));
                }
                // operator section: (+), ( * ), (::) is not a value
                let op = match self.peek() {
                    Tok::Op(o) => Some(o.clone()),
                    Tok::Eq => Some("=".into()),
                    Tok::Star => Some("*".into()),
                    _ => None,
                };
                if let Some(op) = op {
                    if *self.peek_at(1) == Tok::RParen {
                        self.advance();
                        self.advance();
                        return Ok(Expr::var(op));
                    }
                }
                let mut e = self.expr()?;
                if matches!(self.peek(), Tok::Attr { binding: false, .. }) {
                    let mut attrs = std::mem::take(&mut e.attrs);
                    self.expr_attrs(&mut attrs)?;
                    if !e.attrs.is_empty() {
                        unreachable!();
                    }
                    e.attrs = attrs;
                }
                self.expect(Tok::RParen, "`)`")?;
                e
            }
            t => {
                self.i -= 1;
                return Err(self.err(format!("unexpected {}", describe(&t))));
            }
        })
    }
}

/// Binding strength of infix operators, loosest first.
fn op_level(op: &str) -> usize {
    match op {
        "||" => 0,
        "&&" => 1,
        "=" | "<>" | "<" | ">" | "<=" | ">=" | "==" | "!=" => 2,
        "@" | "^" => 3,
        "::" => 4,
        "+" | "-" | "+." | "-." => 5,
        "*" | "/" | "mod" | "*." | "/." => 6,
        _ => usize::MAX,
    }
}

pub(crate) fn binary_level(op: &str) -> usize {
    op_level(op)
}

pub(crate) fn right_assoc(op: &str) -> bool {
    matches!(op, "||" | "&&" | "@" | "^" | "::")
}

fn make_binary(op: &str, lhs: Expr, rhs: Expr) -> Expr {
    if op == "::" {
        Expr::ctor("::", vec![lhs, rhs])
    } else {
        Expr::app(Expr::var(op), vec![lhs, rhs])
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Eof => "end of input".into(),
        Tok::Ident(s) | Tok::UIdent(s) => format!("`{s}`"),
        Tok::Op(s) => format!("`{s}`"),
        Tok::Attr { .. } => "attribute".into(),
        other => format!("{other:?}"),
    }
}
