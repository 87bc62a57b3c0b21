use super::ParseError;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    UIdent(String),
    TyVar(String),
    Int(i64),
    Float(f64),
    Str(String),
    Char(char),
    Let,
    Rec,
    In,
    Fun,
    Match,
    With,
    If,
    Then,
    Else,
    Type,
    Of,
    Assert,
    True,
    False,
    Hole,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Arrow,
    Bar,
    Eq,
    ColonColon,
    Star,
    Underscore,
    /// Infix operator other than `=`, `*` and `::`.
    Op(String),
    /// `[@body]` (binding = false) or `[@@body]` (binding = true).
    Attr { binding: bool, body: String },
    Eof,
}

#[derive(Clone, Debug)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    Lexer { chars: src.chars().collect(), i: 0, line: 1, col: 1 }.run()
}

struct Lexer {
    chars: Vec<char>,
    i: usize,
    line: usize,
    col: usize,
}

const OP_CHARS: &str = "+-*/<>=&|^@!.";

impl Lexer {
    fn peek(&self, k: usize) -> Option<char> {
        self.chars.get(self.i + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.i).copied()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err(&self, line: usize, col: usize, msg: impl Into<String>) -> ParseError {
        ParseError { line, col, message: msg.into() }
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars().enumerate().all(|(k, c)| self.peek(k) == Some(c))
    }

    fn run(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        loop {
            while matches!(self.peek(0), Some(c) if c.is_whitespace()) {
                self.bump();
            }
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek(0) else {
                out.push(Spanned { tok: Tok::Eof, line, col });
                return Ok(out);
            };
            let tok = if self.starts_with("(*") {
                return Err(self.err(line, col, "comments are not supported"));
            } else if self.starts_with("(??)") {
                for _ in 0..4 {
                    self.bump();
                }
                Tok::Hole
            } else if self.starts_with("[@") {
                self.attr(line, col)?
            } else if c.is_ascii_digit() {
                self.number(line, col)?
            } else if c.is_ascii_lowercase() || c == '_' {
                let word = self.word();
                keyword(&word).unwrap_or(if word == "_" { Tok::Underscore } else { Tok::Ident(word) })
            } else if c.is_ascii_uppercase() {
                Tok::UIdent(self.word())
            } else if c == '"' {
                self.string(line, col)?
            } else if c == '\'' {
                self.quote(line, col)?
            } else {
                self.symbol(line, col)?
            };
            out.push(Spanned { tok, line, col });
        }
    }

    fn word(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek(0) {
            if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn number(&mut self, line: usize, col: usize) -> Result<Tok, ParseError> {
        let mut s = String::new();
        while matches!(self.peek(0), Some(c) if c.is_ascii_digit() || c == '_') {
            s.push(self.bump().unwrap());
        }
        let mut float = false;
        if self.peek(0) == Some('.') {
            float = true;
            s.push(self.bump().unwrap());
            while matches!(self.peek(0), Some(c) if c.is_ascii_digit()) {
                s.push(self.bump().unwrap());
            }
        }
        if matches!(self.peek(0), Some('e' | 'E')) {
            float = true;
            s.push(self.bump().unwrap());
            if matches!(self.peek(0), Some('+' | '-')) {
                s.push(self.bump().unwrap());
            }
            while matches!(self.peek(0), Some(c) if c.is_ascii_digit()) {
                s.push(self.bump().unwrap());
            }
        }
        let s: String = s.chars().filter(|c| *c != '_').collect();
        if float {
            s.parse().map(Tok::Float).map_err(|_| self.err(line, col, "bad float literal"))
        } else {
            s.parse().map(Tok::Int).map_err(|_| self.err(line, col, "integer literal out of range"))
        }
    }

    fn escape(&mut self, line: usize, col: usize) -> Result<char, ParseError> {
        match self.bump() {
            Some('n') => Ok('\n'),
            Some('t') => Ok('\t'),
            Some('r') => Ok('\r'),
            Some('b') => Ok('\u{8}'),
            Some('\\') => Ok('\\'),
            Some('"') => Ok('"'),
            Some('\'') => Ok('\''),
            Some(' ') => Ok(' '),
            _ => Err(self.err(line, col, "unknown escape sequence")),
        }
    }

    fn string(&mut self, line: usize, col: usize) -> Result<Tok, ParseError> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err(line, col, "unterminated string literal")),
                Some('"') => return Ok(Tok::Str(s)),
                Some('\\') => s.push(self.escape(line, col)?),
                Some(c) => s.push(c),
            }
        }
    }

    fn quote(&mut self, line: usize, col: usize) -> Result<Tok, ParseError> {
        // 'c' / '\n' are characters, 'a (no closing quote) is a type variable.
        if self.peek(1) == Some('\\') {
            self.bump();
            self.bump();
            let c = self.escape(line, col)?;
            if self.bump() != Some('\'') {
                return Err(self.err(line, col, "unterminated character literal"));
            }
            return Ok(Tok::Char(c));
        }
        if self.peek(2) == Some('\'') && self.peek(1).is_some() {
            self.bump();
            let c = self.bump().unwrap();
            self.bump();
            return Ok(Tok::Char(c));
        }
        self.bump();
        let name = self.word();
        if name.is_empty() {
            return Err(self.err(line, col, "stray quote"));
        }
        Ok(Tok::TyVar(name))
    }

    fn attr(&mut self, line: usize, col: usize) -> Result<Tok, ParseError> {
        self.bump();
        self.bump();
        let binding = if self.peek(0) == Some('@') {
            self.bump();
            true
        } else {
            false
        };
        let mut body = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err(line, col, "unterminated attribute")),
                Some(']') => break,
                Some('[') => return Err(self.err(line, col, "nested brackets in attribute")),
                Some(c) => body.push(c),
            }
        }
        Ok(Tok::Attr { binding, body: body.trim().to_string() })
    }

    fn symbol(&mut self, line: usize, col: usize) -> Result<Tok, ParseError> {
        let c = self.peek(0).unwrap();
        let simple = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ';' => Some(Tok::Semi),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = simple {
            self.bump();
            return Ok(t);
        }
        if self.starts_with("::") {
            self.bump();
            self.bump();
            return Ok(Tok::ColonColon);
        }
        if !OP_CHARS.contains(c) {
            return Err(self.err(line, col, format!("unexpected character `{c}`")));
        }
        let mut s = String::new();
        while matches!(self.peek(0), Some(c) if OP_CHARS.contains(c)) {
            s.push(self.bump().unwrap());
        }
        Ok(match s.as_str() {
            "->" => Tok::Arrow,
            "|" => Tok::Bar,
            "=" => Tok::Eq,
            "*" => Tok::Star,
            "+" | "-" | "/" | "+." | "-." | "*." | "/." | "<>" | "<" | ">" | "<=" | ">=" | "=="
            | "!=" | "&&" | "||" | "^" | "@" => Tok::Op(s),
            _ => return Err(self.err(line, col, format!("unknown operator `{s}`"))),
        })
    }
}

fn keyword(w: &str) -> Option<Tok> {
    Some(match w {
        "let" => Tok::Let,
        "rec" => Tok::Rec,
        "in" => Tok::In,
        "fun" => Tok::Fun,
        "match" => Tok::Match,
        "with" => Tok::With,
        "if" => Tok::If,
        "then" => Tok::Then,
        "else" => Tok::Else,
        "type" => Tok::Type,
        "of" => Tok::Of,
        "assert" => Tok::Assert,
        "true" => Tok::True,
        "false" => Tok::False,
        "mod" => Tok::Op("mod".into()),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn hole_and_attrs() {
        assert_eq!(
            toks("(??) [@@pos 152, 49] [@not 0123abcd]"),
            vec![
                Tok::Hole,
                Tok::Attr { binding: true, body: "pos 152, 49".into() },
                Tok::Attr { binding: false, body: "not 0123abcd".into() },
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_rejected() {
        let e = lex("let x = 1 (* hi *)").unwrap_err();
        assert_eq!((e.line, e.col), (1, 11));
    }

    #[test]
    fn chars_and_tyvars() {
        assert_eq!(toks("'a' 'a '\\n'"), vec![Tok::Char('a'), Tok::TyVar("a".into()), Tok::Char('\n'), Tok::Eof]);
    }

    #[test]
    fn operators() {
        assert_eq!(
            toks("a :: b @ c <> d -> |"),
            vec![
                Tok::Ident("a".into()),
                Tok::ColonColon,
                Tok::Ident("b".into()),
                Tok::Op("@".into()),
                Tok::Ident("c".into()),
                Tok::Op("<>".into()),
                Tok::Ident("d".into()),
                Tok::Arrow,
                Tok::Bar,
                Tok::Eof
            ]
        );
    }
}
