//! Probability of an expression under the PCFG.

use super::pcfg::Pcfg;
use crate::nonlinear::scope::is_pervasive;
use crate::syntax::{print_const, print_expr, Const, Expr, ExprKind};
use crate::types::CtorTable;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScoreError {
    #[error("`{0}` has no production in the grammar")]
    UnscorableForm(String),
    #[error("`{0}` is not in scope")]
    Unbound(String),
}

/// Names visible at a hole, most recently introduced first.
#[derive(Debug, Clone, Default)]
pub struct Recency(pub Vec<String>);

impl Recency {
    pub fn rank(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name).map(|i| i + 1)
    }
}

/// Probability of choosing `name` among names (without the `var` or `app`
/// production factor).
pub fn name_price(g: &Pcfg, scope: &Recency, name: &str) -> Result<f64, ScoreError> {
    match scope.rank(name) {
        Some(r) => Ok(g.get("name", "local") * g.local_rank(r)),
        None if is_pervasive(name) => Ok(g.get("name", "pervasive") * g.get("pervasive", name)),
        None => Err(ScoreError::Unbound(name.to_string())),
    }
}

pub fn ctor_price(g: &Pcfg, ctors: &CtorTable, c: &str) -> f64 {
    let builtin = g.get("pctor", c);
    if builtin > 0.0 || ctors.sigs.get(c).is_some_and(|s| ["bool", "unit", "list", "option"].contains(&s.type_name.as_str())) {
        return g.get("ctor", "pervasive") * builtin;
    }
    let users = ctors.user_ctors().len();
    if users == 0 {
        return 0.0;
    }
    g.get("ctor", "user") / users as f64
}

pub fn const_price(g: &Pcfg, c: &Const) -> f64 {
    let table = match c {
        Const::Int(_) => "int",
        Const::Str(_) => "string",
        Const::Char(_) => "char",
        Const::Float(_) => "float",
    };
    g.get("const", table) * g.get(table, &print_const(c))
}

/// Score a guessable expression: variables, applications, constructors,
/// constants and conditionals.
pub fn score(g: &Pcfg, ctors: &CtorTable, scope: &Recency, e: &Expr) -> Result<f64, ScoreError> {
    Ok(match &e.kind {
        ExprKind::Var(n) => g.get("expr", "var") * name_price(g, scope, n)?,
        ExprKind::App(f, args) => {
            let head = match f.as_var() {
                Some(n) => name_price(g, scope, n)?,
                None => score(g, ctors, scope, f)?,
            };
            let mut p = g.get("expr", "app") * head;
            for a in args {
                p *= score(g, ctors, scope, a)?;
            }
            p
        }
        ExprKind::Ctor(c, args) => {
            let mut p = g.get("expr", "ctor") * ctor_price(g, ctors, c);
            for a in args {
                p *= score(g, ctors, scope, a)?;
            }
            p
        }
        ExprKind::Const(c) => g.get("expr", "const") * const_price(g, c),
        ExprKind::If(c, t, el) => {
            g.get("expr", "if") * score(g, ctors, scope, c)? * score(g, ctors, scope, t)? * score(g, ctors, scope, el)?
        }
        _ => return Err(ScoreError::UnscorableForm(print_expr(e))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_expr;

    fn scope(xs: &[&str]) -> Recency {
        Recency(xs.iter().map(|s| s.to_string()).collect())
    }

    fn sc(src: &str, names: &[&str]) -> f64 {
        let ctors = CtorTable::new(&[]);
        score(Pcfg::builtin(), &ctors, &scope(names), &parse_expr(src, &[]).unwrap()).unwrap()
    }

    #[test]
    fn most_recent_variable() {
        let p = sc("y", &["y", "x"]);
        assert!((p - 0.52 * 0.73 * 0.31).abs() < 1e-9);
        assert_eq!((p * 100.0).round(), 12.0);
    }

    #[test]
    fn constants() {
        assert!((sc("0", &[]) - 0.066 * 0.52 * 0.37).abs() < 1e-12);
        assert!((sc("-1", &[]) - 0.066 * 0.52 * 0.011).abs() < 1e-12);
        assert_eq!(sc("17", &[]), 0.0);
    }

    #[test]
    fn infix_application() {
        let p = sc("x + y", &["y", "x"]);
        let var = |r: f64| 0.52 * 0.73 * r;
        let expect = 0.20 * (0.27 * 0.040) * var(0.20) * var(0.31);
        assert!((p - expect).abs() < 1e-15);
        assert_eq!(p, sc("(+) x y", &["y", "x"]));
    }

    #[test]
    fn local_call_and_ctors() {
        let p = sc("f [] :: x", &["x", "f"]);
        let expect = 0.081 * 0.54 * 0.24 * (0.20 * 0.73 * 0.20 * (0.081 * 0.54 * 0.20)) * (0.52 * 0.73 * 0.31);
        assert!((p - expect).abs() < 1e-15);
    }

    #[test]
    fn unscorable_and_unbound() {
        let ctors = CtorTable::new(&[]);
        let g = Pcfg::builtin();
        let e = parse_expr("fun x -> x", &[]).unwrap();
        assert!(matches!(score(g, &ctors, &scope(&[]), &e), Err(ScoreError::UnscorableForm(_))));
        let e = parse_expr("zz", &[]).unwrap();
        assert_eq!(score(g, &ctors, &scope(&[]), &e), Err(ScoreError::Unbound("zz".into())));
    }
}
