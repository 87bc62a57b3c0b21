//! Generated names for new bindings, pattern variables and skeleton params.

use std::collections::{BTreeMap, BTreeSet};

use crate::syntax::{Expr, ExprKind};
use crate::types::{CtorTable, Type};

/// `base` if unused, otherwise `base` with the smallest suffix >= 2.
pub fn fresh(base: &str, taken: &BTreeSet<String>) -> String {
    if !taken.contains(base) {
        return base.to_string();
    }
    (2..).map(|i| format!("{base}{i}")).find(|n| !taken.contains(n)).unwrap()
}

/// Like [`fresh`] but records the result in `taken`.
pub fn claim(base: &str, taken: &mut BTreeSet<String>) -> String {
    let n = fresh(base, taken);
    taken.insert(n.clone());
    n
}

/// Pattern variable names for destructing `ctor`. Lists use `hd`/`tail`;
/// other constructors use the initial of each argument type with a running
/// index per initial.
pub fn ctor_arg_names(ctor: &str, ctors: &CtorTable, taken: &mut BTreeSet<String>) -> Vec<String> {
    if ctor == "::" {
        return vec![claim("hd", taken), claim("tail", taken)];
    }
    let Some(sig) = ctors.sigs.get(ctor) else { return Vec::new() };
    let mut counts: BTreeMap<char, usize> = BTreeMap::new();
    sig.args
        .iter()
        .map(|t| {
            let c = type_initial(t);
            let k = counts.entry(c).or_insert(0);
            *k += 1;
            let base = format!("{c}{k}");
            claim(&base, taken)
        })
        .collect()
}

fn type_initial(t: &Type) -> char {
    match t {
        Type::Con(n, _) => n.chars().next().filter(char::is_ascii_lowercase).unwrap_or('v'),
        Type::Var(_) => 'a',
        Type::Tuple(_) => 'p',
        Type::Arrow(..) => 'f',
    }
}

/// Skeleton parameters `x1..xn`.
pub fn skeleton_params(n: usize, taken: &mut BTreeSet<String>) -> Vec<String> {
    (1..=n).map(|i| claim(&format!("x{i}"), taken)).collect()
}

/// Readable name for a type: `int list` becomes `int_list`.
pub fn type_name(t: &Type) -> String {
    match t {
        Type::Con(n, args) => {
            let mut parts: Vec<String> = args.iter().map(type_name).collect();
            parts.push(n.clone());
            parts.join("_")
        }
        Type::Var(_) => "a".into(),
        Type::Tuple(_) => "pair".into(),
        Type::Arrow(..) => "fn".into(),
    }
}

/// Name for a binding holding `e`, whose type is `ty` when known. A call
/// is named after its callee and result type; other values after their type.
/// An unknown result type falls back to `int`.
pub fn value_name(e: &Expr, ty: Option<&Type>) -> String {
    let ground = ty.filter(|t| t.is_ground()).map(type_name);
    match &e.kind {
        ExprKind::App(f, _) => match f.as_var() {
            Some(callee) if callee.chars().all(|c| c.is_alphanumeric() || c == '_') => {
                format!("{callee}_{}", ground.unwrap_or_else(|| "int".into()))
            }
            _ => ground.unwrap_or_else(|| "value".into()),
        },
        ExprKind::Var(v) => v.clone(),
        _ => ground.unwrap_or_else(|| "value".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn suffix_starts_at_two() {
        assert_eq!(fresh("length", &set(&["length"])), "length2");
        assert_eq!(fresh("hd", &set(&["hd", "hd2"])), "hd3");
        assert_eq!(fresh("x", &set(&[])), "x");
    }

    #[test]
    fn list_and_tree_names() {
        let p = parse("type tree = Leaf | Node of tree * int * tree\n\nlet x = 1").unwrap();
        let ctors = CtorTable::new(&p.type_decls);
        let mut taken = set(&["tail"]);
        assert_eq!(ctor_arg_names("::", &ctors, &mut taken), vec!["hd", "tail2"]);
        assert_eq!(ctor_arg_names("Node", &ctors, &mut taken), vec!["t1", "i1", "t2"]);
    }

    #[test]
    fn value_names() {
        let p = parse("let a = length [1; 2]").unwrap();
        let e = &p.bindings().next().unwrap().expr;
        assert_eq!(value_name(e, None), "length_int");
        assert_eq!(value_name(e, Some(&Type::int())), "length_int");
        assert_eq!(type_name(&Type::list(Type::int())), "int_list");
        assert_eq!(skeleton_params(2, &mut set(&["x1"])), vec!["x12", "x2"]);
    }
}
