//! Binding reordering: every binding is moved after the siblings it
//! depends on, so definitions may appear in any order in the source.

use std::collections::BTreeSet;

use super::scope::{join_chain, needed_names, split_chain};
use super::NonlinearError;
use crate::syntax::*;

/// Rearrange all binding scopes of the program (top level and every let
/// chain). Bindings whose right-hand side refers to their own name become
/// `rec`; mutually dependent bindings keep their relative order.
pub fn reorder(p: &Program) -> Result<Program, NonlinearError> {
    let mut p = p.clone();
    for item in &mut p.items {
        match item {
            Item::Let(b) => rearrange_expr(&mut b.expr)?,
            Item::Assert(a) => {
                rearrange_expr(&mut a.lhs)?;
                rearrange_expr(&mut a.rhs)?;
            }
        }
    }
    let names: Vec<Vec<String>> = p
        .items
        .iter()
        .map(|it| it.as_binding().map(|b| b.pat.names()).unwrap_or_default())
        .collect();
    check_duplicates(&names, "top level")?;
    let needs: Vec<BTreeSet<String>> = p
        .items
        .iter()
        .map(|it| match it {
            Item::Let(b) => needed_names(&b.expr),
            Item::Assert(a) => {
                let mut s = needed_names(&a.lhs);
                s.extend(needed_names(&a.rhs));
                s
            }
        })
        .collect();
    let (perm, rec) = order(&names, &needs);
    let mut old: Vec<Option<Item>> = std::mem::take(&mut p.items).into_iter().map(Some).collect();
    for &k in &perm {
        let mut item = old[k].take().expect("permutation");
        if let (Item::Let(b), true) = (&mut item, rec[k]) {
            b.rec = true;
        }
        p.items.push(item);
    }
    Ok(p)
}

fn rearrange_expr(e: &mut Expr) -> Result<(), NonlinearError> {
    if !matches!(e.kind, ExprKind::Let(..)) {
        let mut res = Ok(());
        e.for_each_child_mut(|c| {
            if res.is_ok() {
                res = rearrange_expr(c);
            }
        });
        return res;
    }
    let (mut links, mut tail) = split_chain(std::mem::replace(e, Expr::hole()));
    for l in &mut links {
        rearrange_expr(&mut l.binding.expr)?;
    }
    rearrange_expr(&mut tail)?;
    let names: Vec<Vec<String>> = links.iter().map(|l| l.binding.pat.names()).collect();
    let checked = check_duplicates(&names, "let chain");
    if checked.is_ok() {
        let needs: Vec<BTreeSet<String>> = links.iter().map(|l| needed_names(&l.binding.expr)).collect();
        let (perm, rec) = order(&names, &needs);
        let mut old: Vec<Option<_>> = links.into_iter().map(Some).collect();
        links = perm
            .iter()
            .map(|&k| {
                let mut l = old[k].take().expect("permutation");
                l.binding.rec |= rec[k];
                l
            })
            .collect();
    }
    *e = join_chain(links, tail);
    checked
}

fn check_duplicates(names: &[Vec<String>], scope: &str) -> Result<(), NonlinearError> {
    let mut seen = BTreeSet::new();
    for n in names.iter().flatten() {
        if !seen.insert(n) {
            return Err(NonlinearError::DuplicateName { name: n.clone(), scope: scope.to_string() });
        }
    }
    Ok(())
}

/// Ordering of one scope. Returns the new order as indices into the input
/// and, per input entry, whether it refers to its own names.
pub fn order(names: &[Vec<String>], needs: &[BTreeSet<String>]) -> (Vec<usize>, Vec<bool>) {
    let n = names.len();
    let rec: Vec<bool> = (0..n).map(|k| names[k].iter().any(|x| needs[k].contains(x))).collect();
    let wants = |a: usize, b: usize| a != b && names[b].iter().any(|x| needs[a].contains(x));
    // Does `from` depend on `to`, directly or through other siblings?
    let reaches = |from: usize, to: usize| {
        let mut seen = vec![false; n];
        let mut stack = vec![from];
        while let Some(k) = stack.pop() {
            for m in 0..n {
                if !seen[m] && wants(k, m) {
                    if m == to {
                        return true;
                    }
                    seen[m] = true;
                    stack.push(m);
                }
            }
        }
        false
    };
    let mut perm: Vec<usize> = (0..n).collect();
    let mut i = 0;
    let mut budget = n * n + n + 1;
    while i < n && budget > 0 {
        budget -= 1;
        let cur = perm[i];
        let hit = (i + 1..n).find(|&j| wants(cur, perm[j]) && !reaches(perm[j], cur));
        match hit {
            Some(j) => {
                let moved = perm.remove(j);
                perm.insert(i, moved);
            }
            None => i += 1,
        }
    }
    (perm, rec)
}
