//! Seeded random program text for property tests.
#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub struct Gen {
    rng: StdRng,
    /// Chance in percent that a leaf becomes a hole.
    pub hole_pct: u32,
    next_var: usize,
}

impl Gen {
    pub fn new(seed: u64, hole_pct: u32) -> Gen {
        Gen { rng: StdRng::seed_from_u64(seed), hole_pct, next_var: 0 }
    }

    fn fresh(&mut self, base: &str) -> String {
        self.next_var += 1;
        format!("{base}{}", self.next_var)
    }

    fn pick<'a>(&mut self, xs: &'a [String]) -> Option<&'a String> {
        if xs.is_empty() {
            None
        } else {
            Some(&xs[self.rng.gen_range(0..xs.len())])
        }
    }

    fn leaf(&mut self, scope: &[String]) -> String {
        if self.rng.gen_range(0..100) < self.hole_pct {
            return "(??)".into();
        }
        match self.rng.gen_range(0..3) {
            0 => self.rng.gen_range(0..5).to_string(),
            _ => self.pick(scope).cloned().unwrap_or_else(|| "1".into()),
        }
    }

    /// An expression over ints, lists and tuples. Not necessarily well typed.
    pub fn expr(&mut self, scope: &[String], funs: &[String], depth: u32) -> String {
        if depth == 0 {
            return self.leaf(scope);
        }
        let d = depth - 1;
        match self.rng.gen_range(0..14) {
            0 | 1 => self.leaf(scope),
            2 => format!("({} + {})", self.expr(scope, funs, d), self.expr(scope, funs, d)),
            3 => format!("({} - {})", self.expr(scope, funs, d), self.expr(scope, funs, d)),
            4 => format!("({} * {})", self.expr(scope, funs, d), self.expr(scope, funs, d)),
            5 => format!(
                "(if {} < {} then {} else {})",
                self.expr(scope, funs, d),
                self.expr(scope, funs, d),
                self.expr(scope, funs, d),
                self.expr(scope, funs, d)
            ),
            6 => {
                let v = self.fresh("v");
                let bound = self.expr(scope, funs, d);
                let mut inner = scope.to_vec();
                inner.push(v.clone());
                format!("(let {v} = {bound} in {})", self.expr(&inner, funs, d))
            }
            7 => {
                let v = self.fresh("y");
                let mut inner = scope.to_vec();
                inner.push(v.clone());
                format!("((fun {v} -> {}) {})", self.expr(&inner, funs, d), self.expr(scope, funs, d))
            }
            8 => format!("({}, {})", self.expr(scope, funs, d), self.expr(scope, funs, d)),
            9 => format!("[{}; {}]", self.expr(scope, funs, d), self.expr(scope, funs, d)),
            10 => format!("({} :: {})", self.expr(scope, funs, d), self.list(scope, funs, d)),
            11 => {
                let (h, t) = (self.fresh("h"), self.fresh("t"));
                let mut inner = scope.to_vec();
                inner.push(h.clone());
                inner.push(t.clone());
                format!(
                    "(match {} with\n| [] -> {}\n| {h} :: {t} -> {})",
                    self.list(scope, funs, d),
                    self.expr(scope, funs, d),
                    self.expr(&inner, funs, d)
                )
            }
            12 => {
                let (a, b) = (self.fresh("a"), self.fresh("b"));
                let mut inner = scope.to_vec();
                inner.push(a.clone());
                inner.push(b.clone());
                format!("(match {} with\n| ({a}, {b}) -> {})", self.expr(scope, funs, d), self.expr(&inner, funs, d))
            }
            _ => match self.pick(funs).cloned() {
                Some(f) => format!("({f} {})", self.expr(scope, funs, d)),
                None => self.leaf(scope),
            },
        }
    }

    fn list(&mut self, scope: &[String], funs: &[String], depth: u32) -> String {
        match self.rng.gen_range(0..4) {
            0 => "[]".into(),
            1 => format!("[{}]", self.expr(scope, funs, depth)),
            2 if self.rng.gen_range(0..100) < self.hole_pct => "(??)".into(),
            _ => format!("[{}; {}; {}]", self.leaf(scope), self.leaf(scope), self.leaf(scope)),
        }
    }

    /// A well-scoped program: functions (some recursive), values and asserts.
    pub fn program(&mut self, items: usize) -> String {
        let mut out = String::new();
        let mut values: Vec<String> = Vec::new();
        let mut funs: Vec<String> = Vec::new();
        for i in 0..items {
            match self.rng.gen_range(0..4) {
                0 => {
                    let f = format!("f{i}");
                    let x = self.fresh("x");
                    let rec = self.rng.gen_bool(0.5);
                    let mut fs = funs.clone();
                    if rec {
                        fs.push(f.clone());
                    }
                    let mut scope = values.clone();
                    scope.push(x.clone());
                    let body = self.expr(&scope, &fs, 3);
                    out += &format!("let {}{f} {x} =\n  {body}\n\n", if rec { "rec " } else { "" });
                    funs.push(f);
                }
                1 if !values.is_empty() => {
                    let lhs = self.expr(&values, &funs, 2);
                    let rhs = self.expr(&values, &funs, 1);
                    out += &format!("let () = assert ({lhs} = {rhs})\n\n");
                }
                _ => {
                    let v = format!("v{i}");
                    out += &format!("let {v} = {}\n\n", self.expr(&values, &funs, 3));
                    values.push(v);
                }
            }
        }
        out
    }

    /// Top-level bindings over a small name pool, listed in random order,
    /// with nested sibling lets. Some names are never bound. When `acyclic`,
    /// a binding only mentions itself, unbound names, or names that come
    /// before it in a hidden dependency order.
    pub fn scrambled(&mut self, items: usize, acyclic: bool) -> String {
        const POOL: [&str; 8] = ["a", "b", "c", "d", "e", "g", "k", "m"];
        let mut order: Vec<&str> = POOL.to_vec();
        for i in (1..order.len()).rev() {
            order.swap(i, self.rng.gen_range(0..=i));
        }
        let bound: Vec<&str> = order[..items.min(POOL.len())].to_vec();
        let mut emitted: Vec<usize> = (0..bound.len()).collect();
        for i in (1..emitted.len()).rev() {
            emitted.swap(i, self.rng.gen_range(0..=i));
        }
        let mut out = String::new();
        for k in emitted {
            let n = bound[k];
            let visible: Vec<String> = POOL
                .iter()
                .filter(|m| !acyclic || **m == n || bound.iter().position(|b| b == *m).is_none_or(|j| j < k))
                .map(|s| s.to_string())
                .collect();
            let body = if self.rng.gen_bool(0.4) {
                let inner = POOL[self.rng.gen_range(0..POOL.len())].to_string();
                let e1 = self.refs(&visible);
                let mut under = visible.clone();
                under.push(inner.clone());
                let e2 = self.refs(&under);
                format!("\n  let {inner} = {e1} in\n  {e2}")
            } else {
                self.refs(&visible)
            };
            out += &format!("let {n} = {body}\n\n");
        }
        out
    }

    fn refs(&mut self, names: &[String]) -> String {
        match self.rng.gen_range(0..4) {
            0 => self.rng.gen_range(0..9).to_string(),
            1 => self.pick(names).cloned().unwrap(),
            2 => format!("({}, {})", self.pick(names).cloned().unwrap(), self.pick(names).cloned().unwrap()),
            _ => format!("{} + {}", self.pick(names).cloned().unwrap(), self.rng.gen_range(0..9)),
        }
    }
}
