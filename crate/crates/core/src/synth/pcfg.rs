//! Probability tables for expression productions.

use std::collections::HashMap;
use std::sync::OnceLock;

const BUILTIN: &str = include_str!("../../data/pcfg.txt");

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PcfgError {
    #[error("line {line}: expected `<table> <key> <probability>`")]
    Malformed { line: usize },
    #[error("line {line}: probability `{text}` is not a number in [0, 1]")]
    BadProbability { line: usize, text: String },
    #[error("missing required row `{table} {key}`")]
    MissingRow { table: String, key: String },
}

/// Tables of `key -> probability`, one per production group.
#[derive(Debug, Clone, PartialEq)]
pub struct Pcfg {
    tables: HashMap<String, Vec<(String, f64)>>,
}

const REQUIRED: &[(&str, &str)] = &[
    ("expr", "var"),
    ("expr", "app"),
    ("expr", "ctor"),
    ("expr", "const"),
    ("expr", "if"),
    ("name", "local"),
    ("name", "pervasive"),
    ("local", "1"),
    ("ctor", "pervasive"),
    ("ctor", "user"),
];

impl Pcfg {
    /// Parse the text format. Blank lines and lines starting with `#` are
    /// skipped. A key listed twice keeps its larger probability.
    pub fn parse(text: &str) -> Result<Pcfg, PcfgError> {
        let mut tables: HashMap<String, Vec<(String, f64)>> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = PcfgError::Malformed { line: i + 1 };
            let (table, rest) = line.split_once(char::is_whitespace).ok_or(malformed.clone())?;
            let (key, prob) = rest.trim().rsplit_once(char::is_whitespace).ok_or(malformed)?;
            let p: f64 = prob
                .parse()
                .ok()
                .filter(|p: &f64| (0.0..=1.0).contains(p) || table == "local" && key.trim() == "decay")
                .ok_or_else(|| PcfgError::BadProbability { line: i + 1, text: prob.to_string() })?;
            let rows = tables.entry(table.to_string()).or_default();
            let key = key.trim().to_string();
            match rows.iter_mut().find(|(k, _)| *k == key) {
                Some(row) => row.1 = row.1.max(p),
                None => rows.push((key, p)),
            }
        }
        let pcfg = Pcfg { tables };
        for (t, k) in REQUIRED {
            if pcfg.lookup(t, k).is_none() {
                return Err(PcfgError::MissingRow { table: t.to_string(), key: k.to_string() });
            }
        }
        Ok(pcfg)
    }

    /// The table shipped with the crate.
    pub fn builtin() -> &'static Pcfg {
        static CELL: OnceLock<Pcfg> = OnceLock::new();
        CELL.get_or_init(|| Pcfg::parse(BUILTIN).expect("bundled table parses"))
    }

    fn lookup(&self, table: &str, key: &str) -> Option<f64> {
        self.tables.get(table)?.iter().find(|(k, _)| k == key).map(|(_, p)| *p)
    }

    /// Probability of a row, 0 when unlisted.
    pub fn get(&self, table: &str, key: &str) -> f64 {
        self.lookup(table, key).unwrap_or(0.0)
    }

    pub fn rows(&self, table: &str) -> &[(String, f64)] {
        self.tables.get(table).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Probability of choosing the `rank`-th most recently introduced local
    /// (1-based). Ranks beyond the table decay from its last row.
    pub fn local_rank(&self, rank: usize) -> f64 {
        if rank == 0 {
            return 0.0;
        }
        if let Some(p) = self.lookup("local", &rank.to_string()) {
            return p;
        }
        let decay = self.get("local", "decay");
        let (last, p) = self
            .rows("local")
            .iter()
            .filter_map(|(k, p)| k.parse::<usize>().ok().map(|k| (k, *p)))
            .max_by_key(|(k, _)| *k)
            .unwrap_or((1, 0.0));
        p * decay.powi((rank - last) as i32)
    }

    /// Largest probability any single leaf can have: the most recent local.
    pub fn max_leaf(&self) -> f64 {
        self.get("expr", "var") * self.get("name", "local") * self.local_rank(1)
    }
}
