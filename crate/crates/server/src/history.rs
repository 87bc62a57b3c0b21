//! Bounded undo/redo over whole-file snapshots.

use std::collections::VecDeque;

pub const DEFAULT_DEPTH: usize = 200;

#[derive(Debug, Clone)]
pub struct History {
    undo: VecDeque<String>,
    redo: Vec<String>,
    depth: usize,
}

impl Default for History {
    fn default() -> Self {
        History::new(DEFAULT_DEPTH)
    }
}

impl History {
    pub fn new(depth: usize) -> History {
        History { undo: VecDeque::new(), redo: Vec::new(), depth }
    }

    /// Record the text an edit replaced. Clears the redo stack.
    pub fn push(&mut self, previous: String) {
        self.undo.push_back(previous);
        if self.undo.len() > self.depth {
            self.undo.pop_front();
        }
        self.redo.clear();
    }

    /// Text to restore, given the current text.
    pub fn undo(&mut self, current: &str) -> Option<String> {
        let prev = self.undo.pop_back()?;
        self.redo.push(current.to_string());
        Some(prev)
    }

    pub fn redo(&mut self, current: &str) -> Option<String> {
        let next = self.redo.pop()?;
        self.undo.push_back(current.to_string());
        Some(next)
    }

    pub fn undo_len(&self) -> usize {
        self.undo.len()
    }

    pub fn redo_len(&self) -> usize {
        self.redo.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undo_redo_round_trip() {
        let mut h = History::default();
        h.push("a".into());
        h.push("b".into());
        assert_eq!(h.undo("c").as_deref(), Some("b"));
        assert_eq!(h.undo("b").as_deref(), Some("a"));
        assert_eq!(h.undo("a"), None);
        assert_eq!(h.redo("a").as_deref(), Some("b"));
        assert_eq!(h.redo("b").as_deref(), Some("c"));
        assert_eq!(h.redo("c"), None);
    }

    #[test]
    fn depth_is_bounded_and_push_clears_redo() {
        let mut h = History::new(3);
        for i in 0..10 {
            h.push(i.to_string());
        }
        assert_eq!(h.undo_len(), 3);
        assert_eq!(h.undo("x").as_deref(), Some("9"));
        assert_eq!(h.redo_len(), 1);
        h.push("y".into());
        assert_eq!(h.redo_len(), 0);
    }
}
