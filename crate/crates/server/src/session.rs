//! One open file: its text on disk, history, focus and render cache.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::Duration;

use manipos_core::interp::FuelPolicy;
use manipos_core::synth::{synthesize_with, Pcfg, SynthError, SynthOptions, Synthesis};
use manipos_core::syntax::{parse, Program};

use crate::action::{finish, mutate, Action, ActionError};
use crate::history::History;
use crate::render::{render_program, Banner, DocumentModel, Focus};

#[derive(Clone, Debug)]
pub struct Config {
    pub fuel: FuelPolicy,
    /// Soft synthesis limit; the hard limit is four times this.
    pub synth_timeout: Duration,
    pub history_depth: usize,
    /// Grammar for synthesis; the built-in one when unset.
    pub grammar: Option<Arc<Pcfg>>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            fuel: FuelPolicy::default(),
            synth_timeout: Duration::from_secs(10),
            history_depth: crate::history::DEFAULT_DEPTH,
            grammar: None,
        }
    }
}

impl Config {
    pub fn synth_options(&self, cancel: Option<Arc<AtomicBool>>) -> SynthOptions {
        SynthOptions { soft_limit: self.synth_timeout, hard_limit: self.synth_timeout * 4, fuel: self.fuel, cancel, ..SynthOptions::default() }
    }

    pub fn synthesize(&self, p: &Program, cancel: Option<Arc<AtomicBool>>) -> Result<Synthesis, SynthError> {
        let g = self.grammar.as_deref().unwrap_or_else(|| Pcfg::builtin());
        synthesize_with(p, g, &self.synth_options(cancel))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error("{0} no longer exists")]
    FileVanished(PathBuf),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Action(#[from] ActionError),
}

/// What a handled action leaves behind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub token: String,
}

#[derive(Debug)]
pub struct Session {
    path: PathBuf,
    text: String,
    /// Most recent text that parsed; rendered under an error banner when the
    /// file itself does not parse.
    last_good: String,
    version: u64,
    history: History,
    focus: Focus,
    config: Config,
    cache: Option<(u64, DocumentModel)>,
}

/// Replace `path` by writing a sibling file and renaming it over.
pub fn write_atomic(path: &Path, text: &str) -> io::Result<()> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("file");
    let tmp = path.with_file_name(format!(".{name}.manipos-tmp"));
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)
}

impl Session {
    pub fn open(path: impl Into<PathBuf>, config: Config) -> Result<Session, SessionError> {
        let path = path.into();
        let text = read(&path)?;
        let last_good = if parse(&text).is_ok() { text.clone() } else { String::new() };
        let history = History::new(config.history_depth);
        Ok(Session { path, text, last_good, version: 1, history, focus: Focus::new(), config, cache: None })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn token(&self) -> String {
        self.version.to_string()
    }

    pub fn focus(&self) -> &Focus {
        &self.focus
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    fn bump(&mut self) {
        self.version += 1;
        self.cache = None;
    }

    fn set_text(&mut self, text: String) -> Result<(), SessionError> {
        write_atomic(&self.path, &text)?;
        if parse(&text).is_ok() {
            self.last_good = text.clone();
        }
        self.text = text;
        self.bump();
        Ok(())
    }

    fn outcome(&self) -> Outcome {
        Outcome { text: self.text.clone(), token: self.token() }
    }

    /// Pick up edits made by other programs. Returns whether anything changed.
    pub fn refresh(&mut self) -> Result<bool, SessionError> {
        let text = read(&self.path)?;
        if text == self.text {
            return Ok(false);
        }
        if parse(&text).is_ok() {
            self.last_good = text.clone();
        }
        self.text = text;
        self.bump();
        Ok(true)
    }

    /// Apply one action. `seen_token` is the token of the document the
    /// client acted on; references to vanished nodes in an outdated
    /// document are reported as stale.
    pub fn handle(&mut self, action: &Action, seen_token: Option<&str>) -> Result<Outcome, SessionError> {
        match action {
            Action::Undo => {
                let prev = self.history.undo(&self.text).ok_or(ActionError::NothingToUndo)?;
                self.set_text(prev)?;
            }
            Action::Redo => {
                let next = self.history.redo(&self.text).ok_or(ActionError::NothingToRedo)?;
                self.set_text(next)?;
            }
            Action::FocusFrame { function_node_id, frame_no } => {
                let p = parse(&self.text).map_err(ActionError::from)?;
                self.check_nodes(&p, action, seen_token)?;
                self.focus.insert(*function_node_id, *frame_no);
                self.bump();
            }
            _ => {
                let p = parse(&self.text).map_err(ActionError::from)?;
                self.check_nodes(&p, action, seen_token)?;
                let synth = |p: &Program| self.config.synthesize(p, None).map(|s| s.program);
                let q = mutate(&p, action, &synth).map_err(|e| self.stale(e, seen_token))?;
                self.commit(&q)?;
            }
        }
        Ok(self.outcome())
    }

    /// Finish an edited tree and write it, recording history. Unchanged
    /// text is not written.
    pub fn commit(&mut self, q: &Program) -> Result<Outcome, SessionError> {
        let text = finish(q)?;
        if text != self.text {
            let prev = self.text.clone();
            self.set_text(text)?;
            self.history.push(prev);
        }
        Ok(self.outcome())
    }

    fn stale(&self, e: ActionError, seen_token: Option<&str>) -> ActionError {
        match e {
            ActionError::UnknownNode(id) if seen_token.is_some_and(|t| t != self.token()) => ActionError::StaleNode(id),
            e => e,
        }
    }

    fn check_nodes(&self, p: &Program, action: &Action, seen_token: Option<&str>) -> Result<(), ActionError> {
        for id in action.node_ids() {
            if p.node(id).is_none() {
                return Err(self.stale(ActionError::UnknownNode(id), seen_token));
            }
        }
        Ok(())
    }

    /// The document for the current text and focus.
    pub fn document(&mut self) -> DocumentModel {
        if let Some((v, d)) = &self.cache {
            if *v == self.version {
                return d.clone();
            }
        }
        let (source, error) = match parse(&self.text) {
            Ok(p) => (Some(p), None),
            Err(e) => (
                parse(&self.last_good).ok(),
                Some(Banner { message: e.message.clone(), line: Some(e.line), col: Some(e.col) }),
            ),
        };
        let shown = if error.is_none() { self.text.clone() } else { self.last_good.clone() };
        let mut d = render_program(&shown, source.unwrap_or_else(empty_program), &self.focus, self.config.fuel);
        d.file = self.path.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_string();
        d.token = self.token();
        d.error = error;
        self.cache = Some((self.version, d.clone()));
        d
    }

    /// Node ids in the current text, for tests and diagnostics.
    pub fn program(&self) -> Result<Program, ActionError> {
        Ok(parse(&self.text)?)
    }
}

fn empty_program() -> Program {
    parse("").expect("empty program parses")
}

fn read(path: &Path) -> Result<String, SessionError> {
    fs::read_to_string(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => SessionError::FileVanished(path.to_path_buf()),
        _ => SessionError::Io(e),
    })
}
