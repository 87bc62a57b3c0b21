//! HTTP routes, per-file state, the disk watcher and synthesis jobs.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use manipos_core::syntax::{parse, NodeId};
use serde::{Deserialize, Serialize};
use tokio::sync::watch;

use crate::action::{Action, ActionError};
use crate::complete::{autocomplete, Suggestion};
use crate::render::{DocumentModel, JobView};
use crate::session::{Config, Session, SessionError};

/// How long a poll request waits for a change.
pub const POLL_TIMEOUT: Duration = Duration::from_secs(25);
/// How often files are checked for outside edits.
pub const WATCH_PERIOD: Duration = Duration::from_millis(250);

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(tag = "status", rename_all = "camelCase", rename_all_fields = "camelCase")]
pub enum JobStatus {
    Running,
    Done { probability: f64, fills: Vec<u32> },
    Failed { message: String },
    /// The file changed while the job ran; its result was dropped.
    Discarded,
}

#[derive(Clone, Debug)]
struct Job {
    id: u64,
    status: JobStatus,
    cancel: Arc<AtomicBool>,
}

pub struct OpenFile {
    session: Mutex<Session>,
    token: watch::Sender<String>,
    job: Mutex<Option<Job>>,
}

impl OpenFile {
    fn notify(&self, token: String) {
        self.token.send_if_modified(|t| {
            let changed = *t != token;
            *t = token;
            changed
        });
    }

    fn job_view(&self) -> Option<JobView> {
        self.job.lock().expect("job lock").as_ref().map(|j| {
            let (status, message) = match &j.status {
                JobStatus::Running => ("running", None),
                JobStatus::Done { .. } => ("done", None),
                JobStatus::Failed { message } => ("failed", Some(message.clone())),
                JobStatus::Discarded => ("discarded", None),
            };
            JobView { job_id: j.id, status: status.into(), message }
        })
    }
}

/// Files served from one directory.
pub struct Workspace {
    dir: PathBuf,
    config: Config,
    files: Mutex<HashMap<String, Arc<OpenFile>>>,
    next_job: AtomicU64,
}

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("`{0}` is not a file name")]
    BadName(String),
    #[error("unknown synthesis job {0}")]
    UnknownJob(u64),
    #[error("malformed action: {0}")]
    BadAction(String),
    #[error(transparent)]
    Session(#[from] SessionError),
}

impl ApiError {
    fn kind(&self) -> (&'static str, StatusCode) {
        match self {
            ApiError::BadName(_) => ("badName", StatusCode::BAD_REQUEST),
            ApiError::UnknownJob(_) => ("unknownJob", StatusCode::NOT_FOUND),
            ApiError::BadAction(_) => ("badAction", StatusCode::BAD_REQUEST),
            ApiError::Session(SessionError::FileVanished(_)) => ("fileVanished", StatusCode::NOT_FOUND),
            ApiError::Session(SessionError::Io(_)) => ("io", StatusCode::INTERNAL_SERVER_ERROR),
            ApiError::Session(SessionError::Action(a)) => match a {
                ActionError::Parse(_) => ("parseError", StatusCode::UNPROCESSABLE_ENTITY),
                ActionError::UnknownNode(_) => ("unknownNode", StatusCode::NOT_FOUND),
                ActionError::StaleNode(_) => ("staleNode", StatusCode::CONFLICT),
                ActionError::NothingToUndo | ActionError::NothingToRedo => ("noHistory", StatusCode::CONFLICT),
                _ => ("notApplicable", StatusCode::UNPROCESSABLE_ENTITY),
            },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (kind, status) = self.kind();
        (status, Json(serde_json::json!({ "error": kind, "message": self.to_string() }))).into_response()
    }
}

impl Workspace {
    pub fn new(dir: impl Into<PathBuf>, config: Config) -> Arc<Workspace> {
        Arc::new(Workspace { dir: dir.into(), config, files: Mutex::new(HashMap::new()), next_job: AtomicU64::new(1) })
    }

    pub fn file(&self, name: &str) -> Result<Arc<OpenFile>, ApiError> {
        if name.is_empty() || name.starts_with('.') || name.contains(['/', '\\']) {
            return Err(ApiError::BadName(name.to_string()));
        }
        let mut files = self.files.lock().expect("files lock");
        if let Some(f) = files.get(name) {
            return Ok(f.clone());
        }
        let session = Session::open(self.dir.join(name), self.config.clone())?;
        let (token, _) = watch::channel(session.token());
        let f = Arc::new(OpenFile { session: Mutex::new(session), token, job: Mutex::new(None) });
        files.insert(name.to_string(), f.clone());
        Ok(f)
    }

    pub fn document(&self, name: &str) -> Result<DocumentModel, ApiError> {
        let f = self.file(name)?;
        let mut d = f.session.lock().expect("session lock").document();
        d.synth_job = f.job_view();
        Ok(d)
    }

    pub fn handle(&self, name: &str, action: &Action, seen_token: Option<&str>) -> Result<ActionReply, ApiError> {
        let f = self.file(name)?;
        let out = f.session.lock().expect("session lock").handle(action, seen_token)?;
        f.notify(out.token.clone());
        Ok(ActionReply { token: out.token, text: out.text, job_id: None })
    }

    /// Re-read every open file. Files that vanished are dropped.
    pub fn refresh_all(&self) {
        let files: Vec<(String, Arc<OpenFile>)> =
            self.files.lock().expect("files lock").iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        for (name, f) in files {
            let mut s = f.session.lock().expect("session lock");
            match s.refresh() {
                Ok(true) => f.notify(s.token()),
                Ok(false) => {}
                Err(_) => {
                    drop(s);
                    self.files.lock().expect("files lock").remove(&name);
                    f.notify("vanished".into());
                }
            }
        }
    }

    /// Start a synthesis job for `name`, or return the one already running.
    pub fn start_synth(self: &Arc<Self>, name: &str) -> Result<u64, ApiError> {
        let f = self.file(name)?;
        let mut job = f.job.lock().expect("job lock");
        if let Some(j) = job.as_ref().filter(|j| j.status == JobStatus::Running) {
            return Ok(j.id);
        }
        let id = self.next_job.fetch_add(1, Ordering::Relaxed);
        let cancel = Arc::new(AtomicBool::new(false));
        *job = Some(Job { id, status: JobStatus::Running, cancel: cancel.clone() });
        drop(job);
        let snapshot = f.session.lock().expect("session lock").text().to_string();
        let config = self.config.clone();
        let file = f.clone();
        std::thread::spawn(move || {
            let status = run_job(&file, &config, &snapshot, cancel);
            if let Some(j) = file.job.lock().expect("job lock").as_mut().filter(|j| j.id == id) {
                j.status = status;
            }
            let token = file.session.lock().expect("session lock").token();
            file.notify(token);
        });
        Ok(id)
    }

    pub fn job(&self, name: &str, id: u64) -> Result<JobStatus, ApiError> {
        let f = self.file(name)?;
        let job = f.job.lock().expect("job lock");
        job.as_ref().filter(|j| j.id == id).map(|j| j.status.clone()).ok_or(ApiError::UnknownJob(id))
    }

    /// Cancel the running job of `name`, if any.
    pub fn cancel_synth(&self, name: &str) -> Result<(), ApiError> {
        if let Some(j) = self.file(name)?.job.lock().expect("job lock").as_ref() {
            j.cancel.store(true, Ordering::Relaxed);
        }
        Ok(())
    }

    pub fn complete(&self, name: &str, node: Option<u32>, prefix: &str) -> Result<Vec<Suggestion>, ApiError> {
        let f = self.file(name)?;
        let (text, focus) = {
            let s = f.session.lock().expect("session lock");
            (s.text().to_string(), s.focus().clone())
        };
        Ok(autocomplete(&text, node.map(NodeId), prefix, &focus, self.config.fuel))
    }
}

fn run_job(file: &OpenFile, config: &Config, snapshot: &str, cancel: Arc<AtomicBool>) -> JobStatus {
    let p = match parse(snapshot) {
        Ok(p) => p,
        Err(e) => return JobStatus::Failed { message: format!("parse error at {e}") },
    };
    let s = match config.synthesize(&p, Some(cancel)) {
        Ok(s) => s,
        Err(e) => return JobStatus::Failed { message: e.to_string() },
    };
    let mut session = file.session.lock().expect("session lock");
    if session.text() != snapshot {
        return JobStatus::Discarded;
    }
    match session.commit(&s.program) {
        Ok(out) => {
            file.notify(out.token);
            JobStatus::Done { probability: s.probability, fills: s.fills.iter().map(|f| f.0).collect() }
        }
        Err(e) => JobStatus::Failed { message: e.to_string() },
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct ActionReply {
    pub token: String,
    pub text: String,
    pub job_id: Option<u64>,
}

#[derive(Deserialize)]
struct TokenQuery {
    token: Option<String>,
}

#[derive(Deserialize)]
struct CompleteQuery {
    node: Option<u32>,
    #[serde(default)]
    prefix: String,
}

type Ws = State<Arc<Workspace>>;

pub fn router(ws: Arc<Workspace>) -> Router {
    Router::new()
        .route("/{file}", get(shell))
        .route("/api/{file}/doc", get(doc))
        .route("/api/{file}/poll", get(poll))
        .route("/api/{file}/action", post(action))
        .route("/api/{file}/synth", post(synth))
        .route("/api/{file}/synth/{job}", get(job))
        .route("/api/{file}/autocomplete", get(complete))
        .with_state(ws)
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    tokio::task::spawn_blocking(f).await.expect("worker panicked")
}

async fn shell(State(ws): Ws, Path(file): Path<String>) -> Result<Html<String>, ApiError> {
    ws.file(&file)?;
    Ok(Html(SHELL.replace("{{FILE}}", &file)))
}

async fn doc(State(ws): Ws, Path(file): Path<String>) -> Result<Json<DocumentModel>, ApiError> {
    Ok(Json(blocking(move || ws.document(&file)).await?))
}

async fn poll(State(ws): Ws, Path(file): Path<String>, Query(q): Query<TokenQuery>) -> Result<Json<serde_json::Value>, ApiError> {
    let mut rx = ws.file(&file)?.token.subscribe();
    let seen = q.token.unwrap_or_default();
    // On timeout the unchanged token is returned.
    let _ = tokio::time::timeout(POLL_TIMEOUT, rx.wait_for(|t| *t != seen)).await;
    let token = rx.borrow().clone();
    Ok(Json(serde_json::json!({ "token": token })))
}

async fn action(State(ws): Ws, Path(file): Path<String>, Query(q): Query<TokenQuery>, body: String) -> Result<Json<ActionReply>, ApiError> {
    let a: Action = serde_json::from_str(&body).map_err(|e| ApiError::BadAction(e.to_string()))?;
    if matches!(a, Action::Synth) {
        let id = ws.start_synth(&file)?;
        let f = ws.file(&file)?;
        let s = f.session.lock().expect("session lock");
        return Ok(Json(ActionReply { token: s.token(), text: s.text().to_string(), job_id: Some(id) }));
    }
    Ok(Json(blocking(move || ws.handle(&file, &a, q.token.as_deref())).await?))
}

async fn synth(State(ws): Ws, Path(file): Path<String>) -> Result<Json<serde_json::Value>, ApiError> {
    let id = ws.start_synth(&file)?;
    Ok(Json(serde_json::json!({ "jobId": id })))
}

async fn job(State(ws): Ws, Path((file, id)): Path<(String, u64)>) -> Result<Json<JobStatus>, ApiError> {
    Ok(Json(ws.job(&file, id)?))
}

async fn complete(State(ws): Ws, Path(file): Path<String>, Query(q): Query<CompleteQuery>) -> Result<Json<Vec<Suggestion>>, ApiError> {
    Ok(Json(blocking(move || ws.complete(&file, q.node, &q.prefix)).await?))
}

/// Poll open files for outside edits until the process exits.
pub async fn watch_files(ws: Arc<Workspace>, period: Duration) {
    let mut tick = tokio::time::interval(period);
    loop {
        tick.tick().await;
        let w = ws.clone();
        blocking(move || w.refresh_all()).await;
    }
}

/// Page that loads the client bundle; without one it shows the raw model.
const SHELL: &str = r#"<!doctype html>
<html>
<head><meta charset="utf-8"><title>{{FILE}}</title></head>
<body>
<div id="canvas" data-file="{{FILE}}"></div>
<pre id="model"></pre>
<script>
const file = "{{FILE}}";
let token = "";
async function refresh() {
  const doc = await (await fetch(`/api/${file}/doc`)).json();
  token = doc.token;
  if (window.maniposRender) window.maniposRender(doc); else document.getElementById("model").textContent = JSON.stringify(doc, null, 2);
}
async function loop() {
  for (;;) {
    try {
      const r = await (await fetch(`/api/${file}/poll?token=${token}`)).json();
      if (r.token !== token) await refresh();
    } catch (e) { await new Promise(ok => setTimeout(ok, 1000)); }
  }
}
refresh().then(loop);
</script>
<script src="/static/client.js" onerror="void 0"></script>
</body>
</html>
"#;
