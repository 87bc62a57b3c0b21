//! Live-programming server for mini-ML files.
//!
//! Each file in a served directory is shown as a canvas document. Actions
//! posted by the client edit the file on disk; outside edits are picked up
//! by polling.

pub mod action;
pub mod complete;
pub mod history;
pub mod http;
pub mod render;
pub mod session;

pub use action::{Action, ActionError};
pub use http::{router, watch_files, Workspace};
pub use session::{Config, Session, SessionError};
