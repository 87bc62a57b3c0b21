//! Program transformations that let code be written in any order and
//! edited by dragging values: binding reordering, insertion of missing
//! bindings, and case-split normalization.

mod cases;
mod insert;
pub mod names;
mod reorder;
pub mod scope;

pub use cases::{destruct, extraction_expr, normalize_case_splits};
pub use insert::insert_missing_bindings;
pub use reorder::{order, reorder};

use crate::syntax::{NodeId, Program};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NonlinearError {
    #[error("`{name}` is bound more than once in the same {scope}")]
    DuplicateName { name: String, scope: String },
    #[error("`{0}` does not have a variant type")]
    NotAnAdt(String),
    #[error("no node with id {0}")]
    UnknownNode(NodeId),
}

/// The passes run after every edit: normalize case splits, reorder, then
/// bind whatever is still free.
pub fn pipeline(p: &Program) -> Result<Program, NonlinearError> {
    let p = normalize_case_splits(p);
    let p = reorder(&p)?;
    Ok(insert_missing_bindings(&p))
}
