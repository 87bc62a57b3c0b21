//! Concrete syntax: lexer, parser, canonical printer and content hashes.

pub mod ast;
mod lexer;
mod parser;
mod printer;

use sha2::{Digest, Sha256};

pub use ast::*;
pub use parser::{parse, parse_expr, parse_pat};
pub use printer::{
    is_multiline, print_binding_head, print_const, print_expr, print_pat, print_type_decl, print_type_expr,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no node with id {0}")]
pub struct UnknownNode(pub NodeId);

/// Canonical text of a program.
pub fn print(p: &Program) -> String {
    printer::print_program(p)
}

/// Set the canvas position of a binding or assertion.
pub fn set_pos(p: &mut Program, id: NodeId, x: i64, y: i64) -> Result<(), UnknownNode> {
    for item in &mut p.items {
        if let Item::Assert(a) = item {
            if a.id == id {
                a.attrs.pos = Some((x, y));
                return Ok(());
            }
        }
    }
    let b = p.find_binding_mut(id).ok_or(UnknownNode(id))?;
    b.attrs.pos = Some((x, y));
    Ok(())
}

/// 16 hex digits identifying an expression up to attributes and node ids.
pub fn not_hash(e: &Expr) -> String {
    let text = print_expr(&e.without_attrs());
    let digest = Sha256::digest(text.as_bytes());
    hex::encode(&digest[..8])
}
