//! Core of a live-programming environment for a small ML: syntax, a tracing
//! interpreter with hole semantics, binding-order passes and an
//! example-driven synthesizer.

pub mod syntax;
pub mod types;
pub mod interp;
pub mod nonlinear;
pub mod synth;
