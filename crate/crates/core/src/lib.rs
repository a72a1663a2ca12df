//! Kernel for a dependent type theory with Σ, Π (with η), intensional
//! identity types, a tower of Tarski universes, function extensionality,
//! univalence and optional propositional resizing.

pub mod builtins;
pub mod checker;
pub mod gen;
pub mod nbe;
pub mod oracle;
pub mod parser;
pub mod stdlib;
pub mod syntax;

pub use checker::{check_module, check_source, Flags, Report, Signature};
pub use syntax::{Axiom, Context, Term};
