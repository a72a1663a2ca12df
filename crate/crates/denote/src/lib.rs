//! Groupoid-model semantics for the kernel's Π, Σ, Id, U0 fragment.

pub mod denote;
pub mod elab;
pub mod error;
pub mod model;
pub mod value;

pub use denote::{Denotation, Extension, Telescope};
pub use error::DenoteError;
pub use model::{Model, STy};
pub use value::{Code, Mor, Val};
