//! Finite groupoids as a π-tribe.

pub mod eq;
pub mod corpus;
pub mod error;
pub mod exchange;
pub mod fibration;
pub mod functor;
pub mod groupoid;
pub mod invariants;
pub mod hom;
pub mod omega;
pub mod pi;
pub mod suite;

pub use error::TribeError;
pub use functor::{GFunctor, NatIso};
pub use groupoid::{FinGroupoid, G};
