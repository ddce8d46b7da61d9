//! Finite commutative integral residuated lattices and their fragments.
//!
//! The crate validates finite algebras given by tables, evaluates terms,
//! builds and decomposes ordinal sums, searches homomorphisms, computes
//! filters, quotients and free algebras of finitely generated varieties, and
//! decides projectivity questions for finite members of locally finite
//! varieties.

// builder and term methods are named after the operations they build
#![allow(clippy::should_implement_trait)]

pub mod algebra;
pub mod catalog;
pub mod congruences;
pub mod error;
pub mod freealg;
pub mod limits;
pub mod modelgen;
pub mod morphisms;
pub mod ordsum;
pub mod projectivity;
pub mod properties;
pub mod term;

pub use algebra::{Elem, FiniteAlgebra, Operation, RawAlgebra, Signature};
pub use error::{Error, Result};
pub use limits::Limits;
pub use term::{Equation, Quasiequation, Term};
