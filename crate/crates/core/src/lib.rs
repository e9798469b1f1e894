//! Finite-algebra categories and the internal-structure condition battery.
//!
//! Everything here is exact and deterministic: carriers are dense integer
//! ranges, operations are flat tables, homs are found by backtracking with
//! table propagation, and every search runs in a pinned element order so
//! that witnesses are reproducible.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod algebra;
pub mod category;
pub mod classes;
pub mod conditions;
pub mod structures;

pub use algebra::{Equation, FiniteAlgebra, Signature, Term};
pub use category::{FrozenCategory, Hom, ObjId, WorkingCategory};
pub use classes::SpanClass;
pub use conditions::{ConditionId, Outcome, Verdict, Witness};
