//! Joint distributions for sequences of noncommuting quantum measurements,
//! built from the collapse product `X ∘ Y = sqrt(X) Y sqrt(X)`.
//!
//! Start with [`measurement::Observable`] and [`collapse::collapse_effect_tree`];
//! the `examples/` directory walks through each part of the crate.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod cli;
pub mod collapse;
pub mod equivalence;
pub mod error;
pub mod incompatibility;
pub mod instruments;
pub mod measurement;
pub mod operator;
pub mod random;
pub mod table;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
