//! Relational pattern languages over the equality, reversal, and
//! equal-length relations: membership deciders with verified witnesses,
//! equal-length normal forms, characteristic-sample generation,
//! theorem-backed equivalence and inclusion deciders, the reversal
//! anti-telltale construction, and brute-force slice oracles that
//! independently cross-check every decision at desk scale.

pub mod charset;
pub mod classify;
pub mod error;
pub mod groups;
pub mod member;
pub mod nf;
pub mod oracle;
pub mod pattern;
pub mod reversal;
mod rng;
pub mod solver;
pub mod subst;

pub use error::{Error, Result};
pub use pattern::{Alphabet, Pattern, PatternItem, Relation, RelationKind, RelationalPattern, Var, Word};
