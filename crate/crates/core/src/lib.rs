//! Scope-safe abstract syntax with binding.
//!
//! The crate derives terms, renaming, simultaneous and metavariable
//! substitution and generic folds from a sorting system and a binding
//! signature. It also carries an explicit finite-presheaf engine for the
//! substitution tensor and a call-by-value case study with finite
//! strong-monad semantics.

pub mod sorts;
pub mod signature;
pub mod terms;
pub mod report;
pub mod presheaf;
pub mod cbv;
pub mod semantics;
