//! Finite strong-monad models of the call-by-value calculus.
//!
//! Types denote finite sets, contexts their products, and a term over a
//! context a map out of the points of that product. Substitution acts on
//! denotations by precomposition, so the substitution lemma and the
//! compatibility of every construct can be checked table by table.

pub mod checks;
pub mod denote;
pub mod domain;
pub mod monad;

use thiserror::Error;

use crate::cbv::Extension;

pub use checks::{
    check_action_axioms, check_compatibility, check_substitution_lemma, compatibility_constructs, subst_lemma_exhaustive,
    rename_denotation, subst_lemma_random, weaken, CompatBounds, LemmaCorpus, SemSubst, TableSpace,
};
pub use denote::{
    bindkeep, denote, elgot_iterate, kleene_fixpoint, semantic_map, Denotation, Mutation, Sem, SemAlgebra, SemCarrier,
    Step, Table,
};
pub use domain::{Model, Value, ENUMERATION_LIMIT};
pub use monad::{check_monad_laws, BindVariant, Capabilities, Comp, Monad};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemError {
    #[error("the {extension} fragment needs structure the {monad} monad does not provide")]
    UnsupportedCapability { extension: Extension, monad: Monad },
    #[error("literal {literal} is outside the naturals below {bound}")]
    LiteralOutOfRange { literal: u32, bound: u32 },
    #[error("roll overflows the naturals below {bound} and the {monad} monad cannot diverge")]
    RollOverflow { bound: u32, monad: Monad },
    #[error("fixed-point iteration did not settle within {bound} rounds")]
    NonConvergence { bound: usize },
    #[error("{what} is too large to enumerate")]
    TooLarge { what: String },
    #[error("invalid model: {0}")]
    Config(String),
    #[error("malformed denotation: {0}")]
    Malformed(String),
}
