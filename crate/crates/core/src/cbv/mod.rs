//! The call-by-value case study: simple types assembled from optional
//! fragments, a concrete syntax, and elaboration into generic terms.

mod cursor;
pub mod generate;
pub mod laws;
pub mod ops;
pub mod surface;
pub mod typecheck;
pub mod types;

use thiserror::Error;

use crate::signature::SignatureError;

pub use laws::{check_meta_laws, check_term_laws, corpus_holes, holed_corpus, term_corpus, CorpusItem, HoledItem, TermCorpus};
pub use generate::{random_comp, random_program, random_subst, random_value, type_pool, GenParams, Generator};
pub use ops::{build_operator_table, menu_for, menu_row, CbvFamily, Construct, MenuRow, BASE_ROW};
pub use surface::{parse_program, pretty, pretty_named, Expr, ExprKind, RecDef};
pub use typecheck::{synthesize, typecheck, Scope};
pub use types::{
    enumerate_types, label_order, Extension, FragmentConfig, FragmentUniverse, Fulfillment, Need, Row, TypeExpr,
    TypeRejection,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CbvError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable `{name}` at byte {at}")]
    UnknownVariable { name: String, at: usize },
    #[error("sort mismatch at byte {at}: expected {expected}, found {found}")]
    SortMismatch { expected: String, found: String, at: usize },
    #[error("typing need {need} is not fulfilled at byte {at}")]
    NeedUnfulfilled { need: String, at: usize },
    #[error("construct at byte {at} needs the {extension} fragment")]
    DisabledConstruct { extension: Extension, at: usize },
    #[error("{construct} at byte {at} expects {expected}, found {found}")]
    ArityMismatch { construct: String, expected: String, found: String, at: usize },
    #[error("unknown base type `{name}` at byte {at}")]
    UnknownBaseType { name: String, at: usize },
    #[error("type {ty} at byte {at} is deeper than the limit {limit}")]
    DepthExceeded { ty: String, limit: usize, at: usize },
    #[error("cannot synthesize a type at byte {at}; add an annotation or use it in checking position")]
    CannotSynthesize { at: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("malformed term: {0}")]
    Malformed(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

impl CbvError {
    /// Byte offset in the source program, when the error has one.
    pub fn location(&self) -> Option<usize> {
        match self {
            CbvError::Syntax { position, .. } => Some(*position),
            CbvError::UnknownVariable { at, .. }
            | CbvError::SortMismatch { at, .. }
            | CbvError::NeedUnfulfilled { at, .. }
            | CbvError::DisabledConstruct { at, .. }
            | CbvError::ArityMismatch { at, .. }
            | CbvError::UnknownBaseType { at, .. }
            | CbvError::DepthExceeded { at, .. }
            | CbvError::CannotSynthesize { at } => Some(*at),
            _ => None,
        }
    }
}
