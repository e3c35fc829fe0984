//! Scope-safe terms over a binding signature.
//!
//! A [`Term`] is a plain tree; its sort and context are supplied from the
//! outside and validated by [`Term::check`] or by the [`Scoped`] smart
//! constructors. Every traversal that crosses a binder extends the ambient
//! context on the right.

mod fold;
mod meta;
mod subst;
mod text;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::signature::{OpRef, SignatureError};
use crate::sorts::{Context, Sort, SortError, SortName};

pub use fold::{fold, Algebra, SubstAlgebra};
pub use meta::{meta_substitute, MetaSubst};
pub use subst::{rename, renaming_env, substitute, substitute_env, variable_env, SubstEnv, TermCarrier};
pub use text::{parse_term, TextError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("ill-sorted term: {0}")]
    IllSorted(String),
    #[error("unknown hole `{0}`")]
    UnknownHole(String),
    #[error("no algebra case for `{0}`")]
    MissingAlgebraCase(String),
    #[error("metavariable substitution does not cover hole `{0}`")]
    UncoveredHole(String),
    #[error(transparent)]
    Sort(#[from] SortError),
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

/// A metavariable declaration: an identifier with its sort and context.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HoleDecl<S> {
    pub id: String,
    pub sort: Sort<S>,
    pub ctx: Context<S>,
}

/// A set of hole declarations with unique identifiers.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Holes<S>(BTreeMap<String, HoleDecl<S>>);

impl<S: SortName> Holes<S> {
    pub fn new() -> Self {
        Holes(BTreeMap::new())
    }

    pub fn from_decls(decls: impl IntoIterator<Item = HoleDecl<S>>) -> Result<Self, TermError> {
        let mut holes = Holes::new();
        for d in decls {
            holes.declare(d)?;
        }
        Ok(holes)
    }

    pub fn declare(&mut self, decl: HoleDecl<S>) -> Result<(), TermError> {
        if self.0.contains_key(&decl.id) {
            return Err(TermError::IllSorted(format!("hole `{}` declared twice", decl.id)));
        }
        self.0.insert(decl.id.clone(), decl);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Result<&HoleDecl<S>, TermError> {
        self.0.get(id).ok_or_else(|| TermError::UnknownHole(id.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &HoleDecl<S>> {
        self.0.values()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term<S> {
    Var(usize),
    Op(OpRef<S>, Vec<Term<S>>),
    Meta(String, Vec<Term<S>>),
}

impl<S: SortName> Term<S> {
    /// Validate the term at `sort` over `ctx`, with metavariables from `holes`.
    pub fn check(&self, sort: &Sort<S>, ctx: &Context<S>, holes: &Holes<S>) -> Result<(), TermError> {
        match self {
            Term::Var(x) => {
                let found = ctx.sort_at(*x)?;
                match sort {
                    Sort::First(s) if s == found => Ok(()),
                    _ => Err(TermError::IllSorted(format!("variable #{x} has sort {found}, expected {sort}"))),
                }
            }
            Term::Op(op, args) => {
                if &op.result != sort {
                    return Err(TermError::IllSorted(format!(
                        "operator {} has result sort {}, expected {sort}",
                        op.label, op.result
                    )));
                }
                if op.args.len() != args.len() {
                    return Err(TermError::IllSorted(format!(
                        "operator {} expects {} arguments, got {}",
                        op.label,
                        op.args.len(),
                        args.len()
                    )));
                }
                for (a, t) in op.args.iter().zip(args) {
                    t.check(&a.sort, &ctx.concat(&a.binder), holes)?;
                }
                Ok(())
            }
            Term::Meta(id, env) => {
                let decl = holes.get(id)?;
                if &decl.sort != sort {
                    return Err(TermError::IllSorted(format!("hole {id} has sort {}, expected {sort}", decl.sort)));
                }
                if decl.ctx.len() != env.len() {
                    return Err(TermError::IllSorted(format!(
                        "hole {id} expects an environment of length {}",
                        decl.ctx.len()
                    )));
                }
                for (s, e) in decl.ctx.iter().zip(env) {
                    e.check(&Sort::First(s.clone()), ctx, holes)?;
                }
                Ok(())
            }
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Op(_, args) | Term::Meta(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Height of the tree; leaves have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Op(_, args) | Term::Meta(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn has_meta(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Meta(..) => true,
            Term::Op(_, args) => args.iter().any(Term::has_meta),
        }
    }
}

impl<S: SortName> fmt::Display for Term<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list<S: SortName>(f: &mut fmt::Formatter<'_>, ts: &[Term<S>]) -> fmt::Result {
            for (i, t) in ts.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{t}")?;
            }
            Ok(())
        }
        match self {
            Term::Var(x) => write!(f, "#{x}"),
            Term::Op(op, args) => {
                write!(f, "{}[", op.label)?;
                list(f, args)?;
                write!(f, "]")
            }
            Term::Meta(id, env) => {
                write!(f, "?{id}{{")?;
                list(f, env)?;
                write!(f, "}}")
            }
        }
    }
}

/// A term together with the sort and context it was checked at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scoped<S> {
    sort: Sort<S>,
    ctx: Context<S>,
    term: Term<S>,
}

impl<S: SortName> Scoped<S> {
    pub fn new(term: Term<S>, sort: Sort<S>, ctx: Context<S>, holes: &Holes<S>) -> Result<Self, TermError> {
        term.check(&sort, &ctx, holes)?;
        Ok(Scoped { sort, ctx, term })
    }

    pub fn var(ctx: &Context<S>, position: usize) -> Result<Self, TermError> {
        let s = ctx.sort_at(position)?.clone();
        Ok(Scoped { sort: Sort::First(s), ctx: ctx.clone(), term: Term::Var(position) })
    }

    pub fn op(op: OpRef<S>, ctx: &Context<S>, args: Vec<Scoped<S>>) -> Result<Self, TermError> {
        if op.args.len() != args.len() {
            return Err(TermError::IllSorted(format!("operator {} arity mismatch", op.label)));
        }
        for (a, t) in op.args.iter().zip(&args) {
            if t.sort != a.sort || t.ctx != ctx.concat(&a.binder) {
                return Err(TermError::IllSorted(format!(
                    "argument of {} at {} over {} does not fit {} over {}",
                    op.label,
                    t.sort,
                    t.ctx,
                    a.sort,
                    ctx.concat(&a.binder)
                )));
            }
        }
        let sort = op.result.clone();
        let term = Term::Op(op, args.into_iter().map(|a| a.term).collect());
        Ok(Scoped { sort, ctx: ctx.clone(), term })
    }

    pub fn meta(decl: &HoleDecl<S>, ctx: &Context<S>, env: Vec<Scoped<S>>) -> Result<Self, TermError> {
        if decl.ctx.len() != env.len() {
            return Err(TermError::IllSorted(format!("hole {} environment length", decl.id)));
        }
        for (s, e) in decl.ctx.iter().zip(&env) {
            if e.sort != Sort::First(s.clone()) || &e.ctx != ctx {
                return Err(TermError::IllSorted(format!("hole {} environment entry", decl.id)));
            }
        }
        let term = Term::Meta(decl.id.clone(), env.into_iter().map(|e| e.term).collect());
        Ok(Scoped { sort: decl.sort.clone(), ctx: ctx.clone(), term })
    }

    pub fn sort(&self) -> &Sort<S> {
        &self.sort
    }

    pub fn ctx(&self) -> &Context<S> {
        &self.ctx
    }

    pub fn term(&self) -> &Term<S> {
        &self.term
    }

    pub fn into_term(self) -> Term<S> {
        self.term
    }
}
