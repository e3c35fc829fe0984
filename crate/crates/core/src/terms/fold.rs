use crate::signature::{route_env, Env, OpRef, PointedCarrier};
use crate::sorts::{Context, SortName};

use super::{Term, TermError};

/// The three clauses of a fold out of the syntax.
///
/// `op` receives one folded value per argument, each computed over the
/// ambient context extended by that argument's binder.
pub trait Algebra<S: SortName, A: PointedCarrier<S>> {
    type Out;
    type Error: From<TermError>;

    fn var(&self, elem: &A::Elem, sort: &S) -> Result<Self::Out, Self::Error>;
    fn op(&self, op: &OpRef<S>, ctx: &Context<S>, args: Vec<Self::Out>) -> Result<Self::Out, Self::Error>;
    fn hole(&self, hole: &str, ctx: &Context<S>, env: Vec<Self::Out>) -> Result<Self::Out, Self::Error>;
}

/// Fold `term` (over `env.source`) into the algebra, starting from an
/// environment of carrier elements over `env.target`.
pub fn fold<S, A, G>(term: &Term<S>, carrier: &A, env: &Env<A::Elem, S>, alg: &G) -> Result<G::Out, G::Error>
where
    S: SortName,
    A: PointedCarrier<S>,
    G: Algebra<S, A>,
{
    match term {
        Term::Var(x) => {
            let elem = env.entries.get(*x).ok_or_else(|| {
                TermError::IllSorted(format!("variable #{x} outside an environment of length {}", env.entries.len()))
            })?;
            alg.var(elem, &env.source.entries()[*x])
        }
        Term::Op(op, args) => {
            let mut folded = Vec::with_capacity(args.len());
            for (a, t) in op.args.iter().zip(args) {
                let routed;
                let inner = if a.binder.is_empty() {
                    env
                } else {
                    routed = route_env(carrier, env, &a.binder);
                    &routed
                };
                folded.push(fold(t, carrier, inner, alg)?);
            }
            alg.op(op, &env.target, folded)
        }
        Term::Meta(id, entries) => {
            let folded = entries.iter().map(|e| fold(e, carrier, env, alg)).collect::<Result<Vec<_>, _>>()?;
            alg.hole(id, &env.target, folded)
        }
    }
}

/// Rebuilds the tree: folding with it over an environment of terms is
/// substitution.
#[derive(Debug, Clone, Copy, Default)]
pub struct SubstAlgebra;

impl<S: SortName, A: PointedCarrier<S, Elem = Term<S>>> Algebra<S, A> for SubstAlgebra {
    type Out = Term<S>;
    type Error = TermError;

    fn var(&self, elem: &Term<S>, _sort: &S) -> Result<Term<S>, TermError> {
        Ok(elem.clone())
    }

    fn op(&self, op: &OpRef<S>, _ctx: &Context<S>, args: Vec<Term<S>>) -> Result<Term<S>, TermError> {
        Ok(Term::Op(op.clone(), args))
    }

    fn hole(&self, hole: &str, _ctx: &Context<S>, env: Vec<Term<S>>) -> Result<Term<S>, TermError> {
        Ok(Term::Meta(hole.to_string(), env))
    }
}
