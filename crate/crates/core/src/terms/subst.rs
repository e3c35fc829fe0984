use crate::signature::{Env, PointedCarrier};
use crate::sorts::{Context, Renaming, SortName};

use super::fold::{fold, SubstAlgebra};
use super::{Term, TermError};

/// Simultaneous substitution: one first-class term over `target` per
/// position of `source`.
pub type SubstEnv<S> = Env<Term<S>, S>;

/// Terms as a pointed carrier: renaming acts structurally and variables are
/// themselves.
#[derive(Debug, Clone, Copy, Default)]
pub struct TermCarrier;

impl<S: SortName> PointedCarrier<S> for TermCarrier {
    type Elem = Term<S>;

    fn rename(&self, elem: &Term<S>, _sort: &S, renaming: &Renaming<S>) -> Term<S> {
        rename(elem, renaming)
    }

    fn var(&self, _ctx: &Context<S>, position: usize) -> Term<S> {
        Term::Var(position)
    }
}

/// Move a term over `ρ.target()` to one over `ρ.source()`.
pub fn rename<S: SortName>(term: &Term<S>, renaming: &Renaming<S>) -> Term<S> {
    match term {
        Term::Var(y) => Term::Var(renaming.apply(*y)),
        Term::Op(op, args) => Term::Op(
            op.clone(),
            op.args
                .iter()
                .zip(args)
                .map(|(a, t)| {
                    if a.binder.is_empty() {
                        rename(t, renaming)
                    } else {
                        rename(t, &renaming.extend(&a.binder))
                    }
                })
                .collect(),
        ),
        Term::Meta(id, env) => Term::Meta(id.clone(), env.iter().map(|e| rename(e, renaming)).collect()),
    }
}

/// The environment sending every variable of `ctx` to itself.
pub fn variable_env<S: SortName>(ctx: &Context<S>) -> SubstEnv<S> {
    Env::variables(&TermCarrier, ctx)
}

/// The substitution induced by a renaming: `y ↦ #ρ(y)`.
pub fn renaming_env<S: SortName>(renaming: &Renaming<S>) -> SubstEnv<S> {
    Env::new(
        renaming.target().clone(),
        renaming.source().clone(),
        renaming.map().iter().map(|&x| Term::Var(x)).collect(),
    )
}

/// Capture-avoiding simultaneous substitution, computed as the fold of the
/// term-reconstruction algebra.
pub fn substitute<S: SortName>(term: &Term<S>, env: &SubstEnv<S>) -> Result<Term<S>, TermError> {
    fold(term, &TermCarrier, env, &SubstAlgebra)
}

/// Componentwise substitution `σ1[σ2]` of one environment into another.
pub fn substitute_env<S: SortName>(first: &SubstEnv<S>, second: &SubstEnv<S>) -> Result<SubstEnv<S>, TermError> {
    if first.target != second.source {
        return Err(TermError::IllSorted(format!(
            "cannot compose substitutions over {} and {}",
            first.target, second.source
        )));
    }
    let entries = first.entries.iter().map(|t| substitute(t, second)).collect::<Result<_, _>>()?;
    Ok(Env::new(first.source.clone(), second.target.clone(), entries))
}
