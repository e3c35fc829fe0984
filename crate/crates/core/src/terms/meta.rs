use std::collections::BTreeMap;

use crate::signature::Env;
use crate::sorts::{Context, SortName};

use super::subst::substitute;
use super::{Holes, Term, TermError};

/// A metavariable substitution `Ξ1 → Ξ2`: for every hole of `from`, a term
/// over the hole's own context whose holes come from `to`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaSubst<S> {
    from: Holes<S>,
    to: Holes<S>,
    bodies: BTreeMap<String, Term<S>>,
}

impl<S: SortName> MetaSubst<S> {
    pub fn new(from: Holes<S>, to: Holes<S>, bodies: BTreeMap<String, Term<S>>) -> Result<Self, TermError> {
        for decl in from.iter() {
            let body = bodies.get(&decl.id).ok_or_else(|| TermError::UncoveredHole(decl.id.clone()))?;
            body.check(&decl.sort, &decl.ctx, &to)?;
        }
        if let Some(extra) = bodies.keys().find(|k| from.get(k).is_err()) {
            return Err(TermError::UnknownHole(extra.clone()));
        }
        Ok(MetaSubst { from, to, bodies })
    }

    /// Every hole sent to itself applied to the variables of its context.
    pub fn unit(holes: &Holes<S>) -> Self {
        let bodies = holes
            .iter()
            .map(|d| (d.id.clone(), Term::Meta(d.id.clone(), (0..d.ctx.len()).map(Term::Var).collect())))
            .collect();
        MetaSubst { from: holes.clone(), to: holes.clone(), bodies }
    }

    /// Kleisli composite: first `self`, then `next` inside every body.
    pub fn then(&self, next: &MetaSubst<S>) -> Result<MetaSubst<S>, TermError> {
        let mut bodies = BTreeMap::new();
        for decl in self.from.iter() {
            let body = meta_substitute(&self.bodies[&decl.id], &decl.ctx, next)?;
            bodies.insert(decl.id.clone(), body);
        }
        Ok(MetaSubst { from: self.from.clone(), to: next.to.clone(), bodies })
    }

    pub fn from_holes(&self) -> &Holes<S> {
        &self.from
    }

    pub fn to_holes(&self) -> &Holes<S> {
        &self.to
    }

    pub fn body(&self, id: &str) -> Result<&Term<S>, TermError> {
        self.bodies.get(id).ok_or_else(|| TermError::UnknownHole(id.to_string()))
    }
}

/// Instantiate every metavariable of `term` (over `ctx`) by its body,
/// substituting the node's environment into the body.
pub fn meta_substitute<S: SortName>(term: &Term<S>, ctx: &Context<S>, subst: &MetaSubst<S>) -> Result<Term<S>, TermError> {
    match term {
        Term::Var(x) => Ok(Term::Var(*x)),
        Term::Op(op, args) => {
            let args = op
                .args
                .iter()
                .zip(args)
                .map(|(a, t)| meta_substitute(t, &ctx.concat(&a.binder), subst))
                .collect::<Result<_, _>>()?;
            Ok(Term::Op(op.clone(), args))
        }
        Term::Meta(id, env) => {
            let decl = subst.from.get(id)?;
            let body = subst.body(id)?;
            let entries = env.iter().map(|e| meta_substitute(e, ctx, subst)).collect::<Result<Vec<_>, _>>()?;
            if entries.len() != decl.ctx.len() {
                return Err(TermError::IllSorted(format!("hole {id} environment length")));
            }
            substitute(body, &Env::new(decl.ctx.clone(), ctx.clone(), entries))
        }
    }
}
