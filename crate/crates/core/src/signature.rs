//! Binding signatures and the environment-routing strength.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::sorts::{Context, Renaming, Sort, SortName, SortUniverse};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("duplicate operator label `{0}`")]
    DuplicateLabel(String),
    #[error("operator `{label}` mentions sort `{sort}` outside the sorting system")]
    UnknownSort { label: String, sort: String },
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("operator `{label}` needs type depth {depth}, above the limit {limit}")]
    DepthExceeded { label: String, depth: usize, limit: usize },
    #[error("signature expression is not flattenable at `{0}`")]
    NotFlattenable(String),
}

/// One argument slot of an operator: the variables it binds and its sort.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Argument<S> {
    pub binder: Context<S>,
    pub sort: Sort<S>,
}

impl<S: SortName> Argument<S> {
    pub fn new(binder: Context<S>, sort: Sort<S>) -> Self {
        Argument { binder, sort }
    }

    pub fn plain(sort: Sort<S>) -> Self {
        Argument { binder: Context::empty(), sort }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Operator<S> {
    pub label: String,
    pub result: Sort<S>,
    pub args: Vec<Argument<S>>,
}

pub type OpRef<S> = Arc<Operator<S>>;

impl<S: SortName> Operator<S> {
    pub fn new(label: impl Into<String>, result: Sort<S>, args: Vec<Argument<S>>) -> Self {
        Operator { label: label.into(), result, args }
    }

    fn sorts(&self) -> impl Iterator<Item = Sort<S>> + '_ {
        std::iter::once(self.result.clone()).chain(self.args.iter().flat_map(|a| {
            a.binder
                .iter()
                .cloned()
                .map(Sort::First)
                .chain(std::iter::once(a.sort.clone()))
        }))
    }
}

impl<S: SortName> fmt::Display for Operator<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : ", self.label)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, " × ")?;
            }
            if a.binder.is_empty() {
                write!(f, "{}", a.sort)?;
            } else {
                write!(f, "{}.{}", a.binder, a.sort)?;
            }
        }
        if self.args.is_empty() {
            write!(f, "1")?;
        }
        write!(f, " → {}", self.result)
    }
}

/// An operator schema instantiated on demand from its label.
pub trait OperatorFamily<S>: Send + Sync {
    fn name(&self) -> &str;
    /// `Ok(None)` when the label is not one of this family's.
    fn instantiate(&self, label: &str) -> Result<Option<Operator<S>>, SignatureError>;
}

/// A binding signature: explicitly listed operators plus lazily instantiated
/// families.
#[derive(Clone)]
pub struct OperatorTable<S> {
    universe: Arc<dyn SortUniverse<S>>,
    ops: BTreeMap<String, OpRef<S>>,
    families: Vec<Arc<dyn OperatorFamily<S>>>,
}

impl<S: SortName> fmt::Debug for OperatorTable<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorTable")
            .field("ops", &self.ops.keys().collect::<Vec<_>>())
            .field("families", &self.families.iter().map(|x| x.name().to_string()).collect::<Vec<_>>())
            .finish()
    }
}

impl<S: SortName> OperatorTable<S> {
    pub fn new(universe: Arc<dyn SortUniverse<S>>) -> Self {
        OperatorTable { universe, ops: BTreeMap::new(), families: Vec::new() }
    }

    pub fn insert(&mut self, op: Operator<S>) -> Result<OpRef<S>, SignatureError> {
        if self.ops.contains_key(&op.label) {
            return Err(SignatureError::DuplicateLabel(op.label));
        }
        let bad = op.sorts().find(|s| !self.universe.contains(s)).map(|s| s.to_string());
        if let Some(sort) = bad {
            return Err(SignatureError::UnknownSort { label: op.label, sort });
        }
        let op = Arc::new(op);
        self.ops.insert(op.label.clone(), op.clone());
        Ok(op)
    }

    pub fn add_family(&mut self, family: Arc<dyn OperatorFamily<S>>) {
        self.families.push(family);
    }

    /// Coproduct of signatures: label-disjoint union.
    pub fn union(mut self, other: &OperatorTable<S>) -> Result<Self, SignatureError> {
        for op in other.ops.values() {
            self.insert((**op).clone())?;
        }
        self.families.extend(other.families.iter().cloned());
        Ok(self)
    }

    pub fn lookup(&self, label: &str) -> Result<OpRef<S>, SignatureError> {
        if let Some(op) = self.ops.get(label) {
            return Ok(op.clone());
        }
        for fam in &self.families {
            if let Some(op) = fam.instantiate(label)? {
                return Ok(Arc::new(op));
            }
        }
        Err(SignatureError::UnknownOperator(label.to_string()))
    }

    /// The explicitly listed operators, in label order.
    pub fn operators(&self) -> impl Iterator<Item = &OpRef<S>> {
        self.ops.values()
    }

    pub fn families(&self) -> impl Iterator<Item = &Arc<dyn OperatorFamily<S>>> {
        self.families.iter()
    }

    pub fn universe(&self) -> &Arc<dyn SortUniverse<S>> {
        &self.universe
    }
}

/// Which result sorts an `OnlyAt` summand lives at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SortSelector<S> {
    Single(Sort<S>),
    Many(Vec<Sort<S>>),
}

/// Combinator expressions for signature functors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SignatureExpr<S> {
    /// The recursion variable.
    Hole,
    /// Projection of the inner structure at a sort (`X @ s`).
    At(Sort<S>, Box<SignatureExpr<S>>),
    /// Scope shift by a binder context.
    Shift(Context<S>, Box<SignatureExpr<S>>),
    Product(Vec<SignatureExpr<S>>),
    Coproduct(Vec<(String, SignatureExpr<S>)>),
    OnlyAt(SortSelector<S>, Box<SignatureExpr<S>>),
    /// Restriction along a reindexing; carried only by name.
    Restrict(String, Box<SignatureExpr<S>>),
}

impl<S: SortName> SignatureExpr<S> {
    /// `X @ s`.
    pub fn var_at(sort: Sort<S>) -> Self {
        SignatureExpr::At(sort, Box::new(SignatureExpr::Hole))
    }

    /// `[Δ]⇑ X @ s`.
    pub fn bound_at(binder: Context<S>, sort: Sort<S>) -> Self {
        SignatureExpr::At(sort, Box::new(SignatureExpr::Shift(binder, Box::new(SignatureExpr::Hole))))
    }

    pub fn only_at(sort: Sort<S>, body: SignatureExpr<S>) -> Self {
        SignatureExpr::OnlyAt(SortSelector::Single(sort), Box::new(body))
    }
}

impl<S: SortName> fmt::Display for SignatureExpr<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignatureExpr::Hole => write!(f, "X"),
            SignatureExpr::At(s, inner) => write!(f, "({inner})@{s}"),
            SignatureExpr::Shift(d, inner) => write!(f, "{d}⇑{inner}"),
            SignatureExpr::Product(fs) => {
                write!(f, "(")?;
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " × ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            SignatureExpr::Coproduct(fs) => {
                write!(f, "(")?;
                for (i, (l, x)) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ⨿ ")?;
                    }
                    write!(f, "{l}: {x}")?;
                }
                write!(f, ")")
            }
            SignatureExpr::OnlyAt(SortSelector::Single(s), inner) => write!(f, "only@{s}({inner})"),
            SignatureExpr::OnlyAt(SortSelector::Many(ss), inner) => {
                write!(f, "only@{{")?;
                for (i, s) in ss.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{s}")?;
                }
                write!(f, "}}({inner})")
            }
            SignatureExpr::Restrict(name, inner) => write!(f, "restrict[{name}]({inner})"),
        }
    }
}

fn flatten_factor<S: SortName>(expr: &SignatureExpr<S>) -> Result<Argument<S>, SignatureError> {
    match expr {
        SignatureExpr::At(sort, inner) => match &**inner {
            SignatureExpr::Hole => Ok(Argument::plain(sort.clone())),
            SignatureExpr::Shift(binder, h) if **h == SignatureExpr::Hole => {
                Ok(Argument::new(binder.clone(), sort.clone()))
            }
            other => Err(SignatureError::NotFlattenable(other.to_string())),
        },
        other => Err(SignatureError::NotFlattenable(other.to_string())),
    }
}

fn flatten_summand<S: SortName>(
    label: &str,
    expr: &SignatureExpr<S>,
    out: &mut Vec<Operator<S>>,
) -> Result<(), SignatureError> {
    match expr {
        SignatureExpr::Coproduct(parts) => {
            for (l, e) in parts {
                flatten_summand(l, e, out)?;
            }
            Ok(())
        }
        SignatureExpr::OnlyAt(selector, body) => {
            let args = match &**body {
                SignatureExpr::Product(fs) => fs.iter().map(flatten_factor).collect::<Result<Vec<_>, _>>()?,
                single => vec![flatten_factor(single)?],
            };
            match selector {
                SortSelector::Single(s) => out.push(Operator::new(label, s.clone(), args)),
                SortSelector::Many(ss) => {
                    for s in ss {
                        out.push(Operator::new(format!("{label}/{s}"), s.clone(), args.clone()));
                    }
                }
            }
            Ok(())
        }
        other => Err(SignatureError::NotFlattenable(other.to_string())),
    }
}

/// Turn a coproduct of `OnlyAt`-wrapped products of shifted projections into
/// an operator table.
pub fn flatten<S: SortName>(
    expr: &SignatureExpr<S>,
    universe: Arc<dyn SortUniverse<S>>,
) -> Result<OperatorTable<S>, SignatureError> {
    let mut ops = Vec::new();
    match expr {
        SignatureExpr::Coproduct(_) => flatten_summand("", expr, &mut ops)?,
        other => return Err(SignatureError::NotFlattenable(other.to_string())),
    }
    let mut table = OperatorTable::new(universe);
    for op in ops {
        table.insert(op)?;
    }
    Ok(table)
}

/// A structure with a point: renaming action on elements and the
/// interpretation of variables.
pub trait PointedCarrier<S> {
    type Elem: Clone;
    /// Move an element of first-class sort `sort` over `renaming.target()`
    /// to one over `renaming.source()`.
    fn rename(&self, elem: &Self::Elem, sort: &S, renaming: &Renaming<S>) -> Self::Elem;
    /// The element standing for variable `position` of `ctx`.
    fn var(&self, ctx: &Context<S>, position: usize) -> Self::Elem;
}

/// An environment: for every position of `source`, an element over `target`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Env<E, S> {
    pub source: Context<S>,
    pub target: Context<S>,
    pub entries: Vec<E>,
}

impl<E, S: SortName> Env<E, S> {
    pub fn new(source: Context<S>, target: Context<S>, entries: Vec<E>) -> Self {
        assert_eq!(source.len(), entries.len(), "environment length must match its source context");
        Env { source, target, entries }
    }

    /// The environment of variables on `ctx`.
    pub fn variables<A: PointedCarrier<S, Elem = E>>(carrier: &A, ctx: &Context<S>) -> Self {
        let entries = (0..ctx.len()).map(|i| carrier.var(ctx, i)).collect();
        Env { source: ctx.clone(), target: ctx.clone(), entries }
    }
}

/// Push an environment under a binder `Δ`: weaken every entry along
/// `Γ ++ Δ → Γ` and append the variables of `Δ`.
pub fn route_env<S: SortName, A: PointedCarrier<S>>(
    carrier: &A,
    env: &Env<A::Elem, S>,
    binder: &Context<S>,
) -> Env<A::Elem, S> {
    if binder.is_empty() {
        return env.clone();
    }
    let weaken = Renaming::weakening(&env.target, binder);
    let extended = weaken.source().clone();
    let mut entries: Vec<A::Elem> = env
        .entries
        .iter()
        .zip(env.source.iter())
        .map(|(e, s)| carrier.rename(e, s, &weaken))
        .collect();
    let base = env.target.len();
    entries.extend((0..binder.len()).map(|j| carrier.var(&extended, base + j)));
    Env { source: env.source.concat(binder), target: extended, entries }
}

/// The environment handed to argument `arg_index` of `op`.
pub fn strength_route<S: SortName, A: PointedCarrier<S>>(
    op: &Operator<S>,
    arg_index: usize,
    carrier: &A,
    env: &Env<A::Elem, S>,
) -> Env<A::Elem, S> {
    route_env(carrier, env, &op.args[arg_index].binder)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sorts::SortingSystem;

    fn s(x: &str) -> String {
        x.to_string()
    }

    fn universe() -> Arc<dyn SortUniverse<String>> {
        Arc::new(SortingSystem::new(vec![s("b"), s("b->b")], vec![s("b"), s("b->b")]).unwrap())
    }

    #[test]
    fn abstraction_flattens_to_one_binding_argument() {
        let lam = SignatureExpr::only_at(
            Sort::First(s("b->b")),
            SignatureExpr::bound_at(Context::new(vec![s("b")]), Sort::Second(s("b"))),
        );
        let table = flatten(&SignatureExpr::Coproduct(vec![(s("lam"), lam)]), universe()).unwrap();
        let op = table.lookup("lam").unwrap();
        assert_eq!(op.result, Sort::First(s("b->b")));
        assert_eq!(op.args, vec![Argument::new(Context::new(vec![s("b")]), Sort::Second(s("b")))]);
    }

    #[test]
    fn value_inclusion_flattens() {
        let val = SignatureExpr::only_at(Sort::Second(s("b")), SignatureExpr::var_at(Sort::First(s("b"))));
        let table = flatten(&SignatureExpr::Coproduct(vec![(s("val"), val)]), universe()).unwrap();
        let op = table.lookup("val").unwrap();
        assert_eq!(op.args, vec![Argument::plain(Sort::First(s("b")))]);
    }

    #[test]
    fn restrict_under_product_is_rejected() {
        let bad = SignatureExpr::only_at(
            Sort::Second(s("b")),
            SignatureExpr::Product(vec![SignatureExpr::Restrict(s("f"), Box::new(SignatureExpr::Hole))]),
        );
        let err = flatten(&SignatureExpr::Coproduct(vec![(s("bad"), bad)]), universe()).unwrap_err();
        assert!(matches!(err, SignatureError::NotFlattenable(t) if t.contains("restrict")));
    }

    #[test]
    fn union_rejects_clashing_labels() {
        let val = SignatureExpr::only_at(Sort::Second(s("b")), SignatureExpr::var_at(Sort::First(s("b"))));
        let t = flatten(&SignatureExpr::Coproduct(vec![(s("val"), val)]), universe()).unwrap();
        assert!(matches!(t.clone().union(&t), Err(SignatureError::DuplicateLabel(_))));
    }
}
