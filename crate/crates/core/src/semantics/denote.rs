//! Denotations of terms, computed by folding the syntax into semantic
//! maps out of the points of a context.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::cbv::{Construct, Extension, TypeExpr};
use crate::signature::{Env, OpRef, PointedCarrier};
use crate::sorts::{Context, Renaming, Sort};
use crate::terms::{fold, Algebra, Term, TermError};

use super::domain::{Model, Value};
use super::monad::Comp;
use super::SemError;

/// A semantic map producing a value at every point of its context.
pub type ValueFn = Arc<dyn Fn(&[Value]) -> Result<Value, SemError> + Send + Sync>;
/// A semantic map producing a computation at every point of its context.
pub type CompFn = Arc<dyn Fn(&[Value]) -> Result<Comp, SemError> + Send + Sync>;

/// The carrier of the semantic algebra: maps `⟦Γ⟧ → ⟦τ⟧` or `⟦Γ⟧ → T⟦τ⟧`.
#[derive(Clone)]
pub enum Sem {
    Value(ValueFn),
    Comp(CompFn),
}

impl fmt::Debug for Sem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sem::Value(_) => write!(f, "Sem::Value(..)"),
            Sem::Comp(_) => write!(f, "Sem::Comp(..)"),
        }
    }
}

impl Sem {
    fn value(&self) -> Result<ValueFn, SemError> {
        match self {
            Sem::Value(f) => Ok(f.clone()),
            Sem::Comp(_) => Err(SemError::Malformed("expected a value denotation".into())),
        }
    }

    fn comp(&self) -> Result<CompFn, SemError> {
        match self {
            Sem::Comp(f) => Ok(f.clone()),
            Sem::Value(_) => Err(SemError::Malformed("expected a computation denotation".into())),
        }
    }

    /// Precompose with a map of points.
    pub fn reindex(&self, along: Arc<dyn Fn(&[Value]) -> Result<Vec<Value>, SemError> + Send + Sync>) -> Sem {
        match self {
            Sem::Value(f) => {
                let f = f.clone();
                Sem::Value(Arc::new(move |p| f(&along(p)?)))
            }
            Sem::Comp(f) => {
                let f = f.clone();
                Sem::Comp(Arc::new(move |p| f(&along(p)?)))
            }
        }
    }
}

/// Renaming acts by precomposition; variables are projections.
#[derive(Debug, Clone, Copy, Default)]
pub struct SemCarrier;

impl PointedCarrier<TypeExpr> for SemCarrier {
    type Elem = ValueFn;

    fn rename(&self, elem: &ValueFn, _sort: &TypeExpr, renaming: &Renaming<TypeExpr>) -> ValueFn {
        let map = renaming.map().to_vec();
        let elem = elem.clone();
        Arc::new(move |p| elem(&map.iter().map(|&x| p[x].clone()).collect::<Vec<_>>()))
    }

    fn var(&self, _ctx: &Context<TypeExpr>, position: usize) -> ValueFn {
        Arc::new(move |p| Ok(p[position].clone()))
    }
}

/// A deliberately wrong algebra clause: the construct reads its context
/// with the first two variables of equal type exchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mutation {
    pub rule: &'static str,
}

impl Mutation {
    /// The clause corrupted for a fragment (`None` is the base fragment).
    pub fn for_fragment(fragment: Option<Extension>) -> Self {
        let rule = match fragment {
            None => "value",
            Some(Extension::Sequential) => "sequencing",
            Some(Extension::Functions) => "application",
            Some(Extension::Records) => "record pattern match",
            Some(Extension::Variants) => "variant pattern match",
            Some(Extension::Naturals) => "roll",
            Some(Extension::While) => "unbounded iteration",
            Some(Extension::Recursion) => "recursion",
        };
        Mutation { rule }
    }
}

/// The interpretation of every construct in a model.
#[derive(Clone)]
pub struct SemAlgebra {
    pub model: Arc<Model>,
    pub mutation: Option<Mutation>,
}

impl SemAlgebra {
    pub fn new(model: Arc<Model>) -> Self {
        SemAlgebra { model, mutation: None }
    }

    pub fn mutated(model: Arc<Model>, mutation: Mutation) -> Self {
        SemAlgebra { model, mutation: Some(mutation) }
    }

    /// The denotation of `construct` applied to argument denotations, over
    /// `ctx`. Argument `i` is a map out of `ctx` extended by its binder.
    pub fn clause(&self, construct: &Construct, ctx: &Context<TypeExpr>, args: &[Sem]) -> Result<Sem, SemError> {
        let sem = self.sound_clause(construct, args)?;
        match &self.mutation {
            Some(m) if m.rule == construct.rule() => match swappable(ctx) {
                Some((i, j)) => Ok(sem.reindex(Arc::new(move |p| {
                    let mut q = p.to_vec();
                    q.swap(i, j);
                    Ok(q)
                }))),
                None => Ok(sem),
            },
            _ => Ok(sem),
        }
    }

    fn sound_clause(&self, construct: &Construct, args: &[Sem]) -> Result<Sem, SemError> {
        use Construct::*;
        let m = self.model.clone();
        let monad = m.monad;
        let comps = || args.iter().map(Sem::comp).collect::<Result<Vec<_>, _>>();
        Ok(match construct {
            Val(_) => {
                let v = args[0].value()?;
                Sem::Comp(Arc::new(move |p| Ok(monad.unit(v(p)?))))
            }
            Let(..) => {
                let steps = comps()?;
                Sem::Comp(Arc::new(move |p| sequence(&m, &steps, p.to_vec())))
            }
            Lam(a, _) => {
                let body = args[0].comp()?;
                let a = a.clone();
                let dom = m.enumerable(&a.to_string(), m.size(&a)?)?;
                Sem::Value(Arc::new(move |p| {
                    let mut point = p.to_vec();
                    point.push(Value::unit());
                    let table = (0..dom as u128)
                        .map(|i| {
                            *point.last_mut().expect("pushed") = m.unrank(&a, i);
                            body(&point)
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(Value::Fun(table.into()))
                }))
            }
            App(a, _) => {
                let (fun, arg) = (args[0].comp()?, args[1].comp()?);
                let a = a.clone();
                Sem::Comp(Arc::new(move |p| {
                    monad.bind(&fun(p)?, &mut |f| monad.bind(&arg(p)?, &mut |x| apply(&m, f, &a, x)))
                }))
            }
            ValueRecord(_) => {
                let fields = args.iter().map(Sem::value).collect::<Result<Vec<_>, _>>()?;
                Sem::Value(Arc::new(move |p| Ok(Value::Record(fields.iter().map(|f| f(p)).collect::<Result<_, _>>()?))))
            }
            CompRecord(_) => {
                let fields = comps()?;
                Sem::Comp(Arc::new(move |p| collect_fields(&m, &fields, p, Vec::new())))
            }
            RecordMatch(..) => {
                let (scrutinee, body) = (args[0].comp()?, args[1].comp()?);
                Sem::Comp(Arc::new(move |p| {
                    monad.bind(&scrutinee(p)?, &mut |r| {
                        let Value::Record(fields) = r else { return Err(malformed("record", r)) };
                        body(&[p, fields.as_slice()].concat())
                    })
                }))
            }
            ValueTag(row, label) => {
                let k = tag_position(row, label)?;
                let payload = args[0].value()?;
                Sem::Value(Arc::new(move |p| Ok(Value::Variant(k, Box::new(payload(p)?)))))
            }
            CompTag(row, label) => {
                let k = tag_position(row, label)?;
                let payload = args[0].comp()?;
                Sem::Comp(Arc::new(move |p| monad.map(&payload(p)?, |v| Value::Variant(k, Box::new(v.clone())))))
            }
            VariantMatch(..) => {
                let all = comps()?;
                let (scrutinee, clauses) = (all[0].clone(), all[1..].to_vec());
                Sem::Comp(Arc::new(move |p| {
                    monad.bind(&scrutinee(p)?, &mut |v| {
                        let Value::Variant(k, x) = v else { return Err(malformed("variant", v)) };
                        let clause = clauses.get(*k as usize).ok_or_else(|| malformed("variant", v))?;
                        clause(&extend(p, [(**x).clone()]))
                    })
                }))
            }
            Lit(n) => {
                let (n, bound) = (*n, m.nat_bound);
                Sem::Value(Arc::new(move |_| {
                    if n < bound {
                        Ok(Value::Nat(n))
                    } else {
                        Err(SemError::LiteralOutOfRange { literal: n, bound })
                    }
                }))
            }
            Unroll => {
                let arg = args[0].comp()?;
                Sem::Comp(Arc::new(move |p| monad.bind(&arg(p)?, &mut |v| Ok(monad.unit(predecessor(v)?)))))
            }
            Roll => {
                let arg = args[0].comp()?;
                let bound = m.nat_bound;
                Sem::Comp(Arc::new(move |p| {
                    monad.bind(&arg(p)?, &mut |v| match v {
                        Value::Variant(0, _) => Ok(monad.unit(Value::Nat(0))),
                        Value::Variant(1, n) => match **n {
                            Value::Nat(k) if k + 1 < bound => Ok(monad.unit(Value::Nat(k + 1))),
                            Value::Nat(_) => monad.divergence().ok_or(SemError::RollOverflow { bound, monad }),
                            _ => Err(malformed("natural", n)),
                        },
                        other => Err(malformed("optional natural", other)),
                    })
                }))
            }
            Fold(_) => {
                let (scrutinee, body) = (args[0].comp()?, args[1].comp()?);
                Sem::Comp(Arc::new(move |p| {
                    monad.bind(&scrutinee(p)?, &mut |n| {
                        let Value::Nat(n) = n else { return Err(malformed("natural", n)) };
                        let mut acc = body(&extend(p, [Value::Variant(0, Box::new(Value::unit()))]))?;
                        for _ in 0..*n {
                            acc = monad.bind(&acc, &mut |v| body(&extend(p, [Value::Variant(1, Box::new(v.clone()))])))?;
                        }
                        Ok(acc)
                    })
                }))
            }
            For(..) => {
                if !m.capabilities().elgot {
                    return Err(SemError::UnsupportedCapability { extension: Extension::While, monad });
                }
                let (init, body) = (args[0].comp()?, args[1].comp()?);
                Sem::Comp(Arc::new(move |p| {
                    monad.bind(&init(p)?, &mut |s0| {
                        let out = elgot_iterate(
                            |s: &Value| match body(&extend(p, [s.clone()]))? {
                                Comp::Maybe(None) => Ok(None),
                                Comp::Maybe(Some(Value::Variant(0, next))) => Ok(Some(Step::Continue(*next))),
                                Comp::Maybe(Some(Value::Variant(1, done))) => Ok(Some(Step::Done(*done))),
                                other => Err(SemError::Malformed(format!("loop step {other:?}"))),
                            },
                            s0.clone(),
                        )?;
                        Ok(Comp::Maybe(out))
                    })
                }))
            }
            LetRec(fs, _) => {
                if !m.capabilities().fixpoints {
                    return Err(SemError::UnsupportedCapability { extension: Extension::Recursion, monad });
                }
                let all = comps()?;
                let (defs, body) = (all[..fs.len()].to_vec(), all[fs.len()].clone());
                let domains = fs
                    .iter()
                    .map(|f| match f {
                        TypeExpr::Fun(a, _) => Ok((**a).clone()),
                        other => Err(SemError::Malformed(format!("recursive binding of type {other}"))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let sizes = domains
                    .iter()
                    .map(|a| m.enumerable(&a.to_string(), m.size(a)?))
                    .collect::<Result<Vec<_>, _>>()?;
                Sem::Comp(Arc::new(move |p| {
                    let fixed = recursive_functions(&m, &defs, &domains, &sizes, p)?;
                    body(&extend(p, fixed))
                }))
            }
            Call(row, _) => {
                let all = comps()?;
                let (fun, fields) = (all[0].clone(), all[1..].to_vec());
                let domain = TypeExpr::Record(row.clone());
                Sem::Comp(Arc::new(move |p| {
                    monad.bind(&fun(p)?, &mut |f| {
                        let record = collect_fields(&m, &fields, p, Vec::new())?;
                        monad.bind(&record, &mut |r| apply(&m, f, &domain, r))
                    })
                }))
            }
        })
    }
}

fn swappable(ctx: &Context<TypeExpr>) -> Option<(usize, usize)> {
    let entries = ctx.entries();
    (0..entries.len()).find_map(|j| (0..j).find(|&i| entries[i] == entries[j]).map(|i| (i, j)))
}

fn malformed(expected: &str, v: &Value) -> SemError {
    SemError::Malformed(format!("expected a {expected}, found {v:?}"))
}

fn extend(p: &[Value], extra: impl IntoIterator<Item = Value>) -> Vec<Value> {
    let mut out = p.to_vec();
    out.extend(extra);
    out
}

fn tag_position(row: &crate::cbv::Row, label: &str) -> Result<u32, SemError> {
    row.position(label).map(|k| k as u32).ok_or_else(|| SemError::Malformed(format!("no constructor `{label}`")))
}

/// `unroll`: zero goes to the left summand, a successor to its predecessor.
fn predecessor(v: &Value) -> Result<Value, SemError> {
    match v {
        Value::Nat(0) => Ok(Value::Variant(0, Box::new(Value::unit()))),
        Value::Nat(n) => Ok(Value::Variant(1, Box::new(Value::Nat(n - 1)))),
        other => Err(malformed("natural", other)),
    }
}

/// Apply a Kleisli map to an argument of type `domain`.
fn apply(m: &Model, f: &Value, domain: &TypeExpr, x: &Value) -> Result<Comp, SemError> {
    let Value::Fun(table) = f else { return Err(malformed("function", f)) };
    let i = m.rank(domain, x)? as usize;
    table.get(i).cloned().ok_or_else(|| malformed("argument in the domain", x))
}

/// The sequencing composite: run each step with the results so far kept in
/// scope, then the last one.
fn sequence(m: &Model, steps: &[CompFn], point: Vec<Value>) -> Result<Comp, SemError> {
    match steps {
        [last] => last(&point),
        [first, rest @ ..] => bindkeep(m, first, &point, &mut |extended| sequence(m, rest, extended.to_vec())),
        [] => Err(SemError::Malformed("empty sequence".into())),
    }
}

/// Run `first` at `p`, then `rest` at `p` extended by its result.
pub fn bindkeep(
    m: &Model,
    first: &CompFn,
    p: &[Value],
    rest: &mut dyn FnMut(&[Value]) -> Result<Comp, SemError>,
) -> Result<Comp, SemError> {
    m.monad.bind(&first(p)?, &mut |v| rest(&extend(p, [v.clone()])))
}

/// Evaluate record fields left to right and return the record.
fn collect_fields(m: &Model, fields: &[CompFn], p: &[Value], done: Vec<Value>) -> Result<Comp, SemError> {
    match fields.split_first() {
        None => Ok(m.monad.unit(Value::Record(done))),
        Some((head, rest)) => m.monad.bind(&head(p)?, &mut |v| {
            let mut next = done.clone();
            next.push(v.clone());
            collect_fields(m, rest, p, next)
        }),
    }
}

/// One step of an iteration: finish with a result or continue from a state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step<Y, X> {
    Done(Y),
    Continue(X),
}

/// Iterate `step` from `start` in the partiality monad. Absence, or a
/// revisited state, is divergence.
pub fn elgot_iterate<X, Y>(
    mut step: impl FnMut(&X) -> Result<Option<Step<Y, X>>, SemError>,
    start: X,
) -> Result<Option<Y>, SemError>
where
    X: Clone + Ord,
{
    let mut seen = BTreeSet::new();
    let mut state = start;
    loop {
        if !seen.insert(state.clone()) {
            return Ok(None);
        }
        match step(&state)? {
            None => return Ok(None),
            Some(Step::Done(y)) => return Ok(Some(y)),
            Some(Step::Continue(next)) => state = next,
        }
    }
}

/// Least fixed point of `phi` on tables of `size` optional entries,
/// iterated from the everywhere-absent table.
pub fn kleene_fixpoint<T: Clone + PartialEq>(
    size: usize,
    mut phi: impl FnMut(&[Option<T>]) -> Result<Vec<Option<T>>, SemError>,
) -> Result<Vec<Option<T>>, SemError> {
    let mut current = vec![None; size];
    // Each productive round defines at least one more entry.
    for _ in 0..=size {
        let next = phi(&current)?;
        if next == current {
            return Ok(current);
        }
        current = next;
    }
    Err(SemError::NonConvergence { bound: size + 1 })
}

/// The least solution of a block of mutually recursive definitions at one
/// point, as function values.
fn recursive_functions(
    m: &Model,
    defs: &[CompFn],
    domains: &[TypeExpr],
    sizes: &[usize],
    p: &[Value],
) -> Result<Vec<Value>, SemError> {
    let offsets: Vec<usize> = sizes.iter().scan(0, |acc, s| Some(std::mem::replace(acc, *acc + s))).collect();
    let total: usize = sizes.iter().sum();
    let to_functions = |flat: &[Option<Value>]| -> Vec<Value> {
        offsets
            .iter()
            .zip(sizes)
            .map(|(&o, &s)| Value::Fun(flat[o..o + s].iter().map(|e| Comp::Maybe(e.clone())).collect()))
            .collect()
    };
    let fixed = kleene_fixpoint(total, |flat| {
        let functions = to_functions(flat);
        let mut next = Vec::with_capacity(total);
        for ((def, dom), &size) in defs.iter().zip(domains).zip(sizes) {
            let mut point = extend(p, functions.iter().cloned());
            let base = point.len();
            for i in 0..size as u128 {
                let Value::Record(params) = m.unrank(dom, i) else {
                    return Err(SemError::Malformed(format!("recursive function domain {dom}")));
                };
                point.truncate(base);
                point.extend(params);
                match def(&point)? {
                    Comp::Maybe(o) => next.push(o),
                    other => return Err(SemError::Malformed(format!("recursive body gave {other:?}"))),
                }
            }
        }
        Ok(next)
    })?;
    Ok(to_functions(&fixed))
}

impl Algebra<TypeExpr, SemCarrier> for SemAlgebra {
    type Out = Sem;
    type Error = SemError;

    fn var(&self, elem: &ValueFn, _sort: &TypeExpr) -> Result<Sem, SemError> {
        Ok(Sem::Value(elem.clone()))
    }

    fn op(&self, op: &OpRef<TypeExpr>, ctx: &Context<TypeExpr>, args: Vec<Sem>) -> Result<Sem, SemError> {
        let construct = Construct::parse_label(&op.label)
            .map_err(SemError::Malformed)?
            .ok_or_else(|| SemError::Malformed(format!("`{}` is not a construct of the calculus", op.label)))?;
        self.clause(&construct, ctx, &args)
    }

    fn hole(&self, hole: &str, _ctx: &Context<TypeExpr>, _env: Vec<Sem>) -> Result<Sem, SemError> {
        Err(SemError::Malformed(format!("cannot interpret the hole ?{hole}")))
    }
}

impl From<TermError> for SemError {
    fn from(e: TermError) -> Self {
        SemError::Malformed(e.to_string())
    }
}

/// The semantic map of `term` over `ctx`, unevaluated.
pub fn semantic_map(term: &Term<TypeExpr>, ctx: &Context<TypeExpr>, algebra: &SemAlgebra) -> Result<Sem, SemError> {
    let env = Env::variables(&SemCarrier, ctx);
    fold(term, &SemCarrier, &env, algebra)
}

/// A materialized semantic map.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Table {
    Value(Vec<Value>),
    Comp(Vec<Comp>),
}

impl Table {
    pub fn len(&self) -> usize {
        match self {
            Table::Value(v) => v.len(),
            Table::Comp(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A denotation as a table indexed by the points of its context.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Denotation {
    pub sort: Sort<TypeExpr>,
    pub ctx: Context<TypeExpr>,
    pub table: Table,
}

impl Denotation {
    /// Evaluate `sem` at every point of `ctx`.
    pub fn materialize(sem: &Sem, sort: Sort<TypeExpr>, ctx: Context<TypeExpr>, model: &Model) -> Result<Self, SemError> {
        let n = model.context_size(&ctx)?;
        let points = (0..n).map(|i| model.point(&ctx, i));
        let table = match (sem, &sort) {
            (Sem::Value(f), Sort::First(_)) => Table::Value(points.map(|p| f(&p)).collect::<Result<_, _>>()?),
            (Sem::Comp(f), Sort::Second(_)) => Table::Comp(points.map(|p| f(&p)).collect::<Result<_, _>>()?),
            _ => return Err(SemError::Malformed(format!("denotation does not have sort {sort}"))),
        };
        Ok(Denotation { sort, ctx, table })
    }

    /// The table as a semantic map, looked up by point index.
    pub fn to_sem(&self, model: &Arc<Model>) -> Sem {
        let (m, ctx) = (model.clone(), self.ctx.clone());
        match &self.table {
            Table::Value(t) => {
                let t = t.clone();
                Sem::Value(Arc::new(move |p| Ok(t[m.point_index(&ctx, p)?].clone())))
            }
            Table::Comp(t) => {
                let t = t.clone();
                Sem::Comp(Arc::new(move |p| Ok(t[m.point_index(&ctx, p)?].clone())))
            }
        }
    }

    /// Projection onto a variable.
    pub fn projection(ctx: &Context<TypeExpr>, position: usize, model: &Model) -> Result<Self, SemError> {
        let sem = Sem::Value(SemCarrier.var(ctx, position));
        Denotation::materialize(&sem, Sort::First(ctx.entries()[position].clone()), ctx.clone(), model)
    }

    /// Text rendering: one line per point.
    pub fn render(&self, model: &Model, names: &[String]) -> Vec<String> {
        (0..self.table.len())
            .map(|i| {
                let p = model.point(&self.ctx, i);
                let args: Vec<String> = self
                    .ctx
                    .iter()
                    .zip(&p)
                    .zip(names)
                    .map(|((t, v), n)| format!("{n} = {}", model.render(t, v)))
                    .collect();
                let out = match &self.table {
                    Table::Value(t) => model.render(self.sort.id(), &t[i]),
                    Table::Comp(t) => model.render_comp(self.sort.id(), &t[i]),
                };
                if args.is_empty() {
                    out
                } else {
                    format!("{} |-> {out}", args.join(", "))
                }
            })
            .collect()
    }
}

/// `⟦term⟧` over `ctx` in `model`.
pub fn denote(
    term: &Term<TypeExpr>,
    sort: &Sort<TypeExpr>,
    ctx: &Context<TypeExpr>,
    model: &Arc<Model>,
) -> Result<Denotation, SemError> {
    let sem = semantic_map(term, ctx, &SemAlgebra::new(model.clone()))?;
    Denotation::materialize(&sem, sort.clone(), ctx.clone(), model)
}
