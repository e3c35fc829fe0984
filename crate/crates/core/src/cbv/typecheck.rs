//! Bidirectional elaboration of surface programs into generic terms.
//!
//! Values and scrutinees synthesize their types; bodies of binding forms
//! are checked against an expected type when one is known. Variables
//! resolve to the nearest enclosing binder.

use std::sync::Arc;

use crate::signature::{OpRef, SignatureError};
use crate::sorts::{Context, Sort};
use crate::terms::Term;

use super::ops::Construct;
use super::surface::{Expr, ExprKind};
use super::types::{Extension, FragmentConfig, Need, Row, TypeExpr, TypeRejection};
use super::CbvError;

type Elab = Result<(Term<TypeExpr>, TypeExpr), CbvError>;

/// Named variables in scope, leftmost first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Scope(Vec<(String, TypeExpr)>);

impl Scope {
    pub fn new(entries: Vec<(String, TypeExpr)>) -> Self {
        Scope(entries)
    }

    /// Parse `x : b, y : (b->b)`.
    pub fn parse(text: &str) -> Result<Self, CbvError> {
        let mut entries = Vec::new();
        for part in split_top_level(text) {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (name, ty) = part
                .split_once(':')
                .ok_or_else(|| CbvError::Config(format!("expected `name : type` in context entry `{part}`")))?;
            entries.push((name.trim().to_string(), TypeExpr::parse(ty)?));
        }
        Ok(Scope(entries))
    }

    pub fn context(&self) -> Context<TypeExpr> {
        Context::new(self.0.iter().map(|(_, t)| t.clone()).collect())
    }

    pub fn names(&self) -> Vec<String> {
        self.0.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn entries(&self) -> &[(String, TypeExpr)] {
        &self.0
    }

    /// Variables named `x0`, `x1`, … over the given context.
    pub fn positional(ctx: &Context<TypeExpr>) -> Self {
        Scope(ctx.iter().enumerate().map(|(i, t)| (format!("x{i}"), t.clone())).collect())
    }
}

fn split_top_level(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    let bytes = text.as_bytes();
    for (i, &c) in bytes.iter().enumerate() {
        match c {
            b'(' | b'{' | b'<' => depth += 1,
            b')' | b'}' => depth -= 1,
            b'>' if i == 0 || bytes[i - 1] != b'-' => depth -= 1,
            b',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

struct Checker<'a> {
    config: &'a FragmentConfig,
    scope: Vec<(String, TypeExpr)>,
}

fn describe(sort: &Sort<TypeExpr>) -> String {
    match sort {
        Sort::First(t) => format!("a value of type {t}"),
        Sort::Second(t) => format!("a computation of type C {t}"),
    }
}

impl Checker<'_> {
    fn op(&self, construct: Construct, at: usize) -> Result<OpRef<TypeExpr>, CbvError> {
        if let Some(extension) = construct.missing_extension(self.config) {
            return Err(CbvError::DisabledConstruct { extension, at });
        }
        match construct.instantiate(self.config) {
            Ok(op) => Ok(Arc::new(op)),
            Err(SignatureError::DepthExceeded { label, limit, .. }) => Err(CbvError::DepthExceeded { ty: label, limit, at }),
            Err(e) => Err(e.into()),
        }
    }

    fn admit(&self, t: &TypeExpr, at: usize) -> Result<(), CbvError> {
        match self.config.check_type(t) {
            Ok(()) if t.depth() <= self.config.type_depth => Ok(()),
            Ok(()) => Err(CbvError::DepthExceeded { ty: t.to_string(), limit: self.config.type_depth, at }),
            Err(TypeRejection::UnknownBase(name)) => Err(CbvError::UnknownBaseType { name, at }),
            Err(TypeRejection::Needs(extension, _)) => Err(CbvError::DisabledConstruct { extension, at }),
        }
    }

    fn with<T>(&mut self, binders: Vec<(String, TypeExpr)>, f: impl FnOnce(&mut Self) -> T) -> T {
        let n = binders.len();
        self.scope.extend(binders);
        let out = f(self);
        self.scope.truncate(self.scope.len() - n);
        out
    }

    fn mismatch(expected: &Sort<TypeExpr>, found: &Sort<TypeExpr>, at: usize) -> CbvError {
        CbvError::SortMismatch { expected: describe(expected), found: describe(found), at }
    }

    fn value(&mut self, e: &Expr) -> Elab {
        match &e.kind {
            ExprKind::Var(name) => {
                let position = self
                    .scope
                    .iter()
                    .rposition(|(n, _)| n == name)
                    .ok_or_else(|| CbvError::UnknownVariable { name: name.clone(), at: e.at })?;
                Ok((Term::Var(position), self.scope[position].1.clone()))
            }
            ExprKind::Lit(n) => Ok((Term::Op(self.op(Construct::Lit(*n), e.at)?, vec![]), TypeExpr::Nat)),
            ExprKind::Lam(x, ty, body) => {
                self.admit(ty, e.at)?;
                let (b, result) = self.with(vec![(x.clone(), ty.clone())], |c| c.comp(body))?;
                let op = self.op(Construct::Lam(ty.clone(), result.clone()), e.at)?;
                Ok((Term::Op(op, vec![b]), TypeExpr::fun(ty.clone(), result)))
            }
            ExprKind::Record(fields) => {
                let (row, args) = self.record_fields(fields, e.at, |c, f| c.value(f))?;
                let op = self.op(Construct::ValueRecord(row.clone()), e.at)?;
                Ok((Term::Op(op, args), TypeExpr::Record(row)))
            }
            ExprKind::Tag { label, payload, ty } => {
                let row = self.tag_row(label, ty, e.at)?;
                let arg = self.check_value(payload, row.get(label).expect("checked label"))?;
                let op = self.op(Construct::ValueTag(row, label.clone()), e.at)?;
                Ok((Term::Op(op, vec![arg]), ty.clone()))
            }
            _ => Err(CbvError::SortMismatch {
                expected: "a value".into(),
                found: "a computation (values are returned with `val`)".into(),
                at: e.at,
            }),
        }
    }

    fn check_value(&mut self, e: &Expr, expected: &TypeExpr) -> Result<Term<TypeExpr>, CbvError> {
        let (t, found) = self.value(e)?;
        if &found != expected {
            return Err(Self::mismatch(&Sort::First(expected.clone()), &Sort::First(found), e.at));
        }
        Ok(t)
    }

    fn tag_row(&self, label: &str, ty: &TypeExpr, at: usize) -> Result<Row, CbvError> {
        self.admit(ty, at)?;
        match ty {
            TypeExpr::Variant(row) if row.get(label).is_some() => Ok(row.clone()),
            TypeExpr::Variant(_) => Err(CbvError::SortMismatch {
                expected: format!("a constructor of {ty}"),
                found: format!("`{label}`"),
                at,
            }),
            other => Err(CbvError::SortMismatch { expected: "a variant type".into(), found: other.to_string(), at }),
        }
    }

    /// Elaborate record fields and put them in canonical row order.
    fn record_fields(
        &mut self,
        fields: &[(String, Expr)],
        at: usize,
        mut elab: impl FnMut(&mut Self, &Expr) -> Elab,
    ) -> Result<(Row, Vec<Term<TypeExpr>>), CbvError> {
        let mut typed = Vec::new();
        for (l, f) in fields {
            let (t, ty) = elab(self, f)?;
            typed.push((l.clone(), ty, t));
        }
        let row = Row::new(typed.iter().map(|(l, ty, _)| (l.clone(), ty.clone())).collect())
            .map_err(|l| CbvError::Syntax { position: at, message: format!("duplicate label `{l}`") })?;
        let args = row
            .labels()
            .map(|l| typed.iter().find(|(m, _, _)| m == l).expect("label present").2.clone())
            .collect();
        Ok((row, args))
    }

    fn comp(&mut self, e: &Expr) -> Elab {
        self.comp_at(e, None)
    }

    fn check_comp(&mut self, e: &Expr, expected: &TypeExpr) -> Result<Term<TypeExpr>, CbvError> {
        let (t, found) = self.comp_at(e, Some(expected))?;
        if &found != expected {
            return Err(Self::mismatch(&Sort::Second(expected.clone()), &Sort::Second(found), e.at));
        }
        Ok(t)
    }

    /// Synthesize, or check when `expected` is given.
    fn comp_at(&mut self, e: &Expr, expected: Option<&TypeExpr>) -> Elab {
        let at = e.at;
        let body_at = |c: &mut Self, b: &Expr| match expected {
            Some(t) => c.check_comp(b, t).map(|term| (term, t.clone())),
            None => c.comp(b),
        };
        match &e.kind {
            ExprKind::Val(v) => {
                let (t, ty) = self.value(v)?;
                Ok((Term::Op(self.op(Construct::Val(ty.clone()), at)?, vec![t]), ty))
            }
            ExprKind::Let(binds, body) => {
                let mut args = Vec::new();
                let mut types = Vec::new();
                let mut bound = Vec::new();
                for (x, m) in binds {
                    let (t, ty) = self.with(bound.clone(), |c| c.comp(m))?;
                    args.push(t);
                    bound.push((x.clone(), ty.clone()));
                    types.push(ty);
                }
                let (b, result) = self.with(bound, |c| body_at(c, body))?;
                args.push(b);
                Ok((Term::Op(self.op(Construct::Let(types, result.clone()), at)?, args), result))
            }
            ExprKind::App(f, arg) => {
                if let (true, ExprKind::Record(fields)) = (self.config.fused_call(), &arg.kind) {
                    return self.call(f, fields, at);
                }
                let (tf, fty) = self.comp(f)?;
                let TypeExpr::Fun(a, r) = fty else {
                    return Err(CbvError::SortMismatch {
                        expected: "a computation of function type".into(),
                        found: describe(&Sort::Second(fty)),
                        at: f.at,
                    });
                };
                let ta = self.check_comp(arg, &a)?;
                Ok((Term::Op(self.op(Construct::App(*a, (*r).clone()), at)?, vec![tf, ta]), *r))
            }
            ExprKind::Record(fields) => {
                let (row, args) = self.record_fields(fields, at, |c, f| c.comp(f))?;
                Ok((Term::Op(self.op(Construct::CompRecord(row.clone()), at)?, args), TypeExpr::Record(row)))
            }
            ExprKind::Tag { label, payload, ty } => {
                let row = self.tag_row(label, ty, at)?;
                let arg = self.check_comp(payload, row.get(label).expect("checked label"))?;
                Ok((Term::Op(self.op(Construct::CompTag(row, label.clone()), at)?, vec![arg]), ty.clone()))
            }
            ExprKind::RecordCase { scrutinee, binders, body } => {
                let (ts, sty) = self.comp(scrutinee)?;
                let TypeExpr::Record(row) = sty else {
                    return Err(CbvError::SortMismatch {
                        expected: "a computation of record type".into(),
                        found: describe(&Sort::Second(sty)),
                        at: scrutinee.at,
                    });
                };
                if binders.len() != row.len() || binders.iter().any(|(l, _)| row.get(l).is_none()) {
                    let found: Vec<&str> = binders.iter().map(|(l, _)| l.as_str()).collect();
                    return Err(CbvError::ArityMismatch {
                        construct: "record pattern".into(),
                        expected: format!("the fields of {}", TypeExpr::Record(row.clone())),
                        found: format!("{{{}}}", found.join(", ")),
                        at,
                    });
                }
                let bound: Vec<(String, TypeExpr)> = row
                    .fields()
                    .iter()
                    .map(|(l, t)| (binders.iter().find(|(m, _)| m == l).expect("checked").1.clone(), t.clone()))
                    .collect();
                let (b, result) = self.with(bound, |c| body_at(c, body))?;
                Ok((Term::Op(self.op(Construct::RecordMatch(row, result.clone()), at)?, vec![ts, b]), result))
            }
            ExprKind::VariantCase { scrutinee, clauses } => {
                let (ts, sty) = self.comp(scrutinee)?;
                let TypeExpr::Variant(row) = sty else {
                    return Err(CbvError::SortMismatch {
                        expected: "a computation of variant type".into(),
                        found: describe(&Sort::Second(sty)),
                        at: scrutinee.at,
                    });
                };
                let mut labels: Vec<&str> = clauses.iter().map(|(l, _, _)| l.as_str()).collect();
                labels.sort_by(|a, b| super::types::label_order(a, b));
                if !labels.iter().copied().eq(row.labels()) {
                    return Err(CbvError::ArityMismatch {
                        construct: "variant pattern".into(),
                        expected: format!("one clause per constructor of {}", TypeExpr::Variant(row.clone())),
                        found: format!("clauses for {}", labels.join(", ")),
                        at,
                    });
                }
                let mut result = expected.cloned();
                let mut args = vec![ts];
                for (l, ty) in row.fields() {
                    let (_, x, arm) = clauses.iter().find(|(m, _, _)| m == l).expect("checked");
                    let (t, found) = self.with(vec![(x.clone(), ty.clone())], |c| match &result {
                        Some(r) => c.check_comp(arm, r).map(|t| (t, r.clone())),
                        None => c.comp(arm),
                    })?;
                    result = Some(found);
                    args.push(t);
                }
                let result = result.ok_or(CbvError::CannotSynthesize { at })?;
                Ok((Term::Op(self.op(Construct::VariantMatch(row, result.clone()), at)?, args), result))
            }
            ExprKind::Roll(m) => {
                let op = self.op(Construct::Roll, at)?;
                let t = self.check_comp(m, &TypeExpr::maybe(TypeExpr::Nat))?;
                Ok((Term::Op(op, vec![t]), TypeExpr::Nat))
            }
            ExprKind::Unroll(m) => {
                let op = self.op(Construct::Unroll, at)?;
                let t = self.check_comp(m, &TypeExpr::Nat)?;
                Ok((Term::Op(op, vec![t]), TypeExpr::maybe(TypeExpr::Nat)))
            }
            ExprKind::Fold { scrutinee, var, ty, body } => {
                if !self.config.has(Extension::Naturals) {
                    return Err(CbvError::DisabledConstruct { extension: Extension::Naturals, at });
                }
                self.admit(ty, at)?;
                let result = ty
                    .maybe_payload()
                    .ok_or_else(|| CbvError::NeedUnfulfilled { need: Need::Maybe.describe().into(), at })?
                    .clone();
                let ts = self.check_comp(scrutinee, &TypeExpr::Nat)?;
                let b = self.with(vec![(var.clone(), ty.clone())], |c| c.check_comp(body, &result))?;
                Ok((Term::Op(self.op(Construct::Fold(result.clone()), at)?, vec![ts, b]), result))
            }
            ExprKind::For { var, init, body } => {
                if !self.config.has(Extension::While) {
                    return Err(CbvError::DisabledConstruct { extension: Extension::While, at });
                }
                let (ti, state) = self.comp(init)?;
                let (tb, step) = self.with(vec![(var.clone(), state.clone())], |c| c.comp(body))?;
                let done = match step.loop_parts() {
                    Some((cont, done)) if *cont == state => done.clone(),
                    _ => {
                        return Err(CbvError::NeedUnfulfilled {
                            need: format!("{} with Cont:{state}, found {step}", Need::LoopStep.describe()),
                            at: body.at,
                        })
                    }
                };
                Ok((Term::Op(self.op(Construct::For(state, done.clone()), at)?, vec![ti, tb]), done))
            }
            ExprKind::LetRec(defs, body) => {
                if !self.config.has(Extension::Recursion) {
                    return Err(CbvError::DisabledConstruct { extension: Extension::Recursion, at });
                }
                let mut fs = Vec::new();
                for d in defs {
                    for (_, t) in &d.params {
                        self.admit(t, d.body.at)?;
                    }
                    let params: Vec<TypeExpr> = d.params.iter().map(|(_, t)| t.clone()).collect();
                    let f = self.config.fulfill().rec_function(&params, d.result.clone())?;
                    self.admit(&f, d.body.at)?;
                    fs.push((d.name.clone(), f));
                }
                let mut args = Vec::new();
                for d in defs {
                    let bound: Vec<_> = fs.iter().cloned().chain(d.params.iter().cloned()).collect();
                    args.push(self.with(bound, |c| c.check_comp(&d.body, &d.result))?);
                }
                let (b, result) = self.with(fs.clone(), |c| body_at(c, body))?;
                args.push(b);
                let types = fs.into_iter().map(|(_, f)| f).collect();
                Ok((Term::Op(self.op(Construct::LetRec(types, result.clone()), at)?, args), result))
            }
            ExprKind::Var(_) | ExprKind::Lit(_) | ExprKind::Lam(..) => Err(CbvError::SortMismatch {
                expected: "a computation".into(),
                found: "a value (use `val` to return it)".into(),
                at,
            }),
        }
    }

    fn call(&mut self, f: &Expr, fields: &[(String, Expr)], at: usize) -> Elab {
        let (tf, fty) = self.comp(f)?;
        let (row, result) = match &fty {
            TypeExpr::Fun(a, r) => match a.as_ref() {
                TypeExpr::Record(row) => (row.clone(), (**r).clone()),
                _ => return Err(CbvError::DisabledConstruct { extension: Extension::Functions, at }),
            },
            other => {
                return Err(CbvError::SortMismatch {
                    expected: "a computation of function type".into(),
                    found: describe(&Sort::Second(other.clone())),
                    at: f.at,
                })
            }
        };
        if fields.len() != row.len() || fields.iter().any(|(l, _)| row.get(l).is_none()) {
            return Err(CbvError::ArityMismatch {
                construct: "call".into(),
                expected: format!("arguments {}", TypeExpr::Record(row.clone())),
                found: format!("{} arguments", fields.len()),
                at,
            });
        }
        let mut args = vec![tf];
        for (l, ty) in row.fields() {
            let (_, arg) = fields.iter().find(|(m, _)| m == l).expect("checked");
            args.push(self.check_comp(arg, ty)?);
        }
        Ok((Term::Op(self.op(Construct::Call(row, result.clone()), at)?, args), result))
    }
}

/// Elaborate `expr` at `expected` over the named context.
pub fn typecheck(
    expr: &Expr,
    scope: &Scope,
    expected: &Sort<TypeExpr>,
    config: &FragmentConfig,
) -> Result<Term<TypeExpr>, CbvError> {
    let mut checker = Checker { config, scope: scope.0.clone() };
    for (_, t) in &scope.0 {
        checker.admit(t, 0)?;
    }
    checker.admit(expected.id(), expr.at)?;
    let (term, found) = match expected {
        Sort::First(_) => checker.value(expr).map(|(term, ty)| (term, Sort::First(ty)))?,
        Sort::Second(t) => checker.comp_at(expr, Some(t)).map(|(term, ty)| (term, Sort::Second(ty)))?,
    };
    if &found != expected {
        return Err(Checker::mismatch(expected, &found, expr.at));
    }
    Ok(term)
}

/// Elaborate `expr` and report its sort: value forms synthesize a
/// first-class sort, everything else a computation sort.
pub fn synthesize(
    expr: &Expr,
    scope: &Scope,
    config: &FragmentConfig,
) -> Result<(Term<TypeExpr>, Sort<TypeExpr>), CbvError> {
    let mut checker = Checker { config, scope: scope.0.clone() };
    for (_, t) in &scope.0 {
        checker.admit(t, 0)?;
    }
    if expr.is_value_form() {
        checker.value(expr).map(|(t, ty)| (t, Sort::First(ty)))
    } else {
        checker.comp(expr).map(|(t, ty)| (t, Sort::Second(ty)))
    }
}
