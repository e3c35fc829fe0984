//! Random and exhaustive well-typed terms, used by the law checks.

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::signature::{Env, OpRef};
use crate::sorts::{Context, Sort};
use crate::terms::{HoleDecl, SubstEnv, Term};

use super::ops::Construct;
use super::types::{enumerate_types, FragmentConfig, Row, TypeExpr};

/// Size limits for generated terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    /// Largest term depth, counting leaves as depth 1.
    pub depth: usize,
    /// Longest generated context.
    pub max_ctx: usize,
    /// Depth of the types used for binders, contexts and intermediate results.
    pub pool_depth: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams { depth: 4, max_ctx: 3, pool_depth: 2 }
    }
}

/// Record and variant labels used by generated types.
pub const LABELS: [&str; 2] = ["l", "m"];

/// The small types used to fill binders and contexts.
pub fn type_pool(config: &FragmentConfig, params: &GenParams) -> Vec<TypeExpr> {
    enumerate_types(config, params.pool_depth.min(config.type_depth), &LABELS, 2)
}

/// A generator over one fragment. Operators are shared between terms.
pub struct Generator<'a> {
    pub config: &'a FragmentConfig,
    pub pool: Vec<TypeExpr>,
    pub holes: Vec<HoleDecl<TypeExpr>>,
    ops: HashMap<Construct, Option<OpRef<TypeExpr>>>,
}

impl<'a> Generator<'a> {
    pub fn new(config: &'a FragmentConfig, pool: Vec<TypeExpr>) -> Self {
        Generator { config, pool, holes: Vec::new(), ops: HashMap::new() }
    }

    pub fn with_holes(mut self, holes: Vec<HoleDecl<TypeExpr>>) -> Self {
        self.holes = holes;
        self
    }

    /// The operator for a construct, if the fragment has it.
    pub fn op(&mut self, c: Construct) -> Option<OpRef<TypeExpr>> {
        let config = self.config;
        self.ops.entry(c).or_insert_with_key(|c| c.instantiate(config).ok().map(Arc::new)).clone()
    }

    fn node(&mut self, c: Construct, args: Vec<Term<TypeExpr>>) -> Option<Term<TypeExpr>> {
        Some(Term::Op(self.op(c)?, args))
    }

    pub fn random_context<R: Rng>(&self, max_len: usize, rng: &mut R) -> Context<TypeExpr> {
        let len = rng.gen_range(0..=max_len);
        Context::new((0..len).map(|_| self.pool.choose(rng).expect("nonempty pool").clone()).collect())
    }

    fn pick<R: Rng>(&self, rng: &mut R) -> TypeExpr {
        self.pool.choose(rng).expect("nonempty pool").clone()
    }

    fn holes_at(&self, sort: &Sort<TypeExpr>) -> Vec<HoleDecl<TypeExpr>> {
        self.holes.iter().filter(|h| &h.sort == sort).cloned().collect()
    }

    fn hole<R: Rng>(&mut self, ctx: &Context<TypeExpr>, sort: &Sort<TypeExpr>, depth: usize, rng: &mut R) -> Option<Term<TypeExpr>> {
        let decl = self.holes_at(sort).choose(rng)?.clone();
        let env = decl
            .ctx
            .iter()
            .map(|t| self.value(ctx, t, depth - 1, rng))
            .collect::<Option<Vec<_>>>()?;
        Some(Term::Meta(decl.id, env))
    }

    /// A random value of type `ty` over `ctx` of depth at most `depth`.
    pub fn value<R: Rng>(&mut self, ctx: &Context<TypeExpr>, ty: &TypeExpr, depth: usize, rng: &mut R) -> Option<Term<TypeExpr>> {
        if depth == 0 {
            return None;
        }
        let mut choices: Vec<u8> = vec![0, 0, 1, 2, 3, 4, 5];
        choices.shuffle(rng);
        for choice in choices {
            let found = match choice {
                0 => {
                    let vars = ctx.vars_of_sort(ty);
                    vars.choose(rng).map(|&p| Term::Var(p))
                }
                1 if *ty == TypeExpr::Nat => {
                    let n = rng.gen_range(0..self.config.nat_bound);
                    self.node(Construct::Lit(n), vec![])
                }
                2 => match ty {
                    TypeExpr::Fun(a, r) if depth > 1 && self.op(Construct::Lam((**a).clone(), (**r).clone())).is_some() => {
                        let inner = ctx.concat(&Context::new(vec![(**a).clone()]));
                        let body = self.comp(&inner, r, depth - 1, rng);
                        body.and_then(|b| self.node(Construct::Lam((**a).clone(), (**r).clone()), vec![b]))
                    }
                    _ => None,
                },
                3 => match ty {
                    TypeExpr::Record(row) if depth > 1 || row.is_empty() => {
                        self.op(Construct::ValueRecord(row.clone()))?;
                        let args = row
                            .types()
                            .map(|t| self.value(ctx, t, depth - 1, rng))
                            .collect::<Option<Vec<_>>>();
                        args.and_then(|a| self.node(Construct::ValueRecord(row.clone()), a))
                    }
                    _ => None,
                },
                4 => match ty {
                    TypeExpr::Variant(row) if depth > 1 && !row.is_empty() => {
                        let label = row.labels().collect::<Vec<_>>().choose(rng).map(|l| l.to_string())?;
                        let payload = row.get(&label).expect("label of row").clone();
                        let c = Construct::ValueTag(row.clone(), label);
                        self.op(c.clone())?;
                        let arg = self.value(ctx, &payload, depth - 1, rng);
                        arg.and_then(|a| self.node(c, vec![a]))
                    }
                    _ => None,
                },
                5 if depth > 1 => self.hole(ctx, &Sort::First(ty.clone()), depth, rng),
                _ => None,
            };
            if found.is_some() {
                return found;
            }
        }
        None
    }

    /// A random computation of type `ty` over `ctx`.
    pub fn comp<R: Rng>(&mut self, ctx: &Context<TypeExpr>, ty: &TypeExpr, depth: usize, rng: &mut R) -> Option<Term<TypeExpr>> {
        if depth < 2 {
            return None;
        }
        let mut choices: Vec<u8> = (0..14).collect();
        choices.shuffle(rng);
        // Returning a value is the most reliable production; keep it as a
        // late fallback so deeper forms get a chance first.
        choices.push(0);
        for choice in choices {
            if let Some(t) = self.comp_choice(choice, ctx, ty, depth, rng) {
                return Some(t);
            }
        }
        None
    }

    fn comps<R: Rng>(&mut self, ctx: &Context<TypeExpr>, types: &[TypeExpr], depth: usize, rng: &mut R) -> Option<Vec<Term<TypeExpr>>> {
        types.iter().map(|t| self.comp(ctx, t, depth, rng)).collect()
    }

    fn comp_choice<R: Rng>(
        &mut self,
        choice: u8,
        ctx: &Context<TypeExpr>,
        ty: &TypeExpr,
        depth: usize,
        rng: &mut R,
    ) -> Option<Term<TypeExpr>> {
        let d = depth - 1;
        let ext = |extra: Vec<TypeExpr>| ctx.concat(&Context::new(extra));
        match choice {
            0 => {
                let c = Construct::Val(ty.clone());
                self.op(c.clone())?;
                let v = self.value(ctx, ty, d, rng)?;
                self.node(c, vec![v])
            }
            1 => {
                let n = rng.gen_range(1..=2);
                let types: Vec<TypeExpr> = (0..n).map(|_| self.pick(rng)).collect();
                let c = Construct::Let(types.clone(), ty.clone());
                self.op(c.clone())?;
                let mut args = Vec::new();
                for i in 0..n {
                    args.push(self.comp(&ext(types[..i].to_vec()), &types[i], d, rng)?);
                }
                args.push(self.comp(&ext(types.clone()), ty, d, rng)?);
                self.node(c, args)
            }
            2 => {
                let a = self.pick(rng);
                let c = Construct::App(a.clone(), ty.clone());
                self.op(c.clone())?;
                let f = self.comp(ctx, &TypeExpr::fun(a.clone(), ty.clone()), d, rng)?;
                let x = self.comp(ctx, &a, d, rng)?;
                self.node(c, vec![f, x])
            }
            3 => match ty {
                TypeExpr::Record(row) => {
                    let c = Construct::CompRecord(row.clone());
                    self.op(c.clone())?;
                    let types: Vec<TypeExpr> = row.types().cloned().collect();
                    let args = self.comps(ctx, &types, d, rng)?;
                    self.node(c, args)
                }
                _ => None,
            },
            4 => match ty {
                TypeExpr::Variant(row) if !row.is_empty() => {
                    let label = row.labels().collect::<Vec<_>>().choose(rng).map(|l| l.to_string())?;
                    let payload = row.get(&label).expect("label of row").clone();
                    let c = Construct::CompTag(row.clone(), label);
                    self.op(c.clone())?;
                    let arg = self.comp(ctx, &payload, d, rng)?;
                    self.node(c, vec![arg])
                }
                _ => None,
            },
            5 => {
                let TypeExpr::Record(row) = self.pick(rng) else { return None };
                let c = Construct::RecordMatch(row.clone(), ty.clone());
                self.op(c.clone())?;
                let s = self.comp(ctx, &TypeExpr::Record(row.clone()), d, rng)?;
                let b = self.comp(&ext(row.types().cloned().collect()), ty, d, rng)?;
                self.node(c, vec![s, b])
            }
            6 => {
                let TypeExpr::Variant(row) = self.pick(rng) else { return None };
                let c = Construct::VariantMatch(row.clone(), ty.clone());
                self.op(c.clone())?;
                let mut args = vec![self.comp(ctx, &TypeExpr::Variant(row.clone()), d, rng)?];
                for t in row.types() {
                    args.push(self.comp(&ext(vec![t.clone()]), ty, d, rng)?);
                }
                self.node(c, args)
            }
            7 if *ty == TypeExpr::Nat => {
                self.op(Construct::Roll)?;
                let arg = self.comp(ctx, &TypeExpr::maybe(TypeExpr::Nat), d, rng)?;
                self.node(Construct::Roll, vec![arg])
            }
            7 if *ty == TypeExpr::maybe(TypeExpr::Nat) => {
                self.op(Construct::Unroll)?;
                let arg = self.comp(ctx, &TypeExpr::Nat, d, rng)?;
                self.node(Construct::Unroll, vec![arg])
            }
            8 => {
                let c = Construct::Fold(ty.clone());
                self.op(c.clone())?;
                let n = self.comp(ctx, &TypeExpr::Nat, d, rng)?;
                let b = self.comp(&ext(vec![TypeExpr::maybe(ty.clone())]), ty, d, rng)?;
                self.node(c, vec![n, b])
            }
            9 => {
                let state = self.pick(rng);
                let c = Construct::For(state.clone(), ty.clone());
                self.op(c.clone())?;
                let init = self.comp(ctx, &state, d, rng)?;
                let body = self.comp(&ext(vec![state.clone()]), &TypeExpr::loop_step(state, ty.clone()), d, rng)?;
                self.node(c, vec![init, body])
            }
            10 => {
                let n = rng.gen_range(1..=2);
                let fs: Vec<TypeExpr> = (0..n)
                    .map(|_| {
                        let params: Vec<TypeExpr> = (0..rng.gen_range(0..=1)).map(|_| self.pick(rng)).collect();
                        TypeExpr::rec_function(&params, self.pick(rng))
                    })
                    .collect();
                let c = Construct::LetRec(fs.clone(), ty.clone());
                self.op(c.clone())?;
                let mut args = Vec::new();
                for f in &fs {
                    let (params, result) = f.rec_parts().expect("recursive shape");
                    let result = result.clone();
                    args.push(self.comp(&ext(fs.iter().cloned().chain(params).collect()), &result, d, rng)?);
                }
                args.push(self.comp(&ext(fs.clone()), ty, d, rng)?);
                self.node(c, args)
            }
            11 => self.call_variable(ctx, ty, d, rng),
            12 | 13 => self.hole(ctx, &Sort::Second(ty.clone()), depth, rng),
            _ => None,
        }
    }

    /// Apply a function variable of the context whose result is `ty`.
    fn call_variable<R: Rng>(&mut self, ctx: &Context<TypeExpr>, ty: &TypeExpr, d: usize, rng: &mut R) -> Option<Term<TypeExpr>> {
        let candidates: Vec<(usize, TypeExpr)> = ctx
            .iter()
            .enumerate()
            .filter(|(_, t)| matches!(t, TypeExpr::Fun(_, r) if **r == *ty))
            .map(|(i, t)| (i, t.clone()))
            .collect();
        let (pos, fty) = candidates.choose(rng)?.clone();
        let TypeExpr::Fun(arg, _) = &fty else { unreachable!("filtered") };
        let head = self.node(Construct::Val(fty.clone()), vec![Term::Var(pos)])?;
        if d < 2 {
            return None;
        }
        if let (true, TypeExpr::Record(row)) = (self.config.fused_call(), arg.as_ref()) {
            let c = Construct::Call(row.clone(), ty.clone());
            self.op(c.clone())?;
            let types: Vec<TypeExpr> = row.types().cloned().collect();
            let mut args = vec![head];
            args.extend(self.comps(ctx, &types, d, rng)?);
            return self.node(c, args);
        }
        let c = Construct::App((**arg).clone(), ty.clone());
        self.op(c.clone())?;
        let x = self.comp(ctx, arg, d, rng)?;
        self.node(c, vec![head, x])
    }

    /// A random term at `sort`.
    pub fn term<R: Rng>(&mut self, ctx: &Context<TypeExpr>, sort: &Sort<TypeExpr>, depth: usize, rng: &mut R) -> Option<Term<TypeExpr>> {
        match sort {
            Sort::First(t) => self.value(ctx, t, depth, rng),
            Sort::Second(t) => self.comp(ctx, t, depth, rng),
        }
    }

    /// A random well-typed program: context, sort and term. Retries until
    /// some sort is inhabited.
    pub fn program<R: Rng>(&mut self, params: &GenParams, rng: &mut R) -> (Context<TypeExpr>, Sort<TypeExpr>, Term<TypeExpr>) {
        loop {
            let ctx = self.random_context(params.max_ctx, rng);
            let ty = self.pick(rng);
            let sort = if rng.gen_bool(0.75) { Sort::Second(ty) } else { Sort::First(ty) };
            if let Some(t) = self.term(&ctx, &sort, params.depth, rng) {
                return (ctx, sort, t);
            }
        }
    }

    /// A random substitution for `source`, over a random target context.
    /// Falls back to the identity context when no other target works.
    pub fn subst<R: Rng>(&mut self, source: &Context<TypeExpr>, params: &GenParams, rng: &mut R) -> SubstEnv<TypeExpr> {
        for _ in 0..8 {
            let target = self.random_context(params.max_ctx, rng);
            let entries: Option<Vec<_>> = source.iter().map(|t| self.value(&target, t, params.depth, rng)).collect();
            if let Some(entries) = entries {
                return Env::new(source.clone(), target, entries);
            }
        }
        let target = source.clone();
        let entries = source
            .iter()
            .enumerate()
            .map(|(i, t)| self.value(&target, t, params.depth, rng).unwrap_or(Term::Var(i)))
            .collect();
        Env::new(source.clone(), target, entries)
    }

    /// Every term of depth at most `depth` at `sort` over `ctx`, drawing
    /// binder and intermediate types from the pool.
    pub fn enumerate(&mut self, ctx: &Context<TypeExpr>, sort: &Sort<TypeExpr>, depth: usize) -> Vec<Term<TypeExpr>> {
        let mut memo = HashMap::new();
        self.all(ctx, sort, depth, &mut memo)
    }

    fn all(
        &mut self,
        ctx: &Context<TypeExpr>,
        sort: &Sort<TypeExpr>,
        depth: usize,
        memo: &mut HashMap<(Context<TypeExpr>, Sort<TypeExpr>, usize), Vec<Term<TypeExpr>>>,
    ) -> Vec<Term<TypeExpr>> {
        if depth == 0 {
            return Vec::new();
        }
        let key = (ctx.clone(), sort.clone(), depth);
        if let Some(found) = memo.get(&key) {
            return found.clone();
        }
        let d = depth - 1;
        let ext = |extra: Vec<TypeExpr>| ctx.concat(&Context::new(extra));
        let mut out: Vec<Term<TypeExpr>> = Vec::new();
        let pool = self.pool.clone();
        match sort {
            Sort::First(ty) => {
                out.extend(ctx.vars_of_sort(ty).into_iter().map(Term::Var));
                if *ty == TypeExpr::Nat {
                    for n in 0..self.config.nat_bound {
                        out.extend(self.node(Construct::Lit(n), vec![]));
                    }
                }
                if let TypeExpr::Fun(a, r) = ty {
                    if let Some(op) = self.op(Construct::Lam((**a).clone(), (**r).clone())) {
                        for b in self.all(&ext(vec![(**a).clone()]), &Sort::Second((**r).clone()), d, memo) {
                            out.push(Term::Op(op.clone(), vec![b]));
                        }
                    }
                }
                if let TypeExpr::Record(row) = ty {
                    if let Some(op) = self.op(Construct::ValueRecord(row.clone())) {
                        let sorts: Vec<Sort<TypeExpr>> = row.types().map(|t| Sort::First(t.clone())).collect();
                        for args in self.products(ctx, &sorts, d, memo) {
                            out.push(Term::Op(op.clone(), args));
                        }
                    }
                }
                if let TypeExpr::Variant(row) = ty {
                    for (l, t) in row.fields().to_vec() {
                        if let Some(op) = self.op(Construct::ValueTag(row.clone(), l)) {
                            for a in self.all(ctx, &Sort::First(t), d, memo) {
                                out.push(Term::Op(op.clone(), vec![a]));
                            }
                        }
                    }
                }
            }
            Sort::Second(ty) => {
                if let Some(op) = self.op(Construct::Val(ty.clone())) {
                    for v in self.all(ctx, &Sort::First(ty.clone()), d, memo) {
                        out.push(Term::Op(op.clone(), vec![v]));
                    }
                }
                for a in &pool {
                    if let Some(op) = self.op(Construct::Let(vec![a.clone()], ty.clone())) {
                        let firsts = self.all(ctx, &Sort::Second(a.clone()), d, memo);
                        if !firsts.is_empty() {
                            let bodies = self.all(&ext(vec![a.clone()]), &Sort::Second(ty.clone()), d, memo);
                            for m in &firsts {
                                for b in &bodies {
                                    out.push(Term::Op(op.clone(), vec![m.clone(), b.clone()]));
                                }
                            }
                        }
                    }
                    if let Some(op) = self.op(Construct::App(a.clone(), ty.clone())) {
                        let sorts = [Sort::Second(TypeExpr::fun(a.clone(), ty.clone())), Sort::Second(a.clone())];
                        for args in self.products(ctx, &sorts, d, memo) {
                            out.push(Term::Op(op.clone(), args));
                        }
                    }
                }
            }
        }
        memo.insert(key, out.clone());
        out
    }

    fn products(
        &mut self,
        ctx: &Context<TypeExpr>,
        sorts: &[Sort<TypeExpr>],
        depth: usize,
        memo: &mut HashMap<(Context<TypeExpr>, Sort<TypeExpr>, usize), Vec<Term<TypeExpr>>>,
    ) -> Vec<Vec<Term<TypeExpr>>> {
        let mut acc: Vec<Vec<Term<TypeExpr>>> = vec![Vec::new()];
        for s in sorts {
            let options = self.all(ctx, s, depth, memo);
            acc = acc
                .into_iter()
                .flat_map(|prefix| {
                    options.iter().map(move |o| {
                        let mut next = prefix.clone();
                        next.push(o.clone());
                        next
                    })
                })
                .collect();
        }
        acc
    }
}

/// A random value of the given type, if one exists within the depth.
pub fn random_value<R: Rng>(
    config: &FragmentConfig,
    ctx: &Context<TypeExpr>,
    ty: &TypeExpr,
    params: &GenParams,
    rng: &mut R,
) -> Option<Term<TypeExpr>> {
    Generator::new(config, type_pool(config, params)).value(ctx, ty, params.depth, rng)
}

/// A random computation of the given type, if one exists within the depth.
pub fn random_comp<R: Rng>(
    config: &FragmentConfig,
    ctx: &Context<TypeExpr>,
    ty: &TypeExpr,
    params: &GenParams,
    rng: &mut R,
) -> Option<Term<TypeExpr>> {
    Generator::new(config, type_pool(config, params)).comp(ctx, ty, params.depth, rng)
}

/// A random well-typed program.
pub fn random_program<R: Rng>(
    config: &FragmentConfig,
    params: &GenParams,
    rng: &mut R,
) -> (Context<TypeExpr>, Sort<TypeExpr>, Term<TypeExpr>) {
    Generator::new(config, type_pool(config, params)).program(params, rng)
}

/// A random substitution for `source`.
pub fn random_subst<R: Rng>(
    config: &FragmentConfig,
    source: &Context<TypeExpr>,
    params: &GenParams,
    rng: &mut R,
) -> SubstEnv<TypeExpr> {
    Generator::new(config, type_pool(config, params)).subst(source, params, rng)
}

/// Row helper for tests and callers building records by hand.
pub fn row(fields: &[(&str, TypeExpr)]) -> Row {
    Row::new(fields.iter().map(|(l, t)| (l.to_string(), t.clone())).collect()).expect("distinct labels")
}
