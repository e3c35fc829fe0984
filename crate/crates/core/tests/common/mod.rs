//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::sync::Arc;

use modsyn_core::cbv::{parse_program, typecheck, Construct, Extension, FragmentConfig, Generator, Scope, TypeExpr};
use modsyn_core::semantics::{
    denote, kleene_fixpoint, semantic_map, Comp, Denotation, Model, Monad, Sem, SemAlgebra, Step, Table, Value,
};
use modsyn_core::sorts::{Context, Sort};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use modsyn_core::terms::{SubstEnv, Term};

/// Raise every variable at or above `cutoff` by `by`.
pub fn shift(term: &Term<TypeExpr>, cutoff: usize, by: usize) -> Term<TypeExpr> {
    match term {
        Term::Var(x) if *x >= cutoff => Term::Var(x + by),
        Term::Var(x) => Term::Var(*x),
        Term::Op(op, args) => Term::Op(op.clone(), args.iter().map(|a| shift(a, cutoff, by)).collect()),
        Term::Meta(id, env) => Term::Meta(id.clone(), env.iter().map(|a| shift(a, cutoff, by)).collect()),
    }
}

/// Simultaneous substitution written directly by recursion: entries are
/// shifted past every binder crossed on the way down.
pub fn shifting_substitute(term: &Term<TypeExpr>, env: &SubstEnv<TypeExpr>) -> Term<TypeExpr> {
    fn go(t: &Term<TypeExpr>, src: usize, tgt: usize, crossed: usize, entries: &[Term<TypeExpr>]) -> Term<TypeExpr> {
        match t {
            Term::Var(x) if *x < src => shift(&entries[*x], tgt, crossed),
            Term::Var(x) => Term::Var(x - src + tgt),
            Term::Op(op, args) => Term::Op(
                op.clone(),
                op.args.iter().zip(args).map(|(a, arg)| go(arg, src, tgt, crossed + a.binder.len(), entries)).collect(),
            ),
            Term::Meta(id, env) => Term::Meta(id.clone(), env.iter().map(|e| go(e, src, tgt, crossed, entries)).collect()),
        }
    }
    go(term, env.source.len(), env.target.len(), 0, &env.entries)
}

/// Parse and typecheck a program at a computation type.
pub fn elaborate(src: &str, scope: &str, ty: TypeExpr, config: &FragmentConfig) -> (Scope, Term<TypeExpr>) {
    let scope = Scope::parse(scope).expect("scope");
    let expr = parse_program(src).unwrap_or_else(|e| panic!("{src}: {e}"));
    let term = typecheck(&expr, &scope, &Sort::Second(ty), config).unwrap_or_else(|e| panic!("{src}: {e}"));
    (scope, term)
}

pub const MAYBE_NAT: &str = "<0:{}|1+:Nat>";
pub const BOOL: &str = "<true:{}|false:{}>";

/// Addition, multiplication and factorial by structural recursion, applied
/// to the literal `n`.
pub fn factorial_program(n: u32) -> String {
    format!(
        "letrec
           add (a : Nat, b : Nat) : Nat =
             fold val a with s : {MAYBE_NAT}.
               case val s of <0 u -> val b | 1+ p -> roll (val (tag 1+ p as {MAYBE_NAT}))>;
           mul (a : Nat, b : Nat) : Nat =
             fold val a with s : {MAYBE_NAT}.
               case val s of <0 u -> val 0 | 1+ p -> (val add) {{0 = val p, 1 = val b}}>;
           fact (n : Nat) : Nat =
             case unroll (val n) of
               < 0 u -> val 1
               | 1+ k -> let r = (val fact) {{0 = val k}} in (val mul) {{0 = val n, 1 = val r}} >
         in (val fact) {{0 = val {n}}}"
    )
}

/// Mutually recursive parity tests applied to the variable `x`.
pub fn parity_program(which: &str) -> String {
    format!(
        "letrec
           even (n : Nat) : {BOOL} =
             case unroll (val n) of
               < 0 u -> val (tag true {{}} as {BOOL}) | 1+ k -> (val odd) {{0 = val k}} >;
           odd (n : Nat) : {BOOL} =
             case unroll (val n) of
               < 0 u -> val (tag false {{}} as {BOOL}) | 1+ k -> (val even) {{0 = val k}} >
         in (val {which}) {{0 = val x}}"
    )
}

/// The arithmetic of the factorial program over naturals below `bound`:
/// any intermediate result that does not fit is absent.
pub fn reference_factorial(n: u32, bound: u32) -> Option<u32> {
    let add = |a: u32, b: u32| Some(a + b).filter(|s| *s < bound);
    let mul = |a: u32, b: u32| (0..a).try_fold(0, |acc, _| add(acc, b));
    (1..=n).try_fold(1, |acc, k| mul(k, acc))
}

pub fn reference_even(n: u32) -> bool {
    n % 2 == 0
}

pub fn option_model(config: &FragmentConfig, base: u32, bound: u32) -> Arc<Model> {
    Arc::new(Model::for_config(&config.clone().with_nat_bound(bound), Monad::Option, base))
}

pub fn closed_denotation(term: &Term<TypeExpr>, ty: TypeExpr, model: &Arc<Model>) -> Denotation {
    denote(term, &Sort::Second(ty), &Context::empty(), model).expect("denotation")
}

/// Run `step` at most `unrollings` times; absent if it has not finished.
pub fn unrolled<X: Clone, Y>(step: impl Fn(&X) -> Option<Step<Y, X>>, start: X, unrollings: usize) -> Option<Y> {
    let mut state = start;
    for _ in 0..unrollings {
        match step(&state)? {
            Step::Done(y) => return Some(y),
            Step::Continue(next) => state = next,
        }
    }
    None
}

/// Generate `count` loops with random initial states and bodies, and
/// compare each denotation with `|state| + 1` unrollings of the body's
/// step table. Returns the number of loops checked.
pub fn while_corpus_matches_unrolling(count: usize, seed: u64) -> Result<usize, String> {
    let config = FragmentConfig::new([Extension::While, Extension::Variants, Extension::Sequential, Extension::Naturals])
        .with_nat_bound(3);
    let m = Arc::new(Model::for_config(&config, Monad::Option, 2));
    let algebra = SemAlgebra::new(m.clone());
    let pool = vec![TypeExpr::base("b"), TypeExpr::Nat];
    let mut gen = Generator::new(&config, pool.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    let mut diverging = 0;
    while checked < count {
        let ctx = gen.random_context(1, &mut rng);
        let s = pool[rng.gen_range(0..2)].clone();
        let r = pool[rng.gen_range(0..2)].clone();
        let inner = ctx.concat(&Context::new(vec![s.clone()]));
        let Some(init) = gen.comp(&ctx, &s, 3, &mut rng) else { continue };
        let Some(body) = gen.comp(&inner, &TypeExpr::loop_step(s.clone(), r.clone()), 3, &mut rng) else { continue };
        let op = Arc::new(Construct::For(s.clone(), r.clone()).instantiate(&config).map_err(|e| e.to_string())?);
        let term = Term::Op(op, vec![init.clone(), body.clone()]);
        let den = denote(&term, &Sort::Second(r.clone()), &ctx, &m).map_err(|e| e.to_string())?;
        let init_den = denote(&init, &Sort::Second(s.clone()), &ctx, &m).map_err(|e| e.to_string())?;
        let Sem::Comp(body_fn) = semantic_map(&body, &inner, &algebra).map_err(|e| e.to_string())? else {
            return Err("loop body is not a computation".into());
        };
        let (Table::Comp(loop_cells), Table::Comp(init_cells)) = (&den.table, &init_den.table) else {
            return Err("loops denote computations".into());
        };
        let states = m.size(&s).map_err(|e| e.to_string())? as usize;
        for (i, (cell, start)) in loop_cells.iter().zip(init_cells).enumerate() {
            let p = m.point(&ctx, i);
            let step = |x: &Value| match body_fn(&[p.clone(), vec![x.clone()]].concat()) {
                Ok(Comp::Maybe(Some(Value::Variant(0, next)))) => Some(Step::Continue(*next)),
                Ok(Comp::Maybe(Some(Value::Variant(1, done)))) => Some(Step::Done(*done)),
                _ => None,
            };
            let expected = match start {
                Comp::Maybe(Some(s0)) => unrolled(step, s0.clone(), states + 1),
                _ => None,
            };
            if cell != &Comp::Maybe(expected.clone()) {
                let shown = modsyn_core::cbv::pretty(&term, ctx.len()).unwrap_or_default();
                return Err(format!("{shown} at point {i}: {cell:?} versus {expected:?}"));
            }
            diverging += usize::from(expected.is_none());
        }
        checked += 1;
    }
    if diverging == 0 {
        return Err("no loop in the corpus diverges".into());
    }
    Ok(checked)
}

#[derive(Clone, Copy, Debug)]
pub enum Rule {
    Const(u8),
    Copy(usize),
    Absent,
}

pub fn apply_rules(rules: &[Rule], t: &[Option<u8>]) -> Vec<Option<u8>> {
    rules
        .iter()
        .map(|r| match r {
            Rule::Const(v) => Some(*v),
            Rule::Copy(j) => t[*j],
            Rule::Absent => None,
        })
        .collect()
}

fn below(a: &[Option<u8>], b: &[Option<u8>]) -> bool {
    a.iter().zip(b).all(|(x, y)| x.is_none() || x == y)
}

/// Random monotone maps on tables of at most four two-valued entries: the
/// Kleene result must be fixed and below every fixed point found by brute
/// force.
pub fn kleene_corpus(count: usize, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let n = rng.gen_range(1..5);
        let rules: Vec<Rule> = (0..n)
            .map(|_| match rng.gen_range(0..3) {
                0 => Rule::Const(rng.gen_range(0..2)),
                1 => Rule::Copy(rng.gen_range(0..n)),
                _ => Rule::Absent,
            })
            .collect();
        let fix = kleene_fixpoint(n, |t| Ok(apply_rules(&rules, t))).map_err(|e| e.to_string())?;
        if apply_rules(&rules, &fix) != fix {
            return Err(format!("{rules:?}: {fix:?} is not fixed"));
        }
        let tables = (0..3usize.pow(n as u32)).map(|mut i| {
            (0..n)
                .map(|_| {
                    let d = i % 3;
                    i /= 3;
                    (d > 0).then(|| d as u8 - 1)
                })
                .collect::<Vec<_>>()
        });
        if let Some(other) = tables.filter(|t| apply_rules(&rules, t) == *t).find(|t| !below(&fix, t)) {
            return Err(format!("{rules:?}: {fix:?} is not below the fixed point {other:?}"));
        }
    }
    Ok(count)
}
