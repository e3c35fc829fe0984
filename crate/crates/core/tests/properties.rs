mod common;

use std::sync::Arc;

use modsyn_core::cbv::{
    build_operator_table, Extension, parse_program, pretty_named, random_program, random_subst, typecheck, FragmentConfig, GenParams, Scope,
    TypeExpr,
};
use modsyn_core::semantics::{rename_denotation, semantic_map, Denotation, Model, Monad, SemAlgebra};
use modsyn_core::sorts::{enumerate_renamings, Context, Renaming};
use modsyn_core::terms::{parse_term, rename, renaming_env, substitute, substitute_env, variable_env, Term};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::shifting_substitute;

const PARAMS: GenParams = GenParams { depth: 4, max_ctx: 3, pool_depth: 2 };

fn config(mask: u8) -> FragmentConfig {
    FragmentConfig::all().into_iter().find(|c| c.mask() == mask).expect("every 7-bit mask is a configuration")
}

fn program(mask: u8, seed: u64) -> (FragmentConfig, Context<TypeExpr>, Term<TypeExpr>, ChaCha8Rng) {
    let config = config(mask);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (ctx, _, term) = random_program(&config, &PARAMS, &mut rng);
    (config, ctx, term, rng)
}

/// A renaming into `target` from a shuffled copy of it padded with extra
/// entries of the same types.
fn random_renaming(target: &Context<TypeExpr>, rng: &mut ChaCha8Rng) -> Renaming<TypeExpr> {
    let mut source: Vec<TypeExpr> = target.entries().to_vec();
    for _ in 0..rng.gen_range(0..=2) {
        if let Some(t) = target.entries().choose(rng) {
            source.push(t.clone());
        }
    }
    source.shuffle(rng);
    let map = target
        .iter()
        .map(|t| {
            let candidates: Vec<usize> = (0..source.len()).filter(|&i| &source[i] == t).collect();
            *candidates.choose(rng).expect("every target type occurs in the source")
        })
        .collect();
    Renaming::new(Context::new(source), target.clone(), map).expect("types agree by construction")
}

fn small_context() -> impl Strategy<Value = Context<String>> {
    prop::collection::vec(prop::sample::select(vec!["a".to_string(), "b".to_string()]), 0..4).prop_map(Context::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn renaming_composition_is_a_category(a in small_context(), b in small_context(), c in small_context(), d in small_context()) {
        let ab = enumerate_renamings(&a, &b);
        let bc = enumerate_renamings(&b, &c);
        let cd = enumerate_renamings(&c, &d);
        for f in ab.iter().take(4) {
            prop_assert_eq!(&Renaming::identity(&a).compose(f).unwrap(), f);
            prop_assert_eq!(&f.compose(&Renaming::identity(&b)).unwrap(), f);
            for g in bc.iter().take(4) {
                for h in cd.iter().take(4) {
                    let left = f.compose(g).unwrap().compose(h).unwrap();
                    let right = f.compose(&g.compose(h).unwrap()).unwrap();
                    prop_assert_eq!(left, right);
                }
            }
        }
    }

    #[test]
    fn renaming_is_substitution_by_variables(mask in 0u8..128, seed in any::<u64>()) {
        let (_, ctx, term, mut rng) = program(mask, seed);
        let r = random_renaming(&ctx, &mut rng);
        prop_assert_eq!(rename(&term, &r), substitute(&term, &renaming_env(&r)).unwrap());
    }

    #[test]
    fn substitution_agrees_with_the_shifting_oracle(mask in 0u8..128, seed in any::<u64>()) {
        let (config, ctx, term, mut rng) = program(mask, seed);
        let env = random_subst(&config, &ctx, &PARAMS, &mut rng);
        prop_assert_eq!(substitute(&term, &env).unwrap(), shifting_substitute(&term, &env));
    }

    #[test]
    fn substitution_is_associative_and_unital(mask in 0u8..128, seed in any::<u64>()) {
        let (config, ctx, term, mut rng) = program(mask, seed);
        let first = random_subst(&config, &ctx, &PARAMS, &mut rng);
        let second = random_subst(&config, &first.target, &PARAMS, &mut rng);
        prop_assert_eq!(&substitute(&term, &variable_env(&ctx)).unwrap(), &term);
        let stepwise = substitute(&substitute(&term, &first).unwrap(), &second).unwrap();
        let composite = substitute(&term, &substitute_env(&first, &second).unwrap()).unwrap();
        prop_assert_eq!(stepwise, composite);
        let unit_left = substitute_env(&variable_env(&ctx), &first).unwrap();
        prop_assert_eq!(unit_left.entries, first.entries);
    }

    #[test]
    fn canonical_text_round_trips(mask in 0u8..128, seed in any::<u64>()) {
        let (config, _, term, _) = program(mask, seed);
        let table = build_operator_table(&config);
        prop_assert_eq!(parse_term(&term.to_string(), &table).unwrap(), term);
    }

    #[test]
    fn surface_printing_round_trips(mask in 0u8..128, seed in any::<u64>()) {
        let config = config(mask);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (ctx, sort, term) = random_program(&config, &PARAMS, &mut rng);
        let names: Vec<String> = (0..ctx.len()).map(|i| format!("v{i}")).collect();
        let scope_text: Vec<String> = names.iter().zip(ctx.iter()).map(|(n, t)| format!("{n} : {t}")).collect();
        let scope = Scope::parse(&scope_text.join(", ")).unwrap();
        let shown = pretty_named(&term, &names).unwrap();
        let back = typecheck(&parse_program(&shown).unwrap(), &scope, &sort, &config).unwrap();
        prop_assert_eq!(back, term, "{}", shown);
    }

    #[test]
    fn denotation_commutes_with_renaming(seed in any::<u64>()) {
        let config = FragmentConfig::new([Extension::Sequential, Extension::Functions, Extension::Variants]);
        let model = Arc::new(Model::for_config(&config, Monad::Option, 2));
        let algebra = SemAlgebra::new(model.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (ctx, sort, term) = random_program(&config, &GenParams { depth: 3, max_ctx: 2, pool_depth: 1 }, &mut rng);
        let r = random_renaming(&ctx, &mut rng);
        prop_assume!(model.context_size(r.source()).map_or(false, |n| n <= 256));
        let denote = |t: &Term<TypeExpr>, c: &Context<TypeExpr>| {
            semantic_map(t, c, &algebra).and_then(|sem| Denotation::materialize(&sem, sort.clone(), c.clone(), &model))
        };
        let Ok(original) = denote(&term, &ctx) else { return Err(TestCaseError::reject("no denotation")) };
        let renamed = denote(&rename(&term, &r), r.source()).unwrap();
        prop_assert_eq!(renamed, rename_denotation(&original, &r, &model).unwrap());
    }
}
