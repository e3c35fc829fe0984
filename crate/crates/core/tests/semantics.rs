mod common;

use std::sync::Arc;

use common::*;
use modsyn_core::cbv::{Extension, FragmentConfig, Row, TypeExpr};
use modsyn_core::semantics::*;
use modsyn_core::sorts::{Context, Sort};
use modsyn_core::terms::{variable_env, Term};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn b() -> TypeExpr {
    TypeExpr::base("b")
}

fn cfg(exts: &[Extension]) -> FragmentConfig {
    FragmentConfig::new(exts.iter().copied())
}

fn model(monad: Monad) -> Arc<Model> {
    Arc::new(Model::new(monad))
}

#[test]
fn type_sizes() {
    let option = Model::new(Monad::Option);
    assert_eq!(option.size(&TypeExpr::Record(Row::empty())).unwrap(), 1);
    assert_eq!(option.size(&TypeExpr::fun(b(), b())).unwrap(), 9);
    let bounded = Model::new(Monad::Option).with_nat_bound(3);
    let maybe_nat = TypeExpr::maybe(TypeExpr::Nat);
    assert_eq!(bounded.size(&maybe_nat).unwrap(), 4);
    assert_eq!(bounded.interpret_type(&maybe_nat).unwrap().len(), 4);
}

#[test]
fn variables_denote_projections() {
    let m = model(Monad::Identity);
    let ctx = Context::new(vec![b()]);
    let den = denote(&Term::Var(0), &Sort::First(b()), &ctx, &m).unwrap();
    assert_eq!(den, Denotation::projection(&ctx, 0, &m).unwrap());
    assert_eq!(den.table, Table::Value(vec![Value::Base(0), Value::Base(1)]));
}

#[test]
fn returning_a_variable_under_identity_is_the_identity() {
    let m = model(Monad::Identity);
    let (scope, term) = elaborate("val x", "x : b", b(), &FragmentConfig::default());
    let den = denote(&term, &Sort::Second(b()), &scope.context(), &m).unwrap();
    assert_eq!(den.table, Table::Comp(vec![Comp::Pure(Value::Base(0)), Comp::Pure(Value::Base(1))]));
}

#[test]
fn trivial_let_agrees_with_return_under_every_monad() {
    let config = cfg(&[Extension::Sequential]);
    let (scope, with_let) = elaborate("let y = val x in val y", "x : b", b(), &config);
    let (_, plain) = elaborate("val x", "x : b", b(), &config);
    for monad in Monad::BUNDLED {
        let m = model(monad);
        let ctx = scope.context();
        let lhs = denote(&with_let, &Sort::Second(b()), &ctx, &m).unwrap();
        let rhs = denote(&plain, &Sort::Second(b()), &ctx, &m).unwrap();
        assert_eq!(lhs.table, rhs.table, "{monad}");
    }
}

#[test]
fn monad_laws_hold_for_every_bundled_monad() {
    for monad in Monad::BUNDLED {
        for record in check_monad_laws(monad, BindVariant::Lawful, 1) {
            assert!(record.passed, "{record}");
            assert!(record.checked > 0, "{record}");
        }
    }
}

#[test]
fn a_bind_that_drops_its_parameter_breaks_naturality() {
    for monad in [Monad::Identity, Monad::Option] {
        let records = check_monad_laws(monad, BindVariant::DropsParameter, 1);
        let failed: Vec<_> = records.iter().filter(|r| !r.passed).collect();
        assert!(!failed.is_empty(), "{monad}");
        assert!(failed.iter().any(|r| r.law.contains("natural")), "{failed:?}");
        assert!(failed.iter().all(|r| r.witness.is_some()));
    }
}

#[test]
fn elgot_done_immediately() {
    let out = elgot_iterate(|_: &u8| Ok(Some(Step::<u8, u8>::Done(7))), 0).unwrap();
    assert_eq!(out, Some(7));
}

#[test]
fn elgot_self_loop_diverges() {
    let out = elgot_iterate(|x: &u8| Ok(Some(Step::<u8, u8>::Continue(*x))), 0).unwrap();
    assert_eq!(out, None);
}

#[test]
fn elgot_countdown_matches_unrolling() {
    let step = |x: &u8| Some(if *x == 0 { Step::Done("done") } else { Step::Continue(x - 1) });
    for start in 0..3u8 {
        let iterated = elgot_iterate(|x| Ok(step(x)), start).unwrap();
        assert_eq!(iterated, unrolled(step, start, 4));
        assert_eq!(iterated, Some("done"));
    }
}

#[test]
fn elgot_agrees_with_unrolling_on_random_step_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let states = rng.gen_range(1..6u8);
        let table: Vec<Option<Step<u8, u8>>> = (0..states)
            .map(|_| match rng.gen_range(0..4) {
                0 => None,
                1 => Some(Step::Done(rng.gen_range(0..3))),
                _ => Some(Step::Continue(rng.gen_range(0..states))),
            })
            .collect();
        let step = |x: &u8| table[*x as usize].clone();
        for start in 0..states {
            let iterated = elgot_iterate(|x| Ok(step(x)), start).unwrap();
            assert_eq!(iterated, unrolled(step, start, states as usize + 1), "{table:?} from {start}");
        }
    }
}

#[test]
fn kleene_of_identity_is_bottom() {
    let fix = kleene_fixpoint(4, |t: &[Option<u8>]| Ok(t.to_vec())).unwrap();
    assert_eq!(fix, vec![None; 4]);
}

#[test]
fn kleene_reports_a_non_monotone_map() {
    let flip = |t: &[Option<u8>]| Ok(vec![if t[0].is_none() { Some(0) } else { None }]);
    assert_eq!(kleene_fixpoint(1, flip), Err(SemError::NonConvergence { bound: 2 }));
}

#[test]
fn factorial_matches_the_reference_evaluator() {
    let config = FragmentConfig::full().with_nat_bound(25);
    let m = option_model(&config, 2, 25);
    assert_eq!(reference_factorial(3, 25), Some(6));
    assert_eq!(reference_factorial(4, 25), Some(24));
    assert_eq!(reference_factorial(5, 25), None);
    for n in [0, 3, 4, 5] {
        let (_, term) = elaborate(&factorial_program(n), "", TypeExpr::Nat, &config);
        let den = closed_denotation(&term, TypeExpr::Nat, &m);
        let expected = Comp::Maybe(reference_factorial(n, 25).map(Value::Nat));
        assert_eq!(den.table, Table::Comp(vec![expected]), "fact {n}");
    }
}

#[test]
fn parity_matches_the_reference_evaluator() {
    let config = FragmentConfig::full();
    for bound in [4, 25] {
        let m = option_model(&config, 2, bound);
        for which in ["even", "odd"] {
            let (scope, term) = elaborate(&parity_program(which), "x : Nat", TypeExpr::parse(BOOL).unwrap(), &config);
            let den = denote(&term, &Sort::Second(TypeExpr::parse(BOOL).unwrap()), &scope.context(), &m).unwrap();
            let Table::Comp(cells) = &den.table else { panic!("computation table") };
            for (n, cell) in cells.iter().enumerate() {
                let even = reference_even(n as u32);
                let truth = if which == "even" { even } else { !even };
                let expected = if truth { 0 } else { 1 };
                assert_eq!(cell, &Comp::Maybe(Some(Value::Variant(expected, Box::new(Value::unit())))), "{which} {n}");
            }
        }
    }
}

#[test]
fn infinite_loop_diverges() {
    let config = cfg(&[Extension::While, Extension::Variants]);
    let step = "<Cont:b|Done:b>";
    let (scope, term) = elaborate(&format!("for i = val x in val (tag Cont i as {step})"), "x : b", b(), &config);
    let den = denote(&term, &Sort::Second(b()), &scope.context(), &model(Monad::Option)).unwrap();
    assert_eq!(den.table, Table::Comp(vec![Comp::Maybe(None); 2]));
}

#[test]
fn while_needs_an_elgot_monad() {
    let config = cfg(&[Extension::While, Extension::Variants]);
    let step = "<Cont:b|Done:b>";
    let (scope, term) = elaborate(&format!("for i = val x in val (tag Done i as {step})"), "x : b", b(), &config);
    let err = denote(&term, &Sort::Second(b()), &scope.context(), &model(Monad::Identity)).unwrap_err();
    assert_eq!(err, SemError::UnsupportedCapability { extension: Extension::While, monad: Monad::Identity });
    assert!(Model::new(Monad::State { states: 2 }).supports(&FragmentConfig::full()).is_err());
    assert!(Model::new(Monad::Option).supports(&FragmentConfig::full()).is_ok());
}

#[test]
fn roll_overflow_depends_on_partiality() {
    let config = cfg(&[Extension::Naturals]);
    let (scope, term) = elaborate(&format!("roll (val (tag 1+ x as {MAYBE_NAT}))"), "x : Nat", TypeExpr::Nat, &config);
    let bounded = |monad| Arc::new(Model::new(monad).with_nat_bound(3));
    let den = denote(&term, &Sort::Second(TypeExpr::Nat), &scope.context(), &bounded(Monad::Option)).unwrap();
    let expected = vec![Comp::Maybe(Some(Value::Nat(1))), Comp::Maybe(Some(Value::Nat(2))), Comp::Maybe(None)];
    assert_eq!(den.table, Table::Comp(expected));
    let err = denote(&term, &Sort::Second(TypeExpr::Nat), &scope.context(), &bounded(Monad::Identity)).unwrap_err();
    assert!(matches!(err, SemError::RollOverflow { bound: 3, .. }));
}

#[test]
fn literals_outside_the_bound_are_errors() {
    let config = cfg(&[Extension::Naturals]);
    let (_, term) = elaborate("val 7", "", TypeExpr::Nat, &config);
    let err = denote(&term, &Sort::Second(TypeExpr::Nat), &Context::empty(), &model(Monad::Option)).unwrap_err();
    assert_eq!(err, SemError::LiteralOutOfRange { literal: 7, bound: 4 });
}

#[test]
fn while_loops_match_unrolling_on_generated_programs() {
    assert_eq!(while_corpus_matches_unrolling(60, 21), Ok(60));
}

#[test]
fn kleene_finds_the_least_fixed_point() {
    assert_eq!(kleene_corpus(100, 9), Ok(100));
}

#[test]
fn compatibility_of_the_core_fragments() {
    for monad in [Monad::Identity, Monad::Option] {
        for fragment in [None, Some(Extension::Sequential), Some(Extension::Functions)] {
            let config = cfg(&fragment.into_iter().collect::<Vec<_>>());
            let algebra = SemAlgebra::new(Arc::new(Model::for_config(&config, monad, 2)));
            let records = check_compatibility(fragment, &config, &algebra, &CompatBounds::default(), 3);
            assert!(!records.is_empty());
            for r in records {
                assert!(r.passed, "{r}");
            }
        }
    }
}

#[test]
fn corrupted_clauses_are_caught_with_a_witness() {
    for fragment in [None, Some(Extension::Sequential), Some(Extension::Functions)] {
        let config = cfg(&fragment.into_iter().collect::<Vec<_>>());
        let m = Arc::new(Model::for_config(&config, Monad::Option, 2));
        let algebra = SemAlgebra::mutated(m, Mutation::for_fragment(fragment));
        let records = check_compatibility(fragment, &config, &algebra, &CompatBounds::default(), 3);
        let failed: Vec<_> = records.iter().filter(|r| !r.passed).collect();
        assert!(!failed.is_empty(), "{fragment:?}");
        assert!(failed[0].witness.as_deref().unwrap_or("").contains("point"));
    }
}

#[test]
fn semantic_action_axioms() {
    for monad in [Monad::Identity, Monad::Option, Monad::Powerset] {
        for r in check_action_axioms(&model(monad), 60, 4) {
            assert!(r.passed, "{r}");
        }
    }
}

#[test]
fn lemma_for_variables_and_identity() {
    let config = cfg(&[Extension::Sequential, Extension::Functions]);
    let m = model(Monad::Option);
    let algebra = SemAlgebra::new(m.clone());
    let ctx = Context::new(vec![b(), b()]);
    let env = variable_env(&ctx);
    let (_, term) = elaborate("let y = val x in val z", "x : b, z : b", b(), &config);
    assert!(check_substitution_lemma(&term, &Sort::Second(b()), &env, &algebra).unwrap().is_ok());
    assert!(check_substitution_lemma(&Term::Var(1), &Sort::First(b()), &env, &algebra).unwrap().is_ok());
}

#[test]
fn lemma_on_the_smallest_fragment_exhaustively() {
    let config = FragmentConfig::default();
    let algebra = SemAlgebra::new(model(Monad::Identity));
    let record = subst_lemma_exhaustive(&config, &algebra, 3, 2, 2, 0);
    assert!(record.passed, "{record}");
    assert!(record.checked > 10);
}

#[test]
fn lemma_on_random_full_programs() {
    let config = FragmentConfig::full();
    let algebra = SemAlgebra::new(Arc::new(Model::for_config(&config, Monad::Option, 2)));
    let corpus = LemmaCorpus { count: 30, ..Default::default() };
    let record = subst_lemma_random(&config, &algebra, &corpus);
    assert!(record.passed, "{record}");
}

#[test]
fn mutated_algebra_breaks_the_lemma() {
    let config = cfg(&[Extension::Sequential]);
    let m = Arc::new(Model::for_config(&config, Monad::Option, 2));
    let algebra = SemAlgebra::mutated(m, Mutation::for_fragment(None));
    let record = subst_lemma_random(&config, &algebra, &LemmaCorpus { count: 50, ..Default::default() });
    assert!(!record.passed, "{record}");
}
