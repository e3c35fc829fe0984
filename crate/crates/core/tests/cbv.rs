use std::collections::BTreeSet;

use modsyn_core::cbv::{
    build_operator_table, menu_for, menu_row, parse_program, pretty, random_program, synthesize, typecheck, CbvError,
    Construct, Extension, ExprKind, FragmentConfig, GenParams, Need, Row, Scope, TypeExpr, BASE_ROW,
};
use modsyn_core::signature::Argument;
use modsyn_core::sorts::{Context, Sort};
use modsyn_core::terms::{Holes, Term};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn b() -> TypeExpr {
    TypeExpr::base("b")
}

fn cfg(exts: &[Extension]) -> FragmentConfig {
    FragmentConfig::new(exts.iter().copied())
}

fn elaborate(src: &str, scope: &str, sort: Sort<TypeExpr>, config: &FragmentConfig) -> Result<Term<TypeExpr>, CbvError> {
    let expr = parse_program(src)?;
    typecheck(&expr, &Scope::parse(scope)?, &sort, config)
}

#[test]
fn variable_elaborates_to_position_zero() {
    let t = elaborate("x", "x : b", Sort::First(b()), &FragmentConfig::default()).unwrap();
    assert_eq!(t, Term::Var(0));
}

#[test]
fn val_of_variable() {
    let t = elaborate("val x", "x : b", Sort::Second(b()), &FragmentConfig::default()).unwrap();
    assert_eq!(t.to_string(), "val<b>[#0]");
}

#[test]
fn identity_lambda() {
    let config = cfg(&[Extension::Functions]);
    let t = elaborate("\\x : b. val x", "x : b", Sort::First(TypeExpr::fun(b(), b())), &config).unwrap();
    assert_eq!(t.to_string(), "lam<b;b>[val<b>[#1]]");
}

#[test]
fn shadowing_picks_nearest_binder() {
    let config = cfg(&[Extension::Sequential]);
    let t = elaborate("let x = val x in val x", "x : b", Sort::Second(b()), &config).unwrap();
    assert_eq!(t.to_string(), "let<b;b>[val<b>[#0],val<b>[#1]]");
}

#[test]
fn parse_val_is_single_production() {
    let e = parse_program("val x").unwrap();
    match e.kind {
        ExprKind::Val(inner) => assert!(matches!(inner.kind, ExprKind::Var(ref n) if n == "x")),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn sequencing_round_trips() {
    let config = cfg(&[Extension::Sequential]);
    let src = "let y = val x; z = val y in val z";
    let t = elaborate(src, "x : b", Sort::Second(b()), &config).unwrap();
    let printed = pretty(&t, 1).unwrap();
    let again = elaborate(&printed, "x0 : b", Sort::Second(b()), &config).unwrap();
    assert_eq!(t, again);
}

#[test]
fn base_config_has_only_base_types() {
    let config = FragmentConfig::default();
    assert!(config.admits(&b()));
    assert!(!config.admits(&TypeExpr::fun(b(), b())));
    assert!(!config.admits(&TypeExpr::Nat));
    assert!(!config.admits(&TypeExpr::Record(Row::empty())));
}

#[test]
fn maybe_under_naturals_is_fused_variant() {
    let config = cfg(&[Extension::Naturals]);
    let maybe = config.fulfill().maybe(TypeExpr::Nat).unwrap();
    assert_eq!(maybe.to_string(), "<0:{}|1+:Nat>");
    assert!(config.admits(&maybe));
    assert!(!config.admits(&TypeExpr::Variant(Row::numbered(&[b(), b()]))));
}

#[test]
fn rec_requirement_fulfilled_by_function_on_record() {
    let config = cfg(&[Extension::Recursion, Extension::Functions, Extension::Records]);
    let f = config.fulfill().rec_function(&[b(), TypeExpr::base("b")], b()).unwrap();
    assert_eq!(f, TypeExpr::fun(TypeExpr::Record(Row::numbered(&[b(), b()])), b()));
    assert!(!config.fused_call());
    assert!(cfg(&[Extension::Recursion]).fused_call());
}

#[test]
fn unfulfillable_need_reports_the_extension() {
    let config = FragmentConfig::default();
    assert!(matches!(config.fulfill().nat(), Err(CbvError::NeedUnfulfilled { .. })));
}

#[test]
fn there_are_128_configs() {
    let all = FragmentConfig::all();
    assert_eq!(all.len(), 128);
    let names: BTreeSet<_> = all.iter().map(|c| c.name()).collect();
    assert_eq!(names.len(), 128);
}

#[test]
fn menu_rows() {
    let base = menu_for(&FragmentConfig::default());
    assert_eq!(base.len(), 1);
    assert_eq!(base[0].model, "strong monad over a Cartesian category");
    assert_eq!(BASE_ROW.model, base[0].model);
    let row = menu_row(Extension::While);
    assert!(row.needs.contains(&Need::LoopStep));
    assert!(Need::LoopStep.describe().contains("Done"));
    assert!(Need::LoopStep.describe().contains("Cont"));
}

#[test]
fn base_table_only_has_val() {
    let config = FragmentConfig::default();
    let table = build_operator_table(&config);
    let op = table.lookup("val<b>").unwrap();
    assert_eq!(op.args, vec![Argument::plain(Sort::First(b()))]);
    assert!(table.lookup("lam<b;b>").is_err());
    assert!(table.lookup("let<b;b>").is_err());
}

#[test]
fn function_operators_have_expected_binders() {
    let config = cfg(&[Extension::Functions]);
    let table = build_operator_table(&config);
    let lam = table.lookup("lam<b;b>").unwrap();
    assert_eq!(lam.result, Sort::First(TypeExpr::fun(b(), b())));
    assert_eq!(lam.args, vec![Argument::new(Context::new(vec![b()]), Sort::Second(b()))]);
    let app = table.lookup("app<b;b>").unwrap();
    assert_eq!(app.result, Sort::Second(b()));
    assert_eq!(
        app.args,
        vec![Argument::plain(Sort::Second(TypeExpr::fun(b(), b()))), Argument::plain(Sort::Second(b()))]
    );
}

#[test]
fn let_operator_has_staircase_binders() {
    let config = cfg(&[Extension::Sequential]).with_base_types(&["b", "c"]);
    let table = build_operator_table(&config);
    let c = TypeExpr::base("c");
    let op = table.lookup("let<b,c,b;c>").unwrap();
    assert_eq!(op.args.len(), 4);
    let binders: Vec<_> = op.args.iter().map(|a| a.binder.entries().to_vec()).collect();
    assert_eq!(binders, vec![vec![], vec![b()], vec![b(), c.clone()], vec![b(), c.clone(), b()]]);
    assert_eq!(op.args[3].sort, Sort::Second(c));
}

#[test]
fn deep_instantiation_is_rejected() {
    let config = cfg(&[Extension::Functions]);
    let table = build_operator_table(&config);
    let deep = "lam<(b->(b->(b->b)));b>";
    assert!(table.lookup(deep).is_err());
}

#[test]
fn every_construct_maps_to_one_rule() {
    let full = FragmentConfig::full();
    let samples = [
        Construct::Val(b()),
        Construct::Let(vec![b()], b()),
        Construct::Lam(b(), b()),
        Construct::App(b(), b()),
        Construct::ValueRecord(Row::empty()),
        Construct::CompRecord(Row::empty()),
        Construct::RecordMatch(Row::empty(), b()),
        Construct::ValueTag(Row::numbered(&[b()]), "0".into()),
        Construct::CompTag(Row::numbered(&[b()]), "0".into()),
        Construct::VariantMatch(Row::numbered(&[b()]), b()),
        Construct::Lit(0),
        Construct::Roll,
        Construct::Unroll,
        Construct::Fold(b()),
        Construct::For(b(), b()),
        Construct::LetRec(vec![TypeExpr::rec_function(&[b()], b())], b()),
        Construct::Call(Row::numbered(&[b()]), b()),
    ];
    let mut rules = BTreeSet::new();
    for c in &samples {
        assert!(rules.insert(c.rule()), "rule {} used twice", c.rule());
        let config = if matches!(c, Construct::Call(..)) { cfg(&[Extension::Recursion]) } else { full.clone() };
        let op = c.instantiate(&config).unwrap();
        assert_eq!(Construct::parse_label(&op.label).unwrap().as_ref(), Some(c));
    }
    assert_eq!(rules.len(), samples.len());
}

#[test]
fn errors_carry_locations() {
    let base = FragmentConfig::default();
    let unknown = elaborate("val y", "x : b", Sort::Second(b()), &base).unwrap_err();
    assert_eq!(unknown, CbvError::UnknownVariable { name: "y".into(), at: 4 });

    let mismatch = elaborate("x", "x : b", Sort::Second(b()), &base).unwrap_err();
    assert!(matches!(mismatch, CbvError::SortMismatch { at: 0, .. }));

    let disabled = elaborate("let y = val x in val y", "x : b", Sort::Second(b()), &base).unwrap_err();
    assert!(matches!(disabled, CbvError::DisabledConstruct { extension: Extension::Sequential, at: 0 }));

    let syntax = parse_program("let = in").unwrap_err();
    assert!(matches!(syntax, CbvError::Syntax { .. }));
    assert!(syntax.location().is_some());

    let unknown_base = elaborate("\\x : q. val x", "", Sort::First(TypeExpr::fun(b(), b())), &cfg(&[Extension::Functions]))
        .unwrap_err();
    assert!(matches!(unknown_base, CbvError::UnknownBaseType { .. }));
}

#[test]
fn record_fields_are_canonically_ordered() {
    let config = cfg(&[Extension::Records]).with_base_types(&["b", "c"]);
    let (_, ty) = synthesize(&parse_program("{m = y, l = x}").unwrap(), &Scope::parse("x : b, y : c").unwrap(), &config)
        .unwrap();
    assert_eq!(ty, Sort::First(TypeExpr::parse("{l:b,m:c}").unwrap()));
}

#[test]
fn letrec_factorial_typechecks() {
    let config = FragmentConfig::full();
    let src = "letrec fact (n : Nat) : Nat =
          case unroll (val n) of
            < 0 u -> val 1
            | 1+ k -> let r = (val fact) {0 = val k} in fold val r with a : <0:{}|1+:Nat>. val n >
        in (val fact) {0 = val x}";
    let expr = parse_program(src).unwrap();
    let res = typecheck(&expr, &Scope::parse("x : Nat").unwrap(), &Sort::Second(TypeExpr::Nat), &config);
    assert!(res.is_ok(), "{res:?}");
}

#[test]
fn generated_programs_round_trip_through_the_printer() {
    let params = GenParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for config in FragmentConfig::all().iter().step_by(5) {
        for _ in 0..4 {
            let (ctx, sort, term) = random_program(config, &params, &mut rng);
            term.check(&sort, &ctx, &Holes::new()).unwrap();
            let printed = pretty(&term, ctx.len()).unwrap();
            let scope = Scope::positional(&ctx);
            let expr = parse_program(&printed).unwrap_or_else(|e| panic!("{printed}: {e}"));
            let back = typecheck(&expr, &scope, &sort, config).unwrap_or_else(|e| panic!("{}\n{printed}\n{e}", config.name()));
            assert_eq!(back, term, "{printed}");
            checked += 1;
        }
    }
    assert!(checked >= 50);
}

#[test]
fn monotone_under_larger_configs_without_fused_shapes() {
    let params = GenParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let small = cfg(&[Extension::Sequential, Extension::Functions]);
    let large = cfg(&[Extension::Sequential, Extension::Functions, Extension::Records, Extension::Variants]);
    for _ in 0..30 {
        let (ctx, sort, term) = random_program(&small, &params, &mut rng);
        let printed = pretty(&term, ctx.len()).unwrap();
        let expr = parse_program(&printed).unwrap();
        let back = typecheck(&expr, &Scope::positional(&ctx), &sort, &large).unwrap();
        assert_eq!(back, term);
    }
}
