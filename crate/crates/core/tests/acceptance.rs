//! One pass/fail line per acceptance criterion. Run with
//! `cargo test -p modsyn-core --test acceptance -- --nocapture` to see them.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use modsyn_core::cbv::{
    check_meta_laws, check_term_laws, holed_corpus, term_corpus, Extension, FragmentConfig, TermCorpus, TypeExpr,
};
use modsyn_core::presheaf::{
    check_action_axioms as presheaf_action_axioms, check_skew, random_homogeneous, random_second_class,
    skew_empty_witness, tensor, AssociatorVariant, ContextSpace, FinStructure, Shape, SkewObject, Triple,
};
use modsyn_core::report::LawRecord;
use modsyn_core::semantics::*;
use modsyn_core::sorts::{Context, Sort, SortingSystem};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TERMS_PER_CONFIG: usize = 200;
const TERM_LAW_BUDGET: Duration = Duration::from_secs(300);
const LEMMA_CASES_PER_CONFIG: usize = 100;
const LEMMA_NAT_BOUND: u32 = 4;
const EXHAUSTIVE_DEPTH: usize = 3;
const EXHAUSTIVE_CTX: usize = 2;
const MAX_BASE_SIZE: u32 = 3;
const RANDOM_STRUCTURES: usize = 20;
const GENERATOR_PAIRS: usize = 100;
const WHILE_PROGRAMS: usize = 50;
const FIXPOINT_BOUND: u32 = 25;
const HOLED_TERMS: usize = 200;
const SEED: u64 = 2024;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn from_records(records: &[LawRecord], summary: String) -> Self {
        match records.iter().find(|r| !r.passed) {
            Some(r) => Outcome { passed: false, detail: r.to_string() },
            None => Outcome { passed: true, detail: summary },
        }
    }

    fn fail(detail: impl Into<String>) -> Self {
        Outcome { passed: false, detail: detail.into() }
    }
}

fn corpus_spec() -> TermCorpus {
    TermCorpus { count: TERMS_PER_CONFIG, seed: SEED, ..Default::default() }
}

fn configs() -> Vec<FragmentConfig> {
    FragmentConfig::all().into_iter().map(|c| c.with_base_types(&["b", "c"])).collect()
}

fn term_laws() -> Outcome {
    let start = Instant::now();
    let mut records = Vec::new();
    let mut terms = 0;
    for config in configs() {
        let corpus = term_corpus(&config, &corpus_spec());
        terms += corpus.len();
        records.extend(check_term_laws(&config, &corpus));
    }
    let elapsed = start.elapsed();
    if elapsed > TERM_LAW_BUDGET {
        return Outcome::fail(format!("took {elapsed:.1?}, budget {TERM_LAW_BUDGET:?}"));
    }
    Outcome::from_records(&records, format!("{terms} terms over 128 configs in {elapsed:.1?}"))
}

fn oracle_equivalence() -> Outcome {
    let mut compared = 0;
    for config in configs() {
        for item in term_corpus(&config, &corpus_spec()) {
            let mut term = item.term.clone();
            for env in [&item.first, &item.second] {
                let folded = modsyn_core::terms::substitute(&term, env).expect("well-scoped");
                let shifted = shifting_substitute(&term, env);
                if folded != shifted {
                    return Outcome::fail(format!("{}: {term} gives {folded} versus {shifted}", config.name()));
                }
                compared += 1;
                term = folded;
            }
        }
    }
    Outcome { passed: true, detail: format!("{compared} substitutions agree with the shifting oracle") }
}

fn exhaustive_configs() -> Vec<FragmentConfig> {
    use Extension::*;
    [vec![], vec![Sequential], vec![Functions], vec![Sequential, Functions]]
        .into_iter()
        .map(FragmentConfig::new)
        .collect()
}

fn substitution_lemma() -> Outcome {
    let mut records = Vec::new();
    for config in exhaustive_configs() {
        for monad in [Monad::Identity, Monad::Option] {
            for size in 1..=MAX_BASE_SIZE {
                let algebra = SemAlgebra::new(Arc::new(Model::for_config(&config, monad, size)));
                records.push(subst_lemma_exhaustive(&config, &algebra, EXHAUSTIVE_DEPTH, EXHAUSTIVE_CTX, 2, SEED));
            }
        }
    }
    let exhaustive: u64 = records.iter().map(|r| r.checked).sum();
    let exhaustive_masks: Vec<u8> = exhaustive_configs().iter().map(FragmentConfig::mask).collect();
    let mut random = 0;
    for config in FragmentConfig::all().into_iter().filter(|c| !exhaustive_masks.contains(&c.mask())) {
        let config = config.with_nat_bound(LEMMA_NAT_BOUND);
        let algebra = SemAlgebra::new(Arc::new(Model::for_config(&config, Monad::Option, 2)));
        let corpus = LemmaCorpus { count: LEMMA_CASES_PER_CONFIG, seed: SEED ^ u64::from(config.mask()), ..Default::default() };
        let record = subst_lemma_random(&config, &algebra, &corpus);
        random += record.checked;
        records.push(record);
    }
    Outcome::from_records(&records, format!("{exhaustive} exhaustive and {random} random instances"))
}

fn monad_laws() -> Outcome {
    let records: Vec<LawRecord> =
        Monad::BUNDLED.iter().flat_map(|&m| check_monad_laws(m, BindVariant::Lawful, SEED)).collect();
    let checked: u64 = records.iter().map(|r| r.checked).sum();
    Outcome::from_records(&records, format!("{} laws, {checked} instances, six monads", records.len()))
}

fn compatibility() -> Outcome {
    let elementwise = [None, Some(Extension::Sequential), Some(Extension::Functions)];
    let mut records = Vec::new();
    for fragment in elementwise {
        let config = FragmentConfig::new(fragment);
        for monad in [Monad::Identity, Monad::Option] {
            let algebra = SemAlgebra::new(Arc::new(Model::for_config(&config, monad, 2)));
            records.extend(check_compatibility(fragment, &config, &algebra, &CompatBounds::default(), SEED));
        }
    }
    if let Some(r) = records.iter().find(|r| !r.passed) {
        return Outcome::fail(r.to_string());
    }
    let checked: u64 = records.iter().map(|r| r.checked).sum();
    let mut caught = Vec::new();
    for fragment in std::iter::once(None).chain(Extension::ALL.into_iter().map(Some)) {
        let config = FragmentConfig::new(fragment).with_nat_bound(LEMMA_NAT_BOUND);
        let model = Arc::new(Model::for_config(&config, Monad::Option, 2));
        let algebra = SemAlgebra::mutated(model, Mutation::for_fragment(fragment));
        let failed = if elementwise.contains(&fragment) {
            check_compatibility(fragment, &config, &algebra, &CompatBounds::default(), SEED).into_iter().find(|r| !r.passed)
        } else {
            let corpus = LemmaCorpus { count: 2000, seed: SEED, ..Default::default() };
            Some(subst_lemma_random(&config, &algebra, &corpus)).filter(|r| !r.passed)
        };
        match failed {
            Some(r) if r.witness.is_some() => caught.push(config.name()),
            _ => return Outcome::fail(format!("the corrupted {} clause went unnoticed", Mutation::for_fragment(fragment).rule)),
        }
    }
    Outcome { passed: true, detail: format!("{checked} instances; corrupted clauses caught in {}", caught.join(" ")) }
}

fn two_class_space() -> Arc<ContextSpace> {
    ContextSpace::new(SortingSystem::new(vec!["b".into()], vec!["c".into()]).expect("sorting"), 2)
}

fn presheaf_laws() -> Outcome {
    let space = two_class_space();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut records = Vec::new();
    for _ in 0..RANDOM_STRUCTURES {
        let p = random_second_class(&space, 3, &mut rng).expect("structure");
        let [q, l, m] = [(); 3].map(|_| random_homogeneous(&space, 3, &mut rng).expect("structure"));
        records.extend(presheaf_action_axioms(&p, &q, &l, &m, AssociatorVariant::Honest));
        let objects: Vec<SkewObject> = (0..4)
            .map(|_| SkewObject {
                hom: random_homogeneous(&space, 3, &mut rng).expect("structure"),
                snd: random_second_class(&space, 3, &mut rng).expect("structure"),
            })
            .collect();
        records.extend(check_skew(&objects[0], &objects[1], &objects[2], &objects[3]));
    }
    if let Some(r) = records.iter().find(|r| !r.passed) {
        return Outcome::fail(r.to_string());
    }
    let witness = match skew_empty_witness(&space) {
        Ok(w) => w,
        Err(e) => return Outcome::fail(e),
    };
    let top = Arc::new(FinStructure::terminal(space.clone(), vec![Sort::First("b".into())]));
    let empty = Arc::new(FinStructure::empty(space.clone(), vec![Sort::Second("c".into())]));
    let product = tensor(&empty, &top).expect("tensor");
    if product.structure.total_elements() != 0 || !witness.contains('∅') {
        return Outcome::fail(format!("left unitor witness not reproduced: {witness}"));
    }
    Outcome { passed: true, detail: format!("{} law records on {RANDOM_STRUCTURES} structures; {witness}", records.len()) }
}

fn coend_quotient() -> Outcome {
    let space = two_class_space();
    let c = Sort::Second("c".to_string());
    let b = Sort::First("b".to_string());
    let shapes = [Shape::new("app", c.clone(), vec!["b".into(), "b".into()]), Shape::new("k", c.clone(), vec![])];
    let terms = Arc::new(FinStructure::polynomial(space.clone(), vec![c], &shapes).expect("polynomial"));
    let values = Arc::new(
        modsyn_core::presheaf::from_atoms(&space, &b, &[modsyn_core::presheaf::Atom::Const, modsyn_core::presheaf::Atom::Var("b".into())])
            .expect("values"),
    );
    let pq = tensor(&terms, &values).expect("tensor");
    let ctx = |names: &[&str]| space.context_index(&Context::new(names.iter().map(|s| s.to_string()).collect())).expect("context");
    let (empty, one, two) = (ctx(&[]), ctx(&["b"]), ctx(&["b", "b"]));
    let find = |p: &FinStructure, ci: usize, label: &str| p.cell(0, ci).iter().position(|l| l.ends_with(label)).expect("element");
    let (v, w) = (find(&values, two, "v1(0)"), find(&values, two, "v1(1)"));
    let class = |mid, elem, env: Vec<usize>| pq.class_of(0, two, &Triple { mid, elem, env }).expect("class");
    let merged = class(two, find(&terms, two, "app(0,1)"), vec![v, v]) == class(one, find(&terms, one, "app(0,0)"), vec![v]);
    let weakened = class(one, find(&terms, one, "k()"), vec![w]) == class(empty, find(&terms, empty, "k()"), vec![]);
    let permuted = class(two, find(&terms, two, "app(0,1)"), vec![v, w]) == class(two, find(&terms, two, "app(1,0)"), vec![w, v]);
    if !(merged && weakened && permuted) {
        return Outcome::fail(format!("merging {merged}, weakening {weakened}, permutation {permuted}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut confirmed = 0;
    for ci in 0..space.contexts().len() {
        let gens = pq.generators(0, ci);
        for (a, b) in gens.choose_multiple(&mut rng, GENERATOR_PAIRS) {
            let (ca, cb) = (pq.class_of(0, ci, a).expect("class"), pq.class_of(0, ci, b).expect("class"));
            if ca != cb {
                return Outcome::fail(format!("generator pair {a:?} ~ {b:?} split"));
            }
            confirmed += 1;
        }
    }
    if confirmed < GENERATOR_PAIRS {
        return Outcome::fail(format!("only {confirmed} generator pairs"));
    }
    Outcome { passed: true, detail: format!("three identifications hold; {confirmed} generator pairs symmetric") }
}

fn elgot_and_fixpoints() -> Outcome {
    let loops = match while_corpus_matches_unrolling(WHILE_PROGRAMS, SEED) {
        Ok(n) => n,
        Err(w) => return Outcome::fail(w),
    };
    let config = FragmentConfig::full().with_nat_bound(FIXPOINT_BOUND);
    let model = option_model(&config, 2, FIXPOINT_BOUND);
    let step = "<Cont:b|Done:b>";
    let (scope, self_loop) = elaborate(&format!("for i = val x in val (tag Cont i as {step})"), "x : b", TypeExpr::base("b"), &config);
    let den = denote(&self_loop, &Sort::Second(TypeExpr::base("b")), &scope.context(), &model).expect("loop");
    if den.table != Table::Comp(vec![Comp::Maybe(None); 2]) {
        return Outcome::fail("a self-loop did not diverge");
    }
    for n in 0..=6 {
        let (_, term) = elaborate(&factorial_program(n), "", TypeExpr::Nat, &config);
        let got = closed_denotation(&term, TypeExpr::Nat, &model).table;
        let expected = Table::Comp(vec![Comp::Maybe(reference_factorial(n, FIXPOINT_BOUND).map(Value::Nat))]);
        if got != expected {
            return Outcome::fail(format!("factorial {n}: {got:?} versus {expected:?}"));
        }
    }
    let bool_ty = TypeExpr::parse(BOOL).expect("bool");
    for which in ["even", "odd"] {
        let (scope, term) = elaborate(&parity_program(which), "x : Nat", bool_ty.clone(), &config);
        let Table::Comp(cells) = denote(&term, &Sort::Second(bool_ty.clone()), &scope.context(), &model).expect("parity").table else {
            return Outcome::fail("parity is a computation");
        };
        for (n, cell) in cells.iter().enumerate() {
            let truth = reference_even(n as u32) == (which == "even");
            if cell != &Comp::Maybe(Some(Value::Variant(u32::from(!truth), Box::new(Value::unit())))) {
                return Outcome::fail(format!("{which} {n} gave {cell:?}"));
            }
        }
    }
    match kleene_corpus(100, SEED) {
        Ok(n) => Outcome {
            passed: true,
            detail: format!("{loops} loops match unrolling; factorial 0..=6 and parity 0..25 exact; {n} Kleene maps fixed and least"),
        },
        Err(w) => Outcome::fail(w),
    }
}

fn meta_laws() -> Outcome {
    let mut records = Vec::new();
    let mut terms = 0;
    for config in [FragmentConfig::default(), FragmentConfig::new([Extension::Sequential, Extension::Functions]), FragmentConfig::full()] {
        let corpus = holed_corpus(&config, &TermCorpus { count: HOLED_TERMS, seed: SEED, ..Default::default() });
        terms += corpus.len();
        records.extend(check_meta_laws(&config, &corpus));
    }
    Outcome::from_records(&records, format!("{terms} holed terms"))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("term-level substitution laws", term_laws),
        ("fold substitution equals the shifting oracle", oracle_equivalence),
        ("semantic substitution lemma", substitution_lemma),
        ("strong monad laws", monad_laws),
        ("compatibility and corrupted clauses", compatibility),
        ("finite presheaf laws", presheaf_laws),
        ("coend quotient", coend_quotient),
        ("iteration and fixed points", elgot_and_fixpoints),
        ("metavariable laws", meta_laws),
    ];
    let mut failures = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let status = if outcome.passed { "PASS" } else { "FAIL" };
        println!("criterion {}: {status} {name} ({:.1?}): {}", i + 1, start.elapsed(), outcome.detail);
        if !outcome.passed {
            failures.push(i + 1);
        }
    }
    assert!(failures.is_empty(), "failing criteria: {failures:?}");
}
