use std::sync::Arc;

use modsyn_core::presheaf::{
    check_action_axioms, check_pointed_tensor, check_skew, check_universal_property, enumerate_morphisms,
    exponential, from_atoms, left_unitor, load_structure, random_homogeneous, random_pointed, random_second_class,
    right_unitor, right_unitor_inverse, skew_empty_witness, tensor, Atom, AssociatorVariant, ContextSpace,
    FinStructure, Morphism, Pointed, Shape, SkewObject, StructureFile, Triple,
};
use modsyn_core::report::LawRecord;
use modsyn_core::sorts::{Context, Sort, SortingSystem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn two_class_space() -> Arc<ContextSpace> {
    ContextSpace::new(SortingSystem::new(vec!["b".into()], vec!["c".into()]).unwrap(), 2)
}

fn ctx(entries: &[&str]) -> Context<String> {
    Context::new(entries.iter().map(|s| s.to_string()).collect())
}

fn assert_all_pass(records: &[LawRecord]) {
    let failures: Vec<String> = records.iter().filter(|r| !r.passed).map(|r| r.to_string()).collect();
    assert!(failures.is_empty(), "failures:\n{}", failures.join("\n"));
}

#[test]
fn context_space_counts() {
    let one = ContextSpace::new(SortingSystem::homogeneous(vec!["b".to_string()]).unwrap(), 2);
    assert_eq!(one.contexts().len(), 3);
    let two = ContextSpace::new(SortingSystem::homogeneous(vec!["a".to_string(), "b".to_string()]).unwrap(), 2);
    assert_eq!(two.contexts().len(), 7);
    let bb = one.context_index(&ctx(&["b", "b"])).unwrap();
    let b = one.context_index(&ctx(&["b"])).unwrap();
    assert_eq!(one.renamings(bb, b).len(), 2);
}

#[test]
fn random_structures_are_functorial_and_capped() {
    let space = two_class_space();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let h = random_homogeneous(&space, 3, &mut rng).unwrap();
        let s = random_second_class(&space, 3, &mut rng).unwrap();
        assert!(h.max_cell() <= 3 && s.max_cell() <= 3);
        h.check_functor_laws().unwrap();
        s.check_functor_laws().unwrap();
    }
}

#[test]
fn action_axioms_on_random_structures() {
    let space = two_class_space();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let p = random_second_class(&space, 3, &mut rng).unwrap();
        let q = random_homogeneous(&space, 3, &mut rng).unwrap();
        let l = random_homogeneous(&space, 3, &mut rng).unwrap();
        let m = random_homogeneous(&space, 3, &mut rng).unwrap();
        assert_all_pass(&check_action_axioms(&p, &q, &l, &m, AssociatorVariant::Honest));
    }
}

#[test]
fn action_axioms_vacuous_on_empty() {
    let space = two_class_space();
    let p = Arc::new(FinStructure::empty(space.clone(), vec![Sort::Second("c".into())]));
    let q = Arc::new(FinStructure::variables(space.clone()));
    let records = check_action_axioms(&p, &q, &q, &q, AssociatorVariant::Honest);
    assert_all_pass(&records);
}

#[test]
fn swapped_associator_is_caught() {
    let space = two_class_space();
    let c = Sort::Second("c".to_string());
    let pair = Shape::new("pair", c.clone(), vec!["b".into(), "b".into()]);
    let p = Arc::new(FinStructure::polynomial(space.clone(), vec![c], &[pair]).unwrap());
    let b = Sort::First("b".to_string());
    let q = Arc::new(from_atoms(&space, &b, &[Atom::Const, Atom::Var("b".into())]).unwrap());
    let records = check_action_axioms(&p, &q, &q, &q, AssociatorVariant::Swapped);
    let failed: Vec<&LawRecord> = records.iter().filter(|r| !r.passed).collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|r| r.witness.is_some()));
}

#[test]
fn skew_axioms_on_random_objects() {
    let space = two_class_space();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let objects: Vec<SkewObject> = (0..4)
            .map(|_| SkewObject {
                hom: random_homogeneous(&space, 3, &mut rng).unwrap(),
                snd: random_second_class(&space, 3, &mut rng).unwrap(),
            })
            .collect();
        assert_all_pass(&check_skew(&objects[0], &objects[1], &objects[2], &objects[3]));
    }
}

#[test]
fn empty_witness_is_exact() {
    let space = two_class_space();
    let witness = skew_empty_witness(&space).unwrap();
    assert!(witness.contains("∅"));
    let top = Arc::new(FinStructure::terminal(space.clone(), vec![Sort::First("b".into())]));
    let empty = Arc::new(FinStructure::empty(space.clone(), vec![Sort::Second("c".into())]));
    let product = tensor(&empty, &top).unwrap();
    assert_eq!(product.structure.total_elements(), 0);
    let top_snd = FinStructure::terminal(space.clone(), vec![Sort::Second("c".into())]);
    assert_eq!(top_snd.total_elements(), space.contexts().len());
}

#[test]
fn pointed_tensor_laws() {
    let space = two_class_space();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10 {
        let a = random_pointed(&space, 3, &mut rng).unwrap();
        let b = random_pointed(&space, 3, &mut rng).unwrap();
        let c = random_pointed(&space, 3, &mut rng).unwrap();
        assert_all_pass(&check_pointed_tensor(&a, &b, &c));
    }
    let nu = Pointed::variables(&space);
    assert_all_pass(&check_pointed_tensor(&nu, &nu, &nu));
}

#[test]
fn closed_singleton_tensor_bijects() {
    let space = two_class_space();
    let c = Sort::Second("c".to_string());
    let p = Arc::new(from_atoms(&space, &c, &[Atom::Const]).unwrap());
    let q = Arc::new(FinStructure::variables(space.clone()));
    let pq = tensor(&p, &q).unwrap();
    for ci in 0..space.contexts().len() {
        assert_eq!(pq.structure.cell_size(0, ci), 1);
    }
}

#[test]
fn right_unitor_is_the_action() {
    let space = two_class_space();
    let c = Sort::Second("c".to_string());
    let p = Arc::new(from_atoms(&space, &c, &[Atom::Sym2("b".into()), Atom::Var("b".into())]).unwrap());
    let nu = Arc::new(FinStructure::variables(space.clone()));
    let p_nu = tensor(&p, &nu).unwrap();
    let rho = right_unitor(&p_nu).unwrap();
    let back = right_unitor_inverse(&p, &p_nu).unwrap();
    assert_eq!(back.then(&rho), Morphism::identity(&p));
    assert_eq!(rho.then(&back), Morphism::identity(&p_nu.structure));
    // [p, ⟨x0⟩] over [b,b] with p = m(0,0) at [b] reads as m(0,0) after renaming.
    let b1 = space.context_index(&ctx(&["b"])).unwrap();
    let bb = space.context_index(&ctx(&["b", "b"])).unwrap();
    let elem = p.cell(0, b1).iter().position(|l| l.ends_with("m0(0,0)")).unwrap();
    let class = p_nu.class_of(0, bb, &Triple { mid: b1, elem, env: vec![1] }).unwrap();
    let image = rho.apply(0, bb, class);
    assert!(p.cell(0, bb)[image].ends_with("m0(1,1)"));
}

#[test]
fn left_unitor_on_variables() {
    let space = two_class_space();
    let q = Arc::new(from_atoms(&space, &Sort::First("b".into()), &[Atom::Const, Atom::Var("b".into())]).unwrap());
    let nu = Arc::new(FinStructure::variables(space.clone()));
    let nu_q = tensor(&nu, &q).unwrap();
    let ell = left_unitor(&nu_q).unwrap();
    ell.check_bijective(&nu_q.structure, &q).unwrap();
    let bb = space.context_index(&ctx(&["b", "b"])).unwrap();
    for (t, class) in nu_q.raw(0, bb) {
        let x = t.elem;
        let position = space.context(t.mid).vars_of_sort(&"b".to_string())[x];
        assert_eq!(ell.apply(0, bb, class), t.env[position]);
    }
}

#[test]
fn exponential_by_variables_matches_base() {
    let space = ContextSpace::new(SortingSystem::new(vec!["b".into()], vec!["c".into()]).unwrap(), 1);
    let c = Sort::Second("c".to_string());
    let p = Arc::new(from_atoms(&space, &c, &[Atom::Const, Atom::Var("b".into())]).unwrap());
    let nu = Arc::new(FinStructure::variables(space.clone()));
    let exp = exponential(&p, &nu).unwrap();
    exp.structure.check_functor_laws().unwrap();
    for ci in 0..space.contexts().len() {
        assert_eq!(exp.structure.cell_size(0, ci), p.cell_size(0, ci));
    }
}

#[test]
fn exponential_of_empty_is_empty() {
    let space = two_class_space();
    let p = Arc::new(FinStructure::empty(space.clone(), vec![Sort::Second("c".into())]));
    let q = Arc::new(from_atoms(&space, &Sort::First("b".into()), &[Atom::Const]).unwrap());
    let exp = exponential(&p, &q).unwrap();
    assert_eq!(exp.structure.total_elements(), 0);
}

#[test]
fn exponential_universal_property() {
    let space = two_class_space();
    let c = Sort::Second("c".to_string());
    let b = Sort::First("b".to_string());
    let p = Arc::new(from_atoms(&space, &c, &[Atom::Const, Atom::Var("b".into())]).unwrap());
    let q = Arc::new(from_atoms(&space, &b, &[Atom::Var("b".into())]).unwrap());
    let exp = exponential(&p, &q).unwrap();
    for atoms in [vec![Atom::Const], vec![Atom::Var("b".into())], vec![Atom::Const, Atom::Const]] {
        let a = Arc::new(from_atoms(&space, &c, &atoms).unwrap());
        assert_all_pass(&check_universal_property(&exp, &a, 100_000));
    }
}

#[test]
fn initial_pointed_object() {
    let space = two_class_space();
    let nu = FinStructure::variables(space.clone());
    let maps = enumerate_morphisms(&nu, &nu, 100).unwrap();
    assert_eq!(maps, vec![Morphism::identity(&nu)]);
}

#[test]
fn structure_file_round_trip() {
    let space = two_class_space();
    let c = Sort::Second("c".to_string());
    let p = from_atoms(&space, &c, &[Atom::Sym2("b".into()), Atom::Subset("b".into())]).unwrap();
    let text = serde_json::to_string(&StructureFile::from_structure(&p)).unwrap();
    let loaded = load_structure(&text).unwrap();
    assert_eq!(loaded.sorts(), p.sorts());
    for ci in 0..space.contexts().len() {
        assert_eq!(loaded.cell(0, ci), p.cell(0, ci));
    }
    let shapes = r#"{"first_sorts":["b"],"second_sorts":["c"],"bound":2,
        "sorts":[{"name":"c","second":true}],
        "shapes":[{"name":"lam","sort":{"name":"c","second":true},"args":["b"]}]}"#;
    let s = load_structure(shapes).unwrap();
    assert_eq!(s.total_elements(), 3);
}

#[test]
fn malformed_structure_files_are_rejected() {
    let missing_action = r#"{"first_sorts":["b"],"bound":1,"sorts":[{"name":"b"}],
        "cells":[{"sort":{"name":"b"},"context":[],"elements":["k"]}]}"#;
    assert!(load_structure(missing_action).is_err());
    assert!(load_structure("{").is_err());
}

fn application_fixture() -> (Arc<ContextSpace>, Arc<FinStructure>, Arc<FinStructure>) {
    let space = two_class_space();
    let c = Sort::Second("c".to_string());
    let b = Sort::First("b".to_string());
    let shapes = [Shape::new("app", c.clone(), vec!["b".into(), "b".into()]), Shape::new("k", c.clone(), vec![])];
    let terms = Arc::new(FinStructure::polynomial(space.clone(), vec![c], &shapes).unwrap());
    let values = Arc::new(from_atoms(&space, &b, &[Atom::Const, Atom::Var("b".into())]).unwrap());
    (space, terms, values)
}

fn element(p: &FinStructure, ctx: usize, label: &str) -> usize {
    p.cell(0, ctx).iter().position(|l| l.ends_with(label)).unwrap_or_else(|| panic!("no {label}"))
}

#[test]
fn motivating_identifications() {
    let (space, terms, values) = application_fixture();
    let pq = tensor(&terms, &values).unwrap();
    let empty = space.context_index(&ctx(&[])).unwrap();
    let one = space.context_index(&ctx(&["b"])).unwrap();
    let two = space.context_index(&ctx(&["b", "b"])).unwrap();
    let v = element(&values, two, "v1(0)");
    let w = element(&values, two, "v1(1)");
    let class = |mid, elem, env: Vec<usize>| pq.class_of(0, two, &Triple { mid, elem, env }).unwrap();

    let duplicated = class(two, element(&terms, two, "app(0,1)"), vec![v, v]);
    let merged = class(one, element(&terms, one, "app(0,0)"), vec![v]);
    assert_eq!(duplicated, merged);

    let unused = class(one, element(&terms, one, "k()"), vec![w]);
    let projected = class(empty, element(&terms, empty, "k()"), vec![]);
    assert_eq!(unused, projected);

    let permuted_env = class(two, element(&terms, two, "app(0,1)"), vec![v, w]);
    let permuted_vars = class(two, element(&terms, two, "app(1,0)"), vec![w, v]);
    assert_eq!(permuted_env, permuted_vars);
    assert_ne!(permuted_env, class(two, element(&terms, two, "app(0,1)"), vec![w, v]));
}

#[test]
fn generator_pairs_are_identified_both_ways() {
    use rand::seq::SliceRandom;
    let (space, terms, values) = application_fixture();
    let pq = tensor(&terms, &values).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let mut confirmed = 0;
    for ci in 0..space.contexts().len() {
        let gens = pq.generators(0, ci);
        for (a, b) in gens.choose_multiple(&mut rng, 60) {
            assert_eq!(pq.class_of(0, ci, a).unwrap(), pq.class_of(0, ci, b).unwrap());
            assert_eq!(pq.class_of(0, ci, b).unwrap(), pq.class_of(0, ci, a).unwrap());
            confirmed += 1;
        }
    }
    assert!(confirmed >= 100, "only {confirmed} pairs");
}
