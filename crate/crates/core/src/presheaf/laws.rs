use std::collections::HashMap;
use std::sync::Arc;

use crate::report::LawRecord;
use crate::sorts::{Context, Renaming, Sort};

use super::solve::Functional;
use super::tensor::{associator, tensor, tensor_map, Tensor, Triple};
use super::{FinStructure, Morphism, PresheafError};

fn var_position(space: &super::ContextSpace, sort: &str, ctx: usize, elem: usize) -> usize {
    space.context(ctx).vars_of_sort(&sort.to_string())[elem]
}

fn var_element(space: &super::ContextSpace, ctx: usize, position: usize) -> usize {
    let c = space.context(ctx);
    let s = &c.entries()[position];
    c.vars_of_sort(s).iter().position(|&p| p == position).expect("position carries its sort")
}

/// `ℓ : ν ⊗ P → P`, `[x, e] ↦ e_x`.
pub fn left_unitor(nu_p: &Tensor) -> Result<Morphism, PresheafError> {
    let space = nu_p.structure.space().clone();
    nu_p.map_classes(|si, _ci, t| {
        let s = nu_p.left.sorts()[si].id().clone();
        Ok(t.env[var_position(&space, &s, t.mid, t.elem)])
    })
}

/// `P → ν ⊗ P`, `q ↦ [x, ⟨q⟩]_{[x:s]}`; inverse to [`left_unitor`].
pub fn left_unitor_inverse(p: &FinStructure, nu_p: &Tensor) -> Result<Morphism, PresheafError> {
    let space = p.space().clone();
    Morphism::from_fn(p, |si, ci, q| {
        let s = p.sorts()[si].id().clone();
        let mid = space.context_index(&Context::new(vec![s]))?;
        nu_p.class_of(si, ci, &Triple { mid, elem: 0, env: vec![q] })
    })
}

/// `ρ : P ⊗ ν → P`, `[p, ρ̄] ↦ p[ρ̄]`.
pub fn right_unitor(p_nu: &Tensor) -> Result<Morphism, PresheafError> {
    let space = p_nu.structure.space().clone();
    p_nu.map_classes(|si, ci, t| {
        let mid_ctx = space.context(t.mid);
        let map: Vec<usize> = t
            .env
            .iter()
            .enumerate()
            .map(|(x, &v)| var_position(&space, &mid_ctx.entries()[x], ci, v))
            .collect();
        let r = space
            .renaming_position(ci, t.mid, &map)
            .ok_or_else(|| PresheafError::Malformed("variable environment is not a renaming".into()))?;
        Ok(p_nu.left.act(si, ci, t.mid, r, t.elem))
    })
}

/// `ρ' : P → P ⊗ ν`, `p ↦ [p, id]`.
pub fn right_unitor_inverse(p: &FinStructure, p_nu: &Tensor) -> Result<Morphism, PresheafError> {
    let space = p.space().clone();
    Morphism::from_fn(p, |si, ci, e| {
        let env = (0..space.context(ci).len()).map(|x| var_element(&space, ci, x)).collect();
        p_nu.class_of(si, ci, &Triple { mid: ci, elem: e, env })
    })
}

/// Selects the honest associator or the corrupted one used in mutation tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssociatorVariant {
    Honest,
    Swapped,
}

fn record(suite: &str, law: &str, outcome: Result<(u64, Result<(), String>), PresheafError>) -> LawRecord {
    match outcome {
        Ok((n, Ok(()))) => LawRecord::pass(suite, law, n),
        Ok((n, Err(w))) => LawRecord::fail(suite, law, n, w),
        Err(e) => LawRecord::fail(suite, law, 0, e.to_string()),
    }
}

fn compare(lhs: &Morphism, rhs: &Morphism, source: &FinStructure, target: &FinStructure) -> (u64, Result<(), String>) {
    let n = lhs.element_count();
    match lhs.first_difference(rhs, source, target) {
        None => (n, Ok(())),
        Some(w) => (n, Err(w)),
    }
}

fn t(a: &Arc<FinStructure>, b: &Arc<FinStructure>) -> Result<Tensor, PresheafError> {
    tensor(a, b)
}

/// The pentagon `α_{P,Q,L⊗M} ∘ α_{P⊗Q,L,M} = (P⊗α_{Q,L,M}) ∘ α_{P,Q⊗L,M} ∘ (α_{P,Q,L}⊗M)`.
fn pentagon(
    p: &Arc<FinStructure>,
    q: &Arc<FinStructure>,
    l: &Arc<FinStructure>,
    m: &Arc<FinStructure>,
    swapped: bool,
) -> Result<(u64, Result<(), String>), PresheafError> {
    let pq = t(p, q)?;
    let pq_l = t(&pq.structure, l)?;
    let pql_m = t(&pq_l.structure, m)?;
    let lm = t(l, m)?;
    let pq_lm = t(&pq.structure, &lm.structure)?;
    let q_lm = t(q, &lm.structure)?;
    let p_qlm = t(p, &q_lm.structure)?;
    let ql = t(q, l)?;
    let p_ql = t(p, &ql.structure)?;
    let p_ql_m = t(&p_ql.structure, m)?;
    let ql_m = t(&ql.structure, m)?;
    let p_ql_m2 = t(p, &ql_m.structure)?;

    let lhs = associator(&pq_l, &pql_m, &lm, &pq_lm, swapped)?.then(&associator(&pq, &pq_lm, &q_lm, &p_qlm, swapped)?);
    let a_pql = associator(&pq, &pq_l, &ql, &p_ql, swapped)?;
    let step1 = tensor_map(&a_pql, &Morphism::identity(m), &pql_m, &p_ql_m)?;
    let step2 = associator(&p_ql, &p_ql_m, &ql_m, &p_ql_m2, swapped)?;
    let a_qlm = associator(&ql, &ql_m, &lm, &q_lm, swapped)?;
    let step3 = tensor_map(&Morphism::identity(p), &a_qlm, &p_ql_m2, &p_qlm)?;
    let rhs = step1.then(&step2).then(&step3);
    Ok(compare(&lhs, &rhs, &pql_m.structure, &p_qlm.structure))
}

/// The triangle `(P⊗ℓ_Q) ∘ α_{P,ν,Q} = ρ_P ⊗ Q`.
fn triangle(p: &Arc<FinStructure>, q: &Arc<FinStructure>, swapped: bool) -> Result<(u64, Result<(), String>), PresheafError> {
    let nu = Arc::new(FinStructure::variables(p.space().clone()));
    let p_nu = t(p, &nu)?;
    let pnu_q = t(&p_nu.structure, q)?;
    let nu_q = t(&nu, q)?;
    let p_nuq = t(p, &nu_q.structure)?;
    let pq = t(p, q)?;
    let lhs = associator(&p_nu, &pnu_q, &nu_q, &p_nuq, swapped)?
        .then(&tensor_map(&Morphism::identity(p), &left_unitor(&nu_q)?, &p_nuq, &pq)?);
    let rhs = tensor_map(&right_unitor(&p_nu)?, &Morphism::identity(q), &pnu_q, &pq)?;
    Ok(compare(&lhs, &rhs, &pnu_q.structure, &pq.structure))
}

fn natural_and_bijective(
    suite: &str,
    name: &str,
    map: Result<Morphism, PresheafError>,
    source: &FinStructure,
    target: &FinStructure,
    bijective: bool,
) -> Vec<LawRecord> {
    let map = match map {
        Ok(m) => m,
        Err(e) => return vec![LawRecord::fail(suite, format!("{name} well-defined"), 0, e.to_string())],
    };
    let mut out = Vec::new();
    out.push(match map.check_natural(source, target) {
        Ok(n) => LawRecord::pass(suite, format!("{name} natural"), n),
        Err(w) => LawRecord::fail(suite, format!("{name} natural"), 0, w),
    });
    if bijective {
        out.push(match map.check_bijective(source, target) {
            Ok(n) => LawRecord::pass(suite, format!("{name} bijective"), n),
            Err(w) => LawRecord::fail(suite, format!("{name} bijective"), 0, w),
        });
    }
    out
}

/// Actegory laws for a second-class `p` acted on by homogeneous `q`, `l`,
/// `m`: pentagon, triangle, naturality of every mediator and bijectivity of
/// the associator and right unitor.
pub fn check_action_axioms(
    p: &Arc<FinStructure>,
    q: &Arc<FinStructure>,
    l: &Arc<FinStructure>,
    m: &Arc<FinStructure>,
    variant: AssociatorVariant,
) -> Vec<LawRecord> {
    let suite = "presheaf-laws";
    let swapped = variant == AssociatorVariant::Swapped;
    let mut out = vec![
        record(suite, "action pentagon", pentagon(p, q, l, m, swapped)),
        record(suite, "action triangle", triangle(p, q, swapped)),
    ];
    let nu = Arc::new(FinStructure::variables(p.space().clone()));
    let built = (|| -> Result<_, PresheafError> {
        let pq = t(p, q)?;
        let pq_l = t(&pq.structure, l)?;
        let ql = t(q, l)?;
        let p_ql = t(p, &ql.structure)?;
        let p_nu = t(p, &nu)?;
        let nu_q = t(&nu, q)?;
        Ok((pq, pq_l, ql, p_ql, p_nu, nu_q))
    })();
    match built {
        Err(e) => out.push(LawRecord::fail(suite, "tensors", 0, e.to_string())),
        Ok((pq, pq_l, ql, p_ql, p_nu, nu_q)) => {
            for (name, s) in [("P⊗Q", &pq.structure), ("(P⊗Q)⊗L", &pq_l.structure), ("P⊗(Q⊗L)", &p_ql.structure)] {
                out.push(match s.check_functor_laws() {
                    Ok(n) => LawRecord::pass(suite, format!("{name} functorial"), n),
                    Err(e) => LawRecord::fail(suite, format!("{name} functorial"), 0, e.to_string()),
                });
            }
            out.extend(natural_and_bijective(
                suite,
                "associator",
                associator(&pq, &pq_l, &ql, &p_ql, swapped),
                &pq_l.structure,
                &p_ql.structure,
                true,
            ));
            out.extend(natural_and_bijective(suite, "right unitor", right_unitor(&p_nu), &p_nu.structure, p, true));
            out.extend(natural_and_bijective(suite, "left unitor", left_unitor(&nu_q), &nu_q.structure, q, true));
        }
    }
    out
}

/// An object of the skew structure: a homogeneous part acting on a
/// second-class part.
#[derive(Debug, Clone)]
pub struct SkewObject {
    pub hom: Arc<FinStructure>,
    pub snd: Arc<FinStructure>,
}

impl SkewObject {
    /// The unit `⟨ν, ∅⟩`.
    pub fn unit(hom_like: &FinStructure, snd_like: &FinStructure) -> SkewObject {
        let space = hom_like.space().clone();
        SkewObject {
            hom: Arc::new(FinStructure::variables(space.clone())),
            snd: Arc::new(FinStructure::empty(space, snd_like.sorts().to_vec())),
        }
    }

    fn parts(&self) -> [(&'static str, &Arc<FinStructure>); 2] {
        [("first", &self.hom), ("second", &self.snd)]
    }
}

/// `(A⊛λ_B) ∘ α_{A,I,B} ∘ (ρ_A⊛B) = id`, one component.
fn skew_unit_triangle(x: &Arc<FinStructure>, b: &Arc<FinStructure>) -> Result<(u64, Result<(), String>), PresheafError> {
    let nu = Arc::new(FinStructure::variables(x.space().clone()));
    let xb = t(x, b)?;
    let x_nu = t(x, &nu)?;
    let xnu_b = t(&x_nu.structure, b)?;
    let nu_b = t(&nu, b)?;
    let x_nub = t(x, &nu_b.structure)?;
    let step1 = tensor_map(&right_unitor_inverse(x, &x_nu)?, &Morphism::identity(b), &xb, &xnu_b)?;
    let step2 = associator(&x_nu, &xnu_b, &nu_b, &x_nub, false)?;
    let step3 = tensor_map(&Morphism::identity(x), &left_unitor(&nu_b)?, &x_nub, &xb)?;
    let lhs = step1.then(&step2).then(&step3);
    Ok(compare(&lhs, &Morphism::identity(&xb.structure), &xb.structure, &xb.structure))
}

/// `λ_{A⊛B} ∘ α_{I,A,B} = λ_A ⊛ B` on the homogeneous component.
fn skew_left(a: &Arc<FinStructure>, b: &Arc<FinStructure>) -> Result<(u64, Result<(), String>), PresheafError> {
    let nu = Arc::new(FinStructure::variables(a.space().clone()));
    let nu_a = t(&nu, a)?;
    let nua_b = t(&nu_a.structure, b)?;
    let ab = t(a, b)?;
    let nu_ab = t(&nu, &ab.structure)?;
    let lhs = associator(&nu_a, &nua_b, &ab, &nu_ab, false)?.then(&left_unitor(&nu_ab)?);
    let rhs = tensor_map(&left_unitor(&nu_a)?, &Morphism::identity(b), &nua_b, &ab)?;
    Ok(compare(&lhs, &rhs, &nua_b.structure, &ab.structure))
}

/// `α_{A,B,I} ∘ ρ_{A⊛B} = A ⊛ ρ_B`, one component.
fn skew_right(x: &Arc<FinStructure>, b: &Arc<FinStructure>) -> Result<(u64, Result<(), String>), PresheafError> {
    let nu = Arc::new(FinStructure::variables(x.space().clone()));
    let xb = t(x, b)?;
    let xb_nu = t(&xb.structure, &nu)?;
    let b_nu = t(b, &nu)?;
    let x_bnu = t(x, &b_nu.structure)?;
    let lhs = right_unitor_inverse(&xb.structure, &xb_nu)?.then(&associator(&xb, &xb_nu, &b_nu, &x_bnu, false)?);
    let rhs = tensor_map(&Morphism::identity(x), &right_unitor_inverse(b, &b_nu)?, &xb, &x_bnu)?;
    Ok(compare(&lhs, &rhs, &xb.structure, &x_bnu.structure))
}

/// `λ_I ∘ ρ_I = id` on the unit's homogeneous component.
fn skew_unit(nu: &Arc<FinStructure>) -> Result<(u64, Result<(), String>), PresheafError> {
    let nu_nu = t(nu, nu)?;
    let lhs = right_unitor_inverse(nu, &nu_nu)?.then(&left_unitor(&nu_nu)?);
    Ok(compare(&lhs, &Morphism::identity(nu), nu, nu))
}

/// The empty-set witness: `(⟨ν, ∅⟩ ⊛ ⊤)` has empty second-class cells while
/// `⊤` is a singleton there. Returns a description of the witness.
pub fn skew_empty_witness(space: &Arc<super::ContextSpace>) -> Result<String, String> {
    let fst: Vec<Sort<String>> = space.system().fst_sorts().iter().cloned().map(Sort::First).collect();
    let snd: Vec<Sort<String>> = space.system().snd_sorts().iter().cloned().map(Sort::Second).collect();
    if snd.is_empty() {
        return Err("no second-class sort".into());
    }
    let top_hom = Arc::new(FinStructure::terminal(space.clone(), fst));
    let top_snd = FinStructure::terminal(space.clone(), snd.clone());
    let empty = Arc::new(FinStructure::empty(space.clone(), snd.clone()));
    let product = tensor(&empty, &top_hom).map_err(|e| e.to_string())?;
    for (si, s) in snd.iter().enumerate() {
        for ci in 0..space.contexts().len() {
            let lhs = product.structure.cell_size(si, ci);
            let rhs = top_snd.cell_size(si, ci);
            if lhs != 0 || rhs != 1 {
                return Err(format!("at {s} over {}: {lhs} versus {rhs}", space.context(ci)));
            }
        }
    }
    Ok(format!(
        "(kNeut ⊛ ⊤) at {} is ∅ over all {} contexts while ⊤ is a singleton; the left unitor is not surjective",
        snd[0],
        space.contexts().len()
    ))
}

/// The five skew-monoidal axioms for the product structure
/// `(a, x) ⊛ (b, y) = (a⊗b, x⊗b)` with unit `⟨ν, ∅⟩`, on the objects
/// `A, B, C, D`, followed by the bijectivity of its associator and right
/// unitor and the empty-set witness.
pub fn check_skew(a: &SkewObject, b: &SkewObject, c: &SkewObject, d: &SkewObject) -> Vec<LawRecord> {
    let suite = "skew";
    let mut out = Vec::new();
    for (part, left) in a.parts() {
        out.push(record(suite, &format!("pentagon ({part})"), pentagon(left, &b.hom, &c.hom, &d.hom, false)));
    }
    let unit = SkewObject::unit(&a.hom, &a.snd);
    out.push(record(suite, "unit triangle λ_I∘ρ_I = id (first)", skew_unit(&unit.hom)));
    let empty_ok = (0..unit.snd.sorts().len())
        .all(|si| (0..unit.snd.space().contexts().len()).all(|ci| unit.snd.cell_size(si, ci) == 0));
    out.push(if empty_ok {
        LawRecord::pass(suite, "unit triangle λ_I∘ρ_I = id (second, vacuous)", 0)
    } else {
        LawRecord::fail(suite, "unit triangle λ_I∘ρ_I = id (second, vacuous)", 0, "unit has second-class elements")
    });
    for (part, left) in a.parts() {
        out.push(record(suite, &format!("rectangle ({part})"), skew_unit_triangle(left, &b.hom)));
        out.push(record(suite, &format!("right axiom ({part})"), skew_right(left, &b.hom)));
    }
    out.push(record(suite, "left axiom (first)", skew_left(&a.hom, &b.hom)));
    let vacuous = tensor(&unit.snd, &a.hom).and_then(|ea| tensor(&ea.structure, &b.hom));
    out.push(match vacuous {
        Ok(eab) if eab.structure.total_elements() == 0 => LawRecord::pass(suite, "left axiom (second, vacuous)", 0),
        Ok(_) => LawRecord::fail(suite, "left axiom (second, vacuous)", 0, "(∅⊗a)⊗b is inhabited"),
        Err(e) => LawRecord::fail(suite, "left axiom (second, vacuous)", 0, e.to_string()),
    });
    for (part, left) in a.parts() {
        let built = (|| -> Result<_, PresheafError> {
            let lb = t(left, &b.hom)?;
            let lb_c = t(&lb.structure, &c.hom)?;
            let bc = t(&b.hom, &c.hom)?;
            let l_bc = t(left, &bc.structure)?;
            let nu = Arc::new(FinStructure::variables(left.space().clone()));
            let l_nu = t(left, &nu)?;
            Ok((lb, lb_c, bc, l_bc, l_nu))
        })();
        match built {
            Err(e) => out.push(LawRecord::fail(suite, format!("mediators ({part})"), 0, e.to_string())),
            Ok((lb, lb_c, bc, l_bc, l_nu)) => {
                out.extend(natural_and_bijective(
                    suite,
                    &format!("associator ({part})"),
                    associator(&lb, &lb_c, &bc, &l_bc, false),
                    &lb_c.structure,
                    &l_bc.structure,
                    true,
                ));
                out.extend(natural_and_bijective(
                    suite,
                    &format!("right unitor ({part})"),
                    right_unitor_inverse(left, &l_nu),
                    left,
                    &l_nu.structure,
                    true,
                ));
            }
        }
    }
    let nu = Arc::new(FinStructure::variables(a.hom.space().clone()));
    match t(&nu, &a.hom) {
        Ok(nu_a) => out.extend(natural_and_bijective(
            suite,
            "left unitor (homogeneous restriction)",
            left_unitor(&nu_a),
            &nu_a.structure,
            &a.hom,
            true,
        )),
        Err(e) => out.push(LawRecord::fail(suite, "left unitor (homogeneous restriction)", 0, e.to_string())),
    }
    out.push(match skew_empty_witness(a.hom.space()) {
        Ok(w) => LawRecord::pass(suite, "left unitor not invertible", 1).with_note(w),
        Err(w) => LawRecord::fail(suite, "left unitor not invertible", 1, w),
    });
    out
}

/// A structure with a point `ν → carrier`.
#[derive(Debug, Clone)]
pub struct Pointed {
    pub carrier: Arc<FinStructure>,
    pub point: Morphism,
}

impl Pointed {
    /// Build the point from the image of the single variable of `[s]`, one
    /// per first-class sort (in the space's order).
    pub fn new(carrier: Arc<FinStructure>, var_images: &[usize]) -> Result<Self, PresheafError> {
        let space = carrier.space().clone();
        let nu = FinStructure::variables(space.clone());
        let point = Morphism::from_fn(&nu, |si, ci, x| {
            let s = nu.sorts()[si].id().clone();
            let pos = var_position(&space, &s, ci, x);
            let single = Context::new(vec![s.clone()]);
            let pi = Renaming::new(space.context(ci).clone(), single, vec![pos]).expect("sorted");
            let target_sort = carrier
                .sort_index(&Sort::First(s))
                .ok_or_else(|| PresheafError::SortMismatch("pointed carrier lacks a first-class sort".into()))?;
            carrier.act_along(target_sort, &pi, var_images[si])
        })?;
        Ok(Pointed { carrier, point })
    }

    /// `⟨ν, id⟩`.
    pub fn variables(space: &Arc<super::ContextSpace>) -> Self {
        let nu = Arc::new(FinStructure::variables(space.clone()));
        let point = Morphism::identity(&nu);
        Pointed { carrier: nu, point }
    }
}

/// The point of `A ⊗ B`: `x ↦ [var_A(x), ⟨var_B(y)⟩_{y∈Γ}]_Γ`, i.e. `ρ'`
/// followed by `var ⊗ var`.
pub fn tensor_point(a: &Pointed, b: &Pointed, ab: &Tensor) -> Result<Morphism, PresheafError> {
    let space = a.carrier.space().clone();
    let nu = FinStructure::variables(space.clone());
    Morphism::from_fn(&nu, |si, ci, x| {
        let ctx = space.context(ci);
        let env = (0..ctx.len())
            .map(|y| {
                let bs = b.carrier.sort_index(&Sort::First(ctx.entries()[y].clone())).expect("sorts");
                b.point.apply(bs, ci, var_element(&space, ci, y))
            })
            .collect();
        ab.class_of(si, ci, &Triple { mid: ci, elem: a.point.apply(si, ci, x), env })
    })
}

/// Every natural map `source → target`, or `None` when there are more than
/// `limit` of them.
pub fn enumerate_morphisms(source: &FinStructure, target: &FinStructure, limit: usize) -> Option<Vec<Morphism>> {
    let space = source.space();
    let n = space.contexts().len();
    let mut vars = Vec::new();
    let mut index = HashMap::new();
    for si in 0..source.sorts().len() {
        for ci in 0..n {
            for e in 0..source.cell_size(si, ci) {
                index.insert((si, ci, e), vars.len());
                vars.push((si, ci, e));
            }
        }
    }
    let mut problem = Functional::new(vars.iter().map(|&(si, ci, _)| target.cell_size(si, ci)).collect());
    for si in 0..source.sorts().len() {
        for (src, tgt, r) in space.all_renamings() {
            let table: Vec<usize> = (0..target.cell_size(si, tgt)).map(|v| target.act(si, src, tgt, r, v)).collect();
            for e in 0..source.cell_size(si, tgt) {
                let b = index[&(si, tgt, e)];
                let a = index[&(si, src, source.act(si, src, tgt, r, e))];
                problem.constrain(b, a, table.clone());
            }
        }
    }
    let solutions = problem.solutions(limit)?;
    Some(
        solutions
            .into_iter()
            .map(|values| {
                let mut components: Vec<Vec<Vec<usize>>> = (0..source.sorts().len())
                    .map(|si| (0..n).map(|ci| vec![0; source.cell_size(si, ci)]).collect())
                    .collect();
                for (k, &(si, ci, e)) in vars.iter().enumerate() {
                    components[si][ci][e] = values[k];
                }
                Morphism { components }
            })
            .collect(),
    )
}

/// Pointed-tensor checks: the tensored point agrees with the explicit
/// formula and is natural, and the mediators preserve points.
pub fn check_pointed_tensor(a: &Pointed, b: &Pointed, c: &Pointed) -> Vec<LawRecord> {
    let suite = "pointed";
    let space = a.carrier.space().clone();
    let nu_p = Pointed::variables(&space);
    let nu = nu_p.carrier.clone();
    let mut out = Vec::new();
    let outcome = (|| -> Result<Vec<LawRecord>, PresheafError> {
        let mut recs = Vec::new();
        let ab = tensor(&a.carrier, &b.carrier)?;
        let point_ab = tensor_point(a, b, &ab)?;
        let explicit = Morphism::from_fn(&nu, |si, ci, x| {
            let s = nu.sorts()[si].id().clone();
            let mid = space.context_index(&Context::new(vec![s.clone()]))?;
            let bs = b.carrier.sort_index(&Sort::First(s)).expect("sorts");
            let elem = a.point.apply(si, mid, 0);
            ab.class_of(si, ci, &Triple { mid, elem, env: vec![b.point.apply(bs, ci, x)] })
        })?;
        let (n, r) = compare(&point_ab, &explicit, &nu, &ab.structure);
        recs.push(LawRecord::from_outcome(suite, "tensor point matches [var_A(x), ⟨var_B(x)⟩]_[x:s]", n, r));
        recs.push(match point_ab.check_natural(&nu, &ab.structure) {
            Ok(n) => LawRecord::pass(suite, "tensor point natural", n),
            Err(w) => LawRecord::fail(suite, "tensor point natural", 0, w),
        });

        let nu_b = tensor(&nu, &b.carrier)?;
        let p_nub = tensor_point(&nu_p, b, &nu_b)?;
        let via_unitor = b.point.then(&left_unitor_inverse(&b.carrier, &nu_b)?);
        let (n, r) = compare(&p_nub, &via_unitor, &nu, &nu_b.structure);
        recs.push(LawRecord::from_outcome(suite, "ν ⊗ B point is ℓ⁻¹ ∘ var_B", n, r));

        let ab_c = tensor(&ab.structure, &c.carrier)?;
        let bc = tensor(&b.carrier, &c.carrier)?;
        let a_bc = tensor(&a.carrier, &bc.structure)?;
        let ab_p = Pointed { carrier: ab.structure.clone(), point: point_ab.clone() };
        let bc_p = Pointed { carrier: bc.structure.clone(), point: tensor_point(b, c, &bc)? };
        let lhs = tensor_point(&ab_p, c, &ab_c)?.then(&associator(&ab, &ab_c, &bc, &a_bc, false)?);
        let rhs = tensor_point(a, &bc_p, &a_bc)?;
        let (n, r) = compare(&lhs, &rhs, &nu, &a_bc.structure);
        recs.push(LawRecord::from_outcome(suite, "associator preserves points", n, r));

        let nu_a = tensor(&nu, &a.carrier)?;
        let lhs = tensor_point(&nu_p, a, &nu_a)?.then(&left_unitor(&nu_a)?);
        let (n, r) = compare(&lhs, &a.point, &nu, &a.carrier);
        recs.push(LawRecord::from_outcome(suite, "left unitor preserves points", n, r));

        let a_nu = tensor(&a.carrier, &nu)?;
        let lhs = tensor_point(a, &nu_p, &a_nu)?.then(&right_unitor(&a_nu)?);
        let (n, r) = compare(&lhs, &a.point, &nu, &a.carrier);
        recs.push(LawRecord::from_outcome(suite, "right unitor preserves points", n, r));

        let maps = enumerate_morphisms(&nu, &a.carrier, 10_000)
            .ok_or_else(|| PresheafError::BoundExceeded("more than 10000 maps out of ν".into()))?;
        let preserving: Vec<&Morphism> = maps.iter().filter(|f| **f == a.point).collect();
        let law = "⟨ν, id⟩ initial: unique point-preserving map is the point";
        recs.push(if preserving.len() == 1 {
            LawRecord::pass(suite, law, maps.len() as u64)
        } else {
            LawRecord::fail(suite, law, maps.len() as u64, format!("{} point-preserving maps", preserving.len()))
        });
        Ok(recs)
    })();
    match outcome {
        Ok(recs) => out.extend(recs),
        Err(e) => out.push(LawRecord::fail(suite, "pointed tensor", 0, e.to_string())),
    }
    out
}
