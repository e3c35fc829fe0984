use std::collections::HashMap;
use std::sync::Arc;

use crate::report::LawRecord;
use crate::sorts::Sort;

use super::laws::enumerate_morphisms;
use super::solve::Functional;
use super::tensor::{tensor, tensor_map, tuples, Tensor, Triple};
use super::{FinStructure, Morphism, PresheafError};

/// Largest number of families kept in one cell before giving up.
const CELL_LIMIT: usize = 4096;

/// A family of functions: `family[Γ'][env] ∈ P_s Γ'`, where `env` indexes
/// the environments of the outer context valued in `Q` over `Γ'`.
pub type Family = Vec<Vec<usize>>;

/// `P ⇐ Q`, the truncated end of `(P_s Γ')^{Env Q Γ Γ'}` over the enumerated
/// contexts `Γ'`.
pub struct Exponential {
    pub base: Arc<FinStructure>,
    pub arg: Arc<FinStructure>,
    pub structure: Arc<FinStructure>,
    families: Vec<Vec<Vec<Family>>>,
    lookup: Vec<Vec<HashMap<Family, usize>>>,
}

fn arg_sorts(arg: &FinStructure) -> Result<Vec<usize>, PresheafError> {
    arg.space()
        .system()
        .fst_sorts()
        .iter()
        .map(|s| {
            arg.sort_index(&Sort::First(s.clone()))
                .ok_or_else(|| PresheafError::SortMismatch(format!("argument lacks first-class sort {s}")))
        })
        .collect()
}

/// Environment sizes for outer context `outer` valued over `inner`.
fn env_sizes(arg: &FinStructure, qsort: &[usize], outer: usize, inner: usize) -> Vec<usize> {
    let space = arg.space();
    space
        .context(outer)
        .entries()
        .iter()
        .map(|s| arg.cell_size(qsort[space.fst_index(s).expect("known sort")], inner))
        .collect()
}

fn env_index(sizes: &[usize], env: &[usize]) -> usize {
    sizes.iter().zip(env).fold(0, |acc, (&n, &v)| acc * n + v)
}

/// Compute `base ⇐ arg`.
pub fn exponential(base: &Arc<FinStructure>, arg: &Arc<FinStructure>) -> Result<Exponential, PresheafError> {
    if !Arc::ptr_eq(base.space(), arg.space()) {
        return Err(PresheafError::SpaceMismatch);
    }
    let space = base.space().clone();
    let qsort = arg_sorts(arg)?;
    let n = space.contexts().len();
    let mut families = Vec::new();
    let mut lookup: Vec<Vec<HashMap<Family, usize>>> = Vec::new();
    let mut cells = Vec::new();
    for si in 0..base.sorts().len() {
        let (mut sort_fams, mut sort_lookup, mut sort_cells) = (Vec::new(), Vec::new(), Vec::new());
        for ci in 0..n {
            let envs: Vec<Vec<Vec<usize>>> = (0..n).map(|k| tuples(&env_sizes(arg, &qsort, ci, k))).collect();
            let mut offset = Vec::with_capacity(n);
            let mut domains = Vec::new();
            for (k, es) in envs.iter().enumerate() {
                offset.push(domains.len());
                domains.extend(std::iter::repeat(base.cell_size(si, k)).take(es.len()));
            }
            let mut problem = Functional::new(domains);
            for (k1, k2, r) in space.all_renamings() {
                let table: Vec<usize> = (0..base.cell_size(si, k2)).map(|v| base.act(si, k1, k2, r, v)).collect();
                let sizes1 = env_sizes(arg, &qsort, ci, k1);
                for (j, e) in envs[k2].iter().enumerate() {
                    let moved: Vec<usize> = e
                        .iter()
                        .enumerate()
                        .map(|(x, &q)| {
                            let s = &space.context(ci).entries()[x];
                            arg.act(qsort[space.fst_index(s).expect("known sort")], k1, k2, r, q)
                        })
                        .collect();
                    problem.constrain(offset[k2] + j, offset[k1] + env_index(&sizes1, &moved), table.clone());
                }
            }
            let solutions = problem.solutions(CELL_LIMIT).ok_or_else(|| {
                PresheafError::BoundExceeded(format!("more than {CELL_LIMIT} families over {}", space.context(ci)))
            })?;
            let fams: Vec<Family> = solutions
                .into_iter()
                .map(|vals| (0..n).map(|k| vals[offset[k]..offset[k] + envs[k].len()].to_vec()).collect())
                .collect();
            sort_lookup.push(fams.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect());
            sort_cells.push((0..fams.len()).map(|i| format!("fam{i}")).collect());
            sort_fams.push(fams);
        }
        families.push(sort_fams);
        lookup.push(sort_lookup);
        cells.push(sort_cells);
    }

    let structure = FinStructure::from_fn(space.clone(), base.sorts().to_vec(), cells, |si, rho, elem| {
        let src = space.context_index(rho.source())?;
        let tgt = space.context_index(rho.target())?;
        let phi = &families[si][tgt][elem];
        let moved: Family = (0..n)
            .map(|k| {
                let src_sizes = env_sizes(arg, &qsort, src, k);
                let tgt_sizes = env_sizes(arg, &qsort, tgt, k);
                tuples(&src_sizes)
                    .iter()
                    .map(|e| {
                        let pulled: Vec<usize> = rho.map().iter().map(|&x| e[x]).collect();
                        phi[k][env_index(&tgt_sizes, &pulled)]
                    })
                    .collect()
            })
            .collect();
        lookup[si][src]
            .get(&moved)
            .copied()
            .ok_or_else(|| PresheafError::NotWellDefined("renamed family violates the end condition".into()))
    })?;

    Ok(Exponential { base: base.clone(), arg: arg.clone(), structure: Arc::new(structure), families, lookup })
}

impl Exponential {
    pub fn family(&self, sort: usize, ctx: usize, elem: usize) -> &Family {
        &self.families[sort][ctx][elem]
    }

    pub fn find(&self, sort: usize, ctx: usize, family: &Family) -> Option<usize> {
        self.lookup[sort][ctx].get(family).copied()
    }

    fn sizes(&self, outer: usize, inner: usize) -> Vec<usize> {
        let qsort = arg_sorts(&self.arg).expect("checked at construction");
        env_sizes(&self.arg, &qsort, outer, inner)
    }

    /// `eval : (P ⇐ Q) ⊗ Q → P`, `[φ, e]_{Γ'} ↦ φ_Γ(e)`.
    pub fn eval(&self, exp_q: &Tensor) -> Result<Morphism, PresheafError> {
        exp_q.map_classes(|si, ci, t| {
            let sizes = self.sizes(t.mid, ci);
            Ok(self.families[si][t.mid][t.elem][ci][env_index(&sizes, &t.env)])
        })
    }

    /// The transpose of `f : A ⊗ Q → P`: `a ↦ (e ↦ f[a, e])`.
    pub fn curry(&self, f: &Morphism, a: &FinStructure, a_q: &Tensor) -> Result<Morphism, PresheafError> {
        let n = a.space().contexts().len();
        Morphism::from_fn(a, |si, ci, elem| {
            let family: Family = (0..n)
                .map(|k| {
                    tuples(&self.sizes(ci, k))
                        .into_iter()
                        .map(|env| Ok(f.apply(si, k, a_q.class_of(si, k, &Triple { mid: ci, elem, env })?)))
                        .collect::<Result<Vec<_>, PresheafError>>()
                })
                .collect::<Result<_, _>>()?;
            self.find(si, ci, &family).ok_or_else(|| {
                PresheafError::NotWellDefined(format!("transpose over {} is not a family", a.space().context(ci)))
            })
        })
    }
}

/// The universal property against a test object `a`: every `f : A ⊗ Q → P`
/// factors as `eval ∘ (curry f ⊗ Q)`, and every `g : A → P ⇐ Q` is the
/// transpose of its composite with `eval`.
pub fn check_universal_property(exp: &Exponential, a: &Arc<FinStructure>, limit: usize) -> Vec<LawRecord> {
    let suite = "exponential";
    let outcome = (|| -> Result<Vec<LawRecord>, PresheafError> {
        let mut out = Vec::new();
        out.push(match exp.structure.check_functor_laws() {
            Ok(n) => LawRecord::pass(suite, "exponential functorial", n),
            Err(e) => LawRecord::fail(suite, "exponential functorial", 0, e.to_string()),
        });
        let a_q = tensor(a, &exp.arg)?;
        let e_q = tensor(&exp.structure, &exp.arg)?;
        let eval = exp.eval(&e_q)?;
        out.push(match eval.check_natural(&e_q.structure, &exp.base) {
            Ok(n) => LawRecord::pass(suite, "eval natural", n),
            Err(w) => LawRecord::fail(suite, "eval natural", 0, w),
        });
        let too_many = || PresheafError::BoundExceeded(format!("more than {limit} maps"));
        let fs = enumerate_morphisms(&a_q.structure, &exp.base, limit).ok_or_else(too_many)?;
        let gs = enumerate_morphisms(a, &exp.structure, limit).ok_or_else(too_many)?;
        let mut factor_failure = None;
        for f in &fs {
            let g = exp.curry(f, a, &a_q)?;
            let back = tensor_map(&g, &Morphism::identity(&exp.arg), &a_q, &e_q)?.then(&eval);
            if let Some(w) = back.first_difference(f, &a_q.structure, &exp.base) {
                factor_failure = Some(w);
                break;
            }
        }
        out.push(match factor_failure {
            None => LawRecord::pass(suite, "eval ∘ (curry f ⊗ id) = f", fs.len() as u64),
            Some(w) => LawRecord::fail(suite, "eval ∘ (curry f ⊗ id) = f", fs.len() as u64, w),
        });
        let mut unique_failure = None;
        for g in &gs {
            let f = tensor_map(g, &Morphism::identity(&exp.arg), &a_q, &e_q)?.then(&eval);
            let g2 = exp.curry(&f, a, &a_q)?;
            if let Some(w) = g2.first_difference(g, a, &exp.structure) {
                unique_failure = Some(w);
                break;
            }
        }
        out.push(match unique_failure {
            None => LawRecord::pass(suite, "curry unique", gs.len() as u64),
            Some(w) => LawRecord::fail(suite, "curry unique", gs.len() as u64, w),
        });
        let law = "hom-set bijection";
        out.push(if fs.len() == gs.len() {
            LawRecord::pass(suite, law, fs.len() as u64)
        } else {
            LawRecord::fail(suite, law, 0, format!("{} maps A⊗Q → P versus {} maps A → P⇐Q", fs.len(), gs.len()))
        });
        Ok(out)
    })();
    outcome.unwrap_or_else(|e| vec![LawRecord::fail(suite, "universal property", 0, e.to_string())])
}
