use std::collections::HashMap;
use std::sync::Arc;

use crate::sorts::Sort;

use super::{FinStructure, Morphism, PresheafError};

/// A raw element of a tensor cell: a middle context `Γ'`, an element of the
/// left factor over `Γ'`, and one right-factor element over the outer context
/// for every position of `Γ'`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub mid: usize,
    pub elem: usize,
    pub env: Vec<usize>,
}

/// `P ⊗ Q` together with its quotient data.
pub struct Tensor {
    pub left: Arc<FinStructure>,
    pub right: Arc<FinStructure>,
    pub structure: Arc<FinStructure>,
    reps: Vec<Vec<Vec<Triple>>>,
    classes: Vec<Vec<HashMap<Triple, usize>>>,
    generators: Vec<Vec<Vec<(Triple, Triple)>>>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut cur = x;
        while self.0[cur] != root {
            let next = self.0[cur];
            self.0[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Index of the right factor's sort for every first-class sort of the space.
fn right_sort_map(right: &FinStructure) -> Result<Vec<usize>, PresheafError> {
    right
        .space()
        .system()
        .fst_sorts()
        .iter()
        .map(|s| {
            right
                .sort_index(&Sort::First(s.clone()))
                .ok_or_else(|| PresheafError::SortMismatch(format!("right factor lacks first-class sort {s}")))
        })
        .collect()
}

/// All tuples choosing, for each entry of `sizes`, an index below it.
pub(crate) fn tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &n in sizes {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |i| {
                    let mut t2 = t.clone();
                    t2.push(i);
                    t2
                })
            })
            .collect();
    }
    out
}

/// The substitution tensor, computed as the quotient of raw triples by the
/// equivalence generated by `⟨Γ'1, t[ρ], e⟩ ∼ ⟨Γ'2, t, e∘ρ⟩`.
pub fn tensor(left: &Arc<FinStructure>, right: &Arc<FinStructure>) -> Result<Tensor, PresheafError> {
    if !Arc::ptr_eq(left.space(), right.space()) {
        return Err(PresheafError::SpaceMismatch);
    }
    let space = left.space().clone();
    let rsort = right_sort_map(right)?;
    let n = space.contexts().len();
    let sort_of = |ctx: usize, x: usize| rsort[space.fst_index(&space.context(ctx).entries()[x]).expect("known sort")];

    let mut reps = Vec::new();
    let mut classes = Vec::new();
    let mut generators = Vec::new();
    let mut cells = Vec::new();
    for si in 0..left.sorts().len() {
        let (mut sort_reps, mut sort_classes, mut sort_gens, mut sort_cells) = (vec![], vec![], vec![], vec![]);
        for ci in 0..n {
            let mut raw: Vec<Triple> = Vec::new();
            for mid in 0..n {
                let sizes: Vec<usize> =
                    (0..space.context(mid).len()).map(|x| right.cell_size(sort_of(mid, x), ci)).collect();
                let envs = tuples(&sizes);
                for elem in 0..left.cell_size(si, mid) {
                    for env in &envs {
                        raw.push(Triple { mid, elem, env: env.clone() });
                    }
                }
            }
            let index: HashMap<Triple, usize> = raw.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
            let mut uf = UnionFind::new(raw.len());
            let mut gens = Vec::new();
            for (src, tgt, r) in space.all_renamings() {
                let rho = &space.renamings(src, tgt)[r];
                let sizes: Vec<usize> =
                    (0..space.context(src).len()).map(|x| right.cell_size(sort_of(src, x), ci)).collect();
                for env in tuples(&sizes) {
                    let pulled: Vec<usize> = rho.map().iter().map(|&y| env[y]).collect();
                    for t in 0..left.cell_size(si, tgt) {
                        let a = Triple { mid: src, elem: left.act(si, src, tgt, r, t), env: env.clone() };
                        let b = Triple { mid: tgt, elem: t, env: pulled.clone() };
                        uf.union(index[&a], index[&b]);
                        gens.push((a, b));
                    }
                }
            }
            let mut root_class: HashMap<usize, usize> = HashMap::new();
            let mut cell_reps = Vec::new();
            let mut class_of = HashMap::with_capacity(raw.len());
            for (i, t) in raw.iter().enumerate() {
                let root = uf.find(i);
                let k = *root_class.entry(root).or_insert_with(|| {
                    cell_reps.push(t.clone());
                    cell_reps.len() - 1
                });
                class_of.insert(t.clone(), k);
            }
            let labels = cell_reps
                .iter()
                .map(|t| {
                    let env: Vec<&str> = t
                        .env
                        .iter()
                        .enumerate()
                        .map(|(x, &q)| right.cell(sort_of(t.mid, x), ci)[q].as_str())
                        .collect();
                    format!("[{}|{}|{}]", space.context(t.mid), left.cell(si, t.mid)[t.elem], env.join(","))
                })
                .collect();
            sort_reps.push(cell_reps);
            sort_classes.push(class_of);
            sort_gens.push(gens);
            sort_cells.push(labels);
        }
        reps.push(sort_reps);
        classes.push(sort_classes);
        generators.push(sort_gens);
        cells.push(sort_cells);
    }

    let structure = FinStructure::from_fn(space.clone(), left.sorts().to_vec(), cells, |si, rho, k| {
        let src = space.context_index(rho.source())?;
        let tgt = space.context_index(rho.target())?;
        let r = space.renaming_position(src, tgt, rho.map()).expect("enumerated");
        let t = &reps[si][tgt][k];
        let env = t
            .env
            .iter()
            .enumerate()
            .map(|(x, &q)| right.act(sort_of(t.mid, x), src, tgt, r, q))
            .collect();
        let moved = Triple { mid: t.mid, elem: t.elem, env };
        classes[si][src]
            .get(&moved)
            .copied()
            .ok_or_else(|| PresheafError::NotWellDefined("renamed triple outside the enumeration".into()))
    })?;

    Ok(Tensor {
        left: left.clone(),
        right: right.clone(),
        structure: Arc::new(structure),
        reps,
        classes,
        generators,
    })
}

impl Tensor {
    pub fn class_of(&self, sort: usize, ctx: usize, triple: &Triple) -> Result<usize, PresheafError> {
        self.classes[sort][ctx].get(triple).copied().ok_or_else(|| {
            PresheafError::BoundExceeded(format!(
                "triple over {} outside the enumeration",
                self.structure.space().context(triple.mid)
            ))
        })
    }

    pub fn representative(&self, sort: usize, ctx: usize, class: usize) -> &Triple {
        &self.reps[sort][ctx][class]
    }

    /// Every raw triple of a cell with its class.
    pub fn raw(&self, sort: usize, ctx: usize) -> impl Iterator<Item = (&Triple, usize)> {
        self.classes[sort][ctx].iter().map(|(t, &k)| (t, k))
    }

    pub fn raw_count(&self) -> usize {
        self.classes.iter().flatten().map(HashMap::len).sum()
    }

    /// The generating pairs of the quotient relation for a cell.
    pub fn generators(&self, sort: usize, ctx: usize) -> &[(Triple, Triple)] {
        &self.generators[sort][ctx]
    }

    /// Right-factor sort index of position `x` of middle context `mid`.
    pub fn right_sort(&self, mid: usize, x: usize) -> usize {
        let space = self.structure.space();
        let s = &space.context(mid).entries()[x];
        self.right.sort_index(&Sort::First(s.clone())).expect("right factor covers first-class sorts")
    }

    /// Define a map out of the tensor on raw triples, checking that it is
    /// constant on every class.
    pub fn map_classes(
        &self,
        mut f: impl FnMut(usize, usize, &Triple) -> Result<usize, PresheafError>,
    ) -> Result<Morphism, PresheafError> {
        let mut components = Vec::new();
        for si in 0..self.reps.len() {
            let mut per_ctx = Vec::new();
            for ci in 0..self.reps[si].len() {
                let mut images: Vec<Option<usize>> = vec![None; self.reps[si][ci].len()];
                let mut raws: Vec<(&Triple, usize)> = self.raw(si, ci).collect();
                raws.sort();
                for (t, k) in raws {
                    let img = f(si, ci, t)?;
                    match images[k] {
                        None => images[k] = Some(img),
                        Some(prev) if prev != img => {
                            return Err(PresheafError::NotWellDefined(format!(
                                "class {} over {} has images {prev} and {img}",
                                self.structure.cell(si, ci)[k],
                                self.structure.space().context(ci)
                            )))
                        }
                        Some(_) => {}
                    }
                }
                per_ctx.push(images.into_iter().map(|i| i.expect("every class has a raw triple")).collect());
            }
            components.push(per_ctx);
        }
        Ok(Morphism { components })
    }
}

/// `f ⊗ g : P ⊗ Q → P' ⊗ Q'` for `f : P → P'` and `g : Q → Q'`.
pub fn tensor_map(f: &Morphism, g: &Morphism, source: &Tensor, target: &Tensor) -> Result<Morphism, PresheafError> {
    source.map_classes(|si, ci, t| {
        let env = t.env.iter().enumerate().map(|(x, &q)| g.apply(source.right_sort(t.mid, x), ci, q)).collect();
        target.class_of(si, ci, &Triple { mid: t.mid, elem: f.apply(si, t.mid, t.elem), env })
    })
}

/// The associator `(P⊗Q)⊗L → P⊗(Q⊗L)`:
/// `[[p, q]_{Γ1}, e]_{Γ2} ↦ [p, ⟨[q_x, e]_{Γ2}⟩_x]_{Γ1}`.
///
/// With `swapped`, the inner environment tuple is reversed; this corrupted
/// variant exists for mutation tests.
pub fn associator(
    pq: &Tensor,
    pq_l: &Tensor,
    ql: &Tensor,
    p_ql: &Tensor,
    swapped: bool,
) -> Result<Morphism, PresheafError> {
    pq_l.map_classes(|si, ci, outer| {
        let inner = pq.representative(si, outer.mid, outer.elem);
        let mut env = Vec::with_capacity(inner.env.len());
        for (x, &q) in inner.env.iter().enumerate() {
            let qs = pq.right_sort(inner.mid, x);
            env.push(ql.class_of(qs, ci, &Triple { mid: outer.mid, elem: q, env: outer.env.clone() })?);
        }
        if swapped {
            env.reverse();
        }
        p_ql.class_of(si, ci, &Triple { mid: inner.mid, elem: inner.elem, env })
    })
}
