//! Explicit finite presheaves over bounded contexts.
//!
//! A [`FinStructure`] stores, for every index sort and every context up to a
//! length bound, a finite list of labelled elements, together with the full
//! renaming action. On top of it the submodules compute the substitution
//! tensor as a coend quotient, its mediators, the right exponential, and
//! check the actegory, skew-monoidal and pointed-tensor laws.

mod exponential;
mod io;
mod laws;
mod random;
mod solve;
mod tensor;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::sorts::{enumerate_contexts, enumerate_renamings, Context, Renaming, Sort, SortingSystem};

pub use exponential::{check_universal_property, exponential, Exponential, Family};
pub use io::{load_structure, ActionSpec, CellSpec, ShapeSpec, SortSpec, StructureFile};
pub use laws::{
    check_action_axioms, check_pointed_tensor, check_skew, enumerate_morphisms, left_unitor, left_unitor_inverse, right_unitor,
    right_unitor_inverse, skew_empty_witness, tensor_point, AssociatorVariant, Pointed, SkewObject,
};
pub use random::{from_atoms, random_homogeneous, random_pointed, random_second_class, Atom};
pub use tensor::{associator, tensor, tensor_map, Tensor, Triple};

pub type SortId = String;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresheafError {
    #[error("context {0} exceeds the enumeration bound")]
    BoundExceeded(String),
    #[error("structures live over different context spaces")]
    SpaceMismatch,
    #[error("index sorts do not match: {0}")]
    SortMismatch(String),
    #[error("functor law violated: {0}")]
    NotFunctorial(String),
    #[error("map is not well defined on quotient classes: {0}")]
    NotWellDefined(String),
    #[error("malformed structure: {0}")]
    Malformed(String),
}

/// All contexts up to a bound over a fixed list of first-class sorts, with
/// every renaming between them.
#[derive(Debug)]
pub struct ContextSpace {
    system: SortingSystem<SortId>,
    bound: usize,
    contexts: Vec<Context<SortId>>,
    index: HashMap<Context<SortId>, usize>,
    renamings: Vec<Vec<Vec<Renaming<SortId>>>>,
    renaming_index: HashMap<(usize, usize, Vec<usize>), usize>,
}

impl ContextSpace {
    pub fn new(system: SortingSystem<SortId>, bound: usize) -> Arc<Self> {
        let contexts = enumerate_contexts(system.fst_sorts(), bound);
        let index = contexts.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let mut renamings = Vec::with_capacity(contexts.len());
        let mut renaming_index = HashMap::new();
        for (si, src) in contexts.iter().enumerate() {
            let mut row = Vec::with_capacity(contexts.len());
            for (ti, tgt) in contexts.iter().enumerate() {
                let rs = enumerate_renamings(src, tgt);
                for (ri, r) in rs.iter().enumerate() {
                    renaming_index.insert((si, ti, r.map().to_vec()), ri);
                }
                row.push(rs);
            }
            renamings.push(row);
        }
        Arc::new(ContextSpace { system, bound, contexts, index, renamings, renaming_index })
    }

    pub fn system(&self) -> &SortingSystem<SortId> {
        &self.system
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn contexts(&self) -> &[Context<SortId>] {
        &self.contexts
    }

    pub fn context(&self, idx: usize) -> &Context<SortId> {
        &self.contexts[idx]
    }

    pub fn context_index(&self, ctx: &Context<SortId>) -> Result<usize, PresheafError> {
        self.index.get(ctx).copied().ok_or_else(|| PresheafError::BoundExceeded(ctx.to_string()))
    }

    /// Renamings `src → tgt` (by context index).
    pub fn renamings(&self, src: usize, tgt: usize) -> &[Renaming<SortId>] {
        &self.renamings[src][tgt]
    }

    pub fn renaming_position(&self, src: usize, tgt: usize, map: &[usize]) -> Option<usize> {
        self.renaming_index.get(&(src, tgt, map.to_vec())).copied()
    }

    pub fn identity_position(&self, ctx: usize) -> usize {
        let n = self.contexts[ctx].len();
        let map: Vec<usize> = (0..n).collect();
        self.renaming_position(ctx, ctx, &map).expect("identity renaming is enumerated")
    }

    /// Index of a first-class sort in the system's list.
    pub fn fst_index(&self, s: &str) -> Option<usize> {
        self.system.fst_sorts().iter().position(|t| t == s)
    }

    /// Every `(src, tgt, renaming position)` triple.
    pub fn all_renamings(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let n = self.contexts.len();
        (0..n).flat_map(move |s| (0..n).flat_map(move |t| (0..self.renamings[s][t].len()).map(move |r| (s, t, r))))
    }
}

/// A finite presheaf: `cells[sort][ctx]` lists element labels, and
/// `action[sort][src][tgt][r]` sends an element index of the `tgt` cell to
/// one of the `src` cell along renaming `r : src → tgt`.
#[derive(Clone)]
pub struct FinStructure {
    space: Arc<ContextSpace>,
    sorts: Vec<Sort<SortId>>,
    cells: Vec<Vec<Vec<String>>>,
    action: Vec<Vec<Vec<Vec<Vec<usize>>>>>,
}

impl fmt::Debug for FinStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinStructure").field("sorts", &self.sorts).field("cells", &self.cells).finish()
    }
}

impl FinStructure {
    /// Build a structure from element lists and an action function
    /// `(sort, renaming, element of the target cell) ↦ element of the source cell`.
    pub fn from_fn(
        space: Arc<ContextSpace>,
        sorts: Vec<Sort<SortId>>,
        cells: Vec<Vec<Vec<String>>>,
        mut act: impl FnMut(usize, &Renaming<SortId>, usize) -> Result<usize, PresheafError>,
    ) -> Result<Self, PresheafError> {
        let n = space.contexts.len();
        if cells.len() != sorts.len() || cells.iter().any(|c| c.len() != n) {
            return Err(PresheafError::Malformed("cell table shape".into()));
        }
        let mut action = Vec::with_capacity(sorts.len());
        for (si, sort_cells) in cells.iter().enumerate() {
            let mut by_src = Vec::with_capacity(n);
            for src in 0..n {
                let mut by_tgt = Vec::with_capacity(n);
                for tgt in 0..n {
                    let mut per_r = Vec::new();
                    for r in space.renamings(src, tgt) {
                        let mut table = Vec::with_capacity(sort_cells[tgt].len());
                        for e in 0..sort_cells[tgt].len() {
                            let img = act(si, r, e)?;
                            if img >= sort_cells[src].len() {
                                return Err(PresheafError::Malformed(format!(
                                    "action of sort {} sends {} outside its cell",
                                    sorts[si], sort_cells[tgt][e]
                                )));
                            }
                            table.push(img);
                        }
                        per_r.push(table);
                    }
                    by_tgt.push(per_r);
                }
                by_src.push(by_tgt);
            }
            action.push(by_src);
        }
        Ok(FinStructure { space, sorts, cells, action })
    }

    /// The structure with no elements at the given sorts.
    pub fn empty(space: Arc<ContextSpace>, sorts: Vec<Sort<SortId>>) -> Self {
        let n = space.contexts.len();
        let cells = vec![vec![Vec::new(); n]; sorts.len()];
        FinStructure::from_fn(space, sorts, cells, |_, _, _| unreachable!("no elements")).expect("empty structure")
    }

    /// The terminal structure: one element everywhere.
    pub fn terminal(space: Arc<ContextSpace>, sorts: Vec<Sort<SortId>>) -> Self {
        let n = space.contexts.len();
        let cells = vec![vec![vec!["*".to_string()]; n]; sorts.len()];
        FinStructure::from_fn(space, sorts, cells, |_, _, _| Ok(0)).expect("terminal structure")
    }

    /// The presheaf of variables over the space's first-class sorts.
    pub fn variables(space: Arc<ContextSpace>) -> Self {
        let shapes = space
            .system()
            .fst_sorts()
            .iter()
            .map(|s| Shape::new("v", Sort::First(s.clone()), vec![s.clone()]))
            .collect::<Vec<_>>();
        let sorts = space.system().fst_sorts().iter().cloned().map(Sort::First).collect();
        FinStructure::polynomial(space, sorts, &shapes).expect("variables form a structure")
    }

    /// A sum of shapes: each shape contributes, at every context, one element
    /// per choice of positions for its argument sorts.
    pub fn polynomial(space: Arc<ContextSpace>, sorts: Vec<Sort<SortId>>, shapes: &[Shape]) -> Result<Self, PresheafError> {
        let n = space.contexts.len();
        let mut elems: Vec<Vec<Vec<(usize, Vec<usize>)>>> = vec![vec![Vec::new(); n]; sorts.len()];
        for (shape_idx, shape) in shapes.iter().enumerate() {
            let si = sorts
                .iter()
                .position(|s| s == &shape.sort)
                .ok_or_else(|| PresheafError::SortMismatch(format!("shape {} at {}", shape.name, shape.sort)))?;
            for (ci, ctx) in space.contexts.iter().enumerate() {
                for choice in shape.choices(ctx) {
                    elems[si][ci].push((shape_idx, choice));
                }
            }
        }
        let mut lookup: Vec<Vec<HashMap<(usize, Vec<usize>), usize>>> = Vec::new();
        let mut cells = Vec::new();
        for sort_elems in &elems {
            let mut lk = Vec::new();
            let mut cs = Vec::new();
            for cell in sort_elems {
                lk.push(cell.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect::<HashMap<_, _>>());
                cs.push(cell.iter().map(|(sh, pos)| shapes[*sh].label(pos)).collect::<Vec<_>>());
            }
            lookup.push(lk);
            cells.push(cs);
        }
        let space2 = space.clone();
        FinStructure::from_fn(space, sorts, cells, move |si, r, e| {
            let src = space2.context_index(r.source())?;
            let tgt = space2.context_index(r.target())?;
            let (sh, pos) = &elems[si][tgt][e];
            let moved = shapes[*sh].normalize(pos.iter().map(|&p| r.apply(p)).collect());
            lookup[si][src]
                .get(&(*sh, moved))
                .copied()
                .ok_or_else(|| PresheafError::Malformed("shape not closed under renaming".into()))
        })
    }

    pub fn space(&self) -> &Arc<ContextSpace> {
        &self.space
    }

    pub fn sorts(&self) -> &[Sort<SortId>] {
        &self.sorts
    }

    pub fn sort_index(&self, sort: &Sort<SortId>) -> Option<usize> {
        self.sorts.iter().position(|s| s == sort)
    }

    pub fn cell(&self, sort: usize, ctx: usize) -> &[String] {
        &self.cells[sort][ctx]
    }

    pub fn cell_size(&self, sort: usize, ctx: usize) -> usize {
        self.cells[sort][ctx].len()
    }

    pub fn max_cell(&self) -> usize {
        self.cells.iter().flatten().map(Vec::len).max().unwrap_or(0)
    }

    pub fn total_elements(&self) -> usize {
        self.cells.iter().flatten().map(Vec::len).sum()
    }

    /// Action of renaming number `r : src → tgt` on element `elem` of the
    /// `tgt` cell.
    pub fn act(&self, sort: usize, src: usize, tgt: usize, r: usize, elem: usize) -> usize {
        self.action[sort][src][tgt][r][elem]
    }

    /// Action along an arbitrary renaming between enumerated contexts.
    pub fn act_along(&self, sort: usize, renaming: &Renaming<SortId>, elem: usize) -> Result<usize, PresheafError> {
        let src = self.space.context_index(renaming.source())?;
        let tgt = self.space.context_index(renaming.target())?;
        let r = self
            .space
            .renaming_position(src, tgt, renaming.map())
            .ok_or_else(|| PresheafError::Malformed("renaming not enumerated".into()))?;
        Ok(self.act(sort, src, tgt, r, elem))
    }

    /// Identity and composition laws for the renaming action.
    pub fn check_functor_laws(&self) -> Result<u64, PresheafError> {
        let space = &self.space;
        let n = space.contexts.len();
        let mut checked = 0u64;
        for si in 0..self.sorts.len() {
            for c in 0..n {
                let id = space.identity_position(c);
                for e in 0..self.cell_size(si, c) {
                    checked += 1;
                    if self.act(si, c, c, id, e) != e {
                        return Err(PresheafError::NotFunctorial(format!(
                            "identity moves {} at {}",
                            self.cells[si][c][e],
                            space.contexts[c]
                        )));
                    }
                }
            }
            for (c1, c2, r1) in space.all_renamings() {
                let rho = &space.renamings(c1, c2)[r1];
                for c3 in 0..n {
                    for (r2, rho2) in space.renamings(c2, c3).iter().enumerate() {
                        let comp = rho.compose(rho2).expect("composable");
                        let rc = space.renaming_position(c1, c3, comp.map()).expect("enumerated");
                        for e in 0..self.cell_size(si, c3) {
                            checked += 1;
                            let stepwise = self.act(si, c1, c2, r1, self.act(si, c2, c3, r2, e));
                            if stepwise != self.act(si, c1, c3, rc, e) {
                                return Err(PresheafError::NotFunctorial(format!(
                                    "composition fails on {} at {}",
                                    self.cells[si][c3][e],
                                    space.contexts[c3]
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(checked)
    }

    /// Coproduct of two structures over the same sorts.
    pub fn sum(&self, other: &FinStructure) -> Result<FinStructure, PresheafError> {
        if !Arc::ptr_eq(&self.space, &other.space) {
            return Err(PresheafError::SpaceMismatch);
        }
        if self.sorts != other.sorts {
            return Err(PresheafError::SortMismatch("sum of differently indexed structures".into()));
        }
        let cells = self
            .cells
            .iter()
            .zip(&other.cells)
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| {
                        x.iter().map(|l| format!("l.{l}")).chain(y.iter().map(|l| format!("r.{l}"))).collect()
                    })
                    .collect()
            })
            .collect();
        let space = self.space.clone();
        FinStructure::from_fn(self.space.clone(), self.sorts.clone(), cells, |si, r, e| {
            let src = space.context_index(r.source())?;
            let tgt = space.context_index(r.target())?;
            let ri = space.renaming_position(src, tgt, r.map()).expect("enumerated");
            let left = self.cell_size(si, tgt);
            Ok(if e < left {
                self.act(si, src, tgt, ri, e)
            } else {
                self.cell_size(si, src) + other.act(si, src, tgt, ri, e - left)
            })
        })
    }
}

/// A variable-filled shape: at a context, one element per choice of
/// positions of the argument sorts. Symmetric shapes identify choices up to
/// reordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    pub name: String,
    pub sort: Sort<SortId>,
    pub args: Vec<SortId>,
    pub symmetric: bool,
}

impl Shape {
    pub fn new(name: impl Into<String>, sort: Sort<SortId>, args: Vec<SortId>) -> Self {
        Shape { name: name.into(), sort, args, symmetric: false }
    }

    pub fn symmetric(name: impl Into<String>, sort: Sort<SortId>, args: Vec<SortId>) -> Self {
        Shape { name: name.into(), sort, args, symmetric: true }
    }

    fn normalize(&self, mut pos: Vec<usize>) -> Vec<usize> {
        if self.symmetric {
            pos.sort_unstable();
        }
        pos
    }

    fn choices(&self, ctx: &Context<SortId>) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![Vec::new()];
        for s in &self.args {
            let opts = ctx.vars_of_sort(s);
            out = out
                .into_iter()
                .flat_map(|c| {
                    opts.iter().map(move |&p| {
                        let mut c2 = c.clone();
                        c2.push(p);
                        c2
                    })
                })
                .collect();
        }
        if self.symmetric {
            out.retain(|c| c.windows(2).all(|w| w[0] <= w[1]));
        }
        out
    }

    fn label(&self, pos: &[usize]) -> String {
        let inner: Vec<String> = pos.iter().map(|p| p.to_string()).collect();
        format!("{}({})", self.name, inner.join(","))
    }
}

/// A natural map between two structures indexed by the same sorts:
/// `components[sort][ctx][elem]` is the image element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    pub components: Vec<Vec<Vec<usize>>>,
}

impl Morphism {
    pub fn identity(a: &FinStructure) -> Self {
        Morphism {
            components: a.cells.iter().map(|sc| sc.iter().map(|c| (0..c.len()).collect()).collect()).collect(),
        }
    }

    pub fn from_fn(
        source: &FinStructure,
        mut f: impl FnMut(usize, usize, usize) -> Result<usize, PresheafError>,
    ) -> Result<Self, PresheafError> {
        let mut components = Vec::with_capacity(source.sorts.len());
        for (si, sc) in source.cells.iter().enumerate() {
            let mut per_ctx = Vec::with_capacity(sc.len());
            for (ci, cell) in sc.iter().enumerate() {
                per_ctx.push((0..cell.len()).map(|e| f(si, ci, e)).collect::<Result<Vec<_>, _>>()?);
            }
            components.push(per_ctx);
        }
        Ok(Morphism { components })
    }

    pub fn apply(&self, sort: usize, ctx: usize, elem: usize) -> usize {
        self.components[sort][ctx][elem]
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Morphism) -> Morphism {
        Morphism {
            components: self
                .components
                .iter()
                .enumerate()
                .map(|(si, sc)| {
                    sc.iter()
                        .enumerate()
                        .map(|(ci, cell)| cell.iter().map(|&e| next.apply(si, ci, e)).collect())
                        .collect()
                })
                .collect(),
        }
    }

    /// First element where two maps differ, described with labels.
    pub fn first_difference(&self, other: &Morphism, source: &FinStructure, target: &FinStructure) -> Option<String> {
        for (si, sc) in self.components.iter().enumerate() {
            for (ci, cell) in sc.iter().enumerate() {
                for (e, &img) in cell.iter().enumerate() {
                    let other_img = other.apply(si, ci, e);
                    if img != other_img {
                        return Some(format!(
                            "at {} over {}: {} ↦ {} versus {}",
                            source.sorts[si],
                            source.space.contexts[ci],
                            source.cells[si][ci][e],
                            target.cells[si][ci][img],
                            target.cells[si][ci][other_img]
                        ));
                    }
                }
            }
        }
        None
    }

    pub fn element_count(&self) -> u64 {
        self.components.iter().flatten().map(|c| c.len() as u64).sum()
    }

    /// Naturality against every enumerated renaming.
    pub fn check_natural(&self, source: &FinStructure, target: &FinStructure) -> Result<u64, String> {
        let space = &source.space;
        let mut checked = 0;
        for si in 0..source.sorts.len() {
            for (src, tgt, r) in space.all_renamings() {
                for e in 0..source.cell_size(si, tgt) {
                    checked += 1;
                    let lhs = self.apply(si, src, source.act(si, src, tgt, r, e));
                    let rhs = target.act(si, src, tgt, r, self.apply(si, tgt, e));
                    if lhs != rhs {
                        return Err(format!(
                            "naturality fails for {} over {} along {:?}",
                            source.cells[si][tgt][e],
                            space.contexts[tgt],
                            space.renamings(src, tgt)[r].map()
                        ));
                    }
                }
            }
        }
        Ok(checked)
    }

    /// Bijectivity in every cell.
    pub fn check_bijective(&self, source: &FinStructure, target: &FinStructure) -> Result<u64, String> {
        let mut checked = 0;
        for (si, sc) in self.components.iter().enumerate() {
            for (ci, cell) in sc.iter().enumerate() {
                let mut hit = vec![false; target.cell_size(si, ci)];
                for &img in cell {
                    checked += 1;
                    if hit[img] {
                        return Err(format!(
                            "{} hit twice over {}",
                            target.cells[si][ci][img],
                            source.space.contexts[ci]
                        ));
                    }
                    hit[img] = true;
                }
                if let Some(miss) = hit.iter().position(|h| !h) {
                    return Err(format!("{} not hit over {}", target.cells[si][ci][miss], source.space.contexts[ci]));
                }
            }
        }
        Ok(checked)
    }
}
