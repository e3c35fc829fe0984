use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::sorts::Sort;

use super::laws::Pointed;
use super::{ContextSpace, FinStructure, PresheafError, Shape, SortId};

/// Building blocks for random structures. Each atom is parametrised by the
/// first-class sort whose variables it mentions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    /// One closed element in every context.
    Const,
    /// One element per variable of the sort.
    Var(SortId),
    /// One element per unordered pair of variables, repetition allowed.
    Sym2(SortId),
    /// One element per nonempty set of variables.
    Subset(SortId),
}

impl Atom {
    fn build(&self, space: &Arc<ContextSpace>, sort: &Sort<SortId>, tag: usize) -> Result<FinStructure, PresheafError> {
        let sorts = vec![sort.clone()];
        match self {
            Atom::Const => FinStructure::polynomial(space.clone(), sorts, &[Shape::new(format!("k{tag}"), sort.clone(), vec![])]),
            Atom::Var(s) => {
                FinStructure::polynomial(space.clone(), sorts, &[Shape::new(format!("v{tag}"), sort.clone(), vec![s.clone()])])
            }
            Atom::Sym2(s) => FinStructure::polynomial(
                space.clone(),
                sorts,
                &[Shape::symmetric(format!("m{tag}"), sort.clone(), vec![s.clone(), s.clone()])],
            ),
            Atom::Subset(s) => subsets(space, sort.clone(), s, tag),
        }
    }
}

fn subsets(space: &Arc<ContextSpace>, sort: Sort<SortId>, of: &SortId, tag: usize) -> Result<FinStructure, PresheafError> {
    let sets: Vec<Vec<BTreeSet<usize>>> = space
        .contexts()
        .iter()
        .map(|ctx| {
            let vars = ctx.vars_of_sort(of);
            (1u32..1 << vars.len())
                .map(|mask| vars.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect())
                .collect()
        })
        .collect();
    let cells = vec![sets
        .iter()
        .map(|cell| {
            cell.iter()
                .map(|set| {
                    let inner: Vec<String> = set.iter().map(|p| p.to_string()).collect();
                    format!("s{tag}{{{}}}", inner.join(","))
                })
                .collect()
        })
        .collect()];
    let space2 = space.clone();
    FinStructure::from_fn(space.clone(), vec![sort], cells, |_, rho, e| {
        let src = space2.context_index(rho.source())?;
        let tgt = space2.context_index(rho.target())?;
        let image: BTreeSet<usize> = sets[tgt][e].iter().map(|&p| rho.apply(p)).collect();
        sets[src]
            .iter()
            .position(|s| *s == image)
            .ok_or_else(|| PresheafError::Malformed("subset image".into()))
    })
}

/// The sum of the given atoms at a single sort.
pub fn from_atoms(space: &Arc<ContextSpace>, sort: &Sort<SortId>, atoms: &[Atom]) -> Result<FinStructure, PresheafError> {
    let mut acc = FinStructure::empty(space.clone(), vec![sort.clone()]);
    for (tag, atom) in atoms.iter().enumerate() {
        acc = acc.sum(&atom.build(space, sort, tag)?)?;
    }
    Ok(acc)
}

/// Place per-sort structures side by side.
fn juxtapose(space: &Arc<ContextSpace>, parts: Vec<FinStructure>) -> Result<FinStructure, PresheafError> {
    let sorts: Vec<Sort<SortId>> = parts.iter().flat_map(|p| p.sorts().to_vec()).collect();
    let n = space.contexts().len();
    let cells = parts.iter().map(|p| (0..n).map(|ci| p.cell(0, ci).to_vec()).collect()).collect();
    FinStructure::from_fn(space.clone(), sorts, cells, |si, rho, e| parts[si].act_along(0, rho, e))
}

fn pick_atoms<R: Rng>(
    space: &Arc<ContextSpace>,
    sort: &Sort<SortId>,
    menu: &[Atom],
    max_atoms: usize,
    cap: usize,
    rng: &mut R,
) -> Result<FinStructure, PresheafError> {
    loop {
        let count = rng.gen_range(0..=max_atoms);
        let atoms: Vec<Atom> = (0..count).map(|_| menu.choose(rng).expect("nonempty menu").clone()).collect();
        let s = from_atoms(space, sort, &atoms)?;
        if s.max_cell() <= cap {
            return Ok(s);
        }
    }
}

/// A random structure over the first-class sorts whose elements mention at
/// most one variable, with at most `cap` elements per cell.
pub fn random_homogeneous<R: Rng>(space: &Arc<ContextSpace>, cap: usize, rng: &mut R) -> Result<Arc<FinStructure>, PresheafError> {
    let parts = space
        .system()
        .fst_sorts()
        .iter()
        .map(|s| pick_atoms(space, &Sort::First(s.clone()), &[Atom::Const, Atom::Var(s.clone())], 3, cap, rng))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Arc::new(juxtapose(space, parts)?))
}

/// A random structure over the second-class sorts, with at most `cap`
/// elements per cell.
pub fn random_second_class<R: Rng>(space: &Arc<ContextSpace>, cap: usize, rng: &mut R) -> Result<Arc<FinStructure>, PresheafError> {
    let fst = space.system().fst_sorts().to_vec();
    let mut menu = vec![Atom::Const];
    for s in &fst {
        menu.extend([Atom::Var(s.clone()), Atom::Sym2(s.clone()), Atom::Subset(s.clone())]);
    }
    let parts = space
        .system()
        .snd_sorts()
        .iter()
        .map(|s| pick_atoms(space, &Sort::Second(s.clone()), &menu, 3, cap, rng))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Arc::new(juxtapose(space, parts)?))
}

/// A random homogeneous structure with a randomly chosen point.
pub fn random_pointed<R: Rng>(space: &Arc<ContextSpace>, cap: usize, rng: &mut R) -> Result<Pointed, PresheafError> {
    loop {
        let carrier = random_homogeneous(space, cap, rng)?;
        let mut images = Vec::new();
        for s in space.system().fst_sorts() {
            let si = carrier.sort_index(&Sort::First(s.clone())).expect("homogeneous sorts");
            let single = space.context_index(&crate::sorts::Context::new(vec![s.clone()]))?;
            let size = carrier.cell_size(si, single);
            if size == 0 {
                break;
            }
            images.push(rng.gen_range(0..size));
        }
        if images.len() == space.system().fst_sorts().len() {
            return Pointed::new(carrier, &images);
        }
    }
}
