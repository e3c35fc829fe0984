//! Heterogeneous sorting systems, sorted contexts and renamings.
//!
//! Contexts are nameless: a variable is a position, counted from the left
//! starting at zero. Binders extend a context on the right. A renaming
//! `ρ : Γ1 → Γ2` sends every position of `Γ2` to a position of `Γ1` carrying
//! the same sort, so it moves terms over `Γ2` to terms over `Γ1`.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Bound collecting everything a sort identifier must support.
pub trait SortName:
    Clone + Eq + Ord + Hash + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

impl<T> SortName for T where
    T: Clone + Eq + Ord + Hash + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SortError {
    #[error("duplicate sort `{0}`")]
    DuplicateSort(String),
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("context mismatch: expected {expected}, found {found}")]
    ContextMismatch { expected: String, found: String },
    #[error("renaming does not preserve sorts at position {position}")]
    SortMismatch { position: usize },
    #[error("position {position} out of range for a context of length {len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("renaming map has length {found}, expected {expected}")]
    MapLength { expected: usize, found: usize },
}

/// A sort tagged with the component of the sorting system it lives in.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sort<S> {
    First(S),
    Second(S),
}

impl<S> Sort<S> {
    pub fn id(&self) -> &S {
        match self {
            Sort::First(s) | Sort::Second(s) => s,
        }
    }

    pub fn is_first(&self) -> bool {
        matches!(self, Sort::First(_))
    }

    pub fn as_first(&self) -> Option<&S> {
        match self {
            Sort::First(s) => Some(s),
            Sort::Second(_) => None,
        }
    }
}

impl<S: fmt::Display> fmt::Display for Sort<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::First(s) => write!(f, "{s}"),
            Sort::Second(s) => write!(f, "C {s}"),
        }
    }
}

/// Membership test for a (possibly infinite) universe of sorts.
pub trait SortUniverse<S>: Send + Sync {
    fn contains(&self, sort: &Sort<S>) -> bool;
}

/// A finite heterogeneous sorting system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortingSystem<S> {
    fst: Vec<S>,
    snd: Vec<S>,
}

impl<S: SortName> SortingSystem<S> {
    pub fn new(fst: Vec<S>, snd: Vec<S>) -> Result<Self, SortError> {
        for part in [&fst, &snd] {
            let mut seen = BTreeSet::new();
            for s in part {
                if !seen.insert(s) {
                    return Err(SortError::DuplicateSort(s.to_string()));
                }
            }
        }
        Ok(SortingSystem { fst, snd })
    }

    pub fn homogeneous(fst: Vec<S>) -> Result<Self, SortError> {
        Self::new(fst, Vec::new())
    }

    pub fn fst_sorts(&self) -> &[S] {
        &self.fst
    }

    pub fn snd_sorts(&self) -> &[S] {
        &self.snd
    }

    pub fn is_homogeneous(&self) -> bool {
        self.snd.is_empty()
    }

    /// All sorts, first-class ones before second-class ones.
    pub fn sorts(&self) -> Vec<Sort<S>> {
        self.fst
            .iter()
            .cloned()
            .map(Sort::First)
            .chain(self.snd.iter().cloned().map(Sort::Second))
            .collect()
    }

    /// The homogeneous system of the first-class sorts.
    pub fn first_class(&self) -> SortingSystem<S> {
        SortingSystem {
            fst: self.fst.clone(),
            snd: Vec::new(),
        }
    }

    pub fn check_context(&self, ctx: &Context<S>) -> Result<(), SortError> {
        match ctx.iter().find(|s| !self.fst.contains(s)) {
            Some(s) => Err(SortError::UnknownSort(s.to_string())),
            None => Ok(()),
        }
    }
}

impl<S: SortName> SortUniverse<S> for SortingSystem<S> {
    fn contains(&self, sort: &Sort<S>) -> bool {
        match sort {
            Sort::First(s) => self.fst.contains(s),
            Sort::Second(s) => self.snd.contains(s),
        }
    }
}

/// An ordered list of first-class sorts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Context<S>(Vec<S>);

impl<S: SortName> Context<S> {
    pub fn new(entries: Vec<S>) -> Self {
        Context(entries)
    }

    pub fn empty() -> Self {
        Context(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, position: usize) -> Option<&S> {
        self.0.get(position)
    }

    pub fn sort_at(&self, position: usize) -> Result<&S, SortError> {
        self.0.get(position).ok_or(SortError::PositionOutOfRange {
            position,
            len: self.0.len(),
        })
    }

    pub fn iter(&self) -> std::slice::Iter<'_, S> {
        self.0.iter()
    }

    pub fn entries(&self) -> &[S] {
        &self.0
    }

    pub fn concat(&self, other: &Context<S>) -> Context<S> {
        let mut entries = self.0.clone();
        entries.extend(other.0.iter().cloned());
        Context(entries)
    }

    pub fn push(&mut self, sort: S) {
        self.0.push(sort);
    }

    /// Positions carrying sort `s`, in ascending order.
    pub fn vars_of_sort(&self, s: &S) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, t)| *t == s)
            .map(|(i, _)| i)
            .collect()
    }
}

impl<S: SortName> FromIterator<S> for Context<S> {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Context(iter.into_iter().collect())
    }
}

impl<S: fmt::Display> fmt::Display for Context<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "]")
    }
}

/// A sort-preserving renaming `source → target`, stored as a dense array
/// indexed by the positions of `target`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Renaming<S> {
    source: Context<S>,
    target: Context<S>,
    map: Vec<usize>,
}

impl<S: SortName> Renaming<S> {
    pub fn new(source: Context<S>, target: Context<S>, map: Vec<usize>) -> Result<Self, SortError> {
        if map.len() != target.len() {
            return Err(SortError::MapLength {
                expected: target.len(),
                found: map.len(),
            });
        }
        for (y, &x) in map.iter().enumerate() {
            if source.sort_at(x)? != target.sort_at(y)? {
                return Err(SortError::SortMismatch { position: y });
            }
        }
        Ok(Renaming { source, target, map })
    }

    pub fn identity(ctx: &Context<S>) -> Self {
        Renaming {
            source: ctx.clone(),
            target: ctx.clone(),
            map: (0..ctx.len()).collect(),
        }
    }

    pub fn source(&self) -> &Context<S> {
        &self.source
    }

    pub fn target(&self) -> &Context<S> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// Image of a position of the target context.
    pub fn apply(&self, y: usize) -> usize {
        self.map[y]
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.map.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Composite `self ; next : Γ1 → Γ3` for `self : Γ1 → Γ2`, `next : Γ2 → Γ3`.
    pub fn compose(&self, next: &Renaming<S>) -> Result<Renaming<S>, SortError> {
        if self.target != next.source {
            return Err(SortError::ContextMismatch {
                expected: self.target.to_string(),
                found: next.source.to_string(),
            });
        }
        Ok(Renaming {
            source: self.source.clone(),
            target: next.target.clone(),
            map: next.map.iter().map(|&y| self.map[y]).collect(),
        })
    }

    /// `ρ : Γ1 → Γ2` extended identically to `Γ1 ++ Δ → Γ2 ++ Δ`.
    pub fn extend(&self, delta: &Context<S>) -> Renaming<S> {
        let offset = self.source.len();
        let mut map = self.map.clone();
        map.extend((0..delta.len()).map(|j| offset + j));
        Renaming {
            source: self.source.concat(delta),
            target: self.target.concat(delta),
            map,
        }
    }

    /// Pairing `⟨ρ1, ρ2⟩ : Δ → Γ1 ++ Γ2` of `ρ1 : Δ → Γ1` and `ρ2 : Δ → Γ2`.
    pub fn pair(first: &Renaming<S>, second: &Renaming<S>) -> Result<Renaming<S>, SortError> {
        if first.source != second.source {
            return Err(SortError::ContextMismatch {
                expected: first.source.to_string(),
                found: second.source.to_string(),
            });
        }
        let mut map = first.map.clone();
        map.extend(second.map.iter().copied());
        Ok(Renaming {
            source: first.source.clone(),
            target: first.target.concat(&second.target),
            map,
        })
    }

    /// The weakening `Γ ++ Δ → Γ`.
    pub fn weakening(ctx: &Context<S>, delta: &Context<S>) -> Renaming<S> {
        Renaming {
            source: ctx.concat(delta),
            target: ctx.clone(),
            map: (0..ctx.len()).collect(),
        }
    }
}

/// Free-standing form of [`Renaming::identity`].
pub fn identity_renaming<S: SortName>(ctx: &Context<S>) -> Renaming<S> {
    Renaming::identity(ctx)
}

/// Free-standing form of [`Renaming::compose`].
pub fn compose_renamings<S: SortName>(
    first: &Renaming<S>,
    second: &Renaming<S>,
) -> Result<Renaming<S>, SortError> {
    first.compose(second)
}

/// `Γ1 ++ Γ2` with its two projections.
pub fn concat_contexts<S: SortName>(
    left: &Context<S>,
    right: &Context<S>,
) -> (Context<S>, Renaming<S>, Renaming<S>) {
    let joined = left.concat(right);
    let first = Renaming {
        source: joined.clone(),
        target: left.clone(),
        map: (0..left.len()).collect(),
    };
    let second = Renaming {
        source: joined.clone(),
        target: right.clone(),
        map: (0..right.len()).map(|i| left.len() + i).collect(),
    };
    (joined, first, second)
}

/// Positions of `ctx` carrying sort `s`.
pub fn vars_of_sort<S: SortName>(ctx: &Context<S>, s: &S) -> Vec<usize> {
    ctx.vars_of_sort(s)
}

/// All contexts over `sorts` of length at most `max_len`, shortest first and
/// lexicographic (in the order of `sorts`) within a length.
pub fn enumerate_contexts<S: SortName>(sorts: &[S], max_len: usize) -> Vec<Context<S>> {
    let mut out = vec![Context::empty()];
    let mut layer = vec![Context::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for ctx in &layer {
            for s in sorts {
                let mut c = ctx.clone();
                c.push(s.clone());
                next.push(c);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// All renamings `source → target`.
pub fn enumerate_renamings<S: SortName>(source: &Context<S>, target: &Context<S>) -> Vec<Renaming<S>> {
    let choices: Vec<Vec<usize>> = target.iter().map(|s| source.vars_of_sort(s)).collect();
    let mut maps: Vec<Vec<usize>> = vec![Vec::new()];
    for options in &choices {
        let mut next = Vec::with_capacity(maps.len() * options.len());
        for m in &maps {
            for &x in options {
                let mut m2 = m.clone();
                m2.push(x);
                next.push(m2);
            }
        }
        maps = next;
    }
    maps.into_iter()
        .map(|map| Renaming {
            source: source.clone(),
            target: target.clone(),
            map,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(s: &[&str]) -> Context<String> {
        s.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn identity_of_empty_context_is_empty() {
        assert!(Renaming::identity(&ctx(&[])).map().is_empty());
        assert_eq!(Renaming::identity(&ctx(&["b"])).map(), &[0]);
    }

    #[test]
    fn permuting_renaming_squares_to_collapse() {
        let g = ctx(&["b1", "f", "f", "b1"]);
        let rho = Renaming::new(g.clone(), g.clone(), vec![0, 2, 1, 0]).unwrap();
        let twice = rho.compose(&rho).unwrap();
        assert_eq!(twice.map(), &[0, 1, 2, 0]);
    }

    #[test]
    fn sort_preservation_is_enforced() {
        let err = Renaming::new(ctx(&["b", "c"]), ctx(&["c"]), vec![0]).unwrap_err();
        assert_eq!(err, SortError::SortMismatch { position: 0 });
    }

    #[test]
    fn concatenation_projections() {
        let (joined, p1, p2) = concat_contexts(&ctx(&["b"]), &ctx(&["c"]));
        assert_eq!(joined, ctx(&["b", "c"]));
        assert_eq!(p1.map(), &[0]);
        assert_eq!(p2.map(), &[1]);
        let (_, _, p2) = concat_contexts(&ctx(&[]), &ctx(&["b", "c"]));
        assert!(p2.is_identity());
    }

    #[test]
    fn vars_of_sort_picks_positions() {
        assert_eq!(ctx(&["b", "c", "b"]).vars_of_sort(&"b".to_string()), vec![0, 2]);
        assert!(ctx(&[]).vars_of_sort(&"b".to_string()).is_empty());
    }

    #[test]
    fn enumeration_counts() {
        let one = vec!["b".to_string()];
        let two = vec!["b".to_string(), "c".to_string()];
        assert_eq!(enumerate_contexts(&one, 0), vec![ctx(&[])]);
        assert_eq!(enumerate_contexts(&one, 2), vec![ctx(&[]), ctx(&["b"]), ctx(&["b", "b"])]);
        assert_eq!(enumerate_contexts(&two, 2).len(), 7);
        assert_eq!(enumerate_renamings(&ctx(&["b", "b"]), &ctx(&[])).len(), 1);
        assert_eq!(enumerate_renamings(&ctx(&["b", "b"]), &ctx(&["b"])).len(), 2);
        assert_eq!(enumerate_renamings(&ctx(&["b", "c"]), &ctx(&["c", "b"])).len(), 1);
    }

    #[test]
    fn duplicate_sorts_rejected_but_tags_separate() {
        assert!(SortingSystem::new(vec!["b".to_string(), "b".to_string()], vec![]).is_err());
        let sys = SortingSystem::new(vec!["b".to_string()], vec!["b".to_string()]).unwrap();
        assert!(sys.contains(&Sort::Second("b".to_string())));
        assert!(!sys.is_homogeneous());
    }
}
