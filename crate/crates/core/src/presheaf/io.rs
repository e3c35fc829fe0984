use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::sorts::{Context, Sort, SortingSystem};

use super::{ContextSpace, FinStructure, PresheafError, Shape, SortId};

/// An index sort as written in a structure file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortSpec {
    pub name: String,
    #[serde(default)]
    pub second: bool,
}

impl SortSpec {
    fn sort(&self) -> Sort<SortId> {
        if self.second {
            Sort::Second(self.name.clone())
        } else {
            Sort::First(self.name.clone())
        }
    }

    fn of(sort: &Sort<SortId>) -> Self {
        SortSpec { name: sort.id().clone(), second: !sort.is_first() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeSpec {
    pub name: String,
    pub sort: SortSpec,
    #[serde(default)]
    pub args: Vec<String>,
    #[serde(default)]
    pub symmetric: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSpec {
    pub sort: SortSpec,
    pub context: Vec<String>,
    pub elements: Vec<String>,
}

/// The action of one renaming `source → target` on a cell: `images[i]` is
/// the label of the image of the `i`-th element of the target cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSpec {
    pub sort: SortSpec,
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub map: Vec<usize>,
    pub images: Vec<String>,
}

/// A finite structure on disk: either a list of shapes, or explicit cells
/// with an action table. Cells not listed are empty and identity renamings
/// may be omitted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureFile {
    pub first_sorts: Vec<String>,
    #[serde(default)]
    pub second_sorts: Vec<String>,
    pub bound: usize,
    pub sorts: Vec<SortSpec>,
    #[serde(default)]
    pub shapes: Vec<ShapeSpec>,
    #[serde(default)]
    pub cells: Vec<CellSpec>,
    #[serde(default)]
    pub action: Vec<ActionSpec>,
}

impl StructureFile {
    /// Explicit form of an existing structure.
    pub fn from_structure(p: &FinStructure) -> Self {
        let space = p.space();
        let mut cells = Vec::new();
        let mut action = Vec::new();
        for (si, sort) in p.sorts().iter().enumerate() {
            for (ci, ctx) in space.contexts().iter().enumerate() {
                if p.cell_size(si, ci) > 0 {
                    cells.push(CellSpec {
                        sort: SortSpec::of(sort),
                        context: ctx.entries().to_vec(),
                        elements: p.cell(si, ci).to_vec(),
                    });
                }
            }
            for (src, tgt, r) in space.all_renamings() {
                let rho = &space.renamings(src, tgt)[r];
                if p.cell_size(si, tgt) == 0 || rho.is_identity() {
                    continue;
                }
                action.push(ActionSpec {
                    sort: SortSpec::of(sort),
                    source: rho.source().entries().to_vec(),
                    target: rho.target().entries().to_vec(),
                    map: rho.map().to_vec(),
                    images: (0..p.cell_size(si, tgt)).map(|e| p.cell(si, src)[p.act(si, src, tgt, r, e)].clone()).collect(),
                });
            }
        }
        StructureFile {
            first_sorts: space.system().fst_sorts().to_vec(),
            second_sorts: space.system().snd_sorts().to_vec(),
            bound: space.bound(),
            sorts: p.sorts().iter().map(SortSpec::of).collect(),
            shapes: Vec::new(),
            cells,
            action,
        }
    }

    /// Build the structure over a fresh context space.
    pub fn build(&self) -> Result<FinStructure, PresheafError> {
        let system = SortingSystem::new(self.first_sorts.clone(), self.second_sorts.clone())
            .map_err(|e| PresheafError::Malformed(e.to_string()))?;
        let space = ContextSpace::new(system, self.bound);
        self.build_in(&space)
    }

    /// Build the structure over an existing context space.
    pub fn build_in(&self, space: &Arc<ContextSpace>) -> Result<FinStructure, PresheafError> {
        if space.system().fst_sorts() != self.first_sorts.as_slice() || space.bound() != self.bound {
            return Err(PresheafError::SpaceMismatch);
        }
        let sorts: Vec<Sort<SortId>> = self.sorts.iter().map(SortSpec::sort).collect();
        let structure = if !self.shapes.is_empty() {
            if !self.cells.is_empty() || !self.action.is_empty() {
                return Err(PresheafError::Malformed("give either shapes or cells, not both".into()));
            }
            let shapes: Vec<Shape> = self
                .shapes
                .iter()
                .map(|s| {
                    if s.symmetric {
                        Shape::symmetric(s.name.clone(), s.sort.sort(), s.args.clone())
                    } else {
                        Shape::new(s.name.clone(), s.sort.sort(), s.args.clone())
                    }
                })
                .collect();
            FinStructure::polynomial(space.clone(), sorts, &shapes)?
        } else {
            self.explicit(space, sorts)?
        };
        structure.check_functor_laws()?;
        Ok(structure)
    }

    fn explicit(&self, space: &Arc<ContextSpace>, sorts: Vec<Sort<SortId>>) -> Result<FinStructure, PresheafError> {
        let sort_index = |spec: &SortSpec| {
            sorts
                .iter()
                .position(|s| *s == spec.sort())
                .ok_or_else(|| PresheafError::SortMismatch(format!("undeclared sort {}", spec.name)))
        };
        let n = space.contexts().len();
        let mut cells = vec![vec![Vec::new(); n]; sorts.len()];
        for cell in &self.cells {
            let si = sort_index(&cell.sort)?;
            let ci = space.context_index(&Context::new(cell.context.clone()))?;
            cells[si][ci] = cell.elements.clone();
        }
        let mut table: HashMap<(usize, usize, usize, Vec<usize>), Vec<String>> = HashMap::new();
        for a in &self.action {
            let si = sort_index(&a.sort)?;
            let src = space.context_index(&Context::new(a.source.clone()))?;
            let tgt = space.context_index(&Context::new(a.target.clone()))?;
            table.insert((si, src, tgt, a.map.clone()), a.images.clone());
        }
        let positions: Vec<Vec<HashMap<String, usize>>> = cells
            .iter()
            .map(|sc| sc.iter().map(|c| c.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect()).collect())
            .collect();
        let space2 = space.clone();
        FinStructure::from_fn(space.clone(), sorts.clone(), cells, |si, rho, e| {
            if rho.is_identity() {
                return Ok(e);
            }
            let src = space2.context_index(rho.source())?;
            let tgt = space2.context_index(rho.target())?;
            let images = table.get(&(si, src, tgt, rho.map().to_vec())).ok_or_else(|| {
                PresheafError::Malformed(format!(
                    "missing action of {:?} : {} → {} at {}",
                    rho.map(),
                    rho.source(),
                    rho.target(),
                    sorts[si]
                ))
            })?;
            let label = images
                .get(e)
                .ok_or_else(|| PresheafError::Malformed(format!("short image list at {}", sorts[si])))?;
            positions[si][src]
                .get(label)
                .copied()
                .ok_or_else(|| PresheafError::Malformed(format!("unknown image label {label}")))
        })
    }
}

/// Parse a JSON structure file and build it, checking the functor laws.
pub fn load_structure(text: &str) -> Result<FinStructure, PresheafError> {
    let file: StructureFile = serde_json::from_str(text).map_err(|e| PresheafError::Malformed(e.to_string()))?;
    file.build()
}
