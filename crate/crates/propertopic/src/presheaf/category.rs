//! The underlying category (without identities) of a weak-n set: objects
//! are `(n-1)`-cells, arrows are `n`-cells over one-input one-output shapes,
//! and `gf` is the out-face of the unique `G_{β∘α}`-horn filling.

use std::collections::HashMap;

use serde::Serialize;

use super::PtSet;
use crate::error::{Error, Result};
use crate::propertope::{Face, Propertope, Tower};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Arrow {
    pub shape: String,
    pub cell: u32,
    pub source: u32,
    pub target: u32,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AssociativityReport {
    pub triples: usize,
    /// Triples whose composites need a shape outside the support.
    pub uncovered: usize,
    pub failures: Vec<[usize; 3]>,
}

impl AssociativityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub struct UnderlyingCategory {
    pub n: usize,
    pub objects: Vec<(Propertope, u32)>,
    pub arrows: Vec<Arrow>,
    shapes: Vec<Propertope>,
    index: HashMap<(Propertope, u32), usize>,
    composites: HashMap<(usize, usize), usize>,
    uncovered: usize,
}

impl UnderlyingCategory {
    /// `g ∘ f` by arrow index, when both the composite shape and its
    /// `G_{β∘α}` are supported.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.composites.get(&(g, f)).copied()
    }

    pub fn composable(&self, g: usize, f: usize) -> bool {
        let (a, b) = (&self.shapes[f], &self.shapes[g]);
        a.face(Face::out(0)).ok() == b.face(Face::inp(0)).ok() && self.arrows[f].target == self.arrows[g].source
    }

    pub fn shape(&self, f: usize) -> &Propertope {
        &self.shapes[f]
    }

    pub fn arrow_index(&self, shape: &Propertope, cell: u32) -> Option<usize> {
        self.index.get(&(shape.clone(), cell)).copied()
    }

    /// Pairs whose `G_{β∘α}` lies outside the support.
    pub fn uncovered_pairs(&self) -> usize {
        self.uncovered
    }

    /// Checks `h(gf) = (hg)f` on every composable triple.
    pub fn check_associativity(&self) -> AssociativityReport {
        let mut r = AssociativityReport::default();
        let k = self.arrows.len();
        for f in 0..k {
            for g in 0..k {
                if !self.composable(g, f) {
                    continue;
                }
                for h in 0..k {
                    if !self.composable(h, g) {
                        continue;
                    }
                    r.triples += 1;
                    let left = self.compose(g, f).and_then(|gf| self.compose(h, gf));
                    let right = self.compose(h, g).and_then(|hg| self.compose(hg, f));
                    match (left, right) {
                        (Some(a), Some(b)) if a != b => r.failures.push([h, g, f]),
                        (Some(_), Some(_)) => {}
                        _ => r.uncovered += 1,
                    }
                }
            }
        }
        r
    }
}

pub fn underlying_category(x: &PtSet, tower: &Tower, n: usize) -> Result<UnderlyingCategory> {
    if n == 0 {
        return Err(Error::Unsupported("the underlying category needs n ≥ 1".into()));
    }
    let objects: Vec<(Propertope, u32)> = x
        .shapes_of_dim(n - 1)
        .flat_map(|g| (0..x.count(g) as u32).map(move |c| (g.clone(), c)))
        .collect();
    let mut arrows = vec![];
    let mut shapes = vec![];
    let mut index = HashMap::new();
    for g in x.shapes_of_dim(n).filter(|g| g.n_in() == 1 && g.n_out() == 1) {
        for c in 0..x.count(g) as u32 {
            index.insert((g.clone(), c), arrows.len());
            arrows.push(Arrow {
                shape: format!("{g:?}"),
                cell: c,
                source: x.face_cell(g, c, Face::inp(0))?,
                target: x.face_cell(g, c, Face::out(0))?,
            });
            shapes.push(g.clone());
        }
    }
    let mut cat = UnderlyingCategory {
        n,
        objects,
        arrows,
        shapes,
        index,
        composites: HashMap::new(),
        uncovered: 0,
    };
    let slice = tower.slice(n)?;
    for f in 0..cat.arrows.len() {
        for g in 0..cat.arrows.len() {
            if !cat.composable(g, f) {
                continue;
            }
            let (a, b) = (cat.shapes[f].elem().expect("dim ≥ 1"), cat.shapes[g].elem().expect("dim ≥ 1"));
            let w = Propertope::of(n + 1, &slice.circ(b, a)?);
            if !x.cells.contains_key(&w) {
                cat.uncovered += 1;
                continue;
            }
            let fill = x.fillings(&w, &[cat.arrows[g].cell, cat.arrows[f].cell], None)?;
            if fill.len() != 1 {
                return Err(Error::NotWeak {
                    n,
                    detail: format!("the {w:?}-horn has {} fillings", fill.len()),
                });
            }
            let ba = w.face(Face::out(0))?;
            let c = x.face_cell(&w, fill[0], Face::out(0))?;
            let gf = cat
                .arrow_index(&ba, c)
                .ok_or_else(|| Error::invalid(format!("composite shape {ba:?} is not an arrow shape")))?;
            cat.composites.insert((g, f), gf);
        }
    }
    Ok(cat)
}
