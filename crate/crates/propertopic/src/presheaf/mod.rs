//! Finitely supported, dimension-truncated propertopic sets: cells, face
//! functions, horns, boundaries and fillings, and the weak-n checks.

pub mod build;
pub mod category;
pub mod io;
pub mod standard;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Report;
use crate::prop::builtin::tuples;
use crate::prop::PropRef;
use crate::propertope::{relations_at, Face, Propertope, Relation};

pub use build::{compose_cells, em_reflect, phi_extract, psi_build, pullback, terminal, transport};
pub use category::{underlying_category, UnderlyingCategory};
pub use standard::{count_natural_maps, standard_set, StandardKind, StandardSet};

/// The cells over one propertope. `faces[s][x]` is the image of cell `x`
/// under the face in slot `s` (in-faces first, then out-faces).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cells {
    pub labels: Vec<String>,
    pub faces: Vec<Vec<u32>>,
}

impl Cells {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// The face tuple of cell `x`.
    pub fn tuple(&self, x: u32) -> Vec<u32> {
        self.faces.iter().map(|f| f[x as usize]).collect()
    }
}

/// Cell sets of propertopes outside the support.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum DefaultRule {
    Empty,
    /// One cell in every dimension below `n`.
    SingletonBelow {
        n: usize,
    },
}

#[derive(Clone)]
pub struct PtSet {
    pub base: PropRef,
    pub bound: usize,
    pub cells: BTreeMap<Propertope, Cells>,
    pub default: DefaultRule,
}

impl PtSet {
    pub fn new(base: PropRef, bound: usize, default: DefaultRule) -> Self {
        PtSet {
            base,
            bound,
            cells: BTreeMap::new(),
            default,
        }
    }

    pub fn shapes(&self) -> impl Iterator<Item = &Propertope> {
        self.cells.keys()
    }

    pub fn shapes_of_dim(&self, d: usize) -> impl Iterator<Item = &Propertope> {
        self.cells.keys().filter(move |g| g.dim == d)
    }

    pub fn top_dim(&self) -> usize {
        self.cells.keys().map(|g| g.dim).max().unwrap_or(0)
    }

    pub fn count(&self, g: &Propertope) -> usize {
        match self.cells.get(g) {
            Some(c) => c.len(),
            None => match self.default {
                DefaultRule::SingletonBelow { n } if g.dim < n => 1,
                _ => 0,
            },
        }
    }

    pub fn labels(&self, g: &Propertope) -> Vec<String> {
        match self.cells.get(g) {
            Some(c) => c.labels.clone(),
            None => (0..self.count(g)).map(|_| "*".to_string()).collect(),
        }
    }

    pub fn face_cell(&self, g: &Propertope, x: u32, f: Face) -> Result<u32> {
        match self.cells.get(g) {
            Some(c) => c
                .faces
                .get(g.slot(f))
                .and_then(|v| v.get(x as usize))
                .copied()
                .ok_or_else(|| Error::invalid(format!("no {f:?} image of cell {x} over {g:?}"))),
            None if self.count(g) > x as usize => {
                let t = g.face(f)?;
                if self.count(&t) == 1 {
                    Ok(0)
                } else {
                    Err(Error::invalid(format!("{t:?} has no default cell")))
                }
            }
            None => Err(Error::invalid(format!("cell {x} over {g:?} does not exist"))),
        }
    }

    /// The image of `x` under a chain of faces.
    pub fn follow(&self, g: &Propertope, x: u32, path: &[Face]) -> Result<u32> {
        let mut p = g.clone();
        let mut c = x;
        for &f in path {
            c = self.face_cell(&p, c, f)?;
            p = p.face(f)?;
        }
        Ok(c)
    }

    pub fn in_faces(&self, g: &Propertope, x: u32) -> Result<Vec<u32>> {
        (0..g.n_in()).map(|i| self.face_cell(g, x, Face::inp(i))).collect()
    }

    pub fn out_faces(&self, g: &Propertope, x: u32) -> Result<Vec<u32>> {
        (0..g.n_out()).map(|j| self.face_cell(g, x, Face::out(j))).collect()
    }

    /// All tuples of cells over the in-faces of `g`.
    pub fn horns(&self, g: &Propertope) -> Vec<Vec<u32>> {
        let sizes: Vec<usize> = g.faces()[..g.n_in()].iter().map(|f| self.count(&f.target)).collect();
        tuples(&sizes)
    }

    /// All face tuples over `g` (in-faces, then out-faces) whose images
    /// agree along every relation at `g`.
    pub fn boundaries(&self, g: &Propertope) -> Result<Vec<Vec<u32>>> {
        let rels = relations_at(self.base.as_ref(), g)?;
        compatible_tuples(self, g, &rels)
    }

    /// Cells over `g` with the given in-faces and, when given, out-faces.
    pub fn fillings(&self, g: &Propertope, inputs: &[u32], outputs: Option<&[u32]>) -> Result<Vec<u32>> {
        let mut out = vec![];
        for x in 0..self.count(g) as u32 {
            if self.in_faces(g, x)? == inputs && outputs.map_or(Ok(true), |o| self.out_faces(g, x).map(|v| v == o))? {
                out.push(x);
            }
        }
        Ok(out)
    }

    /// Cells over `g` grouped by their in-face tuple.
    pub fn by_inputs(&self, g: &Propertope) -> Result<HashMap<Vec<u32>, Vec<u32>>> {
        let mut m: HashMap<Vec<u32>, Vec<u32>> = HashMap::new();
        for x in 0..self.count(g) as u32 {
            m.entry(self.in_faces(g, x)?).or_default().push(x);
        }
        Ok(m)
    }

    /// Cells over `g` grouped by their full face tuple.
    pub fn by_faces(&self, g: &Propertope) -> Result<HashMap<Vec<u32>, Vec<u32>>> {
        let mut m: HashMap<Vec<u32>, Vec<u32>> = HashMap::new();
        for x in 0..self.count(g) as u32 {
            let mut t = self.in_faces(g, x)?;
            t.extend(self.out_faces(g, x)?);
            m.entry(t).or_default().push(x);
        }
        Ok(m)
    }
}

/// Backtracking search for face tuples that satisfy `rels`.
pub(crate) fn compatible_tuples(x: &PtSet, g: &Propertope, rels: &[Relation]) -> Result<Vec<Vec<u32>>> {
    let faces = g.faces();
    let counts: Vec<usize> = faces.iter().map(|f| x.count(&f.target)).collect();
    let mut checks: Vec<Vec<&Relation>> = vec![vec![]; faces.len()];
    for r in rels {
        let s = g.slot(r.lhs[0]).max(g.slot(r.rhs[0]));
        checks[s].push(r);
    }
    let mut out = vec![];
    let mut cur = Vec::with_capacity(faces.len());
    fn side(x: &PtSet, g: &Propertope, cur: &[u32], path: &[Face]) -> Result<u32> {
        let f = path[0];
        x.follow(&g.face(f)?, cur[g.slot(f)], &path[1..])
    }
    fn go(
        x: &PtSet,
        g: &Propertope,
        counts: &[usize],
        checks: &[Vec<&Relation>],
        cur: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) -> Result<()> {
        let s = cur.len();
        if s == counts.len() {
            out.push(cur.clone());
            return Ok(());
        }
        for v in 0..counts[s] as u32 {
            cur.push(v);
            let mut ok = true;
            for r in &checks[s] {
                if side(x, g, cur, &r.lhs)? != side(x, g, cur, &r.rhs)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                go(x, g, counts, checks, cur, out)?;
            }
            cur.pop();
        }
        Ok(())
    }
    go(x, g, &counts, &checks, &mut cur, &mut out)?;
    Ok(out)
}

/// Checks supported faces, face-function ranges and every instantiated
/// consistency relation.
pub fn validate_presheaf(x: &PtSet) -> Result<Report> {
    let mut r = Report::default();
    for (g, cells) in &x.cells {
        let at = format!("{g:?}");
        if g.dim > x.bound {
            r.push("shape above the bound", &at);
        }
        let faces = g.faces();
        if cells.faces.len() != faces.len() {
            r.push("one face function per face", &at);
            continue;
        }
        let mut ranges_ok = true;
        for (fm, f) in faces.iter().zip(&cells.faces) {
            let n = x.count(&fm.target);
            if !x.cells.contains_key(&fm.target) && n == 0 && !cells.is_empty() {
                r.push("face target supported", format!("{at} {:?}", fm.face));
                ranges_ok = false;
            }
            if f.len() != cells.len() {
                r.push("face function defined on every cell", format!("{at} {:?}", fm.face));
                ranges_ok = false;
            } else if let Some(v) = f.iter().find(|&&v| v as usize >= n) {
                r.push("face function lands in the target", format!("{at} {:?} value {v}", fm.face));
                ranges_ok = false;
            }
        }
        if !ranges_ok {
            continue;
        }
        for rel in relations_at(x.base.as_ref(), g)? {
            for c in 0..cells.len() as u32 {
                let a = x.follow(g, c, &rel.lhs)?;
                let b = x.follow(g, c, &rel.rhs)?;
                if a != b {
                    r.push(
                        &format!("{:?} consistency", rel.family).to_lowercase(),
                        format!(
                            "{at} cell {c} ({}): {:?} ↦ {a} but {:?} ↦ {b}",
                            cells.labels[c as usize], rel.lhs, rel.rhs
                        ),
                    );
                }
            }
        }
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FillingFailure {
    pub kind: String,
    pub shape: String,
    pub dim: usize,
    pub inputs: Vec<u32>,
    pub outputs: Option<Vec<u32>>,
    pub fillings: usize,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct WeakReport {
    pub n: usize,
    pub bound: usize,
    pub horns_checked: usize,
    pub boundaries_checked: usize,
    pub failures: Vec<FillingFailure>,
}

impl WeakReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Horns of dimension `1..=n` are fillable, horns of dimension `n + 1` are
/// uniquely fillable and boundaries of dimension `n + 2..=bound` are
/// uniquely fillable, over every supported shape. A very large `n` checks
/// horn filling only.
pub fn check_weak_n(x: &PtSet, n: usize, bound: usize) -> Result<WeakReport> {
    let mut rep = WeakReport {
        n,
        bound,
        ..Default::default()
    };
    for g in x.shapes() {
        let d = g.dim;
        if d == 0 || d > bound {
            continue;
        }
        if d <= n.saturating_add(1) {
            let groups = x.by_inputs(g)?;
            for h in x.horns(g) {
                rep.horns_checked += 1;
                let k = groups.get(&h).map_or(0, |v| v.len());
                let bad = if d <= n { k == 0 } else { k != 1 };
                if bad {
                    rep.failures.push(FillingFailure {
                        kind: if d <= n {
                            "horn not fillable"
                        } else {
                            "horn not uniquely fillable"
                        }
                        .into(),
                        shape: format!("{g:?}"),
                        dim: d,
                        inputs: h,
                        outputs: None,
                        fillings: k,
                    });
                }
            }
        } else {
            let groups = x.by_faces(g)?;
            for b in x.boundaries(g)? {
                rep.boundaries_checked += 1;
                let k = groups.get(&b).map_or(0, |v| v.len());
                if k != 1 {
                    let (i, o) = b.split_at(g.n_in());
                    rep.failures.push(FillingFailure {
                        kind: "boundary not uniquely fillable".into(),
                        shape: format!("{g:?}"),
                        dim: d,
                        inputs: i.to_vec(),
                        outputs: Some(o.to_vec()),
                        fillings: k,
                    });
                }
            }
        }
    }
    Ok(rep)
}

/// A map of propertopic sets, one function per supported shape of the
/// source. Unlisted shapes map the default cell to the default cell.
#[derive(Clone, Debug, Default)]
pub struct PtMap {
    pub maps: BTreeMap<Propertope, Vec<u32>>,
}

impl PtMap {
    pub fn identity(x: &PtSet) -> Self {
        PtMap {
            maps: x.cells.iter().map(|(g, c)| (g.clone(), (0..c.len() as u32).collect())).collect(),
        }
    }

    pub fn to_terminal(x: &PtSet) -> Self {
        PtMap {
            maps: x.cells.iter().map(|(g, c)| (g.clone(), vec![0; c.len()])).collect(),
        }
    }

    pub fn apply(&self, g: &Propertope, x: u32) -> u32 {
        self.maps.get(g).map_or(x, |m| m[x as usize])
    }

    /// Every face square commutes.
    pub fn check_natural(&self, x: &PtSet, y: &PtSet) -> Result<Report> {
        let mut r = Report::default();
        for (g, cells) in &x.cells {
            for c in 0..cells.len() as u32 {
                let fc = self.apply(g, c);
                if fc as usize >= y.count(g) {
                    r.push("map lands in the target", format!("{g:?} cell {c}"));
                    continue;
                }
                for fm in g.faces() {
                    let a = self.apply(&fm.target, x.face_cell(g, c, fm.face)?);
                    let b = y.face_cell(g, fc, fm.face)?;
                    if a != b {
                        r.push("face square", format!("{g:?} cell {c} {:?}", fm.face));
                    }
                }
            }
        }
        Ok(r)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftFailure {
    pub shape: String,
    pub inputs: Vec<u32>,
    pub below: u32,
}

/// Horn lifting for `p: X → Y` in dimensions `1..=bound`.
pub fn is_fibration(p: &PtMap, x: &PtSet, y: &PtSet, bound: usize) -> Result<Vec<LiftFailure>> {
    let mut fails = vec![];
    for g in x.shapes() {
        if g.dim == 0 || g.dim > bound {
            continue;
        }
        let groups = x.by_inputs(g)?;
        let faces = g.faces();
        for h in x.horns(g) {
            let image: Vec<u32> = h.iter().zip(&faces).map(|(&c, fm)| p.apply(&fm.target, c)).collect();
            for z in 0..y.count(g) as u32 {
                if y.in_faces(g, z)? != image {
                    continue;
                }
                let lifted = groups.get(&h).is_some_and(|xs| xs.iter().any(|&c| p.apply(g, c) == z));
                if !lifted {
                    fails.push(LiftFailure {
                        shape: format!("{g:?}"),
                        inputs: h.clone(),
                        below: z,
                    });
                }
            }
        }
    }
    Ok(fails)
}
