//! Constructions of propertopic sets: the terminal set, ψ of an algebra, φ of
//! a weak-n set, Eilenberg-Mac Lane reflection and pullback.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{compatible_tuples, Cells, DefaultRule, PtSet};
use crate::color::Element;
use crate::error::{Error, Result};
use crate::prop::algebra::{Algebra, TableAlgebra};
use crate::prop::builtin::tuples;
use crate::propertope::{relations_at, Propertope, Tower, Universe};
use crate::slice::fibration::check_prop_map;
use crate::slice::PropMap;

/// One cell over every shape of `u` up to `bound`.
pub fn terminal(tower: &Tower, u: &Universe, bound: usize) -> PtSet {
    let mut x = PtSet::new(tower.base().clone(), bound, DefaultRule::Empty);
    for g in u.all().filter(|g| g.dim <= bound) {
        x.cells.insert(
            g.clone(),
            Cells {
                labels: vec!["*".into()],
                faces: vec![vec![0]; g.n_faces()],
            },
        );
    }
    x
}

fn join(labels: &[String]) -> String {
    format!("({})", labels.join(","))
}

/// `ψⁿ(A)` over the shapes of `u` up to `bound`, for an algebra `A` over
/// `P^{n+}`: singletons below `n`, the carrier in dimension `n`, input
/// products with `λ` as out-face in dimension `n + 1`, and compatible face
/// tuples above.
pub fn psi_build(a: &dyn Algebra, tower: &Tower, u: &Universe, n: usize, bound: usize) -> Result<PtSet> {
    let pn = tower.prop(n)?;
    if a.prop().id() != pn.id() {
        return Err(Error::Owner {
            expected: pn.id().to_string(),
            found: a.prop().id().to_string(),
        });
    }
    let default = if n == 0 {
        DefaultRule::Empty
    } else {
        DefaultRule::SingletonBelow { n }
    };
    let mut x = PtSet::new(tower.base().clone(), bound, default);
    for d in 0..=bound.min(u.dim()) {
        for g in u.at(d) {
            let k = g.n_faces();
            let cells = if d < n {
                Cells {
                    labels: vec!["*".into()],
                    faces: vec![vec![0]; k],
                }
            } else if d == n {
                let labels = a.labels(&g.color);
                Cells {
                    faces: vec![vec![0; labels.len()]; k],
                    labels,
                }
            } else if d == n + 1 {
                let e = g.elem().expect("dim ≥ 1");
                let faces = g.faces();
                let sizes: Vec<usize> = faces[..g.n_in()].iter().map(|f| x.count(&f.target)).collect();
                let mut labels = vec![];
                let mut fs = vec![vec![]; k];
                for t in tuples(&sizes) {
                    let outs = a.act(e, &t)?;
                    let ls: Vec<String> = t
                        .iter()
                        .zip(&faces)
                        .map(|(&c, f)| x.labels(&f.target)[c as usize].clone())
                        .collect();
                    labels.push(join(&ls));
                    for (s, v) in t.iter().chain(&outs).enumerate() {
                        fs[s].push(*v);
                    }
                }
                Cells { labels, faces: fs }
            } else {
                tuple_cells(&x, g)?
            };
            x.cells.insert(g.clone(), cells);
        }
    }
    Ok(x)
}

/// The cells of a shape as the compatible tuples of its faces, with the
/// projections as face functions.
fn tuple_cells(x: &PtSet, g: &Propertope) -> Result<Cells> {
    let rels = relations_at(x.base.as_ref(), g)?;
    let ts = compatible_tuples(x, g, &rels)?;
    let mut fs = vec![Vec::with_capacity(ts.len()); g.n_faces()];
    let mut labels = Vec::with_capacity(ts.len());
    for t in &ts {
        labels.push(format!("{t:?}"));
        for (s, &v) in t.iter().enumerate() {
            fs[s].push(v);
        }
    }
    Ok(Cells { labels, faces: fs })
}

/// `φⁿ(X)`: the algebra over `P^{n+}` whose carrier is the `n`-cells and
/// whose action reads the out-faces of the unique `(n+1)`-horn filling.
pub fn phi_extract(x: &PtSet, tower: &Tower, n: usize) -> Result<TableAlgebra> {
    let carrier = x
        .cells
        .iter()
        .filter(|(g, _)| g.dim == n)
        .map(|(g, c)| (g.color.clone(), c.labels.clone()))
        .collect();
    let mut alg = TableAlgebra::new(tower.prop(n)?, carrier);
    for g in x.shapes_of_dim(n + 1) {
        let groups = x.by_inputs(g)?;
        let mut rows = vec![];
        for h in x.horns(g) {
            let fill = groups.get(&h).map(|v| v.as_slice()).unwrap_or_default();
            if fill.len() != 1 {
                return Err(Error::NotWeak {
                    n,
                    detail: format!("the {g:?}-horn {h:?} has {} fillings", fill.len()),
                });
            }
            rows.push(x.out_faces(g, fill[0])?);
        }
        alg.insert((**g.elem().expect("dim ≥ 1")).clone(), rows)?;
    }
    Ok(alg)
}

/// Out-face tuples of all fillings of the `g`-horn `inputs`.
pub fn compose_cells(x: &PtSet, g: &Propertope, inputs: &[u32]) -> Result<BTreeSet<Vec<u32>>> {
    x.fillings(g, inputs, None)?.into_iter().map(|c| x.out_faces(g, c)).collect()
}

/// Replaces every cell set below dimension `n` by a point.
pub fn em_reflect(x: &PtSet, n: usize) -> PtSet {
    let mut y = PtSet::new(x.base.clone(), x.bound, DefaultRule::SingletonBelow { n });
    for (g, c) in &x.cells {
        let cells = if g.dim < n {
            Cells {
                labels: vec!["*".into()],
                faces: vec![vec![0]; c.faces.len()],
            }
        } else if g.dim == n {
            Cells {
                labels: c.labels.clone(),
                faces: vec![vec![0; c.len()]; c.faces.len()],
            }
        } else {
            c.clone()
        };
        y.cells.insert(g.clone(), cells);
    }
    y
}

/// Decoration replacement: applies `phi` to every base decoration of a
/// propertope over its source, rebuilding each level in `target`.
pub struct Transport<'a> {
    phi: &'a PropMap,
    target: &'a Tower,
    memo: HashMap<Propertope, Propertope>,
}

impl<'a> Transport<'a> {
    pub fn new(phi: &'a PropMap, target: &'a Tower) -> Self {
        Transport {
            phi,
            target,
            memo: HashMap::new(),
        }
    }

    pub fn apply(&mut self, g: &Propertope) -> Result<Propertope> {
        if let Some(h) = self.memo.get(g) {
            return Ok(h.clone());
        }
        let h = match g.dim {
            0 => {
                if !self.target.base().has_color(&g.color) {
                    return Err(Error::UnknownColor(format!("{:?}", g.color)));
                }
                g.clone()
            }
            1 => Propertope::of(1, &self.phi.apply(g.elem().expect("dim ≥ 1"))?),
            d => {
                let body = g
                    .body()
                    .ok_or_else(|| Error::invalid(format!("{g:?} is not a slice element")))?
                    .clone();
                let mut graphs = Vec::with_capacity(body.graphs.len());
                for gr in &body.graphs {
                    graphs.push(gr.try_map(|deco| {
                        let p = self.apply(&Propertope::of(d - 1, deco))?;
                        Ok(p.elem().expect("dim ≥ 1").clone())
                    })?);
                }
                let x = self.target.slice(d - 1)?.element(graphs, body.positions.clone())?;
                Propertope::of(d, &x)
            }
        };
        self.memo.insert(g.clone(), h.clone());
        Ok(h)
    }
}

/// `Φ(g)` for a single propertope.
pub fn transport(phi: &PropMap, target: &Tower, g: &Propertope) -> Result<Propertope> {
    Transport::new(phi, target).apply(g)
}

/// `(φ*X)(γ) = X(Φγ)` over the shapes of `u` whose image is supported in `x`.
pub fn pullback(phi: &PropMap, target: &Tower, x: &PtSet, u: &Universe) -> Result<PtSet> {
    let support: Vec<Element> = u.at(1).map(|g| (**g.elem().expect("dim ≥ 1")).clone()).collect();
    let laws = check_prop_map(phi, &support)?;
    if !laws.passed() {
        return Err(Error::invalid(format!("not a PROP map: {:?}", laws.first_witness())));
    }
    if phi.target.id() != x.base.id() {
        return Err(Error::Owner {
            expected: x.base.id().to_string(),
            found: phi.target.id().to_string(),
        });
    }
    let mut tr = Transport::new(phi, target);
    let mut image = BTreeMap::new();
    for g in u.all().filter(|g| g.dim <= x.bound) {
        let h = tr.apply(g)?;
        if x.cells.contains_key(&h) {
            image.insert(g.clone(), h);
        }
    }
    let closed = Universe::from_shapes(image.keys().cloned());
    let mut y = PtSet::new(phi.source.clone(), x.bound, x.default);
    for g in closed.all() {
        y.cells.insert(g.clone(), x.cells[&image[g]].clone());
    }
    Ok(y)
}
