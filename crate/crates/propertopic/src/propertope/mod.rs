//! Propertopes, face maps, morphism chains modulo the consistency relations,
//! the metagraph codec and bounded shape universes.

pub mod metagraph;
pub mod universe;

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::color::{Color, Element, Payload};
use crate::error::{Error, Result};
use crate::graph::{DecoratedGraph, Src};
use crate::perm::Perm;
use crate::prop::{PropImpl, PropRef};
use crate::slice::{elem_color, SliceBody, SliceProp};

pub use metagraph::{decode_metagraph, encode_metagraph, Metagraph};
pub use universe::{random_propertope, Universe, UniverseSpec};

/// An `n`-dimensional propertope: a color of `P` when `n = 0`, otherwise an
/// element of `P^{(n-1)+}` wrapped as a color.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Propertope {
    pub dim: usize,
    pub color: Color,
}

impl fmt::Debug for Propertope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:?}", self.dim, self.color)
    }
}

impl Propertope {
    pub fn point(c: Color) -> Self {
        Propertope { dim: 0, color: c }
    }

    /// The propertope of dimension `dim ≥ 1` given by `x`.
    pub fn of(dim: usize, x: &Element) -> Self {
        Propertope { dim, color: elem_color(x) }
    }

    pub fn elem(&self) -> Option<&Arc<Element>> {
        if self.dim == 0 {
            None
        } else {
            self.color.as_elem()
        }
    }

    fn element(&self) -> Result<&Arc<Element>> {
        self.elem().ok_or_else(|| Error::invalid(format!("{self:?} has no faces")))
    }

    pub fn n_in(&self) -> usize {
        self.elem().map_or(0, |x| x.inp.len())
    }

    pub fn n_out(&self) -> usize {
        self.elem().map_or(0, |x| x.out.len())
    }

    pub fn n_faces(&self) -> usize {
        self.n_in() + self.n_out()
    }

    /// The slice body of a propertope of dimension at least 2.
    pub fn body(&self) -> Option<&SliceBody> {
        if self.dim < 2 {
            return None;
        }
        match &self.elem()?.payload {
            Payload::Slice(b) => Some(b),
            _ => None,
        }
    }

    pub fn face(&self, f: Face) -> Result<Propertope> {
        let x = self.element()?;
        let p = match f.dir {
            Dir::In => &x.inp,
            Dir::Out => &x.out,
        };
        if f.index >= p.len() {
            return Err(Error::invalid(format!("{f:?} is not a face of {self:?}")));
        }
        Ok(Propertope {
            dim: self.dim - 1,
            color: p.get(f.index).clone(),
        })
    }

    /// In-faces in profile order, then out-faces in profile order.
    pub fn faces(&self) -> Vec<FaceMap> {
        Face::all(self.n_in(), self.n_out())
            .into_iter()
            .map(|face| FaceMap {
                source: self.clone(),
                target: self.face(face).expect("in range"),
                face,
            })
            .collect()
    }

    /// Index of `f` among [`Propertope::faces`].
    pub fn slot(&self, f: Face) -> usize {
        match f.dir {
            Dir::In => f.index,
            Dir::Out => self.n_in() + f.index,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub enum Dir {
    In,
    Out,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Face {
    pub dir: Dir,
    pub index: usize,
}

impl fmt::Debug for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.dir {
            Dir::In => write!(f, "in{}", self.index + 1),
            Dir::Out => write!(f, "out{}", self.index + 1),
        }
    }
}

impl Face {
    pub fn inp(index: usize) -> Self {
        Face { dir: Dir::In, index }
    }

    pub fn out(index: usize) -> Self {
        Face { dir: Dir::Out, index }
    }

    pub fn all(n_in: usize, n_out: usize) -> Vec<Face> {
        (0..n_in).map(Face::inp).chain((0..n_out).map(Face::out)).collect()
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FaceMap {
    pub source: Propertope,
    pub face: Face,
    pub target: Propertope,
}

/// A composable sequence of face maps starting at `source`; no steps is the
/// identity.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Chain {
    pub source: Propertope,
    pub steps: Vec<Face>,
}

impl Chain {
    pub fn identity(p: Propertope) -> Self {
        Chain { source: p, steps: vec![] }
    }

    pub fn new(source: Propertope, steps: Vec<Face>) -> Result<Self> {
        let c = Chain { source, steps };
        c.target()?;
        Ok(c)
    }

    pub fn target(&self) -> Result<Propertope> {
        let mut p = self.source.clone();
        for &f in &self.steps {
            p = p.face(f)?;
        }
        Ok(p)
    }

    pub fn face_maps(&self) -> Result<Vec<FaceMap>> {
        let mut p = self.source.clone();
        let mut out = Vec::with_capacity(self.steps.len());
        for &f in &self.steps {
            let q = p.face(f)?;
            out.push(FaceMap {
                source: p,
                face: f,
                target: q.clone(),
            });
            p = q;
        }
        Ok(out)
    }
}

/// `b ∘ a`: first the faces of `a`, then those of `b`.
pub fn chain_compose(a: &Chain, b: &Chain) -> Result<Chain> {
    if a.target()? != b.source {
        return Err(Error::Composition(format!(
            "chain ends at {:?} but the next starts at {:?}",
            a.target()?,
            b.source
        )));
    }
    let mut steps = a.steps.clone();
    steps.extend(&b.steps);
    Ok(Chain {
        source: a.source.clone(),
        steps,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub enum Family {
    Horizontal,
    Vertical,
    Unital,
    Equivariance,
}

/// Two face paths out of the same propertope that the quotient identifies.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Relation {
    pub family: Family,
    pub lhs: Vec<Face>,
    pub rhs: Vec<Face>,
}

/// How a propertope of dimension at least 2 is recognized as a special shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    UnitTensor(usize),
    Tensor { a: (usize, usize) },
    Circ,
    Twisted(Perm),
}

fn is_corolla(g: &DecoratedGraph) -> bool {
    g.vertices.len() == 1
        && g.vertices[0].ins.iter().enumerate().all(|(i, s)| *s == Src::In(i))
        && g.outputs.iter().enumerate().all(|(j, s)| *s == Src::Port(0, j))
}

/// The special shapes a slice body matches. A single identity corolla is
/// both a unit tensor and a twisted unit.
pub fn shapes(b: &SliceBody) -> Vec<Shape> {
    let mut out = vec![];
    let m = b.graphs.len();
    if b.graphs.iter().all(is_corolla) && b.positions.iter().enumerate().all(|(j, p)| *p == [j]) {
        out.push(Shape::UnitTensor(m));
    }
    if m != 1 {
        return out;
    }
    let g = &b.graphs[0];
    match g.vertices.len() {
        1 => {
            let v = &g.vertices[0];
            let si: Option<Vec<usize>> = g
                .outputs
                .iter()
                .map(|s| match s {
                    Src::Port(0, p) => Some(*p),
                    _ => None,
                })
                .collect();
            let ti_ok = v.ins.iter().all(|s| matches!(s, Src::In(_)));
            if let (Some(si), true) = (si, ti_ok) {
                if let Ok(si) = Perm::from_images(si) {
                    out.push(Shape::Twisted(si.inverse()));
                }
            }
        }
        2 if b.positions[0] == [0, 1] => {
            let (v0, v1) = (&g.vertices[0], &g.vertices[1]);
            let (na, ma) = (v0.ins.len(), v0.outs);
            let tensor = v0.ins.iter().enumerate().all(|(i, s)| *s == Src::In(i))
                && v1.ins.iter().enumerate().all(|(i, s)| *s == Src::In(na + i))
                && g.outputs.len() == ma + v1.outs
                && g.outputs
                    .iter()
                    .enumerate()
                    .all(|(j, s)| *s == if j < ma { Src::Port(0, j) } else { Src::Port(1, j - ma) });
            if tensor {
                out.push(Shape::Tensor { a: (na, ma) });
            }
            let circ = v0.ins.len() == v1.outs
                && v0.ins.iter().enumerate().all(|(i, s)| *s == Src::Port(1, i))
                && v1.ins.iter().enumerate().all(|(i, s)| *s == Src::In(i))
                && g.outputs.iter().enumerate().all(|(j, s)| *s == Src::Port(0, j))
                && g.outputs.len() == ma;
            if circ {
                out.push(Shape::Circ);
            }
        }
        _ => {}
    }
    out
}

fn pair(a: [Face; 2], b: [Face; 2], family: Family) -> Relation {
    Relation {
        family,
        lhs: a.to_vec(),
        rhs: b.to_vec(),
    }
}

/// The generating relations whose common source is `g`.
pub fn relations_at(base: &dyn PropImpl, g: &Propertope) -> Result<Vec<Relation>> {
    let mut rels = vec![];
    match g.dim {
        0 => {}
        1 => {
            let x = g.element()?;
            if x.out == x.inp && base.unit(&x.inp).is_ok_and(|u| u == **x) {
                rels.extend(unit_relations(x.inp.len()));
            }
        }
        _ => {
            let b = g.body().ok_or_else(|| Error::invalid(format!("{g:?} is not a slice element")))?;
            let x = g.element()?;
            for s in shapes(b) {
                match s {
                    Shape::UnitTensor(m) => rels.extend(unit_relations(m)),
                    Shape::Tensor { a: (na, ma) } => {
                        let beta = x.inp.get(1).as_elem().expect("slice colors are elements");
                        for i in 0..na {
                            rels.push(pair([Face::inp(0), Face::inp(i)], [Face::out(0), Face::inp(i)], Family::Horizontal));
                        }
                        for k in 0..beta.inp.len() {
                            rels.push(pair(
                                [Face::inp(1), Face::inp(k)],
                                [Face::out(0), Face::inp(na + k)],
                                Family::Horizontal,
                            ));
                        }
                        for j in 0..ma {
                            rels.push(pair([Face::inp(0), Face::out(j)], [Face::out(0), Face::out(j)], Family::Horizontal));
                        }
                        for l in 0..beta.out.len() {
                            rels.push(pair(
                                [Face::inp(1), Face::out(l)],
                                [Face::out(0), Face::out(ma + l)],
                                Family::Horizontal,
                            ));
                        }
                    }
                    Shape::Circ => {
                        let alpha = x.inp.get(0).as_elem().expect("slice colors are elements");
                        let beta = x.inp.get(1).as_elem().expect("slice colors are elements");
                        for j in 0..alpha.out.len() {
                            rels.push(pair([Face::inp(0), Face::out(j)], [Face::out(0), Face::out(j)], Family::Vertical));
                        }
                        for i in 0..beta.inp.len() {
                            rels.push(pair([Face::inp(1), Face::inp(i)], [Face::out(0), Face::inp(i)], Family::Vertical));
                        }
                    }
                    Shape::Twisted(sigma) => {
                        for j in 0..sigma.len() {
                            rels.push(pair(
                                [Face::inp(0), Face::out(j)],
                                [Face::out(0), Face::out(sigma.apply(j))],
                                Family::Equivariance,
                            ));
                        }
                    }
                }
            }
        }
    }
    for r in &rels {
        let l = Chain::new(g.clone(), r.lhs.clone())?.target()?;
        let rt = Chain::new(g.clone(), r.rhs.clone())?.target()?;
        if l != rt {
            return Err(Error::invalid(format!("relation {r:?} at {g:?} has mismatched endpoints")));
        }
    }
    Ok(rels)
}

fn unit_relations(m: usize) -> Vec<Relation> {
    (0..m)
        .map(|i| Relation {
            family: Family::Unital,
            lhs: vec![Face::inp(i)],
            rhs: vec![Face::out(i)],
        })
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Verdict {
    Equal,
    Distinct,
    Unknown,
}

/// Upper bound on visited states in [`chain_equal`].
pub const STATE_CAP: usize = 200_000;

/// Decides equality in the quotient by breadth-first rewriting of `a` with
/// the generating relations in both directions, up to `depth_cap` rewrites.
pub fn chain_equal(base: &dyn PropImpl, a: &Chain, b: &Chain, depth_cap: usize) -> Result<Verdict> {
    if a.source != b.source || a.target()? != b.target()? || a.steps.len() != b.steps.len() {
        return Ok(Verdict::Distinct);
    }
    let class = chain_class(base, a, depth_cap)?;
    if class.members.contains(&b.steps) {
        Ok(Verdict::Equal)
    } else if class.complete {
        Ok(Verdict::Distinct)
    } else {
        Ok(Verdict::Unknown)
    }
}

/// The rewrite closure of a chain; `complete` is false when a cap was hit.
pub struct ChainClass {
    pub members: HashSet<Vec<Face>>,
    pub complete: bool,
}

pub fn chain_class(base: &dyn PropImpl, a: &Chain, depth_cap: usize) -> Result<ChainClass> {
    let mut cache: HashMap<Propertope, Arc<Vec<Relation>>> = HashMap::new();
    let mut seen: HashSet<Vec<Face>> = HashSet::from([a.steps.clone()]);
    let mut queue = VecDeque::from([(a.steps.clone(), 0usize)]);
    let mut complete = true;
    while let Some((steps, depth)) = queue.pop_front() {
        let mut p = a.source.clone();
        let mut next = vec![];
        for k in 0..steps.len() {
            let rels = match cache.get(&p) {
                Some(r) => r.clone(),
                None => {
                    let r = Arc::new(relations_at(base, &p)?);
                    cache.insert(p.clone(), r.clone());
                    r
                }
            };
            for r in rels.iter() {
                for (from, to) in [(&r.lhs, &r.rhs), (&r.rhs, &r.lhs)] {
                    if steps[k..].starts_with(from) {
                        let mut s = steps[..k].to_vec();
                        s.extend(to);
                        s.extend(&steps[k + from.len()..]);
                        next.push(s);
                    }
                }
            }
            p = p.face(steps[k])?;
        }
        for s in next {
            if seen.contains(&s) {
                continue;
            }
            if depth >= depth_cap || seen.len() >= STATE_CAP {
                complete = false;
                continue;
            }
            seen.insert(s.clone());
            queue.push_back((s, depth + 1));
        }
    }
    Ok(ChainClass { members: seen, complete })
}

/// `P, P⁺, P^{2+}, …` up to a fixed number of slice levels.
#[derive(Clone)]
pub struct Tower {
    base: PropRef,
    slices: Vec<Arc<SliceProp>>,
}

impl Tower {
    pub fn new(base: PropRef, levels: usize) -> Self {
        let mut slices: Vec<Arc<SliceProp>> = Vec::with_capacity(levels);
        for k in 0..levels {
            let below: PropRef = if k == 0 { base.clone() } else { slices[k - 1].clone() };
            slices.push(Arc::new(SliceProp::new(below)));
        }
        Tower { base, slices }
    }

    pub fn base(&self) -> &PropRef {
        &self.base
    }

    pub fn levels(&self) -> usize {
        self.slices.len()
    }

    /// `P^{k+}`.
    pub fn prop(&self, k: usize) -> Result<PropRef> {
        if k == 0 {
            return Ok(self.base.clone());
        }
        Ok(self.slice(k)?.clone())
    }

    /// `P^{k+}` for `k ≥ 1` as a slice PROP over `P^{(k-1)+}`.
    pub fn slice(&self, k: usize) -> Result<&Arc<SliceProp>> {
        k.checked_sub(1)
            .and_then(|i| self.slices.get(i))
            .ok_or_else(|| Error::Unsupported(format!("slice level {k} is beyond the tower of {} levels", self.slices.len())))
    }

    /// Whether `g` is a valid propertope of this tower.
    pub fn contains(&self, g: &Propertope) -> bool {
        match g.dim {
            0 => self.base.has_color(&g.color),
            d => match (g.color.as_elem(), self.prop(d - 1)) {
                (Some(x), Ok(p)) => p.contains(x),
                _ => false,
            },
        }
    }
}

/// `P^{n+}`.
pub fn iterated(p: PropRef, n: usize) -> PropRef {
    let mut q = p;
    for _ in 0..n {
        q = Arc::new(SliceProp::new(q));
    }
    q
}
