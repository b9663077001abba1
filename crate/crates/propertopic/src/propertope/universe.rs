//! Bounded, face-closed families of propertopes built from the special
//! shapes, and random propertopes for codec tests.

use std::collections::BTreeSet;

use rand::Rng as _;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use super::{Propertope, Tower};
use crate::color::{Color, Element, Profile};
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::prop::{PropImpl, Rng};
use crate::slice::elem_color;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniverseSpec {
    /// Top dimension.
    pub dim: usize,
    /// Bound on profile lengths of base elements.
    pub max_arity: usize,
    /// Longest unit tensor in dimension 2; higher dimensions use plain units.
    pub max_tensor: usize,
    /// Bound on the number of shapes per dimension.
    pub cap: usize,
}

impl Default for UniverseSpec {
    fn default() -> Self {
        UniverseSpec {
            dim: 3,
            max_arity: 2,
            max_tensor: 2,
            cap: 4000,
        }
    }
}

/// Propertopes by dimension. Every face of a member is a member.
#[derive(Clone, Debug)]
pub struct Universe {
    pub by_dim: Vec<BTreeSet<Propertope>>,
}

impl Universe {
    pub fn dim(&self) -> usize {
        self.by_dim.len().saturating_sub(1)
    }

    pub fn at(&self, d: usize) -> impl Iterator<Item = &Propertope> {
        self.by_dim.get(d).into_iter().flatten()
    }

    pub fn contains(&self, g: &Propertope) -> bool {
        self.by_dim.get(g.dim).is_some_and(|s| s.contains(g))
    }

    pub fn all(&self) -> impl Iterator<Item = &Propertope> {
        self.by_dim.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.by_dim.iter().map(|s| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Adds a face-closed family; shapes whose faces are missing are dropped.
    pub fn from_shapes(shapes: impl IntoIterator<Item = Propertope>) -> Self {
        let mut by_dim: Vec<BTreeSet<Propertope>> = vec![];
        for g in shapes {
            while by_dim.len() <= g.dim {
                by_dim.push(BTreeSet::new());
            }
            by_dim[g.dim].insert(g);
        }
        for d in 1..by_dim.len() {
            let (lo, hi) = by_dim.split_at_mut(d);
            let below = &lo[d - 1];
            hi[0].retain(|g| g.faces().iter().all(|f| below.contains(&f.target)));
        }
        Universe { by_dim }
    }

    pub fn generate(tower: &Tower, spec: &UniverseSpec) -> Result<Self> {
        if spec.dim > tower.levels() + 1 {
            return Err(Error::Unsupported(format!("dimension {} exceeds the tower", spec.dim)));
        }
        let base = tower.base();
        let colors = base.sample_colors();
        let mut by_dim = vec![colors.iter().cloned().map(Propertope::point).collect::<BTreeSet<_>>()];
        if spec.dim == 0 {
            return Ok(Universe { by_dim });
        }
        let profiles = profiles(&colors, spec.max_arity);
        let mut u1 = BTreeSet::new();
        let mut rng = Rng::seed_from_u64(0);
        for out in &profiles {
            for inp in &profiles {
                match base.enumerate(out, inp) {
                    Some(xs) => u1.extend(xs.iter().map(|x| Propertope::of(1, x))),
                    None => {
                        for _ in 0..4 {
                            if let Some(x) = base.sample(&mut rng, Some(out)) {
                                if x.inp == *inp {
                                    u1.insert(Propertope::of(1, &x));
                                }
                            }
                        }
                    }
                }
            }
        }
        by_dim.push(truncate(u1, spec.cap));
        for d in 2..=spec.dim {
            let lower: Vec<Element> = by_dim[d - 1].iter().map(|g| (**g.elem().expect("dim ≥ 1")).clone()).collect();
            let lower_set = &by_dim[d - 1];
            let member = |x: &Element| lower_set.contains(&Propertope::of(d - 1, x));
            let below = tower.prop(d - 2)?;
            let slice = tower.slice(d - 1)?;
            let mut u = BTreeSet::new();
            let max_len = if d == 2 { spec.max_tensor.max(1) } else { 1 };
            for len in 1..=max_len {
                for tuple in tuples(lower.len(), len) {
                    let cs: Vec<Color> = tuple.iter().map(|&i| elem_color(&lower[i])).collect();
                    let p = Profile::new(cs)?;
                    u.insert(Propertope::of(d, &slice.unit(&p)?));
                }
            }
            for a in &lower {
                for b in &lower {
                    if let Ok(ab) = below.hcomp(a, b) {
                        if member(&ab) {
                            u.insert(Propertope::of(d, &slice.tensor(a, b)?));
                        }
                    }
                    if a.inp == b.out {
                        if let Ok(ab) = below.vcomp(a, b) {
                            if member(&ab) {
                                u.insert(Propertope::of(d, &slice.circ(a, b)?));
                            }
                        }
                    }
                }
                for sigma in Perm::all(a.out.len()) {
                    for tau in Perm::all(a.inp.len()) {
                        if let Ok(t) = below.biact(&sigma, a, &tau) {
                            if member(&t) {
                                u.insert(Propertope::of(d, &slice.twisted_unit(&sigma, a, &tau)?));
                            }
                        }
                    }
                }
            }
            by_dim.push(truncate(u, spec.cap));
        }
        Ok(Universe { by_dim })
    }
}

fn truncate(s: BTreeSet<Propertope>, cap: usize) -> BTreeSet<Propertope> {
    s.into_iter().take(cap).collect()
}

fn profiles(colors: &[Color], max_len: usize) -> Vec<Profile> {
    let mut out = vec![];
    for len in 1..=max_len {
        for t in tuples(colors.len(), len) {
            out.push(Profile::new(t.iter().map(|&i| colors[i].clone()).collect()).expect("non-empty"));
        }
    }
    out
}

/// All index tuples of length `len` over `0..n`.
pub fn tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

/// A random propertope of dimension `dim`, drawn with the PROP samplers of
/// the tower.
pub fn random_propertope(tower: &Tower, rng: &mut Rng, dim: usize) -> Result<Propertope> {
    if dim == 0 {
        let cs = tower.base().sample_colors();
        return Ok(Propertope::point(cs[rng.gen_range(0..cs.len())].clone()));
    }
    let p = tower.prop(dim - 1)?;
    for _ in 0..16 {
        if let Some(x) = p.sample(rng, None) {
            return Ok(Propertope::of(dim, &x));
        }
    }
    Err(Error::Unsupported(format!("{} produced no sample", p.id())))
}
