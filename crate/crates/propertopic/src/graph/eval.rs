use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{boundary, wire_color, DecoratedGraph, Graph, Src};
use crate::color::Element;
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::prop::{PropImpl, Rng};

/// One layer of a decomposition: its vertices side by side, then identity
/// wires passing through, followed by the left action `interface` that
/// reorders the layer's outputs into the next layer's inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layer {
    pub vertices: Vec<usize>,
    pub passing: Vec<Src>,
    pub interface: Perm,
}

/// Layers from bottom to top; `bottom` is the right action matching the
/// input legs with the bottom layer's inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelDecomposition {
    pub layers: Vec<Layer>,
    pub bottom: Perm,
}

impl LevelDecomposition {
    /// The permutation at the top of the graph.
    pub fn top(&self) -> &Perm {
        &self.layers.last().expect("at least one layer").interface
    }
}

/// Longest path from the inputs.
pub fn levels_asap<D>(g: &Graph<D>) -> Result<Vec<usize>> {
    let order = g.topological_order().ok_or_else(|| Error::invalid("there are no wheels"))?;
    let mut lvl = vec![0usize; g.vertices.len()];
    for v in order {
        lvl[v] = g.vertices[v]
            .ins
            .iter()
            .filter_map(|s| match s {
                Src::Port(u, _) => Some(lvl[*u] + 1),
                Src::In(_) => None,
            })
            .max()
            .unwrap_or(0);
    }
    Ok(lvl)
}

/// Latest possible level under the same height as [`levels_asap`].
pub fn levels_alap<D>(g: &Graph<D>) -> Result<Vec<usize>> {
    let asap = levels_asap(g)?;
    let top = asap.iter().copied().max().unwrap_or(0);
    let order = g.topological_order().expect("checked acyclic");
    let mut lvl = vec![top; g.vertices.len()];
    for &v in order.iter().rev() {
        for s in &g.vertices[v].ins {
            if let Src::Port(u, _) = s {
                lvl[*u] = lvl[*u].min(lvl[v] - 1);
            }
        }
    }
    Ok(lvl)
}

/// A random valid level assignment, possibly taller than the longest path.
pub fn levels_random<D>(g: &Graph<D>, rng: &mut Rng) -> Result<Vec<usize>> {
    let asap = levels_asap(g)?;
    let top = asap.iter().copied().max().unwrap_or(0) + rng.gen_range(0..=2);
    let order = g.topological_order().expect("checked acyclic");
    // upper bounds from the consumers, computed top-down
    let mut hi = vec![top; g.vertices.len()];
    for &v in order.iter().rev() {
        for s in &g.vertices[v].ins {
            if let Src::Port(u, _) = s {
                hi[*u] = hi[*u].min(hi[v] - 1);
            }
        }
    }
    let mut lvl = vec![0usize; g.vertices.len()];
    for v in order {
        let lo = g.vertices[v]
            .ins
            .iter()
            .filter_map(|s| match s {
                Src::Port(u, _) => Some(lvl[*u] + 1),
                Src::In(_) => None,
            })
            .max()
            .unwrap_or(0);
        lvl[v] = rng.gen_range(lo..=hi[v]);
    }
    Ok(lvl)
}

/// Builds the decomposition for a level assignment. Without `rng` the order
/// inside a layer follows the next layer's inputs from left to right; with
/// `rng` vertices and passing wires are shuffled.
pub fn decompose_with<D>(g: &Graph<D>, levels: &[usize], mut rng: Option<&mut Rng>) -> Result<LevelDecomposition> {
    if g.vertices.is_empty() {
        return Err(Error::Unsupported("decomposing a graph without vertices".into()));
    }
    let h = levels.iter().copied().max().unwrap_or(0) + 1;
    let mut w: Vec<Src> = g.outputs.clone();
    let mut layers = Vec::with_capacity(h);
    for k in (0..h).rev() {
        let pos: HashMap<Src, usize> = w.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut vs: Vec<usize> = (0..g.vertices.len()).filter(|&v| levels[v] == k).collect();
        let mut first = HashMap::new();
        for &v in &vs {
            let mut m = usize::MAX;
            for j in 0..g.vertices[v].outs {
                let p = pos.get(&Src::Port(v, j)).ok_or_else(|| {
                    Error::invalid(format!(
                        "level assignment leaves out-port {} of vertex {} unused above",
                        j + 1,
                        v + 1
                    ))
                })?;
                m = m.min(*p);
            }
            first.insert(v, m);
        }
        let mut passing: Vec<Src> = w
            .iter()
            .copied()
            .filter(|s| !matches!(s, Src::Port(u, _) if levels[*u] == k))
            .collect();
        match rng.as_deref_mut() {
            Some(r) => {
                vs.shuffle(r);
                passing.shuffle(r);
            }
            None => vs.sort_by_key(|v| first[v]),
        }
        let mut o: Vec<Src> = vs
            .iter()
            .flat_map(|&v| (0..g.vertices[v].outs).map(move |j| Src::Port(v, j)))
            .collect();
        o.extend(passing.iter().copied());
        let images = o.iter().map(|s| pos[s]).collect();
        let interface = Perm::from_images(images)?;
        let mut inputs: Vec<Src> = vs.iter().flat_map(|&v| g.vertices[v].ins.iter().copied()).collect();
        inputs.extend(passing.iter().copied());
        w = inputs;
        layers.push(Layer {
            vertices: vs,
            passing,
            interface,
        });
    }
    layers.reverse();
    let mut bottom = vec![usize::MAX; g.n_in];
    for (p, s) in w.iter().enumerate() {
        match s {
            Src::In(i) => bottom[*i] = p,
            Src::Port(u, _) => {
                return Err(Error::invalid(format!("vertex {} sits below a vertex it feeds", u + 1)));
            }
        }
    }
    Ok(LevelDecomposition {
        layers,
        bottom: Perm::from_images(bottom)?,
    })
}

/// Longest-path layering with left-to-right interface order.
pub fn level_decompose<D>(g: &Graph<D>) -> Result<LevelDecomposition> {
    decompose_with(g, &levels_asap(g)?, None)
}

/// Composes the layers of `d` in `P`.
pub fn evaluate_with(p: &dyn PropImpl, g: &DecoratedGraph, d: &LevelDecomposition) -> Result<Element> {
    let mut acc: Option<Element> = None;
    for (k, layer) in d.layers.iter().enumerate() {
        let mut parts: Vec<Element> = layer.vertices.iter().map(|&v| (*g.vertices[v].deco).clone()).collect();
        for &s in &layer.passing {
            let c = wire_color(g, s).ok_or_else(|| Error::invalid(format!("cannot color wire from {s:?}")))?;
            parts.push(p.unit_color(&c)?);
        }
        let l = crate::prop::hcomp_all(p, &parts)?;
        let l = p.biact(&layer.interface, &l, &Perm::identity(l.inp.len()))?;
        acc = Some(match acc {
            None => l,
            Some(below) => p
                .vcomp(&l, &below)
                .map_err(|e| Error::Composition(format!("layer {}: {e}", k + 1)))?,
        });
    }
    let top = acc.expect("at least one layer");
    p.biact(&Perm::identity(top.out.len()), &top, &d.bottom)
}

/// `ev(G, ξ)` by the longest-path decomposition.
pub fn evaluate(p: &dyn PropImpl, g: &DecoratedGraph) -> Result<Element> {
    let r = super::validate_decoration(g, None);
    r.into_result()?;
    for v in &g.vertices {
        if !p.contains(&v.deco) {
            return Err(Error::NotMember {
                prop: p.id().to_string(),
                detail: format!("decoration {:?}", v.deco),
            });
        }
    }
    let e = evaluate_with(p, g, &level_decompose(g)?)?;
    debug_assert_eq!(Some((e.out.clone(), e.inp.clone())), boundary(g).ok());
    Ok(e)
}
