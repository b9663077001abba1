//! The leveled "graph of graphs" text form of a propertope.
//!
//! `levels[0]` lists base elements; `levels[k]` for `k ≥ 1` lists entries,
//! each a sequence of bare graphs. The single entry on the top level is the
//! propertope itself; the entries on level `k - 1` are the inputs of the
//! level-`k` entries, in entry order and then position order.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Propertope, Tower};
use crate::color::{Color, Element};
use crate::error::{Error, Result};
use crate::graph::{Graph, Src, Vertex};
use crate::json::{color_from_json, color_to_json, element_from_json, element_to_json, to_canonical_string};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metagraph {
    pub dim: usize,
    pub levels: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<Value>,
}

impl Metagraph {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }

    pub fn to_canonical_string(&self) -> String {
        to_canonical_string(&self.to_json())
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        serde_json::from_value(v.clone()).map_err(|e| Error::parse("metagraph", e.to_string()))
    }
}

/// A graph without decorations. Legs and ports are 1-based; `[0, i]` is
/// input leg `i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BareGraph {
    pub inputs: usize,
    pub vertices: Vec<BareVertex>,
    pub outputs: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BareVertex {
    pub position: usize,
    #[serde(rename = "in")]
    pub ins: Vec<[usize; 2]>,
    pub outs: usize,
}

fn src_to_pair(s: Src) -> [usize; 2] {
    match s {
        Src::In(i) => [0, i + 1],
        Src::Port(v, p) => [v + 1, p + 1],
    }
}

fn pair_to_src(p: [usize; 2], at: &str) -> Result<Src> {
    match p {
        [_, 0] => Err(Error::parse(at, "ports and legs are 1-based")),
        [0, i] => Ok(Src::In(i - 1)),
        [v, q] => Ok(Src::Port(v - 1, q - 1)),
    }
}

fn slice_parts(x: &Element) -> Result<&crate::slice::SliceBody> {
    match &x.payload {
        crate::color::Payload::Slice(b) => Ok(b),
        _ => Err(Error::invalid(format!("{x:?} is not a slice element"))),
    }
}

fn color_element(c: &Color) -> Result<Arc<Element>> {
    c.as_elem()
        .cloned()
        .ok_or_else(|| Error::invalid(format!("{c:?} is not an element")))
}

pub fn encode_metagraph(g: &Propertope) -> Result<Metagraph> {
    if g.dim == 0 {
        return Ok(Metagraph {
            dim: 0,
            levels: vec![],
            color: Some(color_to_json(&g.color)),
        });
    }
    let mut current = vec![color_element(&g.color)?];
    let mut levels = vec![];
    for _ in 1..g.dim {
        let mut entries = vec![];
        let mut next = vec![];
        for x in &current {
            let b = slice_parts(x)?;
            let mut entry = vec![];
            for (graph, pos) in b.graphs.iter().zip(&b.positions) {
                let bare = BareGraph {
                    inputs: graph.n_in,
                    vertices: graph
                        .vertices
                        .iter()
                        .zip(pos)
                        .map(|(v, &p)| BareVertex {
                            position: p + 1,
                            ins: v.ins.iter().map(|&s| src_to_pair(s)).collect(),
                            outs: v.outs,
                        })
                        .collect(),
                    outputs: graph.outputs.iter().map(|&s| src_to_pair(s)).collect(),
                };
                entry.push(serde_json::to_value(bare).expect("serializable"));
            }
            entries.push(Value::Array(entry));
            for c in x.inp.colors() {
                next.push(color_element(c)?);
            }
        }
        levels.push(Value::Array(entries));
        current = next;
    }
    levels.push(Value::Array(current.iter().map(|e| element_to_json(e)).collect()));
    levels.reverse();
    Ok(Metagraph {
        dim: g.dim,
        levels,
        color: None,
    })
}

/// Rebuilds a propertope bottom-up, validating every level against `tower`.
pub fn decode_metagraph(m: &Metagraph, tower: &Tower) -> Result<Propertope> {
    if m.dim == 0 {
        if !m.levels.is_empty() {
            return Err(Error::parse("levels", "a 0-dimensional propertope has no levels"));
        }
        let v = m.color.as_ref().ok_or_else(|| Error::parse("color", "missing color"))?;
        let c = color_from_json(v, "color")?;
        if !tower.base().has_color(&c) {
            return Err(Error::parse("color", format!("{c:?} is not a color of {}", tower.base().id())));
        }
        return Ok(Propertope::point(c));
    }
    if m.color.is_some() {
        return Err(Error::parse("color", "only 0-dimensional propertopes carry a color"));
    }
    if m.levels.len() != m.dim {
        return Err(Error::parse(
            "levels",
            format!("expected {} levels, found {}", m.dim, m.levels.len()),
        ));
    }
    if tower.levels() + 1 < m.dim {
        return Err(Error::Unsupported(format!("dimension {} exceeds the tower", m.dim)));
    }
    let bottom = m.levels[0]
        .as_array()
        .ok_or_else(|| Error::parse("levels[0]", "expected an array of elements"))?;
    let mut items = Vec::with_capacity(bottom.len());
    for (i, v) in bottom.iter().enumerate() {
        let at = format!("levels[0][{i}]");
        let e = element_from_json(v, &at)?;
        if !tower.base().contains(&e) {
            return Err(Error::parse(at, format!("not an element of {}", tower.base().id())));
        }
        items.push(e);
    }
    for k in 1..m.dim {
        let entries = m.levels[k]
            .as_array()
            .ok_or_else(|| Error::parse(format!("levels[{k}]"), "expected an array of entries"))?;
        let slice = tower.slice(k)?;
        let mut offset = 0;
        let mut built = Vec::with_capacity(entries.len());
        for (e, entry) in entries.iter().enumerate() {
            let eat = format!("levels[{k}][{e}]");
            let graphs = entry
                .as_array()
                .ok_or_else(|| Error::parse(&eat, "an entry is an array of graphs"))?;
            let bare = graphs
                .iter()
                .enumerate()
                .map(|(j, g)| {
                    serde_json::from_value::<BareGraph>(g.clone())
                        .map_err(|err| Error::parse(format!("{eat}.graphs[{j}]"), err.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            let total: usize = bare.iter().map(|g| g.vertices.len()).sum();
            if offset + total > items.len() {
                return Err(Error::parse(
                    &eat,
                    format!("needs {total} decorations but level {k} has only {} left", items.len() - offset),
                ));
            }
            let decos = &items[offset..offset + total];
            offset += total;
            let mut gs = vec![];
            let mut ps = vec![];
            for (j, bg) in bare.iter().enumerate() {
                let gat = format!("{eat}.graphs[{j}]");
                let mut vertices = vec![];
                let mut pos = vec![];
                for (t, v) in bg.vertices.iter().enumerate() {
                    let vat = format!("{gat}.vertices[{t}]");
                    let p = v
                        .position
                        .checked_sub(1)
                        .filter(|&p| p < total)
                        .ok_or_else(|| Error::parse(&vat, format!("position {} is outside 1..{total}", v.position)))?;
                    let ins = v.ins.iter().map(|&s| pair_to_src(s, &vat)).collect::<Result<Vec<_>>>()?;
                    vertices.push(Vertex {
                        deco: Arc::new(decos[p].clone()),
                        ins,
                        outs: v.outs,
                    });
                    pos.push(p);
                }
                let outputs = bg.outputs.iter().map(|&s| pair_to_src(s, &gat)).collect::<Result<Vec<_>>>()?;
                gs.push(Graph {
                    n_in: bg.inputs,
                    vertices,
                    outputs,
                });
                ps.push(pos);
            }
            let x = slice.element(gs, ps).map_err(|err| Error::parse(&eat, err.to_string()))?;
            built.push(x);
        }
        if offset != items.len() {
            return Err(Error::parse(
                format!("levels[{k}]"),
                format!("uses {offset} of the {} entries below", items.len()),
            ));
        }
        items = built;
    }
    if items.len() != 1 {
        return Err(Error::parse(
            format!("levels[{}]", m.dim - 1),
            format!("the top level has {} entries, expected 1", items.len()),
        ));
    }
    Ok(Propertope::of(m.dim, &items[0]))
}
