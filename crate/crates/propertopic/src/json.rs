//! Self-describing JSON forms of colors, elements and decorated graphs.
//!
//! Elements carry their owner, so decoding needs no PROP; callers check
//! membership afterwards with `PropImpl::contains`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::color::{Color, Element, Name, Payload, Profile};
use crate::error::{Error, Result};
use crate::graph::{boundary, DecoratedGraph, Graph, Src, Vertex};
use crate::prop::operad::Factor;
use crate::slice::SliceBody;

pub fn color_to_json(c: &Color) -> Value {
    match c {
        Color::Atom(a) => Value::String(a.to_string()),
        Color::Elem(e) => element_to_json(e),
    }
}

pub fn color_from_json(v: &Value, at: &str) -> Result<Color> {
    match v {
        Value::String(s) => Ok(Color::atom(s)),
        Value::Object(_) => Ok(Color::Elem(Arc::new(element_from_json(v, at)?))),
        _ => Err(Error::parse(at, "a color is a string or an element object")),
    }
}

pub fn profile_to_json(p: &Profile) -> Value {
    Value::Array(p.colors().iter().map(color_to_json).collect())
}

pub fn profile_from_json(v: &Value, at: &str) -> Result<Profile> {
    let arr = v.as_array().ok_or_else(|| Error::parse(at, "a profile is an array"))?;
    let cs = arr
        .iter()
        .enumerate()
        .map(|(i, c)| color_from_json(c, &format!("{at}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Profile::new(cs).map_err(|_| Error::parse(at, "profiles are non-empty"))
}

pub fn element_to_json(e: &Element) -> Value {
    json!({
        "owner": &*e.owner,
        "out": profile_to_json(&e.out),
        "in": profile_to_json(&e.inp),
        "payload": payload_to_json(e),
    })
}

fn payload_to_json(e: &Element) -> Value {
    match &e.payload {
        Payload::Point => json!({"kind": "point"}),
        Payload::Data(d) => json!({"kind": "data", "data": &**d}),
        Payload::Sym(s) => json!({"kind": "sym", "name": &**s}),
        Payload::Graph(g) => json!({"kind": "graph", "graph": graph_to_json(g, Some((&e.out, &e.inp)))}),
        Payload::Factors(fs) => json!({
            "kind": "factors",
            "factors": fs.iter().map(|f| json!({
                "output": f.output + 1,
                "inputs": f.inputs.iter().map(|q| q + 1).collect::<Vec<_>>(),
                "op": element_to_json(&f.op),
            })).collect::<Vec<_>>(),
        }),
        Payload::Slice(b) => json!({
            "kind": "slice",
            "graphs": b.graphs.iter().map(|g| graph_to_json(g, None)).collect::<Vec<_>>(),
            "positions": b.positions.iter().map(|p| p.iter().map(|q| q + 1).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }),
        Payload::Fiber { over, index } => json!({"kind": "fiber", "over": element_to_json(over), "index": index}),
    }
}

fn field<'a>(v: &'a Value, key: &str, at: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::parse(at, format!("missing field `{key}`")))
}

fn as_usize(v: &Value, at: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::parse(at, "expected a non-negative integer"))
}

fn one_based_list(v: &Value, at: &str) -> Result<Vec<usize>> {
    v.as_array()
        .ok_or_else(|| Error::parse(at, "expected an array"))?
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let k = as_usize(x, &format!("{at}[{i}]"))?;
            k.checked_sub(1)
                .ok_or_else(|| Error::parse(format!("{at}[{i}]"), "positions are 1-based"))
        })
        .collect()
}

pub fn element_from_json(v: &Value, at: &str) -> Result<Element> {
    let owner: Name = Arc::from(
        field(v, "owner", at)?
            .as_str()
            .ok_or_else(|| Error::parse(format!("{at}.owner"), "expected a string"))?,
    );
    let out = profile_from_json(field(v, "out", at)?, &format!("{at}.out"))?;
    let inp = profile_from_json(field(v, "in", at)?, &format!("{at}.in"))?;
    let pat = format!("{at}.payload");
    let p = field(v, "payload", at)?;
    let kind = field(p, "kind", &pat)?.as_str().unwrap_or_default();
    let payload = match kind {
        "point" => Payload::Point,
        "data" => Payload::Data(
            field(p, "data", &pat)?
                .as_array()
                .ok_or_else(|| Error::parse(&pat, "data is an array"))?
                .iter()
                .map(|x| {
                    x.as_u64()
                        .map(|k| k as u32)
                        .ok_or_else(|| Error::parse(&pat, "data entries are integers"))
                })
                .collect::<Result<Vec<u32>>>()?
                .into(),
        ),
        "sym" => Payload::Sym(Arc::from(
            field(p, "name", &pat)?
                .as_str()
                .ok_or_else(|| Error::parse(&pat, "name is a string"))?,
        )),
        "graph" => Payload::Graph(Arc::new(graph_from_json(field(p, "graph", &pat)?, &format!("{pat}.graph"))?.0)),
        "factors" => {
            let arr = field(p, "factors", &pat)?
                .as_array()
                .ok_or_else(|| Error::parse(&pat, "factors is an array"))?;
            let mut fs = Vec::new();
            for (i, f) in arr.iter().enumerate() {
                let fat = format!("{pat}.factors[{i}]");
                fs.push(Factor {
                    output: as_usize(field(f, "output", &fat)?, &fat)?
                        .checked_sub(1)
                        .ok_or_else(|| Error::parse(&fat, "positions are 1-based"))?,
                    inputs: one_based_list(field(f, "inputs", &fat)?, &fat)?,
                    op: element_from_json(field(f, "op", &fat)?, &format!("{fat}.op"))?,
                });
            }
            Payload::Factors(fs.into())
        }
        "slice" => {
            let gs = field(p, "graphs", &pat)?
                .as_array()
                .ok_or_else(|| Error::parse(&pat, "graphs is an array"))?;
            let graphs = gs
                .iter()
                .enumerate()
                .map(|(i, g)| graph_from_json(g, &format!("{pat}.graphs[{i}]")).map(|x| x.0))
                .collect::<Result<Vec<_>>>()?;
            let ps = field(p, "positions", &pat)?
                .as_array()
                .ok_or_else(|| Error::parse(&pat, "positions is an array"))?;
            let positions = ps
                .iter()
                .enumerate()
                .map(|(i, x)| one_based_list(x, &format!("{pat}.positions[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            Payload::Slice(Arc::new(SliceBody { graphs, positions }))
        }
        "fiber" => Payload::Fiber {
            over: Arc::new(element_from_json(field(p, "over", &pat)?, &format!("{pat}.over"))?),
            index: as_usize(field(p, "index", &pat)?, &pat)? as u32,
        },
        other => return Err(Error::parse(&pat, format!("unknown payload kind `{other}`"))),
    };
    Ok(Element { owner, out, inp, payload })
}

/// `graph.json`: legs with labels and colors, vertices grouped by connected
/// component, and one edge record per wire.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GraphFile {
    pub inputs: Vec<Leg>,
    pub outputs: Vec<Leg>,
    pub components: Vec<ComponentFile>,
    pub edges: Vec<Edge>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Leg {
    pub label: usize,
    pub color: Value,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ComponentFile {
    pub label: usize,
    pub vertices: Vec<VertexFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VertexFile {
    pub label: usize,
    #[serde(rename = "in")]
    pub inp: Vec<Value>,
    pub out: Vec<Value>,
    pub decoration: Value,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub from: End,
    pub to: End,
}

/// An edge end; `port` is absent for legs.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq, PartialOrd, Ord)]
pub struct End {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub port: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<usize>,
}

impl End {
    fn vertex(v: usize, p: usize) -> Self {
        End {
            vertex: Some(v + 1),
            port: Some(p + 1),
            input: None,
            output: None,
        }
    }

    fn from_src(s: Src) -> Self {
        match s {
            Src::In(i) => End {
                vertex: None,
                port: None,
                input: Some(i + 1),
                output: None,
            },
            Src::Port(u, j) => End::vertex(u, j),
        }
    }
}

/// Serializes a decorated graph. Leg colors come from `legs` when given,
/// otherwise from the decorations.
pub fn graph_to_json(g: &DecoratedGraph, legs: Option<(&Profile, &Profile)>) -> Value {
    serde_json::to_value(graph_to_file(g, legs)).expect("serializable")
}

pub fn graph_to_file(g: &DecoratedGraph, legs: Option<(&Profile, &Profile)>) -> GraphFile {
    let (out, inp) = match legs {
        Some((o, i)) => (o.clone(), i.clone()),
        None => boundary(g).expect("decorated graph has colored legs"),
    };
    let leg = |k: usize, c: &Color| Leg {
        label: k + 1,
        color: color_to_json(c),
    };
    let components = g
        .components()
        .into_iter()
        .enumerate()
        .map(|(ci, vs)| ComponentFile {
            label: ci + 1,
            vertices: vs
                .into_iter()
                .map(|v| {
                    let d = &g.vertices[v].deco;
                    VertexFile {
                        label: v + 1,
                        inp: d.inp.colors().iter().map(color_to_json).collect(),
                        out: d.out.colors().iter().map(color_to_json).collect(),
                        decoration: element_to_json(d),
                    }
                })
                .collect(),
        })
        .collect();
    let mut edges = Vec::new();
    for (v, vx) in g.vertices.iter().enumerate() {
        for (k, &s) in vx.ins.iter().enumerate() {
            edges.push(Edge {
                from: End::from_src(s),
                to: End::vertex(v, k),
            });
        }
    }
    for (j, &s) in g.outputs.iter().enumerate() {
        edges.push(Edge {
            from: End::from_src(s),
            to: End {
                vertex: None,
                port: None,
                input: None,
                output: Some(j + 1),
            },
        });
    }
    GraphFile {
        inputs: inp.colors().iter().enumerate().map(|(k, c)| leg(k, c)).collect(),
        outputs: out.colors().iter().enumerate().map(|(k, c)| leg(k, c)).collect(),
        components,
        edges,
    }
}

/// Parses `graph.json`, returning the graph and its declared leg colors
/// `(out, in)`.
pub fn graph_from_json(v: &Value, at: &str) -> Result<(DecoratedGraph, Profile, Profile)> {
    let f: GraphFile = serde_json::from_value(v.clone()).map_err(|e| Error::parse(at, e.to_string()))?;
    graph_from_file(&f, at)
}

fn labeled<T: Clone>(items: Vec<(usize, T)>, what: &str, at: &str) -> Result<Vec<T>> {
    let n = items.len();
    let mut slots: Vec<Option<T>> = vec![None; n];
    for (label, x) in items {
        let slot = label
            .checked_sub(1)
            .and_then(|i| slots.get_mut(i))
            .ok_or_else(|| Error::parse(at, format!("{what} label {label} is outside 1..{n}")))?;
        if slot.replace(x).is_some() {
            return Err(Error::parse(at, format!("duplicate {what} label {label}")));
        }
    }
    Ok(slots.into_iter().map(|x| x.expect("bijection")).collect())
}

pub fn graph_from_file(f: &GraphFile, at: &str) -> Result<(DecoratedGraph, Profile, Profile)> {
    let legs = |ls: &[Leg], what: &str| -> Result<Profile> {
        let cs = ls
            .iter()
            .map(|l| Ok((l.label, color_from_json(&l.color, &format!("{at}.{what}"))?)))
            .collect::<Result<Vec<_>>>()?;
        Profile::new(labeled(cs, what, at)?).map_err(|_| Error::parse(at, format!("no {what}")))
    };
    let inp = legs(&f.inputs, "input")?;
    let out = legs(&f.outputs, "output")?;
    let mut vs = Vec::new();
    for (ci, c) in f.components.iter().enumerate() {
        for (vi, vx) in c.vertices.iter().enumerate() {
            let vat = format!("{at}.components[{ci}].vertices[{vi}]");
            let deco = element_from_json(&vx.decoration, &format!("{vat}.decoration"))?;
            let pin = vx.inp.iter().map(|c| color_from_json(c, &vat)).collect::<Result<Vec<_>>>()?;
            let pout = vx.out.iter().map(|c| color_from_json(c, &vat)).collect::<Result<Vec<_>>>()?;
            if pin != deco.inp.colors() || pout != deco.out.colors() {
                return Err(Error::parse(&vat, "port colors differ from the decoration's profiles"));
            }
            vs.push((vx.label, Arc::new(deco)));
        }
    }
    let decos = labeled(vs, "vertex", at)?;
    let mut ins: Vec<Vec<Option<Src>>> = decos.iter().map(|d| vec![None; d.inp.len()]).collect();
    let mut outputs: Vec<Option<Src>> = vec![None; out.len()];
    for (ei, e) in f.edges.iter().enumerate() {
        let eat = format!("{at}.edges[{ei}]");
        let src = match (&e.from.input, &e.from.vertex, &e.from.port) {
            (Some(i), None, None) if *i >= 1 && *i <= inp.len() => Src::In(i - 1),
            (None, Some(v), Some(p)) if *v >= 1 && *v <= decos.len() && *p >= 1 && *p <= decos[v - 1].out.len() => Src::Port(v - 1, p - 1),
            _ => return Err(Error::parse(&eat, "edge source is not an input leg or an existing out-port")),
        };
        let slot = match (&e.to.output, &e.to.vertex, &e.to.port) {
            (Some(o), None, None) if *o >= 1 && *o <= out.len() => &mut outputs[o - 1],
            (None, Some(v), Some(p)) if *v >= 1 && *v <= decos.len() && *p >= 1 && *p <= decos[v - 1].inp.len() => &mut ins[v - 1][p - 1],
            _ => return Err(Error::parse(&eat, "edge target is not an output leg or an existing in-port")),
        };
        if slot.replace(src).is_some() {
            return Err(Error::parse(&eat, "two edges end at the same place"));
        }
    }
    let vertices = decos
        .into_iter()
        .zip(ins)
        .enumerate()
        .map(|(v, (d, i))| {
            Ok(Vertex {
                outs: d.out.len(),
                ins: i
                    .into_iter()
                    .enumerate()
                    .map(|(k, s)| s.ok_or_else(|| Error::parse(at, format!("vertex {} in-port {} has no edge", v + 1, k + 1))))
                    .collect::<Result<_>>()?,
                deco: d,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let outputs = outputs
        .into_iter()
        .enumerate()
        .map(|(j, s)| s.ok_or_else(|| Error::parse(at, format!("output {} has no edge", j + 1))))
        .collect::<Result<Vec<_>>>()?;
    Ok((
        Graph {
            n_in: inp.len(),
            vertices,
            outputs,
        },
        out,
        inp,
    ))
}

/// Deterministic pretty JSON with sorted object keys.
pub fn to_canonical_string(v: &Value) -> String {
    fn sort(v: &Value) -> Value {
        match v {
            Value::Object(m) => {
                let b: BTreeMap<&String, Value> = m.iter().map(|(k, x)| (k, sort(x))).collect();
                Value::Object(b.into_iter().map(|(k, x)| (k.clone(), x)).collect())
            }
            Value::Array(a) => Value::Array(a.iter().map(sort).collect()),
            x => x.clone(),
        }
    }
    serde_json::to_string_pretty(&sort(v)).expect("serializable")
}
