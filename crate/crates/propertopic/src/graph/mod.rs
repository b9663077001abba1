//! (m,n)-graphs with ordered ports, decorations, substitution and evaluation.

pub mod eval;
pub mod free;
pub mod random;

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use crate::color::{Color, Element, Profile};
use crate::error::{Error, Result};

pub use eval::{evaluate, level_decompose, LevelDecomposition};
pub use free::FreeProp;

/// Where a wire starts: an input leg or an out-port of a vertex.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Src {
    In(usize),
    Port(usize, usize),
}

/// Where a wire ends: an in-port of a vertex or an output leg.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Dst {
    Port(usize, usize),
    Out(usize),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Vertex<D> {
    pub deco: D,
    /// Source of each in-port, in port order.
    pub ins: Vec<Src>,
    pub outs: usize,
}

/// A directed acyclic graph with ordered ports and labeled legs. Vertex `i`
/// carries label `i + 1`; input and output legs are labeled likewise.
///
/// Every wire is recorded once, at its end: in-ports and output legs name
/// their source.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Graph<D> {
    pub n_in: usize,
    pub vertices: Vec<Vertex<D>>,
    pub outputs: Vec<Src>,
}

pub type DecoratedGraph = Graph<Arc<Element>>;

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Violation {
    pub rule: String,
    pub at: String,
}

/// Outcome of a structural check; empty `violations` means valid.
#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct Report {
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, rule: &str, at: impl Into<String>) {
        self.violations.push(Violation {
            rule: rule.to_string(),
            at: at.into(),
        });
    }

    pub fn into_result(self) -> Result<()> {
        match self.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::invalid(format!("{} at {}", v.rule, v.at))),
        }
    }
}

impl<D> Graph<D> {
    pub fn n_out(&self) -> usize {
        self.outputs.len()
    }

    /// The one-vertex graph on a vertex with `r` inputs and `s` outputs.
    pub fn corolla(deco: D, r: usize, s: usize) -> Self {
        Graph {
            n_in: r,
            vertices: vec![Vertex {
                deco,
                ins: (0..r).map(Src::In).collect(),
                outs: s,
            }],
            outputs: (0..s).map(|j| Src::Port(0, j)).collect(),
        }
    }

    pub fn map<E>(&self, mut f: impl FnMut(&D) -> E) -> Graph<E> {
        Graph {
            n_in: self.n_in,
            vertices: self
                .vertices
                .iter()
                .map(|v| Vertex {
                    deco: f(&v.deco),
                    ins: v.ins.clone(),
                    outs: v.outs,
                })
                .collect(),
            outputs: self.outputs.clone(),
        }
    }

    pub fn try_map<E>(&self, mut f: impl FnMut(&D) -> Result<E>) -> Result<Graph<E>> {
        let mut vs = Vec::with_capacity(self.vertices.len());
        for v in &self.vertices {
            vs.push(Vertex {
                deco: f(&v.deco)?,
                ins: v.ins.clone(),
                outs: v.outs,
            });
        }
        Ok(Graph {
            n_in: self.n_in,
            vertices: vs,
            outputs: self.outputs.clone(),
        })
    }

    /// The end of every wire, indexed by source; `None` for unused sources.
    pub fn consumers(&self) -> (Vec<Vec<Dst>>, Vec<Vec<Vec<Dst>>>) {
        let mut legs = vec![vec![]; self.n_in];
        let mut ports: Vec<Vec<Vec<Dst>>> = self.vertices.iter().map(|v| vec![vec![]; v.outs]).collect();
        let mut add = |s: Src, d: Dst| match s {
            Src::In(i) => {
                if let Some(l) = legs.get_mut(i) {
                    l.push(d)
                }
            }
            Src::Port(u, j) => {
                if let Some(p) = ports.get_mut(u).and_then(|p| p.get_mut(j)) {
                    p.push(d)
                }
            }
        };
        for (v, vx) in self.vertices.iter().enumerate() {
            for (k, &s) in vx.ins.iter().enumerate() {
                add(s, Dst::Port(v, k));
            }
        }
        for (j, &s) in self.outputs.iter().enumerate() {
            add(s, Dst::Out(j));
        }
        (legs, ports)
    }

    /// Structural check. `free` relaxes the conditions for free-PROP
    /// elements: identity wires and vertex-free graphs are allowed.
    pub fn check_structure(&self, free: bool) -> Report {
        let mut r = Report::default();
        if self.n_in == 0 {
            r.push("at least one input", "graph");
        }
        if self.outputs.is_empty() {
            r.push("at least one output", "graph");
        }
        if self.vertices.is_empty() && !free {
            r.push("every component has a vertex", "graph");
        }
        for (v, vx) in self.vertices.iter().enumerate() {
            if vx.ins.is_empty() {
                r.push("every vertex has an incoming edge", format!("vertex {}", v + 1));
            }
            if vx.outs == 0 {
                r.push("every vertex has an outgoing edge", format!("vertex {}", v + 1));
            }
            for (k, s) in vx.ins.iter().enumerate() {
                if !self.valid_src(*s) {
                    r.push("edge source exists", format!("vertex {} in-port {}", v + 1, k + 1));
                }
            }
        }
        for (j, s) in self.outputs.iter().enumerate() {
            if !self.valid_src(*s) {
                r.push("edge source exists", format!("output {}", j + 1));
            }
            if let (Src::In(i), false) = (s, free) {
                r.push(
                    "no edge joins an input to an output",
                    format!("input {} to output {}", i + 1, j + 1),
                );
            }
        }
        let (legs, ports) = self.consumers();
        for (i, l) in legs.iter().enumerate() {
            if l.len() != 1 {
                r.push("each input is used exactly once", format!("input {} used {} times", i + 1, l.len()));
            }
        }
        for (v, ps) in ports.iter().enumerate() {
            for (j, p) in ps.iter().enumerate() {
                if p.len() != 1 {
                    r.push(
                        "each out-port is used exactly once",
                        format!("vertex {} out-port {} used {} times", v + 1, j + 1, p.len()),
                    );
                }
            }
        }
        if r.ok() && self.topological_order().is_none() {
            r.push("there are no wheels", format!("cycle among vertices {:?}", self.cycle_vertices()));
        }
        r
    }

    fn valid_src(&self, s: Src) -> bool {
        match s {
            Src::In(i) => i < self.n_in,
            Src::Port(u, j) => self.vertices.get(u).is_some_and(|v| j < v.outs),
        }
    }

    /// Kahn's algorithm; `None` when there is a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.vertices.len();
        let mut indeg = vec![0usize; n];
        let mut succ = vec![vec![]; n];
        for (v, vx) in self.vertices.iter().enumerate() {
            for s in &vx.ins {
                if let Src::Port(u, _) = s {
                    indeg[v] += 1;
                    succ[*u].push(v);
                }
            }
        }
        let mut q: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(u) = q.pop_front() {
            order.push(u);
            for &v in &succ[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    q.push_back(v);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    fn cycle_vertices(&self) -> Vec<usize> {
        let order = self.topological_order_partial();
        (0..self.vertices.len()).filter(|v| !order.contains(v)).map(|v| v + 1).collect()
    }

    fn topological_order_partial(&self) -> Vec<usize> {
        let n = self.vertices.len();
        let mut done = vec![false; n];
        let mut order = vec![];
        loop {
            let next = (0..n).find(|&v| {
                !done[v]
                    && self.vertices[v].ins.iter().all(|s| match s {
                        Src::In(_) => true,
                        Src::Port(u, _) => done[*u],
                    })
            });
            match next {
                Some(v) => {
                    done[v] = true;
                    order.push(v);
                }
                None => return order,
            }
        }
    }

    /// Connected components as sorted vertex lists, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for (v, vx) in self.vertices.iter().enumerate() {
            for s in &vx.ins {
                if let Src::Port(u, _) = s {
                    let (a, b) = (find(&mut parent, *u), find(&mut parent, v));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort();
        out
    }

    /// Renumbers vertices by breadth-first discovery from the input legs in
    /// order. Isomorphic graphs, that is graphs that differ only by vertex
    /// numbering, get equal results.
    pub fn canonical_relabel(&self) -> Graph<D>
    where
        D: Clone,
    {
        let n = self.vertices.len();
        let (legs, ports) = self.consumers();
        let mut new_id: Vec<Option<usize>> = vec![None; n];
        let mut order = Vec::with_capacity(n);
        let mut q = VecDeque::new();
        let visit = |v: usize, new_id: &mut Vec<Option<usize>>, q: &mut VecDeque<usize>, order: &mut Vec<usize>| {
            if new_id[v].is_none() {
                new_id[v] = Some(order.len());
                order.push(v);
                q.push_back(v);
            }
        };
        let roots: Vec<usize> = legs
            .iter()
            .flatten()
            .chain(ports.iter().flatten().flatten())
            .filter_map(|d| match d {
                Dst::Port(v, _) => Some(*v),
                Dst::Out(_) => None,
            })
            .chain(0..n)
            .collect();
        let mut leg_roots = legs.iter().flatten().filter_map(|d| match d {
            Dst::Port(v, _) => Some(*v),
            Dst::Out(_) => None,
        });
        let mut fallback = roots.into_iter();
        while let Some(start) = leg_roots.next().or_else(|| fallback.find(|&v| new_id[v].is_none())) {
            visit(start, &mut new_id, &mut q, &mut order);
            while let Some(u) = q.pop_front() {
                for s in &self.vertices[u].ins {
                    if let Src::Port(w, _) = s {
                        visit(*w, &mut new_id, &mut q, &mut order);
                    }
                }
                for p in &ports[u] {
                    for d in p {
                        if let Dst::Port(w, _) = d {
                            visit(*w, &mut new_id, &mut q, &mut order);
                        }
                    }
                }
            }
        }
        let rn = |s: &Src| match *s {
            Src::In(i) => Src::In(i),
            Src::Port(u, j) => Src::Port(new_id[u].expect("all visited"), j),
        };
        Graph {
            n_in: self.n_in,
            vertices: order
                .iter()
                .map(|&v| {
                    let vx = &self.vertices[v];
                    Vertex {
                        deco: vx.deco.clone(),
                        ins: vx.ins.iter().map(rn).collect(),
                        outs: vx.outs,
                    }
                })
                .collect(),
            outputs: self.outputs.iter().map(rn).collect(),
        }
    }

    /// Renumbers vertices so that new vertex `k` is old vertex `order[k]`.
    pub fn reorder_vertices(&self, order: &[usize]) -> Graph<D>
    where
        D: Clone,
    {
        let mut new_id = vec![0; self.vertices.len()];
        for (k, &v) in order.iter().enumerate() {
            new_id[v] = k;
        }
        let rn = |s: &Src| match *s {
            Src::In(i) => Src::In(i),
            Src::Port(u, j) => Src::Port(new_id[u], j),
        };
        Graph {
            n_in: self.n_in,
            vertices: order
                .iter()
                .map(|&v| {
                    let vx = &self.vertices[v];
                    Vertex {
                        deco: vx.deco.clone(),
                        ins: vx.ins.iter().map(rn).collect(),
                        outs: vx.outs,
                    }
                })
                .collect(),
            outputs: self.outputs.iter().map(rn).collect(),
        }
    }

    /// Replaces vertex `v` by `h`, splicing `h`'s legs onto `v`'s ports.
    /// The vertices of `h` take `v`'s place in the numbering, in their own
    /// order.
    pub fn substitute(&self, v: usize, h: &Graph<D>) -> Result<Graph<D>>
    where
        D: Clone,
    {
        let vx = self.vertices.get(v).ok_or_else(|| Error::invalid(format!("no vertex {}", v + 1)))?;
        if h.n_in != vx.ins.len() || h.outputs.len() != vx.outs {
            return Err(Error::Arity {
                expected: vx.ins.len() + vx.outs,
                found: h.n_in + h.outputs.len(),
            });
        }
        let k = h.vertices.len();
        let host = |u: usize| if u < v { u } else { u + k - 1 };
        fn outer<D>(g: &Graph<D>, h: &Graph<D>, v: usize, host: &dyn Fn(usize) -> usize, s: Src) -> Src {
            match s {
                Src::In(i) => Src::In(i),
                Src::Port(u, j) if u == v => inner(g, h, v, host, h.outputs[j]),
                Src::Port(u, j) => Src::Port(host(u), j),
            }
        }
        fn inner<D>(g: &Graph<D>, h: &Graph<D>, v: usize, host: &dyn Fn(usize) -> usize, s: Src) -> Src {
            match s {
                Src::In(i) => outer(g, h, v, host, g.vertices[v].ins[i]),
                Src::Port(w, p) => Src::Port(v + w, p),
            }
        }
        let mut vertices = Vec::with_capacity(self.vertices.len() + k);
        for (u, ux) in self.vertices.iter().enumerate() {
            if u == v {
                for hx in &h.vertices {
                    vertices.push(Vertex {
                        deco: hx.deco.clone(),
                        ins: hx.ins.iter().map(|&s| inner(self, h, v, &host, s)).collect(),
                        outs: hx.outs,
                    });
                }
            } else {
                vertices.push(Vertex {
                    deco: ux.deco.clone(),
                    ins: ux.ins.iter().map(|&s| outer(self, h, v, &host, s)).collect(),
                    outs: ux.outs,
                });
            }
        }
        Ok(Graph {
            n_in: self.n_in,
            vertices,
            outputs: self.outputs.iter().map(|&s| outer(self, h, v, &host, s)).collect(),
        })
    }
}

/// Color of the wire starting at `s`, read from the decorations.
pub fn wire_color(g: &DecoratedGraph, s: Src) -> Option<Color> {
    match s {
        Src::Port(u, j) => g.vertices.get(u)?.deco.out.colors().get(j).cloned(),
        Src::In(i) => {
            for v in &g.vertices {
                for (k, t) in v.ins.iter().enumerate() {
                    if *t == Src::In(i) {
                        return v.deco.inp.colors().get(k).cloned();
                    }
                }
            }
            None
        }
    }
}

/// Boundary profiles `(out; in)` of a decorated graph.
pub fn boundary(g: &DecoratedGraph) -> Result<(Profile, Profile)> {
    let col = |s: Src| wire_color(g, s).ok_or_else(|| Error::invalid(format!("cannot color wire from {s:?}")));
    let out = g.outputs.iter().map(|&s| col(s)).collect::<Result<Vec<_>>>()?;
    let inp = (0..g.n_in).map(|i| col(Src::In(i))).collect::<Result<Vec<_>>>()?;
    Ok((Profile::new(out)?, Profile::new(inp)?))
}

pub fn validate_mn_graph<D>(g: &Graph<D>) -> Report {
    g.check_structure(false)
}

/// Color matching at every port, optionally against declared leg colors.
pub fn validate_decoration(g: &DecoratedGraph, legs: Option<(&Profile, &Profile)>) -> Report {
    let mut r = validate_mn_graph(g);
    if !r.ok() {
        return r;
    }
    for (v, vx) in g.vertices.iter().enumerate() {
        if vx.deco.inp.len() != vx.ins.len() || vx.deco.out.len() != vx.outs {
            r.push("decoration arity matches ports", format!("vertex {}", v + 1));
            continue;
        }
        for (k, &s) in vx.ins.iter().enumerate() {
            if let Src::Port(u, j) = s {
                let have = g.vertices[u].deco.out.colors().get(j);
                if have != Some(vx.deco.inp.get(k)) {
                    r.push(
                        "color-matching",
                        format!("vertex {} in-port {} against vertex {} out-port {}", v + 1, k + 1, u + 1, j + 1),
                    );
                }
            }
        }
    }
    if let (Some((out, inp)), true) = (legs, r.ok()) {
        match boundary(g) {
            Ok((o, i)) => {
                for (j, (a, b)) in o.colors().iter().zip(out.colors()).enumerate() {
                    if a != b {
                        r.push("color-matching", format!("output leg {}", j + 1));
                    }
                }
                for (k, (a, b)) in i.colors().iter().zip(inp.colors()).enumerate() {
                    if a != b {
                        r.push("color-matching", format!("input leg {}", k + 1));
                    }
                }
                if o.len() != out.len() || i.len() != inp.len() {
                    r.push("leg count", "graph");
                }
            }
            Err(e) => r.push("color-matching", e.to_string()),
        }
    }
    r
}

/// The canonical form in the labeled sense: labels are already rigid, so the
/// graph is its own canonical form once it is structurally valid.
pub fn canonicalize<D: Clone>(g: &Graph<D>) -> Graph<D> {
    g.clone()
}

pub fn substitute(g: &DecoratedGraph, v: usize, h: &DecoratedGraph) -> Result<DecoratedGraph> {
    let vx = g.vertices.get(v).ok_or_else(|| Error::invalid(format!("no vertex {}", v + 1)))?;
    let (out, inp) = boundary(h)?;
    if out != vx.deco.out || inp != vx.deco.inp {
        return Err(Error::Composition(format!(
            "boundary {out:?}{inp:?} of the inserted graph against decoration {:?}{:?}",
            vx.deco.out, vx.deco.inp
        )));
    }
    g.substitute(v, h)
}
