//! The slice construction `P ↦ P⁺`: colors are elements of `P`, elements are
//! sequences of `P`-decorated graphs, vertical composition is substitution.

pub mod fibration;

use std::sync::Arc;

use rand::Rng as _;
use rand::SeedableRng;

use crate::color::{Color, Element, Name, Payload, Profile};
use crate::error::{Error, Result};
use crate::graph::{evaluate, validate_decoration, DecoratedGraph, Graph, Report, Src, Vertex};
use crate::perm::Perm;
use crate::prop::{check_composable, check_owner, PropImpl, PropRef, Rng};

pub use fibration::{differentiate, integrate, DiffAlgebra, IntegralProp, PropMap};

/// The graphs of a slice element together with the input position of every
/// vertex. Vertex `t` of graph `j` is decorated by input `positions[j][t]`,
/// and positions increase along each graph.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SliceBody {
    pub graphs: Vec<DecoratedGraph>,
    pub positions: Vec<Vec<usize>>,
}

impl SliceBody {
    /// Sorts the vertices of every graph by position.
    pub fn normalize(graphs: Vec<DecoratedGraph>, positions: Vec<Vec<usize>>) -> SliceBody {
        let mut gs = Vec::with_capacity(graphs.len());
        let mut ps = Vec::with_capacity(positions.len());
        for (g, pos) in graphs.into_iter().zip(positions) {
            let mut order: Vec<usize> = (0..pos.len()).collect();
            order.sort_by_key(|&t| pos[t]);
            if order.iter().enumerate().all(|(k, &t)| k == t) {
                gs.push(g);
                ps.push(pos);
            } else {
                gs.push(g.reorder_vertices(&order));
                ps.push(order.iter().map(|&t| pos[t]).collect());
            }
        }
        SliceBody { graphs: gs, positions: ps }
    }

    pub fn n_inputs(&self) -> usize {
        self.positions.iter().map(|p| p.len()).sum()
    }
}

pub fn elem_color(e: &Element) -> Color {
    Color::Elem(Arc::new(e.clone()))
}

fn color_elem(c: &Color) -> Result<&Arc<Element>> {
    c.as_elem().ok_or_else(|| Error::UnknownColor(format!("{c:?} is not an element")))
}

/// The slice PROP over `base`.
pub struct SliceProp {
    id: Name,
    base: PropRef,
    depth: usize,
}

/// The special elements that drive the consistency relations.
#[derive(Clone, Debug)]
pub enum Special {
    /// `G_{α⊗β} = 1_α ⊔ 1_β`.
    Tensor(Element, Element),
    /// `G_{α∘β}`: `α` on top of `β`.
    Circ(Element, Element),
    /// `σ1_ατ`.
    TwistedUnit(Perm, Element, Perm),
}

impl SliceProp {
    pub fn new(base: PropRef) -> Self {
        let id = format!("{}+", base.id());
        SliceProp {
            id: Arc::from(id.as_str()),
            base,
            depth: 2,
        }
    }

    /// Bounds the nesting of factorizations used by the sampler.
    pub fn with_sample_depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }

    pub fn base(&self) -> &PropRef {
        &self.base
    }

    pub fn body<'a>(&self, x: &'a Element) -> Result<&'a SliceBody> {
        check_owner(self, x)?;
        match &x.payload {
            Payload::Slice(b) => Ok(b),
            _ => Err(Error::NotMember {
                prop: self.id.to_string(),
                detail: format!("{x:?}"),
            }),
        }
    }

    fn make(&self, out: Profile, inp: Profile, body: SliceBody) -> Element {
        Element::new(&self.id, out, inp, Payload::Slice(Arc::new(body)))
    }

    /// Builds an element from graphs and positions, reading the input
    /// profile off the decorations and the output profile off the
    /// evaluations.
    pub fn element(&self, graphs: Vec<DecoratedGraph>, positions: Vec<Vec<usize>>) -> Result<Element> {
        if graphs.len() != positions.len() {
            return Err(Error::Arity {
                expected: graphs.len(),
                found: positions.len(),
            });
        }
        let s: usize = positions.iter().map(|p| p.len()).sum();
        let mut inp: Vec<Option<Color>> = vec![None; s];
        for (j, (g, ps)) in graphs.iter().zip(&positions).enumerate() {
            if g.vertices.len() != ps.len() {
                return Err(Error::invalid(format!(
                    "graph {} has {} vertices and {} positions",
                    j + 1,
                    g.vertices.len(),
                    ps.len()
                )));
            }
            for (v, &p) in g.vertices.iter().zip(ps) {
                match inp.get_mut(p) {
                    Some(slot @ None) => *slot = Some(Color::Elem(v.deco.clone())),
                    _ => return Err(Error::invalid(format!("position {} is repeated or out of range", p + 1))),
                }
            }
        }
        let inp = Profile::new(inp.into_iter().map(|c| c.expect("positions cover")).collect())?;
        let out = graphs
            .iter()
            .map(|g| evaluate(self.base.as_ref(), g).map(|e| elem_color(&e)))
            .collect::<Result<Vec<_>>>()?;
        let x = self.make(Profile::new(out)?, inp, SliceBody::normalize(graphs, positions));
        validate_slice_element(self, &x).into_result()?;
        Ok(x)
    }

    /// An element with declared profiles, rejected unless it validates.
    pub fn declare(&self, out: Profile, inp: Profile, graphs: Vec<DecoratedGraph>, positions: Vec<Vec<usize>>) -> Result<Element> {
        let x = self.make(out, inp, SliceBody::normalize(graphs, positions));
        validate_slice_element(self, &x).into_result()?;
        Ok(x)
    }

    /// `1_α`, the one-vertex graph.
    pub fn unit_of(&self, a: &Element) -> Element {
        let g = Graph::corolla(Arc::new(a.clone()), a.inp.len(), a.out.len());
        let c = Profile::single(elem_color(a));
        self.make(
            c.clone(),
            c,
            SliceBody {
                graphs: vec![g],
                positions: vec![vec![0]],
            },
        )
    }

    pub fn special(&self, s: &Special) -> Result<Element> {
        match s {
            Special::Tensor(a, b) => self.tensor(a, b),
            Special::Circ(a, b) => self.circ(a, b),
            Special::TwistedUnit(sigma, a, tau) => self.twisted_unit(sigma, a, tau),
        }
    }

    pub fn tensor(&self, a: &Element, b: &Element) -> Result<Element> {
        let ab = self.base.hcomp(a, b)?;
        let na = a.inp.len();
        let ma = a.out.len();
        let g = Graph {
            n_in: na + b.inp.len(),
            vertices: vec![
                Vertex {
                    deco: Arc::new(a.clone()),
                    ins: (0..na).map(Src::In).collect(),
                    outs: ma,
                },
                Vertex {
                    deco: Arc::new(b.clone()),
                    ins: (na..na + b.inp.len()).map(Src::In).collect(),
                    outs: b.out.len(),
                },
            ],
            outputs: (0..ma)
                .map(|j| Src::Port(0, j))
                .chain((0..b.out.len()).map(|j| Src::Port(1, j)))
                .collect(),
        };
        Ok(self.make(
            Profile::single(elem_color(&ab)),
            Profile::new(vec![elem_color(a), elem_color(b)])?,
            SliceBody {
                graphs: vec![g],
                positions: vec![vec![0, 1]],
            },
        ))
    }

    pub fn circ(&self, a: &Element, b: &Element) -> Result<Element> {
        self.chain(&[a.clone(), b.clone()])
    }

    /// `G_{α₁∘⋯∘α_k}`: a vertical chain listed from the top, with input
    /// positions in the same order.
    pub fn chain(&self, xs: &[Element]) -> Result<Element> {
        let (first, rest) = xs.split_first().ok_or_else(|| Error::invalid("empty chain"))?;
        let mut total = first.clone();
        for x in rest {
            total = self.base.vcomp(&total, x)?;
        }
        let k = xs.len();
        let g = Graph {
            n_in: xs[k - 1].inp.len(),
            vertices: xs
                .iter()
                .enumerate()
                .map(|(t, x)| Vertex {
                    deco: Arc::new(x.clone()),
                    ins: (0..x.inp.len())
                        .map(|i| if t + 1 < k { Src::Port(t + 1, i) } else { Src::In(i) })
                        .collect(),
                    outs: x.out.len(),
                })
                .collect(),
            outputs: (0..first.out.len()).map(|j| Src::Port(0, j)).collect(),
        };
        Ok(self.make(
            Profile::single(elem_color(&total)),
            Profile::new(xs.iter().map(elem_color).collect())?,
            SliceBody {
                graphs: vec![g],
                positions: vec![(0..k).collect()],
            },
        ))
    }

    /// `σ1_ατ`, the corolla with relabeled legs. It evaluates to `σατ`.
    pub fn twisted_unit(&self, sigma: &Perm, a: &Element, tau: &Perm) -> Result<Element> {
        let b = self.base.biact(sigma, a, tau)?;
        let g = twisted_graph(sigma, a, tau);
        Ok(self.make(
            Profile::single(elem_color(&b)),
            Profile::single(elem_color(a)),
            SliceBody {
                graphs: vec![g],
                positions: vec![vec![0]],
            },
        ))
    }

    /// A random graph evaluating to `beta`.
    fn random_graph(&self, rng: &mut Rng, beta: &Element, depth: usize) -> Result<DecoratedGraph> {
        let r: f64 = rng.gen();
        if depth > 0 && r < 0.45 {
            if let Some((a, b)) = self.base.factor(beta, rng) {
                let ga = self.random_graph(rng, &a, depth - 1)?;
                let gb = self.random_graph(rng, &b, depth - 1)?;
                let SliceBody { mut graphs, .. } = (*self.body(&self.circ(&a, &b)?)?).clone();
                let g = graphs.remove(0);
                return g.substitute(1, &gb)?.substitute(0, &ga);
            }
        }
        if depth > 0 && r < 0.65 {
            let sigma = Perm::random(beta.out.len(), rng);
            let tau = Perm::random(beta.inp.len(), rng);
            let a = self.base.biact(&sigma.inverse(), beta, &tau.inverse())?;
            if self.base.biact(&sigma, &a, &tau)? == *beta {
                let ga = self.random_graph(rng, &a, depth - 1)?;
                return twisted_graph(&sigma, &a, &tau).substitute(0, &ga);
            }
        }
        Ok(Graph::corolla(Arc::new(beta.clone()), beta.inp.len(), beta.out.len()))
    }

    fn sample_with(&self, rng: &mut Rng, out: &[Arc<Element>]) -> Result<Element> {
        let graphs = out
            .iter()
            .map(|b| self.random_graph(rng, b, self.depth))
            .collect::<Result<Vec<_>>>()?;
        let s: usize = graphs.iter().map(|g| g.vertices.len()).sum();
        let perm = Perm::random(s, rng);
        let mut c = 0;
        let positions = graphs
            .iter()
            .map(|g| {
                (0..g.vertices.len())
                    .map(|_| {
                        c += 1;
                        perm.apply(c - 1)
                    })
                    .collect()
            })
            .collect();
        self.element(graphs, positions)
    }
}

/// The corolla on `a` with output port `j` on leg `σ(j)` and input leg `k`
/// on port `τ(k)`.
pub fn twisted_graph(sigma: &Perm, a: &Element, tau: &Perm) -> DecoratedGraph {
    let ti = tau.inverse();
    let si = sigma.inverse();
    Graph {
        n_in: a.inp.len(),
        vertices: vec![Vertex {
            deco: Arc::new(a.clone()),
            ins: (0..a.inp.len()).map(|q| Src::In(ti.apply(q))).collect(),
            outs: a.out.len(),
        }],
        outputs: (0..a.out.len()).map(|i| Src::Port(0, si.apply(i))).collect(),
    }
}

/// Checks decoration order, color matching and the evaluation condition of
/// every graph.
pub fn validate_slice_element(p: &SliceProp, x: &Element) -> Report {
    let mut r = Report::default();
    let b = match p.body(x) {
        Ok(b) => b,
        Err(e) => {
            r.push("slice payload", e.to_string());
            return r;
        }
    };
    if b.graphs.len() != x.out.len() || b.positions.len() != x.out.len() {
        r.push(
            "one graph per output",
            format!("{} graphs for {} outputs", b.graphs.len(), x.out.len()),
        );
        return r;
    }
    let mut seen = vec![0usize; x.inp.len()];
    for (j, (g, ps)) in b.graphs.iter().zip(&b.positions).enumerate() {
        let at = |s: String| format!("graph {}: {s}", j + 1);
        if g.vertices.len() != ps.len() {
            r.push("one position per vertex", at(String::new()));
            continue;
        }
        if ps.windows(2).any(|w| w[0] >= w[1]) {
            r.push("vertices in input order", at(format!("{:?}", ps)));
        }
        for (t, &q) in ps.iter().enumerate() {
            match seen.get_mut(q) {
                Some(n) => *n += 1,
                None => {
                    r.push("position in range", at(format!("vertex {} at {}", t + 1, q + 1)));
                    continue;
                }
            }
            if Color::Elem(g.vertices[t].deco.clone()) != *x.inp.get(q) {
                r.push(
                    "decoration is the declared input",
                    at(format!("vertex {} against input {}", t + 1, q + 1)),
                );
            }
            if !p.base.contains(&g.vertices[t].deco) {
                r.push("decoration in the base", at(format!("vertex {}", t + 1)));
            }
        }
        let d = validate_decoration(g, None);
        if !d.ok() {
            for v in d.violations {
                r.push(&v.rule, at(v.at));
            }
            continue;
        }
        match evaluate(p.base.as_ref(), g) {
            Ok(e) if elem_color(&e) == *x.out.get(j) => {}
            Ok(e) => r.push("evaluation is the declared output", at(format!("evaluates to {e:?}"))),
            Err(e) => r.push("evaluation is the declared output", at(e.to_string())),
        }
    }
    for (q, n) in seen.iter().enumerate() {
        if *n != 1 {
            r.push("each input decorates one vertex", format!("input {} used {n} times", q + 1));
        }
    }
    r
}

impl PropImpl for SliceProp {
    fn id(&self) -> &Name {
        &self.id
    }

    fn has_color(&self, c: &Color) -> bool {
        c.as_elem().is_some_and(|e| self.base.contains(e))
    }

    fn sample_colors(&self) -> Vec<Color> {
        let mut rng = Rng::seed_from_u64(0);
        let mut cs: Vec<Color> = (0..16)
            .filter_map(|_| self.base.sample(&mut rng, None))
            .map(|e| elem_color(&e))
            .collect();
        cs.sort();
        cs.dedup();
        cs.truncate(8);
        cs
    }

    fn contains(&self, x: &Element) -> bool {
        validate_slice_element(self, x).ok()
    }

    fn hcomp(&self, x: &Element, y: &Element) -> Result<Element> {
        let (bx, by) = (self.body(x)?, self.body(y)?);
        let off = x.inp.len();
        let mut graphs = bx.graphs.clone();
        graphs.extend(by.graphs.iter().cloned());
        let mut positions = bx.positions.clone();
        positions.extend(by.positions.iter().map(|p| p.iter().map(|q| q + off).collect()));
        Ok(self.make(x.out.concat(&y.out), x.inp.concat(&y.inp), SliceBody { graphs, positions }))
    }

    fn vcomp(&self, x: &Element, y: &Element) -> Result<Element> {
        check_composable(self, x, y)?;
        let (bx, by) = (self.body(x)?, self.body(y)?);
        let mut graphs = Vec::with_capacity(bx.graphs.len());
        let mut positions = Vec::with_capacity(bx.graphs.len());
        for (g, ps) in bx.graphs.iter().zip(&bx.positions) {
            let mut g = g.clone();
            for v in (0..ps.len()).rev() {
                g = g.substitute(v, &by.graphs[ps[v]])?;
            }
            graphs.push(g);
            positions.push(ps.iter().flat_map(|&p| by.positions[p].iter().copied()).collect());
        }
        Ok(self.make(x.out.clone(), y.inp.clone(), SliceBody::normalize(graphs, positions)))
    }

    fn biact(&self, sigma: &Perm, x: &Element, tau: &Perm) -> Result<Element> {
        let b = self.body(x)?;
        let (out, inp) = crate::prop::acted_profiles(sigma, x, tau)?;
        let ti = tau.inverse();
        let graphs = sigma.act_left(&b.graphs)?;
        let positions = sigma
            .act_left(&b.positions)?
            .into_iter()
            .map(|ps| ps.into_iter().map(|q| ti.apply(q)).collect())
            .collect();
        Ok(self.make(out, inp, SliceBody::normalize(graphs, positions)))
    }

    fn unit_color(&self, c: &Color) -> Result<Element> {
        let a = color_elem(c)?;
        if !self.base.contains(a) {
            return Err(Error::UnknownColor(format!("{c:?}")));
        }
        Ok(self.unit_of(a))
    }

    fn sample(&self, rng: &mut Rng, out: Option<&Profile>) -> Option<Element> {
        let out: Vec<Arc<Element>> = match out {
            Some(p) => p.colors().iter().map(|c| color_elem(c).cloned()).collect::<Result<_>>().ok()?,
            None => {
                let k = rng.gen_range(1..=2);
                (0..k).map(|_| self.base.sample(rng, None).map(Arc::new)).collect::<Option<_>>()?
            }
        };
        self.sample_with(rng, &out).ok()
    }

    fn factor(&self, x: &Element, _rng: &mut Rng) -> Option<(Element, Element)> {
        Some((x.clone(), self.unit(&x.inp).ok()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prop::builtin::TerminalProp;

    #[test]
    fn units_are_corollas() {
        let t: PropRef = Arc::new(TerminalProp::t());
        let s = SliceProp::new(t.clone());
        let a = TerminalProp::t().arity(2, 1);
        let u = s.unit_color(&elem_color(&a)).unwrap();
        let b = s.body(&u).unwrap();
        assert_eq!(b.graphs[0].vertices.len(), 1);
        assert!(s.contains(&u));
    }

    #[test]
    fn twisted_identity_is_the_unit() {
        let s = SliceProp::new(Arc::new(TerminalProp::t()));
        let a = TerminalProp::t().arity(2, 3);
        let x = s.twisted_unit(&Perm::identity(2), &a, &Perm::identity(3)).unwrap();
        assert_eq!(x, s.unit_of(&a));
    }
}
