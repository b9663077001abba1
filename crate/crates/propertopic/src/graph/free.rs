use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::eval::levels_asap;
use super::{Graph, Src, Vertex};
use crate::color::{Color, Element, Name, Payload, Profile};
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::prop::{acted_profiles, check_composable, check_owner, random_profile, PropImpl, Rng};

/// The free colored PROP on finitely many generators. Elements are
/// generator-decorated graphs up to vertex renumbering, with identity wires
/// allowed so that units exist.
pub struct FreeProp {
    id: Name,
    gen_owner: Name,
    gens: Vec<Element>,
    colors: Vec<Color>,
}

pub type FreeGraph = Graph<Arc<Element>>;

impl FreeProp {
    /// `gens` lists `(name, out colors, in colors)`.
    pub fn new(id: &str, colors: &[&str], gens: &[(&str, &[&str], &[&str])]) -> Result<Self> {
        let gen_owner: Name = Arc::from(format!("{id}.gen").as_str());
        let mut cs: Vec<Color> = colors.iter().map(|c| Color::atom(c)).collect();
        cs.sort();
        cs.dedup();
        if cs.is_empty() {
            return Err(Error::invalid("color sets are non-empty"));
        }
        let prof = |v: &[&str]| -> Result<Profile> {
            let p = Profile::new(v.iter().map(|c| Color::atom(c)).collect())?;
            if p.colors().iter().any(|c| !cs.contains(c)) {
                return Err(Error::UnknownColor(format!("{p:?}")));
            }
            Ok(p)
        };
        let mut gs = Vec::new();
        for (name, out, inp) in gens {
            gs.push(Element::new(&gen_owner, prof(out)?, prof(inp)?, Payload::Sym(Arc::from(*name))));
        }
        gs.sort();
        Ok(FreeProp {
            id: Arc::from(id),
            gen_owner,
            gens: gs,
            colors: cs,
        })
    }

    pub fn generators(&self) -> &[Element] {
        &self.gens
    }

    pub fn gen(&self, name: &str) -> Result<Element> {
        let g = self
            .gens
            .iter()
            .find(|g| matches!(&g.payload, Payload::Sym(s) if &**s == name))
            .ok_or_else(|| Error::invalid(format!("no generator `{name}`")))?;
        self.from_graph(
            &Graph::corolla(Arc::new(g.clone()), g.inp.len(), g.out.len()),
            g.out.clone(),
            g.inp.clone(),
        )
    }

    pub fn graph<'a>(&self, x: &'a Element) -> Result<&'a FreeGraph> {
        check_owner(self, x)?;
        match &x.payload {
            Payload::Graph(g) => Ok(g),
            _ => Err(Error::NotMember {
                prop: self.id.to_string(),
                detail: format!("{x:?}"),
            }),
        }
    }

    /// Validates and canonicalizes a generator-decorated graph.
    pub fn from_graph(&self, g: &FreeGraph, out: Profile, inp: Profile) -> Result<Element> {
        g.check_structure(true).into_result()?;
        if g.n_in != inp.len() || g.outputs.len() != out.len() {
            return Err(Error::Arity {
                expected: inp.len() + out.len(),
                found: g.n_in + g.outputs.len(),
            });
        }
        let color_of = |s: Src| -> Color {
            match s {
                Src::In(i) => inp.get(i).clone(),
                Src::Port(u, j) => g.vertices[u].deco.out.get(j).clone(),
            }
        };
        for (v, vx) in g.vertices.iter().enumerate() {
            if vx.deco.owner != self.gen_owner || !self.gens.contains(&vx.deco) {
                return Err(Error::NotMember {
                    prop: self.id.to_string(),
                    detail: format!("vertex {} is not a generator", v + 1),
                });
            }
            if vx.deco.inp.len() != vx.ins.len() || vx.deco.out.len() != vx.outs {
                return Err(Error::invalid(format!("vertex {} ports differ from its generator", v + 1)));
            }
            for (k, &s) in vx.ins.iter().enumerate() {
                if color_of(s) != *vx.deco.inp.get(k) {
                    return Err(Error::invalid(format!(
                        "color-matching fails at vertex {} in-port {}",
                        v + 1,
                        k + 1
                    )));
                }
            }
        }
        for (j, &s) in g.outputs.iter().enumerate() {
            if color_of(s) != *out.get(j) {
                return Err(Error::invalid(format!("color-matching fails at output {}", j + 1)));
            }
        }
        Ok(Element::new(&self.id, out, inp, Payload::Graph(Arc::new(g.canonical_relabel()))))
    }

    /// Splits `x` at a level cut into `upper ∘ lower`.
    fn cut(&self, x: &Element, t: usize) -> Result<(Element, Element)> {
        let g = self.graph(x)?;
        let lv = levels_asap(g)?;
        let upper = |v: usize| lv[v] >= t;
        let mut mid: Vec<Src> = Vec::new();
        let note = |s: Src, mid: &mut Vec<Src>| {
            let lower_side = match s {
                Src::In(_) => true,
                Src::Port(u, _) => !upper(u),
            };
            if lower_side && !mid.contains(&s) {
                mid.push(s);
            }
        };
        for (v, vx) in g.vertices.iter().enumerate() {
            if upper(v) {
                for &s in &vx.ins {
                    note(s, &mut mid);
                }
            }
        }
        for &s in &g.outputs {
            note(s, &mut mid);
        }
        let lower_ids: Vec<usize> = (0..g.vertices.len()).filter(|&v| !upper(v)).collect();
        let upper_ids: Vec<usize> = (0..g.vertices.len()).filter(|&v| upper(v)).collect();
        let lo_index = |u: usize| lower_ids.iter().position(|&w| w == u).expect("lower vertex");
        let up_index = |u: usize| upper_ids.iter().position(|&w| w == u).expect("upper vertex");
        let lower = Graph {
            n_in: g.n_in,
            vertices: lower_ids
                .iter()
                .map(|&v| Vertex {
                    deco: g.vertices[v].deco.clone(),
                    ins: g.vertices[v]
                        .ins
                        .iter()
                        .map(|&s| match s {
                            Src::In(i) => Src::In(i),
                            Src::Port(u, j) => Src::Port(lo_index(u), j),
                        })
                        .collect(),
                    outs: g.vertices[v].outs,
                })
                .collect(),
            outputs: mid
                .iter()
                .map(|&s| match s {
                    Src::In(i) => Src::In(i),
                    Src::Port(u, j) => Src::Port(lo_index(u), j),
                })
                .collect(),
        };
        let up_src = |s: Src| match s {
            Src::Port(u, j) if upper(u) => Src::Port(up_index(u), j),
            other => Src::In(mid.iter().position(|&m| m == other).expect("crossing wire")),
        };
        let upper_g = Graph {
            n_in: mid.len(),
            vertices: upper_ids
                .iter()
                .map(|&v| Vertex {
                    deco: g.vertices[v].deco.clone(),
                    ins: g.vertices[v].ins.iter().map(|&s| up_src(s)).collect(),
                    outs: g.vertices[v].outs,
                })
                .collect(),
            outputs: g.outputs.iter().map(|&s| up_src(s)).collect(),
        };
        let mid_colors = Profile::new(
            mid.iter()
                .map(|&s| match s {
                    Src::In(i) => x.inp.get(i).clone(),
                    Src::Port(u, j) => g.vertices[u].deco.out.get(j).clone(),
                })
                .collect(),
        )?;
        Ok((
            self.from_graph(&upper_g, x.out.clone(), mid_colors.clone())?,
            self.from_graph(&lower, mid_colors, x.inp.clone())?,
        ))
    }
}

impl PropImpl for FreeProp {
    fn id(&self) -> &Name {
        &self.id
    }

    fn has_color(&self, c: &Color) -> bool {
        self.colors.contains(c)
    }

    fn sample_colors(&self) -> Vec<Color> {
        self.colors.clone()
    }

    fn contains(&self, x: &Element) -> bool {
        self.graph(x)
            .and_then(|g| self.from_graph(g, x.out.clone(), x.inp.clone()))
            .is_ok_and(|y| y == *x)
    }

    fn hcomp(&self, x: &Element, y: &Element) -> Result<Element> {
        let (a, b) = (self.graph(x)?, self.graph(y)?);
        let k = a.vertices.len();
        let shift = |s: Src| match s {
            Src::In(i) => Src::In(i + a.n_in),
            Src::Port(u, j) => Src::Port(u + k, j),
        };
        let mut vertices = a.vertices.clone();
        vertices.extend(b.vertices.iter().map(|v| Vertex {
            deco: v.deco.clone(),
            ins: v.ins.iter().map(|&s| shift(s)).collect(),
            outs: v.outs,
        }));
        let mut outputs = a.outputs.clone();
        outputs.extend(b.outputs.iter().map(|&s| shift(s)));
        let g = Graph {
            n_in: a.n_in + b.n_in,
            vertices,
            outputs,
        };
        self.from_graph(&g, x.out.concat(&y.out), x.inp.concat(&y.inp))
    }

    fn vcomp(&self, x: &Element, y: &Element) -> Result<Element> {
        check_composable(self, x, y)?;
        let (a, b) = (self.graph(x)?, self.graph(y)?);
        let k = b.vertices.len();
        let lift = |s: Src| match s {
            Src::In(i) => b.outputs[i],
            Src::Port(u, j) => Src::Port(u + k, j),
        };
        let mut vertices = b.vertices.clone();
        vertices.extend(a.vertices.iter().map(|v| Vertex {
            deco: v.deco.clone(),
            ins: v.ins.iter().map(|&s| lift(s)).collect(),
            outs: v.outs,
        }));
        let g = Graph {
            n_in: b.n_in,
            vertices,
            outputs: a.outputs.iter().map(|&s| lift(s)).collect(),
        };
        self.from_graph(&g, x.out.clone(), y.inp.clone())
    }

    fn biact(&self, sigma: &Perm, x: &Element, tau: &Perm) -> Result<Element> {
        let (out, inp) = acted_profiles(sigma, x, tau)?;
        let a = self.graph(x)?;
        let tinv = tau.inverse();
        let rn = |s: Src| match s {
            Src::In(q) => Src::In(tinv.apply(q)),
            p => p,
        };
        let g = Graph {
            n_in: a.n_in,
            vertices: a
                .vertices
                .iter()
                .map(|v| Vertex {
                    deco: v.deco.clone(),
                    ins: v.ins.iter().map(|&s| rn(s)).collect(),
                    outs: v.outs,
                })
                .collect(),
            outputs: sigma.act_left(&a.outputs.iter().map(|&s| rn(s)).collect::<Vec<_>>())?,
        };
        self.from_graph(&g, out, inp)
    }

    fn unit_color(&self, c: &Color) -> Result<Element> {
        if !self.has_color(c) {
            return Err(Error::UnknownColor(format!("{c:?}")));
        }
        let g = Graph {
            n_in: 1,
            vertices: vec![],
            outputs: vec![Src::In(0)],
        };
        self.from_graph(&g, Profile::single(c.clone()), Profile::single(c.clone()))
    }

    fn enumerate(&self, out: &Profile, inp: &Profile) -> Option<Vec<Element>> {
        if !self.gens.is_empty() {
            return None;
        }
        if out.len() != inp.len() {
            return Some(vec![]);
        }
        let mut res = Vec::new();
        for p in Perm::all(out.len()) {
            let g = Graph {
                n_in: inp.len(),
                vertices: vec![],
                outputs: p.images().iter().map(|&i| Src::In(i)).collect(),
            };
            if let Ok(e) = self.from_graph(&g, out.clone(), inp.clone()) {
                res.push(e);
            }
        }
        res.sort();
        Some(res)
    }

    fn sample(&self, rng: &mut Rng, out: Option<&Profile>) -> Option<Element> {
        let out = out.cloned().unwrap_or_else(|| random_profile(rng, &self.colors, 3));
        // grow top-down: open demands are wire ends still lacking a source
        #[derive(Clone, Copy)]
        enum End {
            Out(usize),
            Port(usize, usize),
        }
        let mut open: Vec<(End, Color)> = out.colors().iter().cloned().enumerate().map(|(j, c)| (End::Out(j), c)).collect();
        let mut verts: Vec<(Element, Vec<Option<Src>>)> = Vec::new();
        let mut outputs: Vec<Option<Src>> = vec![None; out.len()];
        let budget = rng.gen_range(0..=4);
        for _ in 0..budget * 3 {
            if verts.len() >= budget || self.gens.is_empty() {
                break;
            }
            let g = self.gens.choose(rng)?.clone();
            let mut chosen: Vec<usize> = Vec::new();
            for c in g.out.colors() {
                let cands: Vec<usize> = (0..open.len()).filter(|i| !chosen.contains(i) && open[*i].1 == *c).collect();
                match cands.choose(rng) {
                    Some(&i) => chosen.push(i),
                    None => break,
                }
            }
            if chosen.len() != g.out.len() {
                continue;
            }
            let v = verts.len();
            for (j, &i) in chosen.iter().enumerate() {
                match open[i].0 {
                    End::Out(o) => outputs[o] = Some(Src::Port(v, j)),
                    End::Port(w, k) => verts[w].1[k] = Some(Src::Port(v, j)),
                }
            }
            chosen.sort_unstable_by(|a, b| b.cmp(a));
            for i in chosen {
                open.remove(i);
            }
            for (k, c) in g.inp.colors().iter().enumerate() {
                open.push((End::Port(v, k), c.clone()));
            }
            let n = g.inp.len();
            verts.push((g, vec![None; n]));
        }
        open.shuffle(rng);
        let mut inp = Vec::new();
        for (i, (end, c)) in open.iter().enumerate() {
            inp.push(c.clone());
            match *end {
                End::Out(o) => outputs[o] = Some(Src::In(i)),
                End::Port(w, k) => verts[w].1[k] = Some(Src::In(i)),
            }
        }
        // vertices were created top-down; number them bottom-up
        let n = verts.len();
        let flip = |s: Src| match s {
            Src::Port(u, j) => Src::Port(n - 1 - u, j),
            s => s,
        };
        let vertices = verts
            .into_iter()
            .rev()
            .map(|(g, ins)| Vertex {
                outs: g.out.len(),
                ins: ins.into_iter().map(|s| flip(s.expect("every demand met"))).collect(),
                deco: Arc::new(g),
            })
            .collect();
        let g = Graph {
            n_in: inp.len(),
            vertices,
            outputs: outputs.into_iter().map(|s| flip(s.expect("every output met"))).collect(),
        };
        self.from_graph(&g, out, Profile::new(inp).ok()?).ok()
    }

    fn factor(&self, x: &Element, rng: &mut Rng) -> Option<(Element, Element)> {
        let g = self.graph(x).ok()?;
        if g.vertices.is_empty() {
            return Some((x.clone(), self.unit(&x.inp).ok()?));
        }
        let h = levels_asap(g).ok()?.into_iter().max().unwrap_or(0) + 1;
        self.cut(x, rng.gen_range(0..=h)).ok()
    }
}
