use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{DecoratedGraph, Graph, Src, Vertex};
use crate::color::{Color, Element};
use crate::perm::Perm;
use crate::prop::{PropImpl, Rng};

/// A random valid `P`-decorated graph with `vertices` vertices, built bottom
/// up. Each in-port either takes a free wire of its color or opens a new
/// input leg.
pub fn random_decorated_graph(p: &dyn PropImpl, rng: &mut Rng, vertices: usize) -> Option<DecoratedGraph> {
    let mut open: Vec<(Src, Color)> = Vec::new();
    let mut n_in = 0;
    let mut vs: Vec<Vertex<Arc<Element>>> = Vec::new();
    for v in 0..vertices.max(1) {
        let x = (0..20).find_map(|_| p.sample(rng, None))?;
        let mut ins = Vec::new();
        for c in x.inp.colors() {
            let cands: Vec<usize> = (0..open.len()).filter(|&i| open[i].1 == *c).collect();
            match cands.choose(rng) {
                Some(&i) if rng.gen_bool(0.7) => ins.push(open.remove(i).0),
                _ => {
                    ins.push(Src::In(n_in));
                    n_in += 1;
                }
            }
        }
        for j in 0..x.out.len() {
            open.push((Src::Port(v, j), x.out.get(j).clone()));
        }
        vs.push(Vertex {
            outs: x.out.len(),
            ins,
            deco: Arc::new(x),
        });
    }
    open.shuffle(rng);
    let relabel = Perm::random(n_in, rng);
    let rn = |s: Src| match s {
        Src::In(i) => Src::In(relabel.apply(i)),
        s => s,
    };
    Some(Graph {
        n_in,
        vertices: vs
            .into_iter()
            .map(|v| Vertex {
                ins: v.ins.into_iter().map(rn).collect(),
                ..v
            })
            .collect(),
        outputs: open.into_iter().map(|(s, _)| rn(s)).collect(),
    })
}
