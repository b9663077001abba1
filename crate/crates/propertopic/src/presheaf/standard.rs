//! The standard sets `Δγ`, `∂Δγ` and `Λγ` built from classes of face
//! chains, and brute-force counting of maps between finite sets.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{Cells, DefaultRule, PtSet};
use crate::error::Result;
use crate::prop::PropRef;
use crate::propertope::{chain_class, Chain, Dir, Face, Propertope};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StandardKind {
    Delta,
    Boundary,
    Horn,
}

pub struct StandardSet {
    pub set: PtSet,
    /// False when some chain class hit the depth cap.
    pub exact: bool,
}

fn label(steps: &[Face]) -> String {
    if steps.is_empty() {
        return "id".into();
    }
    steps.iter().map(|f| format!("{f:?}")).collect::<Vec<_>>().join(".")
}

/// Cells over `δ` are classes of chains `γ → δ`, restricted per `kind`.
pub fn standard_set(base: PropRef, g: &Propertope, kind: StandardKind, depth_cap: usize) -> Result<StandardSet> {
    let mut all: Vec<Vec<Face>> = vec![vec![]];
    let mut frontier = vec![(g.clone(), vec![])];
    while let Some((p, steps)) = frontier.pop() {
        for fm in p.faces() {
            let mut s: Vec<Face> = steps.clone();
            s.push(fm.face);
            all.push(s.clone());
            frontier.push((fm.target, s));
        }
    }
    all.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));

    let mut class_of: HashMap<Vec<Face>, usize> = HashMap::new();
    let mut classes: Vec<(Vec<Face>, Propertope, bool)> = vec![];
    let mut exact = true;
    for steps in &all {
        if class_of.contains_key(steps) {
            continue;
        }
        let c = Chain::new(g.clone(), steps.clone())?;
        let cls = chain_class(base.as_ref(), &c, depth_cap)?;
        exact &= cls.complete;
        let id = classes.len();
        let from_input = cls.members.iter().any(|m| m.first().is_some_and(|f| f.dir == Dir::In));
        for m in cls.members {
            class_of.insert(m, id);
        }
        classes.push((steps.clone(), c.target()?, from_input));
    }
    let keep = |(steps, _, from_input): &(Vec<Face>, Propertope, bool)| match kind {
        StandardKind::Delta => true,
        StandardKind::Boundary => !steps.is_empty(),
        StandardKind::Horn => *from_input,
    };

    let mut members: BTreeMap<Propertope, Vec<usize>> = BTreeMap::new();
    for (id, c) in classes.iter().enumerate() {
        let e = members.entry(c.1.clone()).or_default();
        if keep(c) {
            e.push(id);
        }
    }
    let position: HashMap<usize, u32> = members
        .values()
        .flat_map(|ids| ids.iter().enumerate().map(|(k, &id)| (id, k as u32)))
        .collect();
    let mut set = PtSet::new(base, g.dim, DefaultRule::Empty);
    for (d, ids) in &members {
        let faces = d.faces();
        let mut fs = vec![Vec::with_capacity(ids.len()); faces.len()];
        for &id in ids {
            for (s, fm) in faces.iter().enumerate() {
                let mut steps = classes[id].0.clone();
                steps.push(fm.face);
                fs[s].push(position[&class_of[&steps]]);
            }
        }
        set.cells.insert(
            d.clone(),
            Cells {
                labels: ids.iter().map(|&id| label(&classes[id].0)).collect(),
                faces: fs,
            },
        );
    }
    Ok(StandardSet { set, exact })
}

/// The number of maps `s → x`, by backtracking from low dimensions up.
pub fn count_natural_maps(s: &PtSet, x: &PtSet) -> Result<usize> {
    let mut cells: Vec<(Propertope, u32)> = vec![];
    let mut shapes: Vec<&Propertope> = s.shapes().collect();
    shapes.sort_by_key(|g| g.dim);
    for g in shapes {
        for c in 0..s.count(g) as u32 {
            cells.push((g.clone(), c));
        }
    }
    let mut groups: HashMap<Propertope, HashMap<Vec<u32>, Vec<u32>>> = HashMap::new();
    for (g, _) in &cells {
        if !groups.contains_key(g) {
            groups.insert(g.clone(), x.by_faces(g)?);
        }
    }
    let mut assigned: HashMap<(Propertope, u32), u32> = HashMap::new();
    fn go(
        k: usize,
        cells: &[(Propertope, u32)],
        s: &PtSet,
        groups: &HashMap<Propertope, HashMap<Vec<u32>, Vec<u32>>>,
        assigned: &mut HashMap<(Propertope, u32), u32>,
    ) -> Result<usize> {
        let Some((g, c)) = cells.get(k) else {
            return Ok(1);
        };
        let mut want = vec![];
        for fm in g.faces() {
            let t = s.face_cell(g, *c, fm.face)?;
            want.push(assigned[&(fm.target.clone(), t)]);
        }
        let cands = groups[g].get(&want).cloned().unwrap_or_default();
        let mut total = 0;
        for v in cands {
            assigned.insert((g.clone(), *c), v);
            total += go(k + 1, cells, s, groups, assigned)?;
        }
        assigned.remove(&(g.clone(), *c));
        Ok(total)
    }
    go(0, &cells, s, &groups, &mut assigned)
}
