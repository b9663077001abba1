//! `ptset.json`: bound, default rule, and per shape its metagraph, cell
//! labels and face functions.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Cells, DefaultRule, PtSet};
use crate::error::{Error, Result};
use crate::propertope::{decode_metagraph, encode_metagraph, Metagraph, Tower};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PtSetFile {
    pub base: String,
    pub bound: usize,
    pub default: DefaultRule,
    pub shapes: Vec<ShapeEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeEntry {
    pub shape: Metagraph,
    #[serde(flatten)]
    pub cells: Cells,
}

pub fn ptset_to_json(x: &PtSet) -> Result<Value> {
    let shapes = x
        .cells
        .iter()
        .map(|(g, c)| {
            Ok(ShapeEntry {
                shape: encode_metagraph(g)?,
                cells: c.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let f = PtSetFile {
        base: x.base.id().to_string(),
        bound: x.bound,
        default: x.default,
        shapes,
    };
    Ok(serde_json::to_value(f)?)
}

pub fn ptset_from_json(v: &Value, tower: &Tower) -> Result<PtSet> {
    let f: PtSetFile = serde_json::from_value(v.clone()).map_err(|e| Error::parse("ptset", e.to_string()))?;
    if f.base != tower.base().id().as_ref() {
        return Err(Error::parse(
            "base",
            format!("expected `{}`, found `{}`", tower.base().id(), f.base),
        ));
    }
    let mut x = PtSet::new(tower.base().clone(), f.bound, f.default);
    for (i, e) in f.shapes.into_iter().enumerate() {
        let g = decode_metagraph(&e.shape, tower).map_err(|err| match err {
            Error::Parse { at, detail } => Error::parse(format!("shapes[{i}].shape.{at}"), detail),
            other => Error::parse(format!("shapes[{i}].shape"), other.to_string()),
        })?;
        if e.cells.faces.len() != g.n_faces() {
            return Err(Error::parse(
                format!("shapes[{i}].faces"),
                format!("expected {} face functions", g.n_faces()),
            ));
        }
        x.cells.insert(g, e.cells);
    }
    Ok(x)
}
