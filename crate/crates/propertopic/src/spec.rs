//! JSON descriptions of PROPs, algebras and PROP maps, tagged by `kind`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::color::Color;
use crate::error::{Error, Result};
use crate::graph::FreeProp;
use crate::prop::algebra::{AlgebraRef, SemilatticeBimonoid};
use crate::prop::builtin::{EndoProp, InitialProp, TerminalProp};
use crate::prop::fixtures::{Monoid, TensorAlgebraProp, WeightedProp};
use crate::prop::operad::{operad_to_prop, OperadSpec, TableOperad, TerminalOperad};
use crate::prop::table::{TableProp, TableSpec};
use crate::prop::{PropRef, Rng};
use crate::slice::{differentiate, PropMap, SliceProp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MonoidSpec {
    Cyclic { k: u32 },
    Max { k: u32 },
    And,
}

impl MonoidSpec {
    pub fn build(self) -> Result<Monoid> {
        match self {
            MonoidSpec::Cyclic { k } | MonoidSpec::Max { k } if k == 0 => Err(Error::parse("monoid.k", "k ≥ 1")),
            MonoidSpec::Cyclic { k } => Ok(Monoid::Cyclic(k)),
            MonoidSpec::Max { k } => Ok(Monoid::Max(k)),
            MonoidSpec::And => Ok(Monoid::And),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub name: String,
    pub out: Vec<String>,
    #[serde(rename = "in")]
    pub inp: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PropSpec {
    /// `T`, or `T_𝔠` when `colors` is given.
    Terminal {
        #[serde(default)]
        colors: Option<Vec<String>>,
    },
    Initial,
    /// `E_{Bool}` on the color `c`.
    BoolEndo,
    Endo {
        carrier: BTreeMap<String, Vec<String>>,
    },
    Free {
        id: String,
        colors: Vec<String>,
        generators: Vec<GeneratorSpec>,
    },
    Table {
        table: TableSpec,
    },
    TerminalOperad {
        colors: Vec<String>,
        max_arity: usize,
    },
    Operad {
        operad: OperadSpec,
    },
    Weighted {
        base: Box<PropSpec>,
        monoid: MonoidSpec,
    },
    Words {
        monoid: MonoidSpec,
    },
    Slice {
        base: Box<PropSpec>,
    },
}

impl PropSpec {
    pub fn build(&self) -> Result<PropRef> {
        Ok(match self {
            PropSpec::Terminal { colors: None } => Arc::new(TerminalProp::t()),
            PropSpec::Terminal { colors: Some(cs) } => {
                let cs: Vec<&str> = cs.iter().map(String::as_str).collect();
                Arc::new(TerminalProp::colored(&cs)?)
            }
            PropSpec::Initial => Arc::new(InitialProp::default()),
            PropSpec::BoolEndo => Arc::new(EndoProp::bool()),
            PropSpec::Endo { carrier } => Arc::new(EndoProp::new(carrier.iter().map(|(c, ls)| (Color::atom(c), ls.clone())).collect())?),
            PropSpec::Free { id, colors, generators } => {
                let cs: Vec<&str> = colors.iter().map(String::as_str).collect();
                let outs: Vec<Vec<&str>> = generators.iter().map(|g| g.out.iter().map(String::as_str).collect()).collect();
                let ins: Vec<Vec<&str>> = generators.iter().map(|g| g.inp.iter().map(String::as_str).collect()).collect();
                let gens: Vec<(&str, &[&str], &[&str])> = generators
                    .iter()
                    .zip(outs.iter().zip(&ins))
                    .map(|(g, (o, i))| (g.name.as_str(), o.as_slice(), i.as_slice()))
                    .collect();
                Arc::new(FreeProp::new(id, &cs, &gens)?)
            }
            PropSpec::Table { table } => Arc::new(TableProp::new(table)?),
            PropSpec::TerminalOperad { colors, max_arity } => {
                let cs: Vec<&str> = colors.iter().map(String::as_str).collect();
                Arc::new(operad_to_prop(Arc::new(TerminalOperad::new(&cs, *max_arity))))
            }
            PropSpec::Operad { operad } => Arc::new(operad_to_prop(Arc::new(TableOperad::new(operad)?))),
            PropSpec::Weighted { base, monoid } => Arc::new(WeightedProp::new(base.build()?, monoid.build()?)),
            PropSpec::Words { monoid } => Arc::new(TensorAlgebraProp::new(monoid.build()?)),
            PropSpec::Slice { base } => Arc::new(SliceProp::new(base.build()?)),
        })
    }

    /// Guesses the spec of a PROP from its identifier, for `T` and `I`.
    pub fn from_id(id: &str) -> Option<PropSpec> {
        match id {
            "T" => Some(PropSpec::Terminal { colors: None }),
            "I" => Some(PropSpec::Initial),
            _ => None,
        }
    }
}

/// A PROP map that is the identity on colors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MapSpec {
    Identity {
        prop: PropSpec,
    },
    /// `ι: I → T`.
    Iota,
    /// The projection `P × M → P`.
    Weighted {
        base: PropSpec,
        monoid: MonoidSpec,
    },
    /// The projection `Words[M] → I`.
    Words {
        monoid: MonoidSpec,
    },
    /// The unique map into the terminal PROP on the same colors.
    ToTerminal {
        source: PropSpec,
    },
}

impl MapSpec {
    pub fn build(&self) -> Result<PropMap> {
        Ok(match self {
            MapSpec::Identity { prop } => PropMap::identity(prop.build()?),
            MapSpec::Iota => {
                let t = TerminalProp::t();
                PropMap::new(Arc::new(InitialProp::default()), Arc::new(TerminalProp::t()), move |x| {
                    Ok(t.arity(x.out.len(), x.inp.len()))
                })
            }
            MapSpec::Weighted { base, monoid } => {
                let b = base.build()?;
                let w = Arc::new(WeightedProp::new(b.clone(), monoid.build()?));
                let w2 = w.clone();
                PropMap::new(w, b, move |x| w2.project(x))
            }
            MapSpec::Words { monoid } => {
                let w = Arc::new(TensorAlgebraProp::new(monoid.build()?));
                let w2 = w.clone();
                PropMap::new(w, Arc::new(InitialProp::default()), move |x| w2.project(x))
            }
            MapSpec::ToTerminal { source } => {
                let s = source.build()?;
                let mut cs: Vec<String> = s.sample_colors().iter().map(|c| format!("{c:?}")).collect();
                cs.sort();
                let t: Arc<TerminalProp> = if cs == ["*"] {
                    Arc::new(TerminalProp::t())
                } else {
                    let refs: Vec<&str> = cs.iter().map(String::as_str).collect();
                    Arc::new(TerminalProp::colored(&refs)?)
                };
                let t2 = t.clone();
                PropMap::new(s, t, move |x| Ok(t2.point(x.out.clone(), x.inp.clone())))
            }
        })
    }
}

/// An algebra over `P^{n+}` together with its base `P` and `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AlgebraSpec {
    /// Booleans under OR over `T`.
    BoolOr,
    /// The chain semilattice ordered by `rank`, over `T`.
    Chain { rank: Vec<usize> },
    /// A random chain semilattice over `T`, drawn from the seed.
    RandomSemilattice,
    /// `∂φ` over the target of `φ`, an algebra over its slice.
    Differential { map: MapSpec },
}

pub struct BuiltAlgebra {
    pub algebra: AlgebraRef,
    pub base: PropRef,
    pub n: usize,
}

impl AlgebraSpec {
    pub fn build(&self, seed: u64) -> Result<BuiltAlgebra> {
        let t = || -> PropRef { Arc::new(TerminalProp::t()) };
        Ok(match self {
            AlgebraSpec::BoolOr => BuiltAlgebra {
                algebra: Arc::new(SemilatticeBimonoid::bool_or()),
                base: t(),
                n: 0,
            },
            AlgebraSpec::Chain { rank } => {
                if rank.is_empty() {
                    return Err(Error::parse("rank", "a chain has at least one element"));
                }
                BuiltAlgebra {
                    algebra: Arc::new(SemilatticeBimonoid::chain(rank)),
                    base: t(),
                    n: 0,
                }
            }
            AlgebraSpec::RandomSemilattice => BuiltAlgebra {
                algebra: Arc::new(SemilatticeBimonoid::random(&mut Rng::seed_from_u64(seed))),
                base: t(),
                n: 0,
            },
            AlgebraSpec::Differential { map } => {
                let f = map.build()?;
                let d = differentiate(&f);
                BuiltAlgebra {
                    base: f.target.clone(),
                    algebra: Arc::new(d),
                    n: 1,
                }
            }
        })
    }
}

/// Parses a `kind`-tagged value, reporting the failure at `at`.
pub fn parse_spec<T: serde::de::DeserializeOwned>(v: &Value, at: &str) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::parse(at, e.to_string()))
}
