use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::laws::{check_prop_laws, elements_up_to, LawMode};
use super::{check_owner, PropImpl, Rng};
use crate::color::{Color, Element, Name, Payload, Profile};
use crate::error::{Error, Result};
use crate::perm::Perm;

/// File form of a finite-table PROP, truncated at `max_arity`.
///
/// Composites whose profiles would exceed `max_arity` are outside the
/// truncation and are reported as unsupported rather than as errors.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TableSpec {
    pub id: String,
    pub colors: Vec<String>,
    pub max_arity: usize,
    pub elements: Vec<TableElement>,
    pub units: BTreeMap<String, String>,
    pub hcomp: Vec<[String; 3]>,
    pub vcomp: Vec<[String; 3]>,
    #[serde(default)]
    pub biact: Vec<BiactEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TableElement {
    pub name: String,
    pub out: Vec<String>,
    #[serde(rename = "in")]
    pub inp: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BiactEntry {
    pub sigma: Vec<usize>,
    pub x: String,
    pub tau: Vec<usize>,
    pub result: String,
}

pub struct TableProp {
    id: Name,
    colors: Vec<Color>,
    max_arity: usize,
    elements: BTreeMap<Name, (Profile, Profile)>,
    units: BTreeMap<Color, Name>,
    hcomp: HashMap<(Name, Name), Name>,
    vcomp: HashMap<(Name, Name), Name>,
    biact: HashMap<(Perm, Name, Perm), Name>,
}

fn profile(at: &str, cs: &[String]) -> Result<Profile> {
    Profile::new(cs.iter().map(|c| Color::atom(c)).collect()).map_err(|_| Error::parse(at, "empty profile"))
}

impl TableProp {
    /// Loads a table and validates totality and every PROP law exhaustively.
    pub fn new(spec: &TableSpec) -> Result<Self> {
        let t = Self::new_unchecked(spec)?;
        t.check_total()?;
        let mode = LawMode::Exhaustive {
            max_arity: t.max_arity,
            hcomp_arity: t.max_arity,
        };
        let report = check_prop_laws(&t, &mode)?;
        if let Some(w) = report.first_witness() {
            return Err(Error::invalid(format!("law violation in table `{}`: {w}", t.id)));
        }
        Ok(t)
    }

    /// Loads a table, checking only that its entries are well typed.
    pub fn new_unchecked(spec: &TableSpec) -> Result<Self> {
        let mut colors: Vec<Color> = spec.colors.iter().map(|c| Color::atom(c)).collect();
        colors.sort();
        colors.dedup();
        if colors.is_empty() || colors.len() != spec.colors.len() {
            return Err(Error::parse("colors", "non-empty list of unique identifiers expected"));
        }
        let mut elements = BTreeMap::new();
        for (i, e) in spec.elements.iter().enumerate() {
            let at = format!("elements[{i}]");
            let out = profile(&at, &e.out)?;
            let inp = profile(&at, &e.inp)?;
            for c in out.colors().iter().chain(inp.colors()) {
                if !colors.contains(c) {
                    return Err(Error::parse(&at, format!("unknown color {c:?}")));
                }
            }
            if out.len() > spec.max_arity || inp.len() > spec.max_arity {
                return Err(Error::parse(&at, "profile longer than max_arity"));
            }
            if elements.insert(Arc::from(e.name.as_str()), (out, inp)).is_some() {
                return Err(Error::parse(&at, format!("duplicate element `{}`", e.name)));
            }
        }
        let mut t = TableProp {
            id: Arc::from(spec.id.as_str()),
            colors,
            max_arity: spec.max_arity,
            elements,
            units: BTreeMap::new(),
            hcomp: HashMap::new(),
            vcomp: HashMap::new(),
            biact: HashMap::new(),
        };
        let name = |at: &str, s: &str| -> Result<Name> {
            t.elements
                .get_key_value(s)
                .map(|(k, _)| k.clone())
                .ok_or_else(|| Error::parse(at, format!("unknown element `{s}`")))
        };
        let mut units = BTreeMap::new();
        for (c, u) in &spec.units {
            units.insert(Color::atom(c), name(&format!("units.{c}"), u)?);
        }
        let mut hcomp = HashMap::new();
        for (i, [x, y, z]) in spec.hcomp.iter().enumerate() {
            let at = format!("hcomp[{i}]");
            hcomp.insert((name(&at, x)?, name(&at, y)?), name(&at, z)?);
        }
        let mut vcomp = HashMap::new();
        for (i, [x, y, z]) in spec.vcomp.iter().enumerate() {
            let at = format!("vcomp[{i}]");
            vcomp.insert((name(&at, x)?, name(&at, y)?), name(&at, z)?);
        }
        let mut biact = HashMap::new();
        for (i, b) in spec.biact.iter().enumerate() {
            let at = format!("biact[{i}]");
            let s = Perm::from_one_based(&b.sigma).map_err(|e| Error::parse(&at, e.to_string()))?;
            let tau = Perm::from_one_based(&b.tau).map_err(|e| Error::parse(&at, e.to_string()))?;
            biact.insert((s, name(&at, &b.x)?, tau), name(&at, &b.result)?);
        }
        t.units = units;
        t.hcomp = hcomp;
        t.vcomp = vcomp;
        t.biact = biact;
        for (c, u) in &t.units {
            let (o, i) = &t.elements[u];
            if o.colors() != [c.clone()] || i.colors() != [c.clone()] {
                return Err(Error::parse(format!("units.{c:?}"), "unit has the wrong profile"));
            }
        }
        Ok(t)
    }

    fn check_total(&self) -> Result<()> {
        for c in &self.colors {
            if !self.units.contains_key(c) {
                return Err(Error::invalid(format!("no unit for color {c:?}")));
            }
        }
        let els: Vec<Element> = self.all();
        for x in &els {
            for y in &els {
                if x.inp == y.out {
                    self.vcomp(x, y)?;
                }
                if x.out.len() + y.out.len() <= self.max_arity && x.inp.len() + y.inp.len() <= self.max_arity {
                    self.hcomp(x, y)?;
                }
            }
            for s in Perm::all(x.out.len()) {
                for t in Perm::all(x.inp.len()) {
                    self.biact(&s, x, &t)?;
                }
            }
        }
        Ok(())
    }

    fn elem(&self, n: &Name) -> Element {
        let (o, i) = &self.elements[n];
        Element::new(&self.id, o.clone(), i.clone(), Payload::Sym(n.clone()))
    }

    pub fn all(&self) -> Vec<Element> {
        self.elements.keys().map(|n| self.elem(n)).collect()
    }

    pub fn get(&self, name: &str) -> Option<Element> {
        self.elements.get_key_value(name).map(|(k, _)| self.elem(k))
    }

    fn name_of<'a>(&self, x: &'a Element) -> Result<&'a Name> {
        check_owner(self, x)?;
        match &x.payload {
            Payload::Sym(n) if self.elements.contains_key(n) => Ok(n),
            _ => Err(Error::NotMember {
                prop: self.id.to_string(),
                detail: format!("{x:?}"),
            }),
        }
    }

    fn missing(&self, what: &str) -> Error {
        Error::invalid(format!("table `{}` has no entry for {what}", self.id))
    }
}

/// Tabulates every component of an enumerable PROP up to `max_arity`.
pub fn tabulate(p: &dyn PropImpl, id: &str, max_arity: usize) -> Result<TableSpec> {
    let els = elements_up_to(p, max_arity).ok_or_else(|| Error::Unsupported(format!("`{}` cannot enumerate its components", p.id())))?;
    let names: BTreeMap<&Element, String> = els.iter().enumerate().map(|(i, e)| (e, format!("e{i}"))).collect();
    let atom = |c: &Color| -> Result<String> {
        match c {
            Color::Atom(a) => Ok(a.to_string()),
            Color::Elem(_) => Err(Error::Unsupported("tabulating a PROP with element colors".into())),
        }
    };
    let atoms = |p: &Profile| -> Result<Vec<String>> { p.colors().iter().map(atom).collect() };
    let lookup = |e: &Element| -> Result<String> {
        names
            .get(e)
            .cloned()
            .ok_or_else(|| Error::invalid(format!("composite {e:?} escaped the enumeration")))
    };
    let mut spec = TableSpec {
        id: id.to_string(),
        colors: p.sample_colors().iter().map(atom).collect::<Result<_>>()?,
        max_arity,
        elements: els
            .iter()
            .map(|e| {
                Ok(TableElement {
                    name: names[e].clone(),
                    out: atoms(&e.out)?,
                    inp: atoms(&e.inp)?,
                })
            })
            .collect::<Result<_>>()?,
        units: BTreeMap::new(),
        hcomp: vec![],
        vcomp: vec![],
        biact: vec![],
    };
    for c in p.sample_colors() {
        spec.units.insert(atom(&c)?, lookup(&p.unit_color(&c)?)?);
    }
    for x in &els {
        for y in &els {
            if x.inp == y.out {
                spec.vcomp.push([names[x].clone(), names[y].clone(), lookup(&p.vcomp(x, y)?)?]);
            }
            if x.out.len() + y.out.len() <= max_arity && x.inp.len() + y.inp.len() <= max_arity {
                spec.hcomp.push([names[x].clone(), names[y].clone(), lookup(&p.hcomp(x, y)?)?]);
            }
        }
        for s in Perm::all(x.out.len()) {
            for t in Perm::all(x.inp.len()) {
                spec.biact.push(BiactEntry {
                    sigma: s.one_based(),
                    x: names[x].clone(),
                    tau: t.one_based(),
                    result: lookup(&p.biact(&s, x, &t)?)?,
                });
            }
        }
    }
    Ok(spec)
}

impl PropImpl for TableProp {
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
        self.name_of(x).map(|n| self.elem(n) == *x).unwrap_or(false)
    }

    fn hcomp(&self, x: &Element, y: &Element) -> Result<Element> {
        let (a, b) = (self.name_of(x)?, self.name_of(y)?);
        if x.out.len() + y.out.len() > self.max_arity || x.inp.len() + y.inp.len() > self.max_arity {
            return Err(Error::Unsupported(format!("hcomp beyond arity {}", self.max_arity)));
        }
        let z = self
            .hcomp
            .get(&(a.clone(), b.clone()))
            .ok_or_else(|| self.missing(&format!("hcomp({a}, {b})")))?;
        Ok(self.elem(z))
    }

    fn vcomp(&self, x: &Element, y: &Element) -> Result<Element> {
        super::check_composable(self, x, y)?;
        let (a, b) = (self.name_of(x)?, self.name_of(y)?);
        let z = self
            .vcomp
            .get(&(a.clone(), b.clone()))
            .ok_or_else(|| self.missing(&format!("vcomp({a}, {b})")))?;
        Ok(self.elem(z))
    }

    fn biact(&self, sigma: &Perm, x: &Element, tau: &Perm) -> Result<Element> {
        let a = self.name_of(x)?;
        super::acted_profiles(sigma, x, tau)?;
        match self.biact.get(&(sigma.clone(), a.clone(), tau.clone())) {
            Some(z) => Ok(self.elem(z)),
            None if sigma.is_identity() && tau.is_identity() => Ok(x.clone()),
            None => Err(self.missing(&format!("biact({sigma:?}, {a}, {tau:?})"))),
        }
    }

    fn unit_color(&self, c: &Color) -> Result<Element> {
        let u = self.units.get(c).ok_or_else(|| Error::UnknownColor(format!("{c:?}")))?;
        Ok(self.elem(u))
    }

    fn unit(&self, p: &Profile) -> Result<Element> {
        if p.len() > self.max_arity {
            return Err(Error::Unsupported(format!("unit beyond arity {}", self.max_arity)));
        }
        let mut acc = self.unit_color(p.get(0))?;
        for c in &p.colors()[1..] {
            acc = self.hcomp(&acc, &self.unit_color(c)?)?;
        }
        Ok(acc)
    }

    fn enumerate(&self, out: &Profile, inp: &Profile) -> Option<Vec<Element>> {
        Some(
            self.elements
                .iter()
                .filter(|(_, (o, i))| o == out && i == inp)
                .map(|(n, _)| self.elem(n))
                .collect(),
        )
    }

    fn sample(&self, rng: &mut Rng, out: Option<&Profile>) -> Option<Element> {
        let cands: Vec<&Name> = self
            .elements
            .iter()
            .filter(|(_, (o, _))| out.is_none_or(|p| p == o))
            .map(|(n, _)| n)
            .collect();
        if cands.is_empty() {
            return None;
        }
        Some(self.elem(cands[rng.gen_range(0..cands.len())]))
    }
}

#[cfg(test)]
mod tests {
    use super::super::builtin::TerminalProp;
    use super::*;

    #[test]
    fn tabulated_terminal_is_accepted() {
        let spec = tabulate(&TerminalProp::t(), "Ttab", 2).unwrap();
        assert_eq!(spec.elements.len(), 4);
        let t = TableProp::new(&spec).unwrap();
        assert_eq!(t.all().len(), 4);
    }
}
