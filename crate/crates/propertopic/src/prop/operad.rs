//! Colored operads, the free PROP `O_prop` on an operad, and the forgetful
//! operad `U(P)` of a PROP.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::laws::{profiles_up_to, LawReport, Tally};
use super::{acted_profiles, check_composable, check_owner, hcomp_all, PropImpl, PropRef, Rng};
use crate::color::{Color, Element, Name, Payload, Profile};
use crate::error::{Error, Result};
use crate::perm::Perm;

/// A colored operad. Elements are [`Element`]s with a one-color out-profile.
pub trait Operad: Send + Sync {
    fn id(&self) -> &Name;

    fn colors(&self) -> Vec<Color>;

    /// Largest arity with elements, if the operad is truncated.
    fn max_arity(&self) -> Option<usize> {
        None
    }

    fn contains(&self, o: &Element) -> bool;

    /// `ρ(o; o₁, .., oₙ)`.
    fn compose(&self, o: &Element, args: &[Element]) -> Result<Element>;

    /// Right action `o·τ`, with in-profile `c̲τ`.
    fn act(&self, o: &Element, tau: &Perm) -> Result<Element>;

    fn unit(&self, c: &Color) -> Result<Element>;

    fn enumerate(&self, out: &Color, inp: &Profile) -> Option<Vec<Element>>;

    fn sample(&self, rng: &mut Rng, out: &Color) -> Option<Element>;
}

pub type OperadRef = Arc<dyn Operad>;

fn check_args(o: &Element, args: &[Element]) -> Result<()> {
    if args.len() != o.inp.len() {
        return Err(Error::Arity {
            expected: o.inp.len(),
            found: args.len(),
        });
    }
    for (i, a) in args.iter().enumerate() {
        if a.out.len() != 1 || a.out.get(0) != o.inp.get(i) {
            return Err(Error::Composition(format!(
                "argument {i} has output {:?}, expected {:?}",
                a.out,
                o.inp.get(i)
            )));
        }
    }
    Ok(())
}

fn concat_inputs(args: &[Element]) -> Profile {
    let mut v = Vec::new();
    for a in args {
        v.extend(a.inp.colors().iter().cloned());
    }
    Profile::new(v).expect("arguments have non-empty inputs")
}

/// The terminal operad on a color set: one operation in every component.
pub struct TerminalOperad {
    id: Name,
    colors: Vec<Color>,
    max_arity: usize,
}

impl TerminalOperad {
    pub fn new(colors: &[&str], max_arity: usize) -> Self {
        let mut cs: Vec<Color> = colors.iter().map(|c| Color::atom(c)).collect();
        cs.sort();
        cs.dedup();
        TerminalOperad {
            id: Arc::from(format!("Tops{}", max_arity).as_str()),
            colors: cs,
            max_arity,
        }
    }

    pub fn point(&self, out: Color, inp: Profile) -> Element {
        Element::new(&self.id, Profile::single(out), inp, Payload::Point)
    }
}

impl Operad for TerminalOperad {
    fn id(&self) -> &Name {
        &self.id
    }

    fn colors(&self) -> Vec<Color> {
        self.colors.clone()
    }

    fn max_arity(&self) -> Option<usize> {
        Some(self.max_arity)
    }

    fn contains(&self, o: &Element) -> bool {
        o.owner == self.id
            && o.out.len() == 1
            && o.inp.len() <= self.max_arity
            && o.payload == Payload::Point
            && o.out.colors().iter().chain(o.inp.colors()).all(|c| self.colors.contains(c))
    }

    fn compose(&self, o: &Element, args: &[Element]) -> Result<Element> {
        check_args(o, args)?;
        let inp = concat_inputs(args);
        if inp.len() > self.max_arity {
            return Err(Error::Unsupported(format!("composite beyond arity {}", self.max_arity)));
        }
        Ok(self.point(o.out.get(0).clone(), inp))
    }

    fn act(&self, o: &Element, tau: &Perm) -> Result<Element> {
        Ok(self.point(o.out.get(0).clone(), Profile::new(tau.act_right(o.inp.colors())?)?))
    }

    fn unit(&self, c: &Color) -> Result<Element> {
        Ok(self.point(c.clone(), Profile::single(c.clone())))
    }

    fn enumerate(&self, out: &Color, inp: &Profile) -> Option<Vec<Element>> {
        let ok = inp.len() <= self.max_arity && self.colors.contains(out) && inp.colors().iter().all(|c| self.colors.contains(c));
        Some(if ok { vec![self.point(out.clone(), inp.clone())] } else { vec![] })
    }

    fn sample(&self, rng: &mut Rng, out: &Color) -> Option<Element> {
        let k = rng.gen_range(1..=self.max_arity);
        let inp = (0..k).map(|_| self.colors.choose(rng).expect("non-empty").clone()).collect();
        Some(self.point(out.clone(), Profile::new(inp).ok()?))
    }
}

/// The operad whose only operations are the units.
pub struct UnitOperad {
    id: Name,
    colors: Vec<Color>,
}

impl Default for UnitOperad {
    fn default() -> Self {
        UnitOperad {
            id: Arc::from("Units"),
            colors: vec![Color::atom("*")],
        }
    }
}

impl Operad for UnitOperad {
    fn id(&self) -> &Name {
        &self.id
    }

    fn colors(&self) -> Vec<Color> {
        self.colors.clone()
    }

    fn max_arity(&self) -> Option<usize> {
        Some(1)
    }

    fn contains(&self, o: &Element) -> bool {
        o.owner == self.id && o.out == o.inp && o.out.len() == 1 && self.colors.contains(o.out.get(0))
    }

    fn compose(&self, o: &Element, args: &[Element]) -> Result<Element> {
        check_args(o, args)?;
        Ok(o.clone())
    }

    fn act(&self, o: &Element, tau: &Perm) -> Result<Element> {
        tau.act_right(o.inp.colors())?;
        Ok(o.clone())
    }

    fn unit(&self, c: &Color) -> Result<Element> {
        if !self.colors.contains(c) {
            return Err(Error::UnknownColor(format!("{c:?}")));
        }
        Ok(Element::new(
            &self.id,
            Profile::single(c.clone()),
            Profile::single(c.clone()),
            Payload::Point,
        ))
    }

    fn enumerate(&self, out: &Color, inp: &Profile) -> Option<Vec<Element>> {
        Some(if inp.colors() == [out.clone()] && self.colors.contains(out) {
            vec![self.unit(out).ok()?]
        } else {
            vec![]
        })
    }

    fn sample(&self, _rng: &mut Rng, out: &Color) -> Option<Element> {
        self.unit(out).ok()
    }
}

/// File form of a finite operad truncated at `max_arity`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct OperadSpec {
    pub id: String,
    pub colors: Vec<String>,
    pub max_arity: usize,
    pub elements: Vec<OperadElement>,
    pub units: BTreeMap<String, String>,
    pub compose: Vec<ComposeEntry>,
    #[serde(default)]
    pub act: Vec<ActEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct OperadElement {
    pub name: String,
    pub out: String,
    #[serde(rename = "in")]
    pub inp: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ComposeEntry {
    pub op: String,
    pub args: Vec<String>,
    pub result: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ActEntry {
    pub x: String,
    pub tau: Vec<usize>,
    pub result: String,
}

/// A finite operad given by explicit tables, law-checked at construction.
pub struct TableOperad {
    id: Name,
    colors: Vec<Color>,
    max_arity: usize,
    elements: BTreeMap<Name, (Color, Profile)>,
    units: BTreeMap<Color, Name>,
    compose: HashMap<(Name, Vec<Name>), Name>,
    act: HashMap<(Name, Perm), Name>,
}

impl TableOperad {
    pub fn new(spec: &OperadSpec) -> Result<Self> {
        let t = Self::new_unchecked(spec)?;
        let report = check_operad_laws(&t)?;
        if let Some(w) = report.first_witness() {
            return Err(Error::invalid(format!("law violation in operad `{}`: {w}", t.id)));
        }
        Ok(t)
    }

    pub fn new_unchecked(spec: &OperadSpec) -> Result<Self> {
        let colors: Vec<Color> = spec.colors.iter().map(|c| Color::atom(c)).collect();
        if colors.is_empty() {
            return Err(Error::parse("colors", "non-empty list expected"));
        }
        let mut elements = BTreeMap::new();
        for (i, e) in spec.elements.iter().enumerate() {
            let at = format!("elements[{i}]");
            let inp = Profile::new(e.inp.iter().map(|c| Color::atom(c)).collect())
                .map_err(|_| Error::parse(&at, "0-ary operations are not allowed"))?;
            if inp.len() > spec.max_arity {
                return Err(Error::parse(&at, "arity above max_arity"));
            }
            if elements.insert(Arc::from(e.name.as_str()), (Color::atom(&e.out), inp)).is_some() {
                return Err(Error::parse(&at, format!("duplicate element `{}`", e.name)));
            }
        }
        let name = |at: &str, s: &str| -> Result<Name> {
            elements
                .get_key_value(s)
                .map(|(k, _): (&Name, _)| k.clone())
                .ok_or_else(|| Error::parse(at, format!("unknown element `{s}`")))
        };
        let mut units = BTreeMap::new();
        for (c, u) in &spec.units {
            units.insert(Color::atom(c), name(&format!("units.{c}"), u)?);
        }
        let mut compose = HashMap::new();
        for (i, e) in spec.compose.iter().enumerate() {
            let at = format!("compose[{i}]");
            let args = e.args.iter().map(|a| name(&at, a)).collect::<Result<Vec<_>>>()?;
            compose.insert((name(&at, &e.op)?, args), name(&at, &e.result)?);
        }
        let mut act = HashMap::new();
        for (i, e) in spec.act.iter().enumerate() {
            let at = format!("act[{i}]");
            let tau = Perm::from_one_based(&e.tau).map_err(|err| Error::parse(&at, err.to_string()))?;
            act.insert((name(&at, &e.x)?, tau), name(&at, &e.result)?);
        }
        Ok(TableOperad {
            id: Arc::from(spec.id.as_str()),
            colors,
            max_arity: spec.max_arity,
            elements,
            units,
            compose,
            act,
        })
    }

    fn elem(&self, n: &Name) -> Element {
        let (o, i) = &self.elements[n];
        Element::new(&self.id, Profile::single(o.clone()), i.clone(), Payload::Sym(n.clone()))
    }

    fn name_of<'a>(&self, x: &'a Element) -> Result<&'a Name> {
        match &x.payload {
            Payload::Sym(n) if x.owner == self.id && self.elements.contains_key(n) => Ok(n),
            _ => Err(Error::NotMember {
                prop: self.id.to_string(),
                detail: format!("{x:?}"),
            }),
        }
    }
}

impl Operad for TableOperad {
    fn id(&self) -> &Name {
        &self.id
    }

    fn colors(&self) -> Vec<Color> {
        self.colors.clone()
    }

    fn max_arity(&self) -> Option<usize> {
        Some(self.max_arity)
    }

    fn contains(&self, o: &Element) -> bool {
        self.name_of(o).map(|n| self.elem(n) == *o).unwrap_or(false)
    }

    fn compose(&self, o: &Element, args: &[Element]) -> Result<Element> {
        check_args(o, args)?;
        if concat_inputs(args).len() > self.max_arity {
            return Err(Error::Unsupported(format!("composite beyond arity {}", self.max_arity)));
        }
        let key = (
            self.name_of(o)?.clone(),
            args.iter().map(|a| self.name_of(a).cloned()).collect::<Result<Vec<_>>>()?,
        );
        let r = self
            .compose
            .get(&key)
            .ok_or_else(|| Error::invalid(format!("operad table has no composite for {key:?}")))?;
        Ok(self.elem(r))
    }

    fn act(&self, o: &Element, tau: &Perm) -> Result<Element> {
        let n = self.name_of(o)?;
        tau.act_right(o.inp.colors())?;
        if tau.is_identity() {
            return Ok(o.clone());
        }
        let r = self
            .act
            .get(&(n.clone(), tau.clone()))
            .ok_or_else(|| Error::invalid(format!("operad table has no action entry for {n} and {tau:?}")))?;
        Ok(self.elem(r))
    }

    fn unit(&self, c: &Color) -> Result<Element> {
        let u = self.units.get(c).ok_or_else(|| Error::UnknownColor(format!("{c:?}")))?;
        Ok(self.elem(u))
    }

    fn enumerate(&self, out: &Color, inp: &Profile) -> Option<Vec<Element>> {
        Some(
            self.elements
                .iter()
                .filter(|(_, (o, i))| o == out && i == inp)
                .map(|(n, _)| self.elem(n))
                .collect(),
        )
    }

    fn sample(&self, rng: &mut Rng, out: &Color) -> Option<Element> {
        let c: Vec<&Name> = self.elements.iter().filter(|(_, (o, _))| o == out).map(|(n, _)| n).collect();
        c.choose(rng).map(|n| self.elem(n))
    }
}

/// Every operation of a truncated operad.
pub fn operad_elements(o: &dyn Operad) -> Result<Vec<Element>> {
    let k = o
        .max_arity()
        .ok_or_else(|| Error::Unsupported("enumerating an untruncated operad".into()))?;
    let mut out = Vec::new();
    for c in o.colors() {
        for p in profiles_up_to(&o.colors(), k) {
            out.extend(
                o.enumerate(&c, &p)
                    .ok_or_else(|| Error::Unsupported(format!("`{}` cannot enumerate", o.id())))?,
            );
        }
    }
    Ok(out)
}

/// The block permutation moving input blocks of sizes `sizes` as `τ` moves
/// whole arguments.
pub fn block_perm(tau: &Perm, sizes: &[usize]) -> Perm {
    let n = sizes.len();
    let starts: Vec<usize> = sizes
        .iter()
        .scan(0, |s, &k| {
            let r = *s;
            *s += k;
            Some(r)
        })
        .collect();
    // the block at new position p is old block τ⁻¹(p)
    let inv = tau.inverse();
    let mut new_start = vec![0; n];
    let mut acc = 0;
    for p in 0..n {
        new_start[p] = acc;
        acc += sizes[inv.apply(p)];
    }
    let mut images = vec![0; acc];
    for i in 0..n {
        for r in 0..sizes[i] {
            images[starts[i] + r] = new_start[tau.apply(i)] + r;
        }
    }
    Perm::from_images(images).expect("block permutation")
}

pub const OPERAD_LAWS: [&str; 4] = ["ρ associativity", "ρ equivariance", "ρ units", "action functoriality"];

/// Exhaustive law check of a truncated operad.
pub fn check_operad_laws(o: &dyn Operad) -> Result<LawReport> {
    let els = operad_elements(o)?;
    let max = o.max_arity().unwrap_or(usize::MAX);
    let mut by_out: BTreeMap<&Color, Vec<&Element>> = BTreeMap::new();
    for e in &els {
        by_out.entry(e.out.get(0)).or_default().push(e);
    }
    let mut t = Tally::with_laws(&OPERAD_LAWS);
    let arg_tuples = |inp: &Profile, budget: usize| -> Vec<Vec<Element>> {
        let mut acc: Vec<(Vec<Element>, usize)> = vec![(vec![], 0)];
        for c in inp.colors() {
            let mut next = Vec::new();
            for (v, used) in &acc {
                for a in by_out.get(c).cloned().unwrap_or_default() {
                    let u = used + a.inp.len();
                    let remaining = inp.len() - v.len() - 1;
                    if u + remaining <= budget {
                        let mut w = v.clone();
                        w.push(a.clone());
                        next.push((w, u));
                    }
                }
            }
            acc = next;
        }
        acc.into_iter().map(|(v, _)| v).collect()
    };
    for x in &els {
        let units: Result<Vec<Element>> = x.inp.colors().iter().map(|c| o.unit(c)).collect();
        t.record("ρ units", units.and_then(|u| o.compose(x, &u)), Ok(x.clone()), || {
            format!("ρ(o; 1, .., 1), o = {x:?}")
        });
        t.record(
            "ρ units",
            o.unit(x.out.get(0)).and_then(|u| o.compose(&u, std::slice::from_ref(x))),
            Ok(x.clone()),
            || format!("ρ(1; o), o = {x:?}"),
        );
        let perms = Perm::all(x.inp.len());
        for a in &perms {
            for b in perms.iter().take(4) {
                t.record(
                    "action functoriality",
                    o.act(x, a).and_then(|y| o.act(&y, b)),
                    o.act(x, &a.then_after(b)),
                    || format!("o = {x:?}, τ = {a:?}, τ' = {b:?}"),
                );
            }
        }
        for args in arg_tuples(&x.inp, max) {
            let sizes: Vec<usize> = args.iter().map(|a| a.inp.len()).collect();
            for tau in perms.iter().take(6) {
                let moved = tau.act_left(&args).expect("arity");
                t.record(
                    "ρ equivariance",
                    o.act(x, tau).and_then(|xt| o.compose(&xt, &args)),
                    o.compose(x, &moved).and_then(|r| o.act(&r, &block_perm(tau, &sizes))),
                    || format!("o = {x:?}, args = {args:?}, τ = {tau:?}"),
                );
            }
            let taus: Vec<Perm> = args.iter().map(|a| Perm::all(a.inp.len()).pop().expect("non-empty")).collect();
            let acted: Result<Vec<Element>> = args.iter().zip(&taus).map(|(a, s)| o.act(a, s)).collect();
            let sum = taus.iter().skip(1).fold(taus[0].clone(), |acc, s| acc.block_sum(s));
            t.record(
                "ρ equivariance",
                acted.and_then(|v| o.compose(x, &v)),
                o.compose(x, &args).and_then(|r| o.act(&r, &sum)),
                || format!("o = {x:?}, args = {args:?}, τᵢ = {taus:?}"),
            );
            let inner = arg_tuples(&concat_inputs(&args), max);
            for deep in inner {
                let lhs = o.compose(x, &args).and_then(|r| o.compose(&r, &deep));
                let mut rest = deep.as_slice();
                let mut grouped = Vec::new();
                for a in &args {
                    let (h, tl) = rest.split_at(a.inp.len());
                    grouped.push(o.compose(a, h));
                    rest = tl;
                }
                let rhs = grouped.into_iter().collect::<Result<Vec<_>>>().and_then(|g| o.compose(x, &g));
                t.record("ρ associativity", lhs, rhs, || {
                    format!("o = {x:?}, args = {args:?}, deeper = {deep:?}")
                });
            }
        }
    }
    Ok(t.into_named_report(o.id().to_string(), "exhaustive".into()))
}

/// One output of an `O_prop` element: an operation applied to a set of inputs.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Factor {
    pub output: usize,
    pub inputs: Vec<usize>,
    pub op: Element,
}

/// Default bound on orbit-closure states.
pub const ORBIT_CAP: usize = 100_000;

/// The free PROP `O_prop` on a colored operad. Elements are lists of
/// factors, one per output, whose inputs partition the input legs; equality
/// is decided by orbit closure under reordering of factors and relabeling of
/// the inputs within a factor.
pub struct OperadProp {
    id: Name,
    operad: OperadRef,
    cap: usize,
}

pub fn operad_to_prop(o: OperadRef) -> OperadProp {
    OperadProp::with_cap(o, ORBIT_CAP)
}

impl OperadProp {
    pub fn with_cap(operad: OperadRef, cap: usize) -> Self {
        OperadProp {
            id: Arc::from(format!("{}_prop", operad.id()).as_str()),
            operad,
            cap,
        }
    }

    pub fn operad(&self) -> &OperadRef {
        &self.operad
    }

    pub fn factors<'a>(&self, x: &'a Element) -> Result<&'a [Factor]> {
        check_owner(self, x)?;
        match &x.payload {
            Payload::Factors(f) => Ok(f),
            _ => Err(Error::NotMember {
                prop: self.id.to_string(),
                detail: format!("{x:?}"),
            }),
        }
    }

    /// Builds the canonical element from any list of factors.
    pub fn from_factors(&self, factors: Vec<Factor>) -> Result<Element> {
        let m = factors.len();
        let n: usize = factors.iter().map(|f| f.inputs.len()).sum();
        if m == 0 {
            return Err(Error::invalid("no factors"));
        }
        let mut out = vec![None; m];
        let mut inp = vec![None; n];
        for f in &factors {
            if f.op.inp.len() != f.inputs.len() {
                return Err(Error::Arity {
                    expected: f.op.inp.len(),
                    found: f.inputs.len(),
                });
            }
            let slot = out
                .get_mut(f.output)
                .ok_or_else(|| Error::invalid("output position out of range"))?;
            if slot.replace(f.op.out.get(0).clone()).is_some() {
                return Err(Error::invalid("two factors share an output"));
            }
            for (k, &q) in f.inputs.iter().enumerate() {
                let s = inp.get_mut(q).ok_or_else(|| Error::invalid("input position out of range"))?;
                if s.replace(f.op.inp.get(k).clone()).is_some() {
                    return Err(Error::invalid("two factors share an input"));
                }
            }
        }
        let out = Profile::new(out.into_iter().map(|c| c.expect("bijection")).collect())?;
        let inp = Profile::new(
            inp.into_iter()
                .map(|c| c.ok_or_else(|| Error::invalid("unused input")))
                .collect::<Result<_>>()?,
        )?;
        let canon = self.canonical(factors)?;
        Ok(Element::new(&self.id, out, inp, Payload::Factors(canon.into())))
    }

    /// Least state in the orbit under the generating moves.
    fn canonical(&self, start: Vec<Factor>) -> Result<Vec<Factor>> {
        let mut seen: HashSet<Vec<Factor>> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start.clone());
        queue.push_back(start);
        let mut best: Option<Vec<Factor>> = None;
        while let Some(s) = queue.pop_front() {
            if best.as_ref().is_none_or(|b| &s < b) {
                best = Some(s.clone());
            }
            for next in self.moves(&s)? {
                if seen.insert(next.clone()) {
                    if seen.len() > self.cap {
                        return Err(Error::CapExceeded(self.cap));
                    }
                    queue.push_back(next);
                }
            }
        }
        Ok(best.expect("orbit contains the start"))
    }

    fn moves(&self, s: &[Factor]) -> Result<Vec<Vec<Factor>>> {
        let mut out = Vec::new();
        for i in 0..s.len().saturating_sub(1) {
            let mut t = s.to_vec();
            t.swap(i, i + 1);
            out.push(t);
        }
        for (i, f) in s.iter().enumerate() {
            let r = f.inputs.len();
            for k in 0..r.saturating_sub(1) {
                let tr = Perm::transposition(r, k, k + 1);
                let mut t = s.to_vec();
                t[i] = Factor {
                    output: f.output,
                    inputs: tr.act_right(&f.inputs)?,
                    op: self.operad.act(&f.op, &tr)?,
                };
                out.push(t);
            }
        }
        Ok(out)
    }

    /// The one-factor element for an operation of the operad.
    pub fn embed(&self, o: &Element) -> Result<Element> {
        self.from_factors(vec![Factor {
            output: 0,
            inputs: (0..o.inp.len()).collect(),
            op: o.clone(),
        }])
    }
}

impl PropImpl for OperadProp {
    fn id(&self) -> &Name {
        &self.id
    }

    fn has_color(&self, c: &Color) -> bool {
        self.operad.colors().contains(c)
    }

    fn sample_colors(&self) -> Vec<Color> {
        self.operad.colors()
    }

    fn contains(&self, x: &Element) -> bool {
        self.factors(x)
            .ok()
            .filter(|fs| fs.iter().all(|f| self.operad.contains(&f.op)))
            .and_then(|fs| self.from_factors(fs.to_vec()).ok())
            .is_some_and(|y| y == *x)
    }

    fn hcomp(&self, x: &Element, y: &Element) -> Result<Element> {
        let (m, n) = x.arity();
        let mut fs = self.factors(x)?.to_vec();
        for f in self.factors(y)? {
            fs.push(Factor {
                output: f.output + m,
                inputs: f.inputs.iter().map(|q| q + n).collect(),
                op: f.op.clone(),
            });
        }
        self.from_factors(fs)
    }

    fn vcomp(&self, x: &Element, y: &Element) -> Result<Element> {
        check_composable(self, x, y)?;
        let ys = self.factors(y)?;
        let mut producer = vec![0; y.out.len()];
        for (i, g) in ys.iter().enumerate() {
            producer[g.output] = i;
        }
        let mut fs = Vec::new();
        for f in self.factors(x)? {
            let args: Vec<&Factor> = f.inputs.iter().map(|&q| &ys[producer[q]]).collect();
            let ops: Vec<Element> = args.iter().map(|g| g.op.clone()).collect();
            fs.push(Factor {
                output: f.output,
                inputs: args.iter().flat_map(|g| g.inputs.iter().copied()).collect(),
                op: self.operad.compose(&f.op, &ops)?,
            });
        }
        self.from_factors(fs)
    }

    fn biact(&self, sigma: &Perm, x: &Element, tau: &Perm) -> Result<Element> {
        acted_profiles(sigma, x, tau)?;
        let tinv = tau.inverse();
        let fs = self
            .factors(x)?
            .iter()
            .map(|f| Factor {
                output: sigma.apply(f.output),
                inputs: f.inputs.iter().map(|&q| tinv.apply(q)).collect(),
                op: f.op.clone(),
            })
            .collect();
        self.from_factors(fs)
    }

    fn unit_color(&self, c: &Color) -> Result<Element> {
        self.embed(&self.operad.unit(c)?)
    }

    fn enumerate(&self, out: &Profile, inp: &Profile) -> Option<Vec<Element>> {
        let (m, n) = (out.len(), inp.len());
        let mut res = Vec::new();
        // assign each input to an output; inputs of a factor stay ascending
        for assign in super::builtin::tuples(&vec![m; n]) {
            let blocks: Vec<Vec<usize>> = (0..m).map(|p| (0..n).filter(|&q| assign[q] as usize == p).collect()).collect();
            if blocks.iter().any(|b| b.is_empty()) {
                continue;
            }
            let mut partial: Vec<Vec<Factor>> = vec![vec![]];
            for (p, b) in blocks.iter().enumerate() {
                let prof = Profile::new(b.iter().map(|&q| inp.get(q).clone()).collect()).ok()?;
                let ops = self.operad.enumerate(out.get(p), &prof)?;
                let mut next = Vec::new();
                for fs in &partial {
                    for o in &ops {
                        let mut g = fs.clone();
                        g.push(Factor {
                            output: p,
                            inputs: b.clone(),
                            op: o.clone(),
                        });
                        next.push(g);
                    }
                }
                partial = next;
            }
            for fs in partial {
                res.push(self.from_factors(fs).ok()?);
            }
        }
        res.sort();
        res.dedup();
        Some(res)
    }

    fn sample(&self, rng: &mut Rng, out: Option<&Profile>) -> Option<Element> {
        let colors = self.operad.colors();
        let out = out.cloned().unwrap_or_else(|| super::random_profile(rng, &colors, 2));
        let mut ops = Vec::new();
        for c in out.colors() {
            ops.push(self.operad.sample(rng, c)?);
        }
        let n: usize = ops.iter().map(|o| o.inp.len()).sum();
        let mut slots: Vec<usize> = (0..n).collect();
        slots.shuffle(rng);
        let mut it = slots.into_iter();
        let fs = ops
            .into_iter()
            .enumerate()
            .map(|(p, o)| Factor {
                output: p,
                inputs: (&mut it).take(o.inp.len()).collect(),
                op: o,
            })
            .collect();
        self.from_factors(fs).ok()
    }

    fn factor(&self, x: &Element, _rng: &mut Rng) -> Option<(Element, Element)> {
        Some((x.clone(), self.unit(&x.inp).ok()?))
    }
}

/// The forgetful operad `U(P)`: operations with exactly one output.
pub struct PropOperad {
    id: Name,
    prop: PropRef,
    max_arity: Option<usize>,
}

pub fn prop_to_operad(p: PropRef, max_arity: Option<usize>) -> PropOperad {
    PropOperad {
        id: Arc::from(format!("U({})", p.id()).as_str()),
        prop: p,
        max_arity,
    }
}

impl PropOperad {
    pub fn prop(&self) -> &PropRef {
        &self.prop
    }
}

impl Operad for PropOperad {
    fn id(&self) -> &Name {
        &self.id
    }

    fn colors(&self) -> Vec<Color> {
        self.prop.sample_colors()
    }

    fn max_arity(&self) -> Option<usize> {
        self.max_arity
    }

    fn contains(&self, o: &Element) -> bool {
        o.out.len() == 1 && self.prop.contains(o)
    }

    fn compose(&self, o: &Element, args: &[Element]) -> Result<Element> {
        check_args(o, args)?;
        self.prop.vcomp(o, &hcomp_all(self.prop.as_ref(), args)?)
    }

    fn act(&self, o: &Element, tau: &Perm) -> Result<Element> {
        self.prop.biact(&Perm::identity(1), o, tau)
    }

    fn unit(&self, c: &Color) -> Result<Element> {
        self.prop.unit_color(c)
    }

    fn enumerate(&self, out: &Color, inp: &Profile) -> Option<Vec<Element>> {
        if self.max_arity.is_some_and(|k| inp.len() > k) {
            return Some(vec![]);
        }
        self.prop.enumerate(&Profile::single(out.clone()), inp)
    }

    fn sample(&self, rng: &mut Rng, out: &Color) -> Option<Element> {
        self.prop.sample(rng, Some(&Profile::single(out.clone())))
    }
}
