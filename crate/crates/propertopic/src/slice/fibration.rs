//! PROPs over `P` and algebras over `P⁺`: the differential `∂` and the
//! integral `∫`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::Rng as _;

use super::{elem_color, SliceProp};
use crate::color::{Color, Element, Name, Payload, Profile};
use crate::error::{Error, Result};
use crate::graph::evaluate;
use crate::perm::Perm;
use crate::prop::algebra::{sizes, Algebra, AlgebraRef};
use crate::prop::builtin::tuples;
use crate::prop::laws::{LawReport, Tally};
use crate::prop::{check_composable, check_owner, PropImpl, PropRef, Rng};

type ElementFn = dyn Fn(&Element) -> Result<Element> + Send + Sync;

/// A map of PROPs that is the identity on colors.
#[derive(Clone)]
pub struct PropMap {
    pub source: PropRef,
    pub target: PropRef,
    map: Arc<ElementFn>,
}

impl PropMap {
    pub fn new(source: PropRef, target: PropRef, map: impl Fn(&Element) -> Result<Element> + Send + Sync + 'static) -> Self {
        PropMap {
            source,
            target,
            map: Arc::new(map),
        }
    }

    pub fn identity(p: PropRef) -> Self {
        PropMap::new(p.clone(), p, |x| Ok(x.clone()))
    }

    /// The map into the terminal PROP on the source's colors.
    pub fn to_point(source: PropRef, target: PropRef) -> Self {
        let t = target.clone();
        PropMap::new(source, target, move |x| {
            let e = t.enumerate(&x.out, &x.inp).unwrap_or_default();
            e.into_iter()
                .next()
                .ok_or_else(|| Error::invalid(format!("no point over {:?}{:?}", x.out, x.inp)))
        })
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        let y = (self.map)(x)?;
        if y.out != x.out || y.inp != x.inp {
            return Err(Error::invalid(format!("{x:?} maps outside its component")));
        }
        Ok(y)
    }

    /// `g⁻¹(α)`, sorted.
    pub fn fiber(&self, a: &Element) -> Result<Vec<Element>> {
        let all = self
            .source
            .enumerate(&a.out, &a.inp)
            .ok_or_else(|| Error::Unsupported(format!("the fiber over {a:?} is not enumerable")))?;
        let mut v = Vec::new();
        for q in all {
            if self.apply(&q)? == *a {
                v.push(q);
            }
        }
        v.sort();
        Ok(v)
    }
}

pub const MAP_LAWS: [&str; 4] = ["preserves hcomp", "preserves vcomp", "preserves biact", "preserves units"];

/// Checks that `f` commutes with the PROP operations on `support`.
pub fn check_prop_map(f: &PropMap, support: &[Element]) -> Result<LawReport> {
    let (s, t) = (f.source.as_ref(), f.target.as_ref());
    let mut tally = Tally::with_laws(&MAP_LAWS);
    let g = |x: &Element| f.apply(x);
    for x in support {
        for c in x.inp.colors() {
            if let Ok(u) = s.unit_color(c) {
                tally.record("preserves units", g(&u), t.unit_color(c), || format!("color {c:?}"));
            }
        }
        for sigma in Perm::all(x.out.len()).into_iter().take(6) {
            for tau in Perm::all(x.inp.len()).into_iter().take(6) {
                tally.record(
                    "preserves biact",
                    s.biact(&sigma, x, &tau).and_then(|y| g(&y)),
                    g(x).and_then(|y| t.biact(&sigma, &y, &tau)),
                    || format!("x = {x:?}, σ = {sigma:?}, τ = {tau:?}"),
                );
            }
        }
        for y in support {
            tally.record(
                "preserves hcomp",
                s.hcomp(x, y).and_then(|z| g(&z)),
                g(x).and_then(|a| t.hcomp(&a, &g(y)?)),
                || format!("x = {x:?}, y = {y:?}"),
            );
            if x.inp == y.out {
                tally.record(
                    "preserves vcomp",
                    s.vcomp(x, y).and_then(|z| g(&z)),
                    g(x).and_then(|a| t.vcomp(&a, &g(y)?)),
                    || format!("x = {x:?}, y = {y:?}"),
                );
            }
        }
    }
    Ok(tally.into_named_report(format!("{} -> {}", s.id(), t.id()), format!("{} support elements", support.len())))
}

/// `∂Q` for a PROP `Q` over `P`: `A_α = g⁻¹(α)`, acting by replacing
/// decorations and evaluating in `Q`.
pub struct DiffAlgebra {
    prop: PropRef,
    slice: Arc<SliceProp>,
    map: PropMap,
    fibers: Mutex<HashMap<Element, Arc<Vec<Element>>>>,
}

pub fn differentiate(f: &PropMap) -> DiffAlgebra {
    let slice = Arc::new(SliceProp::new(f.target.clone()));
    DiffAlgebra {
        prop: slice.clone(),
        slice,
        map: f.clone(),
        fibers: Mutex::new(HashMap::new()),
    }
}

impl DiffAlgebra {
    pub fn map(&self) -> &PropMap {
        &self.map
    }

    pub fn fiber(&self, a: &Element) -> Result<Arc<Vec<Element>>> {
        if let Some(v) = self.fibers.lock().expect("not poisoned").get(a) {
            return Ok(v.clone());
        }
        let v = Arc::new(self.map.fiber(a)?);
        self.fibers.lock().expect("not poisoned").insert(a.clone(), v.clone());
        Ok(v)
    }

    fn fiber_of(&self, c: &Color) -> Result<Arc<Vec<Element>>> {
        let a = c.as_elem().ok_or_else(|| Error::UnknownColor(format!("{c:?}")))?;
        self.fiber(a)
    }
}

impl Algebra for DiffAlgebra {
    fn prop(&self) -> &PropRef {
        &self.prop
    }

    fn labels(&self, c: &Color) -> Vec<String> {
        self.fiber_of(c)
            .map(|v| v.iter().map(|q| format!("{q:?}")).collect())
            .unwrap_or_default()
    }

    fn size(&self, c: &Color) -> usize {
        self.fiber_of(c).map(|v| v.len()).unwrap_or(0)
    }

    fn act(&self, x: &Element, args: &[u32]) -> Result<Vec<u32>> {
        let b = self.slice.body(x)?;
        let mut chosen = Vec::with_capacity(args.len());
        for (c, &a) in x.inp.colors().iter().zip(args) {
            let f = self.fiber_of(c)?;
            chosen.push(Arc::new(
                f.get(a as usize)
                    .cloned()
                    .ok_or_else(|| Error::invalid(format!("{a} is outside the fiber over {c:?}")))?,
            ));
        }
        let mut res = Vec::with_capacity(b.graphs.len());
        for (j, (g, ps)) in b.graphs.iter().zip(&b.positions).enumerate() {
            let mut h = g.map(|_| chosen[0].clone());
            for (v, &p) in h.vertices.iter_mut().zip(ps) {
                v.deco = chosen[p].clone();
            }
            let q = evaluate(self.map.source.as_ref(), &h)?;
            let f = self.fiber_of(x.out.get(j))?;
            let k = f
                .binary_search(&q)
                .map_err(|_| Error::invalid(format!("{q:?} is not over output {}", j + 1)))?;
            res.push(k as u32);
        }
        Ok(res)
    }
}

/// `∫A` for an algebra `A` over `P⁺`: `∫A(d; c) = ∐_α A_α`. Units would
/// need nullary elements of `P⁺`, so `∫A` is non-unital.
pub struct IntegralProp {
    id: Name,
    slice: Arc<SliceProp>,
    alg: AlgebraRef,
}

/// `∫A` for an algebra over `base⁺`.
pub fn integrate(alg: AlgebraRef, base: PropRef) -> Result<IntegralProp> {
    let slice = Arc::new(SliceProp::new(base));
    if alg.prop().id() != slice.id() {
        return Err(Error::Owner {
            expected: slice.id().to_string(),
            found: alg.prop().id().to_string(),
        });
    }
    let id = format!("∫({})", slice.id());
    Ok(IntegralProp {
        id: Arc::from(id.as_str()),
        slice,
        alg,
    })
}

impl IntegralProp {
    pub fn base(&self) -> &PropRef {
        self.slice.base()
    }

    pub fn algebra(&self) -> &AlgebraRef {
        &self.alg
    }

    pub fn point(&self, over: &Element, index: u32) -> Element {
        Element::new(
            &self.id,
            over.out.clone(),
            over.inp.clone(),
            Payload::Fiber {
                over: Arc::new(over.clone()),
                index,
            },
        )
    }

    pub fn split<'a>(&self, x: &'a Element) -> Result<(&'a Element, u32)> {
        check_owner(self, x)?;
        match &x.payload {
            Payload::Fiber { over, index } => Ok((over, *index)),
            _ => Err(Error::NotMember {
                prop: self.id.to_string(),
                detail: format!("{x:?}"),
            }),
        }
    }

    /// The projection `∫A → P`.
    pub fn projection(self: &Arc<Self>) -> PropMap {
        let me = self.clone();
        PropMap::new(self.clone(), self.slice.base().clone(), move |x| Ok(me.split(x)?.0.clone()))
    }

    fn act1(&self, theta: &Element, args: &[u32]) -> Result<u32> {
        let v = self.alg.act(theta, args)?;
        Ok(v[0])
    }
}

impl PropImpl for IntegralProp {
    fn id(&self) -> &Name {
        &self.id
    }

    fn has_color(&self, c: &Color) -> bool {
        self.base().has_color(c)
    }

    fn sample_colors(&self) -> Vec<Color> {
        self.base().sample_colors()
    }

    fn contains(&self, x: &Element) -> bool {
        match self.split(x) {
            Ok((a, i)) => self.base().contains(a) && a.out == x.out && a.inp == x.inp && (i as usize) < self.alg.size(&elem_color(a)),
            Err(_) => false,
        }
    }

    fn hcomp(&self, x: &Element, y: &Element) -> Result<Element> {
        let (a, i) = self.split(x)?;
        let (b, j) = self.split(y)?;
        let ab = self.base().hcomp(a, b)?;
        let k = self.act1(&self.slice.tensor(a, b)?, &[i, j])?;
        Ok(self.point(&ab, k))
    }

    fn vcomp(&self, x: &Element, y: &Element) -> Result<Element> {
        check_composable(self, x, y)?;
        let (a, i) = self.split(x)?;
        let (b, j) = self.split(y)?;
        let ab = self.base().vcomp(a, b)?;
        let k = self.act1(&self.slice.circ(a, b)?, &[i, j])?;
        Ok(self.point(&ab, k))
    }

    fn biact(&self, sigma: &Perm, x: &Element, tau: &Perm) -> Result<Element> {
        let (a, i) = self.split(x)?;
        let b = self.base().biact(sigma, a, tau)?;
        let k = self.act1(&self.slice.twisted_unit(sigma, a, tau)?, &[i])?;
        Ok(self.point(&b, k))
    }

    fn unit_color(&self, c: &Color) -> Result<Element> {
        Err(Error::Unsupported(format!("{} has no unit at {c:?}", self.id)))
    }

    fn unit(&self, p: &Profile) -> Result<Element> {
        Err(Error::Unsupported(format!("{} has no unit at {p:?}", self.id)))
    }

    fn is_unital(&self) -> bool {
        false
    }

    fn enumerate(&self, out: &Profile, inp: &Profile) -> Option<Vec<Element>> {
        let mut v = Vec::new();
        for a in self.base().enumerate(out, inp)? {
            for i in 0..self.alg.size(&elem_color(&a)) {
                v.push(self.point(&a, i as u32));
            }
        }
        v.sort();
        Some(v)
    }

    fn sample(&self, rng: &mut Rng, out: Option<&Profile>) -> Option<Element> {
        for _ in 0..20 {
            let a = self.base().sample(rng, out)?;
            let n = self.alg.size(&elem_color(&a));
            if n > 0 {
                return Some(self.point(&a, rng.gen_range(0..n) as u32));
            }
        }
        None
    }
}

pub const ROUND_TRIP_LAWS: [&str; 4] = ["carrier", "vcomp", "hcomp", "biact"];

/// Compares `∫∂Q` with `Q` through `q ↦ (g(q), index of q in its fiber)` on
/// the fibers over `support`. Composites are checked when their image lies
/// over `support`.
pub fn check_integral_of_differential(f: &PropMap, support: &[Element]) -> Result<LawReport> {
    let d: AlgebraRef = Arc::new(differentiate(f));
    let int = integrate(d.clone(), f.target.clone())?;
    let mut t = Tally::with_laws(&ROUND_TRIP_LAWS);
    let mut fibers: HashMap<Element, Vec<Element>> = HashMap::new();
    for a in support {
        fibers.insert(a.clone(), f.fiber(a)?);
    }
    let to_int = |q: &Element| -> Result<Element> {
        let a = f.apply(q)?;
        let fib = fibers
            .get(&a)
            .ok_or_else(|| Error::invalid(format!("{a:?} is outside the support")))?;
        let k = fib
            .binary_search(q)
            .map_err(|_| Error::invalid(format!("{q:?} missing from its fiber")))?;
        Ok(int.point(&a, k as u32))
    };
    let images: HashMap<Element, Element> = fibers
        .iter()
        .flat_map(|(a, fib)| fib.iter().map(move |q| (q.clone(), a.clone())))
        .collect();
    let over_support = |a: Result<Element>| a.is_ok_and(|a| fibers.contains_key(&a));
    let tgt = f.target.as_ref();
    let mut elems = Vec::new();
    for a in support {
        let fib = &fibers[a];
        let n_int = int
            .enumerate(&a.out, &a.inp)
            .map(|v| v.into_iter().filter(|x| int.split(x).map(|(b, _)| b == a).unwrap_or(false)).count());
        t.record(
            "carrier",
            Ok(fib.len()),
            n_int.ok_or_else(|| Error::Unsupported("not enumerable".into())),
            || format!("fiber over {a:?}"),
        );
        elems.extend(fib.iter().cloned());
    }
    for x in &elems {
        for sigma in Perm::all(x.out.len()).into_iter().take(4) {
            for tau in Perm::all(x.inp.len()).into_iter().take(4) {
                t.record(
                    "biact",
                    f.source.biact(&sigma, x, &tau).and_then(|y| to_int(&y)),
                    to_int(x).and_then(|y| int.biact(&sigma, &y, &tau)),
                    || format!("x = {x:?}, σ = {sigma:?}, τ = {tau:?}"),
                );
            }
        }
        for y in &elems {
            if over_support(tgt.hcomp(&images[x], &images[y])) {
                t.record(
                    "hcomp",
                    f.source.hcomp(x, y).and_then(|z| to_int(&z)),
                    to_int(x).and_then(|a| int.hcomp(&a, &to_int(y)?)),
                    || format!("x = {x:?}, y = {y:?}"),
                );
            }
            if x.inp == y.out && over_support(tgt.vcomp(&images[x], &images[y])) {
                t.record(
                    "vcomp",
                    f.source.vcomp(x, y).and_then(|z| to_int(&z)),
                    to_int(x).and_then(|a| int.vcomp(&a, &to_int(y)?)),
                    || format!("x = {x:?}, y = {y:?}"),
                );
            }
        }
    }
    Ok(t.into_named_report(format!("∫∂ over {}", f.source.id()), format!("{} base elements", support.len())))
}

/// Compares `∂∫A` with `A` on the colors and elements of `support`.
pub fn check_differential_of_integral(alg: AlgebraRef, base: PropRef, support: &[Element]) -> Result<LawReport> {
    let int = Arc::new(integrate(alg.clone(), base)?);
    let d = differentiate(&int.projection());
    let mut t = Tally::with_laws(&["carrier", "action"]);
    let mut colors: Vec<&Color> = support.iter().flat_map(|x| x.out.colors().iter().chain(x.inp.colors())).collect();
    colors.sort();
    colors.dedup();
    for c in colors {
        t.record("carrier", Ok(alg.size(c)), Ok(d.size(c)), || format!("color {c:?}"));
    }
    for x in support {
        for args in tuples(&sizes(alg.as_ref(), &x.inp)) {
            t.record("action", alg.act(x, &args), d.act(x, &args), || {
                format!("x = {x:?}, args = {args:?}")
            });
        }
    }
    Ok(t.into_named_report(
        format!("∂∫ over {}", alg.prop().id()),
        format!("{} support elements", support.len()),
    ))
}
