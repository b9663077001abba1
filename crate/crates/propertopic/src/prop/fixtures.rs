//! Small PROPs over a base, used to exercise the slice construction.

use std::sync::Arc;

use rand::Rng as _;

use super::builtin::InitialProp;
use super::{acted_profiles, check_composable, check_owner, PropImpl, PropRef, Rng};
use crate::color::{Color, Element, Name, Payload, Profile};
use crate::error::{Error, Result};
use crate::perm::Perm;

/// A finite commutative monoid on `{0, .., size-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Monoid {
    /// Addition modulo `k`.
    Cyclic(u32),
    /// `max` on `{0, .., k-1}`.
    Max(u32),
    /// Conjunction on `{0, 1}` with unit `1`.
    And,
}

impl Monoid {
    pub fn size(self) -> u32 {
        match self {
            Monoid::Cyclic(k) | Monoid::Max(k) => k,
            Monoid::And => 2,
        }
    }

    pub fn unit(self) -> u32 {
        match self {
            Monoid::And => 1,
            _ => 0,
        }
    }

    pub fn op(self, a: u32, b: u32) -> u32 {
        match self {
            Monoid::Cyclic(k) => (a + b) % k,
            Monoid::Max(_) => a.max(b),
            Monoid::And => a & b,
        }
    }

    pub fn label(self) -> String {
        match self {
            Monoid::Cyclic(k) => format!("Z{k}"),
            Monoid::Max(k) => format!("max{k}"),
            Monoid::And => "and".into(),
        }
    }
}

/// `Q(d; c) = P(d; c) × M`: every element of the base carries a weight, and
/// both compositions add weights.
pub struct WeightedProp {
    id: Name,
    base: PropRef,
    monoid: Monoid,
}

impl WeightedProp {
    pub fn new(base: PropRef, monoid: Monoid) -> Self {
        let id = format!("{}x{}", base.id(), monoid.label());
        WeightedProp {
            id: Arc::from(id.as_str()),
            base,
            monoid,
        }
    }

    pub fn base(&self) -> &PropRef {
        &self.base
    }

    pub fn weighted(&self, over: Element, w: u32) -> Element {
        Element::new(
            &self.id,
            over.out.clone(),
            over.inp.clone(),
            Payload::Fiber {
                over: Arc::new(over),
                index: w % self.monoid.size(),
            },
        )
    }

    /// The base element and weight of `x`.
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

    /// The projection to the base, a PROP map.
    pub fn project(&self, x: &Element) -> Result<Element> {
        Ok(self.split(x)?.0.clone())
    }
}

impl PropImpl for WeightedProp {
    fn id(&self) -> &Name {
        &self.id
    }

    fn has_color(&self, c: &Color) -> bool {
        self.base.has_color(c)
    }

    fn sample_colors(&self) -> Vec<Color> {
        self.base.sample_colors()
    }

    fn contains(&self, x: &Element) -> bool {
        match self.split(x) {
            Ok((b, w)) => w < self.monoid.size() && self.base.contains(b) && b.out == x.out && b.inp == x.inp,
            Err(_) => false,
        }
    }

    fn hcomp(&self, x: &Element, y: &Element) -> Result<Element> {
        let (a, v) = self.split(x)?;
        let (b, w) = self.split(y)?;
        Ok(self.weighted(self.base.hcomp(a, b)?, self.monoid.op(v, w)))
    }

    fn vcomp(&self, x: &Element, y: &Element) -> Result<Element> {
        check_composable(self, x, y)?;
        let (a, v) = self.split(x)?;
        let (b, w) = self.split(y)?;
        Ok(self.weighted(self.base.vcomp(a, b)?, self.monoid.op(v, w)))
    }

    fn biact(&self, sigma: &Perm, x: &Element, tau: &Perm) -> Result<Element> {
        let (a, v) = self.split(x)?;
        Ok(self.weighted(self.base.biact(sigma, a, tau)?, v))
    }

    fn unit_color(&self, c: &Color) -> Result<Element> {
        Ok(self.weighted(self.base.unit_color(c)?, self.monoid.unit()))
    }

    fn unit(&self, p: &Profile) -> Result<Element> {
        Ok(self.weighted(self.base.unit(p)?, self.monoid.unit()))
    }

    fn enumerate(&self, out: &Profile, inp: &Profile) -> Option<Vec<Element>> {
        let base = self.base.enumerate(out, inp)?;
        let mut res: Vec<Element> = base
            .into_iter()
            .flat_map(|b| (0..self.monoid.size()).map(move |w| (b.clone(), w)))
            .map(|(b, w)| self.weighted(b, w))
            .collect();
        res.sort();
        Some(res)
    }

    fn sample(&self, rng: &mut Rng, out: Option<&Profile>) -> Option<Element> {
        let b = self.base.sample(rng, out)?;
        Some(self.weighted(b, rng.gen_range(0..self.monoid.size())))
    }

    fn factor(&self, x: &Element, rng: &mut Rng) -> Option<(Element, Element)> {
        let (b, w) = self.split(x).ok()?;
        let (p, q) = self.base.factor(b, rng)?;
        Some((self.weighted(p, w), self.weighted(q, self.monoid.unit())))
    }
}

/// Words over a monoid `A` in the diagonal components of the initial PROP:
/// `Q(n, n) = Aⁿ`, horizontal composition concatenates, vertical composition
/// multiplies letterwise, and permutations act trivially.
pub struct TensorAlgebraProp {
    id: Name,
    monoid: Monoid,
    base: Arc<InitialProp>,
}

impl TensorAlgebraProp {
    pub fn new(monoid: Monoid) -> Self {
        TensorAlgebraProp {
            id: Arc::from(format!("Words[{}]", monoid.label()).as_str()),
            monoid,
            base: Arc::new(InitialProp::default()),
        }
    }

    pub fn monoid(&self) -> Monoid {
        self.monoid
    }

    pub fn base(&self) -> PropRef {
        self.base.clone()
    }

    pub fn word(&self, letters: &[u32]) -> Result<Element> {
        if letters.iter().any(|&a| a >= self.monoid.size()) {
            return Err(Error::invalid("letter outside the monoid"));
        }
        let p = Profile::uniform(&Color::atom("*"), letters.len())?;
        Ok(Element::new(&self.id, p.clone(), p, Payload::Data(letters.into())))
    }

    pub fn letters<'a>(&self, x: &'a Element) -> Result<&'a [u32]> {
        check_owner(self, x)?;
        match &x.payload {
            Payload::Data(d) => Ok(d),
            _ => Err(Error::NotMember {
                prop: self.id.to_string(),
                detail: format!("{x:?}"),
            }),
        }
    }

    /// The projection to the initial PROP.
    pub fn project(&self, x: &Element) -> Result<Element> {
        Ok(self.base.point(self.letters(x)?.len()))
    }
}

impl PropImpl for TensorAlgebraProp {
    fn id(&self) -> &Name {
        &self.id
    }

    fn has_color(&self, c: &Color) -> bool {
        self.base.has_color(c)
    }

    fn sample_colors(&self) -> Vec<Color> {
        self.base.sample_colors()
    }

    fn contains(&self, x: &Element) -> bool {
        self.letters(x)
            .map(|l| l.len() == x.out.len() && x.out == x.inp && l.iter().all(|&a| a < self.monoid.size()))
            .unwrap_or(false)
    }

    fn hcomp(&self, x: &Element, y: &Element) -> Result<Element> {
        let mut v = self.letters(x)?.to_vec();
        v.extend_from_slice(self.letters(y)?);
        self.word(&v)
    }

    fn vcomp(&self, x: &Element, y: &Element) -> Result<Element> {
        check_composable(self, x, y)?;
        let v: Vec<u32> = self
            .letters(x)?
            .iter()
            .zip(self.letters(y)?)
            .map(|(&a, &b)| self.monoid.op(a, b))
            .collect();
        self.word(&v)
    }

    fn biact(&self, sigma: &Perm, x: &Element, tau: &Perm) -> Result<Element> {
        self.letters(x)?;
        acted_profiles(sigma, x, tau)?;
        Ok(x.clone())
    }

    fn unit_color(&self, c: &Color) -> Result<Element> {
        if !self.has_color(c) {
            return Err(Error::UnknownColor(format!("{c:?}")));
        }
        self.word(&[self.monoid.unit()])
    }

    fn enumerate(&self, out: &Profile, inp: &Profile) -> Option<Vec<Element>> {
        if out != inp || !out.colors().iter().all(|c| self.has_color(c)) {
            return Some(vec![]);
        }
        let sizes = vec![self.monoid.size() as usize; out.len()];
        let mut res: Vec<Element> = super::builtin::tuples(&sizes)
            .iter()
            .map(|w| self.word(w).expect("letters in range"))
            .collect();
        res.sort();
        Some(res)
    }

    fn sample(&self, rng: &mut Rng, out: Option<&Profile>) -> Option<Element> {
        let n = out.map(|p| p.len()).unwrap_or_else(|| rng.gen_range(1..=3));
        let w: Vec<u32> = (0..n).map(|_| rng.gen_range(0..self.monoid.size())).collect();
        self.word(&w).ok()
    }

    fn factor(&self, x: &Element, _rng: &mut Rng) -> Option<(Element, Element)> {
        let n = self.letters(x).ok()?.len();
        Some((x.clone(), self.word(&vec![self.monoid.unit(); n]).ok()?))
    }
}
