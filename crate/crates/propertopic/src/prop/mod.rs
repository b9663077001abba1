//! The PROP interface, built-in PROPs, algebras, law checking, and the
//! operad/PROP adjunction.

pub mod algebra;
pub mod builtin;
pub mod fixtures;
pub mod laws;
pub mod operad;
pub mod table;

use std::sync::Arc;

use rand_chacha::ChaCha8Rng;

use crate::color::{Color, Element, Name, Profile};
use crate::error::{Error, Result};
use crate::perm::Perm;

pub type Rng = ChaCha8Rng;
pub type PropRef = Arc<dyn PropImpl>;

/// A colored PROP with decidable equality on canonical elements.
pub trait PropImpl: Send + Sync {
    fn id(&self) -> &Name;

    fn has_color(&self, c: &Color) -> bool;

    /// A finite list of colors used for sampling. Equals the color set when it is finite.
    fn sample_colors(&self) -> Vec<Color>;

    fn contains(&self, x: &Element) -> bool;

    fn hcomp(&self, x: &Element, y: &Element) -> Result<Element>;

    fn vcomp(&self, x: &Element, y: &Element) -> Result<Element>;

    fn biact(&self, sigma: &Perm, x: &Element, tau: &Perm) -> Result<Element>;

    fn unit_color(&self, c: &Color) -> Result<Element>;

    fn unit(&self, p: &Profile) -> Result<Element> {
        let mut acc = self.unit_color(p.get(0))?;
        for c in &p.colors()[1..] {
            acc = self.hcomp(&acc, &self.unit_color(c)?)?;
        }
        Ok(acc)
    }

    fn is_unital(&self) -> bool {
        true
    }

    /// Every element of `P(out; inp)`, when that set is finite and small.
    fn enumerate(&self, _out: &Profile, _inp: &Profile) -> Option<Vec<Element>> {
        None
    }

    /// A random element, optionally with a prescribed output profile.
    fn sample(&self, rng: &mut Rng, out: Option<&Profile>) -> Option<Element>;

    /// A random factorization `x = a ∘ b`, when the PROP knows how to produce one.
    fn factor(&self, _x: &Element, _rng: &mut Rng) -> Option<(Element, Element)> {
        None
    }
}

pub(crate) fn check_owner(p: &dyn PropImpl, x: &Element) -> Result<()> {
    if &x.owner != p.id() {
        return Err(Error::Owner {
            expected: p.id().to_string(),
            found: x.owner.to_string(),
        });
    }
    Ok(())
}

pub(crate) fn check_composable(p: &dyn PropImpl, x: &Element, y: &Element) -> Result<()> {
    check_owner(p, x)?;
    check_owner(p, y)?;
    if x.inp != y.out {
        return Err(Error::Composition(format!(
            "in-profile {:?} against out-profile {:?}",
            x.inp, y.out
        )));
    }
    Ok(())
}

/// Profiles of `(σ; τ)x`.
pub(crate) fn acted_profiles(sigma: &Perm, x: &Element, tau: &Perm) -> Result<(Profile, Profile)> {
    let out = Profile::new(sigma.act_left(x.out.colors())?)?;
    let inp = Profile::new(tau.act_right(x.inp.colors())?)?;
    Ok((out, inp))
}

pub(crate) fn random_profile(rng: &mut Rng, colors: &[Color], max_len: usize) -> Profile {
    use rand::Rng as _;
    let k = rng.gen_range(1..=max_len);
    let v = (0..k).map(|_| colors[rng.gen_range(0..colors.len())].clone()).collect();
    Profile::new(v).expect("non-empty")
}

pub fn hcomp(p: &dyn PropImpl, x: &Element, y: &Element) -> Result<Element> {
    p.hcomp(x, y)
}

pub fn vcomp(p: &dyn PropImpl, x: &Element, y: &Element) -> Result<Element> {
    p.vcomp(x, y)
}

pub fn biact(p: &dyn PropImpl, sigma: &Perm, x: &Element, tau: &Perm) -> Result<Element> {
    p.biact(sigma, x, tau)
}

pub fn unit(p: &dyn PropImpl, c: &Profile) -> Result<Element> {
    for col in c.colors() {
        if !p.has_color(col) {
            return Err(Error::UnknownColor(format!("{col:?}")));
        }
    }
    p.unit(c)
}

/// `(σ;id)` applied to a profile: entry `i` is entry `σ⁻¹(i)`.
pub fn profile_act(sigma: &Perm, p: &Profile) -> Result<Profile> {
    Profile::new(sigma.act_left(p.colors())?)
}

/// Horizontal composite of a non-empty list.
pub fn hcomp_all(p: &dyn PropImpl, xs: &[Element]) -> Result<Element> {
    let (first, rest) = xs.split_first().ok_or_else(|| Error::invalid("empty horizontal composite"))?;
    let mut acc = first.clone();
    for x in rest {
        acc = p.hcomp(&acc, x)?;
    }
    Ok(acc)
}
