use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{acted_profiles, check_composable, check_owner, random_profile, PropImpl, Rng};
use crate::color::{Color, Element, Name, Payload, Profile};
use crate::error::{Error, Result};
use crate::perm::Perm;

/// The terminal PROP on a finite color set: every component is one point.
pub struct TerminalProp {
    id: Name,
    colors: Vec<Color>,
}

impl TerminalProp {
    /// The one-colored terminal PROP `T`.
    pub fn t() -> Self {
        TerminalProp {
            id: Arc::from("T"),
            colors: vec![Color::atom("*")],
        }
    }

    pub fn colored(colors: &[&str]) -> Result<Self> {
        let mut cs: Vec<Color> = colors.iter().map(|c| Color::atom(c)).collect();
        cs.sort();
        cs.dedup();
        if cs.is_empty() || cs.len() != colors.len() {
            return Err(Error::invalid("color sets are non-empty with unique identifiers"));
        }
        let id = format!("T[{}]", colors_label(&cs));
        Ok(TerminalProp {
            id: Arc::from(id.as_str()),
            colors: cs,
        })
    }

    pub fn point(&self, out: Profile, inp: Profile) -> Element {
        Element::new(&self.id, out, inp, Payload::Point)
    }

    /// The point of `T(m, n)` for the one-colored case.
    pub fn arity(&self, m: usize, n: usize) -> Element {
        let c = &self.colors[0];
        self.point(Profile::uniform(c, m).expect("m ≥ 1"), Profile::uniform(c, n).expect("n ≥ 1"))
    }
}

fn colors_label(cs: &[Color]) -> String {
    cs.iter().map(|c| format!("{c:?}")).collect::<Vec<_>>().join(",")
}

impl PropImpl for TerminalProp {
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
        x.owner == self.id && x.payload == Payload::Point && x.out.colors().iter().chain(x.inp.colors()).all(|c| self.has_color(c))
    }

    fn hcomp(&self, x: &Element, y: &Element) -> Result<Element> {
        check_owner(self, x)?;
        check_owner(self, y)?;
        Ok(self.point(x.out.concat(&y.out), x.inp.concat(&y.inp)))
    }

    fn vcomp(&self, x: &Element, y: &Element) -> Result<Element> {
        check_composable(self, x, y)?;
        Ok(self.point(x.out.clone(), y.inp.clone()))
    }

    fn biact(&self, sigma: &Perm, x: &Element, tau: &Perm) -> Result<Element> {
        check_owner(self, x)?;
        let (out, inp) = acted_profiles(sigma, x, tau)?;
        Ok(self.point(out, inp))
    }

    fn unit_color(&self, c: &Color) -> Result<Element> {
        if !self.has_color(c) {
            return Err(Error::UnknownColor(format!("{c:?}")));
        }
        Ok(self.point(Profile::single(c.clone()), Profile::single(c.clone())))
    }

    fn enumerate(&self, out: &Profile, inp: &Profile) -> Option<Vec<Element>> {
        Some(vec![self.point(out.clone(), inp.clone())])
    }

    fn sample(&self, rng: &mut Rng, out: Option<&Profile>) -> Option<Element> {
        let out = out.cloned().unwrap_or_else(|| random_profile(rng, &self.colors, 3));
        let inp = random_profile(rng, &self.colors, 3);
        Some(self.point(out, inp))
    }

    fn factor(&self, x: &Element, rng: &mut Rng) -> Option<(Element, Element)> {
        let mid = random_profile(rng, &self.colors, 3);
        Some((self.point(x.out.clone(), mid.clone()), self.point(mid, x.inp.clone())))
    }
}

/// The one-colored PROP with a single point in each diagonal component `(n, n)`
/// and empty off-diagonal components.
pub struct InitialProp {
    id: Name,
    color: Color,
}

impl Default for InitialProp {
    fn default() -> Self {
        InitialProp {
            id: Arc::from("I"),
            color: Color::atom("*"),
        }
    }
}

impl InitialProp {
    pub fn point(&self, n: usize) -> Element {
        let p = Profile::uniform(&self.color, n).expect("n ≥ 1");
        Element::new(&self.id, p.clone(), p, Payload::Point)
    }
}

impl PropImpl for InitialProp {
    fn id(&self) -> &Name {
        &self.id
    }

    fn has_color(&self, c: &Color) -> bool {
        *c == self.color
    }

    fn sample_colors(&self) -> Vec<Color> {
        vec![self.color.clone()]
    }

    fn contains(&self, x: &Element) -> bool {
        x.owner == self.id
            && x.payload == Payload::Point
            && x.out.len() == x.inp.len()
            && x.out.colors().iter().chain(x.inp.colors()).all(|c| *c == self.color)
    }

    fn hcomp(&self, x: &Element, y: &Element) -> Result<Element> {
        check_owner(self, x)?;
        check_owner(self, y)?;
        Ok(self.point(x.out.len() + y.out.len()))
    }

    fn vcomp(&self, x: &Element, y: &Element) -> Result<Element> {
        check_composable(self, x, y)?;
        Ok(self.point(x.out.len()))
    }

    fn biact(&self, sigma: &Perm, x: &Element, tau: &Perm) -> Result<Element> {
        check_owner(self, x)?;
        acted_profiles(sigma, x, tau)?;
        Ok(x.clone())
    }

    fn unit_color(&self, c: &Color) -> Result<Element> {
        if !self.has_color(c) {
            return Err(Error::UnknownColor(format!("{c:?}")));
        }
        Ok(self.point(1))
    }

    fn enumerate(&self, out: &Profile, inp: &Profile) -> Option<Vec<Element>> {
        let ok = out.len() == inp.len() && out.colors().iter().chain(inp.colors()).all(|c| self.has_color(c));
        Some(if ok { vec![self.point(out.len())] } else { vec![] })
    }

    fn sample(&self, rng: &mut Rng, out: Option<&Profile>) -> Option<Element> {
        let n = out.map(|p| p.len()).unwrap_or_else(|| rng.gen_range(1..=3));
        Some(self.point(n))
    }

    fn factor(&self, x: &Element, _rng: &mut Rng) -> Option<(Element, Element)> {
        Some((x.clone(), x.clone()))
    }
}

/// The endomorphism PROP of a finite graded set: `E_X(d; c)` is the set of
/// functions `X_c1 × … × X_cn → X_d1 × … × X_dm`, stored as value tables.
pub struct EndoProp {
    id: Name,
    carrier: BTreeMap<Color, Vec<String>>,
}

/// Largest component that `enumerate` will list.
const ENUM_LIMIT: u128 = 1 << 16;

impl EndoProp {
    pub fn new(carrier: Vec<(Color, Vec<String>)>) -> Result<Self> {
        if carrier.is_empty() {
            return Err(Error::invalid("color sets are non-empty"));
        }
        let n = carrier.len();
        let map: BTreeMap<Color, Vec<String>> = carrier.into_iter().collect();
        if map.len() != n {
            return Err(Error::invalid("duplicate color in graded set"));
        }
        let label = map
            .iter()
            .map(|(c, xs)| format!("{c:?}:{}", xs.len()))
            .collect::<Vec<_>>()
            .join(",");
        Ok(EndoProp {
            id: Arc::from(format!("E[{label}]").as_str()),
            carrier: map,
        })
    }

    /// `E_{Bool}` on a single color `c`.
    pub fn bool() -> Self {
        EndoProp::new(vec![(Color::atom("c"), vec!["false".into(), "true".into()])]).expect("valid carrier")
    }

    pub fn size(&self, c: &Color) -> Result<usize> {
        self.carrier
            .get(c)
            .map(|v| v.len())
            .ok_or_else(|| Error::UnknownColor(format!("{c:?}")))
    }

    fn sizes(&self, p: &Profile) -> Result<Vec<usize>> {
        p.colors().iter().map(|c| self.size(c)).collect()
    }

    pub fn labels(&self, c: &Color) -> Option<&[String]> {
        self.carrier.get(c).map(|v| v.as_slice())
    }

    /// Builds an element from a function on tuples.
    pub fn function(&self, out: Profile, inp: Profile, f: impl Fn(&[u32]) -> Vec<u32>) -> Result<Element> {
        let ins = self.sizes(&inp)?;
        let outs = self.sizes(&out)?;
        let mut table = Vec::new();
        for t in tuples(&ins) {
            let v = f(&t);
            if v.len() != outs.len() || v.iter().zip(&outs).any(|(&a, &s)| a as usize >= s) {
                return Err(Error::invalid("function value outside the carrier"));
            }
            table.extend(v);
        }
        Ok(Element::new(&self.id, out, inp, Payload::Data(table.into())))
    }

    /// Applies an element to an input tuple.
    pub fn apply(&self, x: &Element, args: &[u32]) -> Result<Vec<u32>> {
        let Payload::Data(table) = &x.payload else {
            return Err(Error::NotMember {
                prop: self.id.to_string(),
                detail: "payload is not a function table".into(),
            });
        };
        let ins = self.sizes(&x.inp)?;
        let m = x.out.len();
        let k = tuple_index(&ins, args)?;
        Ok(table[k * m..(k + 1) * m].to_vec())
    }

    fn data<'a>(&self, x: &'a Element) -> Result<&'a Arc<[u32]>> {
        match &x.payload {
            Payload::Data(t) => Ok(t),
            _ => Err(Error::NotMember {
                prop: self.id.to_string(),
                detail: "payload is not a function table".into(),
            }),
        }
    }
}

/// All tuples of a mixed-radix space, last coordinate fastest.
pub fn tuples(sizes: &[usize]) -> Vec<Vec<u32>> {
    let total: usize = sizes.iter().product();
    let mut out = Vec::with_capacity(total);
    if total == 0 {
        return out;
    }
    let mut cur = vec![0u32; sizes.len()];
    for _ in 0..total {
        out.push(cur.clone());
        for i in (0..sizes.len()).rev() {
            cur[i] += 1;
            if (cur[i] as usize) < sizes[i] {
                break;
            }
            cur[i] = 0;
        }
    }
    out
}

pub fn tuple_index(sizes: &[usize], t: &[u32]) -> Result<usize> {
    if sizes.len() != t.len() {
        return Err(Error::Arity {
            expected: sizes.len(),
            found: t.len(),
        });
    }
    let mut k = 0usize;
    for (&s, &x) in sizes.iter().zip(t) {
        if x as usize >= s {
            return Err(Error::invalid(format!("value {x} outside a carrier of size {s}")));
        }
        k = k * s + x as usize;
    }
    Ok(k)
}

impl PropImpl for EndoProp {
    fn id(&self) -> &Name {
        &self.id
    }

    fn has_color(&self, c: &Color) -> bool {
        self.carrier.contains_key(c)
    }

    fn sample_colors(&self) -> Vec<Color> {
        self.carrier.keys().cloned().collect()
    }

    fn contains(&self, x: &Element) -> bool {
        if x.owner != self.id {
            return false;
        }
        let (Ok(ins), Ok(outs), Payload::Data(t)) = (self.sizes(&x.inp), self.sizes(&x.out), &x.payload) else {
            return false;
        };
        let n: usize = ins.iter().product();
        t.len() == n * outs.len()
            && t.chunks(outs.len().max(1))
                .all(|row| row.iter().zip(&outs).all(|(&v, &s)| (v as usize) < s))
    }

    fn hcomp(&self, x: &Element, y: &Element) -> Result<Element> {
        check_owner(self, x)?;
        check_owner(self, y)?;
        let nx = x.inp.len();
        self.function(x.out.concat(&y.out), x.inp.concat(&y.inp), |t| {
            let mut v = self.apply(x, &t[..nx]).expect("valid table");
            v.extend(self.apply(y, &t[nx..]).expect("valid table"));
            v
        })
    }

    fn vcomp(&self, x: &Element, y: &Element) -> Result<Element> {
        check_composable(self, x, y)?;
        self.function(x.out.clone(), y.inp.clone(), |t| {
            let mid = self.apply(y, t).expect("valid table");
            self.apply(x, &mid).expect("valid table")
        })
    }

    fn biact(&self, sigma: &Perm, x: &Element, tau: &Perm) -> Result<Element> {
        check_owner(self, x)?;
        let (out, inp) = acted_profiles(sigma, x, tau)?;
        self.function(out, inp, |t| {
            let args = tau.act_left(t).expect("arity checked");
            let z = self.apply(x, &args).expect("valid table");
            sigma.act_left(&z).expect("arity checked")
        })
    }

    fn unit_color(&self, c: &Color) -> Result<Element> {
        let p = Profile::single(c.clone());
        self.function(p.clone(), p, |t| t.to_vec())
    }

    fn enumerate(&self, out: &Profile, inp: &Profile) -> Option<Vec<Element>> {
        let ins = self.sizes(inp).ok()?;
        let outs = self.sizes(out).ok()?;
        let n_in: u128 = ins.iter().map(|&s| s as u128).product();
        let n_out: u128 = outs.iter().map(|&s| s as u128).product();
        let count = n_out.checked_pow(u32::try_from(n_in).ok()?)?;
        if count > ENUM_LIMIT {
            return None;
        }
        let out_tuples = tuples(&outs);
        let choices = vec![out_tuples.len(); n_in as usize];
        let mut res = Vec::new();
        for pick in tuples(&choices) {
            let table: Vec<u32> = pick.iter().flat_map(|&k| out_tuples[k as usize].clone()).collect();
            res.push(Element::new(&self.id, out.clone(), inp.clone(), Payload::Data(table.into())));
        }
        res.sort();
        Some(res)
    }

    fn sample(&self, rng: &mut Rng, out: Option<&Profile>) -> Option<Element> {
        let colors = self.sample_colors();
        let out = out.cloned().unwrap_or_else(|| random_profile(rng, &colors, 2));
        let inp = random_profile(rng, &colors, 2);
        let outs = self.sizes(&out).ok()?;
        if outs.contains(&0) && self.sizes(&inp).ok()?.iter().all(|&s| s > 0) {
            return None;
        }
        let seeds: Vec<Vec<u32>> = tuples(&self.sizes(&inp).ok()?)
            .iter()
            .map(|_| outs.iter().map(|&s| rng.gen_range(0..s as u32)).collect())
            .collect();
        let ins = self.sizes(&inp).ok()?;
        self.function(out, inp, |t| seeds[tuple_index(&ins, t).expect("in range")].clone())
            .ok()
    }

    fn factor(&self, x: &Element, rng: &mut Rng) -> Option<(Element, Element)> {
        // x = (x ∘ g⁻¹) ∘ g for a random bijection g of the input tuples
        let ins = self.sizes(&x.inp).ok()?;
        let all = tuples(&ins);
        let mut shuffled: Vec<usize> = (0..all.len()).collect();
        shuffled.shuffle(rng);
        let mut inv = vec![0usize; all.len()];
        for (i, &j) in shuffled.iter().enumerate() {
            inv[j] = i;
        }
        let g = self
            .function(x.inp.clone(), x.inp.clone(), |t| {
                all[shuffled[tuple_index(&ins, t).expect("in range")]].clone()
            })
            .ok()?;
        let a = self
            .function(x.out.clone(), x.inp.clone(), |t| {
                let pre = &all[inv[tuple_index(&ins, t).expect("in range")]];
                self.apply(x, pre).expect("valid table")
            })
            .ok()?;
        let _ = self.data(x).ok()?;
        Some((a, g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn bool_component_sizes() {
        let e = EndoProp::bool();
        let c = Color::atom("c");
        let one = Profile::single(c.clone());
        let two = Profile::uniform(&c, 2).unwrap();
        assert_eq!(e.enumerate(&one, &one).unwrap().len(), 4);
        assert_eq!(e.enumerate(&one, &two).unwrap().len(), 16);
        assert_eq!(e.enumerate(&two, &two).unwrap().len(), 256);
    }

    #[test]
    fn factorization_recomposes() {
        let e = EndoProp::bool();
        let mut rng = Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x = e.sample(&mut rng, None).unwrap();
            let (a, b) = e.factor(&x, &mut rng).unwrap();
            assert_eq!(e.vcomp(&a, &b).unwrap(), x);
        }
    }

    #[test]
    fn initial_has_only_diagonal() {
        let i = InitialProp::default();
        let s = Color::atom("*");
        let p1 = Profile::single(s.clone());
        let p2 = Profile::uniform(&s, 2).unwrap();
        assert!(i.enumerate(&p1, &p2).unwrap().is_empty());
        assert_eq!(i.enumerate(&p2, &p2).unwrap().len(), 1);
    }
}
