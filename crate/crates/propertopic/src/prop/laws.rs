use std::collections::BTreeMap;

use rand::SeedableRng;
use serde::Serialize;

use super::{PropImpl, Rng};
use crate::color::{Color, Element, Profile};
use crate::error::{Error, Result};
use crate::perm::Perm;

/// How elements are drawn for a law check.
#[derive(Clone, Debug)]
pub enum LawMode {
    /// Every element with profiles of length at most `max_arity`; horizontal
    /// laws use elements of length at most `hcomp_arity`.
    Exhaustive {
        max_arity: usize,
        hcomp_arity: usize,
    },
    Sampled {
        samples: usize,
        seed: u64,
    },
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct LawResult {
    pub law: String,
    pub checked: usize,
    pub failures: usize,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct LawReport {
    pub prop: String,
    pub mode: String,
    pub laws: Vec<LawResult>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.laws.iter().all(|l| l.failures == 0)
    }

    pub fn failures(&self) -> usize {
        self.laws.iter().map(|l| l.failures).sum()
    }

    pub fn first_witness(&self) -> Option<&str> {
        self.laws.iter().find_map(|l| l.witness.as_deref())
    }
}

pub const LAWS: [&str; 9] = [
    "biact identity",
    "biact functoriality",
    "vcomp equivariance",
    "hcomp equivariance",
    "vcomp associativity",
    "hcomp associativity",
    "interchange",
    "left unit",
    "right unit",
];

pub(crate) struct Tally(BTreeMap<&'static str, LawResult>, Vec<&'static str>);

impl Tally {
    pub(crate) fn new() -> Self {
        Self::with_laws(&LAWS)
    }

    pub(crate) fn with_laws(laws: &[&'static str]) -> Self {
        Tally(
            laws.iter()
                .map(|&l| {
                    (
                        l,
                        LawResult {
                            law: l.to_string(),
                            checked: 0,
                            failures: 0,
                            witness: None,
                        },
                    )
                })
                .collect(),
            laws.to_vec(),
        )
    }

    /// Records one instance. Truncation errors skip the instance.
    pub(crate) fn record<T: PartialEq + std::fmt::Debug>(
        &mut self,
        law: &'static str,
        lhs: Result<T>,
        rhs: Result<T>,
        ctx: impl FnOnce() -> String,
    ) {
        let r = self.0.get_mut(law).expect("known law");
        match (lhs, rhs) {
            (Err(Error::Unsupported(_)), _) | (_, Err(Error::Unsupported(_))) => {}
            (Ok(a), Ok(b)) if a == b => r.checked += 1,
            (a, b) => {
                r.checked += 1;
                r.failures += 1;
                if r.witness.is_none() {
                    r.witness = Some(format!("{}: lhs = {}, rhs = {}", ctx(), show(&a), show(&b)));
                }
            }
        }
    }

    pub(crate) fn into_report(self, p: &dyn PropImpl, mode: String) -> LawReport {
        self.into_named_report(p.id().to_string(), mode)
    }

    pub(crate) fn into_named_report(self, prop: String, mode: String) -> LawReport {
        LawReport {
            prop,
            mode,
            laws: self.1.iter().map(|l| self.0[l].clone()).collect(),
        }
    }
}

fn show<T: std::fmt::Debug>(r: &Result<T>) -> String {
    match r {
        Ok(e) => format!("{e:?}"),
        Err(e) => format!("error ({e})"),
    }
}

/// All profiles over `colors` of length `1..=k`.
pub fn profiles_up_to(colors: &[Color], k: usize) -> Vec<Profile> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Color>> = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for p in &layer {
            for c in colors {
                let mut q = p.clone();
                q.push(c.clone());
                next.push(q);
            }
        }
        out.extend(next.iter().map(|v| Profile::new(v.clone()).expect("non-empty")));
        layer = next;
    }
    out
}

/// Every element whose profiles have length at most `k`, if `P` can enumerate them.
pub fn elements_up_to(p: &dyn PropImpl, k: usize) -> Option<Vec<Element>> {
    let ps = profiles_up_to(&p.sample_colors(), k);
    let mut out = Vec::new();
    for d in &ps {
        for c in &ps {
            out.extend(p.enumerate(d, c)?);
        }
    }
    Some(out)
}

/// Checks the PROP axioms and reports per law.
pub fn check_prop_laws(p: &dyn PropImpl, mode: &LawMode) -> Result<LawReport> {
    match *mode {
        LawMode::Exhaustive { max_arity, hcomp_arity } => {
            let elems =
                elements_up_to(p, max_arity).ok_or_else(|| Error::Unsupported(format!("`{}` cannot enumerate its components", p.id())))?;
            let small: Vec<Element> = elems
                .iter()
                .filter(|e| e.out.len() <= hcomp_arity && e.inp.len() <= hcomp_arity)
                .cloned()
                .collect();
            Ok(exhaustive(p, &elems, &small).into_report(p, format!("exhaustive, arity ≤ {max_arity}")))
        }
        LawMode::Sampled { samples, seed } => Ok(sampled(p, samples, seed).into_report(p, format!("{samples} samples, seed {seed}"))),
    }
}

fn by_out(elems: &[Element]) -> BTreeMap<&Profile, Vec<&Element>> {
    let mut m: BTreeMap<&Profile, Vec<&Element>> = BTreeMap::new();
    for e in elems {
        m.entry(&e.out).or_default().push(e);
    }
    m
}

fn exhaustive(p: &dyn PropImpl, elems: &[Element], small: &[Element]) -> Tally {
    let mut t = Tally::new();
    let outs = by_out(elems);
    for x in elems {
        unary_laws(p, &mut t, x, &Perm::all(x.out.len()), &Perm::all(x.inp.len()));
        let ys = outs.get(&x.inp).cloned().unwrap_or_default();
        for y in &ys {
            let sigma = Perm::all(x.out.len()).pop().expect("non-empty");
            let mu = Perm::all(y.inp.len()).pop().expect("non-empty");
            vcomp_equivariance(p, &mut t, x, y, &sigma, &mu, &Perm::all(x.inp.len()));
            for z in outs.get(&y.inp).map(|v| v.as_slice()).unwrap_or_default() {
                t.record(
                    "vcomp associativity",
                    p.vcomp(x, y).and_then(|xy| p.vcomp(&xy, z)),
                    p.vcomp(y, z).and_then(|yz| p.vcomp(x, &yz)),
                    || format!("x = {x:?}, y = {y:?}, z = {z:?}"),
                );
            }
        }
    }
    for x in small {
        for y in small {
            let sx = Perm::all(x.out.len());
            let tx = Perm::all(x.inp.len());
            let sy = Perm::all(y.out.len());
            let ty = Perm::all(y.inp.len());
            for (s1, t1) in sx.iter().zip(tx.iter().cycle()) {
                for (s2, t2) in sy.iter().zip(ty.iter().cycle()) {
                    hcomp_equivariance(p, &mut t, (s1, x, t1), (s2, y, t2));
                }
            }
            for z in small {
                t.record(
                    "hcomp associativity",
                    p.hcomp(x, y).and_then(|xy| p.hcomp(&xy, z)),
                    p.hcomp(y, z).and_then(|yz| p.hcomp(x, &yz)),
                    || format!("x = {x:?}, y = {y:?}, z = {z:?}"),
                );
            }
        }
    }
    let small_outs = by_out(small);
    let pairs: Vec<(&Element, &Element)> = small
        .iter()
        .flat_map(|x| small_outs.get(&x.inp).cloned().unwrap_or_default().into_iter().map(move |y| (x, y)))
        .collect();
    for &(x1, x2) in &pairs {
        for &(y1, y2) in &pairs {
            interchange(p, &mut t, x1, x2, y1, y2);
        }
    }
    t
}

fn unary_laws(p: &dyn PropImpl, t: &mut Tally, x: &Element, sigmas: &[Perm], taus: &[Perm]) {
    let (m, n) = x.arity();
    t.record(
        "biact identity",
        p.biact(&Perm::identity(m), x, &Perm::identity(n)),
        Ok(x.clone()),
        || format!("x = {x:?}"),
    );
    for s in sigmas {
        for s2 in sigmas.iter().take(3) {
            for (tau, tau2) in taus.iter().zip(taus.iter().rev()) {
                t.record(
                    "biact functoriality",
                    p.biact(&s2.then_after(s), x, &tau.then_after(tau2)),
                    p.biact(s, x, tau).and_then(|y| p.biact(s2, &y, tau2)),
                    || format!("x = {x:?}, σ = {s:?}, σ' = {s2:?}, τ = {tau:?}, τ' = {tau2:?}"),
                );
            }
        }
    }
    let (out, inp) = (x.out.clone(), x.inp.clone());
    t.record("left unit", p.unit(&out).and_then(|u| p.vcomp(&u, x)), Ok(x.clone()), || {
        format!("x = {x:?}")
    });
    t.record("right unit", p.unit(&inp).and_then(|u| p.vcomp(x, &u)), Ok(x.clone()), || {
        format!("x = {x:?}")
    });
}

/// `(σx) ∘ (yμ) = σ(x ∘ y)μ` and `(x·τ) ∘ y' = x ∘ (τ·y')` where `y' = (τ⁻¹; id)y`.
fn vcomp_equivariance(p: &dyn PropImpl, t: &mut Tally, x: &Element, y: &Element, sigma: &Perm, mu: &Perm, taus: &[Perm]) {
    let id = |k: usize| Perm::identity(k);
    t.record(
        "vcomp equivariance",
        p.biact(sigma, x, &id(x.inp.len()))
            .and_then(|sx| p.biact(&id(y.out.len()), y, mu).and_then(|ym| p.vcomp(&sx, &ym))),
        p.vcomp(x, y).and_then(|xy| p.biact(sigma, &xy, mu)),
        || format!("x = {x:?}, y = {y:?}, σ = {sigma:?}, μ = {mu:?}"),
    );
    for tau in taus {
        let y2 = match p.biact(&tau.inverse(), y, &id(y.inp.len())) {
            Ok(v) => v,
            Err(e) => {
                t.record("vcomp equivariance", Err(e), Ok(y.clone()), || format!("y = {y:?}"));
                continue;
            }
        };
        t.record(
            "vcomp equivariance",
            p.biact(&id(x.out.len()), x, tau).and_then(|xt| p.vcomp(&xt, &y2)),
            p.biact(tau, &y2, &id(y.inp.len())).and_then(|ty| p.vcomp(x, &ty)),
            || format!("x = {x:?}, y = {y2:?}, τ = {tau:?}"),
        );
    }
}

fn hcomp_equivariance(p: &dyn PropImpl, t: &mut Tally, (s1, x, t1): (&Perm, &Element, &Perm), (s2, y, t2): (&Perm, &Element, &Perm)) {
    t.record(
        "hcomp equivariance",
        p.biact(s1, x, t1).and_then(|a| p.biact(s2, y, t2).and_then(|b| p.hcomp(&a, &b))),
        p.hcomp(x, y).and_then(|xy| p.biact(&s1.block_sum(s2), &xy, &t1.block_sum(t2))),
        || format!("x = {x:?}, y = {y:?}, σ₁ = {s1:?}, τ₁ = {t1:?}, σ₂ = {s2:?}, τ₂ = {t2:?}"),
    );
}

fn interchange(p: &dyn PropImpl, t: &mut Tally, x1: &Element, x2: &Element, y1: &Element, y2: &Element) {
    t.record(
        "interchange",
        p.vcomp(x1, x2).and_then(|a| p.vcomp(y1, y2).and_then(|b| p.hcomp(&a, &b))),
        p.hcomp(x1, y1).and_then(|a| p.hcomp(x2, y2).and_then(|b| p.vcomp(&a, &b))),
        || format!("x₁ = {x1:?}, x₂ = {x2:?}, y₁ = {y1:?}, y₂ = {y2:?}"),
    );
}

/// Draws `x` then an element whose out-profile is `x`'s in-profile.
fn sample_below(p: &dyn PropImpl, rng: &mut Rng, x: &Element) -> Option<Element> {
    (0..20).find_map(|_| p.sample(rng, Some(&x.inp)))
}

fn sample_any(p: &dyn PropImpl, rng: &mut Rng) -> Option<Element> {
    (0..20).find_map(|_| p.sample(rng, None))
}

fn sampled(p: &dyn PropImpl, samples: usize, seed: u64) -> Tally {
    let mut rng = Rng::seed_from_u64(seed);
    let mut t = Tally::new();
    for _ in 0..samples {
        let Some(x) = sample_any(p, &mut rng) else { continue };
        let (m, n) = x.arity();
        let sig = [Perm::random(m, &mut rng), Perm::random(m, &mut rng)];
        let tau = [Perm::random(n, &mut rng), Perm::random(n, &mut rng)];
        unary_laws(p, &mut t, &x, &sig, &tau);
        if let Some(y) = sample_below(p, &mut rng, &x) {
            let mu = Perm::random(y.inp.len(), &mut rng);
            vcomp_equivariance(p, &mut t, &x, &y, &sig[1], &mu, &[Perm::random(n, &mut rng)]);
            if let Some(z) = sample_below(p, &mut rng, &y) {
                t.record(
                    "vcomp associativity",
                    p.vcomp(&x, &y).and_then(|xy| p.vcomp(&xy, &z)),
                    p.vcomp(&y, &z).and_then(|yz| p.vcomp(&x, &yz)),
                    || format!("x = {x:?}, y = {y:?}, z = {z:?}"),
                );
            }
            let Some(x1) = sample_any(p, &mut rng) else { continue };
            let Some(y1) = sample_below(p, &mut rng, &x1) else { continue };
            interchange(p, &mut t, &x, &y, &x1, &y1);
            let Some(w) = sample_any(p, &mut rng) else { continue };
            t.record(
                "hcomp associativity",
                p.hcomp(&x, &x1).and_then(|a| p.hcomp(&a, &w)),
                p.hcomp(&x1, &w).and_then(|b| p.hcomp(&x, &b)),
                || format!("x = {x:?}, y = {x1:?}, z = {w:?}"),
            );
            let (m1, n1) = x1.arity();
            hcomp_equivariance(
                p,
                &mut t,
                (&sig[0], &x, &tau[0]),
                (&Perm::random(m1, &mut rng), &x1, &Perm::random(n1, &mut rng)),
            );
        }
    }
    t
}
