//! Algebras over a PROP on finite graded sets.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::builtin::{tuple_index, tuples, TerminalProp};
use super::laws::{LawReport, Tally};
use super::{PropRef, Rng};
use crate::color::{Color, Element, Profile};
use crate::error::{Error, Result};
use crate::perm::Perm;

/// A `P`-algebra on a finite graded set. Carrier values are indices into the
/// label list of their color.
pub trait Algebra: Send + Sync {
    fn prop(&self) -> &PropRef;

    /// Labels of `A_c`; unknown colors have an empty carrier.
    fn labels(&self, c: &Color) -> Vec<String>;

    fn size(&self, c: &Color) -> usize {
        self.labels(c).len()
    }

    /// `λ(x, args)` on already validated arguments.
    fn act(&self, x: &Element, args: &[u32]) -> Result<Vec<u32>>;
}

pub type AlgebraRef = Arc<dyn Algebra>;

pub fn sizes(a: &dyn Algebra, p: &Profile) -> Vec<usize> {
    p.colors().iter().map(|c| a.size(c)).collect()
}

/// `λ(x, args)` with color and range checks.
pub fn algebra_act(a: &dyn Algebra, x: &Element, args: &[u32]) -> Result<Vec<u32>> {
    if args.len() != x.inp.len() {
        return Err(Error::Arity {
            expected: x.inp.len(),
            found: args.len(),
        });
    }
    for (i, (&v, c)) in args.iter().zip(x.inp.colors()).enumerate() {
        if v as usize >= a.size(c) {
            return Err(Error::invalid(format!("argument {i} = {v} is not in the carrier of {c:?}")));
        }
    }
    a.act(x, args)
}

/// A join-semilattice `(L, ∨)` as an algebra over the one-colored terminal
/// PROP: `λ(* ∈ T(m, n), a) = (∨a, .., ∨a)`.
pub struct SemilatticeBimonoid {
    prop: PropRef,
    labels: Vec<String>,
    join: Vec<Vec<u32>>,
}

impl SemilatticeBimonoid {
    /// Booleans under OR with the diagonal as comultiplication.
    pub fn bool_or() -> Self {
        SemilatticeBimonoid {
            prop: Arc::new(TerminalProp::t()),
            labels: vec!["false".into(), "true".into()],
            join: vec![vec![0, 1], vec![1, 1]],
        }
    }

    /// A chain of `k` elements ordered by `rank`, so that the join is the
    /// element of larger rank.
    pub fn chain(rank: &[usize]) -> Self {
        let k = rank.len();
        let join = (0..k)
            .map(|a| (0..k).map(|b| if rank[a] >= rank[b] { a as u32 } else { b as u32 }).collect())
            .collect();
        SemilatticeBimonoid {
            prop: Arc::new(TerminalProp::t()),
            labels: (0..k).map(|i| format!("l{i}")).collect(),
            join,
        }
    }

    pub fn random(rng: &mut Rng) -> Self {
        let k = rng.gen_range(2..=3);
        let mut rank: Vec<usize> = (0..k).collect();
        rank.shuffle(rng);
        Self::chain(&rank)
    }

    pub fn join(&self, a: u32, b: u32) -> u32 {
        self.join[a as usize][b as usize]
    }
}

impl Algebra for SemilatticeBimonoid {
    fn prop(&self) -> &PropRef {
        &self.prop
    }

    fn labels(&self, c: &Color) -> Vec<String> {
        if self.prop.has_color(c) {
            self.labels.clone()
        } else {
            vec![]
        }
    }

    fn act(&self, x: &Element, args: &[u32]) -> Result<Vec<u32>> {
        if !self.prop.contains(x) {
            return Err(Error::NotMember {
                prop: self.prop.id().to_string(),
                detail: format!("{x:?}"),
            });
        }
        let j = args[1..].iter().fold(args[0], |acc, &b| self.join(acc, b));
        Ok(vec![j; x.out.len()])
    }
}

/// An algebra given by explicit tables on a finite support of elements.
#[derive(Clone)]
pub struct TableAlgebra {
    prop: PropRef,
    carrier: BTreeMap<Color, Vec<String>>,
    /// Output tuples in mixed-radix order of the input tuples.
    tables: HashMap<Element, Vec<Vec<u32>>>,
}

impl TableAlgebra {
    pub fn new(prop: PropRef, carrier: BTreeMap<Color, Vec<String>>) -> Self {
        TableAlgebra {
            prop,
            carrier,
            tables: HashMap::new(),
        }
    }

    /// Tabulates `a` on the given elements.
    pub fn tabulate(a: &dyn Algebra, colors: &[Color], support: &[Element]) -> Result<Self> {
        let carrier = colors.iter().map(|c| (c.clone(), a.labels(c))).collect();
        let mut t = TableAlgebra::new(a.prop().clone(), carrier);
        for x in support {
            let rows = tuples(&sizes(a, &x.inp))
                .iter()
                .map(|args| a.act(x, args))
                .collect::<Result<Vec<_>>>()?;
            t.tables.insert(x.clone(), rows);
        }
        Ok(t)
    }

    pub fn insert(&mut self, x: Element, rows: Vec<Vec<u32>>) -> Result<()> {
        let n: usize = sizes(self, &x.inp).iter().product();
        if rows.len() != n {
            return Err(Error::invalid(format!("{x:?} needs {n} rows, found {}", rows.len())));
        }
        let outs = sizes(self, &x.out);
        for r in &rows {
            if r.len() != outs.len() || r.iter().zip(&outs).any(|(&v, &s)| v as usize >= s) {
                return Err(Error::invalid(format!("row {r:?} is outside the carrier of {:?}", x.out)));
            }
        }
        self.tables.insert(x, rows);
        Ok(())
    }

    pub fn support(&self) -> Vec<Element> {
        let mut v: Vec<Element> = self.tables.keys().cloned().collect();
        v.sort();
        v
    }

    pub fn table(&self, x: &Element) -> Option<&[Vec<u32>]> {
        self.tables.get(x).map(|v| v.as_slice())
    }

    pub fn colors(&self) -> Vec<Color> {
        self.carrier.keys().cloned().collect()
    }

    pub fn carrier(&self) -> &BTreeMap<Color, Vec<String>> {
        &self.carrier
    }
}

impl Algebra for TableAlgebra {
    fn prop(&self) -> &PropRef {
        &self.prop
    }

    fn labels(&self, c: &Color) -> Vec<String> {
        self.carrier.get(c).cloned().unwrap_or_default()
    }

    fn act(&self, x: &Element, args: &[u32]) -> Result<Vec<u32>> {
        let rows = self
            .tables
            .get(x)
            .ok_or_else(|| Error::Unsupported(format!("{x:?} is outside the tabulated support")))?;
        Ok(rows[tuple_index(&sizes(self, &x.inp), args)?].clone())
    }
}

/// Two algebras agree on every row of every element of `support`.
pub fn same_tables(a: &dyn Algebra, b: &dyn Algebra, support: &[Element]) -> Result<bool> {
    for x in support {
        if sizes(a, &x.inp) != sizes(b, &x.inp) || sizes(a, &x.out) != sizes(b, &x.out) {
            return Ok(false);
        }
        for args in tuples(&sizes(a, &x.inp)) {
            if a.act(x, &args)? != b.act(x, &args)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub const ALGEBRA_LAWS: [&str; 4] = ["unit", "vcomp", "hcomp", "biact"];

/// Checks that `λ` respects the PROP structure on `support`. Composites
/// outside the support are skipped.
pub fn check_algebra_laws(a: &dyn Algebra, support: &[Element]) -> Result<LawReport> {
    let p = a.prop().clone();
    let mut t = Tally::with_laws(&ALGEBRA_LAWS);
    let act = |x: &Element, args: &[u32]| a.act(x, args);
    for x in support {
        let ins = tuples(&sizes(a, &x.inp));
        if x.out == x.inp {
            if let Ok(u) = p.unit(&x.inp) {
                if u == *x {
                    for args in &ins {
                        t.record("unit", act(x, args), Ok(args.clone()), || format!("unit {x:?} on {args:?}"));
                    }
                }
            }
        }
        for s in Perm::all(x.out.len()).into_iter().take(6) {
            for tau in Perm::all(x.inp.len()).into_iter().take(6) {
                let Ok(y) = p.biact(&s, x, &tau) else { continue };
                for args in tuples(&sizes(a, &y.inp)) {
                    let lhs = act(&y, &args);
                    let rhs = tau.act_left(&args).and_then(|b| act(x, &b)).and_then(|v| s.act_left(&v));
                    t.record("biact", lhs, rhs, || format!("x = {x:?}, σ = {s:?}, τ = {tau:?}, args = {args:?}"));
                }
            }
        }
        for y in support {
            if x.inp == y.out {
                if let Ok(xy) = p.vcomp(x, y) {
                    for args in tuples(&sizes(a, &y.inp)) {
                        let lhs = act(&xy, &args);
                        let rhs = act(y, &args).and_then(|m| act(x, &m));
                        t.record("vcomp", lhs, rhs, || format!("x = {x:?}, y = {y:?}, args = {args:?}"));
                    }
                }
            }
            if let Ok(xy) = p.hcomp(x, y) {
                for args in tuples(&sizes(a, &xy.inp)) {
                    let (l, r) = args.split_at(x.inp.len());
                    let lhs = act(&xy, &args);
                    let rhs = act(x, l).and_then(|mut u| {
                        u.extend(act(y, r)?);
                        Ok(u)
                    });
                    t.record("hcomp", lhs, rhs, || format!("x = {x:?}, y = {y:?}, args = {args:?}"));
                }
            }
        }
    }
    Ok(t.into_named_report(format!("algebra over {}", p.id()), format!("{} support elements", support.len())))
}

/// A color-indexed family of maps between carriers.
pub type CarrierMap = BTreeMap<Color, Vec<u32>>;

fn map_tuple(f: &CarrierMap, p: &Profile, v: &[u32]) -> Result<Vec<u32>> {
    p.colors()
        .iter()
        .zip(v)
        .map(|(c, &a)| {
            f.get(c)
                .and_then(|m| m.get(a as usize).copied())
                .ok_or_else(|| Error::invalid(format!("map undefined at {a} of color {c:?}")))
        })
        .collect()
}

pub const MORPHISM_LAWS: [&str; 1] = ["λ square"];

/// Checks `f_d ∘ λ_A(x, -) = λ_B(x, f_c(-))` on every row of `support`.
pub fn check_algebra_morphism(f: &CarrierMap, a: &dyn Algebra, b: &dyn Algebra, support: &[Element]) -> Result<LawReport> {
    let mut t = Tally::with_laws(&MORPHISM_LAWS);
    for x in support {
        for args in tuples(&sizes(a, &x.inp)) {
            let lhs = a.act(x, &args).and_then(|v| map_tuple(f, &x.out, &v));
            let rhs = map_tuple(f, &x.inp, &args).and_then(|w| b.act(x, &w));
            t.record("λ square", lhs, rhs, || format!("x = {x:?}, args = {args:?}"));
        }
    }
    Ok(t.into_named_report(
        format!("algebra map over {}", a.prop().id()),
        format!("{} support elements", support.len()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn or_bimonoid_acts_by_join_then_copy() {
        let a = SemilatticeBimonoid::bool_or();
        let t = TerminalProp::t();
        assert_eq!(algebra_act(&a, &t.arity(1, 2), &[0, 1]).unwrap(), vec![1]);
        assert_eq!(algebra_act(&a, &t.arity(2, 1), &[1]).unwrap(), vec![1, 1]);
        assert_eq!(algebra_act(&a, &t.arity(1, 3), &[0, 0, 1]).unwrap(), vec![1]);
        assert!(algebra_act(&a, &t.arity(1, 2), &[0, 2]).is_err());
    }
}
