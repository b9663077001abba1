use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng as _, SeedableRng};

use propertopic::prop::algebra::{algebra_act, AlgebraRef};
use propertopic::prop::builtin::{EndoProp, InitialProp, TerminalProp};
use propertopic::prop::fixtures::{Monoid, TensorAlgebraProp, WeightedProp};
use propertopic::prop::laws::{elements_up_to, LawReport};
use propertopic::prop::operad::{operad_to_prop, TerminalOperad};
use propertopic::prop::{PropImpl, PropRef, Rng};
use propertopic::slice::fibration::{
    check_differential_of_integral, check_integral_of_differential, check_prop_map, differentiate, PropMap,
};
use propertopic::slice::{validate_slice_element, SliceProp};
use propertopic::{Color, Element, Perm, Profile};

fn random_element(p: &dyn PropImpl, rng: &mut Rng, out: usize, inp: usize) -> Element {
    let c = p.sample_colors()[0].clone();
    let all = p
        .enumerate(&Profile::uniform(&c, out).unwrap(), &Profile::uniform(&c, inp).unwrap())
        .unwrap();
    all.choose(rng).unwrap().clone()
}

fn chain_identity_holds(base: PropRef, seed: u64) {
    let s = SliceProp::new(base.clone());
    let mut rng = Rng::seed_from_u64(seed);
    for _ in 0..20 {
        let k: Vec<usize> = (0..4).map(|_| rng.gen_range(1..=2)).collect();
        let alpha = random_element(base.as_ref(), &mut rng, k[1], k[0]);
        let beta = random_element(base.as_ref(), &mut rng, k[2], k[1]);
        let gamma = random_element(base.as_ref(), &mut rng, k[3], k[2]);
        let ba = base.vcomp(&beta, &alpha).unwrap();
        let outer = s.circ(&gamma, &ba).unwrap();
        let unit = s.unit_color(&Color::Elem(Arc::new(gamma.clone()))).unwrap();
        let inner = s.hcomp(&unit, &s.circ(&beta, &alpha).unwrap()).unwrap();
        let lhs = s.vcomp(&outer, &inner).unwrap();
        let rhs = s.chain(&[gamma, beta, alpha]).unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn substituting_a_circ_into_a_circ_gives_the_chain_over_terminal() {
    chain_identity_holds(Arc::new(TerminalProp::t()), 1);
}

#[test]
fn substituting_a_circ_into_a_circ_gives_the_chain_over_bool() {
    chain_identity_holds(Arc::new(EndoProp::bool()), 2);
}

#[test]
fn declared_outputs_must_match_the_evaluation() {
    let t = TerminalProp::t();
    let s = SliceProp::new(Arc::new(TerminalProp::t()));
    let a = t.arity(1, 2);
    let good = s.unit_of(&a);
    assert!(validate_slice_element(&s, &good).ok());
    let wrong = Profile::single(Color::Elem(Arc::new(t.arity(2, 2))));
    let body = s.body(&good).unwrap().clone();
    let r = s.declare(wrong, good.inp.clone(), body.graphs, body.positions);
    assert!(r.is_err());
}

#[test]
fn twisted_units_evaluate_to_the_acted_element() {
    let e = EndoProp::bool();
    let s = SliceProp::new(Arc::new(EndoProp::bool()));
    let mut rng = Rng::seed_from_u64(3);
    let a = random_element(&e, &mut rng, 2, 2);
    let sigma = Perm::transposition(2, 0, 1);
    let tau = Perm::identity(2);
    let x = s.twisted_unit(&sigma, &a, &tau).unwrap();
    let expected = e.biact(&sigma, &a, &tau).unwrap();
    assert_eq!(x.out.get(0), &Color::Elem(Arc::new(expected)));
    assert!(validate_slice_element(&s, &x).ok());
}

fn assert_passes(r: &LawReport) {
    assert!(r.passed(), "{} failed: {:#?}", r.prop, r.laws);
    for l in &r.laws {
        assert!(l.checked > 0, "{} checked no instance of {}", r.prop, l.law);
    }
}

/// Units, tensors, circs and twisted units over `support`.
fn slice_support(s: &SliceProp, support: &[Element]) -> Vec<Element> {
    let base = s.base();
    let mut v = vec![];
    for a in support {
        v.push(s.unit_of(a));
        let sigma = Perm::all(a.out.len()).pop().unwrap();
        let tau = Perm::all(a.inp.len()).pop().unwrap();
        v.push(s.twisted_unit(&sigma, a, &tau).unwrap());
        for b in support {
            if v.len() < 60 {
                v.push(s.tensor(a, b).unwrap());
            }
            if a.inp == b.out && base.vcomp(a, b).is_ok() {
                v.push(s.circ(a, b).unwrap());
            }
        }
    }
    v
}

fn round_trip(f: PropMap, support: &[Element]) {
    let sources: Vec<Element> = support.iter().flat_map(|a| f.fiber(a).unwrap()).take(80).collect();
    assert_passes(&check_prop_map(&f, &sources).unwrap());
    assert_passes(&check_integral_of_differential(&f, support).unwrap());
    let alg: AlgebraRef = Arc::new(differentiate(&f));
    let s = SliceProp::new(f.target.clone());
    let small: Vec<Element> = support.iter().filter(|a| f.fiber(a).unwrap().len() <= 16).cloned().collect();
    let sup = slice_support(&s, &small);
    assert_passes(&check_differential_of_integral(alg, f.target.clone(), &sup).unwrap());
}

fn t_support(k: usize) -> Vec<Element> {
    elements_up_to(&TerminalProp::t(), k).unwrap()
}

fn i_support(k: usize) -> Vec<Element> {
    let i = InitialProp::default();
    (1..=k).map(|n| i.point(n)).collect()
}

fn weighted(m: Monoid) -> PropMap {
    let w = Arc::new(WeightedProp::new(Arc::new(TerminalProp::t()), m));
    let w2 = w.clone();
    PropMap::new(w, Arc::new(TerminalProp::t()), move |x| w2.project(x))
}

fn words(m: Monoid) -> PropMap {
    let w = Arc::new(TensorAlgebraProp::new(m));
    let w2 = w.clone();
    PropMap::new(w, Arc::new(InitialProp::default()), move |x| w2.project(x))
}

#[test]
fn round_trip_identity_of_terminal() {
    round_trip(PropMap::identity(Arc::new(TerminalProp::t())), &t_support(2));
}

#[test]
fn round_trip_identity_of_initial() {
    round_trip(PropMap::identity(Arc::new(InitialProp::default())), &i_support(3));
}

#[test]
fn round_trip_cyclic_two_weights() {
    round_trip(weighted(Monoid::Cyclic(2)), &t_support(2));
}

#[test]
fn round_trip_cyclic_three_weights() {
    round_trip(weighted(Monoid::Cyclic(3)), &t_support(2));
}

#[test]
fn round_trip_max_weights() {
    round_trip(weighted(Monoid::Max(3)), &t_support(2));
}

#[test]
fn round_trip_bool_endomorphisms_over_terminal() {
    let t = Arc::new(TerminalProp::colored(&["c"]).unwrap());
    let t2 = t.clone();
    let f = PropMap::new(Arc::new(EndoProp::bool()), t, move |x| Ok(t2.point(x.out.clone(), x.inp.clone())));
    let support: Vec<Element> = elements_up_to(f.target.as_ref(), 2)
        .unwrap()
        .into_iter()
        .filter(|x| x.out.len() + x.inp.len() <= 3 || (x.out.len(), x.inp.len()) == (2, 2))
        .collect();
    round_trip(f, &support);
}

#[test]
fn round_trip_terminal_operad_over_terminal() {
    let o = Arc::new(operad_to_prop(Arc::new(TerminalOperad::new(&["*"], 4))));
    let t = TerminalProp::t();
    let f = PropMap::new(o, Arc::new(TerminalProp::t()), move |x| Ok(t.point(x.out.clone(), x.inp.clone())));
    round_trip(f, &t_support(2));
}

#[test]
fn round_trip_and_words_over_initial() {
    round_trip(words(Monoid::And), &i_support(3));
}

#[test]
fn round_trip_cyclic_words_over_initial() {
    round_trip(words(Monoid::Cyclic(3)), &i_support(2));
}

#[test]
fn round_trip_initial_into_terminal() {
    let t = TerminalProp::t();
    let f = PropMap::new(Arc::new(InitialProp::default()), Arc::new(TerminalProp::t()), move |x| {
        Ok(t.arity(x.out.len(), x.inp.len()))
    });
    round_trip(f, &t_support(2));
}

#[test]
fn non_maps_are_caught() {
    let w = Arc::new(WeightedProp::new(Arc::new(TerminalProp::t()), Monoid::Cyclic(2)));
    let w2 = w.clone();
    let twist = PropMap::new(w.clone(), w, move |x| {
        let (b, k) = w2.split(x)?;
        Ok(w2.weighted(b.clone(), if x.inp.len() == 1 { 1 - k } else { k }))
    });
    let support: Vec<Element> = t_support(2)
        .into_iter()
        .map(|x| WeightedProp::new(Arc::new(TerminalProp::t()), Monoid::Cyclic(2)).weighted(x, 0))
        .collect();
    assert!(!check_prop_map(&twist, &support).unwrap().passed());
}

fn words_over(k: usize, m: Monoid) -> Vec<Vec<u32>> {
    propertopic::prop::builtin::tuples(&vec![m.size() as usize; k])
}

/// `(x₁⊗y₁)∘(x₂⊗y₂) = (x₁∘x₂)⊗(y₁∘y₂)` in `∂(Words → I)`, with `∘` the
/// action of `G_{n∘n}` and `⊗` that of `G_{n⊗m}`.
fn interchange_holds(m: Monoid, max_len: usize) -> usize {
    let f = words(m);
    let d = differentiate(&f);
    let s = SliceProp::new(f.target.clone());
    let i = InitialProp::default();
    let mut checked = 0;
    for a in 1..=max_len {
        for b in 1..=max_len {
            let (pa, pb) = (i.point(a), i.point(b));
            let pab = i.point(a + b);
            let ca = s.circ(&pa, &pa).unwrap();
            let cb = s.circ(&pb, &pb).unwrap();
            let cab = s.circ(&pab, &pab).unwrap();
            let tensor = s.tensor(&pa, &pb).unwrap();
            let tensor_args = |x: u32, y: u32| algebra_act(&d, &tensor, &[x, y]).unwrap()[0];
            let circ_a = |x: u32, y: u32| algebra_act(&d, &ca, &[x, y]).unwrap()[0];
            let circ_b = |x: u32, y: u32| algebra_act(&d, &cb, &[x, y]).unwrap()[0];
            let circ_ab = |x: u32, y: u32| algebra_act(&d, &cab, &[x, y]).unwrap()[0];
            let na = words_over(a, m).len() as u32;
            let nb = words_over(b, m).len() as u32;
            for x1 in 0..na {
                for x2 in 0..na {
                    for y1 in 0..nb {
                        for y2 in 0..nb {
                            let lhs = circ_ab(tensor_args(x1, y1), tensor_args(x2, y2));
                            let rhs = tensor_args(circ_a(x1, x2), circ_b(y1, y2));
                            assert_eq!(lhs, rhs, "{m:?}: a = {a}, b = {b}, x = ({x1}, {x2}), y = ({y1}, {y2})");
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    checked
}

#[test]
fn words_satisfy_the_interchange_identity() {
    assert!(interchange_holds(Monoid::And, 2) > 0);
    assert!(interchange_holds(Monoid::Cyclic(3), 2) > 0);
}

#[test]
fn words_multiply_letterwise_and_concatenate() {
    let f = words(Monoid::Cyclic(3));
    let d = differentiate(&f);
    let s = SliceProp::new(f.target.clone());
    let i = InitialProp::default();
    let w = TensorAlgebraProp::new(Monoid::Cyclic(3));
    let fib1 = d.fiber(&i.point(1)).unwrap();
    let fib2 = d.fiber(&i.point(2)).unwrap();
    let idx = |fib: &[Element], letters: &[u32]| fib.iter().position(|q| w.letters(q).unwrap() == letters).unwrap() as u32;
    let t = s.tensor(&i.point(1), &i.point(1)).unwrap();
    let r = algebra_act(&d, &t, &[idx(&fib1, &[1]), idx(&fib1, &[2])]).unwrap();
    assert_eq!(r, vec![idx(&fib2, &[1, 2])]);
    let c = s.circ(&i.point(2), &i.point(2)).unwrap();
    let r = algebra_act(&d, &c, &[idx(&fib2, &[1, 2]), idx(&fib2, &[1, 2])]).unwrap();
    assert_eq!(r, vec![idx(&fib2, &[2, 1])]);
}
