use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use serde_json::{json, Value};

use propertopic::json::element_to_json;
use propertopic::perm::Perm;
use propertopic::prop::builtin::{EndoProp, TerminalProp};
use propertopic::prop::{PropImpl, PropRef, Rng};
use propertopic::propertope::{
    chain_compose, chain_equal, decode_metagraph, encode_metagraph, iterated, random_propertope, relations_at, Chain, Dir, Face, Family,
    Metagraph, Propertope, Tower, Universe, UniverseSpec, Verdict,
};
use propertopic::slice::SliceProp;
use propertopic::{Element, Error};

fn t() -> PropRef {
    Arc::new(TerminalProp::t())
}

fn tp() -> TerminalProp {
    TerminalProp::t()
}

/// The dim-3 "rocket" `G′ = G_{G_{γ∘(β∘α)} ∘ (1_γ ⊗ G_{β∘α})}` over `T`.
fn rocket(tower: &Tower) -> (Element, [Element; 3]) {
    let (a, b, c) = (tp().arity(4, 1), tp().arity(2, 4), tp().arity(3, 2));
    let s1 = tower.slice(1).unwrap();
    let s2 = tower.slice(2).unwrap();
    let ba = tp().arity(2, 1);
    let top = s1.circ(&c, &ba).unwrap();
    let bottom = s1.hcomp(&s1.unit_of(&c), &s1.circ(&b, &a).unwrap()).unwrap();
    (s2.circ(&top, &bottom).unwrap(), [a, b, c])
}

#[test]
fn iterated_zero_is_the_base() {
    assert_eq!(iterated(t(), 0).id().as_ref(), "T");
    assert_eq!(iterated(t(), 2).id().as_ref(), "T++");
}

#[test]
fn rocket_validates_and_evaluates_to_the_triple_chain() {
    let tower = Tower::new(t(), 2);
    let (g, [a, b, c]) = rocket(&tower);
    assert!(tower.contains(&Propertope::of(3, &g)));
    let s1 = tower.slice(1).unwrap();
    let chain = s1.chain(&[c, b, a]).unwrap();
    assert_eq!(g.out.get(0).as_elem().unwrap().as_ref(), &chain);
}

fn bare(inputs: usize, vertices: Value, outputs: Value) -> Value {
    json!({"inputs": inputs, "vertices": vertices, "outputs": outputs})
}

#[test]
fn rocket_encodes_to_the_worked_metagraph() {
    let tower = Tower::new(t(), 2);
    let (g, [a, b, c]) = rocket(&tower);
    let ba = tp().arity(2, 1);
    let level1 = json!([
        element_to_json(&c),
        element_to_json(&ba),
        element_to_json(&c),
        element_to_json(&b),
        element_to_json(&a)
    ]);
    let g_c_ba = bare(
        1,
        json!([{"position": 1, "in": [[2, 1], [2, 2]], "outs": 3}, {"position": 2, "in": [[0, 1]], "outs": 2}]),
        json!([[1, 1], [1, 2], [1, 3]]),
    );
    let unit_c = bare(
        2,
        json!([{"position": 1, "in": [[0, 1], [0, 2]], "outs": 3}]),
        json!([[1, 1], [1, 2], [1, 3]]),
    );
    let g_b_a = bare(
        1,
        json!([{"position": 2, "in": [[2, 1], [2, 2], [2, 3], [2, 4]], "outs": 2}, {"position": 3, "in": [[0, 1]], "outs": 4}]),
        json!([[1, 1], [1, 2]]),
    );
    let top = bare(
        3,
        json!([{"position": 1, "in": [[2, 1], [2, 2]], "outs": 1}, {"position": 2, "in": [[0, 1], [0, 2], [0, 3]], "outs": 2}]),
        json!([[1, 1]]),
    );
    let expected = json!({"dim": 3, "levels": [level1, [[g_c_ba], [unit_c, g_b_a]], [[top]]]});
    let m = encode_metagraph(&Propertope::of(3, &g)).unwrap();
    assert_eq!(m.to_json(), expected);
    let back = decode_metagraph(&Metagraph::from_json(&expected).unwrap(), &tower).unwrap();
    assert_eq!(back, Propertope::of(3, &g));
}

#[test]
fn dimension_one_is_a_single_level_entry() {
    let x = tp().arity(2, 3);
    let m = encode_metagraph(&Propertope::of(1, &x)).unwrap();
    assert_eq!(m.levels, vec![json!([element_to_json(&x)])]);
}

#[test]
fn random_propertopes_round_trip_byte_exactly() {
    let tower = Tower::new(t(), 2);
    let mut rng = Rng::seed_from_u64(11);
    for k in 0..100 {
        let g = random_propertope(&tower, &mut rng, k % 4).unwrap();
        let text = encode_metagraph(&g).unwrap().to_canonical_string();
        let v: Value = serde_json::from_str(&text).unwrap();
        let back = decode_metagraph(&Metagraph::from_json(&v).unwrap(), &tower).unwrap();
        assert_eq!(back, g);
        assert_eq!(encode_metagraph(&back).unwrap().to_canonical_string(), text);
    }
}

#[test]
fn truncated_metagraph_is_rejected_with_a_position() {
    let tower = Tower::new(t(), 2);
    let (g, _) = rocket(&tower);
    let mut v = encode_metagraph(&Propertope::of(3, &g)).unwrap().to_json();
    v["levels"][0].as_array_mut().unwrap().pop();
    let err = decode_metagraph(&Metagraph::from_json(&v).unwrap(), &tower).unwrap_err();
    match err {
        Error::Parse { at, .. } => assert_eq!(at, "levels[1][1]"),
        e => panic!("unexpected {e:?}"),
    }
}

#[test]
fn unit_and_tensor_faces() {
    let s = SliceProp::new(t());
    let a = tp().arity(2, 1);
    let b = tp().arity(1, 2);
    let u = Propertope::of(2, &s.unit_of(&a));
    let fs = u.faces();
    assert_eq!(fs.len(), 2);
    assert!(fs.iter().all(|f| f.target == Propertope::of(1, &a)));
    let ab = s.tensor(&a, &b).unwrap();
    let fs = Propertope::of(2, &ab).faces();
    let targets: Vec<_> = fs.iter().map(|f| f.target.clone()).collect();
    assert_eq!(
        targets,
        vec![Propertope::of(1, &a), Propertope::of(1, &b), Propertope::of(1, &tp().arity(3, 3))]
    );
}

#[test]
fn face_counts_match_profiles() {
    let tower = Tower::new(t(), 2);
    let mut rng = Rng::seed_from_u64(5);
    for k in 0..50 {
        let g = random_propertope(&tower, &mut rng, 1 + k % 3).unwrap();
        let x = g.elem().unwrap();
        let fs = g.faces();
        assert_eq!(fs.len(), x.inp.len() + x.out.len());
        for f in fs {
            let p = if f.face.dir == Dir::In { &x.inp } else { &x.out };
            assert_eq!(&f.target.color, p.get(f.face.index));
        }
    }
}

#[test]
fn chains_compose_with_identities() {
    let s = SliceProp::new(t());
    let g = Propertope::of(2, &s.circ(&tp().arity(1, 2), &tp().arity(2, 1)).unwrap());
    let c = Chain::new(g.clone(), vec![Face::inp(0)]).unwrap();
    let d = Chain::new(c.target().unwrap(), vec![Face::out(0)]).unwrap();
    assert_eq!(chain_compose(&Chain::identity(g.clone()), &c).unwrap(), c);
    assert_eq!(chain_compose(&c, &Chain::identity(c.target().unwrap())).unwrap(), c);
    assert_eq!(chain_compose(&c, &d).unwrap().steps.len(), 2);
    assert!(chain_compose(&d, &c).is_err());
}

fn equal(base: &dyn PropImpl, g: &Propertope, lhs: Vec<Face>, rhs: Vec<Face>) -> Verdict {
    chain_equal(base, &Chain::new(g.clone(), lhs).unwrap(), &Chain::new(g.clone(), rhs).unwrap(), 6).unwrap()
}

fn special_squares(base: PropRef, a: &Element, b: &Element) {
    let s = SliceProp::new(base.clone());
    let p = base.as_ref();
    let ten = Propertope::of(2, &s.tensor(a, b).unwrap());
    for i in 0..a.inp.len() {
        assert_eq!(
            equal(p, &ten, vec![Face::inp(0), Face::inp(i)], vec![Face::out(0), Face::inp(i)]),
            Verdict::Equal
        );
    }
    for k in 0..b.inp.len() {
        let na = a.inp.len();
        assert_eq!(
            equal(p, &ten, vec![Face::inp(1), Face::inp(k)], vec![Face::out(0), Face::inp(na + k)]),
            Verdict::Equal
        );
    }
    assert_eq!(
        equal(p, &ten, vec![Face::inp(0), Face::inp(0)], vec![Face::inp(1), Face::inp(0)]),
        Verdict::Distinct
    );

    let c = base.unit(&a.inp).unwrap();
    let circ = Propertope::of(2, &s.circ(a, &c).unwrap());
    for j in 0..a.out.len() {
        assert_eq!(
            equal(p, &circ, vec![Face::inp(0), Face::out(j)], vec![Face::out(0), Face::out(j)]),
            Verdict::Equal
        );
    }
    for i in 0..c.inp.len() {
        assert_eq!(
            equal(p, &circ, vec![Face::inp(1), Face::inp(i)], vec![Face::out(0), Face::inp(i)]),
            Verdict::Equal
        );
    }

    let units = Propertope::of(2, &s.unit_of(a));
    assert_eq!(equal(p, &units, vec![Face::inp(0)], vec![Face::out(0)]), Verdict::Equal);
    let pair = Propertope::of(2, &s.hcomp(&s.unit_of(a), &s.unit_of(b)).unwrap());
    for i in 0..2 {
        assert_eq!(equal(p, &pair, vec![Face::inp(i)], vec![Face::out(i)]), Verdict::Equal);
    }

    let sigma = Perm::random(a.out.len(), &mut Rng::seed_from_u64(1));
    let sigma = if sigma.is_identity() && a.out.len() > 1 {
        Perm::transposition(a.out.len(), 0, 1)
    } else {
        sigma
    };
    let tau = Perm::identity(a.inp.len());
    if let Ok(tw) = s.twisted_unit(&sigma, a, &tau) {
        let tw = Propertope::of(2, &tw);
        for j in 0..a.out.len() {
            assert_eq!(
                equal(
                    p,
                    &tw,
                    vec![Face::inp(0), Face::out(j)],
                    vec![Face::out(0), Face::out(sigma.apply(j))]
                ),
                Verdict::Equal
            );
        }
    }
}

#[test]
fn special_squares_hold_over_terminal() {
    special_squares(t(), &tp().arity(2, 2), &tp().arity(1, 3));
}

#[test]
fn special_squares_hold_over_bool_endomorphisms() {
    let e = EndoProp::bool();
    let mut rng = Rng::seed_from_u64(9);
    let c = e.sample_colors()[0].clone();
    let out2 = propertopic::Profile::uniform(&c, 2).unwrap();
    let a = e.sample(&mut rng, Some(&out2)).unwrap();
    let b = e.sample(&mut rng, None).unwrap();
    special_squares(Arc::new(e), &a, &b);
}

#[test]
fn every_chain_equals_itself() {
    let tower = Tower::new(t(), 2);
    let mut rng = Rng::seed_from_u64(3);
    for _ in 0..20 {
        let g = random_propertope(&tower, &mut rng, 3).unwrap();
        let c = Chain::new(g.clone(), vec![Face::out(0), Face::inp(0)]).unwrap();
        assert_eq!(chain_equal(tower.base().as_ref(), &c, &c, 6).unwrap(), Verdict::Equal);
    }
}

#[test]
fn relations_cover_all_four_families_in_a_universe() {
    let tower = Tower::new(t(), 2);
    let u = Universe::generate(&tower, &UniverseSpec::default()).unwrap();
    let mut seen = std::collections::BTreeSet::new();
    for g in u.all() {
        for r in relations_at(tower.base().as_ref(), g).unwrap() {
            seen.insert(r.family);
        }
    }
    assert_eq!(
        seen.into_iter().collect::<Vec<_>>(),
        vec![Family::Horizontal, Family::Vertical, Family::Unital, Family::Equivariance]
    );
}

#[test]
fn universes_are_face_closed() {
    let tower = Tower::new(t(), 2);
    let u = Universe::generate(&tower, &UniverseSpec::default()).unwrap();
    assert_eq!(u.dim(), 3);
    for g in u.all() {
        assert!(tower.contains(g), "{g:?}");
        for f in g.faces() {
            assert!(u.contains(&f.target), "{f:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn chain_splicing_is_associative(seed in any::<u64>()) {
        let tower = Tower::new(t(), 2);
        let mut rng = Rng::seed_from_u64(seed);
        let g = random_propertope(&tower, &mut rng, 3).unwrap();
        let a = Chain::new(g.clone(), vec![Face::out(0)]).unwrap();
        let b = Chain::new(a.target().unwrap(), vec![Face::inp(0)]).unwrap();
        let c = Chain::new(b.target().unwrap(), vec![Face::inp(0)]).unwrap();
        let left = chain_compose(&chain_compose(&a, &b).unwrap(), &c).unwrap();
        let right = chain_compose(&a, &chain_compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }
}
