use std::sync::Arc;

use rand::SeedableRng;

use propertopic::presheaf::{phi_extract, psi_build};
use propertopic::prop::algebra::{check_algebra_laws, Algebra, SemilatticeBimonoid, TableAlgebra};
use propertopic::prop::builtin::{tuples, TerminalProp};
use propertopic::prop::Rng;
use propertopic::propertope::{Tower, Universe, UniverseSpec};
use propertopic::{Color, Element};

fn tp() -> TerminalProp {
    TerminalProp::t()
}

fn support(k: usize) -> Vec<Element> {
    let mut v = vec![];
    for m in 1..=k {
        for n in 1..=k {
            v.push(tp().arity(m, n));
        }
    }
    v
}

fn tabulate(a: &dyn Algebra) -> TableAlgebra {
    TableAlgebra::tabulate(a, &[Color::atom("*")], &support(4)).unwrap()
}

fn fixtures() -> Vec<(String, SemilatticeBimonoid)> {
    let mut rng = Rng::seed_from_u64(5);
    vec![
        ("bool-or".into(), SemilatticeBimonoid::bool_or()),
        ("random-1".into(), SemilatticeBimonoid::random(&mut rng)),
        ("random-2".into(), SemilatticeBimonoid::random(&mut rng)),
    ]
}

/// `Δ^{m-1}∘μ^{n-1}` read off the tables of `μ = λ(T(1,2))` and
/// `Δ = λ(T(2,1))`, left-nested.
fn from_mu_and_delta(a: &dyn Algebra, m: usize, args: &[u32]) -> Vec<u32> {
    let mu = |x: u32, y: u32| a.act(&tp().arity(1, 2), &[x, y]).unwrap()[0];
    let delta = |x: u32| a.act(&tp().arity(2, 1), &[x]).unwrap();
    let mut v = args[1..].iter().fold(args[0], |acc, &b| mu(acc, b));
    let mut outs = vec![];
    for _ in 1..m {
        let d = delta(v);
        outs.push(d[0]);
        v = d[1];
    }
    outs.push(v);
    outs
}

fn mismatches(a: &dyn Algebra) -> Vec<(usize, usize, Vec<u32>)> {
    let k = a.size(&Color::atom("*"));
    let mut bad = vec![];
    for m in 1..=4 {
        for n in 1..=4 {
            for args in tuples(&vec![k; n]) {
                if a.act(&tp().arity(m, n), &args).unwrap() != from_mu_and_delta(a, m, &args) {
                    bad.push((m, n, args));
                }
            }
        }
    }
    bad
}

fn failing_laws(a: &dyn Algebra) -> Vec<String> {
    let r = check_algebra_laws(a, &support(3)).unwrap();
    r.laws.iter().filter(|l| l.failures > 0).map(|l| l.law.clone()).collect()
}

/// `T(2,2)` is both `1₂` and `T(1,1)⊗T(1,1)`, while the action copies the
/// join, so only the unit and horizontal laws can fail.
#[test]
fn tabulated_fixtures_respect_composition_and_permutations() {
    for (name, a) in fixtures() {
        assert_eq!(failing_laws(&tabulate(&a)), ["unit", "hcomp"], "{name}");
    }
}

#[test]
fn a_one_point_carrier_satisfies_every_law() {
    let a = SemilatticeBimonoid::chain(&[0]);
    assert!(failing_laws(&tabulate(&a)).is_empty());
}

#[test]
fn actions_factor_through_mu_and_delta() {
    for (name, a) in fixtures() {
        assert!(mismatches(&tabulate(&a)).is_empty(), "{name}");
    }
}

#[test]
fn extracted_actions_factor_through_mu_and_delta() {
    let tower = Tower::new(Arc::new(tp()), 1);
    let spec = UniverseSpec {
        dim: 1,
        max_arity: 4,
        ..UniverseSpec::default()
    };
    let u = Universe::generate(&tower, &spec).unwrap();
    for (name, a) in fixtures() {
        let x = psi_build(&a, &tower, &u, 0, 1).unwrap();
        let b = phi_extract(&x, &tower, 0).unwrap();
        assert!(mismatches(&b).is_empty(), "{name}");
    }
}

#[test]
fn corrupted_tables_are_detected() {
    let a = SemilatticeBimonoid::bool_or();
    let mut t = tabulate(&a);
    let x = tp().arity(2, 2);
    let mut rows = t.table(&x).unwrap().to_vec();
    rows[1] = vec![0, 1];
    t.insert(x, rows).unwrap();
    assert!(failing_laws(&t).contains(&"vcomp".to_string()));
    let bad = mismatches(&t);
    assert_eq!(bad, vec![(2, 2, vec![0, 1])]);
}

#[test]
fn rows_outside_the_carrier_are_rejected() {
    let mut t = tabulate(&SemilatticeBimonoid::bool_or());
    let x = tp().arity(1, 1);
    assert!(t.insert(x.clone(), vec![vec![0], vec![2]]).is_err());
    assert!(t.insert(x, vec![vec![0]]).is_err());
}
