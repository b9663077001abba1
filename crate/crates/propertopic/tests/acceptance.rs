use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng as _, SeedableRng};
use serde_json::{json, Value};

use propertopic::graph::eval::{decompose_with, evaluate_with, levels_alap, levels_asap, levels_random};
use propertopic::graph::random::random_decorated_graph;
use propertopic::graph::{evaluate, validate_mn_graph, DecoratedGraph, FreeProp, Graph, Src, Vertex, Violation};
use propertopic::json::element_to_json;
use propertopic::presheaf::{check_weak_n, phi_extract, psi_build, pullback, underlying_category, validate_presheaf, PtSet};
use propertopic::prop::algebra::{algebra_act, same_tables, Algebra, AlgebraRef, SemilatticeBimonoid};
use propertopic::prop::builtin::{tuples, EndoProp, InitialProp, TerminalProp};
use propertopic::prop::fixtures::{Monoid, TensorAlgebraProp, WeightedProp};
use propertopic::prop::laws::{check_prop_laws, elements_up_to, LawMode, LawReport};
use propertopic::prop::operad::{operad_to_prop, TerminalOperad};
use propertopic::prop::{PropImpl, PropRef, Rng};
use propertopic::propertope::{
    chain_equal, decode_metagraph, encode_metagraph, random_propertope, Chain, Face, Metagraph, Propertope, Tower, Universe, UniverseSpec,
    Verdict,
};
use propertopic::slice::fibration::{check_differential_of_integral, check_integral_of_differential, check_prop_map};
use propertopic::slice::{differentiate, DiffAlgebra, PropMap, SliceProp};
use propertopic::{Color, Element, Perm, Profile};

type Outcome = Result<Findings, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// What a criterion established, plus the presheaf violations it met.
#[derive(Default)]
struct Findings {
    summary: String,
    violations: Vec<(String, Violation)>,
}

impl Findings {
    fn pass(summary: impl Into<String>) -> Outcome {
        Ok(Findings {
            summary: summary.into(),
            violations: vec![],
        })
    }
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

trait Ctx<T> {
    fn ctx(self, what: &str) -> Result<T, String>;
}

impl<T, E: std::fmt::Display> Ctx<T> for Result<T, E> {
    fn ctx(self, what: &str) -> Result<T, String> {
        self.map_err(|e| format!("{what}: {e}"))
    }
}

fn t() -> PropRef {
    Arc::new(TerminalProp::t())
}

fn tp() -> TerminalProp {
    TerminalProp::t()
}

fn laws_pass(r: &LawReport) -> Result<usize, String> {
    ensure!(
        r.passed(),
        "{}: {:?}",
        r.prop,
        r.laws.iter().filter(|l| l.failures > 0).map(|l| &l.law).collect::<Vec<_>>()
    );
    let checked: usize = r.laws.iter().map(|l| l.checked).sum();
    ensure!(checked > 0, "{} checked nothing", r.prop);
    Ok(checked)
}

fn three_generators() -> FreeProp {
    FreeProp::new(
        "F",
        &["c", "d"],
        &[("f", &["c"], &["c", "c"]), ("g", &["c", "d"], &["c"]), ("h", &["d"], &["d"])],
    )
    .unwrap()
}

fn prop_laws() -> Outcome {
    let exhaustive = |k, h| LawMode::Exhaustive {
        max_arity: k,
        hcomp_arity: h,
    };
    let sampled = LawMode::Sampled { samples: 200, seed: 7 };
    let cases: Vec<(Box<dyn PropImpl>, LawMode)> = vec![
        (Box::new(InitialProp::default()), exhaustive(4, 2)),
        (Box::new(tp()), exhaustive(3, 2)),
        (Box::new(TerminalProp::colored(&["a", "b"]).unwrap()), exhaustive(2, 2)),
        (Box::new(EndoProp::bool()), sampled.clone()),
        (Box::new(three_generators()), sampled.clone()),
        (Box::new(operad_to_prop(Arc::new(TerminalOperad::new(&["*"], 4)))), exhaustive(3, 2)),
        (Box::new(SliceProp::new(t())), sampled.clone()),
        (Box::new(SliceProp::new(Arc::new(EndoProp::bool()))), sampled),
    ];
    let mut total = 0;
    for (p, mode) in &cases {
        total += laws_pass(&check_prop_laws(p.as_ref(), mode).ctx(p.id())?)?;
    }
    Findings::pass(format!("{} PROPs, {total} law instances", cases.len()))
}

fn five_three_prop() -> FreeProp {
    let d = "d";
    FreeProp::new(
        "F53",
        &[d],
        &[
            ("a1", &[d], &[d]),
            ("a2", &[d], &[d, d]),
            ("a3", &[d, d], &[d, d]),
            ("a4", &[d, d], &[d]),
            ("a5", &[d, d], &[d, d]),
            ("a6", &[d, d], &[d]),
            ("a7", &[d, d, d], &[d, d]),
        ],
    )
    .unwrap()
}

fn five_three_graph(p: &FreeProp) -> DecoratedGraph {
    use Src::{In, Port};
    let v = |name: &str, ins: Vec<Src>| {
        let x = p.gen(name).unwrap();
        Vertex {
            outs: x.out.len(),
            ins,
            deco: Arc::new(x),
        }
    };
    Graph {
        n_in: 3,
        vertices: vec![
            v("a1", vec![Port(5, 1)]),
            v("a2", vec![Port(3, 1), Port(4, 1)]),
            v("a3", vec![In(1), In(2)]),
            v("a4", vec![Port(2, 0)]),
            v("a5", vec![Port(2, 1), Port(5, 0)]),
            v("a6", vec![In(0)]),
            v("a7", vec![Port(3, 0), Port(4, 0)]),
        ],
        outputs: vec![Port(6, 2), Port(0, 0), Port(6, 0), Port(1, 0), Port(6, 1)],
    }
}

fn five_three_composite(p: &FreeProp) -> Element {
    let a = |k: usize| p.gen(&format!("a{k}")).unwrap();
    let h = |xs: &[Element]| xs[1..].iter().fold(xs[0].clone(), |acc, x| p.hcomp(&acc, x).unwrap());
    let unit = p.unit_color(&a(1).inp.get(0).clone()).unwrap();
    let tau = Perm::from_one_based(&[1, 3, 2, 4, 5]).unwrap();
    let middle = p.biact(&tau, &h(&[a(4), a(5), a(1)]), &Perm::identity(4)).unwrap();
    let inner = p
        .vcomp(&h(&[a(7), a(2), unit]), &p.vcomp(&middle, &h(&[a(3), a(6)])).unwrap())
        .unwrap();
    let sigma1 = Perm::from_one_based(&[3, 5, 1, 4, 2]).unwrap();
    let sigma2 = Perm::from_one_based(&[2, 3, 1]).unwrap().inverse();
    p.biact(&sigma1, &inner, &sigma2).unwrap()
}

fn evaluation() -> Outcome {
    let p = five_three_prop();
    let g = five_three_graph(&p);
    ensure!(validate_mn_graph(&g).ok(), "the (5,3)-graph is not a valid graph");
    ensure!(
        evaluate(&p, &g).ctx("evaluate")? == five_three_composite(&p),
        "the (5,3)-graph evaluates to something else"
    );

    let q = three_generators();
    let mut rng = Rng::seed_from_u64(11);
    let (mut graphs, mut decompositions) = (0, 0);
    while graphs < 100 {
        let Some(g) = random_decorated_graph(&q, &mut rng, 2 + graphs % 5) else {
            continue;
        };
        let reference = evaluate(&q, &g).ctx("evaluate")?;
        let mut ds = vec![
            decompose_with(&g, &levels_asap(&g).ctx("levels")?, None).ctx("decompose")?,
            decompose_with(&g, &levels_alap(&g).ctx("levels")?, None).ctx("decompose")?,
        ];
        for _ in 0..50 {
            if ds.len() >= 4 {
                break;
            }
            let lv = levels_random(&g, &mut rng).ctx("levels")?;
            let d = decompose_with(&g, &lv, Some(&mut rng)).ctx("decompose")?;
            if !ds.contains(&d) {
                ds.push(d);
            }
        }
        ensure!(ds.len() >= 3, "graph {graphs} has only {} decompositions", ds.len());
        for d in &ds {
            ensure!(
                evaluate_with(&q, &g, d).ctx("evaluate")? == reference,
                "graph {graphs} depends on its decomposition"
            );
        }
        graphs += 1;
        decompositions += ds.len();
    }
    Findings::pass(format!(
        "(5,3)-graph matches; {graphs} random graphs under {decompositions} decompositions"
    ))
}

fn random_element(p: &dyn PropImpl, rng: &mut Rng, out: usize, inp: usize) -> Element {
    let c = p.sample_colors()[0].clone();
    let all = p
        .enumerate(&Profile::uniform(&c, out).unwrap(), &Profile::uniform(&c, inp).unwrap())
        .unwrap();
    all.choose(rng).unwrap().clone()
}

fn slice_identity() -> Outcome {
    let mut checked = 0;
    for (base, seed) in [(t(), 1), (Arc::new(EndoProp::bool()) as PropRef, 2)] {
        let s = SliceProp::new(base.clone());
        let mut rng = Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let k: Vec<usize> = (0..4).map(|_| rng.gen_range(1..=2)).collect();
            let alpha = random_element(base.as_ref(), &mut rng, k[1], k[0]);
            let beta = random_element(base.as_ref(), &mut rng, k[2], k[1]);
            let gamma = random_element(base.as_ref(), &mut rng, k[3], k[2]);
            let ba = base.vcomp(&beta, &alpha).ctx("vcomp")?;
            let outer = s.circ(&gamma, &ba).ctx("circ")?;
            let unit = s.unit_color(&Color::Elem(Arc::new(gamma.clone()))).ctx("unit")?;
            let inner = s.hcomp(&unit, &s.circ(&beta, &alpha).ctx("circ")?).ctx("hcomp")?;
            let lhs = s.vcomp(&outer, &inner).ctx("slice vcomp")?;
            ensure!(
                lhs == s.chain(&[gamma, beta, alpha]).ctx("chain")?,
                "identity fails over {}",
                base.id()
            );
            checked += 1;
        }
    }
    Findings::pass(format!("{checked} triples over T and E_Bool"))
}

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

fn round_trips(f: &PropMap, support: &[Element]) -> Result<(), String> {
    let sources: Vec<Element> = support.iter().flat_map(|a| f.fiber(a).unwrap()).take(80).collect();
    laws_pass(&check_prop_map(f, &sources).ctx("map laws")?)?;
    laws_pass(&check_integral_of_differential(f, support).ctx("integral of differential")?)?;
    let alg: AlgebraRef = Arc::new(differentiate(f));
    let s = SliceProp::new(f.target.clone());
    let small: Vec<Element> = support.iter().filter(|a| f.fiber(a).unwrap().len() <= 16).cloned().collect();
    laws_pass(&check_differential_of_integral(alg, f.target.clone(), &slice_support(&s, &small)).ctx("differential of integral")?)?;
    Ok(())
}

fn weighted(m: Monoid) -> PropMap {
    let w = Arc::new(WeightedProp::new(t(), m));
    let w2 = w.clone();
    PropMap::new(w, t(), move |x| w2.project(x))
}

fn words(m: Monoid) -> PropMap {
    let w = Arc::new(TensorAlgebraProp::new(m));
    let w2 = w.clone();
    PropMap::new(w, Arc::new(InitialProp::default()), move |x| w2.project(x))
}

fn to_terminal(source: PropRef, target: Arc<TerminalProp>) -> PropMap {
    let t2 = target.clone();
    PropMap::new(source, target, move |x| Ok(t2.point(x.out.clone(), x.inp.clone())))
}

fn integral_round_trip() -> Outcome {
    let t2 = elements_up_to(&tp(), 2).unwrap();
    let i = InitialProp::default();
    let i_up_to = |k: usize| (1..=k).map(|n| i.point(n)).collect::<Vec<_>>();
    let tc = Arc::new(TerminalProp::colored(&["c"]).unwrap());
    let tc_support: Vec<Element> = elements_up_to(tc.as_ref(), 2)
        .unwrap()
        .into_iter()
        .filter(|x| x.out.len() + x.inp.len() <= 3 || (x.out.len(), x.inp.len()) == (2, 2))
        .collect();
    let fixtures: Vec<(&str, PropMap, Vec<Element>)> = vec![
        ("id_T", PropMap::identity(t()), t2.clone()),
        ("id_I", PropMap::identity(Arc::new(InitialProp::default())), i_up_to(3)),
        ("T x Z/2", weighted(Monoid::Cyclic(2)), t2.clone()),
        ("T x Z/3", weighted(Monoid::Cyclic(3)), t2.clone()),
        ("T x max3", weighted(Monoid::Max(3)), t2.clone()),
        ("E_Bool -> T_c", to_terminal(Arc::new(EndoProp::bool()), tc), tc_support),
        (
            "operad -> T",
            to_terminal(Arc::new(operad_to_prop(Arc::new(TerminalOperad::new(&["*"], 4)))), Arc::new(tp())),
            t2.clone(),
        ),
        ("Words[and] -> I", words(Monoid::And), i_up_to(3)),
        ("Words[Z/3] -> I", words(Monoid::Cyclic(3)), i_up_to(2)),
        (
            "I -> T",
            PropMap::new(Arc::new(InitialProp::default()), t(), |x| Ok(tp().arity(x.out.len(), x.inp.len()))),
            t2,
        ),
    ];
    for (name, f, support) in &fixtures {
        round_trips(f, support).map_err(|e| format!("{name}: {e}"))?;
    }
    Findings::pass(format!("{} fixtures", fixtures.len()))
}

fn setup() -> (Tower, Universe) {
    let tower = Tower::new(t(), 2);
    let u = Universe::generate(&tower, &UniverseSpec::default()).unwrap();
    (tower, u)
}

fn support_at(u: &Universe, dim: usize) -> Vec<Element> {
    u.at(dim).map(|g| (**g.elem().unwrap()).clone()).collect()
}

fn t_algebras() -> Vec<(&'static str, SemilatticeBimonoid)> {
    let mut rng = Rng::seed_from_u64(5);
    vec![
        ("bool-or", SemilatticeBimonoid::bool_or()),
        ("random-1", SemilatticeBimonoid::random(&mut rng)),
        ("random-2", SemilatticeBimonoid::random(&mut rng)),
    ]
}

fn mu_delta_mismatches(a: &dyn Algebra) -> usize {
    let mu = |x: u32, y: u32| a.act(&tp().arity(1, 2), &[x, y]).unwrap()[0];
    let delta = |x: u32| a.act(&tp().arity(2, 1), &[x]).unwrap();
    let k = a.size(&Color::atom("*"));
    let mut bad = 0;
    for m in 1..=4 {
        for n in 1..=4 {
            for args in tuples(&vec![k; n]) {
                let mut v = args[1..].iter().fold(args[0], |acc, &b| mu(acc, b));
                let mut outs = vec![];
                for _ in 1..m {
                    let d = delta(v);
                    outs.push(d[0]);
                    v = d[1];
                }
                outs.push(v);
                if a.act(&tp().arity(m, n), &args).unwrap() != outs {
                    bad += 1;
                }
            }
        }
    }
    bad
}

fn presheaf_violations(name: &str, x: &PtSet) -> Result<Vec<(String, Violation)>, String> {
    let r = validate_presheaf(x).ctx("validate_presheaf")?;
    Ok(r.violations.into_iter().map(|v| (name.to_string(), v)).collect())
}

fn weak_zero() -> Outcome {
    let (tower, u) = setup();
    let support = support_at(&u, 1);
    let tower1 = Tower::new(t(), 1);
    let u1 = Universe::generate(
        &tower1,
        &UniverseSpec {
            dim: 1,
            max_arity: 4,
            ..UniverseSpec::default()
        },
    )
    .ctx("universe")?;
    let mut found = Findings::default();
    for (name, a) in t_algebras() {
        let x = psi_build(&a, &tower, &u, 0, 3).ctx("psi_build")?;
        let phi = phi_extract(&x, &tower, 0).ctx("phi_extract")?;
        ensure!(same_tables(&phi, &a, &support).ctx("tables")?, "{name}: extracted tables differ");
        let r = check_weak_n(&x, 0, 3).ctx("check_weak_n")?;
        ensure!(r.passed(), "{name}: not weak-0: {:?}", r.failures.first());
        let wide = psi_build(&a, &tower1, &u1, 0, 1).ctx("psi_build")?;
        let phi1 = phi_extract(&wide, &tower1, 0).ctx("phi_extract")?;
        ensure!(mu_delta_mismatches(&phi1) == 0, "{name}: action not determined by mu and delta");
        found.violations.extend(presheaf_violations(name, &x)?);
    }
    found.summary = "tables, weak-0 and mu/delta hold for 3 algebras".into();
    Ok(found)
}

/// `∂(T × ℤ/k)`, an algebra over `T⁺` whose carriers are weights.
fn weights(k: u32) -> DiffAlgebra {
    differentiate(&weighted(Monoid::Cyclic(k)))
}

fn em_weak_one() -> Outcome {
    let (tower, u) = setup();
    let b = weights(2);
    let x = psi_build(&b, &tower, &u, 1, 3).ctx("psi_build")?;
    let r = check_weak_n(&x, 1, 3).ctx("check_weak_n")?;
    ensure!(r.passed(), "not weak-1: {:?}", r.failures.first());
    let phi = phi_extract(&x, &tower, 1).ctx("phi_extract")?;
    ensure!(same_tables(&phi, &b, &support_at(&u, 2)).ctx("tables")?, "extracted tables differ");
    Findings::pass(format!("{} horns, {} boundaries", r.horns_checked, r.boundaries_checked))
}

fn underlying_associativity() -> Outcome {
    let (tower, u) = setup();
    let x = psi_build(&weights(3), &tower, &u, 1, 3).ctx("psi_build")?;
    let cat = underlying_category(&x, &tower, 1).ctx("underlying_category")?;
    let r = cat.check_associativity();
    ensure!(r.uncovered == 0, "{} triples not covered", r.uncovered);
    ensure!(r.failures.is_empty(), "{} triples fail", r.failures.len());
    Findings::pass(format!("{} arrows, {} triples", cat.arrows.len(), r.triples))
}

fn equal(base: &dyn PropImpl, g: &Propertope, lhs: Vec<Face>, rhs: Vec<Face>) -> Result<Verdict, String> {
    let a = Chain::new(g.clone(), lhs).ctx("chain")?;
    let b = Chain::new(g.clone(), rhs).ctx("chain")?;
    chain_equal(base, &a, &b, 6).ctx("chain_equal")
}

fn special_squares(base: PropRef, a: &Element, b: &Element) -> Result<usize, String> {
    let s = SliceProp::new(base.clone());
    let p = base.as_ref();
    let mut squares = vec![];
    let ten = Propertope::of(2, &s.tensor(a, b).ctx("tensor")?);
    for i in 0..a.inp.len() {
        squares.push((ten.clone(), vec![Face::inp(0), Face::inp(i)], vec![Face::out(0), Face::inp(i)]));
    }
    for k in 0..b.inp.len() {
        squares.push((
            ten.clone(),
            vec![Face::inp(1), Face::inp(k)],
            vec![Face::out(0), Face::inp(a.inp.len() + k)],
        ));
    }
    let c = base.unit(&a.inp).ctx("unit")?;
    let circ = Propertope::of(2, &s.circ(a, &c).ctx("circ")?);
    for j in 0..a.out.len() {
        squares.push((circ.clone(), vec![Face::inp(0), Face::out(j)], vec![Face::out(0), Face::out(j)]));
    }
    for i in 0..c.inp.len() {
        squares.push((circ.clone(), vec![Face::inp(1), Face::inp(i)], vec![Face::out(0), Face::inp(i)]));
    }
    squares.push((Propertope::of(2, &s.unit_of(a)), vec![Face::inp(0)], vec![Face::out(0)]));
    let pair = Propertope::of(2, &s.hcomp(&s.unit_of(a), &s.unit_of(b)).ctx("hcomp")?);
    for i in 0..2 {
        squares.push((pair.clone(), vec![Face::inp(i)], vec![Face::out(i)]));
    }
    let sigma = Perm::transposition(a.out.len(), 0, 1);
    let tw = Propertope::of(2, &s.twisted_unit(&sigma, a, &Perm::identity(a.inp.len())).ctx("twisted unit")?);
    for j in 0..a.out.len() {
        squares.push((
            tw.clone(),
            vec![Face::inp(0), Face::out(j)],
            vec![Face::out(0), Face::out(sigma.apply(j))],
        ));
    }
    for (g, lhs, rhs) in &squares {
        let v = equal(p, g, lhs.clone(), rhs.clone())?;
        ensure!(v == Verdict::Equal, "{lhs:?} vs {rhs:?} on {g:?}: {v:?}");
    }
    ensure!(
        equal(p, &ten, vec![Face::inp(0), Face::inp(0)], vec![Face::inp(1), Face::inp(0)])? == Verdict::Distinct,
        "distinct chains certified equal"
    );
    Ok(squares.len())
}

fn consistency() -> Outcome {
    let mut certified = special_squares(t(), &tp().arity(2, 2), &tp().arity(1, 3))?;
    let e = EndoProp::bool();
    let mut rng = Rng::seed_from_u64(9);
    let out2 = Profile::uniform(&e.sample_colors()[0], 2).unwrap();
    let a = e.sample(&mut rng, Some(&out2)).unwrap();
    let b = e.sample(&mut rng, None).unwrap();
    certified += special_squares(Arc::new(e), &a, &b)?;

    let (tower, u) = setup();
    let mut found = Findings::default();
    for (name, a) in t_algebras() {
        let x = psi_build(&a, &tower, &u, 0, 3).ctx("psi_build")?;
        found.violations.extend(presheaf_violations(name, &x)?);
    }
    for k in [2, 3] {
        let x = psi_build(&weights(k), &tower, &u, 1, 3).ctx("psi_build")?;
        found.violations.extend(presheaf_violations(&format!("weights-{k}"), &x)?);
    }
    found.summary = format!("{certified} special squares certified; 5 fixtures validated");
    Ok(found)
}

fn pullback_along_iota() -> Outcome {
    let (tower, u) = setup();
    let x = psi_build(&SemilatticeBimonoid::bool_or(), &tower, &u, 0, 3).ctx("psi_build")?;
    let itower = Tower::new(Arc::new(InitialProp::default()), 2);
    let iu = Universe::generate(&itower, &UniverseSpec::default()).ctx("universe")?;
    let iota = PropMap::new(Arc::new(InitialProp::default()), t(), |x| Ok(tp().arity(x.out.len(), x.inp.len())));
    let y = pullback(&iota, &tower, &x, &iu).ctx("pullback")?;
    let r = check_weak_n(&y, 0, 3).ctx("check_weak_n")?;
    ensure!(r.passed(), "pullback is not weak-0: {:?}", r.failures.first());
    Findings::pass(format!("{} shapes, {} horns", y.cells.len(), r.horns_checked))
}

fn bare(inputs: usize, vertices: Value, outputs: Value) -> Value {
    json!({"inputs": inputs, "vertices": vertices, "outputs": outputs})
}

fn codec() -> Outcome {
    let tower = Tower::new(t(), 2);
    let (a, b, c) = (tp().arity(4, 1), tp().arity(2, 4), tp().arity(3, 2));
    let ba = tp().arity(2, 1);
    let s1 = tower.slice(1).unwrap();
    let s2 = tower.slice(2).unwrap();
    let top = s1.circ(&c, &ba).ctx("circ")?;
    let bottom = s1.hcomp(&s1.unit_of(&c), &s1.circ(&b, &a).ctx("circ")?).ctx("hcomp")?;
    let rocket = Propertope::of(3, &s2.circ(&top, &bottom).ctx("circ")?);
    let level1 = json!([
        element_to_json(&c),
        element_to_json(&ba),
        element_to_json(&c),
        element_to_json(&b),
        element_to_json(&a)
    ]);
    let expected = json!({"dim": 3, "levels": [level1, [
        [bare(1, json!([{"position": 1, "in": [[2, 1], [2, 2]], "outs": 3}, {"position": 2, "in": [[0, 1]], "outs": 2}]), json!([[1, 1], [1, 2], [1, 3]]))],
        [
            bare(2, json!([{"position": 1, "in": [[0, 1], [0, 2]], "outs": 3}]), json!([[1, 1], [1, 2], [1, 3]])),
            bare(1, json!([{"position": 2, "in": [[2, 1], [2, 2], [2, 3], [2, 4]], "outs": 2}, {"position": 3, "in": [[0, 1]], "outs": 4}]), json!([[1, 1], [1, 2]])),
        ],
    ], [[bare(3, json!([{"position": 1, "in": [[2, 1], [2, 2]], "outs": 1}, {"position": 2, "in": [[0, 1], [0, 2], [0, 3]], "outs": 2}]), json!([[1, 1]]))]]]});
    ensure!(
        encode_metagraph(&rocket).ctx("encode")?.to_json() == expected,
        "worked example encodes differently"
    );

    let mut rng = Rng::seed_from_u64(11);
    let mut cases = vec![rocket];
    for k in 0..100 {
        cases.push(random_propertope(&tower, &mut rng, k % 4).ctx("random propertope")?);
    }
    for g in &cases {
        let text = encode_metagraph(g).ctx("encode")?.to_canonical_string();
        let v: Value = serde_json::from_str(&text).ctx("reparse")?;
        let back = decode_metagraph(&Metagraph::from_json(&v).ctx("metagraph")?, &tower).ctx("decode")?;
        ensure!(&back == g, "decode differs for {g:?}");
        ensure!(
            encode_metagraph(&back).ctx("encode")?.to_canonical_string() == text,
            "re-encoding differs for {g:?}"
        );
    }
    Findings::pass(format!("worked example plus {} random propertopes", cases.len() - 1))
}

fn interchange() -> Outcome {
    let mut checked = 0;
    for m in [Monoid::And, Monoid::Cyclic(3)] {
        let f = words(m);
        let d = differentiate(&f);
        let s = SliceProp::new(f.target.clone());
        let i = InitialProp::default();
        for a in 1..=2 {
            for b in 1..=2 {
                let (pa, pb, pab) = (i.point(a), i.point(b), i.point(a + b));
                let tensor = s.tensor(&pa, &pb).ctx("tensor")?;
                let circs = [
                    s.circ(&pa, &pa).ctx("circ")?,
                    s.circ(&pb, &pb).ctx("circ")?,
                    s.circ(&pab, &pab).ctx("circ")?,
                ];
                let act = |x: &Element, args: [u32; 2]| algebra_act(&d, x, &args).map(|r| r[0]).ctx("act");
                let na = m.size().pow(a as u32);
                let nb = m.size().pow(b as u32);
                for x1 in 0..na {
                    for x2 in 0..na {
                        for y1 in 0..nb {
                            for y2 in 0..nb {
                                let lhs = act(&circs[2], [act(&tensor, [x1, y1])?, act(&tensor, [x2, y2])?])?;
                                let rhs = act(&tensor, [act(&circs[0], [x1, x2])?, act(&circs[1], [y1, y2])?])?;
                                ensure!(lhs == rhs, "{m:?}: a = {a}, b = {b}, x = ({x1}, {x2}), y = ({y1}, {y2})");
                                checked += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    Findings::pass(format!("{checked} table entries"))
}

/// ψ of a T-algebra on more than one element copies the join into both
/// outputs of `T(2,2)`, which is also `1₂`, so only the unital relation at
/// that shape can break.
fn is_known_unital_defect(v: &Violation) -> bool {
    let unit22 = format!("{:?}", Propertope::of(1, &tp().arity(2, 2)));
    v.rule == "unital consistency" && v.at.starts_with(&unit22)
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("PROP laws", prop_laws),
        ("graph evaluation", evaluation),
        ("slice identity", slice_identity),
        ("integral/differential round trip", integral_round_trip),
        ("weak-0 equivalence", weak_zero),
        ("EM weak-1", em_weak_one),
        ("underlying category", underlying_associativity),
        ("consistency congruence", consistency),
        ("pullback along iota", pullback_along_iota),
        ("metagraph codec", codec),
        ("interchange in slice(I)", interchange),
    ];
    let mut unexpected = vec![];
    for (k, (name, run)) in criteria.iter().enumerate() {
        let n = k + 1;
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(f) if f.violations.is_empty() => println!("criterion {n:2} PASS  {name}: {} ({secs:.1}s)", f.summary),
            Ok(f) => {
                let mut per_fixture = std::collections::BTreeMap::<&str, usize>::new();
                for (fx, _) in &f.violations {
                    *per_fixture.entry(fx).or_default() += 1;
                }
                let rules: std::collections::BTreeSet<&str> = f.violations.iter().map(|(_, v)| v.rule.as_str()).collect();
                println!(
                    "criterion {n:2} FAIL  {name}: {}; presheaf violations {per_fixture:?} of {rules:?} at the (2,2) unit ({secs:.1}s)",
                    f.summary
                );
                if !f.violations.iter().all(|(_, v)| is_known_unital_defect(v)) {
                    unexpected.push(format!("criterion {n}: violations outside the unital (2,2) family"));
                }
                if f.violations.iter().any(|(fx, _)| fx.starts_with("weights")) {
                    unexpected.push(format!("criterion {n}: slice fixtures violate the presheaf conditions"));
                }
            }
            Err(e) => {
                println!("criterion {n:2} FAIL  {name}: {e} ({secs:.1}s)");
                unexpected.push(format!("criterion {n}: {e}"));
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("{unexpected:#?}");
        std::process::exit(1);
    }
}
