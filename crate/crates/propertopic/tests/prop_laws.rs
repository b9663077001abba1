use std::sync::Arc;

use propertopic::graph::FreeProp;
use propertopic::prop::builtin::{EndoProp, InitialProp, TerminalProp};
use propertopic::prop::laws::{check_prop_laws, LawMode, LawReport};
use propertopic::prop::operad::{operad_to_prop, TerminalOperad, UnitOperad};
use propertopic::prop::{PropImpl, PropRef};
use propertopic::slice::SliceProp;
use propertopic::{Color, Profile};

fn exhaustive(k: usize, h: usize) -> LawMode {
    LawMode::Exhaustive {
        max_arity: k,
        hcomp_arity: h,
    }
}

fn sampled() -> LawMode {
    LawMode::Sampled { samples: 200, seed: 7 }
}

fn assert_passes(r: LawReport) {
    assert!(r.passed(), "{} failed: {:#?}", r.prop, r.laws);
    assert!(r.laws.iter().map(|l| l.checked).sum::<usize>() > 0, "{} checked nothing", r.prop);
}

#[test]
fn terminal_passes_exhaustively() {
    assert_passes(check_prop_laws(&TerminalProp::t(), &exhaustive(3, 2)).unwrap());
}

#[test]
fn two_colored_terminal_passes_exhaustively() {
    assert_passes(check_prop_laws(&TerminalProp::colored(&["a", "b"]).unwrap(), &exhaustive(2, 2)).unwrap());
}

#[test]
fn initial_passes_exhaustively() {
    assert_passes(check_prop_laws(&InitialProp::default(), &exhaustive(4, 2)).unwrap());
}

#[test]
fn bool_endomorphisms_pass_sampled() {
    assert_passes(check_prop_laws(&EndoProp::bool(), &sampled()).unwrap());
}

fn three_generators() -> FreeProp {
    FreeProp::new(
        "F",
        &["c", "d"],
        &[("f", &["c"], &["c", "c"]), ("g", &["c", "d"], &["c"]), ("h", &["d"], &["d"])],
    )
    .unwrap()
}

#[test]
fn free_prop_passes_sampled() {
    assert_passes(check_prop_laws(&three_generators(), &sampled()).unwrap());
}

#[test]
fn terminal_operad_prop_passes_exhaustively() {
    let p = operad_to_prop(Arc::new(TerminalOperad::new(&["*"], 4)));
    assert_passes(check_prop_laws(&p, &exhaustive(3, 2)).unwrap());
}

#[test]
fn slice_of_terminal_passes_sampled() {
    let t: PropRef = Arc::new(TerminalProp::t());
    assert_passes(check_prop_laws(&SliceProp::new(t), &sampled()).unwrap());
}

#[test]
fn slice_of_bool_endomorphisms_passes_sampled() {
    let e: PropRef = Arc::new(EndoProp::bool());
    let s = SliceProp::new(e);
    assert_passes(check_prop_laws(&s, &LawMode::Sampled { samples: 200, seed: 3 }).unwrap());
    assert!(s.is_unital());
}

/// The quotient is computed, not assumed: square components carry one
/// class per permutation and the rest are empty.
#[test]
fn unit_operad_prop_has_permutation_classes() {
    let p = operad_to_prop(Arc::new(UnitOperad::default()));
    let c = Color::atom("*");
    let size = |m: usize, n: usize| {
        p.enumerate(&Profile::uniform(&c, m).unwrap(), &Profile::uniform(&c, n).unwrap())
            .unwrap()
            .len()
    };
    assert_eq!([size(1, 1), size(2, 2), size(3, 3)], [1, 2, 6]);
    assert_eq!((size(1, 2), size(2, 1)), (0, 0));
    assert_passes(check_prop_laws(&p, &exhaustive(3, 2)).unwrap());
}
