mod common;

use common::{factorial, stdlib};
use grpd_tribe::eq::{eq_object, univalence_check};
use grpd_tribe::fibration::PathChoice;
use grpd_tribe::groupoid::discrete;
use grpd_tribe::omega::sets_universe;
use hott_denote::denote::equiv_denotation_check;
use hott_denote::value::{Mor, Val};
use hott_denote::{DenoteError, Model};

/// Definitions over U0 only, as listed in the library.
const FRAGMENT: &[&str] = &[
    "idfun",
    "comp",
    "transport",
    "inv",
    "concat",
    "ap",
    "invLeft",
    "basedJ",
    "LInv0",
    "RInv0",
    "isEquiv0",
    "Equiv0",
    "idEquiv",
    "idToEquiv",
    "idToEquivRefl",
    "equivInv",
    "equivInvLeft",
    "isProp0",
    "isPropPi",
    "propPathCanonical",
    "propIsSet",
    "isPropIsProp",
    "coe",
    "coeIsIdToEquiv",
];

#[test]
fn fragment_declarations_denote() {
    let sig = stdlib();
    let model = Model::new(&sig, 2).unwrap();
    for name in FRAGMENT {
        let d = model.denote_decl(name).unwrap_or_else(|e| panic!("{name}: {e}"));
        let back = d.section.then(&d.extension.projection.map).unwrap();
        assert_eq!(back.obj, d.context.groupoid.objects().collect::<Vec<_>>(), "{name}");
        assert_eq!(back.mor, d.context.groupoid.morphisms().collect::<Vec<_>>(), "{name}");
    }
}

#[test]
fn higher_universes_are_outside_the_fragment() {
    let sig = stdlib();
    let model = Model::new(&sig, 2).unwrap();
    for name in ["LInv1", "isEquiv1", "isUnivalent0", "Prop0", "Prop1", "isEquiv2", "resizing0"] {
        match model.denote_decl(name) {
            Err(e @ DenoteError::Unsupported(_)) => assert_eq!(e.kind(), "unsupported-construct"),
            Err(e) => panic!("{name}: unexpected {e}"),
            Ok(_) => panic!("{name} denoted"),
        }
    }
    assert!(matches!(model.denote_decl("noSuchThing"), Err(DenoteError::UnknownDecl(_))));
}

#[test]
fn every_declaration_denotes_or_is_reported_outside_the_fragment() {
    let sig = stdlib();
    let model = Model::new(&sig, 2).unwrap();
    let mut denoted = 0;
    for name in sig.names() {
        match model.denote_decl(name) {
            Ok(_) => denoted += 1,
            Err(e) => assert!(e.outside_fragment(), "{name}: {e}"),
        }
    }
    assert!(denoted >= FRAGMENT.len());
}

#[test]
fn functions_into_codes_of_size_four_exceed_bound_two() {
    let sig = stdlib();
    let model = Model::new(&sig, 2).unwrap();
    match model.denote_decl("transportUaComputes") {
        Err(DenoteError::CodeTooLarge { size, k }) => assert_eq!((size, k), (4, 2)),
        other => panic!("{:?}", other.map(|_| ())),
    }
}

#[test]
fn equiv_matches_eq_for_small_codes() {
    let sig = stdlib();
    let model = Model::new(&sig, 2).unwrap();
    for n in 0..=2 {
        for m in 0..=2 {
            assert!(equiv_denotation_check(&model, n, m).unwrap(), "Equiv({n}, {m})");
            let eq = eq_object(&discrete(n as usize), &discrete(m as usize), PathChoice::Arrows).unwrap();
            let expected = if n == m { factorial(n) } else { 0 };
            assert_eq!(eq.groupoid.object_count(), expected);
        }
    }
}

#[test]
fn el_fibration_is_univalent() {
    let sig = stdlib();
    let model = Model::new(&sig, 2).unwrap();
    let el = model.el_fibration().unwrap();
    let u = sets_universe(2).unwrap();
    assert_eq!(el.base().object_count(), u.fib.base().object_count());
    assert_eq!(el.base().morphism_count(), u.fib.base().morphism_count());
    assert_eq!(el.total().object_count(), u.fib.total().object_count());
    assert_eq!(el.total().morphism_count(), u.fib.total().morphism_count());
    let v = univalence_check(&el).unwrap();
    assert!(v.arrows && v.agrees());
}

/// `uaMap A B e` is the bijection underlying `e`.
#[test]
fn ua_witness_inverts_id_to_equiv() {
    let sig = stdlib();
    let model = Model::new(&sig, 2).unwrap();
    let d = model.denote_decl("uaMap").unwrap();
    let values = d.values();
    let mut checked = 0;
    for (o, env) in d.context.envs.iter().enumerate() {
        let [_, _, e] = env.vals() else { panic!("context of uaMap") };
        let (f, _) = e.parts().unwrap();
        let image: Vec<u32> = f
            .as_table()
            .unwrap()
            .objs
            .iter()
            .map(|v| match v {
                Val::Elem(i) => *i,
                other => panic!("{other}"),
            })
            .collect();
        match values[o] {
            Val::Path(m) => assert_eq!(**m, Mor::perm(image)),
            other => panic!("{other}"),
        }
        checked += 1;
    }
    assert_eq!(checked, (0..=2).map(factorial).sum::<usize>());
}
