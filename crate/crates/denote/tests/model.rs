mod common;

use std::rc::Rc;

use common::{factorial, maps, perms, stdlib};
use grpd_tribe::hom::internal_hom;
use grpd_tribe::groupoid::discrete;
use grpd_tribe::omega::sets_universe;
use hott_core::syntax::{Context, Term};
use hott_denote::model::{el, Family, STy, MAX_BOUND};
use hott_denote::value::{Code, Val};
use hott_denote::{DenoteError, Model};

#[test]
fn universe_fiber_is_the_base_of_the_sets_universe() {
    let sig = stdlib();
    for k in 0..=3 {
        let model = Model::new(&sig, k).unwrap();
        let f = model.fiber(&STy::Univ).unwrap();
        let u = sets_universe(k as usize).unwrap();
        assert_eq!(f.groupoid.object_count(), u.fib.base().object_count());
        assert_eq!(f.groupoid.morphism_count(), u.fib.base().morphism_count());
        assert_eq!(f.groupoid.morphism_count(), (0..=k).map(factorial).sum::<usize>());
    }
}

#[test]
fn bound_above_the_cap_is_a_resource_error() {
    let sig = stdlib();
    assert!(Model::new(&sig, MAX_BOUND).is_ok());
    match Model::new(&sig, MAX_BOUND + 1) {
        Err(e) => assert!(e.is_resource_cap() && matches!(e, DenoteError::Tribe(_))),
        Ok(_) => panic!("bound accepted"),
    }
}

#[test]
fn function_fibers_match_internal_homs() {
    let sig = stdlib();
    let model = Model::new(&sig, 2).unwrap();
    for n in 0..=3 {
        for m in 0..=3 {
            let codes: Rc<[Code]> = (0..n).map(|_| Code::Fin(m)).collect();
            let ty = STy::Pi(Rc::new(el(&Code::Fin(n))), Family::Codes(codes));
            let f = model.fiber(&ty).unwrap();
            let h = internal_hom(&discrete(n as usize), &discrete(m as usize)).unwrap();
            assert_eq!(f.groupoid.object_count(), h.groupoid.object_count(), "{n} -> {m}");
            assert_eq!(f.groupoid.morphism_count(), h.groupoid.morphism_count(), "{n} -> {m}");
            assert_eq!(f.len(), maps(n, m).len());
        }
    }
}

#[test]
fn sigma_fibers_sum_their_families() {
    let sig = stdlib();
    let model = Model::new(&sig, 2).unwrap();
    let sizes = [0u32, 3, 1, 2];
    let codes: Rc<[Code]> = sizes.iter().map(|&s| Code::Fin(s)).collect();
    let ty = STy::Sigma(Rc::new(el(&Code::Fin(4))), Family::Codes(codes));
    let f = model.fiber(&ty).unwrap();
    assert_eq!(f.len(), 6);
    assert!(f.groupoid.is_discrete());
}

#[test]
fn paths_in_the_universe_are_bijections() {
    let sig = stdlib();
    let model = Model::new(&sig, 3).unwrap();
    for n in 0..=3 {
        for m in 0..=3 {
            let ty = STy::Id(Rc::new(STy::Univ), Val::code(Code::Fin(n)), Val::code(Code::Fin(m)));
            let f = model.fiber(&ty).unwrap();
            let expected = if n == m { perms(n).len() } else { 0 };
            assert_eq!(f.len(), expected);
            assert!(f.groupoid.is_discrete());
        }
    }
}

/// `Π (A : U0). El A -> El A`: the conjugation-invariant endomaps, chosen
/// independently at each size.
#[test]
fn polymorphic_endomaps_are_the_invariant_ones() {
    let sig = stdlib();
    let model = Model::new(&sig, 2).unwrap();
    let ty = Term::pi(Term::univ(0), Term::pi(Term::el(Term::var(0)), Term::el(Term::var(1))));
    let sty = model.type_at_point(&Context::new(), &ty, &[]).unwrap();
    let f = model.fiber(&sty).unwrap();
    let invariant = |n: u32| {
        maps(n, n)
            .into_iter()
            .filter(|g| {
                perms(n).iter().all(|p| (0..n as usize).all(|i| p[g[i] as usize] == g[p[i] as usize]))
            })
            .count()
    };
    let expected: usize = (0..=2).map(invariant).product();
    assert_eq!(expected, 2);
    assert_eq!(f.len(), expected);
}

#[test]
fn identities_and_inverses_in_fibers() {
    let sig = stdlib();
    let model = Model::new(&sig, 2).unwrap();
    let ty = Term::pi(Term::univ(0), Term::univ(0));
    let sty = model.type_at_point(&Context::new(), &ty, &[]).unwrap();
    let f = model.fiber(&sty).unwrap();
    assert!(!f.is_empty());
    for (s, e, m) in &f.mors {
        let (x, y) = (&f.objs[*s as usize], &f.objs[*e as usize]);
        let inv = model.inverse(&sty, x, y, m).unwrap();
        let round = model.compose(&sty, x, y, x, m, &inv).unwrap();
        assert_eq!(round, model.identity(&sty, x).unwrap());
        let id_y = model.identity(&sty, y).unwrap();
        assert_eq!(model.compose(&sty, x, y, y, m, &id_y).unwrap(), *m);
    }
}
