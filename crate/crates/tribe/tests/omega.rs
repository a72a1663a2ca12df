use grpd_tribe::corpus::{corpus, CorpusKind};
use grpd_tribe::fibration::{homotopy_mono_check, FibrationMap};
use grpd_tribe::functor::{equivalence_check, GFunctor};
use grpd_tribe::groupoid::{codiscrete, cyclic, discrete};
use grpd_tribe::omega::{
    classify_homotopy_mono, omega_classifier, permutation, prop_resizing, sets_universe, MAX_UNIVERSE,
};
use grpd_tribe::TribeError;

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

#[test]
fn universe_sizes() {
    for k in 0..=MAX_UNIVERSE {
        let u = sets_universe(k).unwrap();
        let base = u.fib.base();
        let total = u.fib.total();
        assert_eq!(base.object_count(), k + 1);
        assert_eq!(base.morphism_count(), (0..=k).map(factorial).sum::<usize>());
        assert_eq!(total.object_count(), (0..=k).sum::<usize>());
        assert_eq!(total.morphism_count(), (0..=k).map(|n| n * factorial(n)).sum::<usize>());
        u.fib.validate().unwrap();
        for n in 0..=k {
            let fiber = u.fib.fiber(u.code(n).unwrap());
            assert_eq!(fiber.groupoid.object_count(), n);
            assert!(fiber.groupoid.is_discrete());
        }
    }
    assert!(matches!(sets_universe(MAX_UNIVERSE + 1), Err(TribeError::ResourceCap { .. })));
}

#[test]
fn universe_inclusions_and_permutations() {
    let (u2, u3) = (sets_universe(2).unwrap(), sets_universe(3).unwrap());
    let j = u2.inclusion_into(&u3).unwrap();
    assert!(j.is_fully_faithful());
    assert!(u3.inclusion_into(&u2).is_err());
    let swap = permutation(&u2, 2, &[1, 0]).unwrap();
    let b = u2.fib.base();
    assert!(!b.is_identity(swap));
    assert!(b.is_identity(b.compose(swap, swap)));
    assert!(permutation(&u2, 2, &[0, 0]).is_none());
}

#[test]
fn omega_of_u2() {
    let u = sets_universe(2).unwrap();
    let omega = omega_classifier(&u.fib).unwrap();
    assert_eq!(omega.pi.groupoid.object_count(), 2);
    assert_eq!(omega.pi.groupoid.morphism_count(), 2);
    omega.pr.validate().unwrap();
    assert!(homotopy_mono_check(&omega.pr).unwrap());
    // The propositions are the codes of size 0 and 1.
    let mut codes: Vec<u32> = omega.pi.groupoid.objects().map(|o| omega.pr.map.ob(o)).collect();
    codes.sort();
    assert_eq!(codes, vec![u.code(0).unwrap(), u.code(1).unwrap()]);
    omega.top().validate().unwrap();
    assert!(homotopy_mono_check(omega.top()).unwrap());
}

#[test]
fn omega_with_empty_fibers_is_the_base() {
    for b in [discrete(2), cyclic(2), codiscrete(2)] {
        let p = FibrationMap::new(GFunctor::new(discrete(0), b.clone(), vec![], vec![]).unwrap()).unwrap();
        let omega = omega_classifier(&p).unwrap();
        assert!(omega.pr.map.is_isomorphism());
    }
}

#[test]
fn top_classifies_itself() {
    let u = sets_universe(2).unwrap();
    let omega = omega_classifier(&u.fib).unwrap();
    let c = classify_homotopy_mono(&omega, omega.top()).unwrap().unwrap();
    assert!(equivalence_check(&c.chi).is_some());
    assert!(c.unique_up_to_homotopy && c.closed_under_homotopy);
}

#[test]
fn empty_fiber_is_named_by_the_empty_code() {
    let u = sets_universe(2).unwrap();
    let omega = omega_classifier(&u.fib).unwrap();
    let empty = FibrationMap::new(GFunctor::new(discrete(0), discrete(1), vec![], vec![]).unwrap()).unwrap();
    let c = classify_homotopy_mono(&omega, &empty).unwrap().unwrap();
    assert_eq!(omega.pr.map.ob(c.chi.ob(0)), u.code(0).unwrap());
    assert_eq!(c.classifiers.len(), 1);
}

#[test]
fn non_monos_are_not_classified() {
    let u = sets_universe(2).unwrap();
    let omega = omega_classifier(&u.fib).unwrap();
    assert!(classify_homotopy_mono(&omega, &FibrationMap::to_terminal(&discrete(2))).unwrap().is_none());
    assert!(classify_homotopy_mono(&omega, &FibrationMap::to_terminal(&cyclic(2))).unwrap().is_none());
}

#[test]
fn corpus_homotopy_monos_are_classified_uniquely() {
    let u = sets_universe(2).unwrap();
    let omega = omega_classifier(&u.fib).unwrap();
    let mut monos = 0;
    for (name, f) in corpus(CorpusKind::Small).fibrations {
        if !homotopy_mono_check(&f).unwrap() {
            assert!(classify_homotopy_mono(&omega, &f).unwrap().is_none(), "{name}");
            continue;
        }
        monos += 1;
        let c = classify_homotopy_mono(&omega, &f).unwrap().expect(&name);
        assert!(c.unique_up_to_homotopy, "{name}");
        assert!(c.closed_under_homotopy, "{name}");
    }
    assert!(monos > 5);
}

#[test]
fn resizing_is_an_equivalence() {
    let r = prop_resizing(2, 3).unwrap();
    assert_eq!(r.comparisons, 1);
    assert!(r.comparison.is_some() && r.equivalence.is_some());
    let r = prop_resizing(1, 2).unwrap();
    assert!(r.equivalence.is_some());
}
