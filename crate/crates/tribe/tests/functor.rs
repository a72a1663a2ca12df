mod common;

use common::*;
use grpd_tribe::functor::{
    all_functors, equivalence_by_search, equivalence_check, homotopies_between, ho_hom_classes,
    GFunctor, Problem,
};
use grpd_tribe::groupoid::{codiscrete, cyclic, discrete, product, FinGroupoid};
use grpd_tribe::hom::internal_hom;

fn table(f: &GFunctor) -> (Vec<u32>, Vec<u32>) {
    (f.obj.clone(), f.mor.clone())
}

#[test]
fn functor_search_matches_brute_force() {
    for (na, a) in small() {
        for (nb, b) in small() {
            let mut found: Vec<_> = all_functors(&a, &b).iter().map(table).collect();
            let mut oracle = brute_functors(&a, &b);
            found.sort();
            oracle.sort();
            assert_eq!(found, oracle, "{na} -> {nb}");
            for f in all_functors(&a, &b) {
                f.validate().unwrap();
            }
        }
    }
}

#[test]
fn constrained_search_respects_constraints() {
    let (k2, d2) = (codiscrete(2), discrete(2));
    let prod = product(&k2, &d2);
    let pr = GFunctor::new(
        prod.clone(),
        k2.clone(),
        prod.objects().map(|o| o / 2).collect(),
        prod.morphisms().map(|m| m / 2).collect(),
    )
    .unwrap();
    let id = GFunctor::identity(&k2);
    let sections = Problem::new(&k2, &prod).over(&pr, &id).all().unwrap();
    assert_eq!(sections.len(), 2);
    for s in &sections {
        assert_eq!(s.then(&pr).unwrap(), id);
    }
    let d1 = discrete(1);
    let i = GFunctor::new(d1.clone(), k2.clone(), vec![1], vec![k2.id(1)]).unwrap();
    let u = GFunctor::new(d1.clone(), prod.clone(), vec![3], vec![prod.id(3)]).unwrap();
    let ext = Problem::new(&k2, &prod).over(&pr, &id).extending(&i, &u).all().unwrap();
    assert_eq!(ext.len(), 1);
    assert_eq!(ext[0].ob(1), 3);
}

#[test]
fn homotopies_match_brute_force() {
    for (_, a) in small() {
        for (_, b) in small() {
            let fs = all_functors(&a, &b);
            for f in &fs {
                for g in &fs {
                    let found = homotopies_between(f, g).unwrap();
                    for h in &found {
                        h.validate().unwrap();
                    }
                    let mut comps: Vec<_> = found.into_iter().map(|h| h.components).collect();
                    let mut oracle = brute_nat_isos(&a, &b, &table(f), &table(g));
                    comps.sort();
                    oracle.sort();
                    assert_eq!(comps, oracle);
                }
            }
        }
    }
}

#[test]
fn documented_homotopy_examples() {
    let bz2 = cyclic(2);
    let fs = all_functors(&bz2, &bz2);
    assert_eq!(fs.len(), 2);
    let with_self = homotopies_between(&fs[0], &fs[0]).unwrap();
    assert!(with_self.iter().any(|h| h.components.iter().all(|&c| bz2.is_identity(c))));
    assert!(homotopies_between(&fs[0], &fs[1]).unwrap().is_empty());
    let (d1, d3) = (discrete(1), discrete(3));
    let pts = all_functors(&d1, &d3);
    for f in &pts {
        for g in &pts {
            assert_eq!(!homotopies_between(f, g).unwrap().is_empty(), f == g);
        }
    }
}

fn check_equivalences(a: &grpd_tribe::G, b: &grpd_tribe::G) {
    for f in all_functors(a, b) {
        let oracle = brute_is_equivalence(a, b, &table(&f));
        let fast = equivalence_check(&f);
        let slow = equivalence_by_search(&f);
        assert_eq!(fast.is_some(), oracle);
        assert_eq!(slow.is_some(), oracle);
        if let Some(w) = fast {
            w.validate(&f).unwrap();
        }
        if let Some(w) = slow {
            w.validate(&f).unwrap();
        }
    }
}

#[test]
fn equivalence_check_matches_exhaustive_search() {
    for (_, a) in small() {
        for (_, b) in small() {
            check_equivalences(&a, &b);
        }
    }
    check_equivalences(&product(&codiscrete(2), &cyclic(2)), &cyclic(2));
    check_equivalences(&cyclic(2), &product(&codiscrete(2), &cyclic(2)));
}

#[test]
fn documented_equivalence_examples() {
    let bz2 = cyclic(2);
    assert!(equivalence_check(&GFunctor::identity(&bz2)).is_some());
    assert!(equivalence_check(&GFunctor::to_terminal(&bz2)).is_none());
    let k2 = codiscrete(2);
    let pt = GFunctor::new(discrete(1), k2.clone(), vec![0], vec![k2.id(0)]).unwrap();
    assert!(equivalence_check(&pt).is_some());
}

#[test]
fn homotopy_classes() {
    assert_eq!(ho_hom_classes(&cyclic(2), &cyclic(2)), 2);
    for n in 0..=4 {
        assert_eq!(ho_hom_classes(&discrete(1), &discrete(n)), n);
    }
    for (_, a) in small() {
        if a.object_count() > 0 {
            assert_eq!(ho_hom_classes(&a, &discrete(1)), 1);
        }
        for (_, b) in small() {
            assert_eq!(ho_hom_classes(&a, &b), brute_classes(&a, &b));
        }
    }
}

#[test]
fn internal_hom_sizes() {
    // Two functors (identity and trivial); each has the two central elements
    // as automorphisms and there are no isomorphisms between them.
    let h = internal_hom(&cyclic(2), &cyclic(2)).unwrap();
    assert_eq!((h.groupoid.object_count(), h.groupoid.morphism_count()), (2, 4));
    assert_eq!(h.groupoid.component_count(), 2);
    assert_eq!(internal_hom(&discrete(2), &discrete(3)).unwrap().groupoid.object_count(), 9);
    for (_, b) in small() {
        let h = internal_hom(&discrete(1), &b).unwrap();
        assert_eq!(
            (h.groupoid.object_count(), h.groupoid.morphism_count()),
            (b.object_count(), b.morphism_count())
        );
    }
}

fn brute_count(a: &FinGroupoid, b: &FinGroupoid) -> usize {
    brute_functors(a, b).len()
}

#[test]
fn internal_hom_is_exponential() {
    let gs = [discrete(1), discrete(2), cyclic(2), codiscrete(2)];
    for x in &gs {
        for a in &gs {
            for b in &gs {
                let h = internal_hom(a, b).unwrap();
                h.groupoid.validate().unwrap();
                assert_eq!(brute_count(&product(x, a), b), brute_count(x, &h.groupoid));
            }
        }
        let h = internal_hom(x, &cyclic(2)).unwrap();
        h.evaluation().validate().unwrap();
    }
}

mod random_products {
    use super::*;
    use proptest::prelude::*;

    fn pick(i: usize) -> grpd_tribe::G {
        let mut all = small();
        all.swap_remove(i % all.len()).1
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn equivalence_agrees_on_products(i in 0usize..6, j in 0usize..6, k in 0usize..6, seed in 0usize..64) {
            let a = product(&pick(i), &pick(j));
            let b = pick(k);
            for (x, y) in [(&a, &b), (&b, &a)] {
                let fs = all_functors(x, y);
                if fs.is_empty() {
                    continue;
                }
                let f = &fs[seed % fs.len()];
                prop_assert_eq!(equivalence_check(f).is_some(), equivalence_by_search(f).is_some());
                prop_assert_eq!(equivalence_check(f).is_some(), brute_is_equivalence(x, y, &table(f)));
            }
        }
    }
}
