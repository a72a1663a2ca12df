mod common;

use grpd_tribe::corpus::{corpus, CorpusKind};
use grpd_tribe::fibration::{
    factorize, homotopy_mono_check, is_anodyne, lift_in_square, path_object, pullback,
    FibrationMap, PathChoice,
};
use grpd_tribe::functor::{
    all_functors, equivalence_check, product_with_projections, GFunctor, Problem,
};
use grpd_tribe::groupoid::{codiscrete, cyclic, discrete};
use grpd_tribe::hom::internal_hom;
use grpd_tribe::omega::sets_universe;
use grpd_tribe::pi::Pi;
use grpd_tribe::suite::{pi_adjunction, pi_path_objects, Outcome};
use grpd_tribe::TribeError;

fn map(dom: &grpd_tribe::G, cod: &grpd_tribe::G, obj: Vec<u32>) -> GFunctor {
    let mor = dom
        .morphisms()
        .map(|m| cod.hom(obj[dom.src(m) as usize], obj[dom.dst(m) as usize])[0])
        .collect();
    GFunctor::new(dom.clone(), cod.clone(), obj, mor).unwrap()
}

#[test]
fn non_isofibrations_are_rejected() {
    let (d1, k2) = (discrete(1), codiscrete(2));
    let incl = map(&d1, &k2, vec![0]);
    assert!(matches!(FibrationMap::new(incl), Err(TribeError::NotIsofibration { .. })));
    let d2 = discrete(2);
    let both = map(&d2, &k2, vec![0, 1]);
    assert!(FibrationMap::new(both).is_err());
    let u = sets_universe(2).unwrap();
    u.fib.validate().unwrap();
}

#[test]
fn lifts_prefer_identities() {
    let p = FibrationMap::to_terminal(&codiscrete(2));
    for e in 0..2 {
        assert_eq!(p.lift(e, 0), p.total().id(e));
    }
}

#[test]
fn pullback_along_identity_is_isomorphic() {
    for (_, p) in corpus(CorpusKind::Small).fibrations {
        let pb = pullback(&p, &GFunctor::identity(p.base())).unwrap();
        assert!(pb.to_total.is_isomorphism());
        assert_eq!(pb.fib.map.then(&GFunctor::identity(p.base())).unwrap(), pb.to_total.then(&p.map).unwrap());
    }
}

#[test]
fn pullback_to_a_point_is_the_fiber() {
    let (d4, d2) = (discrete(4), discrete(2));
    let p = FibrationMap::new(map(&d4, &d2, vec![0, 0, 0, 1])).unwrap();
    let pt = map(&discrete(1), &d2, vec![0]);
    let pb = pullback(&p, &pt).unwrap();
    assert_eq!(pb.groupoid.object_count(), p.fiber(0).groupoid.object_count());
    assert_eq!(pb.groupoid.object_count(), 3);
}

#[test]
fn pullback_of_elements_along_the_two_element_code() {
    let u = sets_universe(2).unwrap();
    let two = u.code(2).unwrap();
    let pt = map(&discrete(1), u.fib.base(), vec![two]);
    let pb = pullback(&u.fib, &pt).unwrap();
    assert_eq!(pb.groupoid.object_count(), 2);
    assert!(pb.groupoid.is_discrete());
}

#[test]
fn pullback_has_the_universal_property() {
    let (bz2, k2) = (cyclic(2), codiscrete(2));
    let (prod, pr1, _) = product_with_projections(&k2, &bz2);
    let p = FibrationMap::new(pr1).unwrap();
    let f = map(&discrete(2), &k2, vec![0, 1]);
    let pb = pullback(&p, &f).unwrap();
    let square = pb.square();
    assert!(square.pullback && square.commutes());
    let y = cyclic(2);
    for u in all_functors(&y, &f.dom) {
        let fu = u.then(&f).unwrap();
        for v in Problem::new(&y, &prod).over(&p.map, &fu).all().unwrap() {
            assert_eq!(square.mediating_count(&u, &v).unwrap(), 1);
            let h = pb.pair(&u, &v).unwrap();
            assert_eq!(h.then(&pb.fib.map).unwrap(), u);
            assert_eq!(h.then(&pb.to_total).unwrap(), v);
        }
    }
}

#[test]
fn pairing_rejects_non_commuting_cones() {
    let k2 = codiscrete(2);
    let id = GFunctor::identity(&k2);
    let pb = pullback(&FibrationMap::identity(&k2), &id).unwrap();
    let swap = map(&k2, &k2, vec![1, 0]);
    assert!(pb.pair(&id, &swap).is_err());
}

#[test]
fn path_object_of_a_discrete_groupoid_is_itself() {
    let d3 = discrete(3);
    let p = FibrationMap::to_terminal(&d3);
    for choice in [PathChoice::Arrows, PathChoice::Composable] {
        let path = path_object(&p, choice).unwrap();
        assert!(path.anodyne.is_isomorphism());
        // The boundary sends each object to the diagonal pair.
        for e in d3.objects() {
            let o = path.boundary.map.ob(path.anodyne.ob(e));
            assert_eq!(path.square.parts_obj(o), (e, e));
        }
    }
}

#[test]
fn path_object_of_bz2() {
    // The arrow groupoid of a group G has |G| objects and |G|^3 morphisms.
    let bz2 = cyclic(2);
    let p = FibrationMap::to_terminal(&bz2);
    let path = path_object(&p, PathChoice::Arrows).unwrap();
    assert_eq!((path.groupoid.object_count(), path.groupoid.morphism_count()), (2, 8));
    assert_eq!(
        (path.square.groupoid.object_count(), path.square.groupoid.morphism_count()),
        (1, 4)
    );
    path.boundary.validate().unwrap();
    assert!(is_anodyne(&path.anodyne));
    let diagonal = path.anodyne.then(&path.boundary.map).unwrap();
    for e in bz2.objects() {
        assert_eq!(path.square.parts_obj(diagonal.ob(e)), (e, e));
    }
    for m in bz2.morphisms() {
        assert_eq!(path.square.parts_mor(diagonal.mo(m)), (m, m));
    }
}

#[test]
fn path_objects_factor_the_diagonal_for_every_choice() {
    for (_, p) in corpus(CorpusKind::Small).fibrations {
        for choice in [PathChoice::Arrows, PathChoice::Composable, PathChoice::Marked] {
            let path = path_object(&p, choice).unwrap();
            path.boundary.validate().unwrap();
            path.anodyne.validate().unwrap();
            assert!(is_anodyne(&path.anodyne));
            let d = path.anodyne.then(&path.boundary.map).unwrap();
            for e in p.total().objects() {
                assert_eq!(path.square.parts_obj(d.ob(e)), (e, e));
            }
            if choice != PathChoice::Arrows {
                let base = path_object(&p, PathChoice::Arrows).unwrap();
                let c = base.compare(&path).unwrap();
                c.validate().unwrap();
                assert_eq!(c.then(&path.boundary.map).unwrap(), base.boundary.map);
                assert!(equivalence_check(&c).is_some());
            }
        }
    }
}

#[test]
fn factorize_identity_and_point() {
    let bz2 = cyclic(2);
    let id = GFunctor::identity(&bz2);
    let f = factorize(&id).unwrap();
    assert_eq!(f.anodyne.then(&f.fibration.map).unwrap(), id);
    assert!(is_anodyne(&f.anodyne));

    let pt = map(&discrete(1), &bz2, vec![0]);
    let f = factorize(&pt).unwrap();
    assert_eq!(f.groupoid.object_count(), 2);
    assert_eq!(f.groupoid.component_count(), 1);
    assert!(is_anodyne(&f.anodyne));
    f.fibration.validate().unwrap();
    assert_eq!(f.anodyne.then(&f.fibration.map).unwrap(), pt);

    // Refactoring the fibration part gives an equivalent middle object.
    let again = factorize(&f.fibration.map).unwrap();
    assert!(equivalence_check(&again.anodyne).is_some());
    assert_eq!(again.anodyne.then(&again.fibration.map).unwrap(), f.fibration.map);
}

#[test]
fn homotopy_monomorphisms() {
    let bz2 = cyclic(2);
    assert!(homotopy_mono_check(&FibrationMap::identity(&bz2)).unwrap());
    assert!(!homotopy_mono_check(&FibrationMap::to_terminal(&discrete(2))).unwrap());
    assert!(!homotopy_mono_check(&FibrationMap::to_terminal(&bz2)).unwrap());
    assert!(homotopy_mono_check(&FibrationMap::to_terminal(&codiscrete(2))).unwrap());
    assert!(homotopy_mono_check(&FibrationMap::to_terminal(&discrete(0))).unwrap());
    // Subsingleton fibers with a faithful action.
    let d2 = discrete(2);
    let incl = FibrationMap::new(map(&discrete(1), &d2, vec![1])).unwrap();
    assert!(homotopy_mono_check(&incl).unwrap());
}

#[test]
fn anodyne_maps_lift_against_fibrations() {
    let k2 = codiscrete(2);
    let i = map(&discrete(1), &k2, vec![0]);
    for (_, p) in corpus(CorpusKind::Small).fibrations {
        for v in all_functors(&k2, p.base()) {
            let vi = i.then(&v).unwrap();
            for u in Problem::new(&i.dom, p.total()).over(&p.map, &vi).all().unwrap() {
                let h = lift_in_square(&i, &p, &u, &v).unwrap().expect("lift exists");
                assert_eq!(i.then(&h).unwrap(), u);
                assert_eq!(h.then(&p.map).unwrap(), v);
            }
        }
    }
}

#[test]
fn pi_along_identity_is_the_fibration() {
    let (bz2, k2) = (cyclic(2), codiscrete(2));
    let (_, pr1, _) = product_with_projections(&k2, &bz2);
    let q = FibrationMap::new(pr1).unwrap();
    let pi = Pi::new(&FibrationMap::identity(&k2), &q).unwrap();
    assert_eq!(pi.groupoid.object_count(), q.total().object_count());
    assert_eq!(pi.groupoid.morphism_count(), q.total().morphism_count());
    pi.fib.validate().unwrap();
}

#[test]
fn pi_fiber_counts_sections() {
    // p : 2 -> 1 and q with a 3-element fiber over each point: 3^2 sections.
    let (d2, d6) = (discrete(2), discrete(6));
    let p = FibrationMap::to_terminal(&d2);
    let q = FibrationMap::new(map(&d6, &d2, vec![0, 0, 0, 1, 1, 1])).unwrap();
    let pi = Pi::new(&p, &q).unwrap();
    assert_eq!(pi.groupoid.object_count(), 9);
    assert!(pi.groupoid.is_discrete());
}

#[test]
fn pi_over_the_point_is_the_internal_hom() {
    let gs = [discrete(2), cyclic(2), codiscrete(2), cyclic(3)];
    for a in &gs {
        for b in &gs {
            let (_, pr1, _) = product_with_projections(a, b);
            let pi = Pi::new(&FibrationMap::to_terminal(a), &FibrationMap::new(pr1).unwrap()).unwrap();
            let h = internal_hom(a, b).unwrap();
            assert_eq!(pi.groupoid.object_count(), h.groupoid.object_count());
            assert_eq!(pi.groupoid.morphism_count(), h.groupoid.morphism_count());
            assert_eq!(pi.groupoid.component_count(), h.groupoid.component_count());
        }
    }
}

#[test]
fn pi_adjunction_and_path_objects_on_nontrivial_instances() {
    let (bz2, k2, d2) = (cyclic(2), codiscrete(2), discrete(2));
    let (_, p_map, _) = product_with_projections(&k2, &bz2);
    let p = FibrationMap::new(p_map).unwrap();
    let (_, q1, _) = product_with_projections(p.total(), &d2);
    let (_, q2, _) = product_with_projections(p.total(), &bz2);
    for q in [FibrationMap::new(q1).unwrap(), FibrationMap::new(q2).unwrap(), FibrationMap::identity(p.total())] {
        assert!(matches!(pi_adjunction(&p, &q).unwrap(), Outcome::Pass));
        assert!(matches!(pi_path_objects(&p, &q).unwrap(), Outcome::Pass));
    }
    let u = sets_universe(2).unwrap();
    let (_, q3, _) = product_with_projections(u.fib.total(), &d2);
    let q3 = FibrationMap::new(q3).unwrap();
    assert!(matches!(pi_adjunction(&u.fib, &q3).unwrap(), Outcome::Pass));
    assert!(matches!(pi_path_objects(&u.fib, &q3).unwrap(), Outcome::Pass));
}

#[test]
fn pi_rejects_mismatched_inputs() {
    let p = FibrationMap::to_terminal(&discrete(2));
    let q = FibrationMap::to_terminal(&discrete(3));
    assert!(matches!(Pi::new(&p, &q), Err(TribeError::EndpointMismatch { .. })));
}
