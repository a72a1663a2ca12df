//! Cross-checks between the constructions.

use std::collections::BTreeSet;

use crate::eq::{eq_object, eq_of_fibration, univalence_check, EquivalenceData};
use crate::error::TribeError;
use crate::fibration::{homotopy_mono_check, pullback, FibrationMap, PathChoice};
use crate::functor::{all_functors, equivalence_check, homotopies_between, GFunctor};
use crate::groupoid::{product, Mor, Obj, G};
use crate::hom::internal_hom;
use crate::omega::equivalent_over;

/// Equivalence data enumerated directly: functors `f`, `g`, `h` with
/// homotopies `g ∘ f ⇒ id` and `f ∘ h ⇒ id`.
pub fn enumerate_equivalence_data(a: &G, b: &G) -> Result<BTreeSet<EquivalenceData>, TribeError> {
    let key = |f: &GFunctor| (f.obj.clone(), f.mor.clone());
    let (ida, idb) = (GFunctor::identity(a), GFunctor::identity(b));
    let back = all_functors(b, a);
    let mut out = BTreeSet::new();
    for f in all_functors(a, b) {
        let mut lefts = Vec::new();
        let mut rights = Vec::new();
        for g in &back {
            for hh in homotopies_between(&f.then(g)?, &ida)? {
                lefts.push((key(g), hh.components));
            }
            for kk in homotopies_between(&g.then(&f)?, &idb)? {
                rights.push((key(g), kk.components));
            }
        }
        for (g, left) in &lefts {
            for (h, right) in &rights {
                out.insert(EquivalenceData {
                    f: key(&f),
                    g: g.clone(),
                    left: left.clone(),
                    h: h.clone(),
                    right: right.clone(),
                });
            }
        }
    }
    Ok(out)
}

/// Points of `Eq(A, B)` correspond bijectively to equivalence data.
pub fn representability_on_points(a: &G, b: &G) -> Result<bool, TribeError> {
    let e = eq_object(a, b, PathChoice::Arrows)?;
    let decoded: Vec<EquivalenceData> = e.groupoid.objects().map(|o| e.decode(o)).collect();
    let distinct: BTreeSet<EquivalenceData> = decoded.iter().cloned().collect();
    Ok(distinct.len() == decoded.len() && distinct == enumerate_equivalence_data(a, b)?)
}

/// `Eq(A, B)` from the two path objects are related by an equivalence.
pub fn path_object_independence(a: &G, b: &G) -> Result<bool, TribeError> {
    let arrows = eq_object(a, b, PathChoice::Arrows)?;
    let marked = eq_object(a, b, PathChoice::Marked)?;
    Ok(equivalence_check(&arrows.compare(&marked)?).is_some())
}

/// Postcomposition with `f : A -> B` on `[X, A] -> [X, B]`.
pub fn postcomposition(x: &G, f: &GFunctor) -> Result<GFunctor, TribeError> {
    let (ha, hb) = (internal_hom(x, &f.dom)?, internal_hom(x, &f.cod)?);
    let lost = || TribeError::NotCommuting {
        what: "postcomposite missing from the internal hom".into(),
    };
    let mut obj = Vec::new();
    for o in ha.groupoid.objects() {
        obj.push(hb.index_of(&ha.functor(o).then(f)?).ok_or_else(lost)?);
    }
    let mut mor = Vec::new();
    for m in ha.groupoid.morphisms() {
        let comps: Vec<Mor> = ha.components(m).iter().map(|&c| f.mo(c)).collect();
        let (s, t) = (obj[ha.groupoid.src(m) as usize], obj[ha.groupoid.dst(m) as usize]);
        let found = hb
            .groupoid
            .hom(s, t)
            .iter()
            .copied()
            .find(|&n| hb.components(n) == comps.as_slice())
            .ok_or_else(lost)?;
        mor.push(found);
    }
    GFunctor::new(ha.groupoid.clone(), hb.groupoid.clone(), obj, mor)
}

/// `f × f` on the product layout.
pub fn square_of(f: &GFunctor) -> GFunctor {
    let (a, b) = (&f.dom, &f.cod);
    let (na, ma) = (a.object_count() as Obj, a.morphism_count() as Mor);
    let (nb, mb) = (b.object_count() as Obj, b.morphism_count() as Mor);
    let pa = product(a, a);
    GFunctor::unchecked(
        pa.clone(),
        product(b, b),
        pa.objects().map(|o| f.ob(o / na) * nb + f.ob(o % na)).collect(),
        pa.morphisms().map(|m| f.mo(m / ma) * mb + f.mo(m % ma)).collect(),
    )
}

/// Pulling `Eq(p)` back along `f × f` agrees with `Eq(f*p)` up to
/// equivalence over `X × X`.
pub fn eq_pullback_stability(p: &FibrationMap, f: &GFunctor) -> Result<bool, TribeError> {
    let whole = eq_of_fibration(p, PathChoice::Arrows)?;
    let pulled = pullback(&whole.eq.to_base, &square_of(f))?;
    let restricted = eq_of_fibration(&pullback(p, f)?.fib, PathChoice::Arrows)?;
    Ok(equivalent_over(&restricted.eq.to_base, &pulled.fib)?.is_some())
}

/// For univalent `p`, `f*p` is univalent exactly when `f` is a homotopy
/// monomorphism. Returns both sides.
pub fn univalence_transfer(p: &FibrationMap, f: &FibrationMap) -> Result<(bool, bool), TribeError> {
    let pulled = pullback(p, &f.map)?;
    Ok((univalence_check(&pulled.fib)?.arrows, homotopy_mono_check(f)?))
}
