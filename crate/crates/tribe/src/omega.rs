//! Universes of finite sets, the homotopy subobject classifier and resizing.

use std::ops::ControlFlow;

use itertools::Itertools;

use crate::error::TribeError;
use crate::fibration::{
    fibered_square, homotopy_mono_check, path_object, pullback, FibrationMap, PathChoice,
    PathObject, Pullback,
};
use crate::functor::{equivalence_check, homotopic, EquivalenceWitness, GFunctor, Problem};
use crate::groupoid::{Builder, Labelled, Mor, Obj};
use crate::pi::Pi;

/// Largest `k` accepted by [`sets_universe`].
pub const MAX_UNIVERSE: usize = 4;

/// The universe of finite sets of size at most `k` with all bijections, and
/// its tautological family of elements.
#[derive(Debug)]
pub struct SetsUniverse {
    pub k: usize,
    pub base: Labelled<usize, (usize, Vec<usize>)>,
    pub total: Labelled<(usize, usize), (usize, Vec<usize>, usize)>,
    pub fib: FibrationMap,
}

fn compose_perm(g: &[usize], f: &[usize]) -> Vec<usize> {
    f.iter().map(|&i| g[i]).collect()
}

pub fn sets_universe(k: usize) -> Result<SetsUniverse, TribeError> {
    if k > MAX_UNIVERSE {
        return Err(TribeError::ResourceCap {
            what: "universe size bound",
            limit: MAX_UNIVERSE,
            actual: k,
        });
    }
    let mut base: Builder<usize, (usize, Vec<usize>)> = Builder::new();
    let mut total: Builder<(usize, usize), (usize, Vec<usize>, usize)> = Builder::new();
    for n in 0..=k {
        let b = base.object(n);
        for perm in (0..n).permutations(n) {
            base.morphism((n, perm.clone()), b, b)?;
        }
        for i in 0..n {
            total.object((n, i));
        }
        for perm in (0..n).permutations(n) {
            for i in 0..n {
                let (s, t) = (total.object((n, i)), total.object((n, perm[i])));
                total.morphism((n, perm.clone(), i), s, t)?;
            }
        }
    }
    let base = base.finish(|(n, g), (_, f)| (*n, compose_perm(g, f)))?;
    let total = total.finish(|(n, g, _), (_, f, i)| (*n, compose_perm(g, f), *i))?;
    let map = GFunctor::unchecked(
        total.groupoid.clone(),
        base.groupoid.clone(),
        total.objects.iter().map(|&(n, _)| base.obj(&n).expect("size present")).collect(),
        total
            .morphisms
            .iter()
            .map(|(n, perm, _)| base.mor(&(*n, perm.clone())).expect("bijection present"))
            .collect(),
    );
    let fib = FibrationMap::new(map)?;
    Ok(SetsUniverse { k, base, total, fib })
}

impl SetsUniverse {
    /// The inclusion of this universe into a larger one.
    pub fn inclusion_into(&self, other: &SetsUniverse) -> Result<GFunctor, TribeError> {
        if other.k < self.k {
            return Err(TribeError::EndpointMismatch {
                what: "universe inclusion into a smaller universe".into(),
            });
        }
        let obj = self.base.objects.iter().map(|n| other.base.obj(n).expect("size present")).collect();
        let mor = self.base.morphisms.iter().map(|m| other.base.mor(m).expect("bijection present")).collect();
        GFunctor::new(self.base.groupoid.clone(), other.base.groupoid.clone(), obj, mor)
    }

    /// The object of the base naming the set of size `n`.
    pub fn code(&self, n: usize) -> Option<Obj> {
        self.base.obj(&n)
    }
}

/// `Pr_p : Ω_p -> B` with `Ω_p = Π_{p×p}(P_p)` and `⊤ = Pr_p* p`.
#[derive(Debug)]
pub struct Omega {
    pub p: FibrationMap,
    pub path: PathObject,
    pub pi: Pi,
    pub pr: FibrationMap,
    pub top: Pullback,
}

pub fn omega_classifier(p: &FibrationMap) -> Result<Omega, TribeError> {
    let path = path_object(p, PathChoice::Arrows)?;
    let pp = fibered_square(p, &path.square)?;
    let pi = Pi::new(&pp, &path.boundary)?;
    let pr = pi.fib.clone();
    let top = pullback(p, &pr.map)?;
    Ok(Omega {
        p: p.clone(),
        path,
        pi,
        pr,
        top,
    })
}

impl Omega {
    pub fn top(&self) -> &FibrationMap {
        &self.top.fib
    }
}

/// A map `h` over the common base which is a homotopy equivalence.
pub fn equivalent_over(
    f: &FibrationMap,
    g: &FibrationMap,
) -> Result<Option<(GFunctor, EquivalenceWitness)>, TribeError> {
    let mut found = None;
    Problem::new(f.total(), g.total()).over(&g.map, &f.map).search(&mut |h| {
        match equivalence_check(h) {
            Some(w) => {
                found = Some((h.clone(), w));
                ControlFlow::Break(())
            }
            None => ControlFlow::Continue(()),
        }
    })?;
    Ok(found)
}

#[derive(Debug)]
pub struct Classification {
    /// The first classifying map in search order.
    pub chi: GFunctor,
    /// Every classifying map.
    pub classifiers: Vec<GFunctor>,
    /// Any two classifying maps are homotopic.
    pub unique_up_to_homotopy: bool,
    /// Every map homotopic to a classifying map classifies.
    pub closed_under_homotopy: bool,
}

/// Maps `χ : X -> Ω` such that `f` is equivalent over `X` to `χ*⊤`. Absent
/// when `f` is not a homotopy monomorphism or nothing classifies it.
pub fn classify_homotopy_mono(
    omega: &Omega,
    f: &FibrationMap,
) -> Result<Option<Classification>, TribeError> {
    if !homotopy_mono_check(f)? {
        return Ok(None);
    }
    let x = f.base();
    let mut classifiers = Vec::new();
    let mut others = Vec::new();
    let mut err = None;
    Problem::new(x, &omega.pi.groupoid).search(&mut |chi| {
        let ok = pullback(omega.top(), chi).and_then(|pb| equivalent_over(f, &pb.fib));
        match ok {
            Ok(Some(_)) => classifiers.push(chi.clone()),
            Ok(None) => others.push(chi.clone()),
            Err(e) => {
                err = Some(e);
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    let Some(chi) = classifiers.first().cloned() else {
        return Ok(None);
    };
    let mut unique = true;
    for a in &classifiers {
        for b in &classifiers {
            unique &= homotopic(a, b)?.is_some();
        }
    }
    let mut closed = true;
    for o in &others {
        closed &= homotopic(&chi, o)?.is_none();
    }
    Ok(Some(Classification {
        chi,
        classifiers,
        unique_up_to_homotopy: unique,
        closed_under_homotopy: closed,
    }))
}

/// The comparison `Ω_small -> Ω_large` lying over the universe inclusion
/// and preserving `⊤` up to equivalence.
#[derive(Debug)]
pub struct Resizing {
    pub comparisons: usize,
    pub comparison: Option<GFunctor>,
    pub equivalence: Option<EquivalenceWitness>,
}

pub fn prop_resizing(small: usize, large: usize) -> Result<Resizing, TribeError> {
    let (u1, u2) = (sets_universe(small)?, sets_universe(large)?);
    let j = u1.inclusion_into(&u2)?;
    let (o1, o2) = (omega_classifier(&u1.fib)?, omega_classifier(&u2.fib)?);
    let over = o1.pr.map.then(&j)?;
    let mut candidates = Vec::new();
    Problem::new(&o1.pi.groupoid, &o2.pi.groupoid)
        .over(&o2.pr.map, &over)
        .search(&mut |f| {
            candidates.push(f.clone());
            ControlFlow::Continue(())
        })?;
    let mut good = Vec::new();
    for f in candidates {
        let pulled = pullback(o2.top(), &f)?;
        if equivalent_over(o1.top(), &pulled.fib)?.is_some() {
            good.push(f);
        }
    }
    let comparison = good.first().cloned();
    let equivalence = comparison.as_ref().and_then(equivalence_check);
    Ok(Resizing {
        comparisons: good.len(),
        comparison,
        equivalence,
    })
}

/// Lookup of a base morphism of a universe by its permutation.
pub fn permutation(u: &SetsUniverse, n: usize, perm: &[usize]) -> Option<Mor> {
    u.base.mor(&(n, perm.to_vec()))
}
