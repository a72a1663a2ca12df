//! Fibered homs, equivalence objects and univalence.

use crate::error::TribeError;
use crate::fibration::{path_object, pullback, FibrationMap, PathChoice, PathObject, Pullback};
use crate::functor::{equivalence_check, product_with_projections, EquivalenceWitness, GFunctor};
use crate::groupoid::{Mor, Obj, G};
use crate::pi::Pi;

/// `Hom_Z(X1, X2)` as `Π_{x1}(X1 ×_Z X2 -> X1)`.
#[derive(Debug)]
pub struct FiberedHom {
    pub source: FibrationMap,
    pub target: FibrationMap,
    /// `X1 ×_Z X2`, fibered over `X1`.
    pub pair: Pullback,
    pub pi: Pi,
}

impl FiberedHom {
    pub fn new(x1: &FibrationMap, x2: &FibrationMap) -> Result<Self, TribeError> {
        let pair = pullback(x2, &x1.map)?;
        let pi = Pi::new(x1, &pair.fib)?;
        Ok(FiberedHom {
            source: x1.clone(),
            target: x2.clone(),
            pair,
            pi,
        })
    }

    pub fn groupoid(&self) -> &G {
        &self.pi.groupoid
    }

    /// `Hom_Z(X1, X2) -> Z`.
    pub fn fib(&self) -> &FibrationMap {
        &self.pi.fib
    }

    pub fn apply(&self, h: Obj, a: Obj) -> Obj {
        self.pair.parts_obj(self.pi.value(h, a)).1
    }

    pub fn apply_mor(&self, k: Mor, n: Mor) -> Mor {
        self.pair.parts_mor(self.pi.value_mor(k, n)).1
    }

    /// The identity point `Z -> Hom_Z(X, X)`.
    pub fn identity(&self) -> Result<GFunctor, TribeError> {
        let z = self.source.base();
        self.pi.transpose_from(
            &GFunctor::identity(z),
            |_, a| self.pair.obj(a, a).unwrap_or(Obj::MAX),
            |_, n| self.pair.mor(n, n).unwrap_or(Mor::MAX),
        )
    }
}

/// Composition `Hom(X1, X2) ×_Z Hom(X2, X3) -> Hom(X1, X3)`; the pullback
/// has objects `(f, g)` and the result sends them to `g ∘ f`.
pub fn composition(
    h12: &FiberedHom,
    h23: &FiberedHom,
    h13: &FiberedHom,
) -> Result<(Pullback, GFunctor), TribeError> {
    let pairs = pullback(h23.fib(), &h12.fib().map)?;
    let r = pairs.fib.map.then(&h12.fib().map)?;
    let c = h13.pi.transpose_from(
        &r,
        |y, a1| {
            let (f, g) = pairs.parts_obj(y);
            let a3 = h23.apply(g, h12.apply(f, a1));
            h13.pair.obj(a1, a3).unwrap_or(Obj::MAX)
        },
        |m, n| {
            let (k, l) = pairs.parts_mor(m);
            let n3 = h23.apply_mor(l, h12.apply_mor(k, n));
            h13.pair.mor(n, n3).unwrap_or(Mor::MAX)
        },
    )?;
    Ok((pairs, c))
}

/// `Eq_Z(X1, X2)`: maps with a left and a right inverse up to homotopy,
/// fibered over `Hom_Z(X1, X2)`.
#[derive(Debug)]
pub struct EqObject {
    pub choice: PathChoice,
    pub hom_ab: FiberedHom,
    pub hom_ba: FiberedHom,
    pub hom_aa: FiberedHom,
    pub hom_bb: FiberedHom,
    /// Objects `(f, g)` with `f : X1 -> X2` and `g : X2 -> X1`.
    pub pairs: Pullback,
    pub left_composite: GFunctor,
    pub right_composite: GFunctor,
    pub path_aa: PathObject,
    pub path_bb: PathObject,
    pub left_inverse: Pullback,
    pub right_inverse: Pullback,
    pub groupoid: G,
    pub eq: Pullback,
    /// `Eq -> Hom_Z(X1, X2)`.
    pub projection: FibrationMap,
    /// `Eq -> Z`.
    pub to_base: FibrationMap,
}

impl EqObject {
    pub fn new(x1: &FibrationMap, x2: &FibrationMap, choice: PathChoice) -> Result<Self, TribeError> {
        let hom_ab = FiberedHom::new(x1, x2)?;
        let hom_ba = FiberedHom::new(x2, x1)?;
        let hom_aa = FiberedHom::new(x1, x1)?;
        let hom_bb = FiberedHom::new(x2, x2)?;
        let (pairs, c_aba) = composition(&hom_ab, &hom_ba, &hom_aa)?;
        let (swapped, c_bab) = composition(&hom_ba, &hom_ab, &hom_bb)?;
        let swap = swapped.pair(&pairs.to_total, &pairs.fib.map)?;
        let c_bab = swap.then(&c_bab)?;
        let to_z = pairs.fib.map.then(&hom_ab.fib().map)?;

        let path_aa = path_object(hom_aa.fib(), choice)?;
        let path_bb = path_object(hom_bb.fib(), choice)?;
        let id_a = to_z.then(&hom_aa.identity()?)?;
        let id_b = to_z.then(&hom_bb.identity()?)?;
        let left_inverse = pullback(&path_aa.boundary, &path_aa.square.pair(&c_aba, &id_a)?)?;
        let right_inverse = pullback(&path_bb.boundary, &path_bb.square.pair(&c_bab, &id_b)?)?;

        let to_hom = FibrationMap::new(pairs.fib.map.clone())?;
        let left = left_inverse.fib.then(&to_hom)?;
        let right = right_inverse.fib.then(&to_hom)?;
        let eq = pullback(&right, &left.map)?;
        let projection = eq.fib.then(&left)?;
        let to_base = projection.then(hom_ab.fib())?;
        Ok(EqObject {
            choice,
            groupoid: eq.groupoid.clone(),
            hom_ab,
            hom_ba,
            hom_aa,
            hom_bb,
            pairs,
            left_composite: c_aba,
            right_composite: c_bab,
            path_aa,
            path_bb,
            left_inverse,
            right_inverse,
            eq,
            projection,
            to_base,
        })
    }

    /// The point of `Eq` over a pair of homotopy-inverse data, given by a
    /// functor `Y -> pairs` whose composites both land on identities; the
    /// homotopies are reflexivity paths.
    pub fn reflexive_point(&self, pair: &GFunctor) -> Result<GFunctor, TribeError> {
        let l = pair.then(&self.left_composite)?.then(&self.path_aa.anodyne)?;
        let r = pair.then(&self.right_composite)?.then(&self.path_bb.anodyne)?;
        let l = self.left_inverse.pair(pair, &l)?;
        let r = self.right_inverse.pair(pair, &r)?;
        self.eq.pair(&l, &r)
    }
}

/// `Eq(A, B)` for groupoids `A` and `B`, fibered over the point.
pub fn eq_object(a: &G, b: &G, choice: PathChoice) -> Result<EqObject, TribeError> {
    EqObject::new(&FibrationMap::to_terminal(a), &FibrationMap::to_terminal(b), choice)
}

/// `Eq(p) -> B × B` for a fibration `p : E -> B`, together with the
/// diagonal map `δ : B -> Eq(p)`.
#[derive(Debug)]
pub struct FibrationEq {
    pub p: FibrationMap,
    pub square: G,
    pub first: Pullback,
    pub second: Pullback,
    pub eq: EqObject,
    pub delta: GFunctor,
}

pub fn eq_of_fibration(p: &FibrationMap, choice: PathChoice) -> Result<FibrationEq, TribeError> {
    let b = p.base();
    let (square, pr1, pr2) = product_with_projections(b, b);
    let first = pullback(p, &pr1)?;
    let second = pullback(p, &pr2)?;
    let x1 = first.fib.clone();
    let x2 = second.fib.clone();
    let eq = EqObject::new(&x1, &x2, choice)?;
    let (nb, mb) = (b.object_count() as Obj, b.morphism_count() as Mor);
    let diag = GFunctor::unchecked(
        b.clone(),
        square.clone(),
        b.objects().map(|o| o * nb + o).collect(),
        b.morphisms().map(|m| m * mb + m).collect(),
    );
    let swap_point = |from: &Pullback, to: &Pullback, h: &FiberedHom| {
        h.pi.transpose_from(
            &diag,
            |_, a| {
                let (z, e) = from.parts_obj(a);
                to.obj(z, e).and_then(|a2| h.pair.obj(a, a2)).unwrap_or(Obj::MAX)
            },
            |_, n| {
                let (zm, en) = from.parts_mor(n);
                to.mor(zm, en).and_then(|n2| h.pair.mor(n, n2)).unwrap_or(Mor::MAX)
            },
        )
    };
    let d12 = swap_point(&first, &second, &eq.hom_ab)?;
    let d21 = swap_point(&second, &first, &eq.hom_ba)?;
    let pair = eq.pairs.pair(&d12, &d21)?;
    let delta = eq.reflexive_point(&pair)?;
    Ok(FibrationEq {
        p: p.clone(),
        square,
        first,
        second,
        eq,
        delta,
    })
}

/// Result of the univalence check with both path objects.
#[derive(Clone, Debug)]
pub struct Univalence {
    pub arrows: bool,
    pub composable: bool,
    pub marked: bool,
}

impl Univalence {
    pub fn agrees(&self) -> bool {
        self.arrows == self.composable && self.arrows == self.marked
    }
}

pub fn univalence_witness(p: &FibrationMap, choice: PathChoice) -> Result<Option<EquivalenceWitness>, TribeError> {
    let e = eq_of_fibration(p, choice)?;
    Ok(equivalence_check(&e.delta))
}

/// `δ : B -> Eq(p)` is a homotopy equivalence, computed with each path
/// object.
pub fn univalence_check(p: &FibrationMap) -> Result<Univalence, TribeError> {
    Ok(Univalence {
        arrows: univalence_witness(p, PathChoice::Arrows)?.is_some(),
        composable: univalence_witness(p, PathChoice::Composable)?.is_some(),
        marked: univalence_witness(p, PathChoice::Marked)?.is_some(),
    })
}

impl FiberedHom {
    /// The functor named by an object, when the base is a single point.
    pub fn as_functor(&self, o: Obj) -> GFunctor {
        let (x1, x2) = (self.source.total(), self.target.total());
        let id = self.groupoid().id(o);
        GFunctor::unchecked(
            x1.clone(),
            x2.clone(),
            x1.objects().map(|a| self.apply(o, a)).collect(),
            x1.morphisms().map(|m| self.apply_mor(id, m)).collect(),
        )
    }

    /// Components of a vertical morphism as a natural transformation, when
    /// the base is a single point.
    pub fn components(&self, m: Mor) -> Vec<Mor> {
        let x1 = self.source.total();
        x1.objects().map(|a| self.apply_mor(m, x1.id(a))).collect()
    }
}

/// Decoded point data `(f, g, H, h, K)` of an absolute `Eq(A, B)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EquivalenceData {
    pub f: (Vec<Obj>, Vec<Mor>),
    pub g: (Vec<Obj>, Vec<Mor>),
    /// `g ∘ f ⇒ id`.
    pub left: Vec<Mor>,
    pub h: (Vec<Obj>, Vec<Mor>),
    /// `f ∘ h ⇒ id`.
    pub right: Vec<Mor>,
}

impl EqObject {
    /// Read off the equivalence data of an object of an absolute `Eq(A, B)`
    /// built with arrow path objects.
    pub fn decode(&self, o: Obj) -> EquivalenceData {
        let key = |f: GFunctor| (f.obj, f.mor);
        let (l, r) = self.eq.parts_obj(o);
        let (lp, lpath) = self.left_inverse.parts_obj(l);
        let (rp, rpath) = self.right_inverse.parts_obj(r);
        let (f, g) = self.pairs.parts_obj(lp);
        let (_, h) = self.pairs.parts_obj(rp);
        let lv = self.path_aa.chain(lpath)[0];
        let rv = self.path_bb.chain(rpath)[0];
        EquivalenceData {
            f: key(self.hom_ab.as_functor(f)),
            g: key(self.hom_ba.as_functor(g)),
            left: self.hom_aa.components(lv),
            h: key(self.hom_ba.as_functor(h)),
            right: self.hom_bb.components(rv),
        }
    }

    /// The map induced by the path-object comparison into an `Eq` built from
    /// the same homs with another path object.
    pub fn compare(&self, other: &EqObject) -> Result<GFunctor, TribeError> {
        let pa = self.path_aa.compare(&other.path_aa)?;
        let pb = self.path_bb.compare(&other.path_bb)?;
        let l = other
            .left_inverse
            .pair(&self.left_inverse.fib.map, &self.left_inverse.to_total.then(&pa)?)?;
        let r = other
            .right_inverse
            .pair(&self.right_inverse.fib.map, &self.right_inverse.to_total.then(&pb)?)?;
        other
            .eq
            .pair(&self.eq.fib.map.then(&l)?, &self.eq.to_total.then(&r)?)
    }
}
