//! Isofibrations, pullbacks, path objects and factorizations.

use std::collections::HashMap;

use crate::error::TribeError;
use crate::functor::{equivalence_check, same, GFunctor, Problem};
use crate::groupoid::{Builder, FinGroupoid, Labelled, Mor, Obj, G};

/// A functor `p : E -> B` with a chosen lift for every object of `E` and
/// every morphism out of its image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibrationMap {
    pub map: GFunctor,
    /// `lifts[e][k]` lies over `out(p(e))[k]` and starts at `e`.
    lifts: Vec<Vec<Mor>>,
}

impl FibrationMap {
    pub fn new(map: GFunctor) -> Result<Self, TribeError> {
        let (e_g, b_g) = (&map.dom, &map.cod);
        let mut lifts = Vec::with_capacity(e_g.object_count());
        for e in e_g.objects() {
            let b = map.ob(e);
            let mut row = vec![Mor::MAX; b_g.out(b).len()];
            row[b_g.out_index(b_g.id(b))] = e_g.id(e);
            for &m in e_g.out(e) {
                let k = b_g.out_index(map.mo(m));
                if row[k] == Mor::MAX {
                    row[k] = m;
                }
            }
            if let Some(k) = row.iter().position(|&m| m == Mor::MAX) {
                return Err(TribeError::NotIsofibration {
                    object: e,
                    morphism: b_g.out(b)[k],
                });
            }
            lifts.push(row);
        }
        Ok(FibrationMap { map, lifts })
    }

    pub fn identity(g: &G) -> Self {
        Self::new(GFunctor::identity(g)).expect("identities are fibrations")
    }

    pub fn to_terminal(g: &G) -> Self {
        Self::new(GFunctor::to_terminal(g)).expect("terminal maps are fibrations")
    }

    pub fn total(&self) -> &G {
        &self.map.dom
    }

    pub fn base(&self) -> &G {
        &self.map.cod
    }

    /// The chosen morphism out of `e` lying over `beta`.
    pub fn lift(&self, e: Obj, beta: Mor) -> Mor {
        debug_assert_eq!(self.base().src(beta), self.map.ob(e));
        self.lifts[e as usize][self.base().out_index(beta)]
    }

    pub fn validate(&self) -> Result<(), TribeError> {
        self.map.validate()?;
        let (e_g, b_g) = (self.total(), self.base());
        for e in e_g.objects() {
            for &beta in b_g.out(self.map.ob(e)) {
                let m = self.lift(e, beta);
                if e_g.src(m) != e || self.map.mo(m) != beta {
                    return Err(TribeError::NotIsofibration {
                        object: e,
                        morphism: beta,
                    });
                }
            }
        }
        Ok(())
    }

    /// `next ∘ self`, itself a fibration.
    pub fn then(&self, next: &FibrationMap) -> Result<FibrationMap, TribeError> {
        FibrationMap::new(self.map.then(&next.map)?)
    }

    /// The strict fiber over `b` with its inclusion into the total groupoid.
    pub fn fiber(&self, b: Obj) -> Fiber {
        let e_g = self.total();
        let objects: Vec<Obj> = e_g.objects().filter(|&e| self.map.ob(e) == b).collect();
        let mut builder: Builder<Obj, Mor> = Builder::new();
        for &e in &objects {
            builder.object(e);
        }
        let id_b = self.base().id(b);
        for &e in &objects {
            for &m in e_g.out(e) {
                if self.map.mo(m) == id_b {
                    let (s, t) = (builder.object(e), builder.object(e_g.dst(m)));
                    builder.morphism(m, s, t).expect("fiber within limits");
                }
            }
        }
        let built = builder
            .finish(|&g, &f| e_g.compose(g, f))
            .expect("fibers are groupoids");
        let inclusion = GFunctor::unchecked(
            built.groupoid.clone(),
            e_g.clone(),
            built.objects.clone(),
            built.morphisms.clone(),
        );
        Fiber {
            base_object: b,
            groupoid: built.groupoid,
            inclusion,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Fiber {
    pub base_object: Obj,
    pub groupoid: G,
    pub inclusion: GFunctor,
}

/// The strict pullback `X ×_B E` of a fibration `p : E -> B` along
/// `f : X -> B`, with objects `(x, e)` such that `f(x) = p(e)`.
#[derive(Debug)]
pub struct Pullback {
    pub groupoid: G,
    /// The pulled-back fibration `X ×_B E -> X`.
    pub fib: FibrationMap,
    /// The projection to `E`.
    pub to_total: GFunctor,
    pub along: GFunctor,
    pub of: FibrationMap,
    labels: Labelled<(Obj, Obj), (Mor, Mor)>,
}

pub fn pullback(p: &FibrationMap, f: &GFunctor) -> Result<Pullback, TribeError> {
    if !same(&f.cod, p.base()) {
        return Err(TribeError::EndpointMismatch {
            what: "pullback along a functor into a different base".into(),
        });
    }
    let (x_g, e_g) = (&f.dom, p.total());
    let mut over: HashMap<Obj, Vec<Obj>> = HashMap::new();
    for e in e_g.objects() {
        over.entry(p.map.ob(e)).or_default().push(e);
    }
    let mut b: Builder<(Obj, Obj), (Mor, Mor)> = Builder::new();
    for x in x_g.objects() {
        for &e in over.get(&f.ob(x)).map_or(&[][..], Vec::as_slice) {
            b.object((x, e));
        }
    }
    for m in x_g.morphisms() {
        let (x, x2) = (x_g.src(m), x_g.dst(m));
        let beta = f.mo(m);
        for &e in over.get(&f.ob(x)).map_or(&[][..], Vec::as_slice) {
            for &n in e_g.out(e) {
                if p.map.mo(n) == beta {
                    let s = b.object_index(&(x, e)).expect("source present");
                    let t = b.object_index(&(x2, e_g.dst(n))).expect("target present");
                    b.morphism((m, n), s, t)?;
                }
            }
        }
    }
    let labels = b.finish(|&(m2, n2), &(m1, n1)| (x_g.compose(m2, m1), e_g.compose(n2, n1)))?;
    let g = labels.groupoid.clone();
    let to_x = GFunctor::unchecked(
        g.clone(),
        x_g.clone(),
        labels.objects.iter().map(|o| o.0).collect(),
        labels.morphisms.iter().map(|m| m.0).collect(),
    );
    let to_total = GFunctor::unchecked(
        g.clone(),
        e_g.clone(),
        labels.objects.iter().map(|o| o.1).collect(),
        labels.morphisms.iter().map(|m| m.1).collect(),
    );
    Ok(Pullback {
        groupoid: g,
        fib: FibrationMap::new(to_x)?,
        to_total,
        along: f.clone(),
        of: p.clone(),
        labels,
    })
}

impl Pullback {
    pub fn obj(&self, x: Obj, e: Obj) -> Option<Obj> {
        self.labels.obj(&(x, e))
    }

    pub fn mor(&self, m: Mor, n: Mor) -> Option<Mor> {
        self.labels.mor(&(m, n))
    }

    pub fn parts_obj(&self, o: Obj) -> (Obj, Obj) {
        self.labels.objects[o as usize]
    }

    pub fn parts_mor(&self, m: Mor) -> (Mor, Mor) {
        self.labels.morphisms[m as usize]
    }

    /// The mediating functor `Y -> X ×_B E` of a commuting cone.
    pub fn pair(&self, u: &GFunctor, v: &GFunctor) -> Result<GFunctor, TribeError> {
        if !same(&u.dom, &v.dom) || !same(&u.cod, &self.along.dom) || !same(&v.cod, self.of.total()) {
            return Err(TribeError::EndpointMismatch {
                what: "cone legs do not match the pullback".into(),
            });
        }
        let y = &u.dom;
        let mut obj = Vec::with_capacity(y.object_count());
        for o in y.objects() {
            obj.push(self.obj(u.ob(o), v.ob(o)).ok_or_else(|| TribeError::NotCommuting {
                what: format!("cone disagrees in the base at object {o}"),
            })?);
        }
        let mut mor = Vec::with_capacity(y.morphism_count());
        for m in y.morphisms() {
            mor.push(self.mor(u.mo(m), v.mo(m)).ok_or_else(|| TribeError::NotCommuting {
                what: format!("cone disagrees in the base at morphism {m}"),
            })?);
        }
        Ok(GFunctor::unchecked(y.clone(), self.groupoid.clone(), obj, mor))
    }

    pub fn square(&self) -> TribeSquare {
        TribeSquare {
            top: self.to_total.clone(),
            left: self.fib.map.clone(),
            right: self.of.map.clone(),
            bottom: self.along.clone(),
            pullback: true,
        }
    }
}

/// A commuting square `right ∘ top = bottom ∘ left`.
#[derive(Clone, Debug)]
pub struct TribeSquare {
    pub top: GFunctor,
    pub left: GFunctor,
    pub right: GFunctor,
    pub bottom: GFunctor,
    pub pullback: bool,
}

impl TribeSquare {
    pub fn commutes(&self) -> bool {
        match (self.top.then(&self.right), self.left.then(&self.bottom)) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }

    /// Number of functors from the cone vertex into the corner that factor
    /// the cone `(u, v)`; a pullback admits exactly one.
    pub fn mediating_count(&self, u: &GFunctor, v: &GFunctor) -> Result<usize, TribeError> {
        let corner = &self.top.dom;
        let mut n = 0;
        Problem::new(&u.dom, corner)
            .over(&self.left, u)
            .search(&mut |h| {
                if h.then(&self.top).is_ok_and(|t| &t == v) {
                    n += 1;
                }
                std::ops::ControlFlow::Continue(())
            })?;
        Ok(n)
    }
}

/// Which path object to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PathChoice {
    /// Vertical morphisms `e0 -> e1`.
    Arrows,
    /// Composable pairs of vertical morphisms `e0 -> e1 -> e2`.
    Composable,
    /// Vertical morphisms tagged with a point of the contractible `K2`.
    Marked,
}

impl PathChoice {
    pub fn steps(self) -> usize {
        match self {
            PathChoice::Arrows | PathChoice::Marked => 1,
            PathChoice::Composable => 2,
        }
    }

    fn marks(self) -> u8 {
        match self {
            PathChoice::Marked => 2,
            _ => 1,
        }
    }
}

/// A factorization `E -> P -> E ×_B E` of the fibered diagonal.
#[derive(Debug)]
pub struct PathObject {
    pub choice: PathChoice,
    pub groupoid: G,
    pub anodyne: GFunctor,
    pub boundary: FibrationMap,
    /// `E ×_B E`, the pullback of `p` along itself.
    pub square: Pullback,
    labels: Labelled<(Vec<Mor>, u8), (Obj, Mor, Obj)>,
}

pub fn path_object(p: &FibrationMap, choice: PathChoice) -> Result<PathObject, TribeError> {
    let e_g = p.total();
    let b_g = p.base();
    let square = pullback(p, &p.map)?;
    let vertical: Vec<Vec<Mor>> = e_g
        .objects()
        .map(|e| {
            e_g.out(e)
                .iter()
                .copied()
                .filter(|&m| b_g.is_identity(p.map.mo(m)))
                .collect()
        })
        .collect();
    let steps = choice.steps();
    let mut chains: Vec<(Vec<Mor>, u8)> = Vec::new();
    for e in e_g.objects() {
        let mut partial: Vec<Vec<Mor>> = vec![Vec::new()];
        for _ in 0..steps {
            let mut next = Vec::new();
            for c in partial {
                let end = c.last().map_or(e, |&m| e_g.dst(m));
                for &v in &vertical[end as usize] {
                    let mut c2 = c.clone();
                    c2.push(v);
                    next.push(c2);
                }
            }
            partial = next;
        }
        for c in partial {
            for mark in 0..choice.marks() {
                chains.push((c.clone(), mark));
            }
        }
    }
    let start = |c: &[Mor]| e_g.src(c[0]);
    let mut b: Builder<(Vec<Mor>, u8), (Obj, Mor, Obj)> = Builder::new();
    let mut by_start: HashMap<Obj, Vec<Obj>> = HashMap::new();
    for c in &chains {
        let i = b.object(c.clone());
        by_start.entry(start(&c.0)).or_default().push(i);
    }
    for (i, c) in chains.iter().enumerate() {
        for &a in e_g.out(start(&c.0)) {
            for &j in by_start.get(&e_g.dst(a)).map_or(&[][..], Vec::as_slice) {
                b.morphism((i as Obj, a, j), i as Obj, j)?;
            }
        }
    }
    let labels = b.finish(|&(_, a2, k), &(i, a1, _)| (i, e_g.compose(a2, a1), k))?;
    let g = labels.groupoid.clone();
    let chain = |o: Obj| &labels.objects[o as usize].0;
    // Transport the start morphism along each step to get the end morphism.
    let end_mor = |i: Obj, a: Mor, j: Obj| {
        let (c, d) = (chain(i), chain(j));
        let mut cur = a;
        for (v, w) in c.iter().zip(d) {
            cur = e_g.compose_all(&[*w, cur, e_g.inv(*v)]);
        }
        cur
    };
    let mut bobj = Vec::with_capacity(g.object_count());
    for o in g.objects() {
        let c = chain(o);
        let end = e_g.dst(*c.last().expect("nonempty chain"));
        bobj.push(square.obj(start(c), end).expect("endpoints lie over one base object"));
    }
    let mut bmor = Vec::with_capacity(g.morphism_count());
    for m in g.morphisms() {
        let (i, a, j) = labels.morphisms[m as usize];
        bmor.push(square.mor(a, end_mor(i, a, j)).expect("boundary morphism lies over one base morphism"));
    }
    let boundary = FibrationMap::new(GFunctor::unchecked(
        g.clone(),
        square.groupoid.clone(),
        bobj,
        bmor,
    ))?;
    let refl = |e: Obj| labels.obj(&(vec![e_g.id(e); steps], 0)).expect("identity chain");
    let anodyne = GFunctor::unchecked(
        e_g.clone(),
        g.clone(),
        e_g.objects().map(refl).collect(),
        e_g.morphisms()
            .map(|m| {
                labels
                    .mor(&(refl(e_g.src(m)), m, refl(e_g.dst(m))))
                    .expect("anodyne image")
            })
            .collect(),
    );
    Ok(PathObject {
        choice,
        groupoid: g,
        anodyne,
        boundary,
        square,
        labels,
    })
}

impl PathObject {
    /// The object of `P` given by a chain of vertical morphisms.
    pub fn obj(&self, chain: &[Mor]) -> Option<Obj> {
        self.labels.obj(&(chain.to_vec(), 0))
    }

    pub fn chain(&self, o: Obj) -> &[Mor] {
        &self.labels.objects[o as usize].0
    }

    pub fn mor(&self, src: Obj, start: Mor, dst: Obj) -> Option<Mor> {
        self.labels.mor(&(src, start, dst))
    }

    pub fn parts_mor(&self, m: Mor) -> (Obj, Mor, Obj) {
        self.labels.morphisms[m as usize]
    }

    /// The comparison into another path object of the same fibration that
    /// forgets marks and pads chains with identities; it commutes with both
    /// boundaries.
    pub fn compare(&self, other: &PathObject) -> Result<GFunctor, TribeError> {
        let e_g = self.anodyne.dom.clone();
        let pad = |o: Obj| {
            let c = self.chain(o);
            let mut c2 = c.to_vec();
            let end = e_g.dst(*c.last().expect("nonempty chain"));
            while c2.len() < other.choice.steps() {
                c2.push(e_g.id(end));
            }
            other.obj(&c2)
        };
        let missing = || TribeError::EndpointMismatch {
            what: "path objects cannot be compared (padding goes the other way)".into(),
        };
        let obj: Vec<Obj> = self
            .groupoid
            .objects()
            .map(|o| pad(o).ok_or_else(missing))
            .collect::<Result<_, _>>()?;
        let mor: Vec<Mor> = self
            .groupoid
            .morphisms()
            .map(|m| {
                let (i, a, j) = self.parts_mor(m);
                other.mor(obj[i as usize], a, obj[j as usize]).ok_or_else(missing)
            })
            .collect::<Result<_, _>>()?;
        Ok(GFunctor::unchecked(self.groupoid.clone(), other.groupoid.clone(), obj, mor))
    }
}

/// `E ×_B E -> B`.
pub fn fibered_square(p: &FibrationMap, square: &Pullback) -> Result<FibrationMap, TribeError> {
    square.fib.then(p)
}

/// Mapping path object factorization `f = fibration ∘ anodyne`.
#[derive(Debug)]
pub struct Factorization {
    pub groupoid: G,
    pub anodyne: GFunctor,
    pub fibration: FibrationMap,
}

pub fn factorize(f: &GFunctor) -> Result<Factorization, TribeError> {
    let (x_g, y_g) = (&f.dom, &f.cod);
    // Objects (x, β : f(x) -> y); morphisms (source, m : x -> x', target).
    let mut b: Builder<(Obj, Mor), (Obj, Mor, Obj)> = Builder::new();
    for x in x_g.objects() {
        for &beta in y_g.out(f.ob(x)) {
            b.object((x, beta));
        }
    }
    let objects: Vec<(Obj, Mor)> = x_g
        .objects()
        .flat_map(|x| y_g.out(f.ob(x)).iter().map(move |&beta| (x, beta)))
        .collect();
    for (i, &(x, _)) in objects.iter().enumerate() {
        for &m in x_g.out(x) {
            let x2 = x_g.dst(m);
            for &beta2 in y_g.out(f.ob(x2)) {
                let j = b.object_index(&(x2, beta2)).expect("object present");
                b.morphism((i as Obj, m, j), i as Obj, j)?;
            }
        }
    }
    let labels = b.finish(|&(_, m2, k), &(i, m1, _)| (i, x_g.compose(m2, m1), k))?;
    let g = labels.groupoid.clone();
    let fobj: Vec<Obj> = labels.objects.iter().map(|&(_, beta)| y_g.dst(beta)).collect();
    let fmor: Vec<Mor> = labels
        .morphisms
        .iter()
        .map(|&(i, m, j)| {
            let (b1, b2) = (labels.objects[i as usize].1, labels.objects[j as usize].1);
            y_g.compose_all(&[b2, f.mo(m), y_g.inv(b1)])
        })
        .collect();
    let fibration = FibrationMap::new(GFunctor::unchecked(g.clone(), y_g.clone(), fobj, fmor))?;
    let at = |x: Obj| labels.obj(&(x, y_g.id(f.ob(x)))).expect("identity path");
    let anodyne = GFunctor::unchecked(
        x_g.clone(),
        g.clone(),
        x_g.objects().map(at).collect(),
        x_g.morphisms()
            .map(|m| labels.mor(&(at(x_g.src(m)), m, at(x_g.dst(m)))).expect("anodyne image"))
            .collect(),
    );
    Ok(Factorization {
        groupoid: g,
        anodyne,
        fibration,
    })
}

/// Anodyne maps of the tribe: injective-on-objects homotopy equivalences.
pub fn is_anodyne(f: &GFunctor) -> bool {
    f.is_injective_on_objects() && equivalence_check(f).is_some()
}

/// Homotopy monomorphism: the boundary of the fibered path object admits a
/// strict section.
pub fn homotopy_mono_check(p: &FibrationMap) -> Result<bool, TribeError> {
    let path = path_object(p, PathChoice::Arrows)?;
    Ok(section(&path.boundary)?.is_some())
}

/// A functor `s` with `q ∘ s = id`.
pub fn section(q: &FibrationMap) -> Result<Option<GFunctor>, TribeError> {
    let id = GFunctor::identity(q.base());
    Problem::new(q.base(), q.total()).over(&q.map, &id).first()
}

/// Find a lift `h` in a square `p ∘ u = v ∘ i`: `h ∘ i = u` and `p ∘ h = v`.
pub fn lift_in_square(
    i: &GFunctor,
    p: &FibrationMap,
    u: &GFunctor,
    v: &GFunctor,
) -> Result<Option<GFunctor>, TribeError> {
    Problem::new(&i.cod, p.total()).over(&p.map, v).extending(i, u).first()
}

impl FinGroupoid {
    /// The fibration `self -> 1`.
    pub fn terminal_map(self: &G) -> FibrationMap {
        FibrationMap::to_terminal(self)
    }
}
