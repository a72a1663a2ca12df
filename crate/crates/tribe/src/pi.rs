//! Dependent products along fibrations.
//!
//! For `p : E -> B` and `q : X -> E`, an object of `Π_p q` over `b` is a
//! strict section of `q` over the fiber `E_b`. A morphism over `β : b -> b'`
//! is a family of morphisms `μ_e : s(e) -> s'(φ_e)` lying over the chosen
//! lifts `φ_e` of `β`, natural in the vertical morphisms of `E_b`. Its value
//! at any `χ : e -> e'` over `β` is `s'(χ ∘ φ_e⁻¹) ∘ μ_e`.

use std::ops::ControlFlow;

use crate::error::TribeError;
use crate::fibration::{pullback, Fiber, FibrationMap, Pullback};
use crate::functor::{same, GFunctor, Problem};
use crate::groupoid::{Builder, Labelled, Mor, Obj, G};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Section {
    pub base: Obj,
    /// Images of the fiber objects, in fiber order.
    pub obj: Vec<Obj>,
    /// Images of the fiber morphisms, in fiber order.
    pub mor: Vec<Mor>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Family {
    pub src: Obj,
    pub dst: Obj,
    pub over: Mor,
    /// Values at the chosen lifts, in fiber order of the source base object.
    pub values: Vec<Mor>,
}

#[derive(Debug)]
pub struct Pi {
    pub p: FibrationMap,
    pub q: FibrationMap,
    pub groupoid: G,
    pub fib: FibrationMap,
    fibers: Vec<Fiber>,
    /// Position of each object of `E` in its fiber.
    obj_pos: Vec<u32>,
    /// Position of each vertical morphism of `E` in its fiber, else `u32::MAX`.
    mor_pos: Vec<u32>,
    labels: Labelled<Section, Family>,
}

struct Ctx<'a> {
    p: &'a FibrationMap,
    x: &'a G,
    fibers: &'a [Fiber],
    obj_pos: &'a [u32],
    mor_pos: &'a [u32],
    sections: &'a [Section],
}

impl Ctx<'_> {
    fn at(&self, s: &Section, e: Obj) -> Obj {
        s.obj[self.obj_pos[e as usize] as usize]
    }

    fn at_mor(&self, s: &Section, v: Mor) -> Mor {
        s.mor[self.mor_pos[v as usize] as usize]
    }

    fn eval(&self, f: &Family, chi: Mor) -> Mor {
        let e_g = self.p.total();
        let e = e_g.src(chi);
        let phi = self.p.lift(e, f.over);
        let mu = f.values[self.obj_pos[e as usize] as usize];
        let w = e_g.compose(chi, e_g.inv(phi));
        let t = &self.sections[f.dst as usize];
        self.x.compose(self.at_mor(t, w), mu)
    }

    fn compose(&self, g: &Family, f: &Family) -> Family {
        let b_g = self.p.base();
        let over = b_g.compose(g.over, f.over);
        let fiber = &self.fibers[b_g.src(f.over) as usize];
        let values = fiber
            .inclusion
            .obj
            .iter()
            .zip(&f.values)
            .map(|(&e, &mu)| {
                let e_g = self.p.total();
                let chi = self.p.lift(e, over);
                let psi = e_g.compose(chi, e_g.inv(self.p.lift(e, f.over)));
                self.x.compose(self.eval(g, psi), mu)
            })
            .collect();
        Family {
            src: f.src,
            dst: g.dst,
            over,
            values,
        }
    }

    /// All natural families from `s` to `t` over `beta`.
    fn families(&self, q: &FibrationMap, s: &Section, t: &Section, beta: Mor) -> Vec<Vec<Mor>> {
        let e_g = self.p.total();
        let x = self.x;
        let fiber = &self.fibers[s.base as usize];
        let st = fiber.groupoid.structure();
        let inc = &fiber.inclusion;
        let phi = |e: Obj| self.p.lift(e, beta);
        let mut per_component: Vec<Vec<Vec<(usize, Mor)>>> = Vec::new();
        for comp in &st.components {
            let r = inc.ob(comp.root);
            let mut options = Vec::new();
            for &mu_r in x.hom(self.at(s, r), self.at(t, e_g.dst(phi(r)))) {
                if q.map.mo(mu_r) != phi(r) {
                    continue;
                }
                let mut vals: Vec<(usize, Mor)> = Vec::with_capacity(comp.objects.len());
                let mut value = vec![Mor::MAX; fiber.groupoid.object_count()];
                for &fo in &comp.objects {
                    let e = inc.ob(fo);
                    let tr = inc.mo(st.tree[fo as usize]);
                    let w = e_g.compose_all(&[phi(e), tr, e_g.inv(phi(r))]);
                    let mu = x.compose_all(&[self.at_mor(t, w), mu_r, x.inv(self.at_mor(s, tr))]);
                    value[fo as usize] = mu;
                    vals.push((fo as usize, mu));
                }
                let natural = comp.objects.iter().all(|&fo| {
                    fiber.groupoid.out(fo).iter().all(|&fv| {
                        let v = inc.mo(fv);
                        let (e1, e2) = (e_g.src(v), e_g.dst(v));
                        let w = e_g.compose_all(&[phi(e2), v, e_g.inv(phi(e1))]);
                        let lhs = x.compose(self.at_mor(t, w), value[fo as usize]);
                        let rhs = x.compose(value[fiber.groupoid.dst(fv) as usize], self.at_mor(s, v));
                        lhs == rhs
                    })
                });
                if natural {
                    options.push(vals);
                }
            }
            per_component.push(options);
        }
        let mut out = Vec::new();
        let mut current = vec![Mor::MAX; fiber.groupoid.object_count()];
        fn go(
            k: usize,
            parts: &[Vec<Vec<(usize, Mor)>>],
            current: &mut Vec<Mor>,
            out: &mut Vec<Vec<Mor>>,
        ) {
            if k == parts.len() {
                out.push(current.clone());
                return;
            }
            for choice in &parts[k] {
                for &(i, m) in choice {
                    current[i] = m;
                }
                go(k + 1, parts, current, out);
            }
        }
        go(0, &per_component, &mut current, &mut out);
        out
    }
}

impl Pi {
    pub fn new(p: &FibrationMap, q: &FibrationMap) -> Result<Pi, TribeError> {
        if !same(q.base(), p.total()) {
            return Err(TribeError::EndpointMismatch {
                what: "Π needs q to land in the total groupoid of p".into(),
            });
        }
        let e_g = p.total();
        let b_g = p.base();
        let x = q.total();
        let fibers: Vec<Fiber> = b_g.objects().map(|b| p.fiber(b)).collect();
        let mut obj_pos = vec![u32::MAX; e_g.object_count()];
        let mut mor_pos = vec![u32::MAX; e_g.morphism_count()];
        for f in &fibers {
            for (i, &e) in f.inclusion.obj.iter().enumerate() {
                obj_pos[e as usize] = i as u32;
            }
            for (i, &v) in f.inclusion.mor.iter().enumerate() {
                mor_pos[v as usize] = i as u32;
            }
        }
        let mut sections = Vec::new();
        let mut by_base: Vec<Vec<Obj>> = vec![Vec::new(); b_g.object_count()];
        for f in &fibers {
            Problem::new(&f.groupoid, x)
                .over(&q.map, &f.inclusion)
                .search(&mut |s| {
                    by_base[f.base_object as usize].push(sections.len() as Obj);
                    sections.push(Section {
                        base: f.base_object,
                        obj: s.obj.clone(),
                        mor: s.mor.clone(),
                    });
                    ControlFlow::Continue(())
                })?;
        }
        crate::error::limits::check_internal(sections.len(), 0)?;
        let ctx = Ctx {
            p,
            x,
            fibers: &fibers,
            obj_pos: &obj_pos,
            mor_pos: &mor_pos,
            sections: &sections,
        };
        let mut b: Builder<Section, Family> = Builder::new();
        for s in &sections {
            b.object(s.clone());
        }
        for beta in b_g.morphisms() {
            for &i in &by_base[b_g.src(beta) as usize] {
                for &j in &by_base[b_g.dst(beta) as usize] {
                    let (s, t) = (&sections[i as usize], &sections[j as usize]);
                    for values in ctx.families(q, s, t, beta) {
                        b.morphism(
                            Family {
                                src: i,
                                dst: j,
                                over: beta,
                                values,
                            },
                            i,
                            j,
                        )?;
                    }
                }
            }
        }
        let labels = b.finish(|g, f| ctx.compose(g, f))?;
        let g = labels.groupoid.clone();
        let fib = FibrationMap::new(GFunctor::unchecked(
            g.clone(),
            b_g.clone(),
            labels.objects.iter().map(|s| s.base).collect(),
            labels.morphisms.iter().map(|f| f.over).collect(),
        ))?;
        Ok(Pi {
            p: p.clone(),
            q: q.clone(),
            groupoid: g,
            fib,
            fibers,
            obj_pos,
            mor_pos,
            labels,
        })
    }

    fn ctx(&self) -> Ctx<'_> {
        Ctx {
            p: &self.p,
            x: self.q.total(),
            fibers: &self.fibers,
            obj_pos: &self.obj_pos,
            mor_pos: &self.mor_pos,
            sections: &self.labels.objects,
        }
    }

    pub fn section(&self, o: Obj) -> &Section {
        &self.labels.objects[o as usize]
    }

    pub fn family(&self, m: Mor) -> &Family {
        &self.labels.morphisms[m as usize]
    }

    pub fn section_index(&self, s: &Section) -> Option<Obj> {
        self.labels.obj(s)
    }

    /// The value of section `o` at `e`, an object of `X` over `e`.
    pub fn value(&self, o: Obj, e: Obj) -> Obj {
        self.ctx().at(self.section(o), e)
    }

    /// The value of morphism `m` of `Π` at `chi`, which must lie over `fib(m)`.
    pub fn value_mor(&self, m: Mor, chi: Mor) -> Mor {
        self.ctx().eval(self.family(m), chi)
    }

    /// The counit `p*Π -> X` on the pullback of `p` along `Π -> B`.
    pub fn evaluation(&self) -> Result<(Pullback, GFunctor), TribeError> {
        let pb = pullback(&self.p, &self.fib.map)?;
        let g = self.transpose_to(&GFunctor::identity(&self.groupoid), &pb)?;
        Ok((pb, g))
    }

    /// The transpose `p*Y -> X` of `F : Y -> Π`, where `pb` is the pullback
    /// of `p` along `fib ∘ F`.
    pub fn transpose_to(&self, f: &GFunctor, pb: &Pullback) -> Result<GFunctor, TribeError> {
        let r = f.then(&self.fib.map)?;
        if pb.along != r {
            return Err(TribeError::EndpointMismatch {
                what: "transpose needs the pullback along the composite".into(),
            });
        }
        let obj = pb
            .groupoid
            .objects()
            .map(|o| {
                let (y, e) = pb.parts_obj(o);
                self.value(f.ob(y), e)
            })
            .collect();
        let mor = pb
            .groupoid
            .morphisms()
            .map(|m| {
                let (my, n) = pb.parts_mor(m);
                self.value_mor(f.mo(my), n)
            })
            .collect();
        Ok(GFunctor::unchecked(
            pb.groupoid.clone(),
            self.q.total().clone(),
            obj,
            mor,
        ))
    }

    /// The transpose `Y -> Π` of a functor `p*Y -> X` over `E`, given by its
    /// action on pairs `(y, e)` and `(m, n)` with `r(y) = p(e)`.
    pub fn transpose_from(
        &self,
        r: &GFunctor,
        obj: impl Fn(Obj, Obj) -> Obj,
        mor: impl Fn(Mor, Mor) -> Mor,
    ) -> Result<GFunctor, TribeError> {
        if !same(&r.cod, self.p.base()) {
            return Err(TribeError::EndpointMismatch {
                what: "transpose needs a map into the base".into(),
            });
        }
        let y = &r.dom;
        let missing = |what: String| TribeError::NotCommuting { what };
        let mut fobj = Vec::with_capacity(y.object_count());
        for yo in y.objects() {
            let b = r.ob(yo);
            let fiber = &self.fibers[b as usize];
            let s = Section {
                base: b,
                obj: fiber.inclusion.obj.iter().map(|&e| obj(yo, e)).collect(),
                mor: fiber.inclusion.mor.iter().map(|&v| mor(y.id(yo), v)).collect(),
            };
            fobj.push(
                self.section_index(&s)
                    .ok_or_else(|| missing(format!("no section of q matches object {yo}")))?,
            );
        }
        let mut fmor = Vec::with_capacity(y.morphism_count());
        for m in y.morphisms() {
            let beta = r.mo(m);
            let fiber = &self.fibers[r.ob(y.src(m)) as usize];
            let fam = Family {
                src: fobj[y.src(m) as usize],
                dst: fobj[y.dst(m) as usize],
                over: beta,
                values: fiber
                    .inclusion
                    .obj
                    .iter()
                    .map(|&e| mor(m, self.p.lift(e, beta)))
                    .collect(),
            };
            fmor.push(
                self.labels
                    .mor(&fam)
                    .ok_or_else(|| missing(format!("no natural family matches morphism {m}")))?,
            );
        }
        Ok(GFunctor::unchecked(y.clone(), self.groupoid.clone(), fobj, fmor))
    }

    /// Transpose of an explicit functor on the pullback of `p` along `r`.
    pub fn transpose_from_functor(&self, pb: &Pullback, g: &GFunctor) -> Result<GFunctor, TribeError> {
        if !same(&g.dom, &pb.groupoid) {
            return Err(TribeError::EndpointMismatch {
                what: "transpose needs a functor out of the pullback".into(),
            });
        }
        let lost = || TribeError::NotCommuting {
            what: "pair outside the pullback".into(),
        };
        let obj = |y, e| pb.obj(y, e).map(|o| g.ob(o));
        let mor = |m, n| pb.mor(m, n).map(|k| g.mo(k));
        let y = &pb.along.dom;
        for yo in y.objects() {
            for f in &self.fibers[pb.along.ob(yo) as usize].inclusion.obj {
                obj(yo, *f).ok_or_else(lost)?;
            }
        }
        self.transpose_from(
            &pb.along,
            |y, e| obj(y, e).unwrap_or(Obj::MAX),
            |m, n| mor(m, n).unwrap_or(Mor::MAX),
        )
    }

    /// `Π(h) : Π_p q -> Π_p q'` for `h : X -> X'` with `q' ∘ h = q`.
    pub fn map_along(&self, other: &Pi, h: &GFunctor) -> Result<GFunctor, TribeError> {
        if self.p != other.p || h.then(&other.q.map)? != self.q.map {
            return Err(TribeError::NotCommuting {
                what: "Π functoriality needs a map over the same total groupoid".into(),
            });
        }
        let mut obj = Vec::with_capacity(self.groupoid.object_count());
        for o in self.groupoid.objects() {
            let s = self.section(o);
            let image = Section {
                base: s.base,
                obj: s.obj.iter().map(|&x| h.ob(x)).collect(),
                mor: s.mor.iter().map(|&m| h.mo(m)).collect(),
            };
            obj.push(other.section_index(&image).ok_or_else(|| TribeError::NotCommuting {
                what: "image section missing".into(),
            })?);
        }
        let mut mor = Vec::with_capacity(self.groupoid.morphism_count());
        for m in self.groupoid.morphisms() {
            let f = self.family(m);
            let image = Family {
                src: obj[f.src as usize],
                dst: obj[f.dst as usize],
                over: f.over,
                values: f.values.iter().map(|&v| h.mo(v)).collect(),
            };
            mor.push(other.labels.mor(&image).ok_or_else(|| TribeError::NotCommuting {
                what: "image family missing".into(),
            })?);
        }
        Ok(GFunctor::unchecked(
            self.groupoid.clone(),
            other.groupoid.clone(),
            obj,
            mor,
        ))
    }
}
