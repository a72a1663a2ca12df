//! Contexts as iterated Grothendieck constructions, types as their
//! projections, terms as strict sections.

use std::cell::RefCell;
use std::rc::Rc;
use std::sync::Arc;

use grpd_tribe::eq::eq_object;
use grpd_tribe::fibration::{FibrationMap, PathChoice};
use grpd_tribe::functor::{equivalence_check, GFunctor};
use grpd_tribe::groupoid::{discrete, Builder, Labelled, Mor as GMor, Obj, G};
use hott_core::checker::normalize_type;
use hott_core::syntax::{substitute, weaken, Context, Term};

use crate::elab::{AType, ATerm};
use crate::error::{internal, DenoteError, Result};
use crate::model::{Env, MEnv, Model, STy};
use crate::value::{Code, Mor, Val};

type ObjLabel = (Obj, Val);
type MorLabel = (GMor, Obj, Obj, Mor);

/// The groupoid of points of a context, with the environment at each object
/// and the context morphism at each morphism.
pub struct Telescope {
    pub groupoid: G,
    pub envs: Vec<Env>,
    pub menvs: Vec<MEnv>,
    labels: Option<Labelled<ObjLabel, MorLabel>>,
}

impl Telescope {
    /// The empty context: one point.
    pub fn root() -> Telescope {
        Telescope {
            groupoid: discrete(1),
            envs: vec![Env::new()],
            menvs: vec![MEnv::new(Env::new(), Env::new(), Vec::new())],
            labels: None,
        }
    }

    /// The object over `parent` with last value `v`.
    pub fn object(&self, parent: Obj, v: &Val) -> Option<Obj> {
        self.labels.as_ref()?.obj(&(parent, v.clone()))
    }

    pub fn morphism(&self, parent: GMor, s: Obj, t: Obj, m: &Mor) -> Option<GMor> {
        self.labels.as_ref()?.mor(&(parent, s, t, m.clone()))
    }

    /// Value of the last variable at object `o`.
    pub fn last(&self, o: Obj) -> Option<&Val> {
        self.envs[o as usize].vals().last()
    }

    /// Component of morphism `m` at the last variable.
    pub fn last_mor(&self, m: GMor) -> Option<&Mor> {
        self.menvs[m as usize].mors().last()
    }
}

/// `Γ.T -> Γ`.
pub struct Extension {
    pub total: Telescope,
    pub projection: FibrationMap,
}

/// A term `Γ ⊢ t : T` as a section of `Γ.T -> Γ`.
pub struct Denotation {
    pub context: Rc<Telescope>,
    pub extension: Extension,
    pub section: GFunctor,
}

impl Denotation {
    pub fn values(&self) -> Vec<&Val> {
        self.section.obj.iter().map(|&o| self.extension.total.last(o).expect("nonempty")).collect()
    }

    pub fn components(&self) -> Vec<&Mor> {
        self.section
            .mor
            .iter()
            .map(|&m| self.extension.total.last_mor(m).expect("nonempty"))
            .collect()
    }

    /// Same context and type groupoids and the same section tables.
    pub fn same_table(&self, other: &Denotation) -> bool {
        let (a, b) = (&self.extension.total, &other.extension.total);
        self.context.groupoid.object_count() == other.context.groupoid.object_count()
            && self.context.groupoid.morphism_count() == other.context.groupoid.morphism_count()
            && a.groupoid.object_count() == b.groupoid.object_count()
            && a.groupoid.morphism_count() == b.groupoid.morphism_count()
            && self.section.obj == other.section.obj
            && self.section.mor == other.section.mor
            && self.values() == other.values()
            && self.components() == other.components()
    }
}

impl Model<'_> {
    /// Materialize `Γ.T` over a telescope.
    pub fn extend(&self, base: &Telescope, ty: &AType) -> Result<Extension> {
        let mut tys = Vec::with_capacity(base.envs.len());
        let mut fibers = Vec::with_capacity(base.envs.len());
        for env in &base.envs {
            let t = self.ty_at(ty, env)?;
            fibers.push(self.fiber(&t)?);
            tys.push(t);
        }
        let count: usize = fibers.iter().map(|f| f.len()).sum();
        grpd_tribe::error::limits::check_internal(count, 0)?;
        let mut b: Builder<ObjLabel, MorLabel> = Builder::new();
        let mut envs = Vec::with_capacity(count);
        let mut parent_of = Vec::with_capacity(count);
        let mut start = Vec::with_capacity(fibers.len());
        for (o, f) in fibers.iter().enumerate() {
            start.push(envs.len() as Obj);
            for v in &f.objs {
                b.object((o as Obj, v.clone()));
                envs.push(base.envs[o].push(v.clone(), tys[o].clone()));
                parent_of.push(o as Obj);
            }
        }
        let g = &base.groupoid;
        for j in g.morphisms() {
            let (s, e) = (g.src(j) as usize, g.dst(j) as usize);
            let mu = &base.menvs[j as usize];
            for (p, v) in fibers[s].objs.iter().enumerate() {
                let w0 = self.ty_obj(ty, mu, v)?;
                let q0 = fibers[e]
                    .index(&w0)
                    .ok_or_else(|| internal(format!("transported value {w0} is not canonical")))?;
                for &n in fibers[e].groupoid.out(q0) {
                    let (_, q, m) = &fibers[e].mors[n as usize];
                    let (so, to) = (start[s] + p as Obj, start[e] + q);
                    b.morphism((j, so, to, m.clone()), so, to)?;
                }
            }
        }
        let err = RefCell::new(None);
        let last = |o: Obj| envs[o as usize].vals().last().expect("extended").clone();
        let labels = b.finish(|gl, fl| {
            let (jf, a, _, fm) = fl;
            let (jg, bb, c, gm) = gl;
            let parent = g.compose(*jg, *jf);
            let run = || -> Result<Mor> {
                let (mu, nu) = (&base.menvs[*jf as usize], &base.menvs[*jg as usize]);
                let (xa, xb, xc) = (last(*a), last(*bb), last(*c));
                let moved = self.ty_obj(ty, mu, &xa)?;
                let t1 = self.ty_mor(ty, nu, &moved, &xb, fm)?;
                let s0 = self.ty_obj(ty, nu, &moved)?;
                let s1 = self.ty_obj(ty, nu, &xb)?;
                self.compose(&tys[parent_of[*c as usize] as usize], &s0, &s1, &xc, &t1, gm)
            };
            match run() {
                Ok(m) => (parent, *a, *c, m),
                Err(e) => {
                    err.borrow_mut().get_or_insert(e);
                    (parent, *a, *c, Mor::Triv)
                }
            }
        });
        if let Some(e) = err.into_inner() {
            return Err(e);
        }
        let labels = labels?;
        let menvs = labels
            .morphisms
            .iter()
            .map(|(j, a, c, m)| {
                let (s, e) = (parent_of[*a as usize] as usize, parent_of[*c as usize] as usize);
                base.menvs[*j as usize].push(last(*a), last(*c), tys[s].clone(), tys[e].clone(), m.clone())
            })
            .collect();
        let map = GFunctor::new(
            labels.groupoid.clone(),
            base.groupoid.clone(),
            labels.objects.iter().map(|(o, _)| *o).collect(),
            labels.morphisms.iter().map(|(j, ..)| *j).collect(),
        )?;
        let projection = FibrationMap::new(map)?;
        Ok(Extension {
            total: Telescope {
                groupoid: labels.groupoid.clone(),
                envs,
                menvs,
                labels: Some(labels),
            },
            projection,
        })
    }

    /// The telescope of a kernel context.
    pub fn telescope(&self, ctx: &Context) -> Result<Telescope> {
        let mut tel = Telescope::root();
        let mut prefix = Context::new();
        for entry in &ctx.entries {
            let aty = self.elab.any_ty(&prefix, entry)?;
            tel = self.extend(&tel, &aty)?.total;
            prefix.push(entry.clone());
        }
        Ok(tel)
    }

    /// The section of `Γ.T -> Γ` given by an elaborated term.
    pub fn section(&self, context: Rc<Telescope>, ty: &AType, term: &ATerm) -> Result<Denotation> {
        let extension = self.extend(&context, ty)?;
        let total = &extension.total;
        let n = context.envs.len();
        let (mut raw, mut vals, mut phis, mut obj) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for (o, env) in context.envs.iter().enumerate() {
            let t = self.ty_at(ty, env)?;
            let v = self.obj(term, env)?;
            let (v2, phi) = self.canon(&t, &v)?;
            let idx = total.object(o as Obj, &v2).ok_or_else(|| match (&t, &v2) {
                (STy::Univ, Val::Code(c)) => DenoteError::CodeTooLarge {
                    size: c.size(),
                    k: self.bound(),
                },
                _ => internal(format!("value {v2} is not an object of its fiber")),
            })?;
            raw.push(v);
            vals.push(v2);
            phis.push(phi);
            obj.push(idx);
        }
        debug_assert_eq!(obj.len(), n);
        let g = &context.groupoid;
        let mut mor = Vec::with_capacity(g.morphism_count());
        for j in g.morphisms() {
            let mu = &context.menvs[j as usize];
            let (s, e) = (g.src(j) as usize, g.dst(j) as usize);
            let mut c = self.mor(term, mu)?;
            if raw[s] != vals[s] || raw[e] != vals[e] {
                let te = self.ty_at(ty, &mu.dst)?;
                let a = self.ty_obj(ty, mu, &raw[s])?;
                let b = self.ty_obj(ty, mu, &vals[s])?;
                let moved = self.ty_mor(ty, mu, &raw[s], &vals[s], &phis[s])?;
                let back = self.inverse(&te, &a, &b, &moved)?;
                let c1 = self.compose(&te, &b, &a, &raw[e], &back, &c)?;
                c = self.compose(&te, &b, &raw[e], &vals[e], &c1, &phis[e])?;
            }
            let idx = total
                .morphism(j, obj[s], obj[e], &c)
                .ok_or_else(|| internal(format!("component {c} is not a morphism of the type")))?;
            mor.push(idx);
        }
        let section = GFunctor::new(context.groupoid.clone(), total.groupoid.clone(), obj, mor)?;
        let back = section.then(&extension.projection.map)?;
        if back != GFunctor::identity(&context.groupoid) {
            return Err(internal("section does not split the projection"));
        }
        Ok(Denotation {
            context,
            extension,
            section,
        })
    }

    /// Denote `Γ ⊢ t : T` for a checked term.
    pub fn denote_term(&self, ctx: &Context, t: &Term, ty: &Term) -> Result<Denotation> {
        let context = Rc::new(self.telescope(ctx)?);
        self.denote_in(context, ctx, t, ty)
    }

    fn denote_in(&self, context: Rc<Telescope>, ctx: &Context, t: &Term, ty: &Term) -> Result<Denotation> {
        let sig = self.signature();
        let nty = normalize_type(sig, ctx, ty)?;
        let aty = self.elab.ty(ctx, &nty)?;
        let term = self.elab.check(ctx, t, &nty)?;
        self.section(context, &aty, &term)
    }

    /// Denote a checked declaration. Its leading Π binders become the
    /// context, so the result is a section over the groupoid of arguments.
    pub fn denote_decl(&self, name: &str) -> Result<Denotation> {
        let sig = self.signature();
        let unknown = || DenoteError::UnknownDecl(name.to_string());
        let entry = sig.get(name).ok_or_else(unknown)?;
        let mut body: Term = match &entry.body_term {
            Some(b) => (**b).clone(),
            None => return Err(DenoteError::Unsupported(format!("postulate `{name}`"))),
        };
        let mut ty = sig.normal_type(name).ok_or_else(unknown)?;
        let mut ctx = Context::new();
        while let Term::Pi(a, b) = ty {
            ctx.push(a.clone());
            body = match body {
                Term::Lam(inner) => (*inner).clone(),
                other => Term::App(Arc::new(weaken(&other, 1, 0)), Term::var(0)),
            };
            ty = (*b).clone();
        }
        self.denote_term(&ctx, &body, &ty)
    }

    /// The fiber of a type at the point given by `vals`, outermost first.
    pub fn type_at_point(&self, ctx: &Context, ty: &Term, vals: &[Val]) -> Result<STy> {
        let mut env = Env::new();
        let mut prefix = Context::new();
        for (entry, v) in ctx.entries.iter().zip(vals) {
            let t = self.type_at(&prefix, entry, &env)?;
            env = env.push(v.clone(), t);
            prefix.push(entry.clone());
        }
        self.type_at(ctx, ty, &env)
    }

    /// `U0.El -> U0`.
    pub fn el_fibration(&self) -> Result<FibrationMap> {
        let mut ctx = Context::new();
        ctx.push(Term::univ(0));
        let base = self.telescope(&ctx)?;
        let el = self.elab.any_ty(&ctx, &Term::El(Term::var(0)))?;
        Ok(self.extend(&base, &el)?.projection)
    }

    /// `t[s/x]` denotes the composite of the denotation of `t` with the
    /// section `⟨id, s⟩`, on the nose. `x : a` is the last variable of
    /// `ctx, a`; `ty` is the type of `t` there.
    pub fn substitution_coherence(&self, ctx: &Context, a: &Term, t: &Term, ty: &Term, s: &Term) -> Result<bool> {
        let context = Rc::new(self.telescope(ctx)?);
        let ds = self.denote_in(context.clone(), ctx, s, a)?;
        let mut wider = ctx.clone();
        wider.push(Arc::new(a.clone()));
        let dt = self.denote_in(Rc::new(self.extend(&context, &*self.elab.any_ty(ctx, a)?)?.total), &wider, t, ty)?;
        let dsub = self.denote_in(context, ctx, &substitute(t, 0, s), &substitute(ty, 0, s))?;
        let (vt, ct) = (dt.values(), dt.components());
        let (vsub, csub) = (dsub.values(), dsub.components());
        let objs = ds.section.obj.iter().enumerate().all(|(o, &x)| vsub[o] == vt[x as usize]);
        let mors = ds.section.mor.iter().enumerate().all(|(m, &x)| csub[m] == ct[x as usize]);
        Ok(objs && mors)
    }
}

/// Equivalence data of finite sets as the tuple read off by `eq_object`.
fn decode_equiv(v: &Val, n: usize, m: usize) -> Result<grpd_tribe::eq::EquivalenceData> {
    let bad = || internal(format!("malformed equivalence {v}"));
    let fun = |f: &Val| -> Result<(Vec<Obj>, Vec<GMor>)> {
        let t = f.as_table().ok_or_else(bad)?;
        let objs: Vec<Obj> = t
            .objs
            .iter()
            .map(|x| match x {
                Val::Elem(i) => Ok(*i),
                _ => Err(bad()),
            })
            .collect::<Result<_>>()?;
        // discrete groupoids number the identity of `i` as `i`
        Ok((objs.clone(), objs))
    };
    let ids = |h: &Val, len: usize| -> Result<Vec<GMor>> {
        let t = h.as_table().ok_or_else(bad)?;
        if t.objs.len() != len || t.objs.iter().any(|p| !matches!(p, Val::Path(_))) {
            return Err(bad());
        }
        Ok((0..len as GMor).collect())
    };
    let (f, rest) = v.parts().ok_or_else(bad)?;
    let (l, r) = rest.parts().ok_or_else(bad)?;
    let ((g, hl), (h, hr)) = (l.parts().ok_or_else(bad)?, r.parts().ok_or_else(bad)?);
    Ok(grpd_tribe::eq::EquivalenceData {
        f: fun(f)?,
        g: fun(g)?,
        left: ids(hl, n)?,
        h: fun(h)?,
        right: ids(hr, m)?,
    })
}

/// The fiber of `El (Equiv0 A B)` at `A = fin n`, `B = fin m` against
/// `Eq(n, m)` of discrete groupoids: the comparison must be an equivalence.
pub fn equiv_denotation_check(model: &Model<'_>, n: u32, m: u32) -> Result<bool> {
    let mut ctx = Context::new();
    ctx.push(Term::univ(0));
    ctx.push(Term::univ(0));
    let equiv = Term::App(
        Arc::new(Term::App(Arc::new(Term::Global("Equiv0".into())), Term::var(1))),
        Term::var(0),
    );
    let ty = Term::El(Arc::new(equiv));
    let point = [Val::code(Code::Fin(n)), Val::code(Code::Fin(m))];
    let fiber = model.fiber(&model.type_at_point(&ctx, &ty, &point)?)?;
    let eq = eq_object(&discrete(n as usize), &discrete(m as usize), PathChoice::Arrows)?;
    let decoded: Vec<_> = eq.groupoid.objects().map(|o| eq.decode(o)).collect();
    let mut obj = Vec::with_capacity(fiber.len());
    for v in &fiber.objs {
        let data = decode_equiv(v, n as usize, m as usize)?;
        match decoded.iter().position(|d| *d == data) {
            Some(o) => obj.push(o as Obj),
            None => return Ok(false),
        }
    }
    if !fiber.groupoid.is_discrete() || !eq.groupoid.is_discrete() {
        return Ok(false);
    }
    let mor = obj.iter().map(|&o| eq.groupoid.id(o)).collect();
    let f = GFunctor::new(fiber.groupoid.clone(), eq.groupoid.clone(), obj, mor)?;
    Ok(equivalence_check(&f).is_some())
}
