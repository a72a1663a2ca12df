//! The strict groupoid model. Types at a point of the context are
//! semantic types whose fibers are materialized on demand; terms evaluate to
//! objects at points and to morphisms along context morphisms.

use std::cell::{OnceCell, RefCell};
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::rc::Rc;

use grpd_tribe::error::TribeError;
use grpd_tribe::fibration::FibrationMap;
use grpd_tribe::functor::GFunctor;
use grpd_tribe::groupoid::{Builder, Labelled, Obj, G};
use grpd_tribe::pi::Pi;
use hott_core::checker::Signature;
use hott_core::syntax::{Axiom, Context, Name, Term};

use crate::elab::{AType, ATerm, ATypeKind, Elaborator};
use crate::error::{internal, DenoteError, Result};
use crate::value::{Code, Mor, Val};

/// Largest universe bound accepted.
pub const MAX_BOUND: u32 = 5;

/// A type at a point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum STy {
    Set(u32),
    Univ,
    Pi(Rc<STy>, Family),
    Sigma(Rc<STy>, Family),
    Id(Rc<STy>, Val, Val),
}

/// A family of types over the fiber of a domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// The elaborated type, in the environment extended by one variable.
    Syntax(Rc<AType>, Env),
    /// Decoded codes over the elements of a discrete domain, in fiber order.
    Codes(Rc<[Code]>),
}

/// Values of the bound variables with their types, innermost last.
#[derive(Clone, Default)]
pub struct Env {
    vals: Rc<Vec<Val>>,
    tys: Rc<Vec<STy>>,
    ids: Rc<OnceCell<Rc<Vec<Mor>>>>,
    hash: u64,
}

impl PartialEq for Env {
    fn eq(&self, other: &Self) -> bool {
        Rc::ptr_eq(&self.vals, &other.vals) || (self.hash == other.hash && self.vals == other.vals)
    }
}

impl Eq for Env {}

impl Hash for Env {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.hash);
    }
}

impl fmt::Debug for Env {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.vals.iter()).finish()
    }
}

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    /// Values, outermost first.
    pub fn vals(&self) -> &[Val] {
        &self.vals
    }

    pub fn tys(&self) -> &[STy] {
        &self.tys
    }

    pub fn val(&self, index: usize) -> &Val {
        &self.vals[self.vals.len() - 1 - index]
    }

    pub fn push(&self, v: Val, ty: STy) -> Env {
        let mut vals = (*self.vals).clone();
        let mut tys = (*self.tys).clone();
        let mut h = std::collections::hash_map::DefaultHasher::new();
        (self.hash, &v).hash(&mut h);
        vals.push(v);
        tys.push(ty);
        Env {
            vals: Rc::new(vals),
            tys: Rc::new(tys),
            ids: Rc::default(),
            hash: h.finish(),
        }
    }
}

/// A morphism of the context between two points, one component per variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MEnv {
    pub src: Env,
    pub dst: Env,
    mors: Rc<Vec<Mor>>,
}

impl MEnv {
    pub fn new(src: Env, dst: Env, mors: Vec<Mor>) -> MEnv {
        assert_eq!(src.len(), mors.len());
        MEnv {
            src,
            dst,
            mors: Rc::new(mors),
        }
    }

    pub fn mor(&self, index: usize) -> &Mor {
        &self.mors[self.mors.len() - 1 - index]
    }

    /// Components, outermost first.
    pub fn mors(&self) -> &[Mor] {
        &self.mors
    }

    pub fn push(&self, x: Val, y: Val, tx: STy, ty: STy, m: Mor) -> MEnv {
        let mut mors = (*self.mors).clone();
        mors.push(m);
        MEnv {
            src: self.src.push(x, tx),
            dst: self.dst.push(y, ty),
            mors: Rc::new(mors),
        }
    }
}

/// A materialized fiber: a finite groupoid labelled by values.
pub struct Fiber {
    pub objs: Vec<Val>,
    /// `(src, dst, morphism)` for each morphism of the groupoid.
    pub mors: Vec<(Obj, Obj, Mor)>,
    pub groupoid: G,
    obj_index: HashMap<Val, Obj>,
    mor_index: HashMap<(Obj, Obj, Mor), u32>,
}

impl fmt::Debug for Fiber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fiber")
            .field("objects", &self.objs.len())
            .field("morphisms", &self.mors.len())
            .finish()
    }
}

impl Fiber {
    fn from_labelled(l: Labelled<Val, (Obj, Obj, Mor)>) -> Fiber {
        Fiber {
            obj_index: l.object_index,
            mor_index: l.morphism_index,
            objs: l.objects,
            mors: l.morphisms,
            groupoid: l.groupoid,
        }
    }

    fn from_parts(groupoid: G, objs: Vec<Val>, mors: Vec<(Obj, Obj, Mor)>) -> Result<Fiber> {
        let obj_index: HashMap<Val, Obj> =
            objs.iter().cloned().enumerate().map(|(i, v)| (v, i as Obj)).collect();
        let mor_index: HashMap<(Obj, Obj, Mor), u32> =
            mors.iter().cloned().enumerate().map(|(i, m)| (m, i as u32)).collect();
        if obj_index.len() != objs.len() || mor_index.len() != mors.len() {
            return Err(internal("fiber labels are not distinct"));
        }
        Ok(Fiber {
            objs,
            mors,
            groupoid,
            obj_index,
            mor_index,
        })
    }

    pub fn len(&self) -> usize {
        self.objs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objs.is_empty()
    }

    pub fn index(&self, v: &Val) -> Option<Obj> {
        self.obj_index.get(v).copied()
    }

    pub fn mor_index(&self, s: Obj, t: Obj, m: &Mor) -> Option<u32> {
        self.mor_index.get(&(s, t, m.clone())).copied()
    }

    pub fn hom(&self, s: Obj, t: Obj) -> impl Iterator<Item = &Mor> {
        self.groupoid.hom(s, t).iter().map(|&m| &self.mors[m as usize].2)
    }
}

/// Decode a code into the type of its elements.
pub fn el(code: &Code) -> STy {
    match code {
        Code::Fin(n) => STy::Set(*n),
        Code::Pi(a, bs) => STy::Pi(Rc::new(el(a)), Family::Codes(bs.clone())),
        Code::Sigma(a, bs) => STy::Sigma(Rc::new(el(a)), Family::Codes(bs.clone())),
        Code::Id(a, x, y) => STy::Id(Rc::new(el(a)), x.clone(), y.clone()),
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, cur: &mut Vec<u32>, used: &mut Vec<bool>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n as usize {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i as usize] {
                used[i as usize] = true;
                cur.push(i);
                go(n, cur, used, out);
                cur.pop();
                used[i as usize] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(n, &mut Vec::new(), &mut vec![false; n as usize], &mut out);
    out
}

fn perm_of(m: &Mor) -> Result<&[u32]> {
    match m {
        Mor::Perm(p) => Ok(p),
        other => Err(internal(format!("expected a permutation, found {other}"))),
    }
}

fn path_of(v: &Val) -> Result<&Mor> {
    match v {
        Val::Path(m) => Ok(m),
        other => Err(internal(format!("expected a path, found {other}"))),
    }
}

fn pair_of(v: &Val) -> Result<(&Val, &Val)> {
    v.parts().ok_or_else(|| internal(format!("expected a pair, found {v}")))
}

fn mpair_of(m: &Mor) -> Result<(&Mor, &Mor)> {
    m.parts().ok_or_else(|| internal(format!("expected a pair of morphisms, found {m}")))
}

fn comps_of(m: &Mor) -> Result<&[Mor]> {
    match m {
        Mor::Fun(c) => Ok(c),
        other => Err(internal(format!("expected a transformation, found {other}"))),
    }
}

fn table_of(v: &Val) -> Result<&crate::value::Table> {
    v.as_table().ok_or_else(|| internal(format!("expected a function, found {v}")))
}

fn code_of(v: &Val) -> Result<&Code> {
    v.as_code().ok_or_else(|| internal(format!("expected a code, found {v}")))
}

fn missing(what: &str, v: &dyn fmt::Display) -> DenoteError {
    internal(format!("{what} {v} is not an object of its fiber"))
}

fn memoized(t: &ATerm) -> bool {
    matches!(
        t,
        ATerm::Lam { .. } | ATerm::App { .. } | ATerm::Let { .. } | ATerm::J { .. } | ATerm::CodePi(..) | ATerm::CodeSigma(..)
    )
}

pub struct Model<'s> {
    pub elab: Elaborator<'s>,
    k: u32,
    fibers: RefCell<HashMap<STy, Rc<Fiber>>>,
    globals: RefCell<HashMap<Name, Rc<(Rc<AType>, Val)>>>,
    axioms: RefCell<HashMap<Axiom, Val>>,
    objs: RefCell<HashMap<(usize, Env), Val>>,
    mors: RefCell<HashMap<(usize, MEnv), Mor>>,
}

impl<'s> Model<'s> {
    pub fn new(sig: &'s Signature, k: u32) -> Result<Model<'s>> {
        if k > MAX_BOUND {
            return Err(TribeError::ResourceCap {
                what: "universe bound",
                limit: MAX_BOUND as usize,
                actual: k as usize,
            }
            .into());
        }
        Ok(Model {
            elab: Elaborator::new(sig),
            k,
            fibers: RefCell::default(),
            globals: RefCell::default(),
            axioms: RefCell::default(),
            objs: RefCell::default(),
            mors: RefCell::default(),
        })
    }

    pub fn bound(&self) -> u32 {
        self.k
    }

    pub fn signature(&self) -> &'s Signature {
        self.elab.signature()
    }

    // ---- fibers ----

    pub fn fiber(&self, ty: &STy) -> Result<Rc<Fiber>> {
        if let Some(f) = self.fibers.borrow().get(ty) {
            return Ok(f.clone());
        }
        let f = Rc::new(self.materialize(ty)?);
        self.fibers.borrow_mut().insert(ty.clone(), f.clone());
        Ok(f)
    }

    fn materialize(&self, ty: &STy) -> Result<Fiber> {
        match ty {
            STy::Set(n) => {
                let objs: Vec<Val> = (0..*n).map(Val::Elem).collect();
                let mors = (0..*n).map(|i| (i, i, Mor::Triv)).collect();
                Fiber::from_parts(grpd_tribe::groupoid::discrete(*n as usize), objs, mors)
            }
            STy::Univ => {
                let mut b: Builder<Val, (Obj, Obj, Mor)> = Builder::new();
                for n in 0..=self.k {
                    let o = b.object(Val::code(Code::Fin(n)));
                    for p in permutations(n) {
                        b.morphism((o, o, Mor::perm(p)), o, o)?;
                    }
                }
                let l = b.finish(|g, f| {
                    let (p, q) = (perm_of(&f.2).unwrap(), perm_of(&g.2).unwrap());
                    (f.0, g.1, Mor::perm(p.iter().map(|&i| q[i as usize]).collect()))
                })?;
                Ok(Fiber::from_labelled(l))
            }
            STy::Id(a, x, y) => {
                let hs = self.homs(a, x, y)?;
                let n = hs.len() as u32;
                let objs = hs.into_iter().map(Val::path).collect();
                let mors = (0..n).map(|i| (i, i, Mor::Triv)).collect();
                Fiber::from_parts(grpd_tribe::groupoid::discrete(n as usize), objs, mors)
            }
            STy::Sigma(a, fam) => self.materialize_sigma(a, fam),
            STy::Pi(a, fam) => self.materialize_pi(a, fam),
        }
    }

    fn materialize_sigma(&self, a: &Rc<STy>, fam: &Family) -> Result<Fiber> {
        let whole = STy::Sigma(a.clone(), fam.clone());
        let d = self.fiber(a)?;
        let fibers: Vec<Rc<Fiber>> = d
            .objs
            .iter()
            .map(|x| self.fiber(&self.fam_at(a, fam, x)?))
            .collect::<Result<_>>()?;
        let total: usize = fibers.iter().map(|f| f.len()).sum();
        grpd_tribe::error::limits::check_internal(total, 0)?;
        let mut b: Builder<Val, (Obj, Obj, Mor)> = Builder::new();
        let mut objs = Vec::with_capacity(total);
        let mut start = Vec::with_capacity(fibers.len());
        for (x, f) in d.objs.iter().zip(&fibers) {
            start.push(objs.len() as Obj);
            for v in &f.objs {
                let pair = Val::pair(x.clone(), v.clone());
                b.object(pair.clone());
                objs.push(pair);
            }
        }
        for (s, t, m) in &d.mors {
            let (x, y) = (&d.objs[*s as usize], &d.objs[*t as usize]);
            let (fs, ft) = (&fibers[*s as usize], &fibers[*t as usize]);
            for (p, v) in fs.objs.iter().enumerate() {
                let w0 = self.fam_obj(a, fam, x, y, m, v)?;
                let q0 = ft.index(&w0).ok_or_else(|| missing("transported value", &w0))?;
                for &n in ft.groupoid.out(q0) {
                    let (_, q, nm) = &ft.mors[n as usize];
                    let (so, to) = (start[*s as usize] + p as Obj, start[*t as usize] + q);
                    b.morphism((so, to, Mor::pair(m.clone(), nm.clone())), so, to)?;
                }
            }
        }
        let err = RefCell::new(None);
        let l = b.finish(|g, f| {
            let (x, y, z) = (&objs[f.0 as usize], &objs[f.1 as usize], &objs[g.1 as usize]);
            match self.compose(&whole, x, y, z, &f.2, &g.2) {
                Ok(m) => (f.0, g.1, m),
                Err(e) => {
                    err.borrow_mut().get_or_insert(e);
                    (f.0, g.1, Mor::Triv)
                }
            }
        });
        if let Some(e) = err.into_inner() {
            return Err(e);
        }
        Ok(Fiber::from_labelled(l?))
    }

    fn materialize_pi(&self, a: &Rc<STy>, fam: &Family) -> Result<Fiber> {
        let d = self.fiber(a)?;
        let total = self.fiber(&STy::Sigma(a.clone(), fam.clone()))?;
        let first = |v: &Val| -> Result<Obj> {
            let (x, _) = pair_of(v)?;
            d.index(x).ok_or_else(|| missing("base value", x))
        };
        let obj: Vec<Obj> = total.objs.iter().map(first).collect::<Result<_>>()?;
        let mor: Vec<u32> = total
            .mors
            .iter()
            .map(|(s, t, m)| {
                let (bm, _) = mpair_of(m)?;
                d.mor_index(obj[*s as usize], obj[*t as usize], bm)
                    .ok_or_else(|| internal("projection of a total morphism"))
            })
            .collect::<Result<_>>()?;
        let q = FibrationMap::new(GFunctor::new(total.groupoid.clone(), d.groupoid.clone(), obj, mor)?)?;
        let p = FibrationMap::to_terminal(&d.groupoid);
        let pi = Pi::new(&p, &q)?;
        // Sections list values in the order of the fiber of `p`, which is
        // the whole of `d` but with its own morphism numbering.
        let incl = p.fiber(0).inclusion;
        let mut obj_pos = vec![0usize; d.len()];
        for (i, &e) in incl.obj.iter().enumerate() {
            obj_pos[e as usize] = i;
        }
        let mut mor_pos = vec![0usize; d.mors.len()];
        for (i, &e) in incl.mor.iter().enumerate() {
            mor_pos[e as usize] = i;
        }
        let second = |v: &Val| -> Result<Val> { Ok(pair_of(v)?.1.clone()) };
        let second_mor = |m: u32| -> Result<Mor> { Ok(mpair_of(&total.mors[m as usize].2)?.1.clone()) };
        let g = pi.groupoid.clone();
        let mut objs = Vec::with_capacity(g.object_count());
        for o in g.objects() {
            let s = pi.section(o);
            let vals = (0..d.len())
                .map(|i| second(&total.objs[s.obj[obj_pos[i]] as usize]))
                .collect::<Result<_>>()?;
            let comps = (0..d.mors.len())
                .map(|j| second_mor(s.mor[mor_pos[j]]))
                .collect::<Result<_>>()?;
            objs.push(Val::fun(vals, comps));
        }
        let mut mors = Vec::with_capacity(g.morphism_count());
        for m in g.morphisms() {
            let f = pi.family(m);
            let comps = (0..d.len())
                .map(|i| second_mor(f.values[obj_pos[i]]))
                .collect::<Result<Vec<_>>>()?;
            mors.push((g.src(m), g.dst(m), Mor::fun(comps)));
        }
        Fiber::from_parts(g, objs, mors)
    }

    // ---- structure of fibers ----

    pub fn fam_at(&self, dom: &STy, fam: &Family, x: &Val) -> Result<STy> {
        match fam {
            Family::Syntax(body, env) => self.ty_at(body, &env.push(x.clone(), dom.clone())),
            Family::Codes(cs) => {
                let i = self.fiber(dom)?.index(x).ok_or_else(|| missing("element", x))?;
                Ok(el(&cs[i as usize]))
            }
        }
    }

    /// Transport `v` in `F(x)` along `m : x -> y`.
    pub fn fam_obj(&self, dom: &STy, fam: &Family, x: &Val, y: &Val, m: &Mor, v: &Val) -> Result<Val> {
        match fam {
            Family::Syntax(body, env) => {
                let mu = self.identity_env(env)?.push(x.clone(), y.clone(), dom.clone(), dom.clone(), m.clone());
                self.ty_obj(body, &mu, v)
            }
            Family::Codes(_) => Ok(v.clone()),
        }
    }

    /// Transport `f : s -> t` in `F(x)` along `m : x -> y`.
    #[allow(clippy::too_many_arguments)]
    pub fn fam_mor(
        &self,
        dom: &STy,
        fam: &Family,
        x: &Val,
        y: &Val,
        m: &Mor,
        s: &Val,
        t: &Val,
        f: &Mor,
    ) -> Result<Mor> {
        match fam {
            Family::Syntax(body, env) => {
                let mu = self.identity_env(env)?.push(x.clone(), y.clone(), dom.clone(), dom.clone(), m.clone());
                self.ty_mor(body, &mu, s, t, f)
            }
            Family::Codes(_) => Ok(f.clone()),
        }
    }

    pub fn identity_env(&self, env: &Env) -> Result<MEnv> {
        if let Some(ids) = env.ids.get() {
            return Ok(MEnv {
                src: env.clone(),
                dst: env.clone(),
                mors: ids.clone(),
            });
        }
        let ids: Vec<Mor> = env
            .tys
            .iter()
            .zip(env.vals.iter())
            .map(|(t, v)| self.identity(t, v))
            .collect::<Result<_>>()?;
        let ids = Rc::new(ids);
        let _ = env.ids.set(ids.clone());
        Ok(MEnv {
            src: env.clone(),
            dst: env.clone(),
            mors: ids,
        })
    }

    pub fn identity(&self, _ty: &STy, x: &Val) -> Result<Mor> {
        if let Val::Code(c) = x {
            self.code_size(c)?;
        }
        Ok(x.identity())
    }

    fn code_size(&self, c: &Code) -> Result<u32> {
        let n = c.size();
        if n > 12 {
            return Err(TribeError::ResourceCap {
                what: "elements of a code",
                limit: 12,
                actual: n as usize,
            }
            .into());
        }
        Ok(n as u32)
    }

    /// `g ∘ f` for `f : x -> y`, `g : y -> z`.
    pub fn compose(&self, ty: &STy, x: &Val, y: &Val, z: &Val, f: &Mor, g: &Mor) -> Result<Mor> {
        Ok(match ty {
            STy::Set(_) | STy::Id(..) => Mor::Triv,
            STy::Univ => {
                let (p, q) = (perm_of(f)?, perm_of(g)?);
                Mor::perm(p.iter().map(|&i| q[i as usize]).collect())
            }
            STy::Sigma(a, fam) => {
                let ((a0, b0), (a1, b1), (a2, b2)) = (pair_of(x)?, pair_of(y)?, pair_of(z)?);
                let ((fa, fb), (ga, gb)) = (mpair_of(f)?, mpair_of(g)?);
                let ra = self.compose(a, a0, a1, a2, fa, ga)?;
                let moved = self.fam_obj(a, fam, a0, a1, fa, b0)?;
                let s0 = self.fam_obj(a, fam, a1, a2, ga, &moved)?;
                let s1 = self.fam_obj(a, fam, a1, a2, ga, b1)?;
                let t = self.fam_mor(a, fam, a1, a2, ga, &moved, b1, fb)?;
                let rb = self.compose(&self.fam_at(a, fam, a2)?, &s0, &s1, b2, &t, gb)?;
                Mor::pair(ra, rb)
            }
            STy::Pi(a, fam) => {
                let d = self.fiber(a)?;
                let (tx, ty_, tz) = (table_of(x)?, table_of(y)?, table_of(z)?);
                let (cf, cg) = (comps_of(f)?, comps_of(g)?);
                let comps = (0..d.len())
                    .map(|i| {
                        let fi = self.fam_at(a, fam, &d.objs[i])?;
                        self.compose(&fi, &tx.objs[i], &ty_.objs[i], &tz.objs[i], &cf[i], &cg[i])
                    })
                    .collect::<Result<_>>()?;
                Mor::fun(comps)
            }
        })
    }

    /// `f⁻¹` for `f : x -> y`.
    pub fn inverse(&self, ty: &STy, x: &Val, y: &Val, f: &Mor) -> Result<Mor> {
        Ok(match ty {
            STy::Set(_) | STy::Id(..) => Mor::Triv,
            STy::Univ => {
                let p = perm_of(f)?;
                let mut inv = vec![0; p.len()];
                for (i, &j) in p.iter().enumerate() {
                    inv[j as usize] = i as u32;
                }
                Mor::perm(inv)
            }
            STy::Sigma(a, fam) => {
                let ((a0, b0), (a1, b1)) = (pair_of(x)?, pair_of(y)?);
                let (fa, fb) = mpair_of(f)?;
                let fa_inv = self.inverse(a, a0, a1, fa)?;
                let moved = self.fam_obj(a, fam, a0, a1, fa, b0)?;
                let w = self.fam_mor(a, fam, a1, a0, &fa_inv, &moved, b1, fb)?;
                let t = self.fam_obj(a, fam, a1, a0, &fa_inv, b1)?;
                let rb = self.inverse(&self.fam_at(a, fam, a0)?, b0, &t, &w)?;
                Mor::pair(fa_inv, rb)
            }
            STy::Pi(a, fam) => {
                let d = self.fiber(a)?;
                let (tx, ty_) = (table_of(x)?, table_of(y)?);
                let cf = comps_of(f)?;
                let comps = (0..d.len())
                    .map(|i| self.inverse(&self.fam_at(a, fam, &d.objs[i])?, &tx.objs[i], &ty_.objs[i], &cf[i]))
                    .collect::<Result<_>>()?;
                Mor::fun(comps)
            }
        })
    }

    /// A fiber object isomorphic to `x`, with an isomorphism `x -> x̂`.
    pub fn canon(&self, ty: &STy, x: &Val) -> Result<(Val, Mor)> {
        Ok(match ty {
            STy::Set(_) | STy::Id(..) => (x.clone(), Mor::Triv),
            STy::Univ => {
                let n = self.code_size(code_of(x)?)?;
                (Val::code(Code::Fin(n)), Mor::perm((0..n).collect()))
            }
            STy::Sigma(a, fam) => {
                let (u, v) = pair_of(x)?;
                let (u2, phi) = self.canon(a, u)?;
                let moved = self.fam_obj(a, fam, u, &u2, &phi, v)?;
                let (v2, psi) = self.canon(&self.fam_at(a, fam, &u2)?, &moved)?;
                (Val::pair(u2, v2), Mor::pair(phi, psi))
            }
            STy::Pi(a, fam) => {
                let d = self.fiber(a)?;
                let t = table_of(x)?;
                let mut objs = Vec::with_capacity(d.len());
                let mut psis = Vec::with_capacity(d.len());
                for (u, v) in d.objs.iter().zip(&t.objs) {
                    let (v2, psi) = self.canon(&self.fam_at(a, fam, u)?, v)?;
                    objs.push(v2);
                    psis.push(psi);
                }
                if objs == t.objs {
                    return Ok((x.clone(), self.identity(ty, x)?));
                }
                let mut comps = Vec::with_capacity(d.mors.len());
                for (j, (s, e, m)) in d.mors.iter().enumerate() {
                    let (s, e) = (*s as usize, *e as usize);
                    let (u, w) = (&d.objs[s], &d.objs[e]);
                    let fy = self.fam_at(a, fam, w)?;
                    let a0 = self.fam_obj(a, fam, u, w, m, &objs[s])?;
                    let a1 = self.fam_obj(a, fam, u, w, m, &t.objs[s])?;
                    let moved = self.fam_mor(a, fam, u, w, m, &t.objs[s], &objs[s], &psis[s])?;
                    let back = self.inverse(&fy, &a1, &a0, &moved)?;
                    let c1 = self.compose(&fy, &a0, &a1, &t.objs[e], &back, &t.mors[j])?;
                    comps.push(self.compose(&fy, &a0, &t.objs[e], &objs[e], &c1, &psis[e])?);
                }
                (Val::fun(objs, comps), Mor::fun(psis))
            }
        })
    }

    /// Canonical object for `x`, failing when it lies outside the fiber.
    fn canon_in(&self, ty: &STy, fiber: &Fiber, x: &Val) -> Result<(Obj, Val, Mor)> {
        let (x2, phi) = self.canon(ty, x)?;
        match fiber.index(&x2) {
            Some(i) => Ok((i, x2, phi)),
            None => match (ty, &x2) {
                (STy::Univ, Val::Code(c)) => Err(DenoteError::CodeTooLarge {
                    size: c.size(),
                    k: self.k,
                }),
                _ => Err(missing("canonical value", &x2)),
            },
        }
    }

    /// Morphisms `x -> y`, in fiber order.
    pub fn homs(&self, ty: &STy, x: &Val, y: &Val) -> Result<Vec<Mor>> {
        if let STy::Univ = ty {
            let (n, m) = (self.code_size(code_of(x)?)?, self.code_size(code_of(y)?)?);
            return Ok(if n == m {
                permutations(n).into_iter().map(Mor::perm).collect()
            } else {
                Vec::new()
            });
        }
        let f = self.fiber(ty)?;
        if let (Some(i), Some(j)) = (f.index(x), f.index(y)) {
            return Ok(f.hom(i, j).cloned().collect());
        }
        let (i, x2, px) = self.canon_in(ty, &f, x)?;
        let (j, y2, py) = self.canon_in(ty, &f, y)?;
        let py_inv = self.inverse(ty, y, &y2, &py)?;
        f.hom(i, j)
            .map(|m| {
                let c = self.compose(ty, x, &x2, &y2, &px, m)?;
                self.compose(ty, x, &y2, y, &c, &py_inv)
            })
            .collect()
    }

    // ---- application ----

    /// `f x` for `f` in `Π (dom) fam`.
    pub fn apply(&self, dom: &STy, fam: &Family, f: &Val, x: &Val) -> Result<Val> {
        let d = self.fiber(dom)?;
        let t = table_of(f)?;
        if let Some(i) = d.index(x) {
            return Ok(t.objs[i as usize].clone());
        }
        let (i, x2, phi) = self.canon_in(dom, &d, x)?;
        let back = self.inverse(dom, x, &x2, &phi)?;
        self.fam_obj(dom, fam, &x2, x, &back, &t.objs[i as usize])
    }

    /// `f(m) : F(m)(f x) -> f y` for `m : x -> y`.
    #[allow(clippy::too_many_arguments)]
    pub fn apply_mor(&self, dom: &STy, fam: &Family, f: &Val, x: &Val, y: &Val, m: &Mor) -> Result<Mor> {
        let d = self.fiber(dom)?;
        let t = table_of(f)?;
        if let (Some(i), Some(j)) = (d.index(x), d.index(y)) {
            let k = d.mor_index(i, j, m).ok_or_else(|| missing("morphism", m))?;
            return Ok(t.mors[k as usize].clone());
        }
        let (i, x2, px) = self.canon_in(dom, &d, x)?;
        let (j, y2, py) = self.canon_in(dom, &d, y)?;
        let px_inv = self.inverse(dom, x, &x2, &px)?;
        let c = self.compose(dom, &x2, x, y, &px_inv, m)?;
        let m2 = self.compose(dom, &x2, y, &y2, &c, &py)?;
        let k = d.mor_index(i, j, &m2).ok_or_else(|| missing("morphism", &m2))?;
        let py_inv = self.inverse(dom, y, &y2, &py)?;
        let src = self.fam_obj(dom, fam, &x2, &y2, &m2, &t.objs[i as usize])?;
        self.fam_mor(dom, fam, &y2, y, &py_inv, &src, &t.objs[j as usize], &t.mors[k as usize])
    }

    /// Component at `x` of `θ : f -> g` in `Π (dom) fam`.
    #[allow(clippy::too_many_arguments)]
    fn component(&self, dom: &STy, fam: &Family, f: &Val, g: &Val, theta: &Mor, x: &Val) -> Result<Mor> {
        let d = self.fiber(dom)?;
        let c = comps_of(theta)?;
        if let Some(i) = d.index(x) {
            return Ok(c[i as usize].clone());
        }
        let (i, x2, phi) = self.canon_in(dom, &d, x)?;
        let back = self.inverse(dom, x, &x2, &phi)?;
        let (tf, tg) = (table_of(f)?, table_of(g)?);
        let i = i as usize;
        self.fam_mor(dom, fam, &x2, x, &back, &tf.objs[i], &tg.objs[i], &c[i])
    }

    // ---- types ----

    pub fn ty_at(&self, t: &AType, env: &Env) -> Result<STy> {
        Ok(match &t.kind {
            ATypeKind::Univ => STy::Univ,
            ATypeKind::El(c) => el(code_of(&self.obj(c, env)?)?),
            ATypeKind::Pi(a, b) => STy::Pi(Rc::new(self.ty_at(a, env)?), Family::Syntax(b.clone(), env.clone())),
            ATypeKind::Sigma(a, b) => {
                STy::Sigma(Rc::new(self.ty_at(a, env)?), Family::Syntax(b.clone(), env.clone()))
            }
            ATypeKind::Id(a, x, y) => STy::Id(Rc::new(self.ty_at(a, env)?), self.obj(x, env)?, self.obj(y, env)?),
        })
    }

    /// Transport an element of `T(ρ)` to `T(ρ')` along `μ : ρ -> ρ'`.
    pub fn ty_obj(&self, t: &AType, mu: &MEnv, v: &Val) -> Result<Val> {
        match &t.kind {
            ATypeKind::Univ => Ok(v.clone()),
            ATypeKind::El(c) => {
                let (src, dst) = (self.obj(c, &mu.src)?, self.obj(c, &mu.dst)?);
                let m = self.mor(c, mu)?;
                let p = perm_of(&m)?;
                let (fs, fd) = (self.fiber(&el(code_of(&src)?))?, self.fiber(&el(code_of(&dst)?))?);
                let i = fs.index(v).ok_or_else(|| missing("element", v))?;
                Ok(fd.objs[p[i as usize] as usize].clone())
            }
            ATypeKind::Pi(a, b) => {
                let (sa, da) = (self.ty_at(a, &mu.src)?, self.ty_at(a, &mu.dst)?);
                let (d, d2) = (self.fiber(&sa)?, self.fiber(&da)?);
                let t = table_of(v)?;
                let mut objs = vec![None; d2.len()];
                let mut imgs = Vec::with_capacity(d.len());
                for (i, x) in d.objs.iter().enumerate() {
                    let x2 = self.ty_obj(a, mu, x)?;
                    let i2 = d2.index(&x2).ok_or_else(|| missing("transported value", &x2))?;
                    let mu2 = mu.push(x.clone(), x2.clone(), sa.clone(), da.clone(), self.identity(&da, &x2)?);
                    objs[i2 as usize] = Some(self.ty_obj(b, &mu2, &t.objs[i])?);
                    imgs.push((i2, x2, mu2));
                }
                let id_src = self.identity_env(&mu.src)?;
                let mut mors = vec![None; d2.mors.len()];
                for (j, (s, e, m)) in d.mors.iter().enumerate() {
                    let (s, e) = (*s as usize, *e as usize);
                    let m2 = self.ty_mor(a, mu, &d.objs[s], &d.objs[e], m)?;
                    let j2 = d2
                        .mor_index(imgs[s].0, imgs[e].0, &m2)
                        .ok_or_else(|| missing("transported morphism", &m2))?;
                    let along = id_src.push(d.objs[s].clone(), d.objs[e].clone(), sa.clone(), sa.clone(), m.clone());
                    let src = self.ty_obj(b, &along, &t.objs[s])?;
                    mors[j2 as usize] = Some(self.ty_mor(b, &imgs[e].2, &src, &t.objs[e], &t.mors[j])?);
                }
                let objs = objs.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| internal("transport is not a bijection"))?;
                let mors = mors.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| internal("transport is not a bijection"))?;
                Ok(Val::fun(objs, mors))
            }
            ATypeKind::Sigma(a, b) => {
                let (x, y) = pair_of(v)?;
                let (sa, da) = (self.ty_at(a, &mu.src)?, self.ty_at(a, &mu.dst)?);
                let x2 = self.ty_obj(a, mu, x)?;
                let id = self.identity(&da, &x2)?;
                let y2 = self.ty_obj(b, &mu.push(x.clone(), x2.clone(), sa, da, id), y)?;
                Ok(Val::pair(x2, y2))
            }
            ATypeKind::Id(a, l, r) => {
                let m = path_of(v)?;
                let da = self.ty_at(a, &mu.dst)?;
                let (l0, r0) = (self.obj(l, &mu.src)?, self.obj(r, &mu.src)?);
                let (l1, r1) = (self.obj(l, &mu.dst)?, self.obj(r, &mu.dst)?);
                let (lm, rm) = (self.mor(l, mu)?, self.mor(r, mu)?);
                let (al, ar) = (self.ty_obj(a, mu, &l0)?, self.ty_obj(a, mu, &r0)?);
                let am = self.ty_mor(a, mu, &l0, &r0, m)?;
                let lm_inv = self.inverse(&da, &al, &l1, &lm)?;
                let c = self.compose(&da, &l1, &al, &ar, &lm_inv, &am)?;
                Ok(Val::path(self.compose(&da, &l1, &ar, &r1, &c, &rm)?))
            }
        }
    }

    /// Transport a morphism `f : s -> t` of `T(ρ)` along `μ`.
    pub fn ty_mor(&self, t: &AType, mu: &MEnv, s: &Val, e: &Val, f: &Mor) -> Result<Mor> {
        match &t.kind {
            ATypeKind::Univ => Ok(f.clone()),
            ATypeKind::El(c) => {
                let dst = self.obj(c, &mu.dst)?;
                let s2 = self.ty_obj(t, mu, s)?;
                self.identity(&el(code_of(&dst)?), &s2)
            }
            ATypeKind::Id(..) => Ok(Mor::Triv),
            ATypeKind::Pi(a, b) => {
                let (sa, da) = (self.ty_at(a, &mu.src)?, self.ty_at(a, &mu.dst)?);
                let (d, d2) = (self.fiber(&sa)?, self.fiber(&da)?);
                let (ts, te) = (table_of(s)?, table_of(e)?);
                let c = comps_of(f)?;
                let mut comps = vec![None; d2.len()];
                for (i, x) in d.objs.iter().enumerate() {
                    let x2 = self.ty_obj(a, mu, x)?;
                    let i2 = d2.index(&x2).ok_or_else(|| missing("transported value", &x2))?;
                    let mu2 = mu.push(x.clone(), x2.clone(), sa.clone(), da.clone(), self.identity(&da, &x2)?);
                    comps[i2 as usize] = Some(self.ty_mor(b, &mu2, &ts.objs[i], &te.objs[i], &c[i])?);
                }
                let comps = comps.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| internal("transport is not a bijection"))?;
                Ok(Mor::fun(comps))
            }
            ATypeKind::Sigma(a, b) => {
                let ((x, y), (x1, y1)) = (pair_of(s)?, pair_of(e)?);
                let (fa, fb) = mpair_of(f)?;
                let (sa, da) = (self.ty_at(a, &mu.src)?, self.ty_at(a, &mu.dst)?);
                let fa2 = self.ty_mor(a, mu, x, x1, fa)?;
                let x12 = self.ty_obj(a, mu, x1)?;
                let along = self.identity_env(&mu.src)?.push(x.clone(), x1.clone(), sa.clone(), sa.clone(), fa.clone());
                let moved = self.ty_obj(b, &along, y)?;
                let id = self.identity(&da, &x12)?;
                let fb2 = self.ty_mor(b, &mu.push(x1.clone(), x12, sa, da, id), &moved, y1, fb)?;
                Ok(Mor::pair(fa2, fb2))
            }
        }
    }

    // ---- terms ----

    fn pi_parts(&self, dom: &AType, cod: &Rc<AType>, env: &Env) -> Result<(STy, Family)> {
        Ok((self.ty_at(dom, env)?, Family::Syntax(cod.clone(), env.clone())))
    }

    /// The value of `t` at the point `env`.
    pub fn obj(&self, t: &ATerm, env: &Env) -> Result<Val> {
        if !memoized(t) {
            return self.eval_obj(t, env);
        }
        let key = (t as *const ATerm as usize, env.clone());
        if let Some(v) = self.objs.borrow().get(&key) {
            return Ok(v.clone());
        }
        let v = self.eval_obj(t, env)?;
        self.objs.borrow_mut().insert(key, v.clone());
        Ok(v)
    }

    fn eval_obj(&self, t: &ATerm, env: &Env) -> Result<Val> {
        match t {
            ATerm::Var(i) => Ok(env.val(*i).clone()),
            ATerm::Global { name, .. } => Ok(self.global(name)?.1.clone()),
            ATerm::Axiom { ax, ty } => self.axiom(*ax, ty),
            ATerm::Lam { dom, body } => {
                let a = self.ty_at(dom, env)?;
                let d = self.fiber(&a)?;
                let objs = d
                    .objs
                    .iter()
                    .map(|x| self.obj(body, &env.push(x.clone(), a.clone())))
                    .collect::<Result<_>>()?;
                let id = self.identity_env(env)?;
                let mors = d
                    .mors
                    .iter()
                    .map(|(s, e, m)| {
                        let (x, y) = (&d.objs[*s as usize], &d.objs[*e as usize]);
                        self.mor(body, &id.push(x.clone(), y.clone(), a.clone(), a.clone(), m.clone()))
                    })
                    .collect::<Result<_>>()?;
                Ok(Val::fun(objs, mors))
            }
            ATerm::App { fun, arg, dom, cod } => {
                let (a, fam) = self.pi_parts(dom, cod, env)?;
                self.apply(&a, &fam, &self.obj(fun, env)?, &self.obj(arg, env)?)
            }
            ATerm::Let { arg, arg_ty, body } => {
                let a = self.ty_at(arg_ty, env)?;
                self.obj(body, &env.push(self.obj(arg, env)?, a))
            }
            ATerm::Pair(a, b) => Ok(Val::pair(self.obj(a, env)?, self.obj(b, env)?)),
            ATerm::Fst(p) => Ok(pair_of(&self.obj(p, env)?)?.0.clone()),
            ATerm::Snd(p) => Ok(pair_of(&self.obj(p, env)?)?.1.clone()),
            ATerm::Refl { x, ty } => {
                let a = self.ty_at(ty, env)?;
                Ok(Val::path(self.identity(&a, &self.obj(x, env)?)?))
            }
            ATerm::J {
                ty,
                motive,
                base,
                lhs,
                rhs,
                path,
            } => {
                let a = self.ty_at(ty, env)?;
                let (l, r, p) = (self.obj(lhs, env)?, self.obj(rhs, env)?, self.obj(path, env)?);
                let d = self.obj(base, &env.push(l.clone(), a.clone()))?;
                let nu = self.j_path(env, &a, &l, &r, &p)?;
                self.ty_obj(motive, &nu, &d)
            }
            ATerm::CodePi(a, b) | ATerm::CodeSigma(a, b) => {
                let ac = code_of(&self.obj(a, env)?)?.clone();
                let bt = self.obj(b, env)?;
                let bs: Rc<[Code]> = table_of(&bt)?
                    .objs
                    .iter()
                    .map(|v| code_of(v).cloned())
                    .collect::<Result<Vec<_>>>()?
                    .into();
                Ok(Val::code(if matches!(t, ATerm::CodePi(..)) {
                    Code::Pi(Rc::new(ac), bs)
                } else {
                    Code::Sigma(Rc::new(ac), bs)
                }))
            }
            ATerm::CodeId(a, x, y) => {
                let ac = code_of(&self.obj(a, env)?)?.clone();
                Ok(Val::code(Code::Id(Rc::new(ac), self.obj(x, env)?, self.obj(y, env)?)))
            }
        }
    }

    /// The morphism `(id, id_l, m, *) : (ρ, l, l, refl) -> (ρ, l, r, p)`.
    fn j_path(&self, env: &Env, a: &STy, l: &Val, r: &Val, p: &Val) -> Result<MEnv> {
        let id_l = self.identity(a, l)?;
        let m = path_of(p)?.clone();
        Ok(self
            .identity_env(env)?
            .push(l.clone(), l.clone(), a.clone(), a.clone(), id_l.clone())
            .push(l.clone(), r.clone(), a.clone(), a.clone(), m)
            .push(
                Val::path(id_l),
                p.clone(),
                STy::Id(Rc::new(a.clone()), l.clone(), l.clone()),
                STy::Id(Rc::new(a.clone()), l.clone(), r.clone()),
                Mor::Triv,
            ))
    }

    /// The action of `t` on `μ : ρ -> ρ'`: a morphism `T(μ)(t ρ) -> t ρ'`.
    pub fn mor(&self, t: &ATerm, mu: &MEnv) -> Result<Mor> {
        if !memoized(t) {
            return self.eval_mor(t, mu);
        }
        let key = (t as *const ATerm as usize, mu.clone());
        if let Some(m) = self.mors.borrow().get(&key) {
            return Ok(m.clone());
        }
        let m = self.eval_mor(t, mu)?;
        self.mors.borrow_mut().insert(key, m.clone());
        Ok(m)
    }

    fn eval_mor(&self, t: &ATerm, mu: &MEnv) -> Result<Mor> {
        match t {
            ATerm::Var(i) => Ok(mu.mor(*i).clone()),
            ATerm::Global { name, ty } => {
                let g = self.global(name)?;
                self.identity(&self.ty_at(ty, &Env::new())?, &g.1)
            }
            ATerm::Axiom { ax, ty } => {
                let v = self.axiom(*ax, ty)?;
                self.identity(&self.ty_at(ty, &Env::new())?, &v)
            }
            ATerm::Lam { dom, body } => {
                let (sa, da) = (self.ty_at(dom, &mu.src)?, self.ty_at(dom, &mu.dst)?);
                let (d, d2) = (self.fiber(&sa)?, self.fiber(&da)?);
                let dom_t: &AType = dom;
                let mut comps = vec![None; d2.len()];
                for x in &d.objs {
                    let x2 = self.ty_obj(dom_t, mu, x)?;
                    let i2 = d2.index(&x2).ok_or_else(|| missing("transported value", &x2))?;
                    let id = self.identity(&da, &x2)?;
                    comps[i2 as usize] = Some(self.mor(body, &mu.push(x.clone(), x2, sa.clone(), da.clone(), id))?);
                }
                let comps = comps.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| internal("transport is not a bijection"))?;
                Ok(Mor::fun(comps))
            }
            ATerm::App { fun, arg, dom, cod } => {
                let (sa, _) = self.pi_parts(dom, cod, &mu.src)?;
                let (da, fam2) = self.pi_parts(dom, cod, &mu.dst)?;
                let fam = Family::Syntax(cod.clone(), mu.src.clone());
                let (f0, f1) = (self.obj(fun, &mu.src)?, self.obj(fun, &mu.dst)?);
                let (a0, a1) = (self.obj(arg, &mu.src)?, self.obj(arg, &mu.dst)?);
                let am = self.mor(arg, mu)?;
                let fm = self.mor(fun, mu)?;
                let x0 = self.ty_obj(dom, mu, &a0)?;
                // (μ · f ρ)(x0) = B(μ, id)(f ρ a ρ)
                let id0 = self.identity(&da, &x0)?;
                let moved_f = self.ty_obj(cod, &mu.push(a0.clone(), x0.clone(), sa, da.clone(), id0), &self.apply(&self.ty_at(dom, &mu.src)?, &fam, &f0, &a0)?)?;
                let f1x0 = self.apply(&da, &fam2, &f1, &x0)?;
                let c1 = match self.fiber(&da)?.index(&x0) {
                    Some(i) => comps_of(&fm)?[i as usize].clone(),
                    None => {
                        let fmoved = self.transported_fun(dom, cod, mu, &f0)?;
                        self.component(&da, &fam2, &fmoved, &f1, &fm, &x0)?
                    }
                };
                let c2 = self.fam_mor(&da, &fam2, &x0, &a1, &am, &moved_f, &f1x0, &c1)?;
                let c3 = self.apply_mor(&da, &fam2, &f1, &x0, &a1, &am)?;
                let s = self.fam_obj(&da, &fam2, &x0, &a1, &am, &moved_f)?;
                let mid = self.fam_obj(&da, &fam2, &x0, &a1, &am, &f1x0)?;
                let e = self.apply(&da, &fam2, &f1, &a1)?;
                self.compose(&self.fam_at(&da, &fam2, &a1)?, &s, &mid, &e, &c2, &c3)
            }
            ATerm::Let { arg, arg_ty, body } => {
                let (sa, da) = (self.ty_at(arg_ty, &mu.src)?, self.ty_at(arg_ty, &mu.dst)?);
                let (a0, a1) = (self.obj(arg, &mu.src)?, self.obj(arg, &mu.dst)?);
                let am = self.mor(arg, mu)?;
                self.mor(body, &mu.push(a0, a1, sa, da, am))
            }
            ATerm::Pair(a, b) => Ok(Mor::pair(self.mor(a, mu)?, self.mor(b, mu)?)),
            ATerm::Fst(p) => Ok(mpair_of(&self.mor(p, mu)?)?.0.clone()),
            ATerm::Snd(p) => Ok(mpair_of(&self.mor(p, mu)?)?.1.clone()),
            ATerm::Refl { .. } => Ok(Mor::Triv),
            ATerm::J {
                ty,
                motive,
                base,
                lhs,
                rhs,
                path,
            } => {
                let (sa, da) = (self.ty_at(ty, &mu.src)?, self.ty_at(ty, &mu.dst)?);
                let (l0, l1) = (self.obj(lhs, &mu.src)?, self.obj(lhs, &mu.dst)?);
                let (r1, p1) = (self.obj(rhs, &mu.dst)?, self.obj(path, &mu.dst)?);
                let lm = self.mor(lhs, mu)?;
                let up = mu.push(l0.clone(), l1.clone(), sa.clone(), da.clone(), lm.clone());
                let d0 = self.obj(base, &mu.src.push(l0.clone(), sa.clone()))?;
                let d1 = self.obj(base, &mu.dst.push(l1.clone(), da.clone()))?;
                let dm = self.mor(base, &up)?;
                let kappa = up
                    .push(l0.clone(), l1.clone(), sa.clone(), da.clone(), lm.clone())
                    .push(
                        Val::path(self.identity(&sa, &l0)?),
                        Val::path(self.identity(&da, &l1)?),
                        STy::Id(Rc::new(sa.clone()), l0.clone(), l0.clone()),
                        STy::Id(Rc::new(da.clone()), l1.clone(), l1.clone()),
                        Mor::Triv,
                    );
                let moved = self.ty_obj(motive, &kappa, &d0)?;
                let nu = self.j_path(&mu.dst, &da, &l1, &r1, &p1)?;
                self.ty_mor(motive, &nu, &moved, &d1, &dm)
            }
            ATerm::CodePi(a, b) | ATerm::CodeSigma(a, b) => {
                let (c0, c1) = (self.obj(t, &mu.src)?, self.obj(t, &mu.dst)?);
                let (a0, a1) = (self.obj(a, &mu.src)?, self.obj(a, &mu.dst)?);
                let (b0, b1) = (self.obj(b, &mu.src)?, self.obj(b, &mu.dst)?);
                let alpha = self.mor(a, mu)?;
                let alpha = perm_of(&alpha)?;
                let beta = self.mor(b, mu)?;
                let beta = comps_of(&beta)?;
                let (bs0, bs1) = (table_of(&b0)?, table_of(&b1)?);
                let (ea0, ea1) = (self.fiber(&el(code_of(&a0)?))?, self.fiber(&el(code_of(&a1)?))?);
                let (l0, l1) = (self.fiber(&el(code_of(&c0)?))?, self.fiber(&el(code_of(&c1)?))?);
                // Move element `v` of `El (b0 i)` to `El (b1 (α i))`.
                let moved = |i: usize, v: &Val| -> Result<Val> {
                    let j = alpha[i] as usize;
                    let src = self.fiber(&el(code_of(&bs0.objs[i])?))?;
                    let dst = self.fiber(&el(code_of(&bs1.objs[j])?))?;
                    let p = src.index(v).ok_or_else(|| missing("element", v))?;
                    Ok(dst.objs[perm_of(&beta[j])?[p as usize] as usize].clone())
                };
                let mut perm = Vec::with_capacity(l0.len());
                for v in &l0.objs {
                    let image = if matches!(t, ATerm::CodePi(..)) {
                        let tv = table_of(v)?;
                        let mut objs = vec![Val::Elem(0); ea1.len()];
                        for i in 0..ea0.len() {
                            objs[alpha[i] as usize] = moved(i, &tv.objs[i])?;
                        }
                        let mors = ea1
                            .mors
                            .iter()
                            .map(|(s, _, _)| {
                                let s = *s as usize;
                                self.identity(&el(code_of(&bs1.objs[s])?), &objs[s])
                            })
                            .collect::<Result<_>>()?;
                        Val::fun(objs, mors)
                    } else {
                        let (x, y) = pair_of(v)?;
                        let i = ea0.index(x).ok_or_else(|| missing("element", x))? as usize;
                        Val::pair(ea1.objs[alpha[i] as usize].clone(), moved(i, y)?)
                    };
                    perm.push(l1.index(&image).ok_or_else(|| missing("transported element", &image))?);
                }
                Ok(Mor::perm(perm))
            }
            ATerm::CodeId(..) => {
                let c1 = self.obj(t, &mu.dst)?;
                Ok(Mor::perm((0..self.code_size(code_of(&c1)?)?).collect()))
            }
        }
    }

    /// `(Π A B)(μ)(f)`, the transported function.
    fn transported_fun(&self, dom: &Rc<AType>, cod: &Rc<AType>, mu: &MEnv, f: &Val) -> Result<Val> {
        let pi = self.elab.mk(ATypeKind::Pi(dom.clone(), cod.clone()));
        self.ty_obj(&pi, mu, f)
    }

    // ---- globals and axioms ----

    pub fn global(&self, name: &str) -> Result<Rc<(Rc<AType>, Val)>> {
        if let Some(g) = self.globals.borrow().get(name) {
            return Ok(g.clone());
        }
        let sig = self.signature();
        let entry = sig.get(name).ok_or_else(|| DenoteError::UnknownDecl(name.to_string()))?;
        let body = entry
            .body_term
            .clone()
            .ok_or_else(|| DenoteError::Unsupported(format!("postulate `{name}`")))?;
        let ty = sig.normal_type(name).ok_or_else(|| DenoteError::UnknownDecl(name.to_string()))?;
        let ctx = Context::new();
        let aty = self.elab.ty(&ctx, &ty)?;
        let term = self.elab.check(&ctx, &body, &ty)?;
        let v = self.obj(&term, &Env::new())?;
        let g = Rc::new((aty, v));
        self.globals.borrow_mut().insert(Name::from(name), g.clone());
        Ok(g)
    }

    fn axiom(&self, ax: Axiom, ty: &AType) -> Result<Val> {
        if let Some(v) = self.axioms.borrow().get(&ax) {
            return Ok(v.clone());
        }
        let sty = self.ty_at(ty, &Env::new())?;
        let v = match ax {
            Axiom::Funext(0) => self.tabulate(&sty, &mut Vec::new(), &|vals| self.funext_leaf(vals))?,
            Axiom::Ua(0) => {
                let f = self.fiber(&sty)?;
                f.objs.first().cloned().ok_or(DenoteError::WitnessNotFound {
                    axiom: ax.to_string(),
                    k: self.k,
                })?
            }
            other => return Err(DenoteError::Unsupported(format!("axiom `{other}`"))),
        };
        self.axioms.borrow_mut().insert(ax, v.clone());
        Ok(v)
    }

    /// At `(A, B, f, g, h)`: the transformation `f -> g` with components `h`.
    fn funext_leaf(&self, vals: &[Val]) -> Result<Val> {
        let [_, _, _, _, h] = vals else {
            return Err(internal("funext expects five arguments"));
        };
        let comps = table_of(h)?
            .objs
            .iter()
            .map(|p| path_of(p).cloned())
            .collect::<Result<Vec<_>>>()?;
        Ok(Val::path(Mor::fun(comps)))
    }

    /// Tabulate a closed iterated Π natively, with equivariant leaves.
    fn tabulate(&self, ty: &STy, vals: &mut Vec<Val>, leaf: &dyn Fn(&[Val]) -> Result<Val>) -> Result<Val> {
        let STy::Pi(a, fam) = ty else {
            return leaf(vals);
        };
        let d = self.fiber(a)?;
        let mut objs = Vec::with_capacity(d.len());
        for x in &d.objs {
            vals.push(x.clone());
            let r = self.tabulate(&self.fam_at(a, fam, x)?, vals, leaf);
            vals.pop();
            objs.push(r?);
        }
        let mut mors = Vec::with_capacity(d.mors.len());
        for (s, e, m) in &d.mors {
            let (s, e) = (*s as usize, *e as usize);
            let moved = self.fam_obj(a, fam, &d.objs[s], &d.objs[e], m, &objs[s])?;
            if moved != objs[e] {
                return Err(internal("native witness is not equivariant"));
            }
            mors.push(self.identity(&self.fam_at(a, fam, &d.objs[e])?, &objs[e])?);
        }
        Ok(Val::fun(objs, mors))
    }

    /// Elaborate and evaluate a type in a kernel context at a point.
    pub fn type_at(&self, ctx: &Context, ty: &Term, env: &Env) -> Result<STy> {
        let aty = self.elab.any_ty(ctx, ty)?;
        self.ty_at(&aty, env)
    }
}
