//! Functors, natural isomorphisms, exhaustive search and equivalences.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::error::TribeError;
use crate::groupoid::{FinGroupoid, Mor, Obj, G};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GFunctor {
    pub dom: G,
    pub cod: G,
    pub obj: Vec<Obj>,
    pub mor: Vec<Mor>,
}

pub fn same(a: &G, b: &G) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn mismatch(what: impl Into<String>) -> TribeError {
    TribeError::EndpointMismatch { what: what.into() }
}

impl GFunctor {
    pub fn new(dom: G, cod: G, obj: Vec<Obj>, mor: Vec<Mor>) -> Result<Self, TribeError> {
        let f = GFunctor { dom, cod, obj, mor };
        f.validate()?;
        Ok(f)
    }

    /// Build without checking the functor laws (constructions that are
    /// functorial by design).
    pub fn unchecked(dom: G, cod: G, obj: Vec<Obj>, mor: Vec<Mor>) -> Self {
        debug_assert_eq!(obj.len(), dom.object_count());
        debug_assert_eq!(mor.len(), dom.morphism_count());
        GFunctor { dom, cod, obj, mor }
    }

    pub fn identity(g: &G) -> Self {
        GFunctor {
            dom: g.clone(),
            cod: g.clone(),
            obj: g.objects().collect(),
            mor: g.morphisms().collect(),
        }
    }

    pub fn constant(dom: &G, cod: &G, y: Obj) -> Self {
        GFunctor {
            dom: dom.clone(),
            cod: cod.clone(),
            obj: vec![y; dom.object_count()],
            mor: vec![cod.id(y); dom.morphism_count()],
        }
    }

    pub fn to_terminal(dom: &G) -> Self {
        Self::constant(dom, &FinGroupoid::terminal(), 0)
    }

    pub fn ob(&self, x: Obj) -> Obj {
        self.obj[x as usize]
    }

    pub fn mo(&self, m: Mor) -> Mor {
        self.mor[m as usize]
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &GFunctor) -> Result<GFunctor, TribeError> {
        if !same(&self.cod, &next.dom) {
            return Err(mismatch("composite of functors with mismatched middle groupoid"));
        }
        Ok(GFunctor {
            dom: self.dom.clone(),
            cod: next.cod.clone(),
            obj: self.obj.iter().map(|&x| next.ob(x)).collect(),
            mor: self.mor.iter().map(|&m| next.mo(m)).collect(),
        })
    }

    pub fn validate(&self) -> Result<(), TribeError> {
        let (a, b) = (&self.dom, &self.cod);
        let bad = |what: String| Err(TribeError::InvalidFunctor { what });
        if self.obj.len() != a.object_count() || self.mor.len() != a.morphism_count() {
            return bad("table sizes do not match the domain".into());
        }
        if self.obj.iter().any(|&y| y as usize >= b.object_count())
            || self.mor.iter().any(|&n| n as usize >= b.morphism_count())
        {
            return bad("image out of range".into());
        }
        for m in a.morphisms() {
            let n = self.mo(m);
            if b.src(n) != self.ob(a.src(m)) || b.dst(n) != self.ob(a.dst(m)) {
                return bad(format!("morphism {m} is sent to a morphism with wrong endpoints"));
            }
        }
        for x in a.objects() {
            if self.mo(a.id(x)) != b.id(self.ob(x)) {
                return bad(format!("identity of {x} is not preserved"));
            }
        }
        for f in a.morphisms() {
            for &g in a.out(a.dst(f)) {
                if self.mo(a.compose(g, f)) != b.compose(self.mo(g), self.mo(f)) {
                    return bad(format!("composite {g}∘{f} is not preserved"));
                }
            }
        }
        Ok(())
    }

    pub fn is_injective_on_objects(&self) -> bool {
        let mut seen = vec![false; self.cod.object_count()];
        self.obj.iter().all(|&y| !std::mem::replace(&mut seen[y as usize], true))
    }

    pub fn is_isomorphism(&self) -> bool {
        self.dom.object_count() == self.cod.object_count()
            && self.dom.morphism_count() == self.cod.morphism_count()
            && self.is_injective_on_objects()
            && {
                let mut seen = vec![false; self.cod.morphism_count()];
                self.mor.iter().all(|&n| !std::mem::replace(&mut seen[n as usize], true))
            }
    }

    pub fn is_fully_faithful(&self) -> bool {
        let (a, b) = (&self.dom, &self.cod);
        for x in a.objects() {
            for y in a.objects() {
                let hom = a.hom(x, y);
                if hom.len() != b.hom(self.ob(x), self.ob(y)).len() {
                    return false;
                }
                if hom.len() > 1 {
                    let mut images: Vec<Mor> = hom.iter().map(|&m| self.mo(m)).collect();
                    images.sort_unstable();
                    images.dedup();
                    if images.len() != hom.len() {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn is_essentially_surjective(&self) -> bool {
        let s = self.cod.structure();
        let mut hit = vec![false; s.components.len()];
        for &y in &self.obj {
            hit[s.component_of[y as usize]] = true;
        }
        hit.into_iter().all(|h| h)
    }
}

/// A natural isomorphism `source ⇒ target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NatIso {
    pub source: GFunctor,
    pub target: GFunctor,
    pub components: Vec<Mor>,
}

impl NatIso {
    pub fn identity(f: &GFunctor) -> Self {
        NatIso {
            source: f.clone(),
            target: f.clone(),
            components: f.obj.iter().map(|&y| f.cod.id(y)).collect(),
        }
    }

    pub fn validate(&self) -> Result<(), TribeError> {
        let (f, g) = (&self.source, &self.target);
        if !same(&f.dom, &g.dom) || !same(&f.cod, &g.cod) {
            return Err(mismatch("natural isomorphism between functors with different endpoints"));
        }
        let (a, b) = (&f.dom, &f.cod);
        let bad = |what: String| Err(TribeError::InvalidFunctor { what });
        for x in a.objects() {
            let c = self.components[x as usize];
            if b.src(c) != f.ob(x) || b.dst(c) != g.ob(x) {
                return bad(format!("component at {x} has wrong endpoints"));
            }
            if b.compose(b.inv(c), c) != b.id(f.ob(x)) {
                return bad(format!("component at {x} is not invertible"));
            }
        }
        for m in a.morphisms() {
            let (x, y) = (a.src(m), a.dst(m));
            let lhs = b.compose(g.mo(m), self.components[x as usize]);
            let rhs = b.compose(self.components[y as usize], f.mo(m));
            if lhs != rhs {
                return bad(format!("naturality fails at morphism {m}"));
            }
        }
        Ok(())
    }

    /// Vertical composite `other ∘ self`.
    pub fn then(&self, other: &NatIso) -> NatIso {
        let b = &self.source.cod;
        NatIso {
            source: self.source.clone(),
            target: other.target.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(&c, &d)| b.compose(d, c))
                .collect(),
        }
    }

    pub fn inverse(&self) -> NatIso {
        let b = &self.source.cod;
        NatIso {
            source: self.target.clone(),
            target: self.source.clone(),
            components: self.components.iter().map(|&c| b.inv(c)).collect(),
        }
    }
}

/// A search for functors `F : dom -> cod` subject to optional constraints.
#[derive(Clone, Copy)]
pub struct Problem<'a> {
    pub dom: &'a G,
    pub cod: &'a G,
    /// `(q, g)`: require `q ∘ F = g`.
    pub over: Option<(&'a GFunctor, &'a GFunctor)>,
    /// `(i, u)`: require `F ∘ i = u`.
    pub extends: Option<(&'a GFunctor, &'a GFunctor)>,
}

impl<'a> Problem<'a> {
    pub fn new(dom: &'a G, cod: &'a G) -> Self {
        Problem {
            dom,
            cod,
            over: None,
            extends: None,
        }
    }

    pub fn over(mut self, q: &'a GFunctor, g: &'a GFunctor) -> Self {
        self.over = Some((q, g));
        self
    }

    pub fn extending(mut self, i: &'a GFunctor, u: &'a GFunctor) -> Self {
        self.extends = Some((i, u));
        self
    }

    fn check_endpoints(&self) -> Result<(), TribeError> {
        if let Some((q, g)) = self.over {
            if !same(&q.dom, self.cod) || !same(&g.dom, self.dom) || !same(&q.cod, &g.cod) {
                return Err(mismatch("`over` constraint does not match the search endpoints"));
            }
        }
        if let Some((i, u)) = self.extends {
            if !same(&i.cod, self.dom) || !same(&u.cod, self.cod) || !same(&i.dom, &u.dom) {
                return Err(mismatch("`extends` constraint does not match the search endpoints"));
            }
        }
        Ok(())
    }

    /// Visit every solution in lexicographic search order.
    pub fn search(
        &self,
        visit: &mut dyn FnMut(&GFunctor) -> ControlFlow<()>,
    ) -> Result<(), TribeError> {
        self.check_endpoints()?;
        let a = self.dom;
        let mut fixed_obj: Vec<Option<Obj>> = vec![None; a.object_count()];
        let mut fixed_mor: Vec<Option<Mor>> = vec![None; a.morphism_count()];
        if let Some((i, u)) = self.extends {
            for x in i.dom.objects() {
                let slot = &mut fixed_obj[i.ob(x) as usize];
                if slot.is_some_and(|y| y != u.ob(x)) {
                    return Ok(());
                }
                *slot = Some(u.ob(x));
            }
            for m in i.dom.morphisms() {
                let slot = &mut fixed_mor[i.mo(m) as usize];
                if slot.is_some_and(|n| n != u.mo(m)) {
                    return Ok(());
                }
                *slot = Some(u.mo(m));
            }
        }
        let s = a.structure();
        let mut comp_morphisms: Vec<Vec<Mor>> = vec![Vec::new(); s.components.len()];
        for m in a.morphisms() {
            comp_morphisms[s.component_of[a.src(m) as usize]].push(m);
        }
        let mut st = Searcher {
            p: self,
            fixed_obj,
            fixed_mor,
            comp_morphisms,
            obj: vec![0; a.object_count()],
            mor: vec![0; a.morphism_count()],
            tree_img: vec![0; a.object_count()],
            gen_img: Vec::new(),
            visit,
        };
        let _ = st.component(0);
        Ok(())
    }

    pub fn first(&self) -> Result<Option<GFunctor>, TribeError> {
        let mut found = None;
        self.search(&mut |f| {
            found = Some(f.clone());
            ControlFlow::Break(())
        })?;
        Ok(found)
    }

    pub fn all(&self) -> Result<Vec<GFunctor>, TribeError> {
        let mut out = Vec::new();
        self.search(&mut |f| {
            out.push(f.clone());
            ControlFlow::Continue(())
        })?;
        Ok(out)
    }

    pub fn count(&self) -> Result<usize, TribeError> {
        let mut n = 0;
        self.search(&mut |_| {
            n += 1;
            ControlFlow::Continue(())
        })?;
        Ok(n)
    }
}

struct Searcher<'p, 'v> {
    p: &'p Problem<'p>,
    fixed_obj: Vec<Option<Obj>>,
    fixed_mor: Vec<Option<Mor>>,
    comp_morphisms: Vec<Vec<Mor>>,
    obj: Vec<Obj>,
    mor: Vec<Mor>,
    tree_img: Vec<Mor>,
    gen_img: Vec<Mor>,
    visit: &'v mut dyn FnMut(&GFunctor) -> ControlFlow<()>,
}

impl Searcher<'_, '_> {
    fn allowed_mor(&self, m: Mor, n: Mor) -> bool {
        if self.fixed_mor[m as usize].is_some_and(|k| k != n) {
            return false;
        }
        match self.p.over {
            Some((q, g)) => q.mo(n) == g.mo(m),
            None => true,
        }
    }

    fn component(&mut self, c: usize) -> ControlFlow<()> {
        let a = self.p.dom;
        let b = self.p.cod;
        let s = a.structure();
        if c == s.components.len() {
            let f = GFunctor::unchecked(a.clone(), b.clone(), self.obj.clone(), self.mor.clone());
            return (self.visit)(&f);
        }
        let r = s.components[c].root;
        let candidates: Vec<Obj> = match self.fixed_obj[r as usize] {
            Some(y) => vec![y],
            None => b.objects().collect(),
        };
        for y in candidates {
            if let Some((q, g)) = self.p.over {
                if q.ob(y) != g.ob(r) {
                    continue;
                }
            }
            self.obj[r as usize] = y;
            self.tree_img[r as usize] = b.id(y);
            self.tree(c, 1)?;
        }
        ControlFlow::Continue(())
    }

    fn tree(&mut self, c: usize, k: usize) -> ControlFlow<()> {
        let a = self.p.dom;
        let b = self.p.cod;
        let s = a.structure();
        let comp = &s.components[c];
        if k == comp.objects.len() {
            self.gen_img.clear();
            return self.generators(c, 0);
        }
        let x = comp.objects[k];
        let t = s.tree[x as usize];
        let root_img = self.obj[comp.root as usize];
        let options: Vec<Mor> = match self.fixed_obj[x as usize] {
            Some(y) => b.hom(root_img, y).to_vec(),
            None => b.out(root_img).to_vec(),
        };
        for n in options {
            if !self.allowed_mor(t, n) {
                continue;
            }
            if let Some((q, g)) = self.p.over {
                if q.ob(b.dst(n)) != g.ob(x) {
                    continue;
                }
            }
            self.tree_img[x as usize] = n;
            self.obj[x as usize] = b.dst(n);
            self.tree(c, k + 1)?;
        }
        ControlFlow::Continue(())
    }

    fn generators(&mut self, c: usize, k: usize) -> ControlFlow<()> {
        let a = self.p.dom;
        let b = self.p.cod;
        let s = a.structure();
        let comp = &s.components[c];
        if k == comp.generators.len() {
            return match self.finish_component(c) {
                true => self.component(c + 1),
                false => ControlFlow::Continue(()),
            };
        }
        let gen = comp.aut[comp.generators[k]];
        let y = self.obj[comp.root as usize];
        for &n in b.hom(y, y) {
            if !self.allowed_mor(gen, n) {
                continue;
            }
            self.gen_img.push(n);
            self.generators(c, k + 1)?;
            self.gen_img.pop();
        }
        ControlFlow::Continue(())
    }

    /// Extend the generator images to a homomorphism on the vertex group and
    /// then to the whole component; false if inconsistent or constrained away.
    fn finish_component(&mut self, c: usize) -> bool {
        let a = self.p.dom;
        let b = self.p.cod;
        let s = a.structure();
        let comp = &s.components[c];
        let y = self.obj[comp.root as usize];
        let mut phi: Vec<Mor> = vec![Mor::MAX; comp.aut.len()];
        let id_index = comp.aut_index[&a.id(comp.root)];
        phi[id_index] = b.id(y);
        let mut queue = vec![id_index];
        while let Some(e) = queue.pop() {
            for (k, &next) in comp.cayley[e].iter().enumerate() {
                let img = b.compose(self.gen_img[k], phi[e]);
                if phi[next] == Mor::MAX {
                    phi[next] = img;
                    queue.push(next);
                } else if phi[next] != img {
                    return false;
                }
            }
        }
        for &m in &self.comp_morphisms[c] {
            let (x, z) = (a.src(m), a.dst(m));
            let n = b.compose_all(&[
                self.tree_img[z as usize],
                phi[s.loop_of[m as usize]],
                b.inv(self.tree_img[x as usize]),
            ]);
            if !self.allowed_mor(m, n) {
                return false;
            }
            self.mor[m as usize] = n;
        }
        true
    }
}

pub fn all_functors(a: &G, b: &G) -> Vec<GFunctor> {
    Problem::new(a, b).all().expect("unconstrained search")
}

/// Natural isomorphisms `f ⇒ g`; with `vertical = Some(q)` only those whose
/// components `q` sends to identities.
pub fn homotopies(
    f: &GFunctor,
    g: &GFunctor,
    vertical: Option<&GFunctor>,
    visit: &mut dyn FnMut(&NatIso) -> ControlFlow<()>,
) -> Result<(), TribeError> {
    if !same(&f.dom, &g.dom) || !same(&f.cod, &g.cod) {
        return Err(mismatch("homotopy between functors with different endpoints"));
    }
    let mut components = vec![0; f.dom.object_count()];
    fn go(
        c: usize,
        f: &GFunctor,
        g: &GFunctor,
        vertical: Option<&GFunctor>,
        components: &mut Vec<Mor>,
        visit: &mut dyn FnMut(&NatIso) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let (a, b) = (&f.dom, &f.cod);
        let s = a.structure();
        if c == s.components.len() {
            return visit(&NatIso {
                source: f.clone(),
                target: g.clone(),
                components: components.clone(),
            });
        }
        let comp = &s.components[c];
        let r = comp.root;
        'alpha: for &alpha in b.hom(f.ob(r), g.ob(r)) {
            for &k in &comp.generators {
                let gen = comp.aut[k];
                if b.compose(g.mo(gen), alpha) != b.compose(alpha, f.mo(gen)) {
                    continue 'alpha;
                }
            }
            for &x in &comp.objects {
                let t = s.tree[x as usize];
                let cx = b.compose_all(&[g.mo(t), alpha, b.inv(f.mo(t))]);
                if let Some(q) = vertical {
                    if !q.cod.is_identity(q.mo(cx)) {
                        continue 'alpha;
                    }
                }
                components[x as usize] = cx;
            }
            go(c + 1, f, g, vertical, components, visit)?;
        }
        ControlFlow::Continue(())
    }
    let _ = go(0, f, g, vertical, &mut components, visit);
    Ok(())
}

pub fn homotopies_between(f: &GFunctor, g: &GFunctor) -> Result<Vec<NatIso>, TribeError> {
    let mut out = Vec::new();
    homotopies(f, g, None, &mut |h| {
        out.push(h.clone());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

pub fn homotopic(f: &GFunctor, g: &GFunctor) -> Result<Option<NatIso>, TribeError> {
    let mut found = None;
    homotopies(f, g, None, &mut |h| {
        found = Some(h.clone());
        ControlFlow::Break(())
    })?;
    Ok(found)
}

/// Data exhibiting `f` as a homotopy equivalence.
#[derive(Clone, Debug)]
pub struct EquivalenceWitness {
    pub inverse: GFunctor,
    /// `inverse ∘ f ⇒ id`
    pub unit: NatIso,
    /// `f ∘ inverse ⇒ id`
    pub counit: NatIso,
}

impl EquivalenceWitness {
    pub fn validate(&self, f: &GFunctor) -> Result<(), TribeError> {
        let gf = f.then(&self.inverse)?;
        let fg = self.inverse.then(f)?;
        if self.unit.source != gf || self.unit.target != GFunctor::identity(&f.dom) {
            return Err(mismatch("unit has the wrong endpoints"));
        }
        if self.counit.source != fg || self.counit.target != GFunctor::identity(&f.cod) {
            return Err(mismatch("counit has the wrong endpoints"));
        }
        self.inverse.validate()?;
        self.unit.validate()?;
        self.counit.validate()
    }
}

/// Decide whether `f` is a homotopy equivalence. Full faithfulness and
/// essential surjectivity are a pre-filter; when they hold an inverse with
/// both natural isomorphisms is built and checked.
pub fn equivalence_check(f: &GFunctor) -> Option<EquivalenceWitness> {
    if !f.is_essentially_surjective() || !f.is_fully_faithful() {
        return None;
    }
    let (a, b) = (&f.dom, &f.cod);
    let sb = b.structure();
    let mut rep: Vec<Option<Obj>> = vec![None; sb.components.len()];
    for x in a.objects() {
        rep[sb.component_of[f.ob(x) as usize]].get_or_insert(x);
    }
    let mut preimage: HashMap<(Obj, Obj, Mor), Mor> = HashMap::new();
    for m in a.morphisms() {
        preimage.insert((a.src(m), a.dst(m), f.mo(m)), m);
    }
    let mut g_obj = Vec::with_capacity(b.object_count());
    let mut phi = Vec::with_capacity(b.object_count());
    for y in b.objects() {
        let x = rep[sb.component_of[y as usize]]?;
        g_obj.push(x);
        phi.push(*b.hom(f.ob(x), y).first()?);
    }
    let mut g_mor = Vec::with_capacity(b.morphism_count());
    for n in b.morphisms() {
        let (y, z) = (b.src(n), b.dst(n));
        let k = b.compose_all(&[b.inv(phi[z as usize]), n, phi[y as usize]]);
        g_mor.push(*preimage.get(&(g_obj[y as usize], g_obj[z as usize], k))?);
    }
    let inverse = GFunctor::unchecked(b.clone(), a.clone(), g_obj, g_mor);
    let counit = NatIso {
        source: inverse.then(f).ok()?,
        target: GFunctor::identity(b),
        components: phi.clone(),
    };
    let gf = f.then(&inverse).ok()?;
    let mut unit_components = Vec::with_capacity(a.object_count());
    for x in a.objects() {
        let x2 = gf.ob(x);
        unit_components.push(*preimage.get(&(x2, x, phi[f.ob(x) as usize]))?);
    }
    let unit = NatIso {
        source: gf,
        target: GFunctor::identity(a),
        components: unit_components,
    };
    let w = EquivalenceWitness {
        inverse,
        unit,
        counit,
    };
    debug_assert!(w.validate(f).is_ok());
    Some(w)
}

/// Exhaustive variant: try every functor back and every pair of natural
/// isomorphisms. Used as an oracle for [`equivalence_check`].
pub fn equivalence_by_search(f: &GFunctor) -> Option<EquivalenceWitness> {
    let mut found = None;
    Problem::new(&f.cod, &f.dom)
        .search(&mut |g| {
            let gf = f.then(g).expect("composable");
            let fg = g.then(f).expect("composable");
            let unit = homotopic(&gf, &GFunctor::identity(&f.dom)).expect("same endpoints");
            let counit = homotopic(&fg, &GFunctor::identity(&f.cod)).expect("same endpoints");
            if let (Some(unit), Some(counit)) = (unit, counit) {
                found = Some(EquivalenceWitness {
                    inverse: g.clone(),
                    unit,
                    counit,
                });
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        })
        .expect("unconstrained search");
    found
}

/// Number of natural-isomorphism classes of functors `a -> b`.
pub fn ho_hom_classes(a: &G, b: &G) -> usize {
    let functors = all_functors(a, b);
    let mut parent: Vec<usize> = (0..functors.len()).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        if p[i] != i {
            let r = find(p, p[i]);
            p[i] = r;
        }
        p[i]
    }
    for i in 0..functors.len() {
        for j in 0..i {
            if find(&mut parent, i) == find(&mut parent, j) {
                continue;
            }
            if homotopic(&functors[i], &functors[j]).expect("same endpoints").is_some() {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    (0..functors.len()).filter(|&i| find(&mut parent, i) == i).count()
}

/// `A × B` with its two projections.
pub fn product_with_projections(a: &G, b: &G) -> (G, GFunctor, GFunctor) {
    let p = crate::groupoid::product(a, b);
    let (nb, mb) = (b.object_count() as Obj, b.morphism_count() as Mor);
    let first = GFunctor::unchecked(
        p.clone(),
        a.clone(),
        p.objects().map(|o| o / nb).collect(),
        p.morphisms().map(|m| m / mb).collect(),
    );
    let second = GFunctor::unchecked(
        p.clone(),
        b.clone(),
        p.objects().map(|o| o % nb).collect(),
        p.morphisms().map(|m| m % mb).collect(),
    );
    (p, first, second)
}
