//! Internal homs: functor groupoids.

use std::ops::ControlFlow;

use crate::error::TribeError;
use crate::functor::{homotopies, GFunctor, Problem};
use crate::groupoid::{Builder, Labelled, Mor, Obj, G};

/// `[A, B]`: functors `A -> B` and natural isomorphisms between them.
#[derive(Debug)]
pub struct InternalHom {
    pub source: G,
    pub target: G,
    pub groupoid: G,
    /// `labels.objects[i]` is the object table of functor `i`; morphisms are
    /// labelled `(source functor, components)`.
    labels: Labelled<Vec<Obj>, (Obj, Vec<Mor>)>,
    functors: Vec<GFunctor>,
}

pub fn internal_hom(a: &G, b: &G) -> Result<InternalHom, TribeError> {
    let mut functors = Vec::new();
    Problem::new(a, b).search(&mut |f| {
        functors.push(f.clone());
        ControlFlow::Continue(())
    })?;
    crate::error::limits::check_internal(functors.len(), 0)?;
    let mut builder: Builder<Vec<Obj>, (Obj, Vec<Mor>)> = Builder::new();
    let key = |f: &GFunctor| {
        let mut k = f.obj.clone();
        k.extend(&f.mor);
        k
    };
    for f in &functors {
        builder.object(key(f));
    }
    for (i, f) in functors.iter().enumerate() {
        for (j, g) in functors.iter().enumerate() {
            let mut found = Vec::new();
            homotopies(f, g, None, &mut |h| {
                found.push(h.components.clone());
                ControlFlow::Continue(())
            })?;
            for c in found {
                builder.morphism((i as Obj, c), i as Obj, j as Obj)?;
            }
        }
    }
    let labels = builder.finish(|(_, d), (i, c)| {
        (*i, c.iter().zip(d).map(|(&c, &d)| b.compose(d, c)).collect())
    })?;
    Ok(InternalHom {
        source: a.clone(),
        target: b.clone(),
        groupoid: labels.groupoid.clone(),
        labels,
        functors,
    })
}

impl InternalHom {
    pub fn functor(&self, o: Obj) -> &GFunctor {
        &self.functors[o as usize]
    }

    pub fn components(&self, m: Mor) -> &[Mor] {
        &self.labels.morphisms[m as usize].1
    }

    pub fn index_of(&self, f: &GFunctor) -> Option<Obj> {
        let mut k = f.obj.clone();
        k.extend(&f.mor);
        self.labels.obj(&k)
    }

    /// Evaluation `[A, B] × A -> B` on the product layout of
    /// [`crate::groupoid::product`].
    pub fn evaluation(&self) -> GFunctor {
        let (h, a, b) = (&self.groupoid, &self.source, &self.target);
        let prod = crate::groupoid::product(h, a);
        let (na, ma) = (a.object_count(), a.morphism_count());
        let obj = prod
            .objects()
            .map(|o| {
                let (f, x) = (o as usize / na, o as usize % na);
                self.functor(f as Obj).ob(x as Obj)
            })
            .collect();
        let mor = prod
            .morphisms()
            .map(|m| {
                let (t, k) = (m as usize / ma, (m as usize % ma) as Mor);
                let target = self.functor(h.dst(t as Mor));
                let alpha = self.components(t as Mor)[a.src(k) as usize];
                b.compose(target.mo(k), alpha)
            })
            .collect();
        GFunctor::unchecked(prod, b.clone(), obj, mor)
    }
}
