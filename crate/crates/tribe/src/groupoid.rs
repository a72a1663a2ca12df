//! Finite groupoids stored as dense tables.
//!
//! Objects are `0..n`, morphisms `0..m`. Composition `compose(g, f)` is
//! `g ∘ f` and requires `dst(f) == src(g)`.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;
use std::sync::{Arc, OnceLock};

use crate::error::{limits, TribeError};

pub type Obj = u32;
pub type Mor = u32;

pub struct FinGroupoid {
    src: Vec<Obj>,
    dst: Vec<Obj>,
    identity: Vec<Mor>,
    inverse: Vec<Mor>,
    out: Vec<Vec<Mor>>,
    /// Position of a morphism in `out[src]` / `inn[dst]`.
    out_pos: Vec<u32>,
    in_pos: Vec<u32>,
    /// Composites through object `b`: `comp[base[b] + in_pos(f) * |out(b)| + out_pos(g)]`.
    comp_base: Vec<usize>,
    comp: Vec<Mor>,
    homs: HashMap<(Obj, Obj), Vec<Mor>>,
    structure: OnceLock<Structure>,
}

pub type G = Arc<FinGroupoid>;

impl PartialEq for FinGroupoid {
    fn eq(&self, other: &Self) -> bool {
        self.src == other.src
            && self.dst == other.dst
            && self.identity == other.identity
            && self.out == other.out
            && self.comp == other.comp
    }
}

impl Eq for FinGroupoid {}

impl std::fmt::Debug for FinGroupoid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "FinGroupoid({} objects, {} morphisms)",
            self.object_count(),
            self.morphism_count()
        )
    }
}

/// Connected components with spanning trees and vertex groups.
#[derive(Debug)]
pub struct Structure {
    pub component_of: Vec<usize>,
    pub components: Vec<Component>,
    /// For each morphism `m : x -> y` of a component with root `r`, the
    /// index into `aut` of `tree[y]⁻¹ ∘ m ∘ tree[x]`.
    pub loop_of: Vec<usize>,
    /// For each object `x`, a morphism from its component's root to `x`.
    pub tree: Vec<Mor>,
}

#[derive(Debug)]
pub struct Component {
    pub root: Obj,
    /// Objects in breadth-first order from the root.
    pub objects: Vec<Obj>,
    /// Automorphisms of the root.
    pub aut: Vec<Mor>,
    pub aut_index: HashMap<Mor, usize>,
    pub generators: Vec<usize>,
    /// `cayley[e][k]` is the index of `aut[generators[k]] ∘ aut[e]`.
    pub cayley: Vec<Vec<usize>>,
}

impl FinGroupoid {
    pub fn object_count(&self) -> usize {
        self.out.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.src.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = Obj> {
        0..self.object_count() as Obj
    }

    pub fn morphisms(&self) -> impl Iterator<Item = Mor> {
        0..self.morphism_count() as Mor
    }

    pub fn src(&self, m: Mor) -> Obj {
        self.src[m as usize]
    }

    pub fn dst(&self, m: Mor) -> Obj {
        self.dst[m as usize]
    }

    pub fn id(&self, x: Obj) -> Mor {
        self.identity[x as usize]
    }

    pub fn inv(&self, m: Mor) -> Mor {
        self.inverse[m as usize]
    }

    pub fn is_identity(&self, m: Mor) -> bool {
        self.identity[self.src(m) as usize] == m
    }

    pub fn out(&self, x: Obj) -> &[Mor] {
        &self.out[x as usize]
    }

    /// Position of `m` in `out(src(m))`.
    pub fn out_index(&self, m: Mor) -> usize {
        self.out_pos[m as usize] as usize
    }

    pub fn hom(&self, x: Obj, y: Obj) -> &[Mor] {
        self.homs.get(&(x, y)).map_or(&[], Vec::as_slice)
    }

    /// `g ∘ f`.
    pub fn compose(&self, g: Mor, f: Mor) -> Mor {
        let b = self.dst(f);
        debug_assert_eq!(b, self.src(g), "composing non-composable morphisms");
        let width = self.out[b as usize].len();
        self.comp[self.comp_base[b as usize]
            + self.in_pos[f as usize] as usize * width
            + self.out_pos[g as usize] as usize]
    }

    /// Composite of a path given outermost first: `[h, g, f]` is `h ∘ g ∘ f`.
    pub fn compose_all(&self, path: &[Mor]) -> Mor {
        let (last, rest) = path.split_last().expect("nonempty path");
        rest.iter().rev().fold(*last, |acc, &g| self.compose(g, acc))
    }

    pub fn structure(&self) -> &Structure {
        self.structure.get_or_init(|| Structure::new(self))
    }

    pub fn component_count(&self) -> usize {
        self.structure().components.len()
    }

    pub fn is_discrete(&self) -> bool {
        self.morphisms().all(|m| self.is_identity(m))
    }

    /// Exhaustively check the groupoid laws.
    pub fn validate(&self) -> Result<(), TribeError> {
        let bad = |what: String| Err(TribeError::Invalid { what });
        for x in self.objects() {
            let e = self.id(x);
            if self.src(e) != x || self.dst(e) != x {
                return bad(format!("identity of object {x} is not a loop on it"));
            }
        }
        for f in self.morphisms() {
            let (x, y) = (self.src(f), self.dst(f));
            if self.compose(f, self.id(x)) != f || self.compose(self.id(y), f) != f {
                return bad(format!("identity law fails at morphism {f}"));
            }
            let g = self.inv(f);
            if self.src(g) != y
                || self.dst(g) != x
                || self.compose(g, f) != self.id(x)
                || self.compose(f, g) != self.id(y)
            {
                return bad(format!("inverse law fails at morphism {f}"));
            }
        }
        for f in self.morphisms() {
            for &g in self.out(self.dst(f)) {
                let gf = self.compose(g, f);
                if self.src(gf) != self.src(f) || self.dst(gf) != self.dst(g) {
                    return bad(format!("composite {g}∘{f} has wrong endpoints"));
                }
                for &h in self.out(self.dst(g)) {
                    if self.compose(h, gf) != self.compose(self.compose(h, g), f) {
                        return bad(format!("associativity fails at ({h}, {g}, {f})"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Build from raw tables. `compose` lists `(g, f, g∘f)`; every composable
    /// pair must appear exactly once.
    pub fn from_tables(
        objects: usize,
        ends: &[(Obj, Obj)],
        compose: &[(Mor, Mor, Mor)],
        identities: &[Mor],
    ) -> Result<FinGroupoid, TribeError> {
        limits::check_input(objects, ends.len())?;
        let bad = |what: String| TribeError::Invalid { what };
        for (m, &(s, d)) in ends.iter().enumerate() {
            if s as usize >= objects || d as usize >= objects {
                return Err(bad(format!("morphism {m} has an endpoint out of range")));
            }
        }
        if identities.len() != objects {
            return Err(bad(format!(
                "{} identities given for {objects} objects",
                identities.len()
            )));
        }
        let m_count = ends.len();
        for (x, &e) in identities.iter().enumerate() {
            if e as usize >= m_count || ends[e as usize] != (x as Obj, x as Obj) {
                return Err(bad(format!("identity of object {x} is not a loop on it")));
            }
        }
        let mut table: HashMap<(Mor, Mor), Mor> = HashMap::new();
        for &(g, f, h) in compose {
            for x in [g, f, h] {
                if x as usize >= m_count {
                    return Err(bad(format!("composition entry mentions unknown morphism {x}")));
                }
            }
            if ends[f as usize].1 != ends[g as usize].0 {
                return Err(bad(format!("composition entry ({g}, {f}) is not composable")));
            }
            if table.insert((g, f), h).is_some() {
                return Err(bad(format!("composition of ({g}, {f}) given twice")));
            }
        }
        let skel = Skeleton::new(objects, ends.iter().copied());
        let mut comp = Vec::with_capacity(skel.comp_len);
        for b in 0..objects {
            for &f in &skel.inn[b] {
                for &g in &skel.out[b] {
                    match table.get(&(g, f)) {
                        Some(&h) => comp.push(h),
                        None => return Err(bad(format!("composition of ({g}, {f}) is missing"))),
                    }
                }
            }
        }
        let mut inverse = vec![Mor::MAX; m_count];
        let mut g = skel.finish(identities.to_vec(), Vec::new(), comp);
        for f in g.morphisms() {
            let (x, y) = (g.src(f), g.dst(f));
            if let Some(&h) = g
                .hom(y, x)
                .iter()
                .find(|&&h| g.compose(h, f) == identities[x as usize])
            {
                inverse[f as usize] = h;
            } else {
                return Err(bad(format!("morphism {f} has no inverse")));
            }
        }
        g.inverse = inverse;
        g.validate()?;
        Ok(g)
    }

    pub fn terminal() -> G {
        discrete(1)
    }
}

struct Skeleton {
    src: Vec<Obj>,
    dst: Vec<Obj>,
    out: Vec<Vec<Mor>>,
    inn: Vec<Vec<Mor>>,
    out_pos: Vec<u32>,
    in_pos: Vec<u32>,
    comp_base: Vec<usize>,
    comp_len: usize,
}

impl Skeleton {
    fn new(objects: usize, ends: impl Iterator<Item = (Obj, Obj)>) -> Self {
        let mut s = Skeleton {
            src: Vec::new(),
            dst: Vec::new(),
            out: vec![Vec::new(); objects],
            inn: vec![Vec::new(); objects],
            out_pos: Vec::new(),
            in_pos: Vec::new(),
            comp_base: Vec::with_capacity(objects),
            comp_len: 0,
        };
        for (m, (a, b)) in ends.enumerate() {
            s.src.push(a);
            s.dst.push(b);
            s.out_pos.push(s.out[a as usize].len() as u32);
            s.in_pos.push(s.inn[b as usize].len() as u32);
            s.out[a as usize].push(m as Mor);
            s.inn[b as usize].push(m as Mor);
        }
        for b in 0..objects {
            s.comp_base.push(s.comp_len);
            s.comp_len += s.inn[b].len() * s.out[b].len();
        }
        s
    }

    fn finish(self, identity: Vec<Mor>, inverse: Vec<Mor>, comp: Vec<Mor>) -> FinGroupoid {
        let mut homs: HashMap<(Obj, Obj), Vec<Mor>> = HashMap::new();
        for (m, (&a, &b)) in self.src.iter().zip(&self.dst).enumerate() {
            homs.entry((a, b)).or_default().push(m as Mor);
        }
        FinGroupoid {
            src: self.src,
            dst: self.dst,
            identity,
            inverse,
            out: self.out,
            out_pos: self.out_pos,
            in_pos: self.in_pos,
            comp_base: self.comp_base,
            comp,
            homs,
            structure: OnceLock::new(),
        }
    }
}

/// Builds a groupoid from labelled objects and morphisms plus a composition
/// function on labels. Identities and inverses are found from the table.
pub struct Builder<O, M> {
    objects: Vec<O>,
    object_index: HashMap<O, Obj>,
    morphisms: Vec<M>,
    ends: Vec<(Obj, Obj)>,
    morphism_index: HashMap<M, Mor>,
}

/// A built groupoid together with the labels used to construct it.
#[derive(Debug)]
pub struct Labelled<O, M> {
    pub groupoid: G,
    pub objects: Vec<O>,
    pub object_index: HashMap<O, Obj>,
    pub morphisms: Vec<M>,
    pub morphism_index: HashMap<M, Mor>,
}

impl<O: Clone + Eq + Hash, M: Clone + Eq + Hash> Labelled<O, M> {
    pub fn obj(&self, o: &O) -> Option<Obj> {
        self.object_index.get(o).copied()
    }

    pub fn mor(&self, m: &M) -> Option<Mor> {
        self.morphism_index.get(m).copied()
    }
}

impl<O: Clone + Eq + Hash, M: Clone + Eq + Hash> Default for Builder<O, M> {
    fn default() -> Self {
        Self::new()
    }
}

impl<O: Clone + Eq + Hash, M: Clone + Eq + Hash> Builder<O, M> {
    pub fn new() -> Self {
        Self {
            objects: Vec::new(),
            object_index: HashMap::new(),
            morphisms: Vec::new(),
            ends: Vec::new(),
            morphism_index: HashMap::new(),
        }
    }

    pub fn object(&mut self, o: O) -> Obj {
        if let Some(&i) = self.object_index.get(&o) {
            return i;
        }
        let i = self.objects.len() as Obj;
        self.object_index.insert(o.clone(), i);
        self.objects.push(o);
        i
    }

    pub fn object_index(&self, o: &O) -> Option<Obj> {
        self.object_index.get(o).copied()
    }

    pub fn morphism(&mut self, m: M, src: Obj, dst: Obj) -> Result<Mor, TribeError> {
        if let Some(&i) = self.morphism_index.get(&m) {
            return Ok(i);
        }
        let i = self.morphisms.len() as Mor;
        limits::check_internal(self.objects.len(), self.morphisms.len() + 1)?;
        self.morphism_index.insert(m.clone(), i);
        self.morphisms.push(m);
        self.ends.push((src, dst));
        Ok(i)
    }

    pub fn finish(self, compose: impl Fn(&M, &M) -> M) -> Result<Labelled<O, M>, TribeError> {
        let n = self.objects.len();
        let skel = Skeleton::new(n, self.ends.iter().copied());
        limits::check_internal(n, self.morphisms.len())?;
        limits::check_table(skel.comp_len)?;
        let missing = |g: Mor, f: Mor| TribeError::Invalid {
            what: format!("composite of morphisms {g} and {f} is not among the generated morphisms"),
        };
        let mut comp = Vec::with_capacity(skel.comp_len);
        for b in 0..n {
            for &f in &skel.inn[b] {
                for &g in &skel.out[b] {
                    let h = compose(&self.morphisms[g as usize], &self.morphisms[f as usize]);
                    comp.push(*self.morphism_index.get(&h).ok_or_else(|| missing(g, f))?);
                }
            }
        }
        let mut g = skel.finish(Vec::new(), Vec::new(), comp);
        let mut identity = Vec::with_capacity(n);
        for x in 0..n as Obj {
            let e = g
                .hom(x, x)
                .iter()
                .copied()
                .find(|&e| g.compose(e, e) == e)
                .ok_or_else(|| TribeError::Invalid {
                    what: format!("object {x} has no identity"),
                })?;
            identity.push(e);
        }
        g.identity = identity;
        let mut inverse = Vec::with_capacity(g.morphism_count());
        for f in g.morphisms() {
            let (x, y) = (g.src(f), g.dst(f));
            let h = g
                .hom(y, x)
                .iter()
                .copied()
                .find(|&h| g.compose(h, f) == g.id(x))
                .ok_or_else(|| TribeError::Invalid {
                    what: format!("morphism {f} has no inverse"),
                })?;
            inverse.push(h);
        }
        g.inverse = inverse;
        Ok(Labelled {
            groupoid: Arc::new(g),
            objects: self.objects,
            object_index: self.object_index,
            morphisms: self.morphisms,
            morphism_index: self.morphism_index,
        })
    }
}

impl Structure {
    fn new(g: &FinGroupoid) -> Self {
        let n = g.object_count();
        let mut component_of = vec![usize::MAX; n];
        let mut tree = vec![Mor::MAX; n];
        let mut components = Vec::new();
        for r in g.objects() {
            if component_of[r as usize] != usize::MAX {
                continue;
            }
            let c = components.len();
            let mut objects = vec![r];
            component_of[r as usize] = c;
            tree[r as usize] = g.id(r);
            let mut queue = VecDeque::from([r]);
            while let Some(x) = queue.pop_front() {
                for &m in g.out(x) {
                    let y = g.dst(m);
                    if component_of[y as usize] == usize::MAX {
                        component_of[y as usize] = c;
                        tree[y as usize] = g.compose(m, tree[x as usize]);
                        objects.push(y);
                        queue.push_back(y);
                    }
                }
            }
            let aut: Vec<Mor> = g.hom(r, r).to_vec();
            let aut_index: HashMap<Mor, usize> =
                aut.iter().enumerate().map(|(i, &m)| (m, i)).collect();
            let generators = generating_set(g, &aut, &aut_index);
            let cayley = aut
                .iter()
                .map(|&e| {
                    generators
                        .iter()
                        .map(|&s| aut_index[&g.compose(aut[s], e)])
                        .collect()
                })
                .collect();
            components.push(Component {
                root: r,
                objects,
                aut,
                aut_index,
                generators,
                cayley,
            });
        }
        let loop_of = g
            .morphisms()
            .map(|m| {
                let (x, y) = (g.src(m), g.dst(m));
                let c = &components[component_of[x as usize]];
                let k = g.compose_all(&[g.inv(tree[y as usize]), m, tree[x as usize]]);
                c.aut_index[&k]
            })
            .collect();
        Structure {
            component_of,
            components,
            loop_of,
            tree,
        }
    }
}

fn generating_set(g: &FinGroupoid, aut: &[Mor], index: &HashMap<Mor, usize>) -> Vec<usize> {
    let mut gens: Vec<usize> = Vec::new();
    let mut member = vec![false; aut.len()];
    let root_id = index[&g.id(g.src(aut[0]))];
    member[root_id] = true;
    let mut elems = vec![root_id];
    for cand in 0..aut.len() {
        if member[cand] {
            continue;
        }
        gens.push(cand);
        // Close under multiplication by all generators.
        let mut queue: VecDeque<usize> = elems.iter().copied().collect();
        while let Some(e) = queue.pop_front() {
            for &s in &gens {
                let p = index[&g.compose(aut[s], aut[e])];
                if !member[p] {
                    member[p] = true;
                    elems.push(p);
                    queue.push_back(p);
                }
            }
        }
    }
    gens
}

/// `n` objects and only identities.
pub fn discrete(n: usize) -> G {
    let mut b: Builder<u32, u32> = Builder::new();
    for x in 0..n as u32 {
        b.object(x);
        b.morphism(x, x, x).expect("within limits");
    }
    b.finish(|g, _| *g).expect("discrete groupoid").groupoid
}

/// One object with automorphism group ℤ/n.
pub fn cyclic(n: usize) -> G {
    assert!(n > 0, "cyclic group of order zero");
    let mut b: Builder<(), u32> = Builder::new();
    b.object(());
    for k in 0..n as u32 {
        b.morphism(k, 0, 0).expect("within limits");
    }
    b.finish(|g, f| (g + f) % n as u32).expect("cyclic group").groupoid
}

/// `n` objects with exactly one morphism between any two.
pub fn codiscrete(n: usize) -> G {
    let mut b: Builder<u32, (u32, u32)> = Builder::new();
    for x in 0..n as u32 {
        b.object(x);
    }
    for x in 0..n as u32 {
        for y in 0..n as u32 {
            b.morphism((x, y), x, y).expect("within limits");
        }
    }
    b.finish(|g, f| (f.0, g.1)).expect("codiscrete groupoid").groupoid
}

/// The product with objects `(a, b) ↦ a * |B| + b` and morphisms likewise.
pub fn product(a: &FinGroupoid, b: &FinGroupoid) -> G {
    let (na, nb) = (a.object_count(), b.object_count());
    let mb = b.morphism_count();
    let ends = a.morphisms().flat_map(|f| {
        b.morphisms().map(move |g| {
            (
                a.src(f) * nb as Obj + b.src(g),
                a.dst(f) * nb as Obj + b.dst(g),
            )
        })
    });
    let skel = Skeleton::new(na * nb, ends);
    let split = |m: Mor| (m / mb as Mor, m % mb as Mor);
    let mut comp = Vec::with_capacity(skel.comp_len);
    for x in 0..na * nb {
        for &f in &skel.inn[x] {
            for &g in &skel.out[x] {
                let ((f1, f2), (g1, g2)) = (split(f), split(g));
                comp.push(a.compose(g1, f1) * mb as Mor + b.compose(g2, f2));
            }
        }
    }
    let identity = (0..(na * nb) as Obj)
        .map(|x| a.id(x / nb as Obj) * mb as Mor + b.id(x % nb as Obj))
        .collect();
    let inverse = (0..(a.morphism_count() * mb) as Mor)
        .map(|m| {
            let (f, g) = split(m);
            a.inv(f) * mb as Mor + b.inv(g)
        })
        .collect();
    Arc::new(skel.finish(identity, inverse, comp))
}

