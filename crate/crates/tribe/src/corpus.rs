//! Named test instances: small groupoids and the isofibrations between them.

use std::collections::HashSet;

use crate::fibration::FibrationMap;
use crate::functor::{all_functors, product_with_projections, GFunctor};
use crate::groupoid::{codiscrete, cyclic, discrete, Mor, Obj, G};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorpusKind {
    Default,
    Small,
}

#[derive(Clone, Debug)]
pub struct Corpus {
    pub groupoids: Vec<(String, G)>,
    pub fibrations: Vec<(String, FibrationMap)>,
}

fn base_groupoids(kind: CorpusKind) -> Vec<(String, G)> {
    let mut out: Vec<(String, G)> = Vec::new();
    let sizes = match kind {
        CorpusKind::Default => 0..=4,
        CorpusKind::Small => 0..=2,
    };
    for n in sizes {
        out.push((format!("d{n}"), discrete(n)));
    }
    out.push(("BZ2".into(), cyclic(2)));
    if kind == CorpusKind::Default {
        out.push(("BZ3".into(), cyclic(3)));
    }
    out.push(("K2".into(), codiscrete(2)));
    out
}

fn automorphisms(g: &G) -> Vec<GFunctor> {
    all_functors(g, g).into_iter().filter(GFunctor::is_isomorphism).collect()
}

fn canonical(f: &GFunctor, auts_a: &[GFunctor], auts_b: &[GFunctor]) -> (Vec<Obj>, Vec<Mor>) {
    let mut best: Option<(Vec<Obj>, Vec<Mor>)> = None;
    for a in auts_a {
        let fa = a.then(f).expect("composable");
        for b in auts_b {
            let g = fa.then(b).expect("composable");
            let key = (g.obj, g.mor);
            if best.as_ref().is_none_or(|k| key < *k) {
                best = Some(key);
            }
        }
    }
    best.unwrap_or_default()
}

/// Isofibrations `a -> b` up to automorphisms of both sides.
pub fn isofibrations_between(a: &G, b: &G) -> Vec<FibrationMap> {
    let (auts_a, auts_b) = (automorphisms(a), automorphisms(b));
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for f in all_functors(a, b) {
        let Ok(p) = FibrationMap::new(f) else { continue };
        if seen.insert(canonical(&p.map, &auts_a, &auts_b)) {
            out.push(p);
        }
    }
    out
}

pub fn corpus(kind: CorpusKind) -> Corpus {
    let base = base_groupoids(kind);
    let mut groupoids = base.clone();
    let mut fibrations: Vec<(String, FibrationMap)> = Vec::new();
    for (na, a) in &base {
        for (nb, b) in &base {
            for (i, p) in isofibrations_between(a, b).into_iter().enumerate() {
                fibrations.push((format!("{na}->{nb}#{i}"), p));
            }
        }
    }
    if kind == CorpusKind::Default {
        let factors: Vec<&(String, G)> = base.iter().filter(|(_, g)| g.object_count() > 1 || g.morphism_count() > 1).collect();
        for (i, (na, a)) in factors.iter().enumerate() {
            for (nb, b) in &factors[i..] {
                let (p, pr1, pr2) = product_with_projections(a, b);
                let name = format!("{na}*{nb}");
                fibrations.push((format!("{name}->{na}"), FibrationMap::new(pr1).expect("projections are fibrations")));
                fibrations.push((format!("{name}->{nb}"), FibrationMap::new(pr2).expect("projections are fibrations")));
                fibrations.push((format!("{name}->1"), FibrationMap::to_terminal(&p)));
                fibrations.push((format!("id {name}"), FibrationMap::identity(&p)));
                groupoids.push((name, p));
            }
        }
    }
    Corpus {
        groupoids,
        fibrations,
    }
}

/// `d4 -> d2` with two points over each: two isomorphic codes that are not
/// identified in the base.
pub fn unidentified_codes() -> FibrationMap {
    let map = GFunctor::new(discrete(4), discrete(2), vec![0, 0, 1, 1], vec![0, 0, 1, 1])
        .expect("valid functor");
    FibrationMap::new(map).expect("discrete maps are fibrations")
}
