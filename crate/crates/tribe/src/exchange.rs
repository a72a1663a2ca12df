//! JSON exchange format and the short groupoid notation.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{limits, TribeError};
use crate::fibration::FibrationMap;
use crate::functor::GFunctor;
use crate::groupoid::{codiscrete, cyclic, discrete, product, FinGroupoid, Mor, Obj, G};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismJson {
    pub id: Mor,
    pub src: Obj,
    pub dst: Obj,
}

/// A groupoid as counted objects, morphisms with endpoints, composition
/// triples `[g, f, g∘f]` and identities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupoidJson {
    pub objects: usize,
    pub morphisms: Vec<MorphismJson>,
    pub compose: Vec<[Mor; 3]>,
    pub identities: Vec<Mor>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctorJson {
    pub dom: String,
    pub cod: String,
    pub objects: Vec<Obj>,
    pub morphisms: Vec<Mor>,
}

/// Named groupoids and functors between them.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    #[serde(default)]
    pub groupoids: BTreeMap<String, GroupoidJson>,
    #[serde(default)]
    pub functors: BTreeMap<String, FunctorJson>,
}

impl GroupoidJson {
    pub fn from_groupoid(g: &FinGroupoid) -> Self {
        let mut compose = Vec::new();
        for f in g.morphisms() {
            for &h in g.out(g.dst(f)) {
                compose.push([h, f, g.compose(h, f)]);
            }
        }
        GroupoidJson {
            objects: g.object_count(),
            morphisms: g
                .morphisms()
                .map(|m| MorphismJson {
                    id: m,
                    src: g.src(m),
                    dst: g.dst(m),
                })
                .collect(),
            compose,
            identities: g.objects().map(|x| g.id(x)).collect(),
        }
    }

    pub fn to_groupoid(&self) -> Result<G, TribeError> {
        let n = self.morphisms.len();
        limits::check_input(self.objects, n)?;
        let mut ends = vec![None; n];
        for m in &self.morphisms {
            let slot = ends.get_mut(m.id as usize).ok_or_else(|| TribeError::Exchange(format!(
                "morphism id {} out of range",
                m.id
            )))?;
            if slot.replace((m.src, m.dst)).is_some() {
                return Err(TribeError::Exchange(format!("morphism id {} given twice", m.id)));
            }
        }
        let ends: Vec<(Obj, Obj)> = ends.into_iter().map(|e| e.expect("ids are a permutation")).collect();
        let compose: Vec<(Mor, Mor, Mor)> = self.compose.iter().map(|&[g, f, h]| (g, f, h)).collect();
        Ok(Arc::new(FinGroupoid::from_tables(
            self.objects,
            &ends,
            &compose,
            &self.identities,
        )?))
    }
}

impl Document {
    pub fn groupoid(&self, name: &str) -> Result<G, TribeError> {
        self.groupoids
            .get(name)
            .ok_or_else(|| TribeError::Exchange(format!("unknown groupoid `{name}`")))?
            .to_groupoid()
    }

    pub fn functor(&self, name: &str) -> Result<GFunctor, TribeError> {
        let f = self
            .functors
            .get(name)
            .ok_or_else(|| TribeError::Exchange(format!("unknown functor `{name}`")))?;
        GFunctor::new(
            self.groupoid(&f.dom)?,
            self.groupoid(&f.cod)?,
            f.objects.clone(),
            f.morphisms.clone(),
        )
    }

    pub fn fibration(&self, name: &str) -> Result<FibrationMap, TribeError> {
        FibrationMap::new(self.functor(name)?)
    }
}

pub fn parse_json(text: &str) -> Result<GroupoidJson, TribeError> {
    serde_json::from_str(text).map_err(|e| TribeError::Exchange(e.to_string()))
}

/// Parse `d3`, `BZ2`, `K2`, `1`, products like `d2*BZ2`, or a path to a
/// groupoid JSON file.
pub fn parse_spec(spec: &str) -> Result<G, TribeError> {
    let spec = spec.trim();
    if Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec)
            .map_err(|e| TribeError::Exchange(format!("{spec}: {e}")))?;
        return parse_json(&text)?.to_groupoid();
    }
    let mut acc: Option<G> = None;
    for factor in spec.split('*') {
        let g = atom(factor.trim())?;
        acc = Some(match acc {
            None => g,
            Some(a) => {
                limits::check_input(
                    a.object_count() * g.object_count(),
                    a.morphism_count() * g.morphism_count(),
                )?;
                product(&a, &g)
            }
        });
    }
    acc.ok_or_else(|| TribeError::Exchange("empty groupoid spec".into()))
}

fn atom(s: &str) -> Result<G, TribeError> {
    let bad = || TribeError::Exchange(format!("unrecognised groupoid `{s}` (try d3, BZ2, K2, 1, A*B or a JSON path)"));
    let num = |t: &str| t.parse::<usize>().map_err(|_| bad());
    let (objects, morphisms, build): (usize, usize, fn(usize) -> G) = if s == "1" {
        (1, 1, discrete)
    } else if let Some(n) = s.strip_prefix("BZ") {
        let n = num(n)?;
        if n == 0 {
            return Err(bad());
        }
        (1, n, cyclic)
    } else if let Some(n) = s.strip_prefix('d') {
        let n = num(n)?;
        (n, n, discrete)
    } else if let Some(n) = s.strip_prefix('K') {
        let n = num(n)?;
        (n, n * n, codiscrete)
    } else {
        return Err(bad());
    };
    limits::check_input(objects, morphisms)?;
    let n = match s {
        "1" => 1,
        _ => num(s.trim_start_matches(|c: char| c.is_ascii_alphabetic()))?,
    };
    Ok(build(n))
}
