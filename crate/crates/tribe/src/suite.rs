//! The tribe axiom suite over a corpus, with per-check records.

use std::ops::ControlFlow;
use std::time::Instant;

use serde::Serialize;

use crate::corpus::Corpus;
use crate::error::TribeError;
use crate::exchange::Document;
use crate::fibration::{
    factorize, fibered_square, is_anodyne, lift_in_square, path_object, pullback, FibrationMap,
    PathChoice,
};
use crate::functor::{equivalence_check, product_with_projections, same, GFunctor, Problem};
use crate::groupoid::{codiscrete, cyclic, discrete, G};
use crate::pi::Pi;

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub instance: String,
    pub result: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub records: Vec<CheckRecord>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.result)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.result)
    }

    /// Run one check; errors count as failures with the error as witness.
    pub fn run(
        &mut self,
        check: &str,
        instance: impl Into<String>,
        f: impl FnOnce() -> Result<Outcome, TribeError>,
    ) {
        let start = Instant::now();
        let (result, witness) = match f() {
            Ok(Outcome::Pass) => (true, None),
            Ok(Outcome::Fail(w)) => (false, Some(w)),
            Err(e) => (false, Some(e.to_string())),
        };
        self.records.push(CheckRecord {
            check: check.into(),
            instance: instance.into(),
            result,
            witness,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }
}

pub enum Outcome {
    Pass,
    Fail(String),
}

fn pass_if(ok: bool, witness: impl FnOnce() -> String) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail(witness())
    }
}

/// Bounds on the exhaustive parts of the suite.
#[derive(Clone, Debug)]
pub struct SuiteLimits {
    /// Functors `X -> B` tried per fibration when pulling back.
    pub pullbacks_per_fibration: usize,
    /// Test cones per pullback square.
    pub cones_per_square: usize,
    /// Lifting squares per anodyne/fibration pair.
    pub squares_per_pair: usize,
    /// Largest total groupoid (objects) used in lifting and Π checks.
    pub max_total_objects: usize,
    /// Second fibrations `q` tried per `p` in the Π checks.
    pub pi_targets_per_fibration: usize,
}

impl Default for SuiteLimits {
    fn default() -> Self {
        SuiteLimits {
            pullbacks_per_fibration: 8,
            cones_per_square: 6,
            squares_per_pair: 16,
            max_total_objects: 16,
            pi_targets_per_fibration: 8,
        }
    }
}

fn first_n(problem: Problem<'_>, n: usize) -> Result<Vec<GFunctor>, TribeError> {
    let mut out = Vec::new();
    if n == 0 {
        return Ok(out);
    }
    problem.search(&mut |f| {
        out.push(f.clone());
        if out.len() >= n {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(out)
}

fn test_sources() -> Vec<(&'static str, G)> {
    vec![("d1", discrete(1)), ("d2", discrete(2)), ("BZ2", cyclic(2))]
}

/// An anodyne map together with fibrations into its codomain.
struct AnodyneCase {
    name: String,
    map: GFunctor,
    into_codomain: Vec<(String, FibrationMap)>,
}

fn anodyne_cases(corpus: &Corpus) -> Vec<AnodyneCase> {
    let k2 = codiscrete(2);
    let mut out = Vec::new();
    for (name, g) in &corpus.groupoids {
        if g.object_count() == 0 || g.object_count() > 4 {
            continue;
        }
        let (p, pr1, _) = product_with_projections(g, &k2);
        let k = k2.object_count() as u32;
        let mk = k2.morphism_count() as u32;
        let map = GFunctor::new(
            g.clone(),
            p.clone(),
            g.objects().map(|x| x * k).collect(),
            g.morphisms().map(|m| m * mk + k2.id(0)).collect(),
        )
        .expect("inclusion at the first point");
        let mut into = vec![(format!("id {name}*K2"), FibrationMap::identity(&p))];
        for (fname, f) in &corpus.fibrations {
            if same(f.base(), g) && f.total().object_count() <= 4 {
                if let Ok(pb) = pullback(f, &pr1) {
                    into.push((format!("pr1*({fname})"), pb.fib));
                }
            }
        }
        out.push(AnodyneCase {
            name: format!("{name} -> {name}*K2"),
            map,
            into_codomain: into,
        });
    }
    let d1 = discrete(1);
    for x in 0..2 {
        let map = GFunctor::new(d1.clone(), k2.clone(), vec![x], vec![k2.id(x)]).expect("point");
        let into = corpus
            .fibrations
            .iter()
            .filter(|(_, f)| same(f.base(), &k2))
            .cloned()
            .collect();
        out.push(AnodyneCase {
            name: format!("d1 -> K2 @{x}"),
            map,
            into_codomain: into,
        });
    }
    out
}

pub fn tribe_axiom_suite(corpus: &Corpus, limits: &SuiteLimits) -> Report {
    let mut report = Report::default();
    validation(corpus, &mut report);
    if !report.passed() {
        return report;
    }
    terminal_maps(corpus, &mut report);
    pullback_stability(corpus, limits, &mut report);
    factorizations(corpus, &mut report);
    lifting(corpus, limits, &mut report);
    pi_checks(corpus, limits, &mut report);
    report
}

/// Run the suite on the groupoids and functors of an exchange document.
/// Entries that fail to load are recorded as validation failures and stop
/// the run.
pub fn document_suite(doc: &Document, limits: &SuiteLimits) -> Report {
    let mut report = Report::default();
    let mut corpus = Corpus {
        groupoids: Vec::new(),
        fibrations: Vec::new(),
    };
    for name in doc.groupoids.keys() {
        match doc.groupoid(name) {
            Ok(g) => corpus.groupoids.push((name.clone(), g)),
            Err(e) => report.run("validate-groupoid", name.clone(), || Err(e)),
        }
    }
    for name in doc.functors.keys() {
        match doc.fibration(name) {
            Ok(p) => corpus.fibrations.push((name.clone(), p)),
            Err(e) => report.run("validate-fibration", name.clone(), || Err(e)),
        }
    }
    if !report.passed() {
        return report;
    }
    tribe_axiom_suite(&corpus, limits)
}

fn validation(corpus: &Corpus, report: &mut Report) {
    for (name, g) in &corpus.groupoids {
        report.run("validate-groupoid", name.clone(), || {
            g.validate()?;
            Ok(Outcome::Pass)
        });
    }
    for (name, p) in &corpus.fibrations {
        report.run("validate-fibration", name.clone(), || {
            p.validate()?;
            Ok(Outcome::Pass)
        });
    }
}

fn terminal_maps(corpus: &Corpus, report: &mut Report) {
    for (name, g) in &corpus.groupoids {
        report.run("terminal-fibration", name.clone(), || {
            let p = FibrationMap::new(GFunctor::to_terminal(g))?;
            p.validate()?;
            Ok(Outcome::Pass)
        });
    }
}

fn pullback_stability(corpus: &Corpus, limits: &SuiteLimits, report: &mut Report) {
    for (pname, p) in &corpus.fibrations {
        for (xname, x) in test_sources() {
            let along = match first_n(Problem::new(&x, p.base()), limits.pullbacks_per_fibration) {
                Ok(a) => a,
                Err(e) => {
                    report.run("pullback-fibration", format!("{pname} along {xname}"), || Err(e));
                    continue;
                }
            };
            for (i, f) in along.iter().enumerate() {
                report.run("pullback-fibration", format!("{pname} along {xname}#{i}"), || {
                    let pb = pullback(p, f)?;
                    pb.fib.validate()?;
                    let square = pb.square();
                    if !square.commutes() {
                        return Ok(Outcome::Fail("square does not commute".into()));
                    }
                    for (yname, y) in test_sources() {
                        for u in first_n(Problem::new(&y, &f.dom), limits.cones_per_square)? {
                            let fu = u.then(f)?;
                            for v in first_n(Problem::new(&y, p.total()).over(&p.map, &fu), 1)? {
                                let n = square.mediating_count(&u, &v)?;
                                if n != 1 {
                                    return Ok(Outcome::Fail(format!(
                                        "cone from {yname} has {n} mediating maps"
                                    )));
                                }
                            }
                        }
                    }
                    Ok(Outcome::Pass)
                });
            }
        }
    }
    for case in anodyne_cases(corpus) {
        for (fname, f) in &case.into_codomain {
            report.run("pullback-anodyne", format!("{} along {fname}", case.name), || {
                let pb = pullback(f, &case.map)?;
                Ok(pass_if(is_anodyne(&pb.to_total), || {
                    "pulled-back map is not anodyne".into()
                }))
            });
        }
    }
}

fn factorizations(corpus: &Corpus, report: &mut Report) {
    let small = [
        ("d1", discrete(1)),
        ("d2", discrete(2)),
        ("BZ2", cyclic(2)),
        ("K2", codiscrete(2)),
    ];
    let mut maps: Vec<(String, GFunctor)> = corpus
        .fibrations
        .iter()
        .map(|(n, p)| (n.clone(), p.map.clone()))
        .collect();
    for (na, a) in &small {
        for (nb, b) in &small {
            for (i, f) in crate::functor::all_functors(a, b).into_iter().enumerate() {
                maps.push((format!("{na}->{nb}@{i}"), f));
            }
        }
    }
    for (name, f) in maps {
        report.run("factorize", name, || {
            let fact = factorize(&f)?;
            fact.fibration.validate()?;
            if fact.anodyne.then(&fact.fibration.map)? != f {
                return Ok(Outcome::Fail("composite differs from the input".into()));
            }
            Ok(pass_if(is_anodyne(&fact.anodyne), || "first factor is not anodyne".into()))
        });
    }
}

fn lifting(corpus: &Corpus, limits: &SuiteLimits, report: &mut Report) {
    let fibrations: Vec<&(String, FibrationMap)> = corpus
        .fibrations
        .iter()
        .filter(|(_, p)| p.total().object_count() <= limits.max_total_objects)
        .collect();
    for case in anodyne_cases(corpus) {
        let i = &case.map;
        let mut extra: Vec<&(String, FibrationMap)> = case.into_codomain.iter().collect();
        extra.extend(fibrations.iter().copied());
        for (pname, p) in extra {
            report.run("lifting", format!("{} against {pname}", case.name), || {
                for v in first_n(Problem::new(&i.cod, p.base()), limits.squares_per_pair)? {
                    let vi = i.then(&v)?;
                    for u in first_n(Problem::new(&i.dom, p.total()).over(&p.map, &vi), limits.squares_per_pair)? {
                        if lift_in_square(i, p, &u, &v)?.is_none() {
                            return Ok(Outcome::Fail(format!(
                                "no lift for square u={:?} v={:?}",
                                u.obj, v.obj
                            )));
                        }
                    }
                }
                Ok(Outcome::Pass)
            });
        }
    }
    // A map that is not anodyne must fail to lift against some fibration.
    report.run("lifting-non-anodyne", "d1 -> d2", || {
        let (d1, d2) = (discrete(1), discrete(2));
        let i = GFunctor::new(d1.clone(), d2.clone(), vec![0], vec![d2.id(0)])?;
        let blocker = FibrationMap::new(i.clone())?;
        for p in corpus.fibrations.iter().map(|(_, p)| p).chain([&blocker]) {
            if p.total().object_count() > limits.max_total_objects {
                continue;
            }
            for v in Problem::new(&d2, p.base()).all()? {
                let vi = i.then(&v)?;
                for u in Problem::new(&d1, p.total()).over(&p.map, &vi).all()? {
                    if lift_in_square(&i, p, &u, &v)?.is_none() {
                        return Ok(Outcome::Pass);
                    }
                }
            }
        }
        Ok(Outcome::Fail("every square lifted".into()))
    });
}

fn pi_pairs<'a>(
    corpus: &'a Corpus,
    limits: &SuiteLimits,
) -> Vec<(String, &'a FibrationMap, &'a FibrationMap)> {
    let small = |p: &FibrationMap| {
        p.total().object_count() <= 6 && p.total().morphism_count() <= 18 && p.base().object_count() <= 6
    };
    let mut out = Vec::new();
    for (pname, p) in &corpus.fibrations {
        if !small(p) {
            continue;
        }
        let mut n = 0;
        for (qname, q) in &corpus.fibrations {
            if n >= limits.pi_targets_per_fibration {
                break;
            }
            if same(q.base(), p.total()) && small(q) {
                out.push((format!("p={pname} q={qname}"), p, q));
                n += 1;
            }
        }
    }
    out
}

fn pi_checks(corpus: &Corpus, limits: &SuiteLimits, report: &mut Report) {
    for (name, p, q) in pi_pairs(corpus, limits) {
        report.run("pi-adjunction", name.clone(), || pi_adjunction(p, q));
        report.run("pi-path-objects", name, || pi_path_objects(p, q));
    }
}

/// `Hom_B(Y, Π_p q) ≅ Hom_E(p*Y, X)` by explicit transposition.
pub fn pi_adjunction(p: &FibrationMap, q: &FibrationMap) -> Result<Outcome, TribeError> {
    let pi = Pi::new(p, q)?;
    pi.fib.validate()?;
    for (yname, y) in test_sources() {
        for r in first_n(Problem::new(&y, p.base()), 4)? {
            let pb = pullback(p, &r)?;
            let left = Problem::new(&y, &pi.groupoid).over(&pi.fib.map, &r).all()?;
            let right = Problem::new(&pb.groupoid, q.total())
                .over(&q.map, &pb.to_total)
                .all()?;
            if left.len() != right.len() {
                return Ok(Outcome::Fail(format!(
                    "from {yname}: {} maps into Π but {} over E",
                    left.len(),
                    right.len()
                )));
            }
            for f in &left {
                let g = pi.transpose_to(f, &pb)?;
                if !right.contains(&g) || pi.transpose_from_functor(&pb, &g)? != *f {
                    return Ok(Outcome::Fail(format!("transpose does not round-trip from {yname}")));
                }
            }
            for g in &right {
                let f = pi.transpose_from_functor(&pb, g)?;
                if pi.transpose_to(&f, &pb)? != *g {
                    return Ok(Outcome::Fail(format!("transpose does not round-trip from {yname}")));
                }
            }
        }
    }
    Ok(Outcome::Pass)
}

/// `Π_p` sends the path factorization of `q` to a path factorization.
pub fn pi_path_objects(p: &FibrationMap, q: &FibrationMap) -> Result<Outcome, TribeError> {
    let path = path_object(q, PathChoice::Arrows)?;
    let sq = fibered_square(q, &path.square)?;
    let on_path = path.boundary.then(&sq)?;
    let pi_x = Pi::new(p, q)?;
    let pi_p = Pi::new(p, &on_path)?;
    let pi_xx = Pi::new(p, &sq)?;
    let refl = pi_x.map_along(&pi_p, &path.anodyne)?;
    if equivalence_check(&refl).is_none() {
        return Ok(Outcome::Fail("Π of the anodyne part is not an equivalence".into()));
    }
    let boundary = pi_p.map_along(&pi_xx, &path.boundary.map)?;
    if FibrationMap::new(boundary).is_err() {
        return Ok(Outcome::Fail("Π of the boundary is not a fibration".into()));
    }
    let first = pi_xx.map_along(&pi_x, &path.square.fib.map)?;
    let second = pi_xx.map_along(&pi_x, &path.square.to_total)?;
    let pairs = pullback(&pi_x.fib, &pi_x.fib.map)?;
    let cmp = pairs.pair(&first, &second)?;
    Ok(pass_if(cmp.is_isomorphism(), || {
        "Π of the fibered square is not the square of Π".into()
    }))
}
