use std::collections::BTreeSet;

use grpd_tribe::corpus::{corpus, Corpus, CorpusKind};
use grpd_tribe::exchange::{Document, FunctorJson, GroupoidJson};
use grpd_tribe::groupoid::{codiscrete, cyclic};
use grpd_tribe::suite::{document_suite, tribe_axiom_suite, SuiteLimits};

#[test]
fn empty_corpus_passes_vacuously() {
    let empty = Corpus {
        groupoids: vec![],
        fibrations: vec![],
    };
    let report = tribe_axiom_suite(&empty, &SuiteLimits::default());
    assert!(report.passed());
    assert!(report.records.iter().all(|r| !r.check.starts_with("validate")));
}

#[test]
fn small_corpus_passes_every_check() {
    let report = tribe_axiom_suite(&corpus(CorpusKind::Small), &SuiteLimits::default());
    let failures: Vec<_> = report.failures().collect();
    assert!(failures.is_empty(), "{failures:?}");
    let checks: BTreeSet<&str> = report.records.iter().map(|r| r.check.as_str()).collect();
    for c in [
        "validate-groupoid",
        "validate-fibration",
        "terminal-fibration",
        "pullback-fibration",
        "pullback-anodyne",
        "factorize",
        "lifting",
        "pi-adjunction",
        "pi-path-objects",
    ] {
        assert!(checks.contains(c), "{c} never ran");
    }
}

#[test]
fn default_corpus_passes() {
    let c = corpus(CorpusKind::Default);
    assert_eq!(c.groupoids.len(), 29);
    let report = tribe_axiom_suite(&c, &SuiteLimits::default());
    assert!(report.passed(), "{:?}", report.failures().next());
}

#[test]
fn records_serialize() {
    let report = tribe_axiom_suite(&corpus(CorpusKind::Small), &SuiteLimits::default());
    let json = serde_json::to_value(&report.records[0]).unwrap();
    for key in ["check", "instance", "result", "elapsed_ms"] {
        assert!(json.get(key).is_some(), "{key}");
    }
}

fn document() -> Document {
    let mut doc = Document::default();
    doc.groupoids.insert("K2".into(), GroupoidJson::from_groupoid(&codiscrete(2)));
    doc.groupoids.insert("BZ2".into(), GroupoidJson::from_groupoid(&cyclic(2)));
    doc.functors.insert(
        "collapse".into(),
        FunctorJson {
            dom: "BZ2".into(),
            cod: "BZ2".into(),
            objects: vec![0],
            morphisms: vec![0, 1],
        },
    );
    doc
}

#[test]
fn documents_run_through_the_suite() {
    assert!(document_suite(&document(), &SuiteLimits::default()).passed());
}

#[test]
fn broken_composition_table_is_a_validation_failure() {
    let mut doc = document();
    let g = doc.groupoids.get_mut("BZ2").unwrap();
    let last = g.compose.last_mut().unwrap();
    last[2] = 1 - last[2];
    let report = document_suite(&doc, &SuiteLimits::default());
    assert!(!report.passed());
    let f: Vec<_> = report.failures().collect();
    assert!(f.iter().any(|r| r.check == "validate-groupoid" && r.instance == "BZ2"));
    assert!(f.iter().all(|r| r.check.starts_with("validate")));
}

#[test]
fn non_fibration_functor_is_a_validation_failure() {
    let mut doc = document();
    doc.groupoids.insert("d1".into(), GroupoidJson::from_groupoid(&grpd_tribe::groupoid::discrete(1)));
    doc.functors.insert(
        "point".into(),
        FunctorJson {
            dom: "d1".into(),
            cod: "K2".into(),
            objects: vec![0],
            morphisms: vec![0],
        },
    );
    let report = document_suite(&doc, &SuiteLimits::default());
    let f: Vec<_> = report.failures().collect();
    assert_eq!(f.len(), 1);
    assert_eq!((f[0].check.as_str(), f[0].instance.as_str()), ("validate-fibration", "point"));
}
