use std::collections::BTreeSet;

use hott_core::builtins;
use hott_core::checker::{Flags, Signature};
use hott_core::stdlib;

fn built() -> (Signature, stdlib::Build) {
    let mut sig = Signature::new(stdlib::default_flags());
    let b = stdlib::build_embedded(&mut sig);
    (sig, b)
}

#[test]
fn stdlib_builds() {
    let (_, b) = built();
    for d in &b.report.decls {
        assert!(d.passed, "{} failed: {:?}", d.name, d.error);
    }
    assert!(b.report.frontend_errors.is_empty(), "{:?}", b.report.frontend_errors);
    assert!(b.missing_required.is_empty(), "{:?}", b.missing_required);
}

#[test]
fn report_is_deterministic() {
    let (_, a) = built();
    let (_, b) = built();
    let strip = |r: &stdlib::Build| {
        r.report
            .decls
            .iter()
            .map(|d| (d.name.clone(), d.passed, d.normal_form_size))
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn id_to_equiv_on_refl_is_judgmental() {
    let (sig, _) = built();
    let src = "\\A. idToEquiv A A (refl A)";
    let lhs = parse_resolve(&sig, src);
    let rhs = parse_resolve(&sig, "\\A. idEquiv A");
    let ty = parse_resolve(&sig, "Pi (A : U0) -> El (Equiv0 A A)");
    let ctx = hott_core::Context::new();
    let l = hott_core::checker::normalize(&sig, &ctx, &lhs, &ty).unwrap();
    let r = hott_core::checker::normalize(&sig, &ctx, &rhs, &ty).unwrap();
    assert_eq!(l, r);
}

fn parse_resolve(sig: &Signature, src: &str) -> hott_core::Term {
    let s = hott_core::parser::parse_term("<test>", src).unwrap();
    let known = sig.known_names();
    (*hott_core::parser::Resolver::new(&known).resolve(&s).unwrap()).clone()
}

#[test]
fn library_definitions_agree_with_kernel_builtins() {
    let (sig, _) = built();
    let pairs = [
        ("LInv0", "LInvC", 0),
        ("RInv0", "RInvC", 0),
        ("isEquiv0", "isEquivC", 0),
        ("Equiv0", "EquivC", 0),
        ("idEquiv", "idEquivC", 0),
        ("idToEquiv", "idToEquivC", 0),
        ("isProp0", "isPropC", 0),
        ("Prop0", "PropC", 0),
        ("isEquiv1", "isEquivC", 1),
        ("isProp1", "isPropC", 1),
        ("Prop1", "PropC", 1),
        ("isEquiv2", "isEquivC", 2),
        ("propComparison0", "propComparisonC", 0),
    ];
    for (lib, kernel, level) in pairs {
        let ours = sig.normal_form(lib).unwrap();
        let theirs = builtins::builtin_def(kernel, level).unwrap();
        assert_eq!(ours, theirs, "{lib} vs {kernel}{level}");
    }
}

#[test]
fn prop_universe_lives_one_level_up() {
    let (sig, _) = built();
    assert_eq!(sig.normal_type("Prop0"), Some(hott_core::Term::Univ(1)));
    assert_eq!(sig.normal_type("Prop1"), Some(hott_core::Term::Univ(2)));
}

#[test]
fn resizing_checks_at_comparison_equivalence() {
    let (sig, _) = built();
    let resize_ty = builtins::axiom_type(hott_core::Axiom::Resize(0));
    assert_eq!(sig.normal_type("resizing0").unwrap(), *resize_ty);
}

#[test]
fn univalence_statement_matches_axiom() {
    let (sig, _) = built();
    let ua_ty = builtins::axiom_type(hott_core::Axiom::Ua(0));
    assert_eq!(sig.normal_type("univalence0").unwrap(), *ua_ty);
}

#[test]
fn flag_isolation_without_ua() {
    let (_, full) = built();
    let mut sig = Signature::new(Flags {
        ua_levels: BTreeSet::new(),
        ..stdlib::default_flags()
    });
    let b = stdlib::build_embedded(&mut sig);
    let mut failed = 0;
    for (with, without) in full.report.decls.iter().zip(&b.report.decls) {
        assert_eq!(with.name, without.name);
        if without.passed {
            continue;
        }
        failed += 1;
        assert_eq!(
            without.error_kind.as_deref(),
            Some("axiom-disabled"),
            "{}: {:?}",
            without.name,
            without.error
        );
    }
    let names: Vec<&str> = b
        .report
        .decls
        .iter()
        .filter(|d| !d.passed)
        .map(|d| d.name.as_str())
        .collect();
    assert!(names.contains(&"univalence0"));
    assert!(names.contains(&"transportUa"));
    assert!(failed > 0);
    // Everything not mentioning ua still passes.
    for name in ["comp", "idToEquivRefl", "equivComp", "isPropIsProp", "resizing0"] {
        assert!(b.report.find(name).unwrap().passed, "{name}");
    }
}

#[test]
fn stdlib_from_disk_matches_embedded() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../stdlib/manifest.txt");
    let files = stdlib::read_manifest(&root).unwrap();
    assert_eq!(files.len(), stdlib::EMBEDDED.len());
    for ((_, disk), (_, emb)) in files.iter().zip(stdlib::EMBEDDED) {
        assert_eq!(disk, emb);
    }
}
