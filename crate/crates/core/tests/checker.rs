use std::collections::HashSet;

use hott_core::builtins;
use hott_core::checker::{check, check_source, infer, normalize_type, CheckError, Flags, Signature};
use hott_core::parser::{parse_term, Resolver};
use hott_core::{Axiom, Context, Term};

/// Context `A B : U0, a b : El A, P : El A -> U0` with local names.
fn cx() -> (Context, Vec<String>) {
    let mut ctx = Context::new();
    ctx.push(Term::univ(0));
    ctx.push(Term::univ(0));
    ctx.push(Term::el(Term::var(1)));
    ctx.push(Term::el(Term::var(2)));
    ctx.push(Term::pi(Term::el(Term::var(3)), Term::univ(0)));
    let names = ["A", "B", "a", "b", "P"].map(String::from).to_vec();
    (ctx, names)
}

fn term(sig: &Signature, locals: &[String], src: &str) -> Term {
    let st = parse_term("<t>", src).unwrap();
    let known = sig.known_names();
    (*Resolver::with_locals(&known, locals.to_vec()).resolve(&st).unwrap()).clone()
}

#[test]
fn identity_checks_against_its_annotation() {
    let sig = Signature::default();
    let ty = term(&sig, &[], "Pi (A : U0) (x : El A) -> El A");
    let t = term(&sig, &[], "\\A x. x");
    check(&sig, &Context::new(), &t, &ty).unwrap();
}

#[test]
fn refl_at_distinct_points_fails() {
    let sig = Signature::default();
    let (ctx, names) = cx();
    let ty = term(&sig, &names, "Id (El A) a b");
    let err = check(&sig, &ctx, &term(&sig, &names, "refl a"), &ty).unwrap_err();
    assert!(matches!(err, CheckError::TypeMismatch { .. }), "{err}");
    let ok = term(&sig, &names, "Id (El A) a a");
    check(&sig, &ctx, &term(&sig, &names, "refl a"), &ok).unwrap();
}

#[test]
fn el_of_a_universe_is_rejected() {
    let sig = Signature::default();
    let err = infer(&sig, &Context::new(), &Term::El(Term::univ(0))).unwrap_err();
    assert!(!matches!(err, CheckError::UnboundVar { .. }), "{err}");
}

#[test]
fn composition_checks() {
    let sig = Signature::default();
    let ty = term(
        &sig,
        &[],
        "Pi (A B C : U0) -> (El B -> El C) -> (El A -> El B) -> El A -> El C",
    );
    let t = term(&sig, &[], "\\A B C g f x. g (f x)");
    check(&sig, &Context::new(), &t, &ty).unwrap();
}

#[test]
fn ua_has_the_univalence_type() {
    let sig = Signature::default();
    let ty = infer(&sig, &Context::new(), &Term::Axiom(Axiom::Ua(0))).unwrap();
    assert_eq!(ty, *builtins::axiom_type(Axiom::Ua(0)));
    match ty {
        Term::Pi(a, rest) => {
            assert_eq!(*a, Term::Univ(0));
            assert!(matches!(&*rest, Term::Pi(b, _) if **b == Term::Univ(0)));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn inference_is_deterministic() {
    let sig = Signature::default();
    let t = Term::Axiom(Axiom::Funext(0));
    let a = infer(&sig, &Context::new(), &t).unwrap();
    let b = infer(&sig, &Context::new(), &t).unwrap();
    assert_eq!(a, b);
}

#[test]
fn codes_decode_to_type_formers() {
    let sig = Signature::default();
    let (ctx, names) = cx();
    let cases = [
        ("El (code-pi A (\\x. B))", "Pi (x : El A) -> El B"),
        ("El (code-sg A (\\x. P x))", "Sg (x : El A) . El (P x)"),
        ("El (code-id A a b)", "Id (El A) a b"),
        ("El (code-u 0)", "U0"),
        ("El (lift A)", "El A"),
    ];
    for (code, former) in cases {
        let l = normalize_type(&sig, &ctx, &term(&sig, &names, code)).unwrap();
        let r = normalize_type(&sig, &ctx, &term(&sig, &names, former)).unwrap();
        assert_eq!(l, r, "{code}");
    }
}

#[test]
fn universe_levels_bounded_by_height() {
    let sig = Signature::new(Flags {
        height: 2,
        ..Flags::default()
    });
    assert_eq!(infer(&sig, &Context::new(), &Term::CodeUniv(0)).unwrap(), Term::Univ(1));
    let err = infer(&sig, &Context::new(), &Term::CodeUniv(1)).unwrap_err();
    assert_eq!(err.kind(), "universe-overflow");
}

#[test]
fn modules_report_per_declaration() {
    let mut sig = Signature::default();
    let empty = check_source(&mut sig, "e.hott", "", false).unwrap();
    assert!(empty.passed() && empty.decls.is_empty());

    let src = "def id : Pi (A : U0) -> El A -> El A := \\A x. x\n\
               def bad : Pi (A : U0) -> El A -> El A := \\A x. A\n\
               def id2 : Pi (A : U0) -> El A -> El A := \\A. id A\n";
    let r = check_source(&mut sig, "m.hott", src, false).unwrap();
    let verdicts: Vec<_> = r.decls.iter().map(|d| (d.name.as_str(), d.passed)).collect();
    assert_eq!(verdicts, [("id", true), ("bad", false), ("id2", true)]);
    assert_eq!(r.decls[1].line, 2);

    let dup = check_source(&mut sig, "d.hott", "def id : U1 := U0", false);
    assert!(dup.is_err());
}

#[test]
fn ua_disabled_is_reported() {
    let sig = Signature::new(Flags {
        ua_levels: Default::default(),
        ..Flags::default()
    });
    let err = infer(&sig, &Context::new(), &Term::Axiom(Axiom::Ua(0))).unwrap_err();
    assert_eq!(err.kind(), "axiom-disabled");
    let _: HashSet<String> = sig.known_names();
}
