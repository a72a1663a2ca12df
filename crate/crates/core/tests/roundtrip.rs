use std::collections::HashSet;

use hott_core::checker::{normalize, Signature};
use hott_core::gen::{raw_term, typed_term};
use hott_core::parser::{parse_module, parse_term, print_term, Printer, Resolver};
use hott_core::stdlib;
use hott_core::syntax::Term;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn locals(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

fn print_open(t: &Term, n: usize) -> String {
    let avoid = |_: &str| false;
    Printer::with_context(&avoid, locals(n)).print(t)
}

fn parse_open(src: &str, n: usize) -> Term {
    let globals = HashSet::new();
    let st = parse_term("<rt>", src).unwrap_or_else(|e| panic!("{e}\n{src}"));
    let t = Resolver::with_locals(&globals, locals(n))
        .resolve(&st)
        .unwrap_or_else(|e| panic!("{e}\n{src}"));
    (*t).clone()
}

proptest! {
    #[test]
    fn raw_terms_roundtrip(seed in any::<u64>()) {
        let t = raw_term(&mut StdRng::seed_from_u64(seed), 3, 25);
        let printed = print_open(&t, 3);
        prop_assert_eq!(parse_open(&printed, 3), t);
    }

    #[test]
    fn typed_terms_roundtrip(seed in any::<u64>()) {
        let typed = typed_term(&mut StdRng::seed_from_u64(seed), 4);
        let n = typed.ctx.entries.len();
        prop_assert_eq!(parse_open(&print_open(&typed.term, n), n), typed.term.clone());
        prop_assert_eq!(parse_open(&print_open(&typed.ty, n), n), typed.ty);
    }

    #[test]
    fn print_parse_is_idempotent(seed in any::<u64>()) {
        let t = raw_term(&mut StdRng::seed_from_u64(seed), 2, 20);
        let once = print_open(&t, 2);
        let twice = print_open(&parse_open(&once, 2), 2);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn parse_errors_stay_in_bounds(src in "[a-zA-Z0-9 ().,:=\\\\>-]{0,40}") {
        if let Err(e) = parse_module("<fuzz>", &src) {
            let s = e.span();
            prop_assert!(s.start <= s.end && s.end <= src.len(), "{e} in {src:?}");
            prop_assert!(s.line >= 1 && s.column >= 1);
        }
    }
}

#[test]
fn stdlib_normal_forms_roundtrip_and_are_idempotent() {
    let mut sig = Signature::new(stdlib::default_flags());
    let build = stdlib::build_embedded(&mut sig);
    assert!(build.passed());
    let known = sig.known_names();
    let avoid = |s: &str| known.contains(s);
    let empty = Default::default();
    for name in sig.names().to_vec() {
        let ty = sig.normal_type(&name).unwrap();
        let printed = Printer::new(&avoid).print(&ty);
        let st = parse_term("<nf>", &printed).unwrap();
        let back = Resolver::new(&known).resolve(&st).unwrap();
        assert_eq!(*back, ty, "{name}: {printed}");
        if let Some(nf) = sig.normal_form(&name) {
            let again = normalize(&sig, &empty, &nf, &ty).unwrap();
            assert_eq!(again, nf, "{name}");
            let printed = Printer::new(&avoid).print(&nf);
            let st = parse_term("<nf>", &printed).unwrap();
            assert_eq!(*Resolver::new(&known).resolve(&st).unwrap(), nf, "{name}");
        }
    }
}

#[test]
fn documented_parse_examples() {
    let src = "def k : U1 := code-pi (code-u 0) (\\A. A)";
    assert_eq!(parse_module("k", src).unwrap().len(), 1);
    let err = parse_module("bad", "def bad := (").unwrap_err();
    assert_eq!(err.span().line, 1);
    assert!(err.span().start <= "def bad := (".len());
    assert_eq!(print_term(&Term::Univ(0)), "U0");
}
