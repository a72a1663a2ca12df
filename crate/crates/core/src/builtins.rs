//! Kernel-side definitions needed to state the types of the axioms.
//!
//! They are written in surface syntax, one copy per universe level, checked in
//! a private signature, and the axiom types are stored as closed normal forms
//! so that they do not depend on what the user has loaded.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use crate::checker::{check_source, normalize_type, Flags, Signature};
use crate::parser::{parse_term, Resolver};
use crate::syntax::{Axiom, Context, RcTerm, Term};

/// Surface source of the level-`n` definitions. Every name carries the level
/// as a suffix, e.g. `isEquivC0`.
pub fn level_source(n: u32) -> String {
    let m = n + 1;
    format!(
        r"
def LInvC{n} : Pi (A B : U{n}) (f : El A -> El B) -> U{n} :=
  \A B f. code-sg (code-pi B (\y. A)) (\g. code-pi A (\x. code-id A (g (f x)) x))
def RInvC{n} : Pi (A B : U{n}) (f : El A -> El B) -> U{n} :=
  \A B f. code-sg (code-pi B (\y. A)) (\h. code-pi B (\y. code-id B (f (h y)) y))
def isEquivC{n} : Pi (A B : U{n}) (f : El A -> El B) -> U{n} :=
  \A B f. code-sg (LInvC{n} A B f) (\l. RInvC{n} A B f)
def EquivC{n} : Pi (A B : U{n}) -> U{n} :=
  \A B. code-sg (code-pi A (\x. B)) (\f. isEquivC{n} A B f)
def idEquivC{n} : Pi (A : U{n}) -> El (EquivC{n} A A) :=
  \A. (\x. x, ((\x. x, \x. refl x), (\x. x, \x. refl x)))
def idToEquivC{n} : Pi (A B : U{n}) (p : Id U{n} A B) -> El (EquivC{n} A B) :=
  \A B p. J (\X Y q. El (EquivC{n} X Y)) (\X. idEquivC{n} X) A B p
def isPropC{n} : Pi (A : U{n}) -> U{n} :=
  \A. code-pi A (\x. code-pi A (\y. code-id A x y))
def PropC{n} : U{m} :=
  code-sg (code-u {n}) (\A. lift (isPropC{n} A))
"
    )
}

/// The comparison map `Prop_n -> Prop_(n+1)`; needs both levels' definitions.
fn comparison_source(n: u32) -> String {
    let m = n + 1;
    format!(
        r"
def propComparisonC{n} : El (PropC{n}) -> El (PropC{m}) :=
  \P. (lift P.1, P.2)
"
    )
}

/// A signature holding the builtin definitions at the given levels.
fn signature_for(levels: &[u32], comparisons: &[u32]) -> Signature {
    let top = levels.iter().chain(comparisons).copied().max().unwrap_or(0);
    let mut sig = Signature::new(Flags {
        height: top + 3,
        ..Flags::default()
    });
    let mut src = String::new();
    for &l in levels {
        src.push_str(&level_source(l));
    }
    for &l in comparisons {
        src.push_str(&comparison_source(l));
    }
    let report = check_source(&mut sig, "<builtin>", &src, true).expect("builtin source parses");
    assert!(report.passed(), "builtin definitions check: {report:?}");
    sig
}

fn type_source(ax: Axiom) -> (String, Vec<u32>, Vec<u32>) {
    match ax {
        Axiom::Funext(n) => (
            format!(
                "Pi (A : U{n}) (B : El A -> U{n}) (f g : Pi (x : El A) -> El (B x)) \
                 -> (Pi (x : El A) -> Id (El (B x)) (f x) (g x)) \
                 -> Id (Pi (x : El A) -> El (B x)) f g"
            ),
            vec![],
            vec![],
        ),
        Axiom::Ua(n) => {
            let m = n + 1;
            (
                format!(
                    "Pi (A B : U{n}) -> El (isEquivC{m} (code-id (code-u {n}) A B) \
                     (lift (EquivC{n} A B)) (\\p. idToEquivC{n} A B p))"
                ),
                vec![n, m],
                vec![],
            )
        }
        Axiom::Resize(n) => {
            let (m, k) = (n + 1, n + 2);
            (
                format!("El (isEquivC{k} (lift (PropC{n})) (PropC{m}) propComparisonC{n})"),
                vec![n, m, k],
                vec![n],
            )
        }
    }
}

/// The closed type of an axiom constant, in normal form.
pub fn axiom_type(ax: Axiom) -> RcTerm {
    static CACHE: OnceLock<Mutex<HashMap<Axiom, RcTerm>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().expect("cache poisoned").get(&ax) {
        return t.clone();
    }
    let (src, levels, comparisons) = type_source(ax);
    let sig = signature_for(&levels, &comparisons);
    let stx = parse_term("<builtin>", &src).expect("axiom type parses");
    let known: HashSet<String> = sig.known_names();
    let ty = Resolver::new(&known).resolve(&stx).expect("axiom type resolves");
    let nf = normalize_type(&sig, &Context::new(), &ty).expect("axiom type evaluates");
    let closed = Arc::new(nf);
    cache
        .lock()
        .expect("cache poisoned")
        .insert(ax, closed.clone());
    closed
}

/// Normal form of a builtin definition, for comparison with library
/// definitions. `name` is unsuffixed, e.g. `"isEquivC"`.
pub fn builtin_def(name: &str, level: u32) -> Option<Term> {
    let sig = if name == "propComparisonC" {
        signature_for(&[level, level + 1], &[level])
    } else {
        signature_for(&[level], &[])
    };
    sig.normal_form(&format!("{name}{level}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axiom_types_are_closed_and_constant_free() {
        for ax in [Axiom::Funext(0), Axiom::Ua(0), Axiom::Ua(1), Axiom::Resize(0)] {
            let t = axiom_type(ax);
            assert_eq!(t.free_bound(), 0, "{ax}");
            let mut gs = Vec::new();
            t.globals(&mut gs);
            assert!(gs.is_empty(), "{ax} mentions {gs:?}");
        }
    }

    #[test]
    fn builtin_lookup() {
        assert!(builtin_def("isEquivC", 0).is_some());
        assert!(builtin_def("propComparisonC", 0).is_some());
        assert!(builtin_def("nonsense", 0).is_none());
    }
}
