mod common;

use std::sync::Arc;

use common::stdlib;
use hott_core::checker::normalize;
use hott_core::gen::{base_context, typed_term};
use hott_core::syntax::{Context, Term};
use hott_denote::Model;
use rand::rngs::StdRng;
use rand::SeedableRng;

#[test]
fn convertible_terms_have_identical_sections() {
    let sig = stdlib();
    let model = Model::new(&sig, 2).unwrap();
    let mut rng = StdRng::seed_from_u64(7);
    let mut changed = 0;
    for i in 0..50 {
        let t = typed_term(&mut rng, 6);
        let nf = normalize(&sig, &t.ctx, &t.term, &t.ty).unwrap();
        changed += usize::from(nf != t.term);
        let a = model.denote_term(&t.ctx, &t.term, &t.ty).unwrap();
        let b = model.denote_term(&t.ctx, &nf, &t.ty).unwrap();
        assert!(a.same_table(&b), "pair {i}: {:?} vs {:?}", t.term, nf);
    }
    assert!(changed >= 10, "only {changed} pairs differ syntactically");
}

#[test]
fn beta_and_projections_denote_strictly() {
    let sig = stdlib();
    let model = Model::new(&sig, 2).unwrap();
    let ctx = base_context();
    // (\y. f y) a  and  fst (a, b)  against  f a  and  a
    let redex = Term::App(Term::lam(Term::app(Term::var(2), Term::var(0))), Term::var(3));
    let reduct = Term::App(Term::var(1), Term::var(3));
    let ty = Term::el(Term::var(4));
    let a = model.denote_term(&ctx, &redex, &ty).unwrap();
    let b = model.denote_term(&ctx, &reduct, &ty).unwrap();
    assert!(a.same_table(&b));
    let proj = Term::Fst(Term::pair(Term::var(3), Term::var(2)));
    let ta = Term::el(Term::var(5));
    let c = model.denote_term(&ctx, &proj, &ta).unwrap();
    let d = model.denote_term(&ctx, &Term::Var(3), &ta).unwrap();
    assert!(c.same_table(&d));
}

/// Substituting `refl a` for the loop `q` is the pullback along the section
/// `⟨id, refl a⟩`.
#[test]
fn substitution_is_strict_pullback() {
    let sig = stdlib();
    let model = Model::new(&sig, 2).unwrap();
    let full = base_context();
    let gamma = Context {
        entries: full.entries[..5].to_vec(),
    };
    let loop_ty = full.entries[5].clone();
    let s = Term::Refl(Term::var(2));
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..20 {
        let t = typed_term(&mut rng, 5);
        assert!(model
            .substitution_coherence(&gamma, &loop_ty, &t.term, &t.ty, &s)
            .unwrap());
    }
    // A term that actually uses the loop.
    let t = Term::Var(0);
    let ty = Arc::unwrap_or_clone(loop_ty.clone());
    let ty = hott_core::syntax::weaken(&ty, 1, 0);
    assert!(model.substitution_coherence(&gamma, &loop_ty, &t, &ty, &s).unwrap());
}
