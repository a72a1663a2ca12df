//! Random term generators and the substitution/normalization law suite.

use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::checker::{check, normalize, Signature};
use crate::oracle::{shift_oracle, substitute_oracle};
use crate::syntax::{shift, substitute, weaken, Axiom, Context, RcTerm, Term};

fn rc(t: Term) -> RcTerm {
    Arc::new(t)
}

/// A random well-scoped term over `free` free variables, using every
/// constructor (typing is ignored).
pub fn raw_term(rng: &mut StdRng, free: usize, size: usize) -> Term {
    let leaf = |rng: &mut StdRng, scope: usize| -> Term {
        match rng.gen_range(0..6) {
            0..=2 if scope > 0 => Term::Var(rng.gen_range(0..scope)),
            3 => Term::Univ(rng.gen_range(0..3)),
            4 => Term::CodeUniv(rng.gen_range(0..2)),
            _ => Term::Axiom(match rng.gen_range(0..3) {
                0 => Axiom::Funext(0),
                1 => Axiom::Ua(0),
                _ => Axiom::Resize(0),
            }),
        }
    };
    if size <= 1 {
        return leaf(rng, free);
    }
    let s = size - 1;
    let sub = |rng: &mut StdRng, extra: usize, share: usize| rc(raw_term(rng, free + extra, share.max(1)));
    match rng.gen_range(0..14) {
        0 => Term::Lam(sub(rng, 1, s)),
        1 => Term::Pi(sub(rng, 0, s / 2), sub(rng, 1, s / 2)),
        2 => Term::Sigma(sub(rng, 0, s / 2), sub(rng, 1, s / 2)),
        3 => Term::App(sub(rng, 0, s / 2), sub(rng, 0, s / 2)),
        4 => Term::Pair(sub(rng, 0, s / 2), sub(rng, 0, s / 2)),
        5 => Term::Fst(sub(rng, 0, s)),
        6 => Term::Snd(sub(rng, 0, s)),
        7 => Term::IdTy(sub(rng, 0, s / 3), sub(rng, 0, s / 3), sub(rng, 0, s / 3)),
        8 => Term::Refl(sub(rng, 0, s)),
        9 => Term::J {
            motive: sub(rng, 3, s / 5),
            base: sub(rng, 1, s / 5),
            lhs: sub(rng, 0, s / 5),
            rhs: sub(rng, 0, s / 5),
            path: sub(rng, 0, s / 5),
        },
        10 => Term::El(sub(rng, 0, s)),
        11 => Term::CodePi(sub(rng, 0, s / 2), sub(rng, 0, s / 2)),
        12 => Term::CodeId(sub(rng, 0, s / 3), sub(rng, 0, s / 3), sub(rng, 0, s / 3)),
        _ => Term::Lift(sub(rng, 0, s)),
    }
}

/// Simple types over the fixed base context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ty {
    A,
    B,
    Arrow(Box<Ty>, Box<Ty>),
    Prod(Box<Ty>, Box<Ty>),
    /// `Id (El A) a a`
    LoopA,
}

const LEVEL_A: usize = 0;
const LEVEL_B: usize = 1;
const LEVEL_LA: usize = 2;
const LEVEL_LB: usize = 3;
const LEVEL_F: usize = 4;
const LEVEL_Q: usize = 5;

/// `A B : U0, a : El A, b : El B, f : El A -> El B, q : Id (El A) a a`.
pub fn base_context() -> Context {
    let mut ctx = Context::new();
    ctx.push(Term::univ(0));
    ctx.push(Term::univ(0));
    ctx.push(Term::el(Term::var(1)));
    ctx.push(Term::el(Term::var(1)));
    ctx.push(Term::pi(Term::el(Term::var(3)), Term::el(Term::var(3))));
    ctx.push(Term::id_ty(Term::el(Term::var(4)), Term::var(2), Term::var(2)));
    ctx
}

fn base_types() -> Vec<Ty> {
    // Only the entries that are themselves simple types matter for lookup.
    vec![
        Ty::LoopA, // placeholder for A : U0, never matched (see `lookup`)
        Ty::LoopA,
        Ty::A,
        Ty::B,
        Ty::Arrow(Box::new(Ty::A), Box::new(Ty::B)),
        Ty::LoopA,
    ]
}

fn var_at(depth: usize, level: usize) -> Term {
    Term::Var(depth - 1 - level)
}

impl Ty {
    pub fn to_term(&self, depth: usize) -> Term {
        match self {
            Ty::A => Term::El(rc(var_at(depth, LEVEL_A))),
            Ty::B => Term::El(rc(var_at(depth, LEVEL_B))),
            Ty::Arrow(x, y) => Term::Pi(rc(x.to_term(depth)), rc(y.to_term(depth + 1))),
            Ty::Prod(x, y) => Term::Sigma(rc(x.to_term(depth)), rc(y.to_term(depth + 1))),
            Ty::LoopA => Term::IdTy(
                rc(Term::El(rc(var_at(depth, LEVEL_A)))),
                rc(var_at(depth, LEVEL_LA)),
                rc(var_at(depth, LEVEL_LA)),
            ),
        }
    }
}

pub fn random_ty(rng: &mut StdRng, depth: usize) -> Ty {
    let pick = if depth == 0 { rng.gen_range(0..3) } else { rng.gen_range(0..5) };
    match pick {
        0 => Ty::A,
        1 => Ty::B,
        2 => Ty::LoopA,
        3 => Ty::Arrow(Box::new(random_ty(rng, depth - 1)), Box::new(random_ty(rng, depth - 1))),
        _ => Ty::Prod(Box::new(random_ty(rng, depth - 1)), Box::new(random_ty(rng, depth - 1))),
    }
}

struct TypedGen<'r> {
    rng: &'r mut StdRng,
}

/// Generates terms for the bidirectional checker: `check` may produce
/// introduction forms, `infer` only forms whose type can be synthesized.
impl TypedGen<'_> {
    fn lookup(ctx: &[Ty], ty: &Ty) -> Vec<usize> {
        ctx.iter()
            .enumerate()
            .filter(|(level, t)| *level > LEVEL_B && *t == ty)
            .map(|(level, _)| level)
            .collect()
    }

    fn check(&mut self, ctx: &mut Vec<Ty>, ty: &Ty, fuel: usize) -> Term {
        if fuel > 0 && self.rng.gen_bool(0.4) {
            return self.infer(ctx, ty, fuel);
        }
        let next = fuel.saturating_sub(1);
        match ty {
            Ty::Arrow(x, y) => {
                ctx.push((**x).clone());
                let body = self.check(ctx, y, next);
                ctx.pop();
                Term::Lam(rc(body))
            }
            Ty::Prod(x, y) => {
                let a = self.check(ctx, x, next);
                let b = self.check(ctx, y, next);
                Term::Pair(rc(a), rc(b))
            }
            Ty::LoopA => Term::Refl(rc(var_at(ctx.len(), LEVEL_LA))),
            _ => self.infer(ctx, ty, 0),
        }
    }

    /// `J (\x y p. T) (\x. d) a a path`, which synthesizes `T`.
    fn j_wrap(&mut self, ctx: &mut Vec<Ty>, ty: &Ty, fuel: usize) -> Term {
        let depth = ctx.len();
        ctx.push(Ty::A);
        let base = self.check(ctx, ty, fuel.saturating_sub(1));
        ctx.pop();
        let a = var_at(depth, LEVEL_LA);
        let path = if self.rng.gen_bool(0.5) {
            var_at(depth, LEVEL_Q)
        } else {
            Term::Refl(rc(a.clone()))
        };
        Term::J {
            motive: rc(ty.to_term(depth + 3)),
            base: rc(base),
            lhs: rc(a.clone()),
            rhs: rc(a),
            path: rc(path),
        }
    }

    fn infer(&mut self, ctx: &mut Vec<Ty>, ty: &Ty, fuel: usize) -> Term {
        let depth = ctx.len();
        let vars = Self::lookup(ctx, ty);
        if fuel > 0 && self.rng.gen_bool(0.7) {
            let s = random_ty(self.rng, 1);
            let next = fuel - 1;
            match self.rng.gen_range(0..6) {
                0 => {
                    ctx.push(s.clone());
                    let body = self.infer(ctx, ty, next);
                    ctx.pop();
                    let arg = self.infer(ctx, &s, next);
                    return Term::App(rc(Term::Lam(rc(body))), rc(arg));
                }
                1 => {
                    let p = self.infer(ctx, &Ty::Prod(Box::new(ty.clone()), Box::new(s)), next);
                    return Term::Fst(rc(p));
                }
                2 => {
                    let p = self.infer(ctx, &Ty::Prod(Box::new(s), Box::new(ty.clone())), next);
                    return Term::Snd(rc(p));
                }
                3 => {
                    let f = self.infer(ctx, &Ty::Arrow(Box::new(s.clone()), Box::new(ty.clone())), next);
                    let a = self.check(ctx, &s, next);
                    return Term::App(rc(f), rc(a));
                }
                4 => return self.j_wrap(ctx, ty, next),
                _ if *ty == Ty::B => {
                    let a = self.check(ctx, &Ty::A, next);
                    return Term::App(rc(var_at(depth, LEVEL_F)), rc(a));
                }
                _ => {}
            }
        }
        if !vars.is_empty() && self.rng.gen_bool(0.7) {
            return var_at(depth, vars[self.rng.gen_range(0..vars.len())]);
        }
        match ty {
            Ty::A => var_at(depth, LEVEL_LA),
            Ty::B => var_at(depth, LEVEL_LB),
            Ty::LoopA => Term::Refl(rc(var_at(depth, LEVEL_LA))),
            Ty::Prod(x, y) => {
                let a = self.infer(ctx, x, fuel.saturating_sub(1));
                let b = self.infer(ctx, y, fuel.saturating_sub(1));
                Term::Pair(rc(a), rc(b))
            }
            Ty::Arrow(..) => self.j_wrap(ctx, ty, fuel),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Typed {
    pub ctx: Context,
    pub term: Term,
    pub ty: Term,
}

/// A random well-typed term in [`base_context`].
pub fn typed_term(rng: &mut StdRng, fuel: usize) -> Typed {
    let ty = random_ty(rng, 2);
    let mut ctx_tys = base_types();
    let term = TypedGen { rng }.check(&mut ctx_tys, &ty, fuel);
    Typed {
        ctx: base_context(),
        ty: ty.to_term(ctx_tys.len()),
        term,
    }
}

#[derive(Clone, Debug, Default)]
pub struct LawSummary {
    pub terms: usize,
    pub failures: Vec<String>,
}

impl LawSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn law(ok: bool, summary: &mut LawSummary, what: &str, seed: u64, i: usize) {
    if !ok && summary.failures.len() < 20 {
        summary.failures.push(format!("{what} (seed {seed}, term {i})"));
    }
}

/// Check shifting, substitution and normalization laws on `count` generated
/// terms: each iteration draws a well-typed term and two raw terms.
pub fn run_law_suite(seed: u64, count: usize) -> LawSummary {
    let mut rng = StdRng::seed_from_u64(seed);
    let sig = Signature::default();
    let mut summary = LawSummary::default();
    for i in 0..count {
        let typed = typed_term(&mut rng, 4);
        let raw = raw_term(&mut rng, 3, 12);
        let a = raw_term(&mut rng, 2, 6);
        let b = raw_term(&mut rng, 1, 6);
        summary.terms += 1;

        for t in [&typed.term, &raw] {
            let k = rng.gen_range(0..3);
            let c = rng.gen_range(0..3);
            law(
                shift(t, k as isize, c).ok() == Some(shift_oracle(t, k as isize, c)),
                &mut summary,
                "shift agrees with the named oracle",
                seed,
                i,
            );
            let j = rng.gen_range(0..2);
            law(
                substitute(t, j, &b) == substitute_oracle(t, j, &b),
                &mut summary,
                "substitute agrees with the named oracle",
                seed,
                i,
            );
            law(
                substitute(&weaken(t, 1, 0), 0, &a) == *t,
                &mut summary,
                "substitute(shift(t,1,0),0,s) = t",
                seed,
                i,
            );
            let lhs = substitute(&substitute(t, 0, &a), 0, &b);
            let rhs = substitute(&substitute(t, 1, &weaken(&b, 1, 0)), 0, &substitute(&a, 0, &b));
            law(lhs == rhs, &mut summary, "substitution lemma", seed, i);
        }

        match check(&sig, &typed.ctx, &typed.term, &typed.ty) {
            Err(e) => law(false, &mut summary, &format!("generated term checks: {e}"), seed, i),
            Ok(()) => {
                let nf = normalize(&sig, &typed.ctx, &typed.term, &typed.ty).expect("checked");
                let nf2 = normalize(&sig, &typed.ctx, &nf, &typed.ty).expect("checked");
                law(nf == nf2, &mut summary, "normalize is idempotent", seed, i);
                law(
                    check(&sig, &typed.ctx, &nf, &typed.ty).is_ok(),
                    &mut summary,
                    "normal form re-checks (subject reduction)",
                    seed,
                    i,
                );
            }
        }
    }
    summary
}
