//! Nameless core terms.
//!
//! Variables are de Bruijn indices, so two terms are α-equivalent exactly when
//! they are structurally equal. Binders: `Pi`/`Sigma` bind one variable in
//! their second component, `Lam` binds one in its body, `J` binds three
//! variables (both endpoints and the path) in its motive and one in its base.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub type Name = Arc<str>;
pub type RcTerm = Arc<Term>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    Funext(u32),
    Ua(u32),
    Resize(u32),
}

impl Axiom {
    pub fn level(self) -> u32 {
        match self {
            Axiom::Funext(n) | Axiom::Ua(n) | Axiom::Resize(n) => n,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Axiom::Funext(_) => "funext",
            Axiom::Ua(_) => "ua",
            Axiom::Resize(_) => "resize",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.keyword(), self.level())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    /// Reference to a checked top-level definition.
    Global(Name),
    Pi(RcTerm, RcTerm),
    Lam(RcTerm),
    App(RcTerm, RcTerm),
    Sigma(RcTerm, RcTerm),
    Pair(RcTerm, RcTerm),
    Fst(RcTerm),
    Snd(RcTerm),
    IdTy(RcTerm, RcTerm, RcTerm),
    Refl(RcTerm),
    J {
        motive: RcTerm,
        base: RcTerm,
        lhs: RcTerm,
        rhs: RcTerm,
        path: RcTerm,
    },
    Univ(u32),
    El(RcTerm),
    /// `code-pi a b` with `b : El a -> U n` a code-valued function.
    CodePi(RcTerm, RcTerm),
    CodeSigma(RcTerm, RcTerm),
    CodeId(RcTerm, RcTerm, RcTerm),
    /// Code of `U n`, living in `U (n + 1)`.
    CodeUniv(u32),
    Lift(RcTerm),
    Axiom(Axiom),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("shifting variable {index} by {amount} drops below zero")]
    IndexUnderflow { index: usize, amount: isize },
}

impl Term {
    pub fn var(i: usize) -> RcTerm {
        Arc::new(Term::Var(i))
    }

    pub fn pi(dom: RcTerm, cod: RcTerm) -> RcTerm {
        Arc::new(Term::Pi(dom, cod))
    }

    pub fn lam(body: RcTerm) -> RcTerm {
        Arc::new(Term::Lam(body))
    }

    pub fn app(f: RcTerm, a: RcTerm) -> RcTerm {
        Arc::new(Term::App(f, a))
    }

    pub fn sigma(fst: RcTerm, snd: RcTerm) -> RcTerm {
        Arc::new(Term::Sigma(fst, snd))
    }

    pub fn pair(a: RcTerm, b: RcTerm) -> RcTerm {
        Arc::new(Term::Pair(a, b))
    }

    pub fn id_ty(ty: RcTerm, lhs: RcTerm, rhs: RcTerm) -> RcTerm {
        Arc::new(Term::IdTy(ty, lhs, rhs))
    }

    pub fn refl(t: RcTerm) -> RcTerm {
        Arc::new(Term::Refl(t))
    }

    pub fn univ(n: u32) -> RcTerm {
        Arc::new(Term::Univ(n))
    }

    pub fn el(code: RcTerm) -> RcTerm {
        Arc::new(Term::El(code))
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        let mut n = 1;
        self.for_each_child(|c, _| n += c.size());
        n
    }

    /// Visit immediate subterms together with the number of variables each
    /// one binds relative to `self`.
    pub fn for_each_child(&self, mut f: impl FnMut(&Term, usize)) {
        match self {
            Term::Var(_)
            | Term::Global(_)
            | Term::Univ(_)
            | Term::CodeUniv(_)
            | Term::Axiom(_) => {}
            Term::Pi(a, b) | Term::Sigma(a, b) => {
                f(a, 0);
                f(b, 1);
            }
            Term::Lam(b) => f(b, 1),
            Term::App(a, b) | Term::Pair(a, b) | Term::CodePi(a, b) | Term::CodeSigma(a, b) => {
                f(a, 0);
                f(b, 0);
            }
            Term::Fst(a) | Term::Snd(a) | Term::Refl(a) | Term::El(a) | Term::Lift(a) => f(a, 0),
            Term::IdTy(a, b, c) | Term::CodeId(a, b, c) => {
                f(a, 0);
                f(b, 0);
                f(c, 0);
            }
            Term::J {
                motive,
                base,
                lhs,
                rhs,
                path,
            } => {
                f(motive, 3);
                f(base, 1);
                f(lhs, 0);
                f(rhs, 0);
                f(path, 0);
            }
        }
    }

    /// Rebuild the term, transforming variables with `on_var(depth, index)`
    /// where `depth` counts binders crossed so far.
    fn map_vars<E>(
        &self,
        depth: usize,
        on_var: &mut impl FnMut(usize, usize) -> Result<Term, E>,
    ) -> Result<Term, E> {
        let mut go = |t: &RcTerm, extra: usize| -> Result<RcTerm, E> {
            Ok(Arc::new(t.map_vars(depth + extra, on_var)?))
        };
        Ok(match self {
            Term::Var(i) => return on_var(depth, *i),
            Term::Global(_)
            | Term::Univ(_)
            | Term::CodeUniv(_)
            | Term::Axiom(_) => self.clone(),
            Term::Pi(a, b) => Term::Pi(go(a, 0)?, go(b, 1)?),
            Term::Sigma(a, b) => Term::Sigma(go(a, 0)?, go(b, 1)?),
            Term::Lam(b) => Term::Lam(go(b, 1)?),
            Term::App(a, b) => Term::App(go(a, 0)?, go(b, 0)?),
            Term::Pair(a, b) => Term::Pair(go(a, 0)?, go(b, 0)?),
            Term::CodePi(a, b) => Term::CodePi(go(a, 0)?, go(b, 0)?),
            Term::CodeSigma(a, b) => Term::CodeSigma(go(a, 0)?, go(b, 0)?),
            Term::Fst(a) => Term::Fst(go(a, 0)?),
            Term::Snd(a) => Term::Snd(go(a, 0)?),
            Term::Refl(a) => Term::Refl(go(a, 0)?),
            Term::El(a) => Term::El(go(a, 0)?),
            Term::Lift(a) => Term::Lift(go(a, 0)?),
            Term::IdTy(a, b, c) => Term::IdTy(go(a, 0)?, go(b, 0)?, go(c, 0)?),
            Term::CodeId(a, b, c) => Term::CodeId(go(a, 0)?, go(b, 0)?, go(c, 0)?),
            Term::J {
                motive,
                base,
                lhs,
                rhs,
                path,
            } => Term::J {
                motive: go(motive, 3)?,
                base: go(base, 1)?,
                lhs: go(lhs, 0)?,
                rhs: go(rhs, 0)?,
                path: go(path, 0)?,
            },
        })
    }

    /// True if the variable with index `target` (seen from the root) occurs free.
    pub fn has_free_var(&self, target: usize) -> bool {
        match self {
            Term::Var(i) => *i == target,
            _ => {
                let mut found = false;
                self.for_each_child(|c, extra| found |= c.has_free_var(target + extra));
                found
            }
        }
    }

    /// One more than the largest free index, or 0 for closed terms.
    pub fn free_bound(&self) -> usize {
        match self {
            Term::Var(i) => i + 1,
            _ => {
                let mut bound = 0;
                self.for_each_child(|c, extra| {
                    bound = bound.max(c.free_bound().saturating_sub(extra))
                });
                bound
            }
        }
    }

    pub fn mentions_axiom(&self, pred: &impl Fn(Axiom) -> bool) -> bool {
        match self {
            Term::Axiom(ax) => pred(*ax),
            _ => {
                let mut found = false;
                self.for_each_child(|c, _| found |= c.mentions_axiom(pred));
                found
            }
        }
    }

    pub fn globals(&self, out: &mut Vec<Name>) {
        if let Term::Global(n) = self {
            if !out.contains(n) {
                out.push(n.clone());
            }
        }
        self.for_each_child(|c, _| c.globals(out));
    }
}

/// Move free indices `>= cutoff` by `amount`.
pub fn shift(t: &Term, amount: isize, cutoff: usize) -> Result<Term, SyntaxError> {
    t.map_vars(0, &mut |depth, i| {
        if i < cutoff + depth {
            Ok(Term::Var(i))
        } else {
            let moved = i as isize + amount;
            if moved < (cutoff + depth) as isize {
                Err(SyntaxError::IndexUnderflow { index: i, amount })
            } else {
                Ok(Term::Var(moved as usize))
            }
        }
    })
}

/// Shift by a non-negative amount, which cannot fail.
pub fn weaken(t: &Term, amount: usize, cutoff: usize) -> Term {
    shift(t, amount as isize, cutoff).expect("upward shift never underflows")
}

/// Replace `Var(target)` by `s`, decrementing the free indices above it.
///
/// `s` lives in the context obtained by deleting variable `target`, so
/// under `d` binders it is weakened by `d`.
pub fn substitute(t: &Term, target: usize, s: &Term) -> Term {
    let res: Result<Term, std::convert::Infallible> = t.map_vars(0, &mut |depth, i| {
        let tgt = target + depth;
        Ok(if i == tgt {
            weaken(s, depth, 0)
        } else if i > tgt {
            Term::Var(i - 1)
        } else {
            Term::Var(i)
        })
    });
    match res {
        Ok(t) => t,
        Err(never) => match never {},
    }
}

/// Instantiate the outermost binder of a body with `s` (β-reduction step).
pub fn instantiate(body: &Term, s: &Term) -> Term {
    substitute(body, 0, s)
}

/// A typing context: types of the bound variables, innermost last.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Context {
    pub entries: Vec<RcTerm>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, ty: RcTerm) {
        self.entries.push(ty);
    }

    /// Type of `Var(index)`, weakened to live in the full context.
    pub fn lookup(&self, index: usize) -> Option<Term> {
        let n = self.entries.len();
        if index >= n {
            return None;
        }
        Some(weaken(&self.entries[n - 1 - index], index + 1, 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: usize) -> RcTerm {
        Term::var(i)
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift(&Term::Var(0), 1, 0).unwrap(), Term::Var(1));
        let lam0 = Term::Lam(v(0));
        assert_eq!(shift(&lam0, 5, 0).unwrap(), lam0);
        assert_eq!(shift(&Term::Lam(v(1)), 1, 0).unwrap(), Term::Lam(v(2)));
    }

    #[test]
    fn shift_underflow_is_an_error() {
        assert_eq!(
            shift(&Term::Var(0), -1, 0),
            Err(SyntaxError::IndexUnderflow {
                index: 0,
                amount: -1
            })
        );
        // bound variables are not affected by a downward shift
        assert_eq!(shift(&Term::Lam(v(0)), -1, 0).unwrap(), Term::Lam(v(0)));
    }

    #[test]
    fn substitute_examples() {
        let u0 = Term::Univ(0);
        assert_eq!(substitute(&Term::Var(0), 0, &u0), u0);
        assert_eq!(
            substitute(&Term::Lam(v(1)), 0, &u0),
            Term::Lam(Term::univ(0))
        );
        let t = Term::App(v(0), Term::lam(v(1)));
        let s = Term::Lam(v(0));
        assert_eq!(
            substitute(&t, 0, &s),
            Term::App(Term::lam(v(0)), Term::lam(Term::lam(v(0))))
        );
    }

    #[test]
    fn j_binds_three_in_motive_and_one_in_base() {
        let j = Term::J {
            motive: v(3),
            base: v(1),
            lhs: v(0),
            rhs: v(0),
            path: v(0),
        };
        assert_eq!(j.free_bound(), 1);
        let shifted = weaken(&j, 2, 0);
        match shifted {
            Term::J {
                motive, base, lhs, ..
            } => {
                assert_eq!(*motive, Term::Var(5));
                assert_eq!(*base, Term::Var(3));
                assert_eq!(*lhs, Term::Var(2));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn context_lookup_weakens() {
        let mut ctx = Context::new();
        ctx.push(Term::univ(0));
        ctx.push(Term::el(v(0)));
        assert_eq!(ctx.lookup(0), Some(Term::El(v(1))));
        assert_eq!(ctx.lookup(1), Some(Term::Univ(0)));
        assert_eq!(ctx.lookup(2), None);
    }
}
