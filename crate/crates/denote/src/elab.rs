//! Elaboration of checked kernel terms into annotated terms: every binder,
//! application and eliminator carries the normal form of the types the
//! model needs to transport along.

use std::cell::{Cell, RefCell};
use std::hash::{Hash, Hasher};
use std::rc::Rc;
use std::sync::Arc;

use hott_core::builtins::axiom_type;
use hott_core::checker::{infer, normalize_type, Signature};
use hott_core::parser::print_term;
use hott_core::syntax::{substitute, weaken, Axiom, Context, Name, Term};

use crate::error::{internal, DenoteError, Result};

#[derive(Debug)]
pub enum ATerm {
    Var(usize),
    Global {
        name: Name,
        ty: Rc<AType>,
    },
    Lam {
        dom: Rc<AType>,
        body: Rc<ATerm>,
    },
    App {
        fun: Rc<ATerm>,
        arg: Rc<ATerm>,
        dom: Rc<AType>,
        cod: Rc<AType>,
    },
    /// `(\x. body) arg`.
    Let {
        arg: Rc<ATerm>,
        arg_ty: Rc<AType>,
        body: Rc<ATerm>,
    },
    Pair(Rc<ATerm>, Rc<ATerm>),
    Fst(Rc<ATerm>),
    Snd(Rc<ATerm>),
    Refl {
        x: Rc<ATerm>,
        ty: Rc<AType>,
    },
    J {
        ty: Rc<AType>,
        /// In the context extended by `x y : A` and `p : Id A x y`.
        motive: Rc<AType>,
        /// In the context extended by `x : A`.
        base: Rc<ATerm>,
        lhs: Rc<ATerm>,
        rhs: Rc<ATerm>,
        path: Rc<ATerm>,
    },
    CodePi(Rc<ATerm>, Rc<ATerm>),
    CodeSigma(Rc<ATerm>, Rc<ATerm>),
    CodeId(Rc<ATerm>, Rc<ATerm>, Rc<ATerm>),
    Axiom {
        ax: Axiom,
        ty: Rc<AType>,
    },
}

/// A type with an identity used for caching its values.
#[derive(Debug)]
pub struct AType {
    pub id: u64,
    pub kind: ATypeKind,
}

#[derive(Debug)]
pub enum ATypeKind {
    Univ,
    El(Rc<ATerm>),
    Pi(Rc<AType>, Rc<AType>),
    Sigma(Rc<AType>, Rc<AType>),
    Id(Rc<AType>, Rc<ATerm>, Rc<ATerm>),
}

impl PartialEq for AType {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for AType {}

impl Hash for AType {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.id.hash(state);
    }
}

pub struct Elaborator<'s> {
    sig: &'s Signature,
    next: Cell<u64>,
    // Every node stays alive for the elaborator's lifetime, so node
    // addresses are stable keys.
    keep: RefCell<Vec<Rc<ATerm>>>,
}

fn pushed(ctx: &Context, ty: &Term) -> Context {
    let mut c = ctx.clone();
    c.push(Arc::new(ty.clone()));
    c
}

fn unsupported(what: impl Into<String>) -> DenoteError {
    DenoteError::Unsupported(what.into())
}

impl<'s> Elaborator<'s> {
    pub fn new(sig: &'s Signature) -> Self {
        Elaborator {
            sig,
            next: Cell::new(0),
            keep: RefCell::default(),
        }
    }

    pub fn signature(&self) -> &'s Signature {
        self.sig
    }

    fn node(&self, t: ATerm) -> Rc<ATerm> {
        let t = Rc::new(t);
        self.keep.borrow_mut().push(t.clone());
        t
    }

    pub(crate) fn mk(&self, kind: ATypeKind) -> Rc<AType> {
        let id = self.next.get();
        self.next.set(id + 1);
        Rc::new(AType { id, kind })
    }

    /// `t` must be a type in normal form.
    pub fn ty(&self, ctx: &Context, t: &Term) -> Result<Rc<AType>> {
        let kind = match t {
            Term::Univ(0) => ATypeKind::Univ,
            Term::Univ(n) => return Err(unsupported(format!("universe U{n}"))),
            Term::El(c) => match infer(self.sig, ctx, c)? {
                Term::Univ(0) => ATypeKind::El(self.check(ctx, c, &Term::Univ(0))?),
                other => return Err(unsupported(format!("El of a code in {}", print_term(&other)))),
            },
            Term::Pi(a, b) => ATypeKind::Pi(self.ty(ctx, a)?, self.ty(&pushed(ctx, a), b)?),
            Term::Sigma(a, b) => ATypeKind::Sigma(self.ty(ctx, a)?, self.ty(&pushed(ctx, a), b)?),
            Term::IdTy(a, x, y) => {
                ATypeKind::Id(self.ty(ctx, a)?, self.check(ctx, x, a)?, self.check(ctx, y, a)?)
            }
            other => return Err(internal(format!("not a normal type: {}", print_term(other)))),
        };
        Ok(self.mk(kind))
    }

    /// Elaborate a type that need not be normal.
    pub fn any_ty(&self, ctx: &Context, t: &Term) -> Result<Rc<AType>> {
        self.ty(ctx, &normalize_type(self.sig, ctx, t)?)
    }

    /// `ty` must be in normal form.
    pub fn check(&self, ctx: &Context, t: &Term, ty: &Term) -> Result<Rc<ATerm>> {
        match (t, ty) {
            (Term::Lam(body), Term::Pi(a, b)) => Ok(self.node(ATerm::Lam {
                dom: self.ty(ctx, a)?,
                body: self.check(&pushed(ctx, a), body, b)?,
            })),
            (Term::Pair(x, y), Term::Sigma(a, b)) => {
                let x2 = self.check(ctx, x, a)?;
                let b_at = normalize_type(self.sig, ctx, &substitute(b, 0, x))?;
                Ok(self.node(ATerm::Pair(x2, self.check(ctx, y, &b_at)?)))
            }
            (Term::Refl(x), Term::IdTy(a, _, _)) => Ok(self.node(ATerm::Refl {
                x: self.check(ctx, x, a)?,
                ty: self.ty(ctx, a)?,
            })),
            _ => Ok(self.infer(ctx, t)?.0),
        }
    }

    /// Elaborate an inferable term, returning its normal type.
    pub fn infer(&self, ctx: &Context, t: &Term) -> Result<(Rc<ATerm>, Term)> {
        let ty = infer(self.sig, ctx, t)?;
        let out = match t {
            Term::Var(i) => ATerm::Var(*i),
            Term::Global(name) => {
                let closed = self
                    .sig
                    .normal_type(name)
                    .ok_or_else(|| DenoteError::UnknownDecl(name.to_string()))?;
                ATerm::Global {
                    name: name.clone(),
                    ty: self.ty(&Context::new(), &closed)?,
                }
            }
            Term::App(f, a) => {
                if let Term::Lam(body) = &**f {
                    let (arg, arg_ty) = self.infer(ctx, a)?;
                    let (body, _) = self.infer(&pushed(ctx, &arg_ty), body)?;
                    ATerm::Let {
                        arg,
                        arg_ty: self.ty(ctx, &arg_ty)?,
                        body,
                    }
                } else {
                    let (fun, fty) = self.infer(ctx, f)?;
                    let Term::Pi(dom, cod) = &fty else {
                        return Err(internal("application of a non-function"));
                    };
                    ATerm::App {
                        fun,
                        arg: self.check(ctx, a, dom)?,
                        dom: self.ty(ctx, dom)?,
                        cod: self.ty(&pushed(ctx, dom), cod)?,
                    }
                }
            }
            Term::Fst(p) => ATerm::Fst(self.infer(ctx, p)?.0),
            Term::Snd(p) => ATerm::Snd(self.infer(ctx, p)?.0),
            Term::Pair(x, y) => ATerm::Pair(self.infer(ctx, x)?.0, self.infer(ctx, y)?.0),
            Term::Refl(x) => {
                let (x, a) = self.infer(ctx, x)?;
                ATerm::Refl {
                    x,
                    ty: self.ty(ctx, &a)?,
                }
            }
            Term::J {
                motive,
                base,
                lhs,
                rhs,
                path,
            } => {
                let (path, pty) = self.infer(ctx, path)?;
                let Term::IdTy(a, _, _) = &pty else {
                    return Err(internal("J on a non-path"));
                };
                let mut c3 = pushed(ctx, a);
                c3.push(Arc::new(weaken(a, 1, 0)));
                c3.push(Arc::new(Term::IdTy(
                    Arc::new(weaken(a, 2, 0)),
                    Term::var(1),
                    Term::var(0),
                )));
                let c1 = pushed(ctx, a);
                // motive[x := z, y := z, p := refl z] with z fresh below the binders
                let lifted = weaken(motive, 1, 3);
                let base_ty = substitute(
                    &substitute(
                        &substitute(&lifted, 0, &Term::Refl(Term::var(2))),
                        0,
                        &Term::Var(1),
                    ),
                    0,
                    &Term::Var(0),
                );
                let base_ty = normalize_type(self.sig, &c1, &base_ty)?;
                ATerm::J {
                    ty: self.ty(ctx, a)?,
                    motive: self.any_ty(&c3, motive)?,
                    base: self.check(&c1, base, &base_ty)?,
                    lhs: self.check(ctx, lhs, a)?,
                    rhs: self.check(ctx, rhs, a)?,
                    path,
                }
            }
            Term::CodePi(a, b) | Term::CodeSigma(a, b) => {
                if ty != Term::Univ(0) {
                    return Err(unsupported("codes above U0"));
                }
                let a2 = self.check(ctx, a, &Term::Univ(0))?;
                let fam = Term::Pi(Arc::new(Term::El(a.clone())), Term::univ(0));
                let fam = normalize_type(self.sig, ctx, &fam)?;
                let b2 = self.check(ctx, b, &fam)?;
                if matches!(t, Term::CodePi(..)) {
                    ATerm::CodePi(a2, b2)
                } else {
                    ATerm::CodeSigma(a2, b2)
                }
            }
            Term::CodeId(a, x, y) => {
                if ty != Term::Univ(0) {
                    return Err(unsupported("codes above U0"));
                }
                let a2 = self.check(ctx, a, &Term::Univ(0))?;
                let el = normalize_type(self.sig, ctx, &Term::El(a.clone()))?;
                ATerm::CodeId(a2, self.check(ctx, x, &el)?, self.check(ctx, y, &el)?)
            }
            Term::Axiom(ax @ (Axiom::Funext(0) | Axiom::Ua(0))) => ATerm::Axiom {
                ax: *ax,
                ty: self.ty(&Context::new(), &axiom_type(*ax))?,
            },
            Term::Axiom(ax) => return Err(unsupported(format!("axiom `{ax}`"))),
            Term::CodeUniv(n) => return Err(unsupported(format!("code of U{n}"))),
            Term::Lift(_) => return Err(unsupported("lift")),
            other => return Err(internal(format!("cannot elaborate {}", print_term(other)))),
        };
        Ok((self.node(out), ty))
    }
}
