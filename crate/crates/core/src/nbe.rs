//! Normalization by evaluation.
//!
//! Terms evaluate into a semantic domain where every β-redex (application,
//! projection, `J` on `refl`) and every decoding of a code under `El` is
//! contracted. Readback is type-directed so that functions come back η-long.
//! Variables inside values are de Bruijn *levels*.

use std::sync::Arc;

use crate::builtins;
use crate::syntax::{Axiom, Name, RcTerm, Term};

pub type RcValue = Arc<Value>;

#[derive(Clone, Debug)]
pub enum Value {
    Lam(Closure),
    Pi(RcValue, Closure),
    Sigma(RcValue, Closure),
    Pair(RcValue, RcValue),
    Univ(u32),
    /// Decoding of a neutral code.
    El(Arc<Neutral>),
    IdTy(RcValue, RcValue, RcValue),
    Refl(RcValue),
    CodePi(RcValue, RcValue),
    CodeSigma(RcValue, RcValue),
    CodeId(RcValue, RcValue, RcValue),
    CodeUniv(u32),
    Lift(RcValue),
    Neutral(Arc<Neutral>),
}

#[derive(Clone, Debug)]
pub enum Head {
    Var(usize),
    Axiom(Axiom),
    /// A postulated constant without a body.
    Global(Name),
}

#[derive(Clone, Debug)]
pub enum Frame {
    App(Value),
    Fst,
    Snd,
    J {
        motive: Closure,
        base: Closure,
        lhs: Value,
        rhs: Value,
    },
}

#[derive(Clone, Debug)]
pub struct Neutral {
    pub head: Head,
    /// Type of the head alone; the spine's types are recomputed on readback.
    pub head_ty: Value,
    pub spine: Vec<Frame>,
}

#[derive(Clone, Debug)]
pub enum Closure {
    Term { env: Env, body: RcTerm },
    /// `x ↦ El (f x)`, produced when a Π/Σ code is decoded.
    ElApp(RcValue),
    Const(RcValue),
}

/// Persistent environment; index 0 is the innermost binding.
#[derive(Clone, Debug, Default)]
pub struct Env(Option<Arc<EnvNode>>);

#[derive(Debug)]
struct EnvNode {
    value: Value,
    rest: Env,
    len: usize,
}

impl Env {
    pub fn new() -> Self {
        Env(None)
    }

    pub fn len(&self) -> usize {
        self.0.as_ref().map_or(0, |n| n.len)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    pub fn push(&self, value: Value) -> Env {
        Env(Some(Arc::new(EnvNode {
            value,
            rest: self.clone(),
            len: self.len() + 1,
        })))
    }

    pub fn get(&self, index: usize) -> Option<&Value> {
        let mut cur = self;
        let mut i = index;
        loop {
            let node = cur.0.as_ref()?;
            if i == 0 {
                return Some(&node.value);
            }
            i -= 1;
            cur = &node.rest;
        }
    }

    /// Environment of fresh variables for a context given as a list of type
    /// values (outermost first).
    pub fn from_values(values: impl IntoIterator<Item = Value>) -> Env {
        values.into_iter().fold(Env::new(), |env, v| env.push(v))
    }
}

/// Read-only view of checked top-level constants.
pub trait Globals {
    /// Type and (unless postulated) value of a constant.
    fn global(&self, name: &str) -> Option<(Value, Option<Value>)>;
}

/// No constants at all.
pub struct NoGlobals;

impl Globals for NoGlobals {
    fn global(&self, _: &str) -> Option<(Value, Option<Value>)> {
        None
    }
}

impl Value {
    /// The variable at `level`, of type `ty`.
    pub fn var(level: usize, ty: Value) -> Value {
        Value::Neutral(Arc::new(Neutral {
            head: Head::Var(level),
            head_ty: ty,
            spine: Vec::new(),
        }))
    }
}

fn ill_typed(what: &str, v: &Value) -> ! {
    panic!("internal invariant violated: {what} applied to {v:?}")
}

impl Neutral {
    fn with(&self, frame: Frame) -> Arc<Neutral> {
        let mut spine = self.spine.clone();
        spine.push(frame);
        Arc::new(Neutral {
            head: self.head.clone(),
            head_ty: self.head_ty.clone(),
            spine,
        })
    }
}

/// Evaluator bound to a set of global constants.
#[derive(Clone, Copy)]
pub struct Nbe<'g> {
    pub globals: &'g dyn Globals,
}

impl<'g> Nbe<'g> {
    pub fn new(globals: &'g dyn Globals) -> Self {
        Self { globals }
    }

    pub fn eval(&self, env: &Env, t: &Term) -> Value {
        let rc = |t: &RcTerm| Arc::new(self.eval(env, t));
        let clo = |body: &RcTerm| Closure::Term {
            env: env.clone(),
            body: body.clone(),
        };
        match t {
            Term::Var(i) => env
                .get(*i)
                .cloned()
                .unwrap_or_else(|| panic!("internal invariant violated: unbound index {i}")),
            Term::Global(name) => match self.globals.global(name) {
                Some((_, Some(body))) => body,
                Some((ty, None)) => Value::Neutral(Arc::new(Neutral {
                    head: Head::Global(name.clone()),
                    head_ty: ty,
                    spine: Vec::new(),
                })),
                None => panic!("internal invariant violated: unknown constant {name}"),
            },
            Term::Pi(a, b) => Value::Pi(rc(a), clo(b)),
            Term::Sigma(a, b) => Value::Sigma(rc(a), clo(b)),
            Term::Lam(b) => Value::Lam(clo(b)),
            Term::App(f, a) => self.apply(&self.eval(env, f), self.eval(env, a)),
            Term::Pair(a, b) => Value::Pair(rc(a), rc(b)),
            Term::Fst(p) => self.fst(&self.eval(env, p)),
            Term::Snd(p) => self.snd(&self.eval(env, p)),
            Term::IdTy(a, x, y) => Value::IdTy(rc(a), rc(x), rc(y)),
            Term::Refl(x) => Value::Refl(rc(x)),
            Term::J {
                motive,
                base,
                lhs,
                rhs,
                path,
            } => self.j(
                clo(motive),
                clo(base),
                self.eval(env, lhs),
                self.eval(env, rhs),
                self.eval(env, path),
            ),
            Term::Univ(n) => Value::Univ(*n),
            Term::El(c) => self.el(&self.eval(env, c)),
            Term::CodePi(a, b) => Value::CodePi(rc(a), rc(b)),
            Term::CodeSigma(a, b) => Value::CodeSigma(rc(a), rc(b)),
            Term::CodeId(a, x, y) => Value::CodeId(rc(a), rc(x), rc(y)),
            Term::CodeUniv(n) => Value::CodeUniv(*n),
            Term::Lift(c) => Value::Lift(rc(c)),
            Term::Axiom(ax) => Value::Neutral(Arc::new(Neutral {
                head: Head::Axiom(*ax),
                head_ty: self.axiom_type(*ax),
                spine: Vec::new(),
            })),
        }
    }

    pub fn axiom_type(&self, ax: Axiom) -> Value {
        NBE_CLOSED.eval(&Env::new(), &builtins::axiom_type(ax))
    }

    pub fn apply_closure(&self, clo: &Closure, arg: Value) -> Value {
        match clo {
            Closure::Term { env, body } => self.eval(&env.push(arg), body),
            Closure::ElApp(f) => self.el(&self.apply(f, arg)),
            Closure::Const(v) => (**v).clone(),
        }
    }

    pub fn apply_closure3(&self, clo: &Closure, a: Value, b: Value, c: Value) -> Value {
        match clo {
            Closure::Term { env, body } => self.eval(&env.push(a).push(b).push(c), body),
            other => ill_typed("three-argument closure", &Value::Lam(other.clone())),
        }
    }

    pub fn apply(&self, f: &Value, arg: Value) -> Value {
        match f {
            Value::Lam(clo) => self.apply_closure(clo, arg),
            Value::Neutral(n) => Value::Neutral(n.with(Frame::App(arg))),
            other => ill_typed("application", other),
        }
    }

    pub fn fst(&self, p: &Value) -> Value {
        match p {
            Value::Pair(a, _) => (**a).clone(),
            Value::Neutral(n) => Value::Neutral(n.with(Frame::Fst)),
            other => ill_typed("first projection", other),
        }
    }

    pub fn snd(&self, p: &Value) -> Value {
        match p {
            Value::Pair(_, b) => (**b).clone(),
            Value::Neutral(n) => Value::Neutral(n.with(Frame::Snd)),
            other => ill_typed("second projection", other),
        }
    }

    pub fn j(&self, motive: Closure, base: Closure, lhs: Value, rhs: Value, path: Value) -> Value {
        match path {
            Value::Refl(t) => self.apply_closure(&base, (*t).clone()),
            Value::Neutral(n) => Value::Neutral(n.with(Frame::J {
                motive,
                base,
                lhs,
                rhs,
            })),
            other => ill_typed("J", &other),
        }
    }

    /// Decode a code, reducing code formers to the type formers they name.
    pub fn el(&self, code: &Value) -> Value {
        match code {
            Value::CodePi(a, b) => Value::Pi(Arc::new(self.el(a)), Closure::ElApp(b.clone())),
            Value::CodeSigma(a, b) => {
                Value::Sigma(Arc::new(self.el(a)), Closure::ElApp(b.clone()))
            }
            Value::CodeId(a, x, y) => Value::IdTy(Arc::new(self.el(a)), x.clone(), y.clone()),
            Value::CodeUniv(n) => Value::Univ(*n),
            Value::Lift(c) => self.el(c),
            Value::Neutral(n) => Value::El(n.clone()),
            other => ill_typed("El", other),
        }
    }

    // -----------------------------------------------------------------------
    // Readback

    /// Read back a value of type `ty` at `depth` free levels, η-expanding at Π.
    pub fn readback(&self, depth: usize, ty: &Value, v: &Value) -> Term {
        match ty {
            Value::Pi(a, b) => {
                let x = Value::var(depth, (**a).clone());
                let body_ty = self.apply_closure(b, x.clone());
                let body = self.apply(v, x);
                Term::Lam(Arc::new(self.readback(depth + 1, &body_ty, &body)))
            }
            Value::Sigma(a, b) => match v {
                Value::Pair(x, y) => {
                    let snd_ty = self.apply_closure(b, (**x).clone());
                    Term::Pair(
                        Arc::new(self.readback(depth, a, x)),
                        Arc::new(self.readback(depth, &snd_ty, y)),
                    )
                }
                Value::Neutral(n) => self.readback_neutral(depth, n).0,
                other => ill_typed("readback at Σ", other),
            },
            Value::IdTy(a, _, _) => match v {
                Value::Refl(t) => Term::Refl(Arc::new(self.readback(depth, a, t))),
                Value::Neutral(n) => self.readback_neutral(depth, n).0,
                other => ill_typed("readback at Id", other),
            },
            Value::Univ(n) => self.readback_code(depth, *n, v),
            Value::El(_) => match v {
                Value::Neutral(n) => self.readback_neutral(depth, n).0,
                other => ill_typed("readback at a neutral type", other),
            },
            other => ill_typed("readback with a non-type", other),
        }
    }

    fn readback_code(&self, depth: usize, level: u32, v: &Value) -> Term {
        let univ = Value::Univ(level);
        let family = |a: &RcValue| Value::Pi(Arc::new(self.el(a)), Closure::Const(Arc::new(univ.clone())));
        let rb = |ty: &Value, v: &Value| Arc::new(self.readback(depth, ty, v));
        match v {
            Value::CodePi(a, b) => Term::CodePi(rb(&univ, a), rb(&family(a), b)),
            Value::CodeSigma(a, b) => Term::CodeSigma(rb(&univ, a), rb(&family(a), b)),
            Value::CodeId(a, x, y) => {
                let el = self.el(a);
                Term::CodeId(rb(&univ, a), rb(&el, x), rb(&el, y))
            }
            Value::CodeUniv(m) => Term::CodeUniv(*m),
            Value::Lift(c) => match level.checked_sub(1) {
                Some(lower) => Term::Lift(rb(&Value::Univ(lower), c)),
                None => ill_typed("lift into U0", v),
            },
            Value::Neutral(n) => self.readback_neutral(depth, n).0,
            other => ill_typed("readback at a universe", other),
        }
    }

    /// Read back a type value.
    pub fn readback_type(&self, depth: usize, ty: &Value) -> Term {
        match ty {
            Value::Pi(a, b) | Value::Sigma(a, b) => {
                let x = Value::var(depth, (**a).clone());
                let dom = Arc::new(self.readback_type(depth, a));
                let cod = Arc::new(self.readback_type(depth + 1, &self.apply_closure(b, x)));
                if matches!(ty, Value::Pi(..)) {
                    Term::Pi(dom, cod)
                } else {
                    Term::Sigma(dom, cod)
                }
            }
            Value::IdTy(a, x, y) => Term::IdTy(
                Arc::new(self.readback_type(depth, a)),
                Arc::new(self.readback(depth, a, x)),
                Arc::new(self.readback(depth, a, y)),
            ),
            Value::Univ(n) => Term::Univ(*n),
            Value::El(n) => Term::El(Arc::new(self.readback_neutral(depth, n).0)),
            other => ill_typed("type readback", other),
        }
    }

    /// Read back a neutral, returning its term and its type.
    pub fn readback_neutral(&self, depth: usize, n: &Neutral) -> (Term, Value) {
        let mut term = match &n.head {
            Head::Var(level) => Term::Var(
                depth
                    .checked_sub(level + 1)
                    .expect("internal invariant violated: level out of scope"),
            ),
            Head::Axiom(ax) => Term::Axiom(*ax),
            Head::Global(name) => Term::Global(name.clone()),
        };
        let mut ty = n.head_ty.clone();
        let mut so_far = Neutral {
            head: n.head.clone(),
            head_ty: n.head_ty.clone(),
            spine: Vec::with_capacity(n.spine.len()),
        };
        for frame in &n.spine {
            let next_ty;
            match frame {
                Frame::App(arg) => {
                    let Value::Pi(a, b) = &ty else {
                        ill_typed("application spine", &ty)
                    };
                    term = Term::App(Arc::new(term), Arc::new(self.readback(depth, a, arg)));
                    next_ty = self.apply_closure(b, arg.clone());
                }
                Frame::Fst => {
                    let Value::Sigma(a, _) = &ty else {
                        ill_typed("projection spine", &ty)
                    };
                    term = Term::Fst(Arc::new(term));
                    next_ty = (**a).clone();
                }
                Frame::Snd => {
                    let Value::Sigma(_, b) = &ty else {
                        ill_typed("projection spine", &ty)
                    };
                    let first = Value::Neutral(so_far.with(Frame::Fst));
                    term = Term::Snd(Arc::new(term));
                    next_ty = self.apply_closure(b, first);
                }
                Frame::J {
                    motive,
                    base,
                    lhs,
                    rhs,
                } => {
                    let Value::IdTy(a, _, _) = &ty else {
                        ill_typed("J spine", &ty)
                    };
                    let a = (**a).clone();
                    let x = Value::var(depth, a.clone());
                    let y = Value::var(depth + 1, a.clone());
                    let p = Value::var(
                        depth + 2,
                        Value::IdTy(Arc::new(a.clone()), Arc::new(x.clone()), Arc::new(y.clone())),
                    );
                    let motive_t = self.readback_type(depth + 3, &self.apply_closure3(motive, x, y, p));
                    let bx = Value::var(depth, a.clone());
                    let base_ty = self.apply_closure3(
                        motive,
                        bx.clone(),
                        bx.clone(),
                        Value::Refl(Arc::new(bx.clone())),
                    );
                    let base_t = self.readback(depth + 1, &base_ty, &self.apply_closure(base, bx));
                    let path_v = Value::Neutral(Arc::new(so_far.clone()));
                    term = Term::J {
                        motive: Arc::new(motive_t),
                        base: Arc::new(base_t),
                        lhs: Arc::new(self.readback(depth, &a, lhs)),
                        rhs: Arc::new(self.readback(depth, &a, rhs)),
                        path: Arc::new(term),
                    };
                    next_ty = self.apply_closure3(motive, lhs.clone(), rhs.clone(), path_v);
                }
            }
            so_far.spine.push(frame.clone());
            ty = next_ty;
        }
        (term, ty)
    }

    /// Definitional equality of two values of type `ty`.
    pub fn convertible(&self, depth: usize, a: &Value, b: &Value, ty: &Value) -> bool {
        self.readback(depth, ty, a) == self.readback(depth, ty, b)
    }

    /// Definitional equality of two types.
    pub fn convertible_types(&self, depth: usize, a: &Value, b: &Value) -> bool {
        self.readback_type(depth, a) == self.readback_type(depth, b)
    }
}

/// Evaluator for closed terms that mention no constants.
pub const NBE_CLOSED: Nbe<'static> = Nbe {
    globals: &NoGlobals,
};

#[cfg(test)]
mod tests {
    use super::*;

    fn nbe() -> Nbe<'static> {
        NBE_CLOSED
    }

    #[test]
    fn beta_on_application() {
        let t = Term::App(Term::lam(Term::var(0)), Term::univ(0));
        assert!(matches!(nbe().eval(&Env::new(), &t), Value::Univ(0)));
    }

    #[test]
    fn readback_of_identity() {
        // Identity on U0 codes, read back at U0 -> U0.
        let id = nbe().eval(&Env::new(), &Term::Lam(Term::var(0)));
        let ty = Value::Pi(
            Arc::new(Value::Univ(0)),
            Closure::Const(Arc::new(Value::Univ(0))),
        );
        assert_eq!(nbe().readback(0, &ty, &id), Term::Lam(Term::var(0)));
    }

    #[test]
    fn neutral_function_is_eta_expanded() {
        // f : U0 -> U0 as a free variable at level 0.
        let fun_ty = Value::Pi(
            Arc::new(Value::Univ(0)),
            Closure::Const(Arc::new(Value::Univ(0))),
        );
        let f = Value::var(0, fun_ty.clone());
        let t = nbe().readback(1, &fun_ty, &f);
        assert_eq!(t, Term::Lam(Term::app(Term::var(1), Term::var(0))));
        // f and \x. f x are convertible.
        let eta = nbe().eval(
            &Env::new().push(f.clone()),
            &Term::Lam(Term::app(Term::var(1), Term::var(0))),
        );
        assert!(nbe().convertible(1, &f, &eta, &fun_ty));
    }

    #[test]
    fn universes_differ() {
        assert!(!nbe().convertible_types(0, &Value::Univ(0), &Value::Univ(1)));
    }

    #[test]
    fn j_computes_on_refl() {
        // J (\x y p. U0) (\x. x) a a (refl a) with a = code-u 0 reduces to a.
        let a = Arc::new(Term::CodeUniv(0));
        let t = Term::J {
            motive: Term::univ(1),
            base: Term::var(0),
            lhs: a.clone(),
            rhs: a.clone(),
            path: Term::refl(a.clone()),
        };
        let v = nbe().eval(&Env::new(), &t);
        assert!(matches!(v, Value::CodeUniv(0)));
    }

    #[test]
    fn axioms_are_neutral() {
        let t = Term::App(Arc::new(Term::Axiom(Axiom::Funext(0))), Term::univ(0));
        match nbe().eval(&Env::new(), &t) {
            Value::Neutral(n) => {
                assert!(matches!(n.head, Head::Axiom(Axiom::Funext(0))));
                assert_eq!(n.spine.len(), 1);
            }
            other => panic!("expected a neutral, got {other:?}"),
        }
    }

    #[test]
    fn el_decodes_code_formers() {
        // El (code-pi (code-u 0) (\_. code-u 0)) evaluates to Pi (x : U0). U0.
        let code = Term::CodePi(
            Arc::new(Term::CodeUniv(0)),
            Term::lam(Arc::new(Term::CodeUniv(0))),
        );
        let v = nbe().eval(&Env::new(), &Term::El(Arc::new(code)));
        assert_eq!(
            nbe().readback_type(0, &v),
            Term::Pi(Term::univ(0), Term::univ(0))
        );
    }
}
