//! Bidirectional type checker.
//!
//! Rules implemented (Tarski universes `U0 .. U(height-1)`):
//!
//! * `Pi`, `Sg`, `Id A a b` and `U n` (for `n < height`) are types; `El c` is a
//!   type whenever `c : U n`. Types are not terms.
//! * Codes: `code-pi a b : U n` for `a : U n`, `b : El a -> U n`, likewise
//!   `code-sg`; `code-id a x y : U n`; `code-u n : U (n+1)`; `lift c : U (n+1)`
//!   for `c : U n`. Decoding is judgmental: `El (code-pi a b) = Pi (x : El a). El (b x)`,
//!   `El (code-u n) = U n`, `El (lift c) = El c`.
//! * Lambdas are checked; everything else is inferred. A pair infers a
//!   non-dependent Σ-type, `refl t` infers `Id A t t` from `t : A`, and an
//!   applied lambda `(\x. b) a` infers `B[a/x]` from `a : A` and `b : B`
//!   under `x : A`.
//! * `J` eliminates `p : Id A a b` into a motive over `(x y : A) (p : Id A x y)`
//!   with `J C d a a (refl a) = d a`.
//! * `funext n`, `ua n`, `resize n` are constants without computation,
//!   available when the corresponding flag is on.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builtins;
use crate::nbe::{Closure, Env, Globals, Nbe, Value};
use crate::parser::{parse_module, resolve_names, ParseError, Printer, ResolveError, ResolvedDecl};
use crate::syntax::{Axiom, Context, Name, RcTerm, Term};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    /// Number of universes; `U n` is available for `n < height`.
    pub height: u32,
    /// Levels at which `ua` may be used.
    pub ua_levels: BTreeSet<u32>,
    pub resizing: bool,
    pub funext: bool,
    /// Accept declarations without a body.
    pub postulates: bool,
}

impl Default for Flags {
    fn default() -> Self {
        Flags {
            height: 3,
            ua_levels: (0..2).collect(),
            resizing: false,
            funext: true,
            postulates: false,
        }
    }
}

impl Flags {
    pub fn allows(&self, ax: Axiom) -> bool {
        match ax {
            Axiom::Funext(_) => self.funext,
            Axiom::Ua(n) => self.ua_levels.contains(&n),
            Axiom::Resize(_) => self.resizing,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("type mismatch: expected {expected}, found {found}")]
    TypeMismatch { expected: String, found: String },
    #[error("unbound variable #{index}")]
    UnboundVar { index: usize },
    #[error("unknown constant `{name}`")]
    UnknownConstant { name: String },
    #[error("universe U{level} exceeds the tower height {height}")]
    UniverseOverflow { level: u32, height: u32 },
    #[error("axiom `{axiom}` is disabled")]
    AxiomDisabled { axiom: String },
    #[error("`{term}` is not a type")]
    NotAType { term: String },
    #[error("`{term}` is a type, not a term (types are not codes; use a code former)")]
    NotATerm { term: String },
    #[error("cannot infer a type for `{term}`; add an annotation")]
    CannotInfer { term: String },
    #[error("expected a function type, found {found}")]
    ExpectedFunction { found: String },
    #[error("expected a Σ-type, found {found}")]
    ExpectedPair { found: String },
    #[error("expected an identity type, found {found}")]
    ExpectedIdentity { found: String },
    #[error("expected a code (an element of a universe), found an element of {found}")]
    ExpectedUniverse { found: String },
    #[error("depends on `{name}`, which failed: {cause}")]
    DependsOnFailed { name: String, cause: Box<CheckError> },
    #[error("duplicate definition of `{name}`")]
    Duplicate { name: String },
    #[error("`{name}` has no body and postulates are disabled")]
    PostulatesDisabled { name: String },
}

impl CheckError {
    /// The underlying error once dependency failures are unwrapped.
    pub fn root_cause(&self) -> &CheckError {
        match self {
            CheckError::DependsOnFailed { cause, .. } => cause.root_cause(),
            other => other,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CheckError::TypeMismatch { .. } => "type-mismatch",
            CheckError::UnboundVar { .. } => "unbound-variable",
            CheckError::UnknownConstant { .. } => "unknown-constant",
            CheckError::UniverseOverflow { .. } => "universe-overflow",
            CheckError::AxiomDisabled { .. } => "axiom-disabled",
            CheckError::NotAType { .. } => "not-a-type",
            CheckError::NotATerm { .. } => "not-a-term",
            CheckError::CannotInfer { .. } => "cannot-infer",
            CheckError::ExpectedFunction { .. } => "expected-function",
            CheckError::ExpectedPair { .. } => "expected-pair",
            CheckError::ExpectedIdentity { .. } => "expected-identity",
            CheckError::ExpectedUniverse { .. } => "expected-universe",
            CheckError::DependsOnFailed { .. } => "depends-on-failed",
            CheckError::Duplicate { .. } => "duplicate-definition",
            CheckError::PostulatesDisabled { .. } => "postulates-disabled",
        }
    }
}

#[derive(Clone, Debug)]
pub struct GlobalEntry {
    pub ty_term: RcTerm,
    pub body_term: Option<RcTerm>,
    pub ty: Value,
    pub body: Option<Value>,
}

/// Checked constants plus feature flags.
#[derive(Debug, Default)]
pub struct Signature {
    pub flags: Flags,
    entries: HashMap<Name, GlobalEntry>,
    order: Vec<Name>,
    failed: HashMap<Name, CheckError>,
    axiom_ok: Mutex<HashMap<Axiom, Result<(), CheckError>>>,
}

impl Globals for Signature {
    fn global(&self, name: &str) -> Option<(Value, Option<Value>)> {
        self.entries
            .get(name)
            .map(|e| (e.ty.clone(), e.body.clone()))
    }
}

impl Signature {
    pub fn new(flags: Flags) -> Self {
        Signature {
            flags,
            ..Default::default()
        }
    }

    pub fn get(&self, name: &str) -> Option<&GlobalEntry> {
        self.entries.get(name)
    }

    pub fn names(&self) -> &[Name] {
        &self.order
    }

    /// Names the resolver should accept: checked and failed declarations.
    pub fn known_names(&self) -> HashSet<String> {
        self.entries
            .keys()
            .chain(self.failed.keys())
            .map(|n| n.to_string())
            .collect()
    }

    pub fn failure(&self, name: &str) -> Option<&CheckError> {
        self.failed.get(name)
    }

    pub fn nbe(&self) -> Nbe<'_> {
        Nbe::new(self)
    }

    /// Normal form of a checked constant's body.
    pub fn normal_form(&self, name: &str) -> Option<Term> {
        let e = self.entries.get(name)?;
        Some(self.nbe().readback(0, &e.ty, e.body.as_ref()?))
    }

    /// Normal form of a checked constant's type.
    pub fn normal_type(&self, name: &str) -> Option<Term> {
        let e = self.entries.get(name)?;
        Some(self.nbe().readback_type(0, &e.ty))
    }

    fn insert(&mut self, name: Name, entry: GlobalEntry) {
        self.order.push(name.clone());
        self.entries.insert(name, entry);
    }
}

/// Local typing context during checking.
#[derive(Clone, Default)]
pub struct Cx {
    pub env: Env,
    pub types: Vec<Value>,
    pub names: Vec<String>,
}

impl Cx {
    pub fn depth(&self) -> usize {
        self.types.len()
    }

    /// Extend with a fresh variable of type `ty`, returning it.
    pub fn bind(&self, ty: Value) -> (Cx, Value) {
        let level = self.depth();
        let v = Value::var(level, ty.clone());
        let mut cx = self.clone();
        cx.env = cx.env.push(v.clone());
        cx.types.push(ty);
        cx.names.push(format!("x{level}"));
        (cx, v)
    }
}

pub struct Checker<'s> {
    pub sig: &'s Signature,
    nbe: Nbe<'s>,
}

type CResult<T> = Result<T, CheckError>;

impl<'s> Checker<'s> {
    pub fn new(sig: &'s Signature) -> Self {
        Checker {
            sig,
            nbe: Nbe::new(sig),
        }
    }

    pub fn nbe(&self) -> Nbe<'s> {
        self.nbe
    }

    fn print(&self, cx: &Cx, t: &Term) -> String {
        let avoid = |s: &str| self.sig.entries.contains_key(s);
        Printer::with_context(&avoid, cx.names.clone()).print(t)
    }

    fn show_type(&self, cx: &Cx, ty: &Value) -> String {
        self.print(cx, &self.nbe.readback_type(cx.depth(), ty))
    }

    fn eval(&self, cx: &Cx, t: &Term) -> Value {
        self.nbe.eval(&cx.env, t)
    }

    fn height_ok(&self, level: u32) -> CResult<()> {
        let height = self.sig.flags.height;
        if level < height {
            Ok(())
        } else {
            Err(CheckError::UniverseOverflow { level, height })
        }
    }

    fn expect_univ(&self, cx: &Cx, ty: &Value) -> CResult<u32> {
        match ty {
            Value::Univ(n) => Ok(*n),
            other => Err(CheckError::ExpectedUniverse {
                found: self.show_type(cx, other),
            }),
        }
    }

    fn mismatch(&self, cx: &Cx, expected: &Value, found: &Value) -> CheckError {
        CheckError::TypeMismatch {
            expected: self.show_type(cx, expected),
            found: self.show_type(cx, found),
        }
    }

    fn conv_types(&self, cx: &Cx, expected: &Value, found: &Value) -> CResult<()> {
        if self.nbe.convertible_types(cx.depth(), expected, found) {
            Ok(())
        } else {
            Err(self.mismatch(cx, expected, found))
        }
    }

    fn axiom(&self, ax: Axiom) -> CResult<Value> {
        if !self.sig.flags.allows(ax) {
            return Err(CheckError::AxiomDisabled {
                axiom: ax.to_string(),
            });
        }
        let cached = self
            .sig
            .axiom_ok
            .lock()
            .expect("axiom cache poisoned")
            .get(&ax)
            .cloned();
        let verdict = match cached {
            Some(v) => v,
            None => {
                let v = self.check_type(&Cx::default(), &builtins::axiom_type(ax));
                self.sig
                    .axiom_ok
                    .lock()
                    .expect("axiom cache poisoned")
                    .insert(ax, v.clone());
                v
            }
        };
        verdict?;
        Ok(self.nbe.axiom_type(ax))
    }

    /// Check that `t` is a well-formed type.
    pub fn check_type(&self, cx: &Cx, t: &Term) -> CResult<()> {
        match t {
            Term::Pi(a, b) | Term::Sigma(a, b) => {
                self.check_type(cx, a)?;
                let (inner, _) = cx.bind(self.eval(cx, a));
                self.check_type(&inner, b)
            }
            Term::IdTy(a, x, y) => {
                self.check_type(cx, a)?;
                let av = self.eval(cx, a);
                self.check(cx, x, &av)?;
                self.check(cx, y, &av)
            }
            Term::Univ(n) => self.height_ok(*n),
            Term::El(c) => {
                let ty = self.infer(cx, c)?;
                self.expect_univ(cx, &ty).map(|_| ())
            }
            other => match self.infer(cx, other) {
                Ok(ty) => Err(CheckError::NotAType {
                    term: format!(
                        "{} : {}",
                        self.print(cx, other),
                        self.show_type(cx, &ty)
                    ),
                }),
                Err(e) => Err(e),
            },
        }
    }

    /// Infer the type of a term.
    pub fn infer(&self, cx: &Cx, t: &Term) -> CResult<Value> {
        match t {
            Term::Var(i) => cx
                .types
                .len()
                .checked_sub(i + 1)
                .map(|pos| cx.types[pos].clone())
                .ok_or(CheckError::UnboundVar { index: *i }),
            Term::Global(name) => {
                if let Some(e) = self.sig.entries.get(name) {
                    Ok(e.ty.clone())
                } else if let Some(err) = self.sig.failed.get(name) {
                    Err(CheckError::DependsOnFailed {
                        name: name.to_string(),
                        cause: Box::new(err.clone()),
                    })
                } else {
                    Err(CheckError::UnknownConstant {
                        name: name.to_string(),
                    })
                }
            }
            Term::App(f, a) if matches!(**f, Term::Lam(_)) => {
                let Term::Lam(body) = &**f else { unreachable!() };
                let dom = self.infer(cx, a)?;
                let (inner, _) = cx.bind(dom);
                let cod = self.infer(&inner, body)?;
                let cod_t = self.nbe.readback_type(inner.depth(), &cod);
                Ok(self.nbe.eval(&cx.env.push(self.eval(cx, a)), &cod_t))
            }
            Term::App(f, a) => match self.infer(cx, f)? {
                Value::Pi(dom, cod) => {
                    self.check(cx, a, &dom)?;
                    Ok(self.nbe.apply_closure(&cod, self.eval(cx, a)))
                }
                other => Err(CheckError::ExpectedFunction {
                    found: self.show_type(cx, &other),
                }),
            },
            Term::Fst(p) => match self.infer(cx, p)? {
                Value::Sigma(a, _) => Ok((*a).clone()),
                other => Err(CheckError::ExpectedPair {
                    found: self.show_type(cx, &other),
                }),
            },
            Term::Snd(p) => match self.infer(cx, p)? {
                Value::Sigma(_, b) => {
                    let first = self.nbe.fst(&self.eval(cx, p));
                    Ok(self.nbe.apply_closure(&b, first))
                }
                other => Err(CheckError::ExpectedPair {
                    found: self.show_type(cx, &other),
                }),
            },
            Term::J {
                motive,
                base,
                lhs,
                rhs,
                path,
            } => {
                let (a, x, y) = match self.infer(cx, path)? {
                    Value::IdTy(a, x, y) => (a, x, y),
                    other => {
                        return Err(CheckError::ExpectedIdentity {
                            found: self.show_type(cx, &other),
                        })
                    }
                };
                self.check(cx, lhs, &a)?;
                self.check(cx, rhs, &a)?;
                let (lv, rv) = (self.eval(cx, lhs), self.eval(cx, rhs));
                let found = Value::IdTy(a.clone(), Arc::new(lv.clone()), Arc::new(rv.clone()));
                let stated = Value::IdTy(a.clone(), x, y);
                self.conv_types(cx, &found, &stated)?;

                let (c1, xv) = cx.bind((*a).clone());
                let (c2, yv) = c1.bind((*a).clone());
                let (c3, _) = c2.bind(Value::IdTy(a.clone(), Arc::new(xv), Arc::new(yv)));
                self.check_type(&c3, motive)?;
                let mclo = Closure::Term {
                    env: cx.env.clone(),
                    body: motive.clone(),
                };
                let (b1, bx) = cx.bind((*a).clone());
                let base_ty =
                    self.nbe
                        .apply_closure3(&mclo, bx.clone(), bx.clone(), Value::Refl(Arc::new(bx)));
                self.check(&b1, base, &base_ty)?;
                Ok(self
                    .nbe
                    .apply_closure3(&mclo, lv, rv, self.eval(cx, path)))
            }
            Term::CodePi(a, b) | Term::CodeSigma(a, b) => {
                let n = {
                    let ty = self.infer(cx, a)?;
                    self.expect_univ(cx, &ty)?
                };
                let av = self.eval(cx, a);
                let fam = Value::Pi(
                    Arc::new(self.nbe.el(&av)),
                    Closure::Const(Arc::new(Value::Univ(n))),
                );
                self.check(cx, b, &fam)?;
                Ok(Value::Univ(n))
            }
            Term::CodeId(a, x, y) => {
                let n = {
                    let ty = self.infer(cx, a)?;
                    self.expect_univ(cx, &ty)?
                };
                let el = self.nbe.el(&self.eval(cx, a));
                self.check(cx, x, &el)?;
                self.check(cx, y, &el)?;
                Ok(Value::Univ(n))
            }
            Term::CodeUniv(n) => {
                self.height_ok(n + 1)?;
                Ok(Value::Univ(n + 1))
            }
            Term::Lift(c) => {
                let ty = self.infer(cx, c)?;
                let n = self.expect_univ(cx, &ty)?;
                self.height_ok(n + 1)?;
                Ok(Value::Univ(n + 1))
            }
            Term::Axiom(ax) => self.axiom(*ax),
            Term::Pi(..) | Term::Sigma(..) | Term::IdTy(..) | Term::Univ(_) | Term::El(_) => {
                Err(CheckError::NotATerm {
                    term: self.print(cx, t),
                })
            }
            Term::Pair(x, y) => {
                let a = self.infer(cx, x)?;
                let b = self.infer(cx, y)?;
                Ok(Value::Sigma(Arc::new(a), Closure::Const(Arc::new(b))))
            }
            Term::Refl(x) => {
                let a = self.infer(cx, x)?;
                let xv = Arc::new(self.eval(cx, x));
                Ok(Value::IdTy(Arc::new(a), xv.clone(), xv))
            }
            Term::Lam(_) => Err(CheckError::CannotInfer {
                term: self.print(cx, t),
            }),
        }
    }

    /// Check `t` against the type value `ty`.
    pub fn check(&self, cx: &Cx, t: &Term, ty: &Value) -> CResult<()> {
        match (t, ty) {
            (Term::Lam(body), Value::Pi(a, b)) => {
                let (inner, x) = cx.bind((**a).clone());
                let cod = self.nbe.apply_closure(b, x);
                self.check(&inner, body, &cod)
            }
            (Term::Lam(_), other) => Err(CheckError::ExpectedFunction {
                found: self.show_type(cx, other),
            }),
            (Term::Pair(x, y), Value::Sigma(a, b)) => {
                self.check(cx, x, a)?;
                let snd_ty = self.nbe.apply_closure(b, self.eval(cx, x));
                self.check(cx, y, &snd_ty)
            }
            (Term::Pair(..), other) => Err(CheckError::ExpectedPair {
                found: self.show_type(cx, other),
            }),
            (Term::Refl(x), Value::IdTy(a, _, _)) => {
                self.check(cx, x, a)?;
                let xv = Arc::new(self.eval(cx, x));
                let found = Value::IdTy(a.clone(), xv.clone(), xv);
                self.conv_types(cx, ty, &found)
            }
            (Term::Refl(_), other) => Err(CheckError::ExpectedIdentity {
                found: self.show_type(cx, other),
            }),
            _ => {
                let found = self.infer(cx, t)?;
                self.conv_types(cx, ty, &found)
            }
        }
    }

    /// Build a checking context from a syntactic one, validating each entry.
    pub fn context(&self, ctx: &Context) -> CResult<Cx> {
        let mut cx = Cx::default();
        for entry in &ctx.entries {
            self.check_type(&cx, entry)?;
            let ty = self.eval(&cx, entry);
            cx = cx.bind(ty).0;
        }
        Ok(cx)
    }
}

/// Infer the type of `t` in `ctx`, returned as a normal-form term.
pub fn infer(sig: &Signature, ctx: &Context, t: &Term) -> Result<Term, CheckError> {
    let ch = Checker::new(sig);
    let cx = ch.context(ctx)?;
    let ty = ch.infer(&cx, t)?;
    Ok(ch.nbe.readback_type(cx.depth(), &ty))
}

/// Check `t : ty` in `ctx`; `ty` is checked to be a type first.
pub fn check(sig: &Signature, ctx: &Context, t: &Term, ty: &Term) -> Result<(), CheckError> {
    let ch = Checker::new(sig);
    let cx = ch.context(ctx)?;
    ch.check_type(&cx, ty)?;
    let tyv = ch.eval(&cx, ty);
    ch.check(&cx, t, &tyv)
}

/// β-normal η-long form of `t : ty` in `ctx` (both assumed checked).
pub fn normalize(sig: &Signature, ctx: &Context, t: &Term, ty: &Term) -> Result<Term, CheckError> {
    let ch = Checker::new(sig);
    let cx = ch.context(ctx)?;
    let tyv = ch.eval(&cx, ty);
    Ok(ch.nbe.readback(cx.depth(), &tyv, &ch.eval(&cx, t)))
}

/// Normal form of a type in `ctx`.
pub fn normalize_type(sig: &Signature, ctx: &Context, ty: &Term) -> Result<Term, CheckError> {
    let ch = Checker::new(sig);
    let cx = ch.context(ctx)?;
    Ok(ch.nbe.readback_type(cx.depth(), &ch.eval(&cx, ty)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeclReport {
    pub name: String,
    pub file: String,
    pub line: usize,
    pub passed: bool,
    pub elapsed_ms: f64,
    pub normal_form_size: Option<usize>,
    pub error: Option<String>,
    /// Kind of the root cause, e.g. `axiom-disabled`.
    pub error_kind: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub decls: Vec<DeclReport>,
    /// Set when a file could not be parsed or resolved.
    pub frontend_errors: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.frontend_errors.is_empty() && self.decls.iter().all(|d| d.passed)
    }

    pub fn extend(&mut self, other: Report) {
        self.decls.extend(other.decls);
        self.frontend_errors.extend(other.frontend_errors);
    }

    pub fn find(&self, name: &str) -> Option<&DeclReport> {
        self.decls.iter().find(|d| d.name == name)
    }
}

fn check_decl(sig: &Signature, d: &ResolvedDecl) -> Result<GlobalEntry, CheckError> {
    if sig.entries.contains_key(&d.name) || sig.failed.contains_key(&d.name) {
        return Err(CheckError::Duplicate {
            name: d.name.to_string(),
        });
    }
    let ch = Checker::new(sig);
    let cx = Cx::default();
    ch.check_type(&cx, &d.annotation)?;
    let ty = ch.eval(&cx, &d.annotation);
    let body = match &d.body {
        Some(b) => {
            ch.check(&cx, b, &ty)?;
            Some(ch.eval(&cx, b))
        }
        None if sig.flags.postulates => None,
        None => {
            return Err(CheckError::PostulatesDisabled {
                name: d.name.to_string(),
            })
        }
    };
    Ok(GlobalEntry {
        ty_term: d.annotation.clone(),
        body_term: d.body.clone(),
        ty,
        body,
    })
}

/// Check declarations in order, extending the signature with each success.
///
/// Failures are recorded so that later references report `DependsOnFailed`.
/// With `strict`, checking stops at the first failure.
pub fn check_module(sig: &mut Signature, decls: &[ResolvedDecl], strict: bool) -> Report {
    let mut report = Report::default();
    for d in decls {
        let start = Instant::now();
        let result = check_decl(sig, d);
        let (passed, nf_size, error) = match result {
            Ok(entry) => {
                let size = match &entry.body {
                    Some(b) => sig.nbe().readback(0, &entry.ty, b).size(),
                    None => sig.nbe().readback_type(0, &entry.ty).size(),
                };
                sig.insert(d.name.clone(), entry);
                (true, Some(size), None)
            }
            Err(e) => {
                if !matches!(e, CheckError::Duplicate { .. }) {
                    sig.failed.insert(d.name.clone(), e.clone());
                }
                (false, None, Some(e))
            }
        };
        report.decls.push(DeclReport {
            name: d.name.to_string(),
            file: d.span.file.to_string(),
            line: d.span.line,
            passed,
            elapsed_ms: start.elapsed().as_secs_f64() * 1000.0,
            normal_form_size: nf_size,
            error: error.as_ref().map(|e| format!("{}: {e}", d.span)),
            error_kind: error.as_ref().map(|e| e.root_cause().kind().to_string()),
        });
        if strict && !passed {
            break;
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
}

/// Parse, resolve and check one source file against `sig`.
pub fn check_source(
    sig: &mut Signature,
    file: &str,
    source: &str,
    strict: bool,
) -> Result<Report, FrontendError> {
    let decls = parse_module(file, source)?;
    let resolved = resolve_names(&decls, &sig.known_names())?;
    Ok(check_module(sig, &resolved, strict))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_term, Resolver};

    fn term(src: &str, locals: &[&str]) -> Term {
        let s = parse_term("<t>", src).unwrap();
        let globals = HashSet::new();
        let mut r = Resolver::with_locals(&globals, locals.iter().map(|s| s.to_string()).collect());
        (*r.resolve(&s).unwrap()).clone()
    }

    fn ctx_a() -> Context {
        let mut ctx = Context::new();
        ctx.push(Term::univ(0));
        ctx
    }

    #[test]
    fn identity_checks() {
        let sig = Signature::default();
        let t = term("\\A x. x", &[]);
        let ty = term("Pi (A : U0) (x : El A) -> El A", &[]);
        check(&sig, &Context::new(), &t, &ty).unwrap();
    }

    #[test]
    fn refl_needs_convertible_endpoints() {
        let sig = Signature::default();
        let mut ctx = ctx_a();
        ctx.push(Term::el(Term::var(0)));
        ctx.push(Term::el(Term::var(1)));
        let ok = term("refl a", &["A", "a", "b"]);
        let good_ty = term("Id (El A) a a", &["A", "a", "b"]);
        check(&sig, &ctx, &ok, &good_ty).unwrap();
        let bad_ty = term("Id (El A) a b", &["A", "a", "b"]);
        assert!(matches!(
            check(&sig, &ctx, &ok, &bad_ty),
            Err(CheckError::TypeMismatch { .. })
        ));
    }

    #[test]
    fn el_of_universe_is_rejected() {
        let sig = Signature::default();
        let err = infer(&sig, &Context::new(), &Term::El(Term::univ(0))).unwrap_err();
        assert!(matches!(err, CheckError::NotATerm { .. }));
        let err = check(&sig, &Context::new(), &Term::Univ(0), &Term::Univ(1)).unwrap_err();
        assert!(matches!(err, CheckError::NotATerm { .. }));
    }

    #[test]
    fn universe_overflow() {
        let sig = Signature::default();
        let err = infer(&sig, &Context::new(), &Term::CodeUniv(2)).unwrap_err();
        assert_eq!(
            err,
            CheckError::UniverseOverflow {
                level: 3,
                height: 3
            }
        );
        assert!(infer(&sig, &Context::new(), &Term::CodeUniv(1)).is_ok());
    }

    #[test]
    fn disabled_axiom() {
        let sig = Signature::new(Flags {
            ua_levels: BTreeSet::new(),
            ..Flags::default()
        });
        let err = infer(&sig, &Context::new(), &Term::Axiom(Axiom::Ua(0))).unwrap_err();
        assert_eq!(err.kind(), "axiom-disabled");
    }

    #[test]
    fn ua_has_univalence_type() {
        let sig = Signature::default();
        let ty = infer(&sig, &Context::new(), &Term::Axiom(Axiom::Ua(0))).unwrap();
        match ty {
            Term::Pi(a, rest) => {
                assert_eq!(*a, Term::Univ(0));
                assert!(matches!(&*rest, Term::Pi(b, _) if **b == Term::Univ(0)));
            }
            other => panic!("unexpected {other:?}"),
        }
        let fe = infer(&sig, &Context::new(), &Term::Axiom(Axiom::Funext(0))).unwrap();
        assert!(matches!(fe, Term::Pi(..)));
    }

    #[test]
    fn resize_needs_room_in_the_tower() {
        let flags = Flags {
            resizing: true,
            ..Flags::default()
        };
        let sig = Signature::new(flags.clone());
        assert!(infer(&sig, &Context::new(), &Term::Axiom(Axiom::Resize(0))).is_ok());
        let low = Signature::new(Flags { height: 1, ..flags });
        assert_eq!(
            infer(&low, &Context::new(), &Term::Axiom(Axiom::Resize(0)))
                .unwrap_err()
                .kind(),
            "universe-overflow"
        );
    }

    #[test]
    fn empty_module_passes() {
        let mut sig = Signature::default();
        let r = check_source(&mut sig, "e.hott", "", false).unwrap();
        assert!(r.passed());
        assert!(r.decls.is_empty());
    }

    #[test]
    fn redefinition_across_files_is_duplicate() {
        let mut sig = Signature::default();
        check_source(&mut sig, "a.hott", "def u : U1 := code-u 0", false).unwrap();
        let err = check_source(&mut sig, "b.hott", "def u : U1 := code-u 0", false).unwrap_err();
        assert!(matches!(err, FrontendError::Resolve(ResolveError::Duplicate { .. })));
    }

    #[test]
    fn dependents_of_failures_report_the_cause() {
        let mut sig = Signature::new(Flags {
            funext: false,
            ..Flags::default()
        });
        let ty = "Pi (A : U0) (B : El A -> U0) (f g : Pi (x : El A) -> El (B x)) \
                  -> (Pi (x : El A) -> Id (El (B x)) (f x) (g x)) -> Id (Pi (x : El A) -> El (B x)) f g";
        let src = format!(
            "def w : U1 := code-u 0\ndef fe : {ty} := funext\ndef user : {ty} := fe\n"
        );
        let r = check_source(&mut sig, "y.hott", &src, false).unwrap();
        assert!(r.find("w").unwrap().passed);
        assert_eq!(r.find("fe").unwrap().error_kind.as_deref(), Some("axiom-disabled"));
        let user = r.find("user").unwrap();
        assert!(!user.passed);
        assert_eq!(user.error_kind.as_deref(), Some("axiom-disabled"));
    }

    #[test]
    fn strict_stops_early() {
        let mut sig = Signature::default();
        let src = "def a : U0 := code-u 0\ndef b : U1 := code-u 0\n";
        let r = check_source(&mut sig, "s.hott", src, true).unwrap();
        assert_eq!(r.decls.len(), 1);
        assert!(!r.passed());
    }
}
