//! Surface syntax: lexer, recursive-descent parser, name resolution and the
//! pretty printer that produces re-parseable text.
//!
//! ```text
//! module := decl*
//! decl   := "def" IDENT ":" term [":=" term]
//! term   := "Pi" binder+ "->" term | "Sg" binder+ "." term | "\" IDENT+ "." term
//!         | app ["->" term]
//! app    := head atom*
//! head   := "Id" atom atom atom | "refl" atom | "J" atom atom atom atom atom
//!         | "El" atom | "lift" atom | "code-pi" atom atom | "code-sg" atom atom
//!         | "code-id" atom atom atom | "code-u" NAT | "ua" NAT | "resize" NAT
//!         | "funext" [NAT] | atom
//! atom   := IDENT | "U" NAT | "(" term ")" | "(" term "," term ")" | atom ".1" | atom ".2"
//! binder := "(" IDENT+ ":" term ")"
//! ```
//!
//! `--` starts a line comment.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{Axiom, Name, RcTerm, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub file: Arc<str>,
    /// Byte offsets into the source.
    pub start: usize,
    pub end: usize,
    /// 1-based line and column of `start`.
    pub line: usize,
    pub column: usize,
}

impl SourceSpan {
    fn join(&self, other: &SourceSpan) -> SourceSpan {
        SourceSpan {
            file: self.file.clone(),
            start: self.start,
            end: other.end.max(self.end),
            line: self.line,
            column: self.column,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{span}: unexpected character {found:?}")]
    Lexical { found: char, span: SourceSpan },
    #[error("{span}: number literal out of range")]
    BadNumber { span: SourceSpan },
    #[error("{span}: unexpected {found}, expected one of: {}", expected.join(", "))]
    Unexpected {
        found: String,
        expected: Vec<String>,
        span: SourceSpan,
    },
}

impl ParseError {
    pub fn span(&self) -> &SourceSpan {
        match self {
            ParseError::Lexical { span, .. }
            | ParseError::BadNumber { span }
            | ParseError::Unexpected { span, .. } => span,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("{span}: unbound identifier `{name}`")]
    Unbound { name: String, span: SourceSpan },
    #[error("{span}: duplicate definition of `{name}`")]
    Duplicate { name: String, span: SourceSpan },
    #[error("{span}: {what} must be a lambda binding {expected} variable(s)")]
    BinderArity {
        what: &'static str,
        expected: usize,
        span: SourceSpan,
    },
}

impl ResolveError {
    pub fn span(&self) -> &SourceSpan {
        match self {
            ResolveError::Unbound { span, .. }
            | ResolveError::Duplicate { span, .. }
            | ResolveError::BinderArity { span, .. } => span,
        }
    }
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Def,
    Colon,
    Define,
    Arrow,
    Dot,
    Proj(u8),
    Comma,
    LParen,
    RParen,
    Lambda,
    Ident(String),
    Nat(u32),
    Univ(u32),
    Pi,
    Sg,
    Id,
    Refl,
    J,
    El,
    Lift,
    Funext,
    Ua,
    Resize,
    CodePi,
    CodeSg,
    CodeId,
    CodeU,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Def => "`def`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Define => "`:=`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Proj(n) => format!("`.{n}`"),
            Tok::Comma => "`,`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Lambda => "`\\`".into(),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Nat(n) => format!("number {n}"),
            Tok::Univ(n) => format!("`U{n}`"),
            Tok::Eof => "end of input".into(),
            other => format!("keyword `{}`", keyword_text(other)),
        }
    }
}

fn keyword_text(t: &Tok) -> &'static str {
    match t {
        Tok::Pi => "Pi",
        Tok::Sg => "Sg",
        Tok::Id => "Id",
        Tok::Refl => "refl",
        Tok::J => "J",
        Tok::El => "El",
        Tok::Lift => "lift",
        Tok::Funext => "funext",
        Tok::Ua => "ua",
        Tok::Resize => "resize",
        Tok::CodePi => "code-pi",
        Tok::CodeSg => "code-sg",
        Tok::CodeId => "code-id",
        Tok::CodeU => "code-u",
        Tok::Def => "def",
        _ => "",
    }
}

const KEYWORDS: &[&str] = &[
    "def", "Pi", "Sg", "Id", "refl", "J", "El", "lift", "funext", "ua", "resize", "code-pi",
    "code-sg", "code-id", "code-u",
];

fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "def" => Tok::Def,
        "Pi" => Tok::Pi,
        "Sg" => Tok::Sg,
        "Id" => Tok::Id,
        "refl" => Tok::Refl,
        "J" => Tok::J,
        "El" => Tok::El,
        "lift" => Tok::Lift,
        "funext" => Tok::Funext,
        "ua" => Tok::Ua,
        "resize" => Tok::Resize,
        "code-pi" => Tok::CodePi,
        "code-sg" => Tok::CodeSg,
        "code-id" => Tok::CodeId,
        "code-u" => Tok::CodeU,
        _ => return None,
    })
}

/// `U` followed by decimal digits names a universe.
fn universe_token(s: &str) -> Option<&str> {
    let digits = s.strip_prefix('U')?;
    (!digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())).then_some(digits)
}

pub fn is_reserved(s: &str) -> bool {
    KEYWORDS.contains(&s) || universe_token(s).is_some() || s == "_"
}

struct Lexer<'a> {
    src: &'a str,
    file: Arc<str>,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn span_from(&self, start: usize, line: usize, col: usize) -> SourceSpan {
        SourceSpan {
            file: self.file.clone(),
            start,
            end: self.pos,
            line,
            column: col,
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('-') if self.peek2() == Some('-') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            let (start, line, col) = (self.pos, self.line, self.col);
            let Some(c) = self.bump() else {
                out.push((Tok::Eof, self.span_from(start, line, col)));
                return Ok(out);
            };
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '\\' | 'λ' => Tok::Lambda,
                ':' if self.peek() == Some('=') => {
                    self.bump();
                    Tok::Define
                }
                ':' => Tok::Colon,
                '-' if self.peek() == Some('>') => {
                    self.bump();
                    Tok::Arrow
                }
                '→' => Tok::Arrow,
                '.' => match self.peek() {
                    Some(d @ ('1' | '2')) => {
                        self.bump();
                        Tok::Proj(if d == '1' { 1 } else { 2 })
                    }
                    _ => Tok::Dot,
                },
                c if c.is_ascii_digit() => {
                    while matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
                        self.bump();
                    }
                    let text = &self.src[start..self.pos];
                    let n = text.parse::<u32>().map_err(|_| ParseError::BadNumber {
                        span: self.span_from(start, line, col),
                    })?;
                    Tok::Nat(n)
                }
                c if c.is_alphabetic() || c == '_' => {
                    loop {
                        match self.peek() {
                            Some(d) if d.is_alphanumeric() || d == '_' || d == '\'' => {
                                self.bump();
                            }
                            Some('-') if matches!(self.peek2(), Some(d) if d.is_alphanumeric()) => {
                                self.bump();
                            }
                            _ => break,
                        }
                    }
                    let text = &self.src[start..self.pos];
                    if let Some(k) = keyword(text) {
                        k
                    } else if let Some(digits) = universe_token(text) {
                        Tok::Univ(digits.parse().map_err(|_| ParseError::BadNumber {
                            span: self.span_from(start, line, col),
                        })?)
                    } else {
                        Tok::Ident(text.to_string())
                    }
                }
                other => {
                    return Err(ParseError::Lexical {
                        found: other,
                        span: self.span_from(start, line, col),
                    })
                }
            };
            out.push((tok, self.span_from(start, line, col)));
        }
    }
}

// ---------------------------------------------------------------------------
// Surface syntax

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct STerm {
    pub kind: SKind,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SBinder {
    pub names: Vec<(String, SourceSpan)>,
    pub ty: STerm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SKind {
    Ident(String),
    Pi(Vec<SBinder>, Box<STerm>),
    Sigma(Vec<SBinder>, Box<STerm>),
    Arrow(Box<STerm>, Box<STerm>),
    Lam(Vec<(String, SourceSpan)>, Box<STerm>),
    App(Box<STerm>, Box<STerm>),
    Pair(Box<STerm>, Box<STerm>),
    Fst(Box<STerm>),
    Snd(Box<STerm>),
    Id(Box<STerm>, Box<STerm>, Box<STerm>),
    Refl(Box<STerm>),
    J(Box<[STerm; 5]>),
    Univ(u32),
    El(Box<STerm>),
    Lift(Box<STerm>),
    CodePi(Box<STerm>, Box<STerm>),
    CodeSigma(Box<STerm>, Box<STerm>),
    CodeId(Box<STerm>, Box<STerm>, Box<STerm>),
    CodeUniv(u32),
    Axiom(Axiom),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceDecl {
    pub name: String,
    pub name_span: SourceSpan,
    pub annotation: STerm,
    /// Absent for postulates.
    pub body: Option<STerm>,
    pub span: SourceSpan,
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1.clone()
    }

    fn prev_span(&self) -> SourceSpan {
        self.toks[self.pos.saturating_sub(1)].1.clone()
    }

    fn advance(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(ParseError::Unexpected {
            found: self.peek().describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            span: self.span(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<SourceSpan> {
        if *self.peek() == tok {
            Ok(self.advance().1)
        } else {
            self.unexpected(&[what])
        }
    }

    fn ident(&mut self) -> PResult<(String, SourceSpan)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let sp = self.advance().1;
                Ok((s, sp))
            }
            _ => self.unexpected(&["identifier"]),
        }
    }

    fn nat(&mut self) -> PResult<u32> {
        match *self.peek() {
            Tok::Nat(n) => {
                self.advance();
                Ok(n)
            }
            _ => self.unexpected(&["number"]),
        }
    }

    fn module(&mut self) -> PResult<Vec<SurfaceDecl>> {
        let mut decls = Vec::new();
        loop {
            match self.peek() {
                Tok::Eof => return Ok(decls),
                Tok::Def => decls.push(self.decl()?),
                _ => return self.unexpected(&["`def`", "end of input"]),
            }
        }
    }

    fn decl(&mut self) -> PResult<SurfaceDecl> {
        let start = self.expect(Tok::Def, "`def`")?;
        let (name, name_span) = self.ident()?;
        self.expect(Tok::Colon, "`:`")?;
        let annotation = self.term()?;
        let body = if *self.peek() == Tok::Define {
            self.advance();
            Some(self.term()?)
        } else {
            None
        };
        let span = start.join(&self.prev_span());
        Ok(SurfaceDecl {
            name,
            name_span,
            annotation,
            body,
            span,
        })
    }

    fn mk(&self, kind: SKind, start: &SourceSpan) -> STerm {
        STerm {
            kind,
            span: start.join(&self.prev_span()),
        }
    }

    fn binders(&mut self) -> PResult<Vec<SBinder>> {
        let mut out = Vec::new();
        while *self.peek() == Tok::LParen {
            self.advance();
            let mut names = vec![self.ident()?];
            while let Tok::Ident(_) = self.peek() {
                names.push(self.ident()?);
            }
            self.expect(Tok::Colon, "`:`")?;
            let ty = self.term()?;
            self.expect(Tok::RParen, "`)`")?;
            out.push(SBinder { names, ty });
        }
        if out.is_empty() {
            return self.unexpected(&["binder `(x : A)`"]);
        }
        Ok(out)
    }

    fn term(&mut self) -> PResult<STerm> {
        let start = self.span();
        match self.peek() {
            Tok::Pi => {
                self.advance();
                let bs = self.binders()?;
                self.expect(Tok::Arrow, "`->`")?;
                let body = self.term()?;
                Ok(self.mk(SKind::Pi(bs, Box::new(body)), &start))
            }
            Tok::Sg => {
                self.advance();
                let bs = self.binders()?;
                self.expect(Tok::Dot, "`.`")?;
                let body = self.term()?;
                Ok(self.mk(SKind::Sigma(bs, Box::new(body)), &start))
            }
            Tok::Lambda => {
                self.advance();
                let mut names = vec![self.ident()?];
                while let Tok::Ident(_) = self.peek() {
                    names.push(self.ident()?);
                }
                self.expect(Tok::Dot, "`.`")?;
                let body = self.term()?;
                Ok(self.mk(SKind::Lam(names, Box::new(body)), &start))
            }
            _ => {
                let lhs = self.app()?;
                if *self.peek() == Tok::Arrow {
                    self.advance();
                    let rhs = self.term()?;
                    Ok(self.mk(SKind::Arrow(Box::new(lhs), Box::new(rhs)), &start))
                } else {
                    Ok(lhs)
                }
            }
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::Univ(_) | Tok::LParen)
    }

    fn app(&mut self) -> PResult<STerm> {
        let start = self.span();
        let mut head = self.head()?;
        while self.starts_atom() {
            let arg = self.atom()?;
            head = self.mk(SKind::App(Box::new(head), Box::new(arg)), &start);
        }
        Ok(head)
    }

    fn head(&mut self) -> PResult<STerm> {
        let start = self.span();
        let b = |t: STerm| Box::new(t);
        let kind = match self.peek() {
            Tok::Id => {
                self.advance();
                let (a, x, y) = (self.atom()?, self.atom()?, self.atom()?);
                SKind::Id(b(a), b(x), b(y))
            }
            Tok::Refl => {
                self.advance();
                SKind::Refl(b(self.atom()?))
            }
            Tok::J => {
                self.advance();
                let args = [
                    self.atom()?,
                    self.atom()?,
                    self.atom()?,
                    self.atom()?,
                    self.atom()?,
                ];
                SKind::J(Box::new(args))
            }
            Tok::El => {
                self.advance();
                SKind::El(b(self.atom()?))
            }
            Tok::Lift => {
                self.advance();
                SKind::Lift(b(self.atom()?))
            }
            Tok::CodePi => {
                self.advance();
                let (x, y) = (self.atom()?, self.atom()?);
                SKind::CodePi(b(x), b(y))
            }
            Tok::CodeSg => {
                self.advance();
                let (x, y) = (self.atom()?, self.atom()?);
                SKind::CodeSigma(b(x), b(y))
            }
            Tok::CodeId => {
                self.advance();
                let (a, x, y) = (self.atom()?, self.atom()?, self.atom()?);
                SKind::CodeId(b(a), b(x), b(y))
            }
            Tok::CodeU => {
                self.advance();
                SKind::CodeUniv(self.nat()?)
            }
            Tok::Ua => {
                self.advance();
                SKind::Axiom(Axiom::Ua(self.nat()?))
            }
            Tok::Resize => {
                self.advance();
                SKind::Axiom(Axiom::Resize(self.nat()?))
            }
            Tok::Funext => {
                self.advance();
                let level = if let Tok::Nat(_) = self.peek() {
                    self.nat()?
                } else {
                    0
                };
                SKind::Axiom(Axiom::Funext(level))
            }
            _ => return self.atom(),
        };
        Ok(self.mk(kind, &start))
    }

    fn atom(&mut self) -> PResult<STerm> {
        let start = self.span();
        let mut t = match self.peek().clone() {
            Tok::Ident(s) => {
                self.advance();
                self.mk(SKind::Ident(s), &start)
            }
            Tok::Univ(n) => {
                self.advance();
                self.mk(SKind::Univ(n), &start)
            }
            Tok::LParen => {
                self.advance();
                let inner = self.term()?;
                if *self.peek() == Tok::Comma {
                    self.advance();
                    let snd = self.term()?;
                    self.expect(Tok::RParen, "`)`")?;
                    self.mk(SKind::Pair(Box::new(inner), Box::new(snd)), &start)
                } else {
                    if *self.peek() != Tok::RParen {
                        return self.unexpected(&["`)`", "`,`"]);
                    }
                    self.advance();
                    STerm {
                        kind: inner.kind,
                        span: start.join(&self.prev_span()),
                    }
                }
            }
            _ => return self.unexpected(&["identifier", "`U<n>`", "`(`"]),
        };
        while let Tok::Proj(n) = *self.peek() {
            self.advance();
            let kind = if n == 1 {
                SKind::Fst(Box::new(t))
            } else {
                SKind::Snd(Box::new(t))
            };
            t = self.mk(kind, &start);
        }
        Ok(t)
    }
}

/// Parse a whole `.hott` source file.
pub fn parse_module(file: &str, source: &str) -> Result<Vec<SurfaceDecl>, ParseError> {
    let toks = lex(file, source)?;
    Parser { toks, pos: 0 }.module()
}

/// Parse a single term (used for command-line arguments and tests).
pub fn parse_term(file: &str, source: &str) -> Result<STerm, ParseError> {
    let toks = lex(file, source)?;
    let mut p = Parser { toks, pos: 0 };
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return p.unexpected(&["end of input"]);
    }
    Ok(t)
}

fn lex(file: &str, source: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    Lexer {
        src: source,
        file: Arc::from(file),
        pos: 0,
        line: 1,
        col: 1,
    }
    .tokens()
}

// ---------------------------------------------------------------------------
// Name resolution

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedDecl {
    pub name: Name,
    pub annotation: RcTerm,
    pub body: Option<RcTerm>,
    pub span: SourceSpan,
}

pub struct Resolver<'g> {
    globals: &'g HashSet<String>,
    locals: Vec<String>,
}

impl<'g> Resolver<'g> {
    pub fn new(globals: &'g HashSet<String>) -> Self {
        Self {
            globals,
            locals: Vec::new(),
        }
    }

    /// Resolve with the given names in scope as local variables (outermost first).
    pub fn with_locals(globals: &'g HashSet<String>, locals: Vec<String>) -> Self {
        Self { globals, locals }
    }

    fn bound<T>(
        &mut self,
        names: &[String],
        f: impl FnOnce(&mut Self) -> Result<T, ResolveError>,
    ) -> Result<T, ResolveError> {
        let depth = self.locals.len();
        self.locals.extend(names.iter().cloned());
        let r = f(self);
        self.locals.truncate(depth);
        r
    }

    pub fn resolve(&mut self, t: &STerm) -> Result<RcTerm, ResolveError> {
        Ok(Arc::new(match &t.kind {
            SKind::Ident(name) => {
                if let Some(pos) = self.locals.iter().rposition(|n| n == name && n != "_") {
                    Term::Var(self.locals.len() - 1 - pos)
                } else if self.globals.contains(name) {
                    Term::Global(Arc::from(name.as_str()))
                } else {
                    return Err(ResolveError::Unbound {
                        name: name.clone(),
                        span: t.span.clone(),
                    });
                }
            }
            SKind::Pi(bs, body) => return self.telescope(bs, body, true),
            SKind::Sigma(bs, body) => return self.telescope(bs, body, false),
            SKind::Arrow(a, b) => {
                let a = self.resolve(a)?;
                let b = self.bound(&["_".to_string()], |r| r.resolve(b))?;
                Term::Pi(a, b)
            }
            SKind::Lam(names, body) => {
                let names: Vec<String> = names.iter().map(|(n, _)| n.clone()).collect();
                let mut body = self.bound(&names, |r| r.resolve(body))?;
                for _ in &names {
                    body = Term::lam(body);
                }
                return Ok(body);
            }
            SKind::App(f, a) => Term::App(self.resolve(f)?, self.resolve(a)?),
            SKind::Pair(a, b) => Term::Pair(self.resolve(a)?, self.resolve(b)?),
            SKind::Fst(p) => Term::Fst(self.resolve(p)?),
            SKind::Snd(p) => Term::Snd(self.resolve(p)?),
            SKind::Id(a, x, y) => Term::IdTy(self.resolve(a)?, self.resolve(x)?, self.resolve(y)?),
            SKind::Refl(x) => Term::Refl(self.resolve(x)?),
            SKind::J(args) => {
                let [motive, base, lhs, rhs, path] = &**args;
                let (mnames, mbody) = lambda_prefix(motive, 3, "J motive")?;
                let (bnames, bbody) = lambda_prefix(base, 1, "J base")?;
                Term::J {
                    motive: self.bound(&mnames, |r| r.resolve(mbody))?,
                    base: self.bound(&bnames, |r| r.resolve(bbody))?,
                    lhs: self.resolve(lhs)?,
                    rhs: self.resolve(rhs)?,
                    path: self.resolve(path)?,
                }
            }
            SKind::Univ(n) => Term::Univ(*n),
            SKind::El(c) => Term::El(self.resolve(c)?),
            SKind::Lift(c) => Term::Lift(self.resolve(c)?),
            SKind::CodePi(a, b) => Term::CodePi(self.resolve(a)?, self.resolve(b)?),
            SKind::CodeSigma(a, b) => Term::CodeSigma(self.resolve(a)?, self.resolve(b)?),
            SKind::CodeId(a, x, y) => {
                Term::CodeId(self.resolve(a)?, self.resolve(x)?, self.resolve(y)?)
            }
            SKind::CodeUniv(n) => Term::CodeUniv(*n),
            SKind::Axiom(ax) => Term::Axiom(*ax),
        }))
    }

    fn telescope(
        &mut self,
        bs: &[SBinder],
        body: &STerm,
        is_pi: bool,
    ) -> Result<RcTerm, ResolveError> {
        // Flatten `(x y : A)` into two binders whose types are resolved at
        // their own depth.
        let mut flat: Vec<(&String, &STerm)> = Vec::new();
        for b in bs {
            for (n, _) in &b.names {
                flat.push((n, &b.ty));
            }
        }
        let depth = self.locals.len();
        let mut doms = Vec::with_capacity(flat.len());
        let mut result = Ok(());
        for (name, ty) in &flat {
            match self.resolve(ty) {
                Ok(d) => doms.push(d),
                Err(e) => {
                    result = Err(e);
                    break;
                }
            }
            self.locals.push((*name).clone());
        }
        let body = result.and_then(|()| self.resolve(body));
        self.locals.truncate(depth);
        let mut acc = body?;
        for dom in doms.into_iter().rev() {
            acc = if is_pi {
                Term::pi(dom, acc)
            } else {
                Term::sigma(dom, acc)
            };
        }
        Ok(acc)
    }
}

/// Peel exactly `n` lambda binders from a surface term, flattening nested lambdas.
fn lambda_prefix<'t>(
    t: &'t STerm,
    n: usize,
    what: &'static str,
) -> Result<(Vec<String>, &'t STerm), ResolveError> {
    let mut names = Vec::new();
    let mut cur = t;
    while names.len() < n {
        match &cur.kind {
            SKind::Lam(ns, body) if names.len() + ns.len() <= n => {
                names.extend(ns.iter().map(|(s, _)| s.clone()));
                cur = body;
            }
            _ => break,
        }
    }
    if names.len() != n {
        return Err(ResolveError::BinderArity {
            what,
            expected: n,
            span: t.span.clone(),
        });
    }
    Ok((names, cur))
}

/// Resolve a list of declarations against previously known global names.
///
/// Each declaration may refer to the globals and to earlier declarations in
/// the list, but not to itself.
pub fn resolve_names(
    decls: &[SurfaceDecl],
    known: &HashSet<String>,
) -> Result<Vec<ResolvedDecl>, ResolveError> {
    let mut globals = known.clone();
    let mut out = Vec::with_capacity(decls.len());
    for d in decls {
        if globals.contains(&d.name) {
            return Err(ResolveError::Duplicate {
                name: d.name.clone(),
                span: d.name_span.clone(),
            });
        }
        let mut r = Resolver::new(&globals);
        let annotation = r.resolve(&d.annotation)?;
        let body = d.body.as_ref().map(|b| r.resolve(b)).transpose()?;
        out.push(ResolvedDecl {
            name: Arc::from(d.name.as_str()),
            annotation,
            body,
            span: d.span.clone(),
        });
        globals.insert(d.name.clone());
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Printing

const PREC_TERM: u8 = 0;
const PREC_APP: u8 = 1;
const PREC_ATOM: u8 = 2;

/// Pretty printer producing text that parses back to the same term.
pub struct Printer<'a> {
    names: Vec<String>,
    avoid: &'a dyn Fn(&str) -> bool,
}

fn no_globals(_: &str) -> bool {
    false
}

impl<'a> Printer<'a> {
    /// `avoid` reports names that must not be used for binders (globals).
    pub fn new(avoid: &'a dyn Fn(&str) -> bool) -> Self {
        Self {
            names: Vec::new(),
            avoid,
        }
    }

    pub fn with_context(avoid: &'a dyn Fn(&str) -> bool, names: Vec<String>) -> Self {
        Self { names, avoid }
    }

    fn fresh(&self, hint: &str) -> String {
        let taken = |s: &str| self.names.iter().any(|n| n == s) || (self.avoid)(s) || is_reserved(s);
        if !taken(hint) {
            return hint.to_string();
        }
        (1..)
            .map(|i| format!("{hint}{i}"))
            .find(|s| !taken(s))
            .expect("infinitely many candidates")
    }

    fn with_binder<T>(&mut self, hint: &str, f: impl FnOnce(&mut Self, &str) -> T) -> T {
        let name = self.fresh(hint);
        self.names.push(name.clone());
        let r = f(self, &name);
        self.names.pop();
        r
    }

    pub fn print(&mut self, t: &Term) -> String {
        self.go(t, PREC_TERM)
    }

    fn paren(s: String, needed: bool) -> String {
        if needed {
            format!("({s})")
        } else {
            s
        }
    }

    fn go(&mut self, t: &Term, prec: u8) -> String {
        match t {
            Term::Var(i) => match self.names.len().checked_sub(1 + i) {
                Some(pos) => self.names[pos].clone(),
                None => format!("#{i}"),
            },
            Term::Global(n) => n.to_string(),
            Term::Univ(n) => format!("U{n}"),
            Term::Pi(a, b) => {
                let s = if b.has_free_var(0) {
                    let dom = self.go(a, PREC_TERM);
                    self.with_binder("x", |p, x| {
                        format!("Pi ({x} : {dom}) -> {}", p.go(b, PREC_TERM))
                    })
                } else {
                    let dom = self.go(a, PREC_APP);
                    self.with_binder("_", |p, _| format!("{dom} -> {}", p.go(b, PREC_TERM)))
                };
                Self::paren(s, prec > PREC_TERM)
            }
            Term::Sigma(a, b) => {
                let dom = self.go(a, PREC_TERM);
                let s = self.with_binder("x", |p, x| {
                    format!("Sg ({x} : {dom}). {}", p.go(b, PREC_TERM))
                });
                Self::paren(s, prec > PREC_TERM)
            }
            Term::Lam(b) => {
                let s = self.with_binder("x", |p, x| format!("\\{x}. {}", p.go(b, PREC_TERM)));
                Self::paren(s, prec > PREC_TERM)
            }
            Term::App(f, a) => {
                let s = format!("{} {}", self.go(f, PREC_APP), self.go(a, PREC_ATOM));
                Self::paren(s, prec > PREC_APP)
            }
            Term::Pair(a, b) => format!("({}, {})", self.go(a, PREC_TERM), self.go(b, PREC_TERM)),
            Term::Fst(p) => format!("{}.1", self.go(p, PREC_ATOM)),
            Term::Snd(p) => format!("{}.2", self.go(p, PREC_ATOM)),
            Term::IdTy(a, x, y) => {
                let s = format!(
                    "Id {} {} {}",
                    self.go(a, PREC_ATOM),
                    self.go(x, PREC_ATOM),
                    self.go(y, PREC_ATOM)
                );
                Self::paren(s, prec > PREC_APP)
            }
            Term::Refl(x) => Self::paren(format!("refl {}", self.go(x, PREC_ATOM)), prec > PREC_APP),
            Term::J {
                motive,
                base,
                lhs,
                rhs,
                path,
            } => {
                let m = self.with_binder("x", |p, x| {
                    p.with_binder("y", |p, y| {
                        p.with_binder("p", |p, q| {
                            format!("(\\{x} {y} {q}. {})", p.go(motive, PREC_TERM))
                        })
                    })
                });
                let b = self.with_binder("x", |p, x| format!("(\\{x}. {})", p.go(base, PREC_TERM)));
                let s = format!(
                    "J {m} {b} {} {} {}",
                    self.go(lhs, PREC_ATOM),
                    self.go(rhs, PREC_ATOM),
                    self.go(path, PREC_ATOM)
                );
                Self::paren(s, prec > PREC_APP)
            }
            Term::El(c) => Self::paren(format!("El {}", self.go(c, PREC_ATOM)), prec > PREC_APP),
            Term::Lift(c) => Self::paren(format!("lift {}", self.go(c, PREC_ATOM)), prec > PREC_APP),
            Term::CodePi(a, b) => Self::paren(
                format!("code-pi {} {}", self.go(a, PREC_ATOM), self.go(b, PREC_ATOM)),
                prec > PREC_APP,
            ),
            Term::CodeSigma(a, b) => Self::paren(
                format!("code-sg {} {}", self.go(a, PREC_ATOM), self.go(b, PREC_ATOM)),
                prec > PREC_APP,
            ),
            Term::CodeId(a, x, y) => Self::paren(
                format!(
                    "code-id {} {} {}",
                    self.go(a, PREC_ATOM),
                    self.go(x, PREC_ATOM),
                    self.go(y, PREC_ATOM)
                ),
                prec > PREC_APP,
            ),
            Term::CodeUniv(n) => Self::paren(format!("code-u {n}"), prec > PREC_APP),
            Term::Axiom(ax) => Self::paren(ax.to_string(), prec > PREC_APP),
        }
    }
}

/// Print a closed term (globals are printed by name).
pub fn print_term(t: &Term) -> String {
    Printer::new(&no_globals).print(t)
}
