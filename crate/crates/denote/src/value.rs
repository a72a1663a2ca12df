//! Semantic values: objects and morphisms of the strict groupoid model.

use std::cell::OnceCell;
use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::rc::Rc;

/// An object of some fiber.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Val {
    /// Element of a finite set.
    Elem(u32),
    Code(Rc<Code>),
    Pair(Rc<Val>, Rc<Val>),
    /// A section, tabulated over the materialized domain fiber.
    Fun(Rc<Table>),
    /// An object of an identity type: a morphism of the underlying fiber.
    Path(Rc<Mor>),
}

/// Values at each object of the domain fiber, and at each morphism `m : x -> y`
/// the component `F(m)(f x) -> f y`.
#[derive(Clone, Debug)]
pub struct Table {
    pub objs: Vec<Val>,
    pub mors: Vec<Mor>,
    hash: u64,
    id: OnceCell<Mor>,
}

impl Table {
    pub fn new(objs: Vec<Val>, mors: Vec<Mor>) -> Table {
        let mut h = DefaultHasher::new();
        objs.hash(&mut h);
        mors.hash(&mut h);
        Table {
            objs,
            mors,
            hash: h.finish(),
            id: OnceCell::new(),
        }
    }

    /// The identity transformation, computed once.
    pub fn identity(&self) -> &Mor {
        self.id.get_or_init(|| Mor::fun(self.objs.iter().map(Val::identity).collect()))
    }
}

impl PartialEq for Table {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self, other) || (self.hash == other.hash && self.objs == other.objs && self.mors == other.mors)
    }
}

impl Eq for Table {}

impl Hash for Table {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.hash);
    }
}

impl PartialOrd for Table {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Table {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.objs, &self.mors).cmp(&(&other.objs, &other.mors))
    }
}

/// A morphism of some fiber. Its shape follows the type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mor {
    /// The unique morphism of a discrete fiber.
    Triv,
    /// A bijection between finite sets, `perm[i]` is the image of `i`.
    Perm(Rc<[u32]>),
    Pair(Rc<Mor>, Rc<Mor>),
    /// Components of a natural transformation, over the domain objects.
    Fun(Rc<[Mor]>),
}

/// Codes of the universe. Families are listed over the elements of the
/// domain in fiber order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Code {
    Fin(u32),
    Pi(Rc<Code>, Rc<[Code]>),
    Sigma(Rc<Code>, Rc<[Code]>),
    Id(Rc<Code>, Val, Val),
}

impl Val {
    pub fn pair(a: Val, b: Val) -> Val {
        Val::Pair(Rc::new(a), Rc::new(b))
    }

    pub fn code(c: Code) -> Val {
        Val::Code(Rc::new(c))
    }

    pub fn fun(objs: Vec<Val>, mors: Vec<Mor>) -> Val {
        Val::Fun(Rc::new(Table::new(objs, mors)))
    }

    pub fn path(m: Mor) -> Val {
        Val::Path(Rc::new(m))
    }

    /// The identity morphism. In this model it depends on the value alone:
    /// codes carry their size, and every other shape is built componentwise.
    pub fn identity(&self) -> Mor {
        match self {
            Val::Elem(_) | Val::Path(_) => Mor::Triv,
            Val::Code(c) => Mor::perm((0..c.size() as u32).collect()),
            Val::Pair(a, b) => Mor::pair(a.identity(), b.identity()),
            Val::Fun(t) => t.identity().clone(),
        }
    }

    pub fn as_code(&self) -> Option<&Code> {
        match self {
            Val::Code(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_table(&self) -> Option<&Table> {
        match self {
            Val::Fun(t) => Some(t),
            _ => None,
        }
    }

    pub fn parts(&self) -> Option<(&Val, &Val)> {
        match self {
            Val::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }
}

impl Mor {
    pub fn pair(a: Mor, b: Mor) -> Mor {
        Mor::Pair(Rc::new(a), Rc::new(b))
    }

    pub fn perm(p: Vec<u32>) -> Mor {
        Mor::Perm(p.into())
    }

    pub fn fun(c: Vec<Mor>) -> Mor {
        Mor::Fun(c.into())
    }

    pub fn parts(&self) -> Option<(&Mor, &Mor)> {
        match self {
            Mor::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }
}

impl Code {
    /// Number of elements, computed structurally.
    pub fn size(&self) -> u64 {
        match self {
            Code::Fin(n) => *n as u64,
            Code::Pi(_, bs) => bs.iter().map(Code::size).product(),
            Code::Sigma(_, bs) => bs.iter().map(Code::size).sum(),
            Code::Id(_, x, y) => (x == y) as u64,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Elem(i) => write!(f, "{i}"),
            Val::Code(c) => write!(f, "{c}"),
            Val::Pair(a, b) => write!(f, "({a}, {b})"),
            Val::Fun(t) => {
                write!(f, "[")?;
                for (i, v) in t.objs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
            Val::Path(m) => write!(f, "path {m}"),
        }
    }
}

impl fmt::Display for Mor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mor::Triv => write!(f, "*"),
            Mor::Perm(p) => write!(f, "{p:?}"),
            Mor::Pair(a, b) => write!(f, "({a}, {b})"),
            Mor::Fun(c) => {
                write!(f, "<")?;
                for (i, m) in c.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{m}")?;
                }
                write!(f, ">")
            }
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let family = |f: &mut fmt::Formatter<'_>, bs: &[Code]| {
            write!(f, "[")?;
            for (i, b) in bs.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{b}")?;
            }
            write!(f, "]")
        };
        match self {
            Code::Fin(n) => write!(f, "fin {n}"),
            Code::Pi(a, bs) => {
                write!(f, "pi ({a}) ")?;
                family(f, bs)
            }
            Code::Sigma(a, bs) => {
                write!(f, "sg ({a}) ")?;
                family(f, bs)
            }
            Code::Id(a, x, y) => write!(f, "id ({a}) {x} {y}"),
        }
    }
}
