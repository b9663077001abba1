use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::prop::operad::Factor;
use crate::slice::SliceBody;

pub type Name = Arc<str>;

/// A color of some PROP. Colors of a slice PROP are elements of its base.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Atom(Name),
    Elem(Arc<Element>),
}

impl Color {
    pub fn atom(s: &str) -> Self {
        Color::Atom(Arc::from(s))
    }

    pub fn elem(e: Element) -> Self {
        Color::Elem(Arc::new(e))
    }

    pub fn as_elem(&self) -> Option<&Arc<Element>> {
        match self {
            Color::Elem(e) => Some(e),
            Color::Atom(_) => None,
        }
    }
}

impl fmt::Debug for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Color::Atom(a) => write!(f, "{a}"),
            Color::Elem(e) => write!(f, "[{e:?}]"),
        }
    }
}

/// A finite non-empty sequence of colors.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile(Vec<Color>);

impl Profile {
    pub fn new(colors: Vec<Color>) -> Result<Self> {
        if colors.is_empty() {
            return Err(Error::invalid("profiles are non-empty"));
        }
        Ok(Profile(colors))
    }

    pub fn single(c: Color) -> Self {
        Profile(vec![c])
    }

    /// `k` copies of one color.
    pub fn uniform(c: &Color, k: usize) -> Result<Self> {
        Profile::new(vec![c.clone(); k])
    }

    pub fn colors(&self) -> &[Color] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, i: usize) -> &Color {
        &self.0[i]
    }

    pub fn concat(&self, other: &Profile) -> Profile {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Profile(v)
    }

    pub fn slice(&self, start: usize, end: usize) -> Result<Profile> {
        Profile::new(self.0[start..end].to_vec())
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c:?}")?;
        }
        write!(f, ")")
    }
}

/// Implementation-defined canonical payloads. Structural equality of payloads
/// is semantic equality within the owning PROP.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Payload {
    Point,
    Data(Arc<[u32]>),
    Sym(Name),
    Graph(Arc<Graph<Arc<Element>>>),
    Factors(Arc<[Factor]>),
    Slice(Arc<SliceBody>),
    Fiber { over: Arc<Element>, index: u32 },
}

/// An element of `P(out; in)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    pub owner: Name,
    pub out: Profile,
    pub inp: Profile,
    pub payload: Payload,
}

impl Element {
    pub fn new(owner: &Name, out: Profile, inp: Profile, payload: Payload) -> Self {
        Element {
            owner: owner.clone(),
            out,
            inp,
            payload,
        }
    }

    pub fn arity(&self) -> (usize, usize) {
        (self.out.len(), self.inp.len())
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.payload {
            Payload::Point => write!(f, "*{:?}{:?}", self.out, self.inp),
            Payload::Sym(s) => write!(f, "{s}"),
            Payload::Data(d) => write!(f, "{:?}{:?}{:?}", d, self.out, self.inp),
            Payload::Graph(g) => write!(f, "graph{:?}{:?}<{} vertices>", self.out, self.inp, g.vertices.len()),
            Payload::Factors(fs) => write!(f, "factors{fs:?}"),
            Payload::Slice(s) => write!(f, "{s:?}"),
            Payload::Fiber { over, index } => write!(f, "({over:?}, {index})"),
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}
