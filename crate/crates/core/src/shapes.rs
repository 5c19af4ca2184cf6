//! Nested data shapes and shape-generic operations.
//!
//! A [`Tree`] is a tuple/list nesting with leaves of one type. A
//! `Tree<WireKind>` describes the interface of a circuit; a `Tree<Qubit>` is
//! a register of arbitrary shape. Traversals are depth-first, left to right.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builder::{BuildError, Bit, Circ, Qubit};
use crate::ir::{Endpoint, WireId, WireKind};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tree<L> {
    Leaf(L),
    Tuple(Vec<Tree<L>>),
    List(Vec<Tree<L>>),
}

/// A tree with no payload.
pub type Shape = Tree<()>;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("shape mismatch: {left} vs {right}")]
pub struct ShapeMismatch {
    pub left: String,
    pub right: String,
}

impl ShapeMismatch {
    pub fn between<A, B>(a: &Tree<A>, b: &Tree<B>) -> Self {
        ShapeMismatch { left: a.shape().to_string(), right: b.shape().to_string() }
    }
}

impl<L> Tree<L> {
    pub fn unit() -> Self {
        Tree::Tuple(Vec::new())
    }

    pub fn leaves(&self) -> Vec<&L> {
        let mut out = Vec::new();
        self.for_each(&mut |l| out.push(l));
        out
    }

    pub fn into_leaves(self) -> Vec<L> {
        let mut out = Vec::new();
        self.collect_into(&mut out);
        out
    }

    fn collect_into(self, out: &mut Vec<L>) {
        match self {
            Tree::Leaf(l) => out.push(l),
            Tree::Tuple(ts) | Tree::List(ts) => ts.into_iter().for_each(|t| t.collect_into(out)),
        }
    }

    pub fn for_each<'a>(&'a self, f: &mut dyn FnMut(&'a L)) {
        match self {
            Tree::Leaf(l) => f(l),
            Tree::Tuple(ts) | Tree::List(ts) => ts.iter().for_each(|t| t.for_each(f)),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Tree::Leaf(_) => 1,
            Tree::Tuple(ts) | Tree::List(ts) => ts.iter().map(Tree::len).sum(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn map<M>(&self, f: &mut dyn FnMut(&L) -> M) -> Tree<M> {
        match self {
            Tree::Leaf(l) => Tree::Leaf(f(l)),
            Tree::Tuple(ts) => Tree::Tuple(ts.iter().map(|t| t.map(f)).collect()),
            Tree::List(ts) => Tree::List(ts.iter().map(|t| t.map(f)).collect()),
        }
    }

    pub fn try_map<M, E>(self, f: &mut dyn FnMut(L) -> Result<M, E>) -> Result<Tree<M>, E> {
        Ok(match self {
            Tree::Leaf(l) => Tree::Leaf(f(l)?),
            Tree::Tuple(ts) => Tree::Tuple(ts.into_iter().map(|t| t.try_map(f)).collect::<Result<_, _>>()?),
            Tree::List(ts) => Tree::List(ts.into_iter().map(|t| t.try_map(f)).collect::<Result<_, _>>()?),
        })
    }

    pub fn shape(&self) -> Shape {
        self.map(&mut |_| ())
    }

    pub fn same_shape<M>(&self, other: &Tree<M>) -> bool {
        match (self, other) {
            (Tree::Leaf(_), Tree::Leaf(_)) => true,
            (Tree::Tuple(a), Tree::Tuple(b)) | (Tree::List(a), Tree::List(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same_shape(y))
            }
            _ => false,
        }
    }

    pub fn zip<M>(self, other: Tree<M>) -> Result<Tree<(L, M)>, ShapeMismatch> {
        if !self.same_shape(&other) {
            return Err(ShapeMismatch::between(&self, &other));
        }
        Ok(self.zip_unchecked(other))
    }

    fn zip_unchecked<M>(self, other: Tree<M>) -> Tree<(L, M)> {
        match (self, other) {
            (Tree::Leaf(a), Tree::Leaf(b)) => Tree::Leaf((a, b)),
            (Tree::Tuple(a), Tree::Tuple(b)) => {
                Tree::Tuple(a.into_iter().zip(b).map(|(x, y)| x.zip_unchecked(y)).collect())
            }
            (Tree::List(a), Tree::List(b)) => {
                Tree::List(a.into_iter().zip(b).map(|(x, y)| x.zip_unchecked(y)).collect())
            }
            _ => unreachable!("shapes checked"),
        }
    }

    /// Rebuilds this shape with leaves drawn in order from `leaves`.
    pub fn fill<M>(&self, leaves: &mut dyn Iterator<Item = M>) -> Option<Tree<M>> {
        Some(match self {
            Tree::Leaf(_) => Tree::Leaf(leaves.next()?),
            Tree::Tuple(ts) => Tree::Tuple(ts.iter().map(|t| t.fill(leaves)).collect::<Option<_>>()?),
            Tree::List(ts) => Tree::List(ts.iter().map(|t| t.fill(leaves)).collect::<Option<_>>()?),
        })
    }
}

impl<A, B> Tree<(A, B)> {
    pub fn unzip(self) -> (Tree<A>, Tree<B>) {
        match self {
            Tree::Leaf((a, b)) => (Tree::Leaf(a), Tree::Leaf(b)),
            Tree::Tuple(ts) => {
                let (a, b): (Vec<_>, Vec<_>) = ts.into_iter().map(Tree::unzip).unzip();
                (Tree::Tuple(a), Tree::Tuple(b))
            }
            Tree::List(ts) => {
                let (a, b): (Vec<_>, Vec<_>) = ts.into_iter().map(Tree::unzip).unzip();
                (Tree::List(a), Tree::List(b))
            }
        }
    }
}

impl<L> From<Vec<L>> for Tree<L> {
    fn from(v: Vec<L>) -> Self {
        Tree::List(v.into_iter().map(Tree::Leaf).collect())
    }
}

/// Values made of qubits and bits: the arguments and results of circuit
/// functions.
pub trait QData: Sized {
    /// Visits every wire depth-first, left to right.
    fn for_each_endpoint(&self, f: &mut dyn FnMut(Endpoint));

    /// A value of the same shape whose wires are supplied by `next`.
    fn relabel(&self, next: &mut dyn FnMut(WireKind) -> WireId) -> Self;

    fn kinds(&self) -> Tree<WireKind>;

    fn endpoints(&self) -> Vec<Endpoint> {
        let mut out = Vec::new();
        self.for_each_endpoint(&mut |e| out.push(e));
        out
    }
}

impl QData for Qubit {
    fn for_each_endpoint(&self, f: &mut dyn FnMut(Endpoint)) {
        f(Endpoint::new(self.wire(), WireKind::Quantum))
    }
    fn relabel(&self, next: &mut dyn FnMut(WireKind) -> WireId) -> Self {
        Qubit::from_wire(next(WireKind::Quantum))
    }
    fn kinds(&self) -> Tree<WireKind> {
        Tree::Leaf(WireKind::Quantum)
    }
}

impl QData for Bit {
    fn for_each_endpoint(&self, f: &mut dyn FnMut(Endpoint)) {
        f(Endpoint::new(self.wire(), WireKind::Classical))
    }
    fn relabel(&self, next: &mut dyn FnMut(WireKind) -> WireId) -> Self {
        Bit::from_wire(next(WireKind::Classical))
    }
    fn kinds(&self) -> Tree<WireKind> {
        Tree::Leaf(WireKind::Classical)
    }
}

impl QData for () {
    fn for_each_endpoint(&self, _: &mut dyn FnMut(Endpoint)) {}
    fn relabel(&self, _: &mut dyn FnMut(WireKind) -> WireId) -> Self {}
    fn kinds(&self) -> Tree<WireKind> {
        Tree::unit()
    }
}

impl<A: QData, B: QData> QData for (A, B) {
    fn for_each_endpoint(&self, f: &mut dyn FnMut(Endpoint)) {
        self.0.for_each_endpoint(f);
        self.1.for_each_endpoint(f);
    }
    fn relabel(&self, next: &mut dyn FnMut(WireKind) -> WireId) -> Self {
        let a = self.0.relabel(next);
        (a, self.1.relabel(next))
    }
    fn kinds(&self) -> Tree<WireKind> {
        Tree::Tuple(vec![self.0.kinds(), self.1.kinds()])
    }
}

impl<A: QData, B: QData, C: QData> QData for (A, B, C) {
    fn for_each_endpoint(&self, f: &mut dyn FnMut(Endpoint)) {
        self.0.for_each_endpoint(f);
        self.1.for_each_endpoint(f);
        self.2.for_each_endpoint(f);
    }
    fn relabel(&self, next: &mut dyn FnMut(WireKind) -> WireId) -> Self {
        let a = self.0.relabel(next);
        let b = self.1.relabel(next);
        (a, b, self.2.relabel(next))
    }
    fn kinds(&self) -> Tree<WireKind> {
        Tree::Tuple(vec![self.0.kinds(), self.1.kinds(), self.2.kinds()])
    }
}

impl<T: QData> QData for Vec<T> {
    fn for_each_endpoint(&self, f: &mut dyn FnMut(Endpoint)) {
        self.iter().for_each(|x| x.for_each_endpoint(f))
    }
    fn relabel(&self, next: &mut dyn FnMut(WireKind) -> WireId) -> Self {
        self.iter().map(|x| x.relabel(next)).collect()
    }
    fn kinds(&self) -> Tree<WireKind> {
        Tree::List(self.iter().map(QData::kinds).collect())
    }
}

impl<T: QData> QData for Tree<T> {
    fn for_each_endpoint(&self, f: &mut dyn FnMut(Endpoint)) {
        self.for_each(&mut |x| x.for_each_endpoint(f))
    }
    fn relabel(&self, next: &mut dyn FnMut(WireKind) -> WireId) -> Self {
        self.map(&mut |x| x.relabel(next))
    }
    fn kinds(&self) -> Tree<WireKind> {
        match self {
            Tree::Leaf(x) => x.kinds(),
            Tree::Tuple(ts) => Tree::Tuple(ts.iter().map(QData::kinds).collect()),
            Tree::List(ts) => Tree::List(ts.iter().map(QData::kinds).collect()),
        }
    }
}

/// Labels for every wire of `data`: `name` for a single wire, `name[i]`
/// (recursively) for the elements of a tuple or list.
pub fn label_names<A: QData>(data: &A, name: &str) -> Vec<(WireId, String)> {
    fn walk(t: &Tree<WireKind>, prefix: String, names: &mut Vec<String>) {
        match t {
            Tree::Leaf(_) => names.push(prefix),
            Tree::Tuple(ts) | Tree::List(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    walk(t, format!("{prefix}[{i}]"), names);
                }
            }
        }
    }
    let mut names = Vec::new();
    walk(&data.kinds(), name.to_string(), &mut names);
    data.endpoints().into_iter().map(|e| e.wire).zip(names).collect()
}

/// A register of fresh qubits initialised to the given booleans.
pub fn qinit_shape(c: &mut Circ, values: &Tree<bool>) -> Result<Tree<Qubit>, BuildError> {
    values.clone().try_map(&mut |b| c.qinit(b))
}

/// The all-false boolean value of a shape.
pub fn qc_false<L>(shape: &Tree<L>) -> Tree<bool> {
    shape.map(&mut |_| false)
}

pub fn map_unary<X>(
    c: &mut Circ,
    f: &mut dyn FnMut(&mut Circ, X) -> Result<X, BuildError>,
    xs: Tree<X>,
) -> Result<Tree<X>, BuildError> {
    xs.try_map(&mut |x| f(c, x))
}

#[allow(clippy::type_complexity)]
pub fn map_binary<X, Y>(
    c: &mut Circ,
    f: &mut dyn FnMut(&mut Circ, X, Y) -> Result<(X, Y), BuildError>,
    xs: Tree<X>,
    ys: Tree<Y>,
) -> Result<(Tree<X>, Tree<Y>), BuildError> {
    let pairs = xs.zip(ys)?;
    Ok(pairs.try_map(&mut |(x, y)| f(c, x, y))?.unzip())
}

/// [`map_binary`] specialised to a quantum and a classical register.
#[allow(clippy::type_complexity)]
pub fn map_binary_c(
    c: &mut Circ,
    f: &mut dyn FnMut(&mut Circ, Qubit, Bit) -> Result<(Qubit, Bit), BuildError>,
    xs: Tree<Qubit>,
    ys: Tree<Bit>,
) -> Result<(Tree<Qubit>, Tree<Bit>), BuildError> {
    map_binary(c, f, xs, ys)
}

pub fn measure_shape(c: &mut Circ, xs: Tree<Qubit>) -> Result<Tree<Bit>, BuildError> {
    xs.try_map(&mut |q| c.measure(q))
}

pub fn cdiscard_shape(c: &mut Circ, xs: Tree<Bit>) -> Result<(), BuildError> {
    for b in xs.into_leaves() {
        c.cdiscard(b)?;
    }
    Ok(())
}

/// Fresh handles of the given shape. The wires are not live anywhere: the
/// result is only useful as a template for [`crate::builder::extract`].
pub fn template(kinds: &Tree<WireKind>) -> Tree<Endpoint> {
    kinds.map(&mut |k| Endpoint::new(WireId(u64::MAX), *k))
}

impl QData for Endpoint {
    fn for_each_endpoint(&self, f: &mut dyn FnMut(Endpoint)) {
        f(*self)
    }
    fn relabel(&self, next: &mut dyn FnMut(WireKind) -> WireId) -> Self {
        Endpoint::new(next(self.kind), self.kind)
    }
    fn kinds(&self) -> Tree<WireKind> {
        Tree::Leaf(self.kind)
    }
}

impl fmt::Display for Tree<WireKind> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tree(self, f, &mut |k, f| f.write_str(if *k == WireKind::Quantum { "q" } else { "c" }))
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tree(self, f, &mut |_, f| f.write_str("*"))
    }
}

fn write_tree<L: PartialEq>(
    t: &Tree<L>,
    f: &mut fmt::Formatter<'_>,
    leaf: &mut dyn FnMut(&L, &mut fmt::Formatter<'_>) -> fmt::Result,
) -> fmt::Result {
    match t {
        Tree::Leaf(l) => leaf(l, f),
        Tree::Tuple(ts) => {
            f.write_str("(")?;
            for (i, t) in ts.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write_tree(t, f, leaf)?;
            }
            f.write_str(")")
        }
        Tree::List(ts) => {
            if let Some(first) = ts.first() {
                if ts.len() > 1 && ts.iter().all(|t| t == first) {
                    f.write_str("[")?;
                    write_tree(first, f, leaf)?;
                    return write!(f, ";{}]", ts.len());
                }
            }
            f.write_str("[")?;
            for (i, t) in ts.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write_tree(t, f, leaf)?;
            }
            f.write_str("]")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("bad shape at column {column}: {message}")]
pub struct ShapeParseError {
    pub column: usize,
    pub message: String,
}

impl FromStr for Tree<WireKind> {
    type Err = ShapeParseError;

    /// Syntax: `q`, `c`, `(s1,...)`, `()`, `[s;n]`, `[s1,...]`, `[]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = ShapeParser { chars, pos: 0 };
        let t = p.tree()?;
        if p.pos != p.chars.len() {
            return Err(p.err("trailing input"));
        }
        Ok(t)
    }
}

struct ShapeParser {
    chars: Vec<char>,
    pos: usize,
}

impl ShapeParser {
    fn err(&self, message: &str) -> ShapeParseError {
        ShapeParseError { column: self.pos + 1, message: message.to_string() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn tree(&mut self) -> Result<Tree<WireKind>, ShapeParseError> {
        match self.peek() {
            Some('q') => {
                self.pos += 1;
                Ok(Tree::Leaf(WireKind::Quantum))
            }
            Some('c') => {
                self.pos += 1;
                Ok(Tree::Leaf(WireKind::Classical))
            }
            Some('(') => {
                self.pos += 1;
                let items = self.items(')')?;
                Ok(Tree::Tuple(items))
            }
            Some('[') => {
                self.pos += 1;
                if self.eat(']') {
                    return Ok(Tree::List(Vec::new()));
                }
                let first = self.tree()?;
                if self.eat(';') {
                    let start = self.pos;
                    while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        self.pos += 1;
                    }
                    let digits: String = self.chars[start..self.pos].iter().collect();
                    let n: usize = digits.parse().map_err(|_| self.err("expected a count"))?;
                    if !self.eat(']') {
                        return Err(self.err("expected ']'"));
                    }
                    return Ok(Tree::List(vec![first; n]));
                }
                let mut items = vec![first];
                while self.eat(',') {
                    items.push(self.tree()?);
                }
                if !self.eat(']') {
                    return Err(self.err("expected ']'"));
                }
                Ok(Tree::List(items))
            }
            _ => Err(self.err("expected q, c, '(' or '['")),
        }
    }

    fn items(&mut self, close: char) -> Result<Vec<Tree<WireKind>>, ShapeParseError> {
        let mut items = Vec::new();
        if self.eat(close) {
            return Ok(items);
        }
        loop {
            items.push(self.tree()?);
            if self.eat(close) {
                return Ok(items);
            }
            if !self.eat(',') {
                return Err(self.err(&format!("expected ',' or '{close}'")));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kinds() -> impl Strategy<Value = Tree<WireKind>> {
        let leaf = prop_oneof![
            Just(Tree::Leaf(WireKind::Quantum)),
            Just(Tree::Leaf(WireKind::Classical)),
        ];
        leaf.prop_recursive(4, 32, 4, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 0..4).prop_map(Tree::Tuple),
                prop::collection::vec(inner, 0..4).prop_map(Tree::List),
            ]
        })
    }

    #[test]
    fn parse_forms() {
        let t: Tree<WireKind> = "(q,[c;3],[],())".parse().unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t.to_string(), "(q,[c;3],[],())");
        let t: Tree<WireKind> = "[q, c]".parse().unwrap();
        assert_eq!(t.to_string(), "[q,c]");
        assert!("(q".parse::<Tree<WireKind>>().is_err());
        assert!("x".parse::<Tree<WireKind>>().is_err());
    }

    #[test]
    fn zip_reports_mismatch() {
        let a: Tree<WireKind> = "[q;2]".parse().unwrap();
        let b: Tree<WireKind> = "[q;3]".parse().unwrap();
        let e = a.zip(b).unwrap_err();
        assert_eq!(e.left, "[*;2]");
    }

    #[test]
    fn labels_index_lists() {
        let v = vec![Qubit::from_wire(WireId(4)), Qubit::from_wire(WireId(7))];
        let l = label_names(&v, "a");
        assert_eq!(l, vec![(WireId(4), "a[0]".to_string()), (WireId(7), "a[1]".to_string())]);
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(t in kinds()) {
            let s = t.to_string();
            let back: Tree<WireKind> = s.parse().unwrap();
            prop_assert_eq!(back, t);
        }

        #[test]
        fn fill_inverts_leaves(t in kinds()) {
            let leaves: Vec<WireKind> = t.leaves().into_iter().copied().collect();
            let back = t.fill(&mut leaves.into_iter()).unwrap();
            prop_assert_eq!(back, t);
        }
    }
}
