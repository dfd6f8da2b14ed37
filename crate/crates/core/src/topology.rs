//! Structural model of the balanced hypercube `BH_n`.
//!
//! Vertices are digit strings `x0 x1 .. x(n-1)` over `{0,1,2,3}`. Every vertex
//! has two neighbors per dimension: `x^{0±}` changes only digit 0 by ±1, and
//! `x^{j±}` (j ≥ 1) changes digit 0 by ±1 and digit j by `+1` when `x0` is even
//! or `-1` when `x0` is odd.

use serde::de::{self, Deserializer};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Largest supported dimension; `4^15` codes still fit in a `u32`.
pub const MAX_DIMENSION: usize = 15;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("dimension {n} is outside 1..={MAX_DIMENSION}")]
    UnsupportedDimension { n: usize },
    #[error("dimension index {j} out of range for BH_{n}")]
    DimensionOutOfRange { j: usize, n: usize },
    #[error("invalid digit {digit} in vertex label")]
    InvalidDigit { digit: char },
    #[error("vertex {label} has length {len}, expected {n}")]
    WrongLength { label: String, len: usize, n: usize },
    #[error("{a} and {b} are not adjacent")]
    NotAnEdge { a: String, b: String },
    #[error("automorphisms acting on digit 0 are not supported (digit {d})")]
    DigitZero { d: usize },
    #[error("partition along dimension 0 is not implemented")]
    PartitionDimensionZero,
    #[error("BH_{n} cannot be partitioned (needs n >= 2)")]
    PartitionTooSmall { n: usize },
}

/// Side of the bipartition. `Even` vertices have leftmost digit 0 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// Direction of a neighbor step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

/// A vertex of `BH_n`, packed as base-4 code with digit 0 most significant so
/// that numeric order equals lexicographic order of the digit string.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    code: u32,
    n: u8,
}

impl Vertex {
    pub fn new(digits: &[u8]) -> Result<Vertex, TopologyError> {
        let n = digits.len();
        if n == 0 || n > MAX_DIMENSION {
            return Err(TopologyError::UnsupportedDimension { n });
        }
        let mut code = 0u32;
        for &d in digits {
            if d > 3 {
                return Err(TopologyError::InvalidDigit {
                    digit: char::from(b'0' + d.min(9)),
                });
            }
            code = (code << 2) | u32::from(d);
        }
        Ok(Vertex { code, n: n as u8 })
    }

    /// Builds a vertex from its packed code. Panics if the code is out of range.
    pub fn from_code(n: usize, code: u32) -> Vertex {
        assert!((1..=MAX_DIMENSION).contains(&n), "dimension {n} unsupported");
        assert!(u64::from(code) < 1u64 << (2 * n), "code {code} too large for BH_{n}");
        Vertex { code, n: n as u8 }
    }

    pub fn parse(label: &str, n: usize) -> Result<Vertex, TopologyError> {
        let v: Vertex = label.parse()?;
        if v.n() != n {
            return Err(TopologyError::WrongLength {
                label: label.to_string(),
                len: v.n(),
                n,
            });
        }
        Ok(v)
    }

    pub fn n(self) -> usize {
        usize::from(self.n)
    }

    pub fn code(self) -> u32 {
        self.code
    }

    pub fn digit(self, i: usize) -> u8 {
        debug_assert!(i < self.n());
        ((self.code >> (2 * (self.n() - 1 - i))) & 3) as u8
    }

    pub fn with_digit(self, i: usize, d: u8) -> Vertex {
        debug_assert!(i < self.n() && d < 4);
        let shift = 2 * (self.n() - 1 - i);
        let code = (self.code & !(3 << shift)) | (u32::from(d) << shift);
        Vertex { code, n: self.n }
    }

    pub fn digits(self) -> Vec<u8> {
        (0..self.n()).map(|i| self.digit(i)).collect()
    }

    pub fn parity(self) -> Parity {
        if self.digit(0).is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_even(self) -> bool {
        self.parity() == Parity::Even
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n() {
            write!(f, "{}", self.digit(i))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for Vertex {
    type Err = TopologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut digits = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match ch.to_digit(10) {
                Some(d) if d < 4 => digits.push(d as u8),
                _ => return Err(TopologyError::InvalidDigit { digit: ch }),
            }
        }
        Vertex::new(&digits)
    }
}

impl Serialize for Vertex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Vertex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Raw neighbor computation on packed codes; shared by the graph type and the
/// search kernels.
pub fn neighbor_code(n: usize, code: u32, j: usize, sign: Sign) -> u32 {
    let top = 2 * (n - 1);
    let a0 = (code >> top) & 3;
    let b0 = match sign {
        Sign::Plus => (a0 + 1) & 3,
        Sign::Minus => (a0 + 3) & 3,
    };
    let mut out = (code & !(3 << top)) | (b0 << top);
    if j > 0 {
        let shift = 2 * (n - 1 - j);
        let aj = (code >> shift) & 3;
        let bj = if a0.is_multiple_of(2) { (aj + 1) & 3 } else { (aj + 3) & 3 };
        out = (out & !(3 << shift)) | (bj << shift);
    }
    out
}

/// An undirected edge stored with the lexicographically smaller endpoint first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    a: Vertex,
    b: Vertex,
    dim: u8,
}

impl Edge {
    /// Canonical edge between two adjacent vertices of the same `BH_n`.
    pub fn new(x: Vertex, y: Vertex) -> Result<Edge, TopologyError> {
        let not_edge = || TopologyError::NotAnEdge {
            a: x.to_string(),
            b: y.to_string(),
        };
        if x.n() != y.n() || x == y {
            return Err(not_edge());
        }
        let dim = edge_dimension_of(x, y).ok_or_else(not_edge)?;
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        Ok(Edge { a, b, dim: dim as u8 })
    }

    pub fn a(&self) -> Vertex {
        self.a
    }

    pub fn b(&self) -> Vertex {
        self.b
    }

    pub fn endpoints(&self) -> (Vertex, Vertex) {
        (self.a, self.b)
    }

    pub fn dimension(&self) -> usize {
        usize::from(self.dim)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.a == v || self.b == v
    }

    /// The endpoint opposite to `v`. Panics if `v` is not an endpoint.
    pub fn other(&self, v: Vertex) -> Vertex {
        if v == self.a {
            self.b
        } else {
            assert_eq!(v, self.b, "{v} is not an endpoint of {self}");
            self.a
        }
    }

    /// The even endpoint followed by the odd one.
    pub fn oriented(&self) -> (Vertex, Vertex) {
        if self.a.is_even() {
            (self.a, self.b)
        } else {
            (self.b, self.a)
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?},{:?}]", self.a, self.b)
    }
}

impl Serialize for Edge {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(2)?;
        t.serialize_element(&self.a)?;
        t.serialize_element(&self.b)?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for Edge {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (x, y) = <(Vertex, Vertex)>::deserialize(deserializer)?;
        Edge::new(x, y).map_err(de::Error::custom)
    }
}

fn edge_dimension_of(x: Vertex, y: Vertex) -> Option<usize> {
    let n = x.n();
    (0..n).find(|&j| {
        let p = neighbor_code(n, x.code, j, Sign::Plus);
        let m = neighbor_code(n, x.code, j, Sign::Minus);
        p == y.code || m == y.code
    })
}

/// The graph `BH_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BalancedHypercube {
    n: usize,
}

impl BalancedHypercube {
    pub fn new(n: usize) -> Result<Self, TopologyError> {
        if !(1..=MAX_DIMENSION).contains(&n) {
            return Err(TopologyError::UnsupportedDimension { n });
        }
        Ok(BalancedHypercube { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        1usize << (2 * self.n)
    }

    pub fn degree(&self) -> usize {
        2 * self.n
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v.n() == self.n
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.vertex_count() as u32).map(move |c| Vertex::from_code(self.n, c))
    }

    pub fn vertex(&self, label: &str) -> Result<Vertex, TopologyError> {
        Vertex::parse(label, self.n)
    }

    fn check(&self, v: Vertex) -> Result<(), TopologyError> {
        if v.n() != self.n {
            return Err(TopologyError::WrongLength {
                label: v.to_string(),
                len: v.n(),
                n: self.n,
            });
        }
        Ok(())
    }

    pub fn neighbor(&self, v: Vertex, j: usize, sign: Sign) -> Result<Vertex, TopologyError> {
        self.check(v)?;
        if j >= self.n {
            return Err(TopologyError::DimensionOutOfRange { j, n: self.n });
        }
        Ok(Vertex::from_code(self.n, neighbor_code(self.n, v.code, j, sign)))
    }

    /// All `2n` neighbors in the order `x^{0+}, x^{0-}, x^{1+}, ...`.
    pub fn neighbors(&self, v: Vertex) -> Vec<Vertex> {
        debug_assert!(self.contains(v));
        let mut out = Vec::with_capacity(2 * self.n);
        for j in 0..self.n {
            for sign in [Sign::Plus, Sign::Minus] {
                out.push(Vertex::from_code(self.n, neighbor_code(self.n, v.code, j, sign)));
            }
        }
        out
    }

    pub fn shadow(&self, v: Vertex) -> Vertex {
        v.with_digit(0, (v.digit(0) + 2) % 4)
    }

    pub fn is_edge(&self, x: Vertex, y: Vertex) -> bool {
        x.n() == self.n && y.n() == self.n && edge_dimension_of(x, y).is_some()
    }

    pub fn edge(&self, x: Vertex, y: Vertex) -> Result<Edge, TopologyError> {
        self.check(x)?;
        self.check(y)?;
        Edge::new(x, y)
    }

    pub fn edge_dimension(&self, x: Vertex, y: Vertex) -> Result<usize, TopologyError> {
        Ok(self.edge(x, y)?.dimension())
    }

    /// Every edge exactly once, in lexicographic order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.vertex_count() * self.n);
        for v in self.vertices() {
            for w in self.neighbors(v) {
                if v < w {
                    out.push(Edge::new(v, w).expect("neighbors are adjacent"));
                }
            }
        }
        out.sort();
        out
    }
}

/// A label-level automorphism of `BH_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Automorphism {
    /// Adds `c` (mod 4) to digit `d`.
    DigitShift { d: usize, c: u8 },
    /// Exchanges digits `a` and `b`.
    SwapDigits { a: usize, b: usize },
}

impl Automorphism {
    pub fn digit_shift(h: &BalancedHypercube, d: usize, c: u8) -> Result<Self, TopologyError> {
        if d == 0 {
            return Err(TopologyError::DigitZero { d });
        }
        if d >= h.n() {
            return Err(TopologyError::DimensionOutOfRange { j: d, n: h.n() });
        }
        Ok(Automorphism::DigitShift { d, c: c % 4 })
    }

    pub fn swap_digits(h: &BalancedHypercube, a: usize, b: usize) -> Result<Self, TopologyError> {
        for d in [a, b] {
            if d == 0 {
                return Err(TopologyError::DigitZero { d });
            }
            if d >= h.n() {
                return Err(TopologyError::DimensionOutOfRange { j: d, n: h.n() });
            }
        }
        Ok(Automorphism::SwapDigits { a, b })
    }

    pub fn apply(&self, v: Vertex) -> Vertex {
        match *self {
            Automorphism::DigitShift { d, c } => v.with_digit(d, (v.digit(d) + c) % 4),
            Automorphism::SwapDigits { a, b } => {
                let (da, db) = (v.digit(a), v.digit(b));
                v.with_digit(a, db).with_digit(b, da)
            }
        }
    }

    pub fn apply_edge(&self, e: &Edge) -> Edge {
        Edge::new(self.apply(e.a()), self.apply(e.b())).expect("automorphism preserves adjacency")
    }

    pub fn inverse(&self) -> Automorphism {
        match *self {
            Automorphism::DigitShift { d, c } => Automorphism::DigitShift { d, c: (4 - c) % 4 },
            swap => swap,
        }
    }
}

/// A composition of automorphisms, applied left to right.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Relabeling {
    steps: Vec<Automorphism>,
}

impl Relabeling {
    pub fn identity() -> Self {
        Relabeling::default()
    }

    pub fn then(mut self, step: Automorphism) -> Self {
        self.steps.push(step);
        self
    }

    pub fn steps(&self) -> &[Automorphism] {
        &self.steps
    }

    pub fn apply(&self, v: Vertex) -> Vertex {
        self.steps.iter().fold(v, |acc, s| s.apply(acc))
    }

    pub fn apply_edge(&self, e: &Edge) -> Edge {
        Edge::new(self.apply(e.a()), self.apply(e.b())).expect("automorphism preserves adjacency")
    }

    pub fn inverse(&self) -> Relabeling {
        Relabeling {
            steps: self.steps.iter().rev().map(Automorphism::inverse).collect(),
        }
    }
}

/// The four blocks of `BH_n` obtained by deleting the `j`-dimensional edges.
///
/// Block `i` is the set of vertices whose digit `j` equals `i`; dropping that
/// digit is an isomorphism onto `BH_{n-1}`. Both `j`-dimensional neighbors of a
/// vertex lie in the same adjacent block: block `i+1` for even vertices and
/// block `i-1` for odd ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionView {
    n: usize,
    j: usize,
}

impl PartitionView {
    pub fn new(h: &BalancedHypercube, j: usize) -> Result<Self, TopologyError> {
        if h.n() < 2 {
            return Err(TopologyError::PartitionTooSmall { n: h.n() });
        }
        if j == 0 {
            return Err(TopologyError::PartitionDimensionZero);
        }
        if j >= h.n() {
            return Err(TopologyError::DimensionOutOfRange { j, n: h.n() });
        }
        Ok(PartitionView { n: h.n(), j })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.j
    }

    pub fn block_of(&self, v: Vertex) -> u8 {
        v.digit(self.j)
    }

    /// Image of `v` in `BH_{n-1}` (digit `j` removed).
    pub fn project(&self, v: Vertex) -> Vertex {
        let digits: Vec<u8> = (0..self.n).filter(|&i| i != self.j).map(|i| v.digit(i)).collect();
        Vertex::new(&digits).expect("projected digits are valid")
    }

    /// Inverse of [`project`](Self::project) for block `i`.
    pub fn lift(&self, i: u8, w: Vertex) -> Vertex {
        debug_assert_eq!(w.n() + 1, self.n);
        let mut digits = w.digits();
        digits.insert(self.j, i);
        Vertex::new(&digits).expect("lifted digits are valid")
    }

    pub fn block_vertices(&self, i: u8) -> Vec<Vertex> {
        let sub = BalancedHypercube { n: self.n - 1 };
        sub.vertices().map(|w| self.lift(i, w)).collect()
    }

    /// The two `j`-dimensional neighbors `v^{j+}` and `v^{j-}`.
    pub fn crossing(&self, v: Vertex) -> [Vertex; 2] {
        [
            Vertex::from_code(self.n, neighbor_code(self.n, v.code, self.j, Sign::Plus)),
            Vertex::from_code(self.n, neighbor_code(self.n, v.code, self.j, Sign::Minus)),
        ]
    }

    /// Block holding both crossing neighbors of `v`.
    pub fn crossing_block(&self, v: Vertex) -> u8 {
        let i = self.block_of(v);
        if v.is_even() {
            (i + 1) % 4
        } else {
            (i + 3) % 4
        }
    }

    pub fn is_crossing(&self, e: &Edge) -> bool {
        e.dimension() == self.j
    }
}
