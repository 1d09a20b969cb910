//! Signed, directed, two-coloured graphs with totally ordered edges, and
//! formal rational linear combinations of them.
//!
//! Black vertices (colour `𝔠`) are labelled `1..=n`, white vertices (colour
//! `𝔬`) are labelled `1..=k`. Every edge starts at a black vertex. Two edge
//! orders of the same labelled graph are identified up to the sign of the
//! reordering permutation, so a graph is stored in a canonical form: edges
//! sorted lexicographically with black vertices before white ones. A graph
//! that repeats an identical directed edge equals minus itself and is zero.
//!
//! ```
//! use sfq::graph::{Graph, Vertex::*};
//!
//! // (2→3) < (1→2) sorts to (1→2) < (2→3) with one transposition.
//! let v = Graph::canonicalize(3, 0, &[(Black(2), Black(3)), (Black(1), Black(2))]).unwrap();
//! let (g, c) = v.iter().next().unwrap();
//! assert_eq!(g.edges(), &[(Black(1), Black(2)), (Black(2), Black(3))]);
//! assert_eq!(c.to_string(), "-1");
//! ```

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::perm;

/// Exact rational coefficients.
pub type Q = BigRational;

pub fn q(p: i64, r: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(r))
}

pub fn qi(p: i64) -> Q {
    Q::from_integer(BigInt::from(p))
}

/// A vertex. Black vertices sort before white ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    Black(u8),
    White(u8),
}

impl Vertex {
    pub fn is_black(self) -> bool {
        matches!(self, Vertex::Black(_))
    }
    pub fn label(self) -> u8 {
        match self {
            Vertex::Black(i) | Vertex::White(i) => i,
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Black(i) => write!(f, "b{i}"),
            Vertex::White(i) => write!(f, "w{i}"),
        }
    }
}

/// A directed edge `(tail, head)`.
pub type Edge = (Vertex, Vertex);

/// Output colour of an operation in the two-coloured operad.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Color {
    Closed,
    Open,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("edge {0}→{1} is a loop")]
    Loop(Vertex, Vertex),
    #[error("edge {0}→{1} starts at a white vertex")]
    WhiteTail(Vertex, Vertex),
    #[error("vertex {0} is out of range for a graph with {1} black and {2} white vertices")]
    OutOfRange(Vertex, u8, u8),
    #[error("permutation sizes ({0}, {1}) do not match bi-arity ({2}, {3})")]
    PermutationSize(usize, usize, u8, u8),
    #[error("not a permutation: {0:?}")]
    NotAPermutation(Vec<usize>),
    #[error("bi-arity mismatch: ({0}, {1}) vs ({2}, {3})")]
    ArityMismatch(u8, u8, u8, u8),
}

/// A canonical graph: edges strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Graph {
    nb: u8,
    nw: u8,
    edges: Vec<Edge>,
}

impl Graph {
    /// The edgeless graph.
    pub fn empty(nb: u8, nw: u8) -> Graph {
        Graph { nb, nw, edges: Vec::new() }
    }

    /// Validates a raw edge list and returns its canonical form as a vector:
    /// a single term with coefficient `±1`, or zero when an edge repeats.
    pub fn canonicalize(nb: u8, nw: u8, edges: &[Edge]) -> Result<GraphVector, GraphError> {
        for &(t, h) in edges {
            for v in [t, h] {
                let ok = match v {
                    Vertex::Black(i) => (1..=nb).contains(&i),
                    Vertex::White(j) => (1..=nw).contains(&j),
                };
                if !ok {
                    return Err(GraphError::OutOfRange(v, nb, nw));
                }
            }
            if t == h {
                return Err(GraphError::Loop(t, h));
            }
            if !t.is_black() {
                return Err(GraphError::WhiteTail(t, h));
            }
        }
        let color = if nw == 0 { Color::Closed } else { Color::Open };
        let mut v = GraphVector::zero(nb, nw, color);
        if let Some((g, neg)) = Graph::canon_unchecked(nb, nw, edges.to_vec()) {
            v.add_term(g, if neg { -Q::one() } else { Q::one() });
        }
        Ok(v)
    }

    /// Sorts `edges`; returns the graph and whether the sort was odd, or
    /// `None` for a repeated edge. Callers guarantee the other invariants.
    pub(crate) fn canon_unchecked(nb: u8, nw: u8, mut edges: Vec<Edge>) -> Option<(Graph, bool)> {
        let neg = perm::odd_inversions(&edges);
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some((Graph { nb, nw, edges }, neg))
    }

    pub fn n_black(&self) -> u8 {
        self.nb
    }
    pub fn n_white(&self) -> u8 {
        self.nw
    }
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
    /// Degree in the graded operad: minus the number of edges.
    pub fn degree(&self) -> i64 {
        -(self.edges.len() as i64)
    }

    /// Relabels vertices through `f` (which may change colours and the
    /// vertex counts) and re-canonicalizes.
    pub fn map_vertices(&self, nb: u8, nw: u8, f: impl Fn(Vertex) -> Vertex) -> Option<(Graph, bool)> {
        let edges = self.edges.iter().map(|&(t, h)| (f(t), f(h))).collect();
        Graph::canon_unchecked(nb, nw, edges)
    }

    /// Acts by `(σ, τ) ∈ S_n × S_k`: black `j ↦ σ(j)`, white `j ↦ τ(j)`.
    pub fn act(&self, black: &[usize], white: &[usize]) -> (Graph, bool) {
        self.map_vertices(self.nb, self.nw, |v| match v {
            Vertex::Black(i) => Vertex::Black(black[i as usize - 1] as u8),
            Vertex::White(j) => Vertex::White(white[j as usize - 1] as u8),
        })
        .expect("relabelling is a bijection and cannot create repeated edges")
    }

    fn index(&self, v: Vertex) -> usize {
        match v {
            Vertex::Black(i) => i as usize - 1,
            Vertex::White(j) => self.nb as usize + j as usize - 1,
        }
    }

    /// Connectivity of the underlying undirected graph on all vertices.
    /// The graph with no vertices counts as connected.
    pub fn is_connected(&self) -> bool {
        let n = self.nb as usize + self.nw as usize;
        if n <= 1 {
            return true;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut components = n;
        for &(t, h) in &self.edges {
            let (a, b) = (find(&mut parent, self.index(t)), find(&mut parent, self.index(h)));
            if a != b {
                parent[a] = b;
                components -= 1;
            }
        }
        components == 1
    }

    /// Total valency (in + out) of a vertex.
    pub fn valency(&self, v: Vertex) -> usize {
        self.edges.iter().filter(|&&(t, h)| t == v || h == v).count()
    }

    /// A pike is a univalent black vertex whose only edge points into it.
    pub fn is_pike(&self, i: u8) -> bool {
        let v = Vertex::Black(i);
        let mut incident = self.edges.iter().filter(|&&(t, h)| t == v || h == v);
        matches!((incident.next(), incident.next()), (Some(&(_, h)), None) if h == v)
    }

    pub fn count_pikes(&self) -> usize {
        (1..=self.nb).filter(|&i| self.is_pike(i)).count()
    }

    /// In-degree of each white vertex, in label order.
    pub fn white_valencies(&self) -> Vec<usize> {
        let mut val = vec![0; self.nw as usize];
        for &(_, h) in &self.edges {
            if let Vertex::White(j) = h {
                val[j as usize - 1] += 1;
            }
        }
        val
    }

    pub fn whites_univalent(&self) -> bool {
        self.white_valencies().iter().all(|&v| v == 1)
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "nb={} nw={} edges=", self.nb, self.nw)?;
        for (i, (t, h)) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}>{h}")?;
        }
        Ok(())
    }
}

/// A finite rational linear combination of canonical graphs sharing one
/// bi-arity and output colour. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GraphVector {
    nb: u8,
    nw: u8,
    color: Color,
    terms: BTreeMap<Graph, Q>,
}

impl GraphVector {
    pub fn zero(nb: u8, nw: u8, color: Color) -> GraphVector {
        assert!(nw == 0 || color == Color::Open, "closed-colour vectors have no white vertices");
        GraphVector { nb, nw, color, terms: BTreeMap::new() }
    }

    /// The vector `coeff · g` in output colour `color`.
    pub fn single(g: Graph, coeff: Q, color: Color) -> GraphVector {
        let mut v = GraphVector::zero(g.nb, g.nw, color);
        v.add_term(g, coeff);
        v
    }

    pub fn n_black(&self) -> u8 {
        self.nb
    }
    pub fn n_white(&self) -> u8 {
        self.nw
    }
    pub fn color(&self) -> Color {
        self.color
    }
    /// Same graphs, different output colour (only legal without whites or
    /// when switching to open).
    pub fn with_color(mut self, color: Color) -> GraphVector {
        assert!(self.nw == 0 || color == Color::Open);
        self.color = color;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn iter(&self) -> impl Iterator<Item = (&Graph, &Q)> {
        self.terms.iter()
    }
    pub fn graphs(&self) -> impl Iterator<Item = &Graph> {
        self.terms.keys()
    }
    pub fn coeff(&self, g: &Graph) -> Q {
        self.terms.get(g).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, g: Graph, c: Q) {
        debug_assert_eq!((g.nb, g.nw), (self.nb, self.nw));
        if c.is_zero() {
            return;
        }
        match self.terms.entry(g) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Adds `c · g` where `g` carries a pending sign.
    pub(crate) fn add_signed(&mut self, g: Graph, neg: bool, c: &Q) {
        self.add_term(g, if neg { -c.clone() } else { c.clone() });
    }

    pub fn add_scaled(&mut self, other: &GraphVector, c: &Q) {
        assert_eq!(
            (self.nb, self.nw),
            (other.nb, other.nw),
            "adding vectors of different bi-arity"
        );
        if c.is_zero() {
            return;
        }
        for (g, x) in &other.terms {
            self.add_term(g.clone(), x * c);
        }
    }

    pub fn scaled(&self, c: &Q) -> GraphVector {
        let mut out = GraphVector::zero(self.nb, self.nw, self.color);
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(g, x)| (g.clone(), x * c)).collect();
        }
        out
    }

    /// Applies a per-graph linear map producing terms of bi-arity `(nb, nw)`.
    pub fn map_graphs(
        &self,
        nb: u8,
        nw: u8,
        color: Color,
        mut f: impl FnMut(&Graph) -> Option<(Graph, bool)>,
    ) -> GraphVector {
        let mut out = GraphVector::zero(nb, nw, color);
        for (g, c) in &self.terms {
            if let Some((h, neg)) = f(g) {
                out.add_signed(h, neg, c);
            }
        }
        out
    }

    /// Keeps only the terms satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Graph) -> bool) -> GraphVector {
        GraphVector {
            nb: self.nb,
            nw: self.nw,
            color: self.color,
            terms: self.terms.iter().filter(|(g, _)| keep(g)).map(|(g, c)| (g.clone(), c.clone())).collect(),
        }
    }

    /// Acts by `(σ, τ) ∈ S_n × S_k` on every term.
    pub fn act(&self, black: &[usize], white: &[usize]) -> Result<GraphVector, GraphError> {
        if black.len() != self.nb as usize || white.len() != self.nw as usize {
            return Err(GraphError::PermutationSize(black.len(), white.len(), self.nb, self.nw));
        }
        for p in [black, white] {
            if !perm::is_permutation(p) {
                return Err(GraphError::NotAPermutation(p.to_vec()));
            }
        }
        Ok(self.act_unchecked(black, white))
    }

    pub(crate) fn act_unchecked(&self, black: &[usize], white: &[usize]) -> GraphVector {
        self.map_graphs(self.nb, self.nw, self.color, |g| Some(g.act(black, white)))
    }

    /// Acts on black labels only.
    pub fn act_black(&self, black: &[usize]) -> GraphVector {
        self.act_unchecked(black, &perm::identity(self.nw as usize))
    }

    /// Acts on white labels only.
    pub fn act_white(&self, white: &[usize]) -> GraphVector {
        self.act_unchecked(&perm::identity(self.nb as usize), white)
    }

    /// Edge counts that occur, smallest first.
    pub fn edge_counts(&self) -> Vec<usize> {
        let mut e: Vec<usize> = self.terms.keys().map(Graph::edge_count).collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    pub fn all_connected(&self) -> bool {
        self.terms.keys().all(Graph::is_connected)
    }

    /// The part consisting of graphs with exactly `r` pikes.
    pub fn with_pikes(&self, r: usize) -> GraphVector {
        self.filter(|g| g.count_pikes() == r)
    }

    /// Largest pike count among the terms.
    pub fn max_pikes(&self) -> usize {
        self.terms.keys().map(Graph::count_pikes).max().unwrap_or(0)
    }

    /// `true` if invariant under every relabelling of black vertices.
    pub fn is_black_symmetric(&self) -> bool {
        adjacent_transpositions(self.nb as usize).all(|s| self.act_black(&s) == *self)
    }

    /// `true` if every relabelling `τ` of white vertices scales by `sign(τ)`.
    pub fn is_white_antisymmetric(&self) -> bool {
        adjacent_transpositions(self.nw as usize).all(|s| self.act_white(&s) == self.scaled(&-Q::one()))
    }

    /// Largest absolute numerator/denominator size in bits, for reporting.
    pub fn max_coeff_bits(&self) -> u64 {
        self.terms
            .values()
            .map(|c| c.numer().abs().bits().max(c.denom().bits()))
            .max()
            .unwrap_or(0)
    }
}

/// Adjacent transpositions generate the symmetric group, so they suffice for
/// invariance checks.
fn adjacent_transpositions(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1..n).map(move |i| {
        let mut p = perm::identity(n);
        p.swap(i - 1, i);
        p
    })
}

impl std::ops::AddAssign<&GraphVector> for GraphVector {
    fn add_assign(&mut self, rhs: &GraphVector) {
        self.add_scaled(rhs, &Q::one());
    }
}

impl std::ops::SubAssign<&GraphVector> for GraphVector {
    fn sub_assign(&mut self, rhs: &GraphVector) {
        self.add_scaled(rhs, &-Q::one());
    }
}

impl std::ops::Add<&GraphVector> for &GraphVector {
    type Output = GraphVector;
    fn add(self, rhs: &GraphVector) -> GraphVector {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl std::ops::Sub<&GraphVector> for &GraphVector {
    type Output = GraphVector;
    fn sub(self, rhs: &GraphVector) -> GraphVector {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl std::ops::Neg for &GraphVector {
    type Output = GraphVector;
    fn neg(self) -> GraphVector {
        self.scaled(&-Q::one())
    }
}

impl fmt::Display for GraphVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (g, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{g} coeff={}", fmt_q(c))?;
        }
        Ok(())
    }
}

/// `p/q` in lowest terms with the sign on `p`, always with a denominator.
pub fn fmt_q(c: &Q) -> String {
    format!("{}/{}", c.numer(), c.denom())
}

/// Parses `p/q` or `p` into a reduced rational.
pub fn parse_q(s: &str) -> Option<Q> {
    let (p, d) = match s.split_once('/') {
        Some((p, d)) => (p.parse::<BigInt>().ok()?, d.parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if d.is_zero() || d.is_negative() {
        return None;
    }
    Some(Q::new(p, d))
}
