//! Operadic insertions in the two-coloured graph operad and its
//! distinguished vectors.
//!
//! Inserting a graph into a vertex deletes the vertex, splices in the inner
//! graph and sums over all ways of reattaching the edge endpoints that were
//! at the deleted vertex to vertices of the inner graph. The edges of the
//! result are ordered "outer edges first, then inner edges", which makes the
//! insertions into a graded operad with the usual Koszul signs.

use num_traits::One;

use crate::graph::{Color, Edge, Graph, GraphVector, Q, Vertex};
use crate::perm;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InsertError {
    #[error("slot {slot} out of range 1..={max}")]
    SlotOutOfRange { slot: usize, max: usize },
    #[error("a black vertex can only receive graphs without white vertices (got {0} white)")]
    InnerHasWhites(u8),
    #[error("white insertion needs an open-coloured outer vector")]
    OuterNotOpen,
    #[error("input is not invariant under relabelling of black vertices")]
    NotInvariant,
}

/// Sum over all reattachments: every endpoint listed in `slots` (edge index,
/// is-head) independently picks one of `targets`.
fn reattach(edges: &mut Vec<Edge>, slots: &[(usize, bool)], targets: &[Vertex], out: &mut Vec<Vec<Edge>>) {
    fn rec(i: usize, edges: &mut Vec<Edge>, slots: &[(usize, bool)], targets: &[Vertex], out: &mut Vec<Vec<Edge>>) {
        if i == slots.len() {
            out.push(edges.clone());
            return;
        }
        let (e, head) = slots[i];
        for &t in targets {
            if head {
                edges[e].1 = t;
            } else {
                edges[e].0 = t;
            }
            rec(i + 1, edges, slots, targets, out);
        }
    }
    rec(0, edges, slots, targets, out);
}

/// Graph-level `outer ∘_{i,𝔠} inner`.
pub fn insert_black_graph(outer: &Graph, i: u8, inner: &Graph) -> Vec<(Graph, bool)> {
    let n_in = inner.n_black();
    let nb = outer.n_black() + n_in - 1;
    let relabel_outer = |v: Vertex| match v {
        Vertex::Black(j) if j > i => Vertex::Black(j + n_in - 1),
        v => v,
    };
    let mut edges: Vec<Edge> = Vec::with_capacity(outer.edge_count() + inner.edge_count());
    let mut slots = Vec::new();
    for (idx, &(t, h)) in outer.edges().iter().enumerate() {
        if t == Vertex::Black(i) {
            slots.push((idx, false));
        }
        if h == Vertex::Black(i) {
            slots.push((idx, true));
        }
        edges.push((relabel_outer(t), relabel_outer(h)));
    }
    for &(t, h) in inner.edges() {
        let shift = |v: Vertex| match v {
            Vertex::Black(a) => Vertex::Black(a + i - 1),
            w => w,
        };
        edges.push((shift(t), shift(h)));
    }
    let targets: Vec<Vertex> = (i..i + n_in).map(Vertex::Black).collect();
    let mut raw = Vec::new();
    reattach(&mut edges, &slots, &targets, &mut raw);
    raw.into_iter()
        .filter_map(|e| Graph::canon_unchecked(nb, outer.n_white(), e))
        .collect()
}

/// Graph-level `outer ∘_{i,𝔬} inner`.
pub fn insert_white_graph(outer: &Graph, i: u8, inner: &Graph) -> Vec<(Graph, bool)> {
    let (n, k_in, n_in) = (outer.n_black(), inner.n_white(), inner.n_black());
    let nw = outer.n_white() + k_in - 1;
    let relabel_outer = |v: Vertex| match v {
        Vertex::White(j) if j > i => Vertex::White(j + k_in - 1),
        v => v,
    };
    let mut edges: Vec<Edge> = Vec::with_capacity(outer.edge_count() + inner.edge_count());
    let mut slots = Vec::new();
    for (idx, &(t, h)) in outer.edges().iter().enumerate() {
        if h == Vertex::White(i) {
            slots.push((idx, true));
        }
        edges.push((relabel_outer(t), relabel_outer(h)));
    }
    let shift = |v: Vertex| match v {
        Vertex::Black(a) => Vertex::Black(a + n),
        Vertex::White(b) => Vertex::White(b + i - 1),
    };
    for &(t, h) in inner.edges() {
        edges.push((shift(t), shift(h)));
    }
    let targets: Vec<Vertex> = (1..=n_in)
        .map(|a| Vertex::Black(a + n))
        .chain((1..=k_in).map(|b| Vertex::White(b + i - 1)))
        .collect();
    let mut raw = Vec::new();
    reattach(&mut edges, &slots, &targets, &mut raw);
    raw.into_iter()
        .filter_map(|e| Graph::canon_unchecked(n + n_in, nw, e))
        .collect()
}

/// `outer ∘_{i,𝔠} inner`: inserts a graph without white vertices into the
/// black vertex `i`. Inner black labels become `i..i+n'-1`.
pub fn insert_black(outer: &GraphVector, i: usize, inner: &GraphVector) -> Result<GraphVector, InsertError> {
    if i == 0 || i > outer.n_black() as usize {
        return Err(InsertError::SlotOutOfRange { slot: i, max: outer.n_black() as usize });
    }
    if inner.n_white() != 0 {
        return Err(InsertError::InnerHasWhites(inner.n_white()));
    }
    let nb = outer.n_black() + inner.n_black() - 1;
    let mut out = GraphVector::zero(nb, outer.n_white(), outer.color());
    for (g, a) in outer.iter() {
        for (h, b) in inner.iter() {
            let c = a * b;
            for (r, neg) in insert_black_graph(g, i as u8, h) {
                out.add_signed(r, neg, &c);
            }
        }
    }
    Ok(out)
}

/// `outer ∘_{i,𝔬} inner`: inserts into the white vertex `i`. Inner whites take
/// labels `i..i+k'-1`; inner blacks are appended after the outer ones.
pub fn insert_white(outer: &GraphVector, i: usize, inner: &GraphVector) -> Result<GraphVector, InsertError> {
    if outer.color() != Color::Open {
        return Err(InsertError::OuterNotOpen);
    }
    if i == 0 || i > outer.n_white() as usize {
        return Err(InsertError::SlotOutOfRange { slot: i, max: outer.n_white() as usize });
    }
    let nb = outer.n_black() + inner.n_black();
    let nw = outer.n_white() + inner.n_white() - 1;
    let mut out = GraphVector::zero(nb, nw, Color::Open);
    for (g, a) in outer.iter() {
        for (h, b) in inner.iter() {
            let c = a * b;
            for (r, neg) in insert_white_graph(g, i as u8, h) {
                out.add_signed(r, neg, &c);
            }
        }
    }
    Ok(out)
}

/// `Γ_{•–•} = (1→2) + (2→1)` in closed colour.
pub fn gamma_edge() -> GraphVector {
    let mut v = GraphVector::zero(2, 0, Color::Closed);
    for (t, h) in [(1, 2), (2, 1)] {
        let (g, _) = Graph::canon_unchecked(2, 0, vec![(Vertex::Black(t), Vertex::Black(h))]).unwrap();
        v.add_term(g, Q::one());
    }
    v
}

/// Two isolated black vertices.
pub fn gamma_bb() -> GraphVector {
    GraphVector::single(Graph::empty(2, 0), Q::one(), Color::Closed)
}

/// Two isolated white vertices.
pub fn gamma_ww() -> GraphVector {
    GraphVector::single(Graph::empty(0, 2), Q::one(), Color::Open)
}

/// The broom graph: one black vertex with edges to `k` white vertices,
/// ordered by the white label.
pub fn broom_graph(k: u8) -> Graph {
    let edges = (1..=k).map(|j| (Vertex::Black(1), Vertex::White(j))).collect();
    Graph::canon_unchecked(1, k, edges).unwrap().0
}

pub fn broom(k: u8) -> GraphVector {
    GraphVector::single(broom_graph(k), Q::one(), Color::Open)
}

/// Symmetrizes over all relabellings of black vertices (no normalization).
pub fn symmetrize_black(v: &GraphVector) -> GraphVector {
    let mut out = GraphVector::zero(v.n_black(), v.n_white(), v.color());
    for s in perm::all(v.n_black() as usize) {
        out += &v.act_black(&s);
    }
    out
}

/// Vertex splitting `Σ_{τ∈Sh(2,n-1)} (τ, id)(g ∘_{1,𝔠} Γ_{•–•})` and the
/// one-vertex attachments `Σ_i (σ_{n+1,i}, id)(Γ^br_1 ∘_{1,𝔬} g)`.
fn split_and_antennas(g: &GraphVector) -> (GraphVector, GraphVector) {
    let n = g.n_black() as usize;
    let closed = g.clone().with_color(Color::Closed);
    let mut split = GraphVector::zero(n as u8 + 1, 0, Color::Closed);
    let one = insert_black(&closed, 1, &gamma_edge()).expect("slot 1 exists");
    for tau in perm::shuffles(2, n - 1) {
        split += &one.act_black(&tau);
    }
    let one = insert_white(&broom(1), 1, &g.clone().with_color(Color::Open)).expect("slot 1 exists");
    let one = one.with_color(Color::Closed);
    let mut antennas = GraphVector::zero(n as u8 + 1, 0, Color::Closed);
    for i in 1..=n + 1 {
        antennas += &one.act_black(&perm::sigma(n + 1, i));
    }
    (split, antennas)
}

/// Unchecked `dfgc_differential`; see [`dfgc_differential`].
pub fn dfgc_raw(g: &GraphVector) -> GraphVector {
    let (split, antennas) = split_and_antennas(g);
    // new-vertex-with-incoming-edge terms are exactly the pikes
    (&split - &antennas).with_pikes(0).scaled(&-Q::one())
}

/// `[Γ_{•–•}, g] = Γ_{•–•} ∘ g − (-1)^e g ∘ Γ_{•–•}` on graphs with `e` edges,
/// with the pike-producing attachments dropped. The univalent vertices
/// created by splitting cancel against the attachments, and the operator
/// squares to zero. It agrees with [`dfgc_raw`] on graphs with an even
/// number of edges; on odd ones `dfgc_raw` is its negative up to graphs with
/// a univalent black vertex, which the equation's sign on the attachment
/// term doubles instead of cancelling.
pub fn dfgc_bracket(g: &GraphVector) -> GraphVector {
    let (split, antennas) = split_and_antennas(g);
    // a term with e + 1 edges came from a graph with e edges
    let koszul = |h: &Graph| Some((h.clone(), h.edge_count() % 2 == 1));
    let split = split.map_graphs(split.n_black(), 0, Color::Closed, koszul);
    (&antennas + &split).with_pikes(0)
}

/// The differential of the directed full graph complex on vectors of
/// `dGra(n)`, normalized so that for pike-free `g` the black-vertex part of
/// the Maurer–Cartan equation at `t^𝔬_{n+1,0}` equals `-dfgc(g)`.
///
/// The input must be invariant under relabelling of black vertices.
pub fn dfgc_differential(g: &GraphVector) -> Result<GraphVector, InsertError> {
    if g.n_white() != 0 {
        return Err(InsertError::InnerHasWhites(g.n_white()));
    }
    if !g.is_black_symmetric() {
        return Err(InsertError::NotInvariant);
    }
    Ok(dfgc_raw(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{qi, Vertex::*};

    fn graph(nb: u8, nw: u8, e: &[Edge]) -> GraphVector {
        Graph::canonicalize(nb, nw, e).unwrap()
    }

    #[test]
    fn edge_into_two_vertices() {
        let v = insert_black(&gamma_edge(), 1, &gamma_bb()).unwrap();
        let mut expected = GraphVector::zero(3, 0, Color::Closed);
        for (t, h) in [(1, 3), (2, 3), (3, 1), (3, 2)] {
            expected += &graph(3, 0, &[(Black(t), Black(h))]);
        }
        assert_eq!(v, expected);
    }

    #[test]
    fn unit_like_insertions() {
        for k in 0..4 {
            assert_eq!(insert_black(&broom(k), 1, &broom(0)).unwrap(), broom(k));
        }
        let v = insert_black(&gamma_bb(), 1, &gamma_bb()).unwrap();
        assert_eq!(v, GraphVector::single(Graph::empty(3, 0), qi(1), Color::Closed));
    }

    #[test]
    fn white_insertions() {
        let v = insert_white(&broom(1), 1, &broom(0)).unwrap();
        assert_eq!(v, graph(2, 0, &[(Black(1), Black(2))]).with_color(Color::Open));
        let v = insert_white(&gamma_ww(), 2, &broom(0)).unwrap();
        assert_eq!(v, GraphVector::single(Graph::empty(1, 1), qi(1), Color::Open));
        let v = insert_white(&broom(1), 1, &gamma_ww()).unwrap();
        assert_eq!(v, &graph(1, 2, &[(Black(1), White(1))]) + &graph(1, 2, &[(Black(1), White(2))]));
    }

    #[test]
    fn insertion_errors() {
        assert!(matches!(insert_black(&broom(1), 2, &broom(0)), Err(InsertError::SlotOutOfRange { .. })));
        assert!(matches!(insert_black(&broom(1), 1, &broom(1)), Err(InsertError::InnerHasWhites(1))));
        assert!(matches!(insert_white(&gamma_edge(), 1, &broom(0)), Err(InsertError::OuterNotOpen)));
    }

    #[test]
    fn broom_edges_are_ordered_by_white_label() {
        let g = broom_graph(3);
        assert_eq!(g.edges(), &[(Black(1), White(1)), (Black(1), White(2)), (Black(1), White(3))]);
    }

    #[test]
    fn dfgc_known_values() {
        assert!(dfgc_differential(&gamma_bb()).unwrap().is_zero());
        assert!(dfgc_differential(&gamma_edge()).unwrap().is_zero());
        assert!(dfgc_bracket(&gamma_edge()).is_zero());
        assert!(dfgc_bracket(&gamma_bb()).is_zero());
        let not_sym = graph(2, 0, &[(Black(1), Black(2))]);
        assert_eq!(dfgc_differential(&not_sym), Err(InsertError::NotInvariant));
    }
}
