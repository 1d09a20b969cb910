//! Tree monomials of the free operad on the corollas, with `𝒟` extended as
//! a derivation. Used to check `𝒟² = 0` symbolically, before any values are
//! substituted.
//!
//! A monomial is a tree whose nodes are corollas and whose leaves are the
//! labelled inputs. Black children of a node are unordered (sorted by their
//! smallest leaf label); white children keep their planar order. The sign
//! of a monomial is taken relative to the depth-first order of its nodes;
//! building a tree in a different order costs the Koszul sign of the
//! reordering of its odd-degree nodes.

use std::collections::BTreeMap;

use crate::graph::Color;
use crate::oc::{oc_differential, Corolla, DTerm};
use crate::perm;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tree {
    Leaf(Color, u8),
    Node { id: usize, cor: Corolla, black: Vec<Tree>, white: Vec<Tree> },
}

/// A signed sum of canonical trees (node ids zeroed).
pub type TreeSum = BTreeMap<Tree, i64>;

impl Tree {
    pub fn corolla(c: Corolla) -> Tree {
        Tree::Node {
            id: 0,
            cor: c,
            black: (1..=c.n_black()).map(|j| Tree::Leaf(Color::Closed, j)).collect(),
            white: (1..=c.n_white()).map(|j| Tree::Leaf(Color::Open, j)).collect(),
        }
    }

    fn min_black_leaf(&self) -> u8 {
        match self {
            Tree::Leaf(Color::Closed, l) => *l,
            Tree::Leaf(Color::Open, _) => u8::MAX,
            Tree::Node { black, white, .. } => {
                black.iter().chain(white).map(Tree::min_black_leaf).min().unwrap_or(u8::MAX)
            }
        }
    }

    fn sort_children(&mut self) {
        if let Tree::Node { black, white, .. } = self {
            for c in black.iter_mut().chain(white.iter_mut()) {
                c.sort_children();
            }
            black.sort_by_key(Tree::min_black_leaf);
        }
    }

    fn preorder<'a>(&'a self, out: &mut Vec<&'a Tree>) {
        if let Tree::Node { black, white, .. } = self {
            out.push(self);
            for c in black.iter().chain(white) {
                c.preorder(out);
            }
        }
    }

    fn set_ids(&mut self, f: &mut impl FnMut() -> usize) {
        if let Tree::Node { id, black, white, .. } = self {
            *id = f();
            for c in black.iter_mut().chain(white.iter_mut()) {
                c.set_ids(f);
            }
        }
    }

    fn replace(&mut self, target: usize, with: &Tree) -> bool {
        match self {
            Tree::Node { id, .. } if *id == target => {
                *self = with.clone();
                true
            }
            Tree::Node { black, white, .. } => black.iter_mut().chain(white.iter_mut()).any(|c| c.replace(target, with)),
            Tree::Leaf(..) => false,
        }
    }
}

fn is_odd(c: Corolla) -> bool {
    c.degree().rem_euclid(2) == 1
}

/// Sorts children and returns the canonical tree (ids zeroed) together with
/// the Koszul sign of going from increasing-id order to depth-first order.
pub fn canonicalize(mut t: Tree) -> (Tree, bool) {
    t.sort_children();
    let mut nodes = Vec::new();
    t.preorder(&mut nodes);
    let odd_ids: Vec<usize> = nodes
        .iter()
        .filter_map(|n| match n {
            Tree::Node { id, cor, .. } if is_odd(*cor) => Some(*id),
            _ => None,
        })
        .collect();
    let neg = perm::odd_inversions(&odd_ids);
    t.set_ids(&mut || 0);
    (t, neg)
}

/// Replaces a node by the two-node tree of one term of its differential,
/// attaching the node's children to the relabelled leaves.
fn expand(cor: Corolla, black: &[Tree], white: &[Tree], term: &DTerm, id_outer: usize, id_inner: usize) -> Tree {
    let n = cor.n_black() as usize;
    let k = cor.n_white() as usize;
    let sigma = if term.shuffle.is_empty() { perm::identity(n) } else { term.shuffle.clone() };
    let b = |j: usize| black[sigma[j - 1] - 1].clone();
    let w = |j: usize| white[j - 1].clone();
    let (ob, ow) = match term.color {
        Color::Closed => {
            let p = term.inner.n_black() as usize;
            let inner = Tree::Node { id: id_inner, cor: term.inner, black: (1..=p).map(b).collect(), white: vec![] };
            let mut ob = vec![inner];
            ob.extend((p + 1..=n).map(b));
            (ob, (1..=k).map(w).collect())
        }
        Color::Open => {
            let s = term.slot as usize;
            let n_out = term.outer.n_black() as usize;
            let k_in = term.inner.n_white() as usize;
            let inner = Tree::Node {
                id: id_inner,
                cor: term.inner,
                black: (n_out + 1..=n).map(b).collect(),
                white: (s..s + k_in).map(w).collect(),
            };
            let mut ow: Vec<Tree> = (1..s).map(w).collect();
            ow.push(inner);
            ow.extend((s + k_in..=k).map(w));
            ((1..=n_out).map(b).collect(), ow)
        }
    };
    Tree::Node { id: id_outer, cor: term.outer, black: ob, white: ow }
}

fn add(sum: &mut TreeSum, t: Tree, c: i64) {
    let e = sum.entry(t.clone()).or_insert(0);
    *e += c;
    if *e == 0 {
        sum.remove(&t);
    }
}

/// `𝒟` of a canonical monomial, as a derivation: node `i` (depth-first)
/// picks up `(-1)^{|g_1|+…+|g_{i-1}|}`.
pub fn d_tree(t: &Tree) -> TreeSum {
    let mut base = t.clone();
    let mut next = 0;
    base.set_ids(&mut || {
        next += 2;
        next
    });
    let mut nodes = Vec::new();
    base.preorder(&mut nodes);
    let mut out = TreeSum::new();
    let mut prefix = 0i64;
    for node in nodes {
        let Tree::Node { id, cor, black, white } = node else { unreachable!() };
        for term in oc_differential(*cor) {
            let replacement = expand(*cor, black, white, &term, *id, *id + 1);
            let mut new = base.clone();
            new.replace(*id, &replacement);
            let (canon, neg) = canonicalize(new);
            let sign = (prefix.rem_euclid(2) == 1) ^ neg ^ term.negative;
            add(&mut out, canon, if sign { -1 } else { 1 });
        }
        prefix += cor.degree();
    }
    out
}

/// `𝒟(𝒟(t))` in the free operad; empty iff `𝒟² = 0` at `t`.
pub fn d_squared(t: Corolla) -> TreeSum {
    let mut out = TreeSum::new();
    for (tree, c) in d_tree(&Tree::corolla(t)) {
        for (t2, c2) in d_tree(&tree) {
            add(&mut out, t2, c * c2);
        }
    }
    out
}
