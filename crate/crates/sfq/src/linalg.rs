//! Graph bases of fixed bi-arity and edge count, and exact sparse linear
//! solves over the rationals.
//!
//! Elimination is fraction-free: every row is scaled to integers and kept
//! primitive (content divided out) after each update. Pivoting is fixed —
//! columns left to right, the smallest-index eligible row — so identical
//! inputs always produce identical solutions. Free variables are set to 0.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::graph::{fmt_q, Color, Graph, GraphVector, Q, Vertex};
use crate::perm;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("INCONSISTENT: the linear system has no solution")]
    Inconsistent,
    #[error("operator output {0} escapes the codomain basis")]
    EscapesCodomain(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Restrictions applied when enumerating graphs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Filters {
    pub connected: bool,
    pub no_pikes: bool,
    pub white_univalent: bool,
}

impl Filters {
    pub const NONE: Filters = Filters { connected: false, no_pikes: false, white_univalent: false };
    pub const CONNECTED: Filters = Filters { connected: true, no_pikes: false, white_univalent: false };

    pub fn accepts(&self, g: &Graph) -> bool {
        (!self.connected || g.is_connected())
            && (!self.no_pikes || g.count_pikes() == 0)
            && (!self.white_univalent || g.whites_univalent())
    }
}

/// All canonical graphs with given bi-arity and edge count, in a fixed order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphBasis {
    pub n: u8,
    pub k: u8,
    pub e: usize,
    pub filters: Filters,
    pub graphs: Vec<Graph>,
}

impl GraphBasis {
    pub fn len(&self) -> usize {
        self.graphs.len()
    }
    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }
    /// Basis graphs as unit vectors.
    pub fn vectors(&self, color: Color) -> Vec<GraphVector> {
        self.graphs.iter().map(|g| GraphVector::single(g.clone(), Q::one(), color)).collect()
    }
}

/// Every admissible edge (black tail, no loop) in increasing order.
fn possible_edges(n: u8, k: u8) -> Vec<(Vertex, Vertex)> {
    let mut out = Vec::new();
    for t in 1..=n {
        for h in 1..=n {
            if h != t {
                out.push((Vertex::Black(t), Vertex::Black(h)));
            }
        }
        for h in 1..=k {
            out.push((Vertex::Black(t), Vertex::White(h)));
        }
    }
    out
}

/// Enumerates `dgra_{n,k}` graphs with exactly `e` edges. Choosing `e`
/// distinct edges from the sorted list of admissible edges yields each
/// canonical graph exactly once, in lexicographic order.
pub fn enumerate_basis(n: u8, k: u8, e: usize, filters: Filters) -> GraphBasis {
    let all = possible_edges(n, k);
    let graphs = perm::subsets(all.len(), e)
        .into_iter()
        .map(|idx| Graph::canon_unchecked(n, k, idx.iter().map(|&i| all[i - 1]).collect()).unwrap().0)
        .filter(|g| filters.accepts(g))
        .collect();
    GraphBasis { n, k, e, filters, graphs }
}

/// How unknowns are symmetrized before solving.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    None,
    /// Invariant under relabelling black vertices.
    Black,
    /// Invariant in black labels and antisymmetric in white labels.
    BlackAltWhite,
}

/// Orbit sums of the basis graphs under the chosen symmetry. Each orbit
/// contributes at most one (nonzero) vector, so the result is linearly
/// independent.
pub fn symmetric_basis(basis: &GraphBasis, sym: Symmetry, color: Color) -> Vec<GraphVector> {
    if sym == Symmetry::None {
        return basis.vectors(color);
    }
    let blacks = perm::all(basis.n as usize);
    let whites = match sym {
        Symmetry::BlackAltWhite => perm::all(basis.k as usize),
        _ => vec![perm::identity(basis.k as usize)],
    };
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for g in &basis.graphs {
        if seen.contains(g) {
            continue;
        }
        let mut v = GraphVector::zero(basis.n, basis.k, color);
        for s in &blacks {
            for t in &whites {
                let (h, neg) = g.act(s, t);
                let odd = neg ^ perm::is_odd(t);
                v.add_term(h.clone(), if odd { -Q::one() } else { Q::one() });
                seen.insert(h);
            }
        }
        if !v.is_zero() {
            out.push(v);
        }
    }
    out
}

/// A sparse matrix of exact rationals, stored by rows sorted by column.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub rows: Vec<Vec<(usize, Q)>>,
}

impl SparseMatrix {
    pub fn new(nrows: usize, ncols: usize) -> SparseMatrix {
        SparseMatrix { nrows, ncols, rows: vec![Vec::new(); nrows] }
    }

    /// Adds `x` to entry `(r, c)`.
    pub fn add(&mut self, r: usize, c: usize, x: Q) {
        let row = &mut self.rows[r];
        match row.binary_search_by_key(&c, |e| e.0) {
            Ok(i) => {
                row[i].1 += x;
                if row[i].1.is_zero() {
                    row.remove(i);
                }
            }
            Err(i) => {
                if !x.is_zero() {
                    row.insert(i, (c, x));
                }
            }
        }
    }

    pub fn mul_vec(&self, x: &[Q]) -> Vec<Q> {
        self.rows.iter().map(|row| row.iter().fold(Q::zero(), |acc, (c, a)| acc + a * &x[*c])).collect()
    }

    /// One `row col p/q` triplet per line (0-based indices).
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (r, row) in self.rows.iter().enumerate() {
            for (c, x) in row {
                writeln!(s, "{r} {c} {}", fmt_q(x)).unwrap();
            }
        }
        s
    }
}

type IntRow = Vec<(usize, BigInt)>;

/// Scales a rational row (plus right-hand side, stored at column `ncols`)
/// to a primitive integer row.
fn to_int_row(row: &[(usize, Q)], rhs: &Q, ncols: usize) -> IntRow {
    let mut lcm = BigInt::one();
    for (_, x) in row.iter().chain(std::iter::once(&(ncols, rhs.clone()))) {
        lcm = lcm.lcm(x.denom());
    }
    let mut out: IntRow = row.iter().map(|(c, x)| (*c, x.numer() * (&lcm / x.denom()))).collect();
    if !rhs.is_zero() {
        out.push((ncols, rhs.numer() * (&lcm / rhs.denom())));
    }
    make_primitive(&mut out);
    out
}

fn make_primitive(row: &mut IntRow) {
    let mut g = BigInt::zero();
    for (_, x) in row.iter() {
        g = g.gcd(x);
        if g.is_one() {
            return;
        }
    }
    if !g.is_zero() && !g.is_one() {
        for (_, x) in row.iter_mut() {
            *x = &*x / &g;
        }
    }
}

fn entry(row: &IntRow, c: usize) -> Option<&BigInt> {
    row.binary_search_by_key(&c, |e| e.0).ok().map(|i| &row[i].1)
}

/// `a·x - b·y` for sorted sparse rows.
fn combine(a: &BigInt, x: &IntRow, b: &BigInt, y: &IntRow) -> IntRow {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let ci = x.get(i).map_or(usize::MAX, |e| e.0);
        let cj = y.get(j).map_or(usize::MAX, |e| e.0);
        let (c, v) = if ci < cj {
            i += 1;
            (ci, a * &x[i - 1].1)
        } else if cj < ci {
            j += 1;
            (cj, -(b * &y[j - 1].1))
        } else {
            i += 1;
            j += 1;
            (ci, a * &x[i - 1].1 - b * &y[j - 1].1)
        };
        if !v.is_zero() {
            out.push((c, v));
        }
    }
    out
}

/// Solves `A x = b` exactly. Returns one solution with free variables 0.
pub fn solve(a: &SparseMatrix, b: &[Q]) -> Result<Vec<Q>, LinalgError> {
    if b.len() != a.nrows {
        return Err(LinalgError::Dimension(format!("{} rows but rhs of length {}", a.nrows, b.len())));
    }
    let n = a.ncols;
    let mut rows: Vec<IntRow> = a.rows.iter().zip(b).map(|(r, x)| to_int_row(r, x, n)).collect();
    let mut used = vec![false; rows.len()];
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (column, row)
    for c in 0..n {
        let Some(p) = (0..rows.len()).find(|&r| !used[r] && entry(&rows[r], c).is_some()) else {
            continue;
        };
        used[p] = true;
        pivots.push((c, p));
        let prow = std::mem::take(&mut rows[p]);
        let pc = entry(&prow, c).unwrap().clone();
        let updated: Vec<(usize, IntRow)> = rows
            .iter()
            .enumerate()
            .filter_map(|(r, row)| {
                let x = entry(row, c)?;
                let g = pc.gcd(x);
                let mut new = combine(&(&pc / &g), row, &(x / &g), &prow);
                make_primitive(&mut new);
                Some((r, new))
            })
            .collect();
        for (r, new) in updated {
            rows[r] = new;
        }
        rows[p] = prow;
    }
    for (r, row) in rows.iter().enumerate() {
        if !used[r] && !row.is_empty() {
            // only the right-hand side can survive in an unused row
            debug_assert!(row.iter().all(|e| e.0 == n));
            return Err(LinalgError::Inconsistent);
        }
    }
    let mut x = vec![Q::zero(); n];
    for (c, p) in pivots {
        let row = &rows[p];
        let pc = entry(row, c).unwrap();
        let rhs = entry(row, n).cloned().unwrap_or_else(BigInt::zero);
        x[c] = Q::new(rhs, pc.clone());
    }
    Ok(x)
}

/// An exact linear system over graphs: columns are the images of a list of
/// domain vectors, rows are target graphs grouped into independent blocks
/// (a block per stacked equation).
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub row_keys: Vec<(usize, Graph)>,
    pub matrix: SparseMatrix,
    pub rhs: Vec<Q>,
}

impl LinearSystem {
    /// Builds a system from blocks of `(column images, right-hand side)`.
    /// Each block must have one image per domain vector. Rows are the sorted
    /// supports of each block.
    pub fn from_blocks(blocks: &[(Vec<GraphVector>, GraphVector)]) -> Result<LinearSystem, LinalgError> {
        let ncols = blocks.first().map_or(0, |b| b.0.len());
        let mut row_keys = Vec::new();
        let mut index: HashMap<(usize, Graph), usize> = HashMap::new();
        for (bi, (cols, rhs)) in blocks.iter().enumerate() {
            if cols.len() != ncols {
                return Err(LinalgError::Dimension(format!("block {bi} has {} columns, expected {ncols}", cols.len())));
            }
            let support: BTreeSet<&Graph> = cols.iter().flat_map(|v| v.graphs()).chain(rhs.graphs()).collect();
            for g in support {
                index.insert((bi, g.clone()), row_keys.len());
                row_keys.push((bi, g.clone()));
            }
        }
        let mut matrix = SparseMatrix::new(row_keys.len(), ncols);
        let mut rhs_vec = vec![Q::zero(); row_keys.len()];
        for (bi, (cols, rhs)) in blocks.iter().enumerate() {
            for (c, v) in cols.iter().enumerate() {
                for (g, x) in v.iter() {
                    matrix.add(index[&(bi, g.clone())], c, x.clone());
                }
            }
            for (g, x) in rhs.iter() {
                rhs_vec[index[&(bi, g.clone())]] = x.clone();
            }
        }
        Ok(LinearSystem { row_keys, matrix, rhs: rhs_vec })
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows
    }
    pub fn ncols(&self) -> usize {
        self.matrix.ncols
    }

    /// Solves and returns the coefficient of each domain vector.
    pub fn solve(&self) -> Result<Vec<Q>, LinalgError> {
        solve(&self.matrix, &self.rhs)
    }
}

/// Column `j` = coordinates of `op(domain_j)` in `codomain`. Errors if an
/// image leaves the codomain.
pub fn assemble<F>(op: F, domain: &[GraphVector], codomain: &GraphBasis) -> Result<SparseMatrix, LinalgError>
where
    F: Fn(&GraphVector) -> GraphVector + Sync,
{
    let index: HashMap<&Graph, usize> = codomain.graphs.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let images: Vec<GraphVector> = domain.par_iter().map(&op).collect();
    let mut m = SparseMatrix::new(codomain.len(), domain.len());
    for (c, img) in images.iter().enumerate() {
        for (g, x) in img.iter() {
            let r = *index.get(g).ok_or_else(|| LinalgError::EscapesCodomain(g.to_string()))?;
            m.add(r, c, x.clone());
        }
    }
    Ok(m)
}

/// `Σ x_j domain_j`.
pub fn combine_solution(domain: &[GraphVector], x: &[Q], nb: u8, nw: u8, color: Color) -> GraphVector {
    let mut out = GraphVector::zero(nb, nw, color);
    for (v, c) in domain.iter().zip(x) {
        out.add_scaled(v, c);
    }
    out
}

/// Statistics of one solve, for stage reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveStats {
    pub rows: usize,
    pub cols: usize,
}

/// Solves `op(x) = rhs` for `x` in the span of `domain`, subject to the
/// extra homogeneous conditions `c(x) = 0` for each constraint operator.
pub fn solve_operator(
    domain: &[GraphVector],
    op: &(dyn Fn(&GraphVector) -> GraphVector + Sync),
    rhs: &GraphVector,
    constraints: &[&(dyn Fn(&GraphVector) -> GraphVector + Sync)],
    out_shape: (u8, u8, Color),
) -> Result<(GraphVector, SolveStats), LinalgError> {
    let mut blocks = vec![(domain.par_iter().map(op).collect::<Vec<_>>(), rhs.clone())];
    for c in constraints {
        let imgs: Vec<GraphVector> = domain.par_iter().map(|v| c(v)).collect();
        let zero = imgs
            .first()
            .map(|v| GraphVector::zero(v.n_black(), v.n_white(), v.color()))
            .unwrap_or_else(|| rhs.clone().scaled(&Q::zero()));
        blocks.push((imgs, zero));
    }
    if domain.is_empty() {
        return if rhs.is_zero() {
            Ok((GraphVector::zero(out_shape.0, out_shape.1, out_shape.2), SolveStats { rows: 0, cols: 0 }))
        } else {
            Err(LinalgError::Inconsistent)
        };
    }
    let sys = LinearSystem::from_blocks(&blocks)?;
    let x = sys.solve()?;
    let stats = SolveStats { rows: sys.nrows(), cols: sys.ncols() };
    Ok((combine_solution(domain, &x, out_shape.0, out_shape.1, out_shape.2), stats))
}
