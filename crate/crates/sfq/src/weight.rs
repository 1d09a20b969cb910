//! Monte-Carlo estimates of configuration-space weights
//!
//! `W_Γ = (2π)^{-(2n+k-2)} ∫_{C⁺_{n,k}} ⋀_e dφ_e`, where black vertices sit at
//! points `p_i` of the upper half-plane, white vertices at real points
//! `q_1 < … < q_k`, and an edge `i → j` carries the angle form
//! `dφ_e = dArg(p_j − p_i) − dArg(p_j − p̄_i)`.
//!
//! The affine group `z ↦ az + b` is fixed by a slice: `q_1 = 0, q_k = 1` when
//! `k ≥ 2`, and `p_1 = i` otherwise. On the slice the top form is
//! `det(M) · vol`, where `M` has one row per edge and one column per slice
//! coordinate. The integral is estimated by importance sampling from a
//! mixture that puts mass near every collision locus, where the integrand
//! has its (integrable) singularities.
//!
//! This is floating-point code and only serves as a cross-check of exact
//! boundary values and of exact vanishing.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::graph::{Edge, Graph, GraphError, Vertex};

/// Samples per deterministic substream.
const CHUNK: u64 = 1 << 14;

/// Radius of the local mixture components around collision loci.
const LOCAL_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WeightError {
    #[error("sample has {0} black and {1} white points, graph needs {2} and {3}")]
    Dimension(usize, usize, u8, u8),
    #[error("{0} edges do not match a {1}-dimensional configuration space")]
    EdgeCount(usize, usize),
    #[error("configuration space of {0} black and {1} white points is not a manifold (2n+k < 2)")]
    Degenerate(u8, u8),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// How the two affine degrees of freedom are fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gauge {
    /// `q_1 = 0`, `q_k = 1`; coordinates `x_1, y_1, …, x_n, y_n, q_2, …, q_{k-1}`.
    Whites,
    /// `p_1 = i`; coordinates `x_2, y_2, …, x_n, y_n` and `q_1` if `k = 1`.
    FirstBlack,
}

impl Gauge {
    pub fn for_arity(n: u8, k: u8) -> Gauge {
        if k >= 2 || n == 0 {
            Gauge::Whites
        } else {
            Gauge::FirstBlack
        }
    }

    /// Sign relating the slice coordinate order to the orientation of
    /// `C⁺_{n,k}`, pinned so that brooms get positive weight.
    fn orientation(self, k: u8) -> f64 {
        match self {
            Gauge::Whites if k % 2 == 1 => -1.0,
            _ => 1.0,
        }
    }
}

/// A point of the slice: black points as `(x, y)` with `y > 0`, increasing
/// white points, and the gauge they satisfy.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigurationSample {
    pub p: Vec<(f64, f64)>,
    pub q: Vec<f64>,
    pub gauge: Gauge,
}

impl ConfigurationSample {
    /// Dimension `2n + k − 2` of the configuration space.
    pub fn dimension(&self) -> usize {
        2 * self.p.len() + self.q.len() - 2
    }

    /// Column of the slice coordinate for `x_i` (`y_i` is the next one).
    fn black_column(&self, i: usize) -> Option<usize> {
        match self.gauge {
            Gauge::Whites => Some(2 * i),
            Gauge::FirstBlack if i == 0 => None,
            Gauge::FirstBlack => Some(2 * (i - 1)),
        }
    }

    fn white_column(&self, j: usize) -> Option<usize> {
        let (n, k) = (self.p.len(), self.q.len());
        match self.gauge {
            Gauge::Whites if j == 0 || j + 1 == k => None,
            Gauge::Whites => Some(2 * n + j - 1),
            Gauge::FirstBlack => Some(2 * (n - 1) + j),
        }
    }
}

/// The value of a weight estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl WeightEstimate {
    fn exact(value: f64, samples: u64, seed: u64) -> WeightEstimate {
        WeightEstimate { mean: value, stderr: 0.0, samples, seed }
    }

    /// `|mean − target| / stderr`, or 0/∞ for exact estimates.
    pub fn sigmas_from(&self, target: f64) -> f64 {
        let d = (self.mean - target).abs();
        if self.stderr > 0.0 {
            d / self.stderr
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Adds the coefficients of `dArg(u + iv)` to `row`, where `du`, `dv` are
/// given as signed sums of slice coordinates.
fn add_darg(row: &mut [f64], u: f64, v: f64, du: &[(Option<usize>, f64)], dv: &[(Option<usize>, f64)]) {
    let r2 = u * u + v * v;
    for &(c, s) in dv {
        if let Some(c) = c {
            row[c] += s * u / r2;
        }
    }
    for &(c, s) in du {
        if let Some(c) = c {
            row[c] -= s * v / r2;
        }
    }
}

/// Matrix of the edge forms `dφ_e` in the slice coordinates, one row per
/// edge in the given order. Repeated edges give repeated rows.
pub fn form_matrix_edges(
    nb: u8,
    nw: u8,
    edges: &[Edge],
    s: &ConfigurationSample,
) -> Result<DMatrix<f64>, WeightError> {
    if s.p.len() != nb as usize || s.q.len() != nw as usize {
        return Err(WeightError::Dimension(s.p.len(), s.q.len(), nb, nw));
    }
    if 2 * nb as usize + (nw as usize) < 2 {
        return Err(WeightError::Degenerate(nb, nw));
    }
    let d = s.dimension();
    if edges.len() != d {
        return Err(WeightError::EdgeCount(edges.len(), d));
    }
    let mut m = DMatrix::zeros(d, d);
    for (r, &(t, h)) in edges.iter().enumerate() {
        let i = t.label() as usize - 1;
        let (xi, yi) = s.p[i];
        let ci = s.black_column(i);
        let (xj, yj, cx, cy) = match h {
            Vertex::Black(j) => {
                let j = j as usize - 1;
                let c = s.black_column(j);
                (s.p[j].0, s.p[j].1, c, c.map(|c| c + 1))
            }
            Vertex::White(j) => (s.q[j as usize - 1], 0.0, s.white_column(j as usize - 1), None),
        };
        let ciy = ci.map(|c| c + 1);
        let mut row = vec![0.0; d];
        let du = [(cx, 1.0), (ci, -1.0)];
        // p_j − p_i
        add_darg(&mut row, xj - xi, yj - yi, &du, &[(cy, 1.0), (ciy, -1.0)]);
        // −(p_j − p̄_i)
        let mut conj = vec![0.0; d];
        add_darg(&mut conj, xj - xi, yj + yi, &du, &[(cy, 1.0), (ciy, 1.0)]);
        for (a, b) in row.iter_mut().zip(&conj) {
            *a -= b;
        }
        m.row_mut(r).copy_from_slice(&row);
    }
    Ok(m)
}

/// [`form_matrix_edges`] for a canonical graph, rows in its edge order.
pub fn form_matrix(g: &Graph, s: &ConfigurationSample) -> Result<DMatrix<f64>, WeightError> {
    form_matrix_edges(g.n_black(), g.n_white(), g.edges(), s)
}

/// Value of the weight when it is known without sampling.
fn exact_value(nb: u8, nw: u8, edges: &[Edge], connected: bool) -> Option<f64> {
    let (n, k) = (nb as usize, nw as usize);
    if 2 * n + k < 2 {
        return Some(0.0);
    }
    if edges.len() != 2 * n + k - 2 {
        return Some(0.0);
    }
    if n == 0 {
        // no edges: C⁺_{0,2} is a point, higher C⁺_{0,k} carry no top form
        return Some(if k == 2 { 1.0 } else { 0.0 });
    }
    if !connected {
        return Some(0.0);
    }
    if edges.is_empty() {
        // the single black vertex, C⁺_{1,0} is a point
        return Some(1.0);
    }
    None
}

/// One component of the sampling mixture for the next black point.
enum Component {
    /// Whole half-plane, radius `R = U/(1−U)` around the origin.
    Global,
    /// Half-disk of radius `ρ` around a real point.
    Half(f64, f64),
    /// Disk of radius `ρ` around an earlier black point.
    Disk((f64, f64), f64),
}

impl Component {
    fn sample(&self, rng: &mut ChaCha8Rng) -> (f64, f64) {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        match *self {
            Component::Global => {
                let r = u / (1.0 - u);
                let th = std::f64::consts::PI * v;
                (r * th.cos(), r * th.sin())
            }
            Component::Half(c, rho) => {
                let r = rho * u;
                let th = std::f64::consts::PI * v;
                (c + r * th.cos(), r * th.sin())
            }
            Component::Disk((cx, cy), rho) => {
                let r = rho * u;
                let th = 2.0 * std::f64::consts::PI * v;
                (cx + r * th.cos(), cy + r * th.sin())
            }
        }
    }

    /// Area density at `(x, y)`.
    fn density(&self, (x, y): (f64, f64)) -> f64 {
        use std::f64::consts::PI;
        match *self {
            Component::Global => {
                let r = x.hypot(y);
                1.0 / ((1.0 + r) * (1.0 + r) * PI * r)
            }
            Component::Half(c, rho) => {
                let r = (x - c).hypot(y);
                if r < rho {
                    1.0 / (rho * PI * r)
                } else {
                    0.0
                }
            }
            Component::Disk((cx, cy), rho) => {
                let r = (x - cx).hypot(y - cy);
                if r < rho {
                    1.0 / (2.0 * PI * rho * r)
                } else {
                    0.0
                }
            }
        }
    }
}

/// Draws a configuration on the slice and returns it with its density with
/// respect to the slice volume element.
fn draw(nb: u8, nw: u8, rng: &mut ChaCha8Rng) -> (ConfigurationSample, f64) {
    let (n, k) = (nb as usize, nw as usize);
    let gauge = Gauge::for_arity(nb, nw);
    let mut density = 1.0;
    let mut q = Vec::with_capacity(k);
    let mut p = Vec::with_capacity(n);
    match gauge {
        Gauge::Whites => {
            let mut inner: Vec<f64> = (2..k).map(|_| rng.random::<f64>()).collect();
            inner.sort_by(f64::total_cmp);
            density *= (1..=k.saturating_sub(2)).map(|j| j as f64).product::<f64>();
            q.push(0.0);
            q.extend(inner);
            if k >= 2 {
                q.push(1.0);
            }
        }
        Gauge::FirstBlack => {
            p.push((0.0, 1.0));
            if k == 1 {
                let t: f64 = rng.random();
                let x = (std::f64::consts::PI * (t - 0.5)).tan();
                density *= 1.0 / (std::f64::consts::PI * (1.0 + x * x));
                q.push(x);
            }
        }
    }
    while p.len() < n {
        let mut comps = vec![Component::Global];
        comps.extend(q.iter().map(|&c| Component::Half(c, LOCAL_RADIUS)));
        comps.extend(p.iter().map(|&a| Component::Disk(a, LOCAL_RADIUS.min(a.1))));
        let pick = rng.random_range(0..comps.len());
        let z = comps[pick].sample(rng);
        let dz = comps.iter().map(|c| c.density(z)).sum::<f64>() / comps.len() as f64;
        density *= dz;
        p.push(z);
    }
    (ConfigurationSample { p, q, gauge }, density)
}

fn integrand(nb: u8, nw: u8, edges: &[Edge], rng: &mut ChaCha8Rng) -> f64 {
    let (s, density) = draw(nb, nw, rng);
    if s.p.iter().any(|&(_, y)| y <= 0.0) || density <= 0.0 || !density.is_finite() {
        return 0.0;
    }
    let m = form_matrix_edges(nb, nw, edges, &s).expect("edge count checked");
    let scale = (2.0 * std::f64::consts::PI).powi(s.dimension() as i32);
    let v = s.gauge.orientation(nw) * m.determinant() / density / scale;
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

/// Estimates the weight of the graph given by a raw edge list.
///
/// Exact zeros (wrong edge count, disconnected, repeated edge) and the
/// zero-dimensional cases are returned without sampling and with zero
/// standard error. Otherwise `samples` configurations are drawn in chunks,
/// chunk `c` from the ChaCha stream `c` of `seed`, and the chunk sums are
/// reduced in chunk order, so the result does not depend on the number of
/// threads.
pub fn estimate_weight_edges(
    nb: u8,
    nw: u8,
    edges: &[Edge],
    samples: u64,
    seed: u64,
) -> Result<WeightEstimate, WeightError> {
    let canon = Graph::canonicalize(nb, nw, edges)?;
    let connected = match canon.graphs().next() {
        Some(g) => g.is_connected(),
        None => return Ok(WeightEstimate::exact(0.0, samples, seed)),
    };
    if let Some(v) = exact_value(nb, nw, edges, connected) {
        return Ok(WeightEstimate::exact(v, samples, seed));
    }
    if samples == 0 {
        return Ok(WeightEstimate { mean: f64::NAN, stderr: f64::INFINITY, samples, seed });
    }
    let chunks = samples.div_ceil(CHUNK);
    let sums: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let len = CHUNK.min(samples - c * CHUNK);
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..len {
                let v = integrand(nb, nw, edges, &mut rng);
                s1 += v;
                s2 += v * v;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = sums.iter().fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    let nf = samples as f64;
    let mean = s1 / nf;
    let var = (s2 / nf - mean * mean).max(0.0);
    Ok(WeightEstimate { mean, stderr: (var / nf).sqrt(), samples, seed })
}

/// Estimates `W_Γ` for a canonical graph (edges in canonical order).
pub fn estimate_weight(g: &Graph, samples: u64, seed: u64) -> WeightEstimate {
    estimate_weight_edges(g.n_black(), g.n_white(), g.edges(), samples, seed).expect("canonical graph is valid")
}
