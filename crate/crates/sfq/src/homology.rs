//! The Hochschild-type differential, the projection `Π` onto its cohomology
//! representatives, and the pike operators `𝔡`, `𝔡*`.

use num_traits::One;

use crate::graph::{qi, Color, Graph, GraphVector, Q, Vertex};
use crate::kgra::{broom, gamma_ww, insert_white};
use crate::perm;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HomologyError {
    #[error("operator needs an open-coloured vector")]
    NotOpen,
    #[error("input is not invariant under relabelling of black vertices")]
    NotBlackSymmetric,
    #[error("input is not antisymmetric in white labels")]
    NotWhiteAntisymmetric,
    #[error("input has a white vertex of valency other than one")]
    NotUnivalent,
    #[error("operator needs {0}")]
    Arity(&'static str),
}

fn sign(i: usize) -> Q {
    if i % 2 == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

/// `∂^Hoch γ = Γ∘∘ ∘₂ γ + Σ_{i=1}^k (-1)^i γ ∘_i Γ∘∘ + (-1)^{k+1} Γ∘∘ ∘₁ γ`.
pub fn hoch(g: &GraphVector) -> Result<GraphVector, HomologyError> {
    if g.color() != Color::Open {
        return Err(HomologyError::NotOpen);
    }
    Ok(hoch_raw(g))
}

pub(crate) fn hoch_raw(g: &GraphVector) -> GraphVector {
    let k = g.n_white() as usize;
    let ww = gamma_ww();
    let mut out = insert_white(&ww, 2, g).expect("slot 2 of Γ∘∘");
    for i in 1..=k {
        out.add_scaled(&insert_white(g, i, &ww).expect("slot in range"), &sign(i));
    }
    out.add_scaled(&insert_white(&ww, 1, g).expect("slot 1 of Γ∘∘"), &sign(k + 1));
    out
}

/// `Alt^𝔬 = (1/k!) Σ_σ (-1)^{|σ|} (id, σ)`.
pub fn alt_white(g: &GraphVector) -> GraphVector {
    let k = g.n_white() as usize;
    if k <= 1 {
        return g.clone();
    }
    let mut out = GraphVector::zero(g.n_black(), g.n_white(), g.color());
    for s in perm::all(k) {
        let c = if perm::is_odd(&s) { -Q::one() } else { Q::one() };
        out.add_scaled(&g.act_white(&s), &c);
    }
    out.scaled(&Q::new(1.into(), perm::factorial(k).into()))
}

/// `Π₁`: keep the graphs whose white vertices are all univalent.
pub fn pi1(g: &GraphVector) -> GraphVector {
    g.filter(Graph::whites_univalent)
}

/// `Π = Alt^𝔬 ∘ Π₁`.
pub fn pi(g: &GraphVector) -> GraphVector {
    alt_white(&pi1(g))
}

fn check_invariant(g: &GraphVector) -> Result<(), HomologyError> {
    if g.color() != Color::Open {
        return Err(HomologyError::NotOpen);
    }
    if !g.graphs().all(Graph::whites_univalent) {
        return Err(HomologyError::NotUnivalent);
    }
    if !g.is_black_symmetric() {
        return Err(HomologyError::NotBlackSymmetric);
    }
    if !g.is_white_antisymmetric() {
        return Err(HomologyError::NotWhiteAntisymmetric);
    }
    Ok(())
}

/// `true` if `g` lies in `(Π KGra(n,k)^𝔬)^{S_n}`.
pub fn is_invariant_vector(g: &GraphVector) -> bool {
    check_invariant(g).is_ok()
}

/// `𝔡(γ) = k Σ_{i=1}^{n+1} (τ_{n+1,i}, id)(γ ∘_{1,𝔬} Γ^br_0)`.
pub fn pike_d(g: &GraphVector) -> Result<GraphVector, HomologyError> {
    check_invariant(g)?;
    if g.n_white() == 0 {
        return Err(HomologyError::Arity("at least one white vertex"));
    }
    Ok(pike_d_raw(g))
}

pub(crate) fn pike_d_raw(g: &GraphVector) -> GraphVector {
    let (n, k) = (g.n_black() as usize, g.n_white() as usize);
    let mut out = GraphVector::zero(n as u8 + 1, k as u8 - 1, Color::Open);
    let base = insert_white(g, 1, &broom(0)).expect("slot 1");
    for i in 1..=n + 1 {
        out += &base.act_black(&perm::tau(n + 1, i));
    }
    out.scaled(&qi(k as i64))
}

/// `𝔡*`: keep graphs whose black vertex 1 is a pike, recolour that vertex
/// as white vertex 1 (other blacks shift down, whites shift up) and average
/// with `Σ_{i=1}^{k+1} (-1)^{i-1}/(k+1) (id, σ_{k+1,i})`.
pub fn pike_h(g: &GraphVector) -> Result<GraphVector, HomologyError> {
    check_invariant(g)?;
    if g.n_black() == 0 {
        return Err(HomologyError::Arity("at least one black vertex"));
    }
    Ok(pike_h_raw(g))
}

pub(crate) fn pike_h_raw(g: &GraphVector) -> GraphVector {
    let (n, k) = (g.n_black(), g.n_white() as usize);
    let recolor = |v: Vertex| match v {
        Vertex::Black(1) => Vertex::White(1),
        Vertex::Black(j) => Vertex::Black(j - 1),
        Vertex::White(j) => Vertex::White(j + 1),
    };
    let mut gpp = GraphVector::zero(n - 1, k as u8 + 1, Color::Open);
    for (h, c) in g.iter() {
        if h.is_pike(1) {
            let (r, neg) = h.map_vertices(n - 1, k as u8 + 1, recolor).expect("bijective relabelling");
            gpp.add_signed(r, neg, c);
        }
    }
    let mut out = GraphVector::zero(n - 1, k as u8 + 1, Color::Open);
    for i in 1..=k + 1 {
        out.add_scaled(&gpp.act_white(&perm::sigma(k + 1, i)), &sign(i - 1));
    }
    out.scaled(&Q::new(1.into(), (k as i64 + 1).into()))
}

/// `kγ + Σ_{r≥1} r γ_r` where `γ_r` keeps the graphs with exactly `r` pikes.
pub fn pike_weighted(g: &GraphVector) -> GraphVector {
    let k = g.n_white() as i64;
    let mut out = GraphVector::zero(g.n_black(), g.n_white(), g.color());
    for (h, c) in g.iter() {
        let w = k + h.count_pikes() as i64;
        out.add_term(h.clone(), c * qi(w));
    }
    out
}

/// Verifies `𝔡𝔡*γ + 𝔡*𝔡γ = kγ + Σ_r r γ_r` exactly.
pub fn homotopy_identity_check(g: &GraphVector) -> Result<bool, HomologyError> {
    check_invariant(g)?;
    let mut lhs = GraphVector::zero(g.n_black(), g.n_white(), Color::Open);
    if g.n_black() >= 1 {
        let h = pike_h_raw(g);
        if h.n_white() >= 1 {
            lhs += &pike_d_raw(&h);
        }
    }
    if g.n_white() >= 1 {
        lhs += &pike_h_raw(&pike_d_raw(g));
    }
    Ok(lhs == pike_weighted(g))
}

/// Projects an arbitrary open vector into `(Π KGra(n,k)^𝔬)^{S_n}`:
/// symmetrizes over black labels (normalized) and applies `Π`.
pub fn to_invariant(g: &GraphVector) -> GraphVector {
    let n = g.n_black() as usize;
    let mut sym = GraphVector::zero(g.n_black(), g.n_white(), g.color());
    for s in perm::all(n) {
        sym += &g.act_black(&s);
    }
    pi(&sym.scaled(&Q::new(1.into(), perm::factorial(n).into())))
}

/// Convenience: is the vector zero after `Π`?
pub fn pi_vanishes(g: &GraphVector) -> bool {
    pi(g).is_zero()
}
