//! Exact-arithmetic engine for the two-coloured graph operad `KGra`, the
//! open–closed operad `OC` and the Maurer–Cartan equation that encodes a
//! stable formality quasi-isomorphism, together with an inductive
//! construction of such an element with rational coefficients.
//!
//! The crate is organised bottom-up:
//!
//! * [`perm`] — permutations in one-line notation, shuffles and signs;
//! * [`graph`] — canonical signed graphs and rational vectors of them;
//! * [`kgra`] — operadic insertions, distinguished vectors and the
//!   graph-complex operators;
//! * [`homology`] — `∂^Hoch`, `Π`, and the pike operators `𝔡`, `𝔡*`;
//! * [`linalg`] — graph bases and exact sparse linear solves;
//! * [`oc`] — corollas, the differential `𝒟`, Maurer–Cartan evaluation and
//!   gauge action;
//! * [`tree`] — symbolic tree monomials, used to check `𝒟² = 0` before any
//!   values are substituted;
//! * [`induction`] — the level-by-level construction;
//! * [`weight`] — Monte-Carlo configuration-space weights (floating point,
//!   used only as a cross-check);
//! * [`io`] — text formats for graphs, tables and stage reports.

pub mod graph;
pub mod homology;
pub mod induction;
pub mod io;
pub mod kgra;
pub mod linalg;
pub mod oc;
pub mod perm;
pub mod tree;
pub mod weight;
