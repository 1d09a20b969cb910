//! Level-by-level construction of a rational Maurer–Cartan element.
//!
//! Level 2 solves the Hochschild equations for `α(t^𝔬_{2,k})` with the
//! normalization `Π = 0`. Each level `m ≥ 3` then
//!
//! 1. removes pikes from `α(t^𝔬_{m,0})` by a gauge move on `t^𝔬_{m-1,1}`,
//! 2. replaces `α(t^𝔬_{m,0})` by a rational pike-free solution of the
//!    closed-vertex part of the equation at `t^𝔬_{m+1,0}`,
//! 3. fixes `α(t^𝔬_{m,k})` column by column as `β + γ̃`, where `β` solves
//!    the Hochschild equation at `t^𝔬_{m,k+1}` with `Π(β) = 0` and `γ̃` is
//!    the cohomology part forced by the equation at `t^𝔬_{m+1,k-1}`.
//!
//! When the table already carries a value (a seed), steps 1–3 move it by
//! gauge transformations as far as possible, so the result stays in the
//! same homotopy class; otherwise the values are constructed directly.
//! Every linear system is solved over `ℚ`; an inconsistent system is an
//! error, never silently skipped.

use std::fmt;

use crate::graph::{Color, GraphVector, Q};
use crate::homology::{hoch, pi, pike_h_raw};
use crate::kgra::{dfgc_bracket, dfgc_raw};
use crate::linalg::{enumerate_basis, solve_operator, symmetric_basis, Filters, LinalgError, Symmetry};
use crate::oc::{gauge_apply, mc_evaluate, mc_linear_part, mc_verify, AlphaTable, ConvElement, Corolla, Cutoff, OcError, Overlay, Values, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InductionError {
    #[error("INCONSISTENT linear system at stage {0}")]
    Inconsistent(String),
    #[error("stage {tag}: {source}")]
    Oc { tag: String, source: OcError },
    #[error("stage {tag}: {message}")]
    Check { tag: String, message: String },
    #[error("cutoff must have nmax >= 2")]
    Cutoff,
}

impl InductionError {
    fn oc(tag: &str) -> impl FnOnce(OcError) -> InductionError + '_ {
        move |source| InductionError::Oc { tag: tag.to_string(), source }
    }
    fn check(tag: &str, message: impl Into<String>) -> InductionError {
        InductionError::Check { tag: tag.to_string(), message: message.into() }
    }
}

/// One line of the stage report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageRecord {
    pub tag: String,
    pub detail: String,
}

impl fmt::Display for StageRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.detail.is_empty() {
            write!(f, "{}", self.tag)
        } else {
            write!(f, "{} {}", self.tag, self.detail)
        }
    }
}

/// The table being built, the level reached and the stage log.
#[derive(Clone, Debug)]
pub struct StageState {
    pub table: AlphaTable,
    pub level: u8,
    pub log: Vec<StageRecord>,
}

impl StageState {
    pub fn new(table: AlphaTable) -> StageState {
        StageState { table, level: 1, log: Vec::new() }
    }

    fn record(&mut self, tag: impl Into<String>, detail: impl Into<String>) {
        self.log.push(StageRecord { tag: tag.into(), detail: detail.into() });
    }

    /// The report as text, one record per line.
    pub fn report(&self) -> String {
        self.log.iter().map(|r| format!("{r}\n")).collect()
    }
}

/// Black-symmetric connected vectors with `e` edges.
pub fn connected_basis(n: u8, k: u8, e: usize, no_pikes: bool) -> Vec<GraphVector> {
    let f = Filters { connected: true, no_pikes, white_univalent: false };
    symmetric_basis(&enumerate_basis(n, k, e, f), Symmetry::Black, Color::Open)
}

/// A basis of `(Π KGra(n,k)^𝔬)^{S_n}` restricted to connected graphs with
/// the edge count of a degree-one value.
pub fn pi_space_basis(n: u8, k: u8) -> Vec<GraphVector> {
    let f = Filters { connected: true, no_pikes: false, white_univalent: true };
    let e = Corolla::Mixed(n, k).value_edges();
    symmetric_basis(&enumerate_basis(n, k, e, f), Symmetry::BlackAltWhite, Color::Open)
}

fn stats(rows: usize, cols: usize, v: &GraphVector) -> String {
    let edges = v.edge_counts();
    let edges = match (edges.first(), edges.last()) {
        (Some(a), Some(b)) if a == b => a.to_string(),
        (Some(a), Some(b)) => format!("{a}..{b}"),
        _ => "-".into(),
    };
    format!("rows={rows} cols={cols} terms={} edges={edges}", v.len())
}

fn solve(
    tag: &str,
    domain: &[GraphVector],
    op: &(dyn Fn(&GraphVector) -> GraphVector + Sync),
    rhs: &GraphVector,
    constraints: &[&(dyn Fn(&GraphVector) -> GraphVector + Sync)],
    shape: Corolla,
) -> Result<(GraphVector, String), InductionError> {
    let (x, st) = solve_operator(domain, op, rhs, constraints, (shape.n_black(), shape.n_white(), Color::Open))
        .map_err(|e| match e {
            LinalgError::Inconsistent => InductionError::Inconsistent(tag.to_string()),
            other => InductionError::check(tag, other.to_string()),
        })?;
    let s = stats(st.rows, st.cols, &x);
    Ok((x, s))
}

/// `β_{m,k}`: solves `∂^Hoch β = -(MC at t^𝔬_{m,k+1} with the (m,k) value
/// set to zero)` with `Π(β) = 0`. The left side is the part of the
/// evaluation linear in the `(m,k)` value, which is `∂^Hoch`.
pub fn solve_beta(table: &impl Values, m: u8, k: u8, tag: &str) -> Result<(GraphVector, String), InductionError> {
    let c = Corolla::Mixed(m, k);
    let t = Corolla::Mixed(m, k + 1);
    let base = Overlay::new(table).with(c, c.zero_value());
    let rhs = -&mc_evaluate(&base, t).map_err(InductionError::oc(tag))?;
    let op = |x: &GraphVector| mc_linear_part(table, t, c, x).expect("references checked by the right-hand side");
    let domain = connected_basis(m, k, c.value_edges(), false);
    solve(tag, &domain, &op, &rhs, &[&pi], c)
}

/// `γ̃_{m,k}` in the `Π`-space: `Π(MC at t^𝔬_{m+1,k-1}) = 0` with the
/// `(m,k)` value `β + γ̃`. Row `m+1` only enters through `∂^Hoch`, which
/// `Π` annihilates, so it is taken to be zero. For `k = 1` there are no
/// white vertices left and the equation is the full one.
pub fn solve_gamma(table: &impl Values, m: u8, k: u8, beta: &GraphVector, tag: &str) -> Result<(GraphVector, String), InductionError> {
    let c = Corolla::Mixed(m, k);
    let t = Corolla::Mixed(m + 1, k - 1);
    let base = Overlay::new(table).with(c, beta.clone()).zero_row(m + 1);
    let rhs = -&pi(&mc_evaluate(&base, t).map_err(InductionError::oc(tag))?);
    let op = |x: &GraphVector| pi(&mc_linear_part(&base, t, c, x).expect("references checked by the right-hand side"));
    let domain = pi_space_basis(m, k);
    solve(tag, &domain, &op, &rhs, &[], c)
}

/// Level 2: `α(t^𝔬_{2,k-1}) := β_{2,k-1}` for `k = 1..=K_2+1`. A fully seeded
/// row is instead moved onto these values by gauge transformations.
pub fn stage_alpha2(state: &mut StageState) -> Result<(), InductionError> {
    let lim = state.table.cutoff().k_limit(2).ok_or(InductionError::Cutoff)?;
    if (0..=lim).all(|k| state.table.contains(2, k)) {
        return rationalize_row2(state);
    }
    for k in 1..=lim + 1 {
        let tag = format!("level-2-k@k={k}");
        let (beta, s) = solve_beta(&state.table, 2, k - 1, &tag)?;
        state.table.set(2, k - 1, beta).map_err(InductionError::oc(&tag))?;
        state.record(tag, s);
    }
    state.level = 2;
    Ok(())
}

/// Gauge move on `t^𝔬_{m-1,1}` by `χ = -Σ_r (1/r) 𝔡*(α^r)` that removes
/// every pike from `α(t^𝔬_{m,0})`. Identity when there is nothing to do.
pub fn stage_kill_pikes(state: &mut StageState, m: u8) -> Result<(), InductionError> {
    let tag = format!("kill-pikes@m={m}");
    let Some(a) = state.table.get(m, 0).cloned() else {
        state.record(tag, "no entry");
        return Ok(());
    };
    let max = a.max_pikes();
    if max == 0 {
        state.record(tag, "pike-free");
        return Ok(());
    }
    if !a.is_black_symmetric() {
        return Err(InductionError::check(&tag, "entry is not invariant under relabelling"));
    }
    let mut chi = GraphVector::zero(m - 1, 1, Color::Open);
    for r in 1..=max {
        let part = a.with_pikes(r);
        if !part.is_zero() {
            chi.add_scaled(&pike_h_raw(&part), &-Q::new(1.into(), (r as i64).into()));
        }
    }
    if !hoch(&chi).map_err(|e| InductionError::check(&tag, e.to_string()))?.is_zero() {
        return Err(InductionError::check(&tag, "χ is not a Hochschild cocycle"));
    }
    let xi = ConvElement::single(Corolla::Mixed(m - 1, 1), chi.clone());
    let new = gauge_apply(&xi, &state.table).map_err(InductionError::oc(&tag))?;
    if new.get(m, 0).unwrap().max_pikes() != 0 {
        return Err(InductionError::check(&tag, "pikes survive the gauge move"));
    }
    state.table = new;
    state.record(tag, format!("chi-terms={} max-pikes={max}", chi.len()));
    Ok(())
}

/// Replaces `α(t^𝔬_{m,0})` by a rational pike-free `S_m`-invariant solution
/// of the pike-free part of the equation at `t^𝔬_{m+1,0}`. If the table
/// already held a value, the difference is checked to be a cocycle of the
/// directed graph complex; the pike part of the equation is then restored
/// by a `Π`-space correction of `α(t^𝔬_{m,1})`, and rows above `m` (which
/// would need the full graph-complex action) are dropped.
pub fn stage_dfgc(state: &mut StageState, m: u8) -> Result<(), InductionError> {
    let tag = format!("dfgc@m={m}");
    let c0 = Corolla::Mixed(m, 0);
    let c1 = Corolla::Mixed(m, 1);
    let t = Corolla::Mixed(m + 1, 0);
    let x1 = match state.table.get(m, 1) {
        Some(v) => v.clone(),
        None => solve_beta(&state.table, m, 1, &format!("beta-m-k@m={m},k=1"))?.0,
    };
    let with_x1 = Overlay::new(&state.table).with(c1, x1.clone());
    let base = Overlay::new(&with_x1).with(c0, c0.zero_value());
    let rhs = -&mc_evaluate(&base, t).map_err(InductionError::oc(&tag))?.with_pikes(0);
    let op = |x: &GraphVector| mc_linear_part(&with_x1, t, c0, x).expect("references checked by the right-hand side").with_pikes(0);
    let domain = connected_basis(m, 0, c0.value_edges(), true);
    let (g, s) = solve(&tag, &domain, &op, &rhs, &[], c0)?;
    let old = state.table.get(m, 0).cloned();
    state.table.set(m, 0, g.clone()).map_err(InductionError::oc(&tag))?;
    state.record(tag.clone(), s);
    let Some(old) = old else { return Ok(()) };
    let diff = &old - &g;
    let closed = diff.clone().with_color(Color::Closed);
    if !dfgc_raw(&closed).is_zero() || !dfgc_bracket(&closed).is_zero() {
        return Err(InductionError::check(&tag, "difference is not a graph-complex cocycle"));
    }
    state.record(format!("{tag}:cocycle"), format!("terms={}", diff.len()));
    if diff.is_zero() {
        return Ok(());
    }
    let dropped: Vec<(u8, u8)> = state.table.keys().filter(|&(n, _)| n > m).collect();
    for (n, k) in &dropped {
        state.table.remove(*n, *k);
    }
    if state.table.contains(m, 1) {
        let ptag = format!("{tag}:pikes");
        let resid = mc_evaluate(&state.table, t).map_err(InductionError::oc(&ptag))?;
        let op = |x: &GraphVector| mc_linear_part(&state.table, t, c1, x).expect("references checked");
        let (delta, s) = solve(&ptag, &pi_space_basis(m, 1), &op, &-&resid, &[], c1)?;
        let cur = state.table.get(m, 1).unwrap() + &delta;
        state.table.set(m, 1, cur).map_err(InductionError::oc(&ptag))?;
        state.record(ptag, s);
    }
    if !dropped.is_empty() {
        state.record(format!("{tag}:drop"), format!("entries={}", dropped.len()));
    }
    Ok(())
}

/// Fixes `α(t^𝔬_{m,k})` (`k ≥ 1`) as `β_{m,k} + γ̃_{m,k}` with rational
/// coefficients. For a seeded entry the move is realized by two gauge
/// transformations: `ξ` on `t^𝔬_{m,k-1}` removes the exact part of
/// `α − β`, and `ψ = 𝔡*`-primitive of `γ̃ − γ` on `t^𝔬_{m-1,k+1}` swaps the
/// cohomology part.
pub fn stage_rationalize_column(state: &mut StageState, m: u8, k: u8) -> Result<(), InductionError> {
    let tag = format!("beta-m-k@m={m},k={k}");
    let (beta, s) = solve_beta(&state.table, m, k, &tag)?;
    state.record(tag.clone(), s);
    let Some(old) = state.table.get(m, k).cloned() else {
        let gtag = format!("gamma-m-k@m={m},k={k}");
        let (gamma_t, s) = solve_gamma(&state.table, m, k, &beta, &gtag)?;
        state.table.set(m, k, &beta + &gamma_t).map_err(InductionError::oc(&gtag))?;
        state.record(gtag, s);
        return Ok(());
    };

    // (iii) ξ on t^𝔬_{m,k-1} with ∂^Hoch ξ = c - Π(c), c = old - β
    let xtag = format!("xi-m-k@m={m},k={k}");
    let c = &old - &beta;
    let gamma = pi(&c);
    let exact = &c - &gamma;
    if !exact.is_zero() {
        let cx = Corolla::Mixed(m, k - 1);
        let domain = connected_basis(m, k - 1, cx.value_edges() + 1, false);
        let op = |x: &GraphVector| hoch(x).expect("open vectors");
        let (xi, s) = solve(&xtag, &domain, &op, &exact, &[], cx)?;
        state.table = gauge_apply(&ConvElement::single(cx, xi), &state.table).map_err(InductionError::oc(&xtag))?;
        if *state.table.get(m, k).unwrap() != &beta + &gamma {
            return Err(InductionError::check(&xtag, "gauge move did not remove the exact part"));
        }
        state.record(xtag, s);
    }

    // (iv) γ̃ and (v) ψ on t^𝔬_{m-1,k+1}
    let gtag = format!("gamma-m-k@m={m},k={k}");
    let (gamma_t, s) = solve_gamma(&state.table, m, k, &beta, &gtag)?;
    state.record(gtag, s);
    let y = &gamma_t - &gamma;
    if y.is_zero() {
        return Ok(());
    }
    let ptag = format!("psi-m-k@m={m},k={k}");
    if !crate::homology::pike_d_raw(&y).is_zero() {
        return Err(InductionError::check(&ptag, "𝔡(γ̃ - γ) ≠ 0"));
    }
    let mut kappa = GraphVector::zero(m - 1, k + 1, Color::Open);
    for r in 0..=y.max_pikes() {
        let part = y.with_pikes(r);
        if !part.is_zero() {
            kappa.add_scaled(&pike_h_raw(&part), &Q::new(1.into(), ((k as usize + r) as i64).into()));
        }
    }
    let cp = Corolla::Mixed(m - 1, k + 1);
    state.table = gauge_apply(&ConvElement::single(cp, kappa.clone()), &state.table).map_err(InductionError::oc(&ptag))?;
    if *state.table.get(m, k).unwrap() != &beta + &gamma_t {
        return Err(InductionError::check(&ptag, "gauge move did not produce β + γ̃"));
    }
    state.record(ptag, format!("kappa-terms={}", kappa.len()));
    Ok(())
}

/// Levels `3..=N_max` after level 2, then a final verification.
pub fn run_induction(cutoff: Cutoff, seed: Option<AlphaTable>) -> Result<StageState, InductionError> {
    if cutoff.nmax < 2 {
        return Err(InductionError::Cutoff);
    }
    let table = match seed {
        Some(t) if t.cutoff() == cutoff => t,
        Some(_) => return Err(InductionError::check("seed", "seed cutoff differs from the requested one")),
        None => AlphaTable::boundary(cutoff),
    };
    let mut state = StageState::new(table);
    stage_alpha2(&mut state)?;
    verify_level(&mut state, 2);
    for m in 3..=cutoff.nmax {
        level(&mut state, m)?;
        verify_level(&mut state, m);
    }
    Ok(state)
}

/// Runs the steps of one level `m ≥ 3`.
pub fn level(state: &mut StageState, m: u8) -> Result<(), InductionError> {
    stage_kill_pikes(state, m)?;
    stage_dfgc(state, m)?;
    for k in 1..=state.table.cutoff().k_limit(m).unwrap() {
        stage_rationalize_column(state, m, k)?;
    }
    state.level = m;
    Ok(())
}

/// A seeded row 2 is moved onto the `Π = 0` representatives by gauge
/// moves on `t^𝔬_{2,k-1}`; the cohomology parts must already vanish.
fn rationalize_row2(state: &mut StageState) -> Result<(), InductionError> {
    let lim = state.table.cutoff().k_limit(2).unwrap();
    for k in 0..=lim {
        let tag = format!("level-2-k@k={}", k + 1);
        let (beta, s) = solve_beta(&state.table, 2, k, &tag)?;
        let old = state.table.get(2, k).unwrap().clone();
        let c = &old - &beta;
        if !pi(&c).is_zero() {
            return Err(InductionError::check(&tag, "seed has a nonzero cohomology part"));
        }
        if !c.is_zero() {
            // Π is the identity without white vertices, so here k ≥ 1
            let cx = Corolla::Mixed(2, k - 1);
            let domain = connected_basis(2, k - 1, cx.value_edges() + 1, false);
            let op = |x: &GraphVector| hoch(x).expect("open vectors");
            let (xi, _) = solve(&tag, &domain, &op, &c, &[], cx)?;
            state.table = gauge_apply(&ConvElement::single(cx, xi), &state.table).map_err(InductionError::oc(&tag))?;
        }
        state.record(tag, s);
    }
    state.level = 2;
    Ok(())
}

fn verify_level(state: &mut StageState, m: u8) {
    let report = mc_verify(&state.table);
    let count = |f: fn(&Verdict) -> bool| report.count(f);
    let fails: Vec<String> = report.failures().iter().map(|c| c.to_string()).collect();
    state.record(
        format!("verify@m={m}"),
        format!(
            "pass={} fail={} unchecked={}{}",
            count(|v| matches!(v, Verdict::Pass)),
            count(|v| matches!(v, Verdict::Fail(_))),
            count(|v| matches!(v, Verdict::Unchecked(_))),
            if fails.is_empty() { String::new() } else { format!(" failing={}", fails.join(";")) }
        ),
    );
}
