//! Generators of the open–closed operad, its differential `𝒟`, partial
//! Maurer–Cartan elements (`AlphaTable`) and the gauge action.
//!
//! Every quadratic term of `𝒟(t)` is a [`DTerm`]: an outer corolla, an inner
//! corolla plugged into one of its inputs, a relabelling of black inputs and
//! a sign. Evaluating a convolution element on a term means composing its
//! values in `KGra` the same way. Both the Maurer–Cartan evaluation and the
//! bracket used by the gauge action go through [`oc_differential`], so there
//! is exactly one place where signs live.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::One;
use rayon::prelude::*;

use crate::graph::{Color, GraphVector, Q};
use crate::kgra::{broom, gamma_edge, gamma_ww, insert_black, insert_white, InsertError};
use crate::perm;

/// A generating corolla of `OC`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Corolla {
    /// `t^𝔠_n`, `n ≥ 2` closed inputs, closed output.
    Closed(u8),
    /// `t^𝔬_k`, `k ≥ 2` open inputs, open output.
    Open(u8),
    /// `t^𝔬_{n,k}`, `n ≥ 1` closed and `k ≥ 0` open inputs, open output.
    Mixed(u8, u8),
}

impl Corolla {
    /// `t^𝔬_{n,k}` with the convention that `t^𝔬_{0,k}` means `t^𝔬_k`;
    /// `None` when out of range.
    pub fn general(n: u8, k: u8) -> Option<Corolla> {
        let c = if n == 0 { Corolla::Open(k) } else { Corolla::Mixed(n, k) };
        c.is_valid().then_some(c)
    }

    pub fn is_valid(self) -> bool {
        match self {
            Corolla::Closed(n) => n >= 2,
            Corolla::Open(k) => k >= 2,
            Corolla::Mixed(n, _) => n >= 1,
        }
    }

    pub fn n_black(self) -> u8 {
        match self {
            Corolla::Closed(n) | Corolla::Mixed(n, _) => n,
            Corolla::Open(_) => 0,
        }
    }

    pub fn n_white(self) -> u8 {
        match self {
            Corolla::Closed(_) => 0,
            Corolla::Open(k) | Corolla::Mixed(_, k) => k,
        }
    }

    pub fn output(self) -> Color {
        match self {
            Corolla::Closed(_) => Color::Closed,
            _ => Color::Open,
        }
    }

    /// Degree in `OC`: `3-2n`, `2-k`, `2-2n-k`.
    pub fn degree(self) -> i64 {
        match self {
            Corolla::Closed(n) => 3 - 2 * n as i64,
            Corolla::Open(k) => 2 - k as i64,
            Corolla::Mixed(n, k) => 2 - 2 * n as i64 - k as i64,
        }
    }

    /// Edge count of the value of a degree-one convolution element.
    pub fn value_edges(self) -> usize {
        (-self.degree()) as usize
    }

    pub fn zero_value(self) -> GraphVector {
        GraphVector::zero(self.n_black(), self.n_white(), self.output())
    }
}

impl fmt::Display for Corolla {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Corolla::Closed(n) => write!(f, "c:{n}"),
            Corolla::Open(k) => write!(f, "o:{k}"),
            Corolla::Mixed(n, k) => write!(f, "o:{n},{k}"),
        }
    }
}

impl FromStr for Corolla {
    type Err = String;
    fn from_str(s: &str) -> Result<Corolla, String> {
        let bad = || format!("malformed corolla tag `{s}`");
        let c = if let Some(rest) = s.strip_prefix("c:") {
            Corolla::Closed(rest.parse().map_err(|_| bad())?)
        } else if let Some(rest) = s.strip_prefix("o:") {
            match rest.split_once(',') {
                Some((n, k)) => Corolla::Mixed(n.parse().map_err(|_| bad())?, k.parse().map_err(|_| bad())?),
                None => Corolla::Open(rest.parse().map_err(|_| bad())?),
            }
        } else {
            return Err(bad());
        };
        if c.is_valid() {
            Ok(c)
        } else {
            Err(format!("corolla `{s}` is out of range"))
        }
    }
}

/// One quadratic term `sign · (shuffle, id)(outer ∘_{slot, color} inner)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DTerm {
    pub outer: Corolla,
    pub inner: Corolla,
    pub slot: u8,
    pub color: Color,
    /// Relabelling of black inputs, applied after composition.
    pub shuffle: Vec<usize>,
    pub negative: bool,
}

impl DTerm {
    pub fn sign(&self) -> Q {
        if self.negative {
            -Q::one()
        } else {
            Q::one()
        }
    }
}

fn minus_one_pow(e: usize) -> bool {
    e % 2 == 1
}

/// The term list of `𝒟(t)`. Terms whose generators are out of range are
/// omitted.
pub fn oc_differential(t: Corolla) -> Vec<DTerm> {
    let mut out = Vec::new();
    match t {
        Corolla::Closed(n) => {
            let n = n as usize;
            for p in 2..n {
                for tau in perm::shuffles(p, n - p) {
                    out.push(DTerm {
                        outer: Corolla::Closed((n - p + 1) as u8),
                        inner: Corolla::Closed(p as u8),
                        slot: 1,
                        color: Color::Closed,
                        shuffle: tau,
                        negative: true,
                    });
                }
            }
        }
        Corolla::Open(k) => {
            let k = k as usize;
            for p in 0..=k.saturating_sub(2) {
                for q in p + 2..=k {
                    let outer = Corolla::Open((k - q + p + 1) as u8);
                    if !outer.is_valid() {
                        continue;
                    }
                    out.push(DTerm {
                        outer,
                        inner: Corolla::Open((q - p) as u8),
                        slot: (p + 1) as u8,
                        color: Color::Open,
                        shuffle: Vec::new(),
                        negative: !minus_one_pow(p + (k - q) * (q - p)),
                    });
                }
            }
        }
        Corolla::Mixed(n, k) => {
            let (n, k) = (n as usize, k as usize);
            for p in 2..=n {
                for tau in perm::shuffles(p, n - p) {
                    out.push(DTerm {
                        outer: Corolla::Mixed((n - p + 1) as u8, k as u8),
                        inner: Corolla::Closed(p as u8),
                        slot: 1,
                        color: Color::Closed,
                        shuffle: tau,
                        negative: minus_one_pow(k),
                    });
                }
            }
            for r in 0..=n {
                let shuffles = perm::shuffles(r, n - r);
                for p in 0..=k {
                    for q in p..=k {
                        let Some(outer) = Corolla::general(r as u8, (k - q + p + 1) as u8) else { continue };
                        let Some(inner) = Corolla::general((n - r) as u8, (q - p) as u8) else { continue };
                        for sigma in &shuffles {
                            out.push(DTerm {
                                outer,
                                inner,
                                slot: (p + 1) as u8,
                                color: Color::Open,
                                shuffle: sigma.clone(),
                                negative: !minus_one_pow(p + (k - q) * (q - p)),
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OcError {
    #[error("no table entry for corolla {0}")]
    Missing(Corolla),
    #[error("corolla {0} lies outside the cutoff")]
    OutOfCutoff(Corolla),
    #[error("invalid value for {corolla}: {reason}")]
    BadValue { corolla: Corolla, reason: String },
    #[error("gauge vectors must vanish on {0}")]
    GaugeOnFixed(Corolla),
    #[error("corolla {0} occupies both slots of a term; the part is not linear")]
    Quadratic(Corolla),
    #[error(transparent)]
    Insert(#[from] InsertError),
}

/// Composes values along a term: `sign · (shuffle, id)(a ∘ b)`.
pub fn compose_term(term: &DTerm, a: &GraphVector, b: &GraphVector) -> Result<GraphVector, OcError> {
    let raw = match term.color {
        Color::Closed => insert_black(a, term.slot as usize, b)?,
        Color::Open => insert_white(a, term.slot as usize, b)?,
    };
    let moved = if term.shuffle.is_empty() || term.shuffle == perm::identity(term.shuffle.len()) {
        raw
    } else {
        raw.act_black(&term.shuffle)
    };
    Ok(if term.negative { -&moved } else { moved })
}

/// Anything that can supply values of a convolution element on corollas.
pub trait Values: Sync {
    fn value(&self, c: Corolla) -> Result<Cow<'_, GraphVector>, OcError>;
}

/// The fixed values on closed, open and `t^𝔬_{1,k}` corollas.
pub fn boundary_value(c: Corolla) -> Option<GraphVector> {
    match c {
        Corolla::Closed(2) => Some(gamma_edge()),
        Corolla::Open(2) => Some(gamma_ww()),
        Corolla::Closed(_) | Corolla::Open(_) => Some(c.zero_value()),
        Corolla::Mixed(1, k) => Some(broom(k).scaled(&Q::new(1.into(), perm::factorial(k as usize).into()))),
        Corolla::Mixed(..) => None,
    }
}

/// Cutoff `(N_max, K_max)`. Lower arities are kept to wider white arity so
/// that every corolla the construction needs to check is fully expandable:
/// row `n` holds `k ≤ K' + 2(N_max - n)`, where `K' = K_max` except that
/// `K' ≥ 1` once `N_max ≥ 3` (the top row needs its `k = 1` entry).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cutoff {
    pub nmax: u8,
    pub kmax: u8,
}

impl Cutoff {
    pub fn new(nmax: u8, kmax: u8) -> Cutoff {
        Cutoff { nmax, kmax }
    }

    pub fn k_prime(&self) -> u8 {
        if self.nmax >= 3 {
            self.kmax.max(1)
        } else {
            self.kmax
        }
    }

    /// Largest white arity stored in row `n`.
    pub fn k_limit(&self, n: u8) -> Option<u8> {
        (1..=self.nmax).contains(&n).then(|| self.k_prime() + 2 * (self.nmax - n))
    }

    pub fn contains(&self, n: u8, k: u8) -> bool {
        self.k_limit(n).is_some_and(|lim| k <= lim)
    }
}

/// A partial degree-one element of the convolution algebra: values on
/// `t^𝔬_{n,k}` inside a cutoff, with the fixed boundary values implied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaTable {
    cutoff: Cutoff,
    entries: BTreeMap<(u8, u8), GraphVector>,
}

impl AlphaTable {
    /// A table holding only the boundary row `n = 1`.
    pub fn boundary(cutoff: Cutoff) -> AlphaTable {
        let mut entries = BTreeMap::new();
        if let Some(lim) = cutoff.k_limit(1) {
            for k in 0..=lim {
                entries.insert((1, k), boundary_value(Corolla::Mixed(1, k)).unwrap());
            }
        }
        AlphaTable { cutoff, entries }
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    pub fn get(&self, n: u8, k: u8) -> Option<&GraphVector> {
        self.entries.get(&(n, k))
    }

    pub fn contains(&self, n: u8, k: u8) -> bool {
        self.entries.contains_key(&(n, k))
    }

    pub fn keys(&self) -> impl Iterator<Item = (u8, u8)> + '_ {
        self.entries.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u8, u8), &GraphVector)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    /// Stores a value after checking shape, edge count and connectedness.
    pub fn set(&mut self, n: u8, k: u8, v: GraphVector) -> Result<(), OcError> {
        let c = Corolla::Mixed(n, k);
        if !self.cutoff.contains(n, k) {
            return Err(OcError::OutOfCutoff(c));
        }
        validate_value(c, &v, c.value_edges())?;
        self.entries.insert((n, k), v);
        Ok(())
    }

    /// Stores without validation; used by tests that build broken tables.
    pub fn set_unchecked(&mut self, n: u8, k: u8, v: GraphVector) {
        self.entries.insert((n, k), v);
    }

    pub fn remove(&mut self, n: u8, k: u8) -> Option<GraphVector> {
        self.entries.remove(&(n, k))
    }

    /// Row `n` entries.
    pub fn row(&self, n: u8) -> impl Iterator<Item = (u8, &GraphVector)> {
        self.entries.range((n, 0)..=(n, u8::MAX)).map(|(k, v)| (k.1, v))
    }
}

/// Shape, colour, edge count and connectedness checks for a stored value.
pub fn validate_value(c: Corolla, v: &GraphVector, edges: usize) -> Result<(), OcError> {
    let bad = |reason: String| Err(OcError::BadValue { corolla: c, reason });
    if v.n_black() != c.n_black() || v.n_white() != c.n_white() || v.color() != c.output() {
        return bad(format!("bi-arity ({},{}) does not match", v.n_black(), v.n_white()));
    }
    if let Some(e) = v.graphs().map(|g| g.edge_count()).find(|&e| e != edges) {
        return bad(format!("term with {e} edges, expected {edges}"));
    }
    if c.n_black() >= 1 && !v.all_connected() {
        return bad("disconnected term".into());
    }
    Ok(())
}

impl Values for AlphaTable {
    fn value(&self, c: Corolla) -> Result<Cow<'_, GraphVector>, OcError> {
        match c {
            Corolla::Mixed(n, k) => match self.entries.get(&(n, k)) {
                Some(v) => Ok(Cow::Borrowed(v)),
                None if n == 1 => Ok(Cow::Owned(boundary_value(c).unwrap())),
                None => Err(OcError::Missing(c)),
            },
            _ => Ok(Cow::Owned(boundary_value(c).unwrap())),
        }
    }
}

/// A table with some values replaced, and optionally a whole row of
/// `t^𝔬_{n,·}` treated as zero.
pub struct Overlay<'a, V: Values> {
    pub base: &'a V,
    pub overrides: BTreeMap<Corolla, GraphVector>,
    pub zero_row: Option<u8>,
}

impl<'a, V: Values> Overlay<'a, V> {
    pub fn new(base: &'a V) -> Self {
        Overlay { base, overrides: BTreeMap::new(), zero_row: None }
    }
    pub fn with(mut self, c: Corolla, v: GraphVector) -> Self {
        self.overrides.insert(c, v);
        self
    }
    pub fn zero_row(mut self, n: u8) -> Self {
        self.zero_row = Some(n);
        self
    }
}

impl<V: Values> Values for Overlay<'_, V> {
    fn value(&self, c: Corolla) -> Result<Cow<'_, GraphVector>, OcError> {
        if let Some(v) = self.overrides.get(&c) {
            return Ok(Cow::Borrowed(v));
        }
        if let Corolla::Mixed(n, _) = c {
            if Some(n) == self.zero_row {
                return Ok(Cow::Owned(c.zero_value()));
            }
        }
        self.base.value(c)
    }
}

/// A plain map of values; absent corollas are zero. Used for gauge vectors
/// and for iterated brackets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConvElement {
    pub values: BTreeMap<Corolla, GraphVector>,
}

impl ConvElement {
    pub fn new() -> Self {
        Self::default()
    }
    pub fn single(c: Corolla, v: GraphVector) -> Self {
        let mut e = Self::new();
        e.values.insert(c, v);
        e
    }
    pub fn is_zero(&self) -> bool {
        self.values.values().all(GraphVector::is_zero)
    }
}

impl Values for ConvElement {
    fn value(&self, c: Corolla) -> Result<Cow<'_, GraphVector>, OcError> {
        Ok(match self.values.get(&c) {
            Some(v) => Cow::Borrowed(v),
            None => Cow::Owned(c.zero_value()),
        })
    }
}

fn sum_terms(t: Corolla, parts: Vec<Result<Option<GraphVector>, OcError>>) -> Result<GraphVector, OcError> {
    let mut out = t.zero_value();
    for p in parts {
        if let Some(v) = p? {
            out += &v;
        }
    }
    Ok(out)
}

/// `μ∘(αs⁻¹⊗αs⁻¹)∘𝒟` at `t`: zero iff the Maurer–Cartan equation holds at
/// `t`. Missing values are errors.
pub fn mc_evaluate(values: &impl Values, t: Corolla) -> Result<GraphVector, OcError> {
    let terms = oc_differential(t);
    let parts = terms
        .par_iter()
        .map(|term| {
            let (a, b) = match (values.value(term.outer), values.value(term.inner)) {
                // a factor that is known to vanish kills the term
                (Ok(a), _) | (_, Ok(a)) if a.is_zero() => return Ok(None),
                (a, b) => (a?, b?),
            };
            compose_term(term, &a, &b).map(Some)
        })
        .collect();
    sum_terms(t, parts)
}

/// The part of the evaluation at `t` that is linear in the value at `c`,
/// with `x` substituted for that value.
pub fn mc_linear_part(values: &impl Values, t: Corolla, c: Corolla, x: &GraphVector) -> Result<GraphVector, OcError> {
    let terms = oc_differential(t);
    let parts = terms
        .par_iter()
        .map(|term| {
            let (a, b) = match (term.outer == c, term.inner == c) {
                (true, true) => return Err(OcError::Quadratic(c)),
                (true, false) => (Cow::Borrowed(x), values.value(term.inner)?),
                (false, true) => (values.value(term.outer)?, Cow::Borrowed(x)),
                (false, false) => return Ok(None),
            };
            if a.is_zero() || b.is_zero() {
                return Ok(None);
            }
            compose_term(term, &a, &b).map(Some)
        })
        .collect();
    sum_terms(t, parts)
}

/// `[ξ, a](t)` for a degree-zero `ξ` and a degree-one `a`.
pub fn bracket(xi: &ConvElement, a: &impl Values, t: Corolla) -> Result<GraphVector, OcError> {
    let terms = oc_differential(t);
    let parts = terms
        .par_iter()
        .map(|term| {
            let mut acc: Option<GraphVector> = None;
            let xi_in = xi.value(term.inner)?;
            if !xi_in.is_zero() {
                let a_out = a.value(term.outer)?;
                if !a_out.is_zero() {
                    let v = compose_term(term, &a_out, &xi_in)?;
                    // moving ξ past s⁻¹ of the outer generator
                    acc = Some(if (term.outer.degree() - 1).rem_euclid(2) == 1 { -&v } else { v });
                }
            }
            let xi_out = xi.value(term.outer)?;
            if !xi_out.is_zero() {
                let a_in = a.value(term.inner)?;
                if !a_in.is_zero() {
                    let v = compose_term(term, &xi_out, &a_in)?;
                    acc = Some(match acc {
                        Some(x) => &x - &v,
                        None => -&v,
                    });
                }
            }
            Ok(acc)
        })
        .collect();
    sum_terms(t, parts)
}

/// Rejects gauge vectors touching fixed corollas, and checks edge counts
/// (`2n+k-1`) and connectedness.
pub fn validate_gauge(xi: &ConvElement) -> Result<(), OcError> {
    for (c, v) in &xi.values {
        match c {
            Corolla::Mixed(n, _) if *n >= 2 => validate_value(*c, v, c.value_edges() + 1)?,
            _ if v.is_zero() => {}
            _ => return Err(OcError::GaugeOnFixed(*c)),
        }
    }
    Ok(())
}

/// `exp(ad_ξ) α`, computed on every stored entry of the table. Each bracket
/// raises the closed arity, so the series is finite on every corolla.
pub fn gauge_apply(xi: &ConvElement, alpha: &AlphaTable) -> Result<AlphaTable, OcError> {
    validate_gauge(xi)?;
    let mut out = alpha.clone();
    if xi.is_zero() {
        return Ok(out);
    }
    let keys: Vec<(u8, u8)> = alpha.keys().filter(|&(n, _)| n >= 2).collect();
    let min_xi = xi.values.keys().map(|c| c.n_black()).min().unwrap_or(u8::MAX);
    // term_1 = [ξ, α]
    let mut term = ConvElement::new();
    for &(n, k) in &keys {
        if n < min_xi {
            continue;
        }
        let v = bracket(xi, alpha, Corolla::Mixed(n, k))?;
        if !v.is_zero() {
            term.values.insert(Corolla::Mixed(n, k), v);
        }
    }
    let mut j = 1i64;
    while !term.is_zero() {
        for (c, v) in &term.values {
            let Corolla::Mixed(n, k) = *c else { unreachable!() };
            let mut cur = out.entries.remove(&(n, k)).expect("keys come from the table");
            cur += v;
            out.entries.insert((n, k), cur);
        }
        j += 1;
        let mut next = ConvElement::new();
        for &(n, k) in &keys {
            let v = bracket(xi, &term, Corolla::Mixed(n, k))?;
            if !v.is_zero() {
                next.values.insert(Corolla::Mixed(n, k), v.scaled(&Q::new(1.into(), j.into())));
            }
        }
        term = next;
    }
    Ok(out)
}

/// Outcome of checking one corolla.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// Nonzero evaluation (number of surviving terms) or a failed boundary
    /// condition.
    Fail(String),
    /// The expansion leaves the table.
    Unchecked(Corolla),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => write!(f, "PASS"),
            Verdict::Fail(why) => write!(f, "FAIL {why}"),
            Verdict::Unchecked(c) => write!(f, "UNCHECKED needs {c}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub verdicts: Vec<(Corolla, Verdict)>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|(_, v)| !matches!(v, Verdict::Fail(_)))
    }
    pub fn count(&self, pred: impl Fn(&Verdict) -> bool) -> usize {
        self.verdicts.iter().filter(|(_, v)| pred(v)).count()
    }
    pub fn failures(&self) -> Vec<Corolla> {
        self.verdicts.iter().filter(|(_, v)| matches!(v, Verdict::Fail(_))).map(|(c, _)| *c).collect()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, v) in &self.verdicts {
            writeln!(f, "{c} {v}")?;
        }
        Ok(())
    }
}

/// The corollas `mc_verify` looks at, in report order.
pub fn verify_corollas(cutoff: Cutoff) -> Vec<Corolla> {
    let mut out = vec![Corolla::Closed(3), Corolla::Closed(4), Corolla::Open(3), Corolla::Open(4)];
    for n in 1..=cutoff.nmax {
        for k in 0..=cutoff.k_limit(n).unwrap() + 1 {
            out.push(Corolla::Mixed(n, k));
        }
    }
    let top = cutoff.nmax + 1;
    for k in 0..=cutoff.k_prime() {
        out.push(Corolla::Mixed(top, k));
    }
    out
}

/// Evaluates the Maurer–Cartan equation on every fully expandable corolla
/// and checks the boundary row against `Γ^br_k / k!`.
pub fn mc_verify(alpha: &AlphaTable) -> VerifyReport {
    let verdicts = verify_corollas(alpha.cutoff())
        .into_iter()
        .map(|c| {
            if let Corolla::Mixed(1, k) = c {
                if let Some(v) = alpha.get(1, k) {
                    if *v != boundary_value(c).unwrap() {
                        return (c, Verdict::Fail("boundary value differs from the broom".into()));
                    }
                }
            }
            let v = match mc_evaluate(alpha, c) {
                Ok(v) if v.is_zero() => Verdict::Pass,
                Ok(v) => Verdict::Fail(format!("{} nonzero terms", v.len())),
                Err(OcError::Missing(m)) => Verdict::Unchecked(m),
                Err(e) => Verdict::Fail(e.to_string()),
            };
            (c, v)
        })
        .collect();
    VerifyReport { verdicts }
}
