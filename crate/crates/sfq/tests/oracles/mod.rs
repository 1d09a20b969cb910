//! Hand expansions of the Maurer–Cartan equation on low corollas, rebuilt
//! from `KGra` insertions and explicit shuffle sums, and compared exactly
//! with `mc_evaluate`.
//!
//! The tables used here carry arbitrary (non-solution) values, so every
//! block of every expansion is exercised with nonzero coefficients. Each
//! check returns the number of corollas compared, or a description of the
//! first mismatch.

use sfq::graph::{q, qi, Color, GraphVector, Q};
use sfq::homology::hoch;
use sfq::induction::connected_basis;
use sfq::kgra::{broom, gamma_edge, insert_black, insert_white};
use sfq::oc::{mc_evaluate, AlphaTable, Corolla, Cutoff, Values};

/// Label maps `S ++ complement(S)` for every `r`-subset `S` of `1..=n`,
/// so that vertex `i` of the composite gets label `σ(i)`.
fn shuffles(r: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..1 << n {
        if mask.count_ones() as usize != r {
            continue;
        }
        let pick: Vec<usize> = (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        let rest: Vec<usize> = (1..=n).filter(|i| mask >> (i - 1) & 1 == 0).collect();
        out.push([pick, rest].concat());
    }
    out
}

fn sym(v: &GraphVector, perms: &[Vec<usize>]) -> GraphVector {
    let mut out = GraphVector::zero(v.n_black(), v.n_white(), v.color());
    for s in perms {
        out += &v.act_black(s);
    }
    out
}

fn sign(e: usize) -> Q {
    if e % 2 == 0 {
        qi(1)
    } else {
        qi(-1)
    }
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

fn broom_value(k: usize) -> GraphVector {
    broom(k as u8).scaled(&q(1, factorial(k)))
}

fn ow(a: &GraphVector, slot: usize, b: &GraphVector) -> GraphVector {
    insert_white(a, slot, b).unwrap()
}

fn gamma_edge_open_slot(a: &GraphVector) -> GraphVector {
    insert_black(a, 1, &gamma_edge()).unwrap()
}

/// Table with row `1` fixed and the given entries filled with a
/// deterministic mix of connected black-symmetric graphs.
fn arbitrary_table(cutoff: Cutoff, entries: &[(u8, u8)]) -> AlphaTable {
    let mut t = AlphaTable::boundary(cutoff);
    for (salt, &(n, k)) in entries.iter().enumerate() {
        let c = Corolla::Mixed(n, k);
        let mut v = GraphVector::zero(n, k, Color::Open);
        if (n, k) != (2, 0) {
            for (i, b) in connected_basis(n, k, c.value_edges(), false).iter().enumerate() {
                let x = ((i + 3 * salt) * 7 + 3) % 11;
                v.add_scaled(b, &q(x as i64 - 5, 1 + (i % 3) as i64));
            }
            assert!(!v.is_zero(), "{c} has no connected graphs");
        }
        t.set(n, k, v).unwrap();
    }
    t
}

fn val(t: &AlphaTable, n: usize, k: usize) -> GraphVector {
    t.value(Corolla::Mixed(n as u8, k as u8)).unwrap().into_owned()
}

/// `𝒟(t_{m,k})` evaluated term by term:
/// `∂^Hoch α(t_{m,k-1}) + (-1)^k Σ_{Sh(2,m-2)} α(t_{m-1,k}) ∘_{1,𝔠} Γ_{•–•}
///  − Σ_r Σ_{Sh(r,m-r)} Σ_{p≤q≤k} (-1)^{p+(k-q)(q-p)} α(t_{r,p+k-q+1}) ∘_{p+1} α(t_{m-r,q-p})`.
fn general_expansion(t: &AlphaTable, m: usize, k: usize) -> GraphVector {
    let mut out = GraphVector::zero(m as u8, k as u8, Color::Open);
    if k >= 1 {
        out += &hoch(&val(t, m, k - 1)).unwrap();
    }
    let closed = sym(&gamma_edge_open_slot(&val(t, m - 1, k)), &shuffles(2, m));
    out.add_scaled(&closed, &sign(k));
    for r in 1..m {
        for p in 0..=k {
            for qq in p..=k {
                let x = ow(&val(t, r, p + k - qq + 1), p + 1, &val(t, m - r, qq - p));
                out.add_scaled(&sym(&x, &shuffles(r, m)), &-sign(p + (k - qq) * (qq - p)));
            }
        }
    }
    out
}

fn matches(t: &AlphaTable, c: Corolla, expected: &GraphVector) -> Result<(), String> {
    let got = mc_evaluate(t, c).map_err(|e| format!("{c}: {e}"))?;
    let diff = &got - expected;
    if diff.is_zero() {
        Ok(())
    } else {
        Err(format!("{c}: {} terms differ", diff.len()))
    }
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

/// `∂^Hoch α(t_{2,k-1})` minus the broom products, at `t_{2,k}` for `k ≤ 4`.
pub fn level_two() -> Result<usize, String> {
    let t = arbitrary_table(Cutoff::new(2, 3), &[(2, 0), (2, 1), (2, 2), (2, 3)]);
    for k in 1..=4usize {
        let c = Corolla::Mixed(2, k as u8);
        // ∂^Hoch α(t_{2,k-1}) − RHS, with the right-hand side as displayed
        let mut rhs = gamma_edge_open_slot(&broom_value(k)).scaled(&-sign(k));
        for p in 0..=k {
            for qq in p..=k {
                let x = q(1, factorial(k - qq + p + 1) * factorial(qq - p));
                let g = ow(&broom(k as u8 - qq as u8 + p as u8 + 1), p + 1, &broom((qq - p) as u8));
                rhs.add_scaled(&(&g + &g.act_black(&[2, 1])), &(sign(p + (k - qq) * (qq - p)) * x));
            }
        }
        let expected = &hoch(&val(&t, 2, k - 1)).unwrap() - &rhs;
        // the k = 1 expansion cancels identically
        ensure(expected.is_zero() == (k == 1), || format!("{c}: unexpected vanishing pattern"))?;
        matches(&t, c, &expected)?;
        ensure(general_expansion(&t, 2, k) == expected, || format!("{c}: general form disagrees"))?;
    }
    Ok(4)
}

/// The five blocks at `t_{3,q-1}`, `q ≤ 3`: pikes, `∂^Hoch` image, pike
/// line and the two broom families.
pub fn five_block() -> Result<usize, String> {
    let t = arbitrary_table(Cutoff::new(3, 1), &[(2, 0), (2, 1), (2, 2), (2, 3), (3, 0), (3, 1)]);
    let cyclic = [vec![1, 2, 3], vec![2, 3, 1], vec![3, 1, 2]];
    for qv in 1..=3usize {
        let c = Corolla::Mixed(3, qv as u8 - 1);
        // pikes from the closed insertion (α(t_{2,0}) is taken to be zero)
        let mut e = sym(&gamma_edge_open_slot(&val(&t, 2, qv - 1)), &shuffles(2, 3)).scaled(&sign(qv - 1));
        // image of ∂^Hoch
        if qv >= 2 {
            e += &hoch(&val(&t, 3, qv - 2)).unwrap();
        }
        // pike line
        for p in 1..=qv {
            e.add_scaled(&sym(&ow(&val(&t, 2, qv), p, &broom(0)), &cyclic), &sign(p));
        }
        // the rest
        for k in 1..qv {
            for p in 1..=qv - k {
                let s = sign(p + k * (qv - p - k));
                let a = ow(&val(&t, 2, qv - k), p, &broom(k as u8)).scaled(&q(1, factorial(k)));
                e.add_scaled(&sym(&a, &cyclic), &s);
                let b = ow(&broom((qv - k) as u8), p, &val(&t, 2, k)).scaled(&q(1, factorial(qv - k)));
                e.add_scaled(&sym(&b, &cyclic), &s);
            }
        }
        ensure(!e.is_zero(), || format!("{c}: expansion vanished"))?;
        matches(&t, c, &e)?;
    }
    Ok(3)
}

/// The general quadratic expansion at `t_{3,k}`, `k ≤ 2`.
pub fn general_level_three() -> Result<usize, String> {
    let t = arbitrary_table(Cutoff::new(3, 1), &[(2, 0), (2, 1), (2, 2), (2, 3), (3, 0), (3, 1)]);
    for k in 0..=2usize {
        let c = Corolla::Mixed(3, k as u8);
        let e = general_expansion(&t, 3, k);
        ensure(!e.is_zero(), || format!("{c}: expansion vanished"))?;
        matches(&t, c, &e)?;
    }
    Ok(3)
}

/// The top-row blocks at `t_{m+1,0}` for `m = 3`: closed insertion, arrow
/// in, arrow out and the rational line.
pub fn top_row() -> Result<usize, String> {
    let m = 3usize;
    let c = Corolla::Mixed(m as u8 + 1, 0);
    let t = arbitrary_table(Cutoff::new(4, 0), &[(2, 0), (2, 1), (3, 0), (3, 1)]);
    let a_m0 = val(&t, m, 0);
    // closed insertion of Γ_{•–•} into α(t_{m,0})
    let mut e = sym(&gamma_edge_open_slot(&a_m0), &shuffles(2, m + 1));
    // arrow in: σ_{m+1,i} = (i, i-1, …, 1) moves the broom's vertex to i
    let arrow_in = ow(&broom(1), 1, &a_m0);
    for i in 1..=m + 1 {
        e -= &arrow_in.act_black(&cycle_down(m + 1, i));
    }
    // arrow out: τ_{m+1,i} = (i, i+1, …, m+1) moves the new vertex to i
    let arrow_out = ow(&val(&t, m, 1), 1, &broom(0));
    for i in 1..=m + 1 {
        e -= &arrow_out.act_black(&cycle_up(m + 1, i));
    }
    // the rational line
    for r in 2..m {
        e -= &sym(&ow(&val(&t, r, 1), 1, &val(&t, m + 1 - r, 0)), &shuffles(r, m + 1));
    }
    ensure(!e.is_zero(), || format!("{c}: expansion vanished"))?;
    matches(&t, c, &e)?;
    ensure(general_expansion(&t, m + 1, 0) == e, || format!("{c}: general form disagrees"))?;
    Ok(1)
}

/// The cycle `(i, i-1, …, 1)` as a label map: `1 ↦ i`, `j ↦ j-1` for `2 ≤ j ≤ i`.
fn cycle_down(n: usize, i: usize) -> Vec<usize> {
    (1..=n).map(|j| if j == 1 { i } else if j <= i { j - 1 } else { j }).collect()
}

/// The cycle `(i, i+1, …, n)` as a label map: `n ↦ i`, `j ↦ j+1` for `i ≤ j < n`.
fn cycle_up(n: usize, i: usize) -> Vec<usize> {
    (1..=n).map(|j| if j == n { i } else if j >= i { j + 1 } else { j }).collect()
}
