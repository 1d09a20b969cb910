//! Small permutation toolkit.
//!
//! A permutation of `{1, …, n}` is stored in one-line notation as a
//! `Vec<usize>` of images: `p[j - 1] = p(j)`. Acting on a labelled graph by
//! `p` means relabelling vertex `j` as `p(j)`.

/// The identity of `S_n`.
pub fn identity(n: usize) -> Vec<usize> {
    (1..=n).collect()
}

/// Returns true if `p` is a permutation of `1..=p.len()`.
pub fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &x in p {
        if x == 0 || x > p.len() || seen[x - 1] {
            return false;
        }
        seen[x - 1] = true;
    }
    true
}

/// Composition `(a ∘ b)(j) = a(b(j))`.
pub fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    assert_eq!(a.len(), b.len(), "composing permutations of different sizes");
    b.iter().map(|&j| a[j - 1]).collect()
}

pub fn inverse(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x - 1] = i + 1;
    }
    inv
}

/// Parity of a sequence of comparable items: `true` when an odd number of
/// transpositions sorts it. Quadratic, which is what we want for the tiny
/// sequences (edge lists, generator lists) this crate deals with.
pub fn odd_inversions<T: Ord>(xs: &[T]) -> bool {
    let mut odd = false;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            if xs[i] > xs[j] {
                odd = !odd;
            }
        }
    }
    odd
}

/// `true` for odd permutations.
pub fn is_odd(p: &[usize]) -> bool {
    odd_inversions(p)
}

/// All permutations of `1..=n` in lexicographic order.
pub fn all(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = identity(n);
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

/// All `p`-element subsets of `1..=n`, increasing, in lexicographic order.
pub fn subsets(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for x in start..=n {
            if n - x + 1 < left {
                break;
            }
            cur.push(x);
            rec(x + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if p <= n {
        rec(1, n, p, &mut Vec::new(), &mut out);
    }
    out
}

/// The `(p, q)`-shuffles: permutations `σ ∈ S_{p+q}` with
/// `σ(1) < … < σ(p)` and `σ(p+1) < … < σ(p+q)`.
pub fn shuffles(p: usize, q: usize) -> Vec<Vec<usize>> {
    let n = p + q;
    subsets(n, p)
        .into_iter()
        .map(|first| {
            let mut sigma = first.clone();
            sigma.extend((1..=n).filter(|x| !first.contains(x)));
            sigma
        })
        .collect()
}

/// The cycle `τ_{n,i} = (i, i+1, …, n)`: sends `j ↦ j+1` for `i ≤ j < n`
/// and `n ↦ i`.
pub fn tau(n: usize, i: usize) -> Vec<usize> {
    assert!(1 <= i && i <= n);
    (1..=n)
        .map(|j| match j {
            j if j < i => j,
            j if j == n => i,
            j => j + 1,
        })
        .collect()
}

/// The cycle `σ_{k,i} = (i, i-1, …, 1)`: sends `1 ↦ i` and `j ↦ j-1` for
/// `2 ≤ j ≤ i`.
pub fn sigma(k: usize, i: usize) -> Vec<usize> {
    assert!(1 <= i && i <= k);
    (1..=k)
        .map(|j| match j {
            1 => i,
            j if j <= i => j - 1,
            j => j,
        })
        .collect()
}

/// `n!` as a `u64`; callers only ever ask for tiny values.
pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(all(4).len(), 24);
        assert_eq!(shuffles(2, 3).len(), 10);
        assert_eq!(shuffles(0, 3), vec![vec![1, 2, 3]]);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn cycles_are_inverse_shapes() {
        // τ_{n,i} pushes the last label to position i; σ_{n,i} pulls the first
        // label to position i.
        assert_eq!(tau(4, 2), vec![1, 3, 4, 2]);
        assert_eq!(sigma(4, 3), vec![3, 1, 2, 4]);
        assert_eq!(tau(3, 3), identity(3));
        assert_eq!(sigma(3, 1), identity(3));
    }

    #[test]
    fn parity_and_inverse() {
        let p = vec![2, 3, 1];
        assert!(!is_odd(&p));
        assert!(is_odd(&[2, 1, 3]));
        assert_eq!(compose(&p, &inverse(&p)), identity(3));
    }
}
