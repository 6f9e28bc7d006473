//! Whole input spaces for exhaustive roundtrips, plus uniform samplers for
//! the random ones.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Graph, Permutation};
use crate::bitcodes::BitString;

/// All `2^n` strings of length `n`, in increasing order of their value read
/// little-endian. `n < 64`.
pub fn bit_strings(n: usize) -> impl Iterator<Item = BitString> {
    assert!(n < 64, "2^{n} strings do not fit a u64 counter");
    (0u64..1 << n).map(move |v| (0..n).map(|i| v >> i & 1 == 1).collect())
}

/// All `n^n` ways to drop `n` balls into `n` urns.
pub fn urn_assignments(n: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = (n as u64).checked_pow(n as u32).expect("n^n overflows u64");
    (0..total).map(move |mut code| {
        (0..n)
            .map(|_| {
                let u = (code % n as u64) as usize;
                code /= n as u64;
                u
            })
            .collect()
    })
}

/// All `2^C(n,2)` labelled graphs on `n` vertices.
pub fn graphs(n: usize) -> impl Iterator<Item = Graph> {
    bit_strings(n * n.saturating_sub(1) / 2).map(move |bits| Graph::from_upper_bits(n, &bits).unwrap())
}

/// Steps `a` to its lexicographic successor; `false` once `a` is the last.
pub fn next_permutation(a: &mut [u32]) -> bool {
    let Some(i) = (1..a.len()).rev().find(|&i| a[i - 1] < a[i]) else {
        return false;
    };
    let j = (i..a.len()).rev().find(|&j| a[j] > a[i - 1]).unwrap();
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// All `n!` permutations of `1..=n` in lexicographic order.
pub fn permutations(n: usize) -> impl Iterator<Item = Permutation> {
    let mut next: Option<Permutation> = Some((1..=n as u32).collect());
    std::iter::from_fn(move || {
        let cur = next.take()?;
        let mut succ = cur.clone();
        if next_permutation(&mut succ) {
            next = Some(succ);
        }
        Some(cur)
    })
}

pub fn random_bit_string<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BitString {
    (0..n).map(|_| rng.gen::<bool>()).collect()
}

pub fn random_urn_assignment<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

/// `G(n, p)`.
pub fn random_graph<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut g = Graph::empty(n);
    for v in 1..n {
        for u in 0..v {
            if rng.gen_bool(p) {
                g.set_edge(u, v, true);
            }
        }
    }
    g
}

pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
    let mut sigma: Permutation = (1..=n as u32).collect();
    sigma.shuffle(rng);
    sigma
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn sizes() {
        assert_eq!(bit_strings(5).collect::<HashSet<_>>().len(), 32);
        assert_eq!(urn_assignments(4).collect::<HashSet<_>>().len(), 256);
        assert_eq!(graphs(5).count(), 1024);
        let perms: Vec<_> = permutations(5).collect();
        assert_eq!(perms.len(), 120);
        assert!(perms.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(permutations(1).count(), 1);
        assert_eq!(bit_strings(0).count(), 1);
    }
}
