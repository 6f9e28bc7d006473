//! Colexicographic ranking of k-subsets and of weak compositions.

use crate::error::{Error, Result};

/// `C(n, k)` in 128-bit arithmetic; `Overflow` if it does not fit.
pub fn binomial(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc = C(n, i); acc * (n - i) is divisible by i + 1. Dividing out the
        // common factor first keeps intermediates no larger than the result.
        let num = (n - i) as u128;
        let den = (i + 1) as u128;
        let g = gcd(acc, den);
        acc = (acc / g).checked_mul(num / (den / g)).ok_or_else(|| Error::Overflow(format!("C({n}, {k})")))?;
    }
    Ok(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Rank of a strictly increasing k-subset of `{0, …, n−1}` in colex order:
/// `Σ_i C(e_i, i + 1)`.
pub fn subset_rank(n: u64, elements: &[u64]) -> Result<u128> {
    let mut rank: u128 = 0;
    let mut prev: Option<u64> = None;
    for (i, &e) in elements.iter().enumerate() {
        if e >= n {
            return Err(Error::range(e, format!("< {n}")));
        }
        if prev.is_some_and(|p| e <= p) {
            return Err(Error::arg("elements", format!("not strictly increasing at position {i} ({e})")));
        }
        prev = Some(e);
        rank += binomial(e, i as u64 + 1)?;
    }
    Ok(rank)
}

/// Inverse of [`subset_rank`] for subsets of size `k`.
pub fn subset_unrank(n: u64, k: u64, mut rank: u128) -> Result<Vec<u64>> {
    let total = binomial(n, k)?;
    if rank >= total {
        return Err(Error::range(rank, format!("< C({n}, {k}) = {total}")));
    }
    let mut out = vec![0; k as usize];
    let mut hi = n;
    for i in (1..=k).rev() {
        // Largest e < hi with C(e, i) <= rank.
        let mut e = hi - 1;
        loop {
            let c = binomial(e, i)?;
            if c <= rank {
                rank -= c;
                break;
            }
            e -= 1;
        }
        out[i as usize - 1] = e;
        hi = e;
    }
    Ok(out)
}

/// Number of ways to write `total` as an ordered sum of `parts` nonnegative
/// integers: `C(total + parts − 1, parts − 1)`.
pub fn composition_count(total: u64, parts: u64) -> Result<u128> {
    match parts {
        0 => Ok((total == 0) as u128),
        _ => binomial(total + parts - 1, parts - 1),
    }
}

/// Rank of a weak composition among all compositions with the same total and
/// number of parts.
///
/// Lay out `total + parts − 1` dots; the `parts − 1` separators sit at
/// positions `p_1 + … + p_j + (j − 1)`. The composition's rank is the colex
/// rank of that separator set.
pub fn composition_rank(parts: &[u64]) -> Result<u128> {
    if parts.len() <= 1 {
        return Ok(0);
    }
    let total: u64 = parts.iter().sum();
    let dots = total + parts.len() as u64 - 1;
    let mut seps = Vec::with_capacity(parts.len() - 1);
    let mut prefix = 0;
    for (j, &p) in parts[..parts.len() - 1].iter().enumerate() {
        prefix += p;
        seps.push(prefix + j as u64);
    }
    subset_rank(dots, &seps)
}

pub fn composition_unrank(total: u64, parts: usize, rank: u128) -> Result<Vec<u64>> {
    match parts {
        0 if total == 0 && rank == 0 => return Ok(vec![]),
        0 => return Err(Error::arg("parts", "cannot split a positive total into zero parts")),
        1 if rank == 0 => return Ok(vec![total]),
        1 => return Err(Error::range(rank, "0 for a single part")),
        _ => {}
    }
    let dots = total + parts as u64 - 1;
    let seps = subset_unrank(dots, parts as u64 - 1, rank)?;
    let mut out = Vec::with_capacity(parts);
    let mut last: i128 = -1;
    for &s in &seps {
        out.push((s as i128 - last - 1) as u64);
        last = s as i128;
    }
    out.push((dots as i128 - last - 1) as u64);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// All k-subsets of {0..n-1} listed in colex order by brute force.
    fn colex_subsets(n: u64, k: usize) -> Vec<Vec<u64>> {
        let mut all: Vec<Vec<u64>> = (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
            .collect();
        // Colex: compare largest elements first.
        all.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
        all
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(4, 2).unwrap(), 6);
        assert_eq!(binomial(16, 4).unwrap(), 1820);
        assert_eq!(binomial(3, 5).unwrap(), 0);
        assert_eq!(binomial(0, 0).unwrap(), 1);
        assert_eq!(binomial(128, 64).unwrap(), 23951146041928082866135587776380551750);
        assert!(binomial(140, 70).is_err());
    }

    #[test]
    fn subset_rank_examples() {
        assert_eq!(subset_rank(4, &[0, 1]).unwrap(), 0);
        assert_eq!(subset_rank(4, &[2, 3]).unwrap(), 5);
        assert!(subset_rank(4, &[1, 1]).is_err());
        assert!(subset_rank(4, &[2, 4]).is_err());
        assert!(subset_unrank(4, 2, 6).is_err());
    }

    #[test]
    fn subset_rank_matches_enumeration() {
        for (n, k) in [(4, 2), (8, 3), (6, 0), (6, 6), (9, 4)] {
            for (expected, set) in colex_subsets(n, k).iter().enumerate() {
                assert_eq!(subset_rank(n, set).unwrap(), expected as u128);
                assert_eq!(&subset_unrank(n, k as u64, expected as u128).unwrap(), set);
            }
        }
    }

    #[test]
    fn compositions_roundtrip_exhaustively() {
        for parts in 0..5usize {
            for total in 0..7u64 {
                let count = composition_count(total, parts as u64).unwrap();
                let mut seen = std::collections::HashSet::new();
                for r in 0..count {
                    let c = composition_unrank(total, parts, r).unwrap();
                    assert_eq!(c.len(), parts);
                    assert_eq!(c.iter().sum::<u64>(), total);
                    assert_eq!(composition_rank(&c).unwrap(), r);
                    assert!(seen.insert(c));
                }
            }
        }
    }
}
