use super::WitnessCodec;
use crate::bitcodes::{
    composition_count, composition_rank, composition_unrank, fixed_decode, fixed_encode_into, BitString,
};
use crate::error::{Error, Result};

/// A permutation of `1..=n` in one-line notation.
pub type Permutation = Vec<u32>;

fn check_permutation(sigma: &[u32]) -> Result<()> {
    let n = sigma.len();
    let mut seen = vec![false; n + 1];
    for &v in sigma {
        let v = v as usize;
        if v == 0 || v > n || seen[v] {
            return Err(Error::arg("sigma", format!("not a permutation of 1..={n}")));
        }
        seen[v] = true;
    }
    Ok(())
}

/// Swaps performed by each outer iteration of insertion sort.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SwapProfile {
    /// `counts[i − 2] = m_i` for `i = 2..=n`.
    pub counts: Vec<u64>,
}

impl SwapProfile {
    /// `m_i`, using the 1-based iteration index.
    pub fn m(&self, i: usize) -> u64 {
        self.counts[i - 2]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Length of the permutation the profile describes.
    pub fn n(&self) -> usize {
        self.counts.len() + 1
    }
}

/// Runs insertion sort on a copy of `sigma` and records `m_i`.
pub fn insertion_sort_profile(sigma: &[u32]) -> Result<SwapProfile> {
    check_permutation(sigma)?;
    let n = sigma.len();
    // 1-based, as in the pseudocode; s[0] is unused.
    let mut s = Vec::with_capacity(n + 1);
    s.push(0);
    s.extend_from_slice(sigma);
    let mut counts = Vec::with_capacity(n.saturating_sub(1));
    for i in 2..=n {
        let mut m = 0;
        let mut j = i;
        while j > 1 && s[j - 1] > s[j] {
            s.swap(j, j - 1);
            m += 1;
            j -= 1;
        }
        counts.push(m);
    }
    Ok(SwapProfile { counts })
}

/// The same profile in `O(n log n)`: `m_i` counts the earlier values larger
/// than `σ_i`, which is how far insertion sort moves it.
pub fn inversion_profile(sigma: &[u32]) -> Result<SwapProfile> {
    check_permutation(sigma)?;
    let n = sigma.len();
    let mut tree = vec![0u32; n + 1];
    let mut counts = Vec::with_capacity(n.saturating_sub(1));
    for (seen, &v) in sigma.iter().enumerate() {
        let mut at_most = 0;
        let mut k = v as usize;
        while k > 0 {
            at_most += tree[k];
            k &= k - 1;
        }
        if seen > 0 {
            counts.push(seen as u64 - at_most as u64);
        }
        let mut k = v as usize;
        while k <= n {
            tree[k] += 1;
            k += k & k.wrapping_neg();
        }
    }
    Ok(SwapProfile { counts })
}

/// Undoes insertion sort from its swap profile.
pub fn insertion_sort_reconstruct(profile: &SwapProfile) -> Result<Permutation> {
    let n = profile.n();
    for i in 2..=n {
        if profile.m(i) > i as u64 - 1 {
            return Err(Error::range(profile.m(i), format!("m_{i} <= {}", i - 1)));
        }
    }
    let mut s: Vec<u32> = (0..=n as u32).collect();
    for i in (2..=n).rev() {
        for j in i - profile.m(i) as usize + 1..=i {
            s.swap(j, j - 1);
        }
    }
    s.remove(0);
    Ok(s)
}

/// Every permutation of size `n`: `m = Σ m_i` in `⌈log n²⌉` bits, then the
/// rank of `(m_2, …, m_n)` among the `C(m + n − 2, n − 2)` compositions of `m`
/// into `n − 1` parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InsSortCodec {
    n: usize,
}

impl InsSortCodec {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::arg("n", "must be positive"));
        }
        // The composition count must fit the rank arithmetic for every m.
        let max_m = (n * (n - 1) / 2) as u64;
        composition_count(max_m, n as u64 - 1)?;
        Ok(InsSortCodec { n })
    }

    fn m_domain(&self) -> u128 {
        (self.n as u128).pow(2)
    }

    /// Codeword length for a permutation with `m` inversions.
    pub fn codeword_len(&self, m: u64) -> usize {
        let w = |x: u128| crate::bitcodes::fixed_width(x).unwrap() as usize;
        w(self.m_domain()) + w(composition_count(m, self.n as u64 - 1).unwrap())
    }
}

impl WitnessCodec for InsSortCodec {
    type Input = Permutation;

    fn encode(&self, sigma: &Permutation) -> Result<BitString> {
        if sigma.len() != self.n {
            return Err(Error::arg("sigma", format!("has length {}, expected {}", sigma.len(), self.n)));
        }
        let profile = insertion_sort_profile(sigma)?;
        let m = profile.total();
        let mut c = BitString::with_capacity(self.codeword_len(m));
        fixed_encode_into(&mut c, m as u128, self.m_domain())?;
        let count = composition_count(m, self.n as u64 - 1)?;
        fixed_encode_into(&mut c, composition_rank(&profile.counts)?, count)?;
        Ok(c)
    }

    fn decode(&self, c: &BitString) -> Result<Permutation> {
        let mut r = c.reader();
        let m = fixed_decode(&mut r, self.m_domain())? as u64;
        let count = composition_count(m, self.n as u64 - 1)?;
        let rank = fixed_decode(&mut r, count)?;
        if !r.is_at_end() {
            return Err(Error::Malformed(format!("{} trailing bits", r.remaining())));
        }
        let counts = composition_unrank(m, self.n - 1, rank)?;
        insertion_sort_reconstruct(&SwapProfile { counts }).map_err(|e| Error::Malformed(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witnesses::roundtrip;

    /// All permutations of 1..=n in lexicographic order.
    pub(crate) fn permutations(n: usize) -> Vec<Permutation> {
        fn go(prefix: &mut Vec<u32>, left: &mut Vec<u32>, out: &mut Vec<Permutation>) {
            if left.is_empty() {
                out.push(prefix.clone());
            }
            for k in 0..left.len() {
                let v = left.remove(k);
                prefix.push(v);
                go(prefix, left, out);
                prefix.pop();
                left.insert(k, v);
            }
        }
        let mut out = Vec::new();
        go(&mut Vec::new(), &mut (1..=n as u32).collect(), &mut out);
        out
    }

    fn inversions(sigma: &[u32]) -> u64 {
        let mut count = 0;
        for p in 0..sigma.len() {
            for q in p + 1..sigma.len() {
                count += (sigma[p] > sigma[q]) as u64;
            }
        }
        count
    }

    #[test]
    fn traces() {
        assert_eq!(insertion_sort_profile(&[1, 2, 3, 4]).unwrap().counts, vec![0, 0, 0]);
        assert_eq!(insertion_sort_profile(&[2, 1]).unwrap().counts, vec![1]);
        assert_eq!(insertion_sort_profile(&[5, 4, 3, 2, 1]).unwrap().counts, vec![1, 2, 3, 4]);
        assert_eq!(insertion_sort_reconstruct(&SwapProfile { counts: vec![1] }).unwrap(), vec![2, 1]);
        assert_eq!(insertion_sort_reconstruct(&SwapProfile { counts: vec![0; 4] }).unwrap(), vec![1, 2, 3, 4, 5]);
        assert!(insertion_sort_reconstruct(&SwapProfile { counts: vec![2] }).is_err());
        assert!(insertion_sort_profile(&[1, 1]).is_err());
        assert!(insertion_sort_profile(&[0, 1]).is_err());
    }

    #[test]
    fn reconstruct_inverts_profile_up_to_7() {
        for n in 1..=7 {
            for sigma in permutations(n) {
                let p = insertion_sort_profile(&sigma).unwrap();
                assert_eq!(p.total(), inversions(&sigma));
                assert_eq!(inversion_profile(&sigma).unwrap(), p);
                assert_eq!(insertion_sort_reconstruct(&p).unwrap(), sigma);
            }
        }
    }

    #[test]
    fn codec_exhaustive_up_to_6() {
        for n in 1..=6 {
            let codec = InsSortCodec::new(n).unwrap();
            let perms = permutations(n);
            for sigma in &perms {
                let c = codec.encode(sigma).unwrap();
                assert_eq!(c.len(), codec.codeword_len(inversions(sigma)));
            }
            let report = roundtrip(&codec, perms);
            assert_eq!(report.failures, 0);
            assert_eq!(report.distinct, report.domain);
        }
        let identity = InsSortCodec::new(5).unwrap().encode(&vec![1, 2, 3, 4, 5]).unwrap();
        assert!(identity.iter().all(|b| !b));
    }

    #[test]
    fn length_stays_within_budget() {
        // ⌈2 log n⌉ + ⌈log C(m + n − 2, n − 2)⌉ for every m.
        let n = 20u64;
        assert!(InsSortCodec::new(30).is_err(), "ranks beyond 128 bits are refused");
        let codec = InsSortCodec::new(n as usize).unwrap();
        for m in 0..=n * (n - 1) / 2 {
            let budget = (2.0 * (n as f64).log2()).ceil() + crate::entropy::log_binomial(m + n - 2, n - 2).ceil();
            assert!(codec.codeword_len(m) as f64 <= budget + 1e-9);
        }
    }
}
