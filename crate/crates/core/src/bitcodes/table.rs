use super::bitstring::{BitReader, BitString};
use crate::error::{Error, Result};

/// Absolute tolerance on `Σ p_x = 1`.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// A probability distribution over outcomes `0..len`, in support order.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDensity {
    masses: Vec<f64>,
}

impl FiniteDensity {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::arg("masses", "support is empty"));
        }
        if let Some((i, &p)) = masses.iter().enumerate().find(|(_, &p)| !(p > 0.0 && p <= 1.0)) {
            return Err(Error::arg("masses", format!("mass {p} of outcome {i} is not in (0, 1]")));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::arg("masses", format!("masses sum to {total}, not 1")));
        }
        Ok(FiniteDensity { masses })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn mass(&self, x: usize) -> f64 {
        self.masses[x]
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }
}

/// A partial code: outcome index → codeword, `None` where the outcome is not
/// encoded (length ∞ by convention).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeTable {
    entries: Vec<Option<BitString>>,
}

impl CodeTable {
    /// Builds a table, rejecting it unless it is injective and prefix-free.
    pub fn new(entries: Vec<Option<BitString>>) -> Result<Self> {
        let table = CodeTable { entries };
        table.check_prefix_free()?;
        Ok(table)
    }

    pub fn total(entries: Vec<BitString>) -> Result<Self> {
        Self::new(entries.into_iter().map(Some).collect())
    }

    fn check_prefix_free(&self) -> Result<()> {
        let mut words: Vec<(Vec<bool>, usize)> =
            self.entries.iter().enumerate().filter_map(|(x, c)| c.as_ref().map(|c| (c.iter().collect(), x))).collect();
        words.sort();
        // After sorting, any prefix relation shows up between neighbours.
        for w in words.windows(2) {
            let (a, xa) = &w[0];
            let (b, xb) = &w[1];
            if a == b {
                return Err(Error::arg("entries", format!("outcomes {xa} and {xb} share a codeword")));
            }
            if b.starts_with(a) {
                return Err(Error::arg("entries", format!("codeword of outcome {xa} is a prefix of outcome {xb}'s")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn codeword(&self, x: usize) -> Option<&BitString> {
        self.entries.get(x).and_then(Option::as_ref)
    }

    /// |C(x)|, or `f64::INFINITY` when `x` has no codeword.
    pub fn length(&self, x: usize) -> f64 {
        self.codeword(x).map_or(f64::INFINITY, |c| c.len() as f64)
    }

    pub fn lengths(&self) -> Vec<f64> {
        (0..self.len()).map(|x| self.length(x)).collect()
    }

    pub fn kraft_sum(&self) -> f64 {
        kraft_sum(&self.lengths()).expect("codeword lengths are nonnegative")
    }

    /// Number of codewords of length at most `k`.
    pub fn count_at_most(&self, k: usize) -> usize {
        self.entries.iter().flatten().filter(|c| c.len() <= k).count()
    }

    /// Reads one codeword from the stream and returns its outcome.
    pub fn decode(&self, reader: &mut BitReader<'_>) -> Result<usize> {
        let start = reader.position();
        let mut read = BitString::new();
        let max_len = self.entries.iter().flatten().map(BitString::len).max().unwrap_or(0);
        while read.len() < max_len {
            read.push(reader.read_bit()?);
            if let Some(x) = self.entries.iter().position(|c| c.as_ref() == Some(&read)) {
                return Ok(x);
            }
        }
        Err(Error::Malformed(format!("no codeword matches the bits at position {start}")))
    }
}

/// Shannon-Fano code: outcome `x` gets a codeword of exactly ⌈log₂(1/p_x)⌉ bits.
///
/// Outcomes are taken in order of decreasing mass (ties in support order) and
/// assigned consecutive canonical codewords, so the lengths come out
/// nondecreasing and each codeword is the smallest one not yet covered by an
/// earlier codeword.
pub fn shannon_fano_build(p: &FiniteDensity) -> Result<CodeTable> {
    let lengths: Vec<u32> = p.masses().iter().map(|&m| (1.0 / m).log2().ceil() as u32).collect();
    if let Some(&l) = lengths.iter().find(|&&l| l > 127) {
        return Err(Error::Overflow(format!("{l}-bit Shannon-Fano codeword")));
    }
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| p.mass(b).total_cmp(&p.mass(a)).then(a.cmp(&b)));

    let mut entries = vec![None; p.len()];
    let mut next: u128 = 0;
    let mut prev_len = 0u32;
    for (rank, &x) in order.iter().enumerate() {
        let len = lengths[x].max(prev_len);
        debug_assert_eq!(len, lengths[x], "lengths are monotone in decreasing mass");
        if rank > 0 {
            next = (next + 1) << (len - prev_len);
        }
        if len < 128 && next >> len != 0 {
            return Err(Error::Infeasible("codeword lengths violate Kraft's condition".into()));
        }
        let mut c = BitString::with_capacity(len as usize);
        c.push_uint(next, len);
        entries[x] = Some(c);
        prev_len = len;
    }
    CodeTable::new(entries)
}

/// Real-valued Shannon-Fano length of `x` under Bernoulli(α):
/// `n1(x)·log(1/α) + n0(x)·log(1/(1−α))`.
pub fn bernoulli_codeword_length(x: &BitString, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::arg("alpha", format!("{alpha} is not in (0, 1)")));
    }
    Ok(x.count_ones() as f64 * (1.0 / alpha).log2() + x.count_zeros() as f64 * (1.0 / (1.0 - alpha)).log2())
}

/// `Σ 2^(−ℓ)`; infinite lengths contribute nothing.
pub fn kraft_sum(lengths: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for &l in lengths {
        if l.is_nan() || l < 0.0 {
            return Err(Error::arg("lengths", format!("length {l} is negative")));
        }
        total += (-l).exp2();
    }
    Ok(total)
}

/// Closed-form Kraft sums of the integer codes over their whole infinite
/// domains. Each family groups its codewords into classes `b = 1, 2, …`
/// whose contribution is geometric, `a·r^(b−1)`, so the sum is `a / (1 − r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KraftFamily {
    /// Class `b` is the single value `b − 1` with length `b`: `a = 1/2, r = 1/2`.
    Unary,
    /// Class `b` holds the `2^(b−1)` values of bit length `b`, each of length
    /// `2b`: contribution `2^(b−1)·2^(−2b) = 2^(−b−1)`.
    EliasGamma,
    /// Class `c` gathers values whose length prefix has bit length `c`; the
    /// prefix costs `2c` bits and the class sums to `2^(c−1)·2^(−2c)`.
    EliasDelta,
}

impl KraftFamily {
    pub fn series(self) -> (f64, f64) {
        match self {
            KraftFamily::Unary => (0.5, 0.5),
            KraftFamily::EliasGamma | KraftFamily::EliasDelta => (0.25, 0.5),
        }
    }

    pub fn analytic_sum(self) -> f64 {
        let (a, r) = self.series();
        a / (1.0 - r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcodes::integer::IntegerCode;

    fn table(words: &[&str]) -> Result<CodeTable> {
        CodeTable::total(words.iter().map(|w| w.parse().unwrap()).collect())
    }

    #[test]
    fn density_validation() {
        assert!(FiniteDensity::new(vec![0.5, 0.5]).is_ok());
        assert!(FiniteDensity::new(vec![0.5, 0.4]).is_err());
        assert!(FiniteDensity::new(vec![1.0, 0.0]).is_err());
        assert!(FiniteDensity::new(vec![]).is_err());
        assert!(FiniteDensity::new(vec![1.0 / 3.0; 3]).is_ok());
    }

    #[test]
    fn table_validation() {
        assert!(table(&["10", "111", "01"]).is_ok());
        assert!(table(&["10", "111", "1011"]).is_err());
        assert!(table(&["01", "1110", "01"]).is_err());
        let t = table(&["0", "100", "1010", "1011", "110", "1111"]).unwrap();
        assert_eq!(t.count_at_most(3), 3);
        assert_eq!(t.kraft_sum(), 0.5 + 0.125 + 0.0625 + 0.0625 + 0.125 + 0.0625);
    }

    #[test]
    fn partial_table_has_infinite_lengths() {
        let t = CodeTable::new(vec![Some("01".parse().unwrap()), Some("1110".parse().unwrap()), None]).unwrap();
        assert_eq!(t.lengths(), vec![2.0, 4.0, f64::INFINITY]);
    }

    fn sf_lengths(masses: Vec<f64>) -> Vec<usize> {
        let t = shannon_fano_build(&FiniteDensity::new(masses).unwrap()).unwrap();
        (0..t.len()).map(|x| t.codeword(x).unwrap().len()).collect()
    }

    #[test]
    fn shannon_fano_examples() {
        assert_eq!(sf_lengths(vec![0.25; 4]), vec![2, 2, 2, 2]);
        assert_eq!(sf_lengths(vec![0.5, 0.25, 0.25]), vec![1, 2, 2]);
        assert_eq!(sf_lengths(vec![0.4, 0.3, 0.3]), vec![2, 2, 2]);
        // Order of the support does not matter for lengths.
        assert_eq!(sf_lengths(vec![0.1, 0.6, 0.3]), vec![4, 1, 2]);
    }

    #[test]
    fn shannon_fano_decodes_streams() {
        let p = FiniteDensity::new(vec![0.05, 0.5, 0.2, 0.15, 0.1]).unwrap();
        let t = shannon_fano_build(&p).unwrap();
        let msg = [1, 4, 0, 0, 2, 3, 1];
        let bits = BitString::concat(msg.iter().map(|&x| t.codeword(x).unwrap()));
        let mut r = bits.reader();
        let decoded: Vec<usize> = (0..msg.len()).map(|_| t.decode(&mut r).unwrap()).collect();
        assert_eq!(decoded, msg);
        assert!(r.is_at_end());
    }

    #[test]
    fn bernoulli_lengths() {
        let x: BitString = "1111".parse().unwrap();
        assert_eq!(bernoulli_codeword_length(&x, 0.5).unwrap(), 4.0);
        let y: BitString = "1000".parse().unwrap();
        let expected = 2.0 + 3.0 * (4.0f64 / 3.0).log2();
        assert!((bernoulli_codeword_length(&y, 0.25).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 3.2451).abs() < 1e-4);
        assert!(bernoulli_codeword_length(&y, 0.0).is_err());
        assert!(bernoulli_codeword_length(&y, 1.0).is_err());
    }

    #[test]
    fn kraft_sums() {
        assert_eq!(kraft_sum(&[1.0, 2.0, 2.0]).unwrap(), 1.0);
        assert_eq!(kraft_sum(&[1.0, f64::INFINITY]).unwrap(), 0.5);
        assert!(kraft_sum(&[-1.0]).is_err());
        assert_eq!(KraftFamily::Unary.analytic_sum(), 1.0);
        assert_eq!(KraftFamily::EliasGamma.analytic_sum(), 0.5);
        assert_eq!(KraftFamily::EliasDelta.analytic_sum(), 0.5);
    }

    #[test]
    fn analytic_sums_agree_with_partial_sums() {
        // Oracle: sum the actual codeword lengths for every value up to 2^B - 1
        // and add the analytic tail beyond class B.
        for (family, code) in
            [(KraftFamily::EliasGamma, IntegerCode::EliasGamma), (KraftFamily::EliasDelta, IntegerCode::EliasDelta)]
        {
            let lengths: Vec<f64> = (1u64..1 << 16).map(|i| code.codeword_len(i).unwrap() as f64).collect();
            let partial = kraft_sum(&lengths).unwrap();
            let (a, r) = family.series();
            let classes = match family {
                KraftFamily::EliasGamma => 16,
                // values below 2^16 cover delta classes c with 2^c - 1 <= 16.
                _ => 4,
            };
            let covered: f64 = (1..=classes).map(|b| a * r.powi(b - 1)).sum();
            if family == KraftFamily::EliasGamma {
                assert_eq!(partial, covered);
            } else {
                assert!(partial >= covered && partial <= family.analytic_sum());
            }
        }
        let unary: Vec<f64> = (0..60).map(|i| (i + 1) as f64).collect();
        assert!((kraft_sum(&unary).unwrap() - KraftFamily::Unary.analytic_sum()).abs() < 1e-15);
    }

    proptest::proptest! {
        #[test]
        fn shannon_fano_respects_kraft(weights in proptest::collection::vec(1u32..1000, 1..40)) {
            let total: f64 = weights.iter().map(|&w| w as f64).sum();
            let masses: Vec<f64> = weights.iter().map(|&w| w as f64 / total).collect();
            let p = FiniteDensity::new(masses.clone()).unwrap();
            let t = shannon_fano_build(&p).unwrap();
            proptest::prop_assert!(t.kraft_sum() <= 1.0 + 1e-12);
            for (x, &m) in masses.iter().enumerate() {
                proptest::prop_assert_eq!(t.length(x), (1.0 / m).log2().ceil());
            }
            // At most 2^k codewords of length <= k.
            for k in 0..20 {
                proptest::prop_assert!(t.count_at_most(k) <= 1 << k);
            }
        }
    }
}
