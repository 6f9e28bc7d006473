use super::WitnessCodec;
use crate::bitcodes::{fixed_decode, fixed_encode_into, fixed_width, BitString};
use crate::error::{Error, Result};

/// 0-based start of the first run of at least `t` ones in `x`.
pub fn first_run(x: &BitString, t: usize) -> Option<usize> {
    if t == 0 {
        return Some(0);
    }
    let mut len = 0;
    for (i, bit) in x.iter().enumerate() {
        len = if bit { len + 1 } else { 0 };
        if len == t {
            return Some(i + 1 - t);
        }
    }
    None
}

/// An `n`-bit string with a run of `t` ones, written as the run's start
/// index followed by the `n − t` bits outside the run.
///
/// ```
/// # use encbound::witnesses::{RunsCodec, WitnessCodec};
/// let codec = RunsCodec::new(8, 4).unwrap();
/// let c = codec.encode(&"10111110".parse().unwrap()).unwrap();
/// assert_eq!(c.to_string(), "0101010");
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunsCodec {
    n: usize,
    t: usize,
}

impl RunsCodec {
    pub fn new(n: usize, t: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::arg("n", "must be positive"));
        }
        if t > n {
            return Err(Error::range(t, format!("<= n = {n}")));
        }
        Ok(RunsCodec { n, t })
    }

    /// `⌈log n⌉ + n − t`.
    pub fn codeword_len(&self) -> usize {
        fixed_width(self.n as u128).unwrap() as usize + self.n - self.t
    }
}

impl WitnessCodec for RunsCodec {
    type Input = BitString;

    fn encode(&self, x: &BitString) -> Result<BitString> {
        if x.len() != self.n {
            return Err(Error::arg("x", format!("has {} bits, expected {}", x.len(), self.n)));
        }
        let i = first_run(x, self.t).ok_or_else(|| Error::NoWitness(format!("no run of {} ones", self.t)))?;
        let mut c = BitString::with_capacity(self.codeword_len());
        fixed_encode_into(&mut c, i as u128, self.n as u128)?;
        c.append(&x.slice(0..i));
        c.append(&x.slice(i + self.t..self.n));
        Ok(c)
    }

    fn decode(&self, c: &BitString) -> Result<BitString> {
        if c.len() != self.codeword_len() {
            return Err(Error::Malformed(format!("{} bits, expected {}", c.len(), self.codeword_len())));
        }
        let mut r = c.reader();
        let i = fixed_decode(&mut r, self.n as u128)? as usize;
        if i > self.n - self.t {
            return Err(Error::Malformed(format!("run start {i} leaves no room for {} ones", self.t)));
        }
        let rest = r.read_bits(self.n - self.t)?;
        let mut x = rest.slice(0..i);
        x.push_run(true, self.t);
        x.append(&rest.slice(i..rest.len()));
        // Only the first run is ever encoded; anything else is not a codeword.
        if first_run(&x, self.t) != Some(i) {
            return Err(Error::Malformed(format!("an earlier run precedes index {i}")));
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witnesses::roundtrip;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn worked_example() {
        let codec = RunsCodec::new(8, 4).unwrap();
        assert_eq!(codec.encode(&bits("10111110")).unwrap(), bits("0101010"));
        assert_eq!(codec.decode(&bits("0101010")).unwrap(), bits("10111110"));
    }

    #[test]
    fn all_ones() {
        let codec = RunsCodec::new(4, 4).unwrap();
        assert_eq!(codec.encode(&bits("1111")).unwrap(), bits("00"));
        assert_eq!(codec.decode(&bits("00")).unwrap(), bits("1111"));
        assert!(matches!(codec.encode(&bits("1101")), Err(Error::NoWitness(_))));
    }

    #[test]
    fn rejects_non_codewords() {
        let codec = RunsCodec::new(8, 4).unwrap();
        // Index 5 leaves only three positions for the run.
        assert!(codec.decode(&bits("1010000")).is_err());
        // Index 4 with "1111" before it: the run at 0 comes first.
        assert!(codec.decode(&bits("1001111")).is_err());
        assert!(codec.decode(&bits("010101")).is_err());
    }

    #[test]
    fn exhaustive_n12_t5() {
        let codec = RunsCodec::new(12, 5).unwrap();
        let all = (0u32..1 << 12).map(|v| (0..12).map(|b| v >> (11 - b) & 1 == 1).collect::<BitString>());
        let report = roundtrip(&codec, all);
        assert_eq!(report.failures, 0);
        assert_eq!(report.domain + report.skipped, 4096);
        assert_eq!(report.distinct, report.domain);
        // Counting: witnesses cannot outnumber codewords of the fixed length.
        assert!(report.domain <= 1 << codec.codeword_len());
        assert_eq!(codec.codeword_len(), 4 + 7);
    }

    #[test]
    fn random_roundtrips_n64() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let codec = RunsCodec::new(64, 6).unwrap();
        let mut tested = 0;
        while tested < 1000 {
            let mut x: BitString = (0..64).map(|_| rng.gen_bool(0.5)).collect();
            if first_run(&x, 6).is_none() {
                let at = rng.gen_range(0..=58);
                x = BitString::concat([&x.slice(0..at), &BitString::repeat(true, 6), &x.slice(at + 6..64)]);
            }
            let c = codec.encode(&x).unwrap();
            assert_eq!(c.len(), codec.codeword_len());
            assert_eq!(codec.decode(&c).unwrap(), x);
            tested += 1;
        }
    }
}
