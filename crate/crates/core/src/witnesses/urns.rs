use super::WitnessCodec;
use crate::bitcodes::{binomial, fixed_decode, fixed_encode_into, fixed_width, subset_rank, subset_unrank, BitString};
use crate::error::{Error, Result};

/// The designated urn and the balls that certify its load.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UrnsWitness {
    pub urn: usize,
    pub balls: Vec<usize>,
}

/// `n` balls in `n` urns, some urn holding at least `t`. Ball `i` sits in urn
/// `b[i]`.
///
/// The codeword names the lowest such urn `j`, the rank of its `t` smallest
/// balls among all `t`-subsets of balls, and then the urns of the other
/// `n − t` balls in ball order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UrnsCodec {
    n: usize,
    t: usize,
}

impl UrnsCodec {
    pub fn new(n: usize, t: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::arg("n", "must be positive"));
        }
        if t == 0 || t > n {
            return Err(Error::range(t, format!("in [1, {n}]")));
        }
        binomial(n as u64, t as u64)?;
        Ok(UrnsCodec { n, t })
    }

    fn subsets(&self) -> u128 {
        binomial(self.n as u64, self.t as u64).unwrap()
    }

    /// `⌈log n⌉ + ⌈log C(n, t)⌉ + (n − t)⌈log n⌉`.
    pub fn codeword_len(&self) -> usize {
        let w = fixed_width(self.n as u128).unwrap() as usize;
        w + fixed_width(self.subsets()).unwrap() as usize + (self.n - self.t) * w
    }

    pub fn witness(&self, b: &[usize]) -> Option<UrnsWitness> {
        let mut load = vec![0usize; self.n];
        for &u in b {
            load[u] += 1;
        }
        let urn = load.iter().position(|&l| l >= self.t)?;
        let balls = (0..b.len()).filter(|&i| b[i] == urn).take(self.t).collect();
        Some(UrnsWitness { urn, balls })
    }
}

impl WitnessCodec for UrnsCodec {
    type Input = Vec<usize>;

    fn encode(&self, b: &Vec<usize>) -> Result<BitString> {
        if b.len() != self.n {
            return Err(Error::arg("b", format!("has {} balls, expected {}", b.len(), self.n)));
        }
        if let Some(&u) = b.iter().find(|&&u| u >= self.n) {
            return Err(Error::range(u, format!("< {}", self.n)));
        }
        let w = self.witness(b).ok_or_else(|| Error::NoWitness(format!("no urn holds {} balls", self.t)))?;
        let n = self.n as u128;
        let mut c = BitString::with_capacity(self.codeword_len());
        fixed_encode_into(&mut c, w.urn as u128, n)?;
        let set: Vec<u64> = w.balls.iter().map(|&i| i as u64).collect();
        fixed_encode_into(&mut c, subset_rank(self.n as u64, &set)?, self.subsets())?;
        let mut chosen = w.balls.iter().peekable();
        for (i, &u) in b.iter().enumerate() {
            if chosen.peek() == Some(&&i) {
                chosen.next();
            } else {
                fixed_encode_into(&mut c, u as u128, n)?;
            }
        }
        Ok(c)
    }

    fn decode(&self, c: &BitString) -> Result<Vec<usize>> {
        if c.len() != self.codeword_len() {
            return Err(Error::Malformed(format!("{} bits, expected {}", c.len(), self.codeword_len())));
        }
        let n = self.n as u128;
        let mut r = c.reader();
        let urn = fixed_decode(&mut r, n)? as usize;
        let rank = fixed_decode(&mut r, self.subsets())?;
        let set = subset_unrank(self.n as u64, self.t as u64, rank)?;
        let mut b = vec![usize::MAX; self.n];
        for &i in &set {
            b[i as usize] = urn;
        }
        for slot in b.iter_mut().filter(|u| **u == usize::MAX) {
            *slot = fixed_decode(&mut r, n)? as usize;
        }
        let canonical = UrnsWitness { urn, balls: set.iter().map(|&i| i as usize).collect() };
        if self.witness(&b).as_ref() != Some(&canonical) {
            return Err(Error::Malformed("the designated urn and balls are not the first witness".into()));
        }
        Ok(b)
    }
}
