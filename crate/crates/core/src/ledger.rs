//! Real-valued codeword length functions, their Kraft sums, and the tail
//! bounds the two encoding lemmas derive from a length budget.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitcodes::{bernoulli_codeword_length, fixed_width, BitString, CodeTable, FiniteDensity, KraftFamily};
use crate::error::{Error, Result};

/// One factor of a product-domain length function.
#[derive(Debug, Clone, PartialEq)]
pub enum Component {
    /// Every one of `2^log2_size` outcomes costs `log2_size` bits, with no
    /// ceiling. Covers "log n bits for an index" and "n − t raw bits" alike.
    Uniform { label: String, log2_size: f64 },
    /// `domain_size` outcomes written in `⌈log domain_size⌉` bits each.
    FixedWidth { label: String, domain_size: u128 },
    /// Outcome `x` costs `log(1/p_x)`.
    Density { label: String, density: FiniteDensity },
    /// `n`-bit strings under the Bernoulli(α) code without ceilings.
    Bernoulli { label: String, n: u64, alpha: f64 },
    /// Per-outcome lengths, `∞` for outcomes left unencoded.
    Explicit { label: String, lengths: Vec<f64> },
    /// A prefix-free integer code over its whole infinite domain.
    Integer { label: String, family: KraftFamily },
    /// The single-outcome, zero-length function.
    Empty,
}

/// What a component is asked to price.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Index(u128),
    Bits(BitString),
    Value(u64),
    Unit,
}

impl Component {
    pub fn label(&self) -> &str {
        match self {
            Component::Uniform { label, .. }
            | Component::FixedWidth { label, .. }
            | Component::Density { label, .. }
            | Component::Bernoulli { label, .. }
            | Component::Explicit { label, .. }
            | Component::Integer { label, .. } => label,
            Component::Empty => "",
        }
    }

    /// Exact Kraft sum where it is a known rational, `None` otherwise.
    pub fn kraft_exact(&self) -> Option<BigRational> {
        match self {
            Component::Uniform { .. } | Component::Density { .. } | Component::Bernoulli { .. } | Component::Empty => {
                Some(BigRational::one())
            }
            Component::FixedWidth { domain_size, .. } => {
                let w = fixed_width(*domain_size).ok()?;
                Some(BigRational::new(BigInt::from(*domain_size), BigInt::one() << w))
            }
            Component::Explicit { lengths, .. } => {
                let mut sum = BigRational::zero();
                for &l in lengths {
                    if l.is_infinite() {
                        continue;
                    }
                    if l.fract() != 0.0 || l < 0.0 {
                        return None;
                    }
                    sum += BigRational::new(BigInt::one(), BigInt::one() << (l as usize));
                }
                Some(sum)
            }
            Component::Integer { family, .. } => Some(match family {
                KraftFamily::Unary => BigRational::one(),
                KraftFamily::EliasGamma | KraftFamily::EliasDelta => BigRational::new(BigInt::one(), BigInt::from(2)),
            }),
        }
    }

    pub fn kraft_approx(&self) -> f64 {
        match self {
            // Stated exactly above; summing the masses would only add rounding.
            Component::Density { .. } => 1.0,
            Component::Explicit { lengths, .. } => lengths.iter().map(|&l| (-l).exp2()).sum(),
            Component::Integer { family, .. } => family.analytic_sum(),
            _ => self.kraft_exact().and_then(|q| q.to_f64()).unwrap_or(f64::NAN),
        }
    }

    pub fn length(&self, x: &Outcome) -> Result<f64> {
        let mismatch = || Error::arg("outcome", format!("{x:?} does not fit component {self}"));
        match (self, x) {
            (Component::Uniform { log2_size, .. }, Outcome::Index(i)) => {
                if (*i as f64) < log2_size.exp2() {
                    Ok(*log2_size)
                } else {
                    Err(Error::range(i, format!("< 2^{log2_size}")))
                }
            }
            (Component::Uniform { log2_size, .. }, Outcome::Bits(b)) if b.len() as f64 == *log2_size => Ok(*log2_size),
            (Component::FixedWidth { domain_size, .. }, Outcome::Index(i)) => {
                if i >= domain_size {
                    return Err(Error::range(i, format!("< {domain_size}")));
                }
                Ok(fixed_width(*domain_size)? as f64)
            }
            (Component::Density { density, .. }, Outcome::Index(i)) => {
                let i = usize::try_from(*i).ok().filter(|&i| i < density.len()).ok_or_else(mismatch)?;
                Ok((1.0 / density.mass(i)).log2())
            }
            (Component::Bernoulli { n, alpha, .. }, Outcome::Bits(b)) if b.len() as u64 == *n => {
                bernoulli_codeword_length(b, *alpha)
            }
            (Component::Explicit { lengths, .. }, Outcome::Index(i)) => {
                usize::try_from(*i).ok().and_then(|i| lengths.get(i).copied()).ok_or_else(mismatch)
            }
            (Component::Integer { family, .. }, Outcome::Value(v)) => {
                let code = match family {
                    KraftFamily::Unary => crate::bitcodes::IntegerCode::Unary,
                    KraftFamily::EliasGamma => crate::bitcodes::IntegerCode::EliasGamma,
                    KraftFamily::EliasDelta => crate::bitcodes::IntegerCode::EliasDelta,
                };
                Ok(code.codeword_len(*v)? as f64)
            }
            (Component::Empty, Outcome::Unit) => Ok(0.0),
            _ => Err(mismatch()),
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Uniform { label, log2_size } => write!(f, "{label}: uniform, {log2_size} bits"),
            Component::FixedWidth { label, domain_size } => write!(f, "{label}: fixed width over {domain_size}"),
            Component::Density { label, density } => write!(f, "{label}: density on {} outcomes", density.len()),
            Component::Bernoulli { label, n, alpha } => write!(f, "{label}: Bernoulli({alpha}) on {n} bits"),
            Component::Explicit { label, lengths } => write!(f, "{label}: {} explicit lengths", lengths.len()),
            Component::Integer { label, family } => write!(f, "{label}: {family:?}"),
            Component::Empty => f.write_str("empty"),
        }
    }
}

/// Kraft sum of a length function: exact when every factor is rational.
#[derive(Debug, Clone, PartialEq)]
pub struct KraftSum {
    pub exact: Option<BigRational>,
    pub approx: f64,
}

impl KraftSum {
    pub fn satisfies_kraft(&self) -> bool {
        match &self.exact {
            Some(q) => *q <= BigRational::one(),
            None => self.approx <= 1.0 + 1e-12,
        }
    }
}

/// ℓ over a product domain, `ℓ(x_1, …, x_k) = Σ ℓ_i(x_i)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LengthFunction {
    components: Vec<Component>,
}

impl LengthFunction {
    pub fn new(components: Vec<Component>) -> Self {
        LengthFunction { components: components.into_iter().filter(|c| *c != Component::Empty).collect() }
    }

    pub fn single(component: Component) -> Self {
        Self::new(vec![component])
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn uniform(label: impl Into<String>, log2_size: f64) -> Self {
        Self::single(Component::Uniform { label: label.into(), log2_size })
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Number of factors, which is the number of outcome parts `length` expects.
    pub fn arity(&self) -> usize {
        self.components.len()
    }

    pub fn length(&self, x: &[Outcome]) -> Result<f64> {
        if self.components.is_empty() {
            return match x {
                [] | [Outcome::Unit] => Ok(0.0),
                _ => Err(Error::arg("outcome", "the empty length function takes no outcome")),
            };
        }
        if x.len() != self.components.len() {
            return Err(Error::arg("outcome", format!("expected {} parts, got {}", self.components.len(), x.len())));
        }
        self.components.iter().zip(x).map(|(c, x)| c.length(x)).sum()
    }

    pub fn kraft_sum(&self) -> KraftSum {
        let exact = self.components.iter().try_fold(BigRational::one(), |acc, c| c.kraft_exact().map(|q| acc * q));
        let approx = match &exact {
            Some(q) => q.to_f64().unwrap_or(f64::NAN),
            None => self.components.iter().map(Component::kraft_approx).product(),
        };
        KraftSum { exact, approx }
    }
}

/// `(ℓ + ℓ′)(x, x′) = ℓ(x) + ℓ′(x′)`; Kraft sums multiply.
pub fn compose(l1: &LengthFunction, l2: &LengthFunction) -> LengthFunction {
    let mut components = l1.components.clone();
    components.extend(l2.components.iter().cloned());
    LengthFunction { components }
}

/// `ℓ(x) = log(1/p_x)`, whose Kraft sum is exactly 1.
pub fn density_lengths(p: &FiniteDensity) -> LengthFunction {
    LengthFunction::single(Component::Density { label: "density".into(), density: p.clone() })
}

/// A probability bound of the form `2^(−s)` together with what produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub theorem: String,
    pub params: BTreeMap<String, f64>,
    pub threshold: Option<f64>,
    pub savings: f64,
    pub probability: f64,
    /// `true` when `s < 0` and the probability was capped at 1.
    pub clamped: bool,
    /// `true` when the number depends on a constant the theorem leaves unspecified.
    pub asymptotic: bool,
    /// Named extras such as `t`; flattened into the JSON object.
    #[serde(flatten)]
    pub details: BTreeMap<String, f64>,
}

impl TailBound {
    pub fn from_savings(theorem: impl Into<String>, savings: f64) -> Self {
        let raw = (-savings).exp2();
        TailBound {
            theorem: theorem.into(),
            params: BTreeMap::new(),
            threshold: None,
            savings,
            probability: raw.min(1.0),
            clamped: raw > 1.0,
            asymptotic: false,
            details: BTreeMap::new(),
        }
    }

    pub fn param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.into(), value);
        self
    }

    pub fn threshold(mut self, t: f64) -> Self {
        self.threshold = Some(t);
        self
    }

    pub fn detail(mut self, name: &str, value: f64) -> Self {
        self.details.insert(name.into(), value);
        self
    }

    pub fn asymptotic(mut self, yes: bool) -> Self {
        self.asymptotic = yes;
        self
    }
}

/// `Pr{|C(x)| ≤ log|X| − s} ≤ 2^(−s)` for `x` uniform on `X`.
pub fn uniform_tail(universe_log2: f64, code_length: f64) -> Result<TailBound> {
    if universe_log2.is_nan() || universe_log2 < 0.0 {
        return Err(Error::arg("universe_log2", format!("{universe_log2} is not a log of a universe size")));
    }
    Ok(TailBound::from_savings("uniform-encoding", universe_log2 - code_length)
        .param("universe_log2", universe_log2)
        .param("code_length", code_length)
        .threshold(code_length))
}

/// `Pr{|C(x)| ≤ log(1/p_x) − s} ≤ 2^(−s)` for `x` drawn from `p`.
pub fn nonuniform_tail(log_inv_px: f64, code_length: f64) -> Result<TailBound> {
    if log_inv_px.is_nan() || log_inv_px < 0.0 {
        return Err(Error::arg("log_inv_px", format!("{log_inv_px} is negative")));
    }
    let mut b = uniform_tail(log_inv_px, code_length)?;
    b.theorem = "nonuniform-encoding".into();
    b.params = BTreeMap::from([("log_inv_px".into(), log_inv_px), ("code_length".into(), code_length)]);
    Ok(b)
}

/// A random partial prefix-free code on `universe` outcomes.
///
/// Grows a binary tree by splitting uniformly chosen leaves until it has a
/// random number of leaves, then hands a random subset of the outcomes one
/// leaf each. Occasionally a depth cap is applied so that complete, tight
/// codes (such as all codewords of one length) show up too.
pub fn random_partial_code<R: Rng + ?Sized>(rng: &mut R, universe: usize) -> CodeTable {
    let target = rng.gen_range(1..=universe.max(1));
    let depth_cap = if rng.gen_bool(0.3) { Some(rng.gen_range(1..=12usize)) } else { None };
    let mut leaves = vec![BitString::new()];
    let mut frozen = Vec::new();
    while leaves.len() + frozen.len() < target && !leaves.is_empty() {
        let i = rng.gen_range(0..leaves.len());
        let leaf = leaves.swap_remove(i);
        if depth_cap.is_some_and(|d| leaf.len() >= d) {
            frozen.push(leaf);
            continue;
        }
        for bit in [false, true] {
            let mut child = leaf.clone();
            child.push(bit);
            leaves.push(child);
        }
    }
    leaves.extend(frozen);
    leaves.shuffle(rng);
    let mut outcomes: Vec<usize> = (0..universe).collect();
    outcomes.shuffle(rng);
    let encoded = rng.gen_range(0..=leaves.len().min(universe));
    let mut entries = vec![None; universe];
    for (&x, leaf) in outcomes.iter().zip(leaves).take(encoded) {
        entries[x] = Some(leaf);
    }
    CodeTable::new(entries).expect("leaves of a binary tree form a prefix-free code")
}

/// Fraction of a uniform universe of size `2^universe_log2` whose codeword has
/// length at most `universe_log2 − s`.
pub fn short_codeword_fraction(table: &CodeTable, universe_log2: usize, s: usize) -> f64 {
    let k = universe_log2.saturating_sub(s);
    table.count_at_most(k) as f64 / table.len() as f64
}
