//! Binary entropy, its two standard upper bounds, Bernoulli KL divergence and
//! bracketed logarithms of factorials and binomial coefficients. All logs are
//! base 2.

use std::f64::consts::{E, LN_2, LOG2_E, PI};

use crate::error::{Error, Result};

/// Above this `n`, [`log_factorial_bound`] switches from exact summation to
/// the midpoint of its bracket.
pub const LOG_FACTORIAL_SUM_LIMIT: u64 = 1_000_000;

fn open_unit(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::arg(name, format!("{x} is not in (0, 1)")))
    }
}

/// `x log(1/x)` with the convention `0 log(1/0) = 0`.
fn xlog_inv(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// H(α) = α log(1/α) + (1−α) log(1/(1−α)).
///
/// ```
/// # use encbound::entropy::binary_entropy;
/// assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
/// assert!((binary_entropy(0.25).unwrap() - 0.8112781244591328).abs() < 1e-15);
/// ```
pub fn binary_entropy(alpha: f64) -> Result<f64> {
    open_unit("alpha", alpha)?;
    Ok(xlog_inv(alpha) + xlog_inv(1.0 - alpha))
}

/// `α log(1/α) + α log e`, an upper bound on H(α) that is tight as α → 0.
pub fn entropy_bound_near_zero(alpha: f64) -> Result<f64> {
    open_unit("alpha", alpha)?;
    Ok(xlog_inv(alpha) + alpha * LOG2_E)
}

/// `1 − ε²/(2 ln 2)`, an upper bound on H((1+ε)/2).
pub fn entropy_bound_near_half(eps: f64) -> Result<f64> {
    open_unit("eps", eps)?;
    Ok(1.0 - eps * eps / (2.0 * LN_2))
}

/// D(p‖q) for Bernoulli parameters, in bits.
pub fn kl_divergence(p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::arg("p", format!("{p} is not in [0, 1]")));
    }
    open_unit("q", q)?;
    let term = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * (a / b).log2() };
    // Rounding can push a true zero slightly negative.
    Ok((term(p, q) + term(1.0 - p, 1.0 - q)).max(0.0))
}

/// Bracket around log(n!).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFactorial {
    pub lower: f64,
    pub upper: f64,
    pub point: f64,
}

/// `n log n − n log e + ½ log n + log √(2π)`: Stirling's series truncated
/// before the `1/(12n)` term, itself a lower bound.
fn stirling_base(n: f64) -> f64 {
    n * n.log2() - n * LOG2_E + 0.5 * n.log2() + 0.5 * (2.0 * PI).log2()
}

/// `log(n!)` with a lower and upper bound.
///
/// The bracket is `base ≤ log n! ≤ base + log e / (12n)` where `base` is the
/// truncated Stirling series. `point` is an exact summation of `log i` for
/// `n ≤ 10^6` and the bracket midpoint beyond that.
pub fn log_factorial_bound(n: u64) -> LogFactorial {
    if n == 0 {
        return LogFactorial { lower: 0.0, upper: 0.0, point: 0.0 };
    }
    let (lower, upper) = log_factorial_bracket(n);
    let point = if n <= LOG_FACTORIAL_SUM_LIMIT { log_factorial(n) } else { 0.5 * (lower + upper) };
    LogFactorial { lower, upper, point }
}

fn log_factorial_bracket(n: u64) -> (f64, f64) {
    let nf = n as f64;
    let lower = stirling_base(nf);
    (lower, lower + LOG2_E / (12.0 * nf))
}

/// Σ_{i ≤ n} log i.
pub fn log_factorial(n: u64) -> f64 {
    (2..=n).map(|i| (i as f64).log2()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogBinomial {
    pub exact: f64,
    pub entropy_bound: f64,
    pub loose_bound: f64,
}

/// `log C(n, k)` next to its bounds `n·H(k/n)` and `k log(n/k) + k log e`.
pub fn log_binomial_bound(n: u64, k: u64) -> Result<LogBinomial> {
    if k == 0 || k >= n {
        return Err(Error::range(k, format!("in [1, {}]", n.saturating_sub(1))));
    }
    let exact = log_binomial(n, k);
    let (nf, kf) = (n as f64, k as f64);
    Ok(LogBinomial {
        exact,
        entropy_bound: nf * binary_entropy(kf / nf)?,
        loose_bound: kf * (nf / kf).log2() + kf * LOG2_E,
    })
}

/// `log C(n, k)` by summing `log((n−k+i)/i)`. Requires `k ≤ n`.
pub fn log_binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).log2()).sum()
}

/// `log e`, exposed for bound formulas that carry `log e` terms.
pub const LOG_E: f64 = LOG2_E;

/// `e²`, the constant in the inversions bound.
pub const E_SQUARED: f64 = E * E;
