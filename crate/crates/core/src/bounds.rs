//! Threshold and tail-probability calculators, one per encoding argument.
//!
//! Every calculator returns a [`TailBound`]. Where a theorem hides a constant
//! in `O(·)`, the constant is an explicit argument and the result is marked
//! `asymptotic`, so nobody mistakes it for a proven number.

use std::collections::BTreeMap;
use std::f64::consts::{E, LN_2, LOG2_E};

use crate::entropy::{binary_entropy, kl_divergence, log_binomial, log_factorial};
use crate::error::{Error, Result};
use crate::ledger::TailBound;

/// Linear scans for integer thresholds give up after this many steps.
pub const SCAN_LIMIT: u64 = 100_000_000;

fn require(cond: bool, name: &'static str, reason: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::arg(name, reason()))
    }
}

fn nonneg_s(s: f64) -> Result<()> {
    require(s >= 0.0, "s", || format!("{s} is negative"))
}

/// Smallest integer `t ≥ from` with `pred(t)`.
fn scan(from: u64, what: &str, pred: impl Fn(f64) -> bool) -> Result<u64> {
    (from..from + SCAN_LIMIT)
        .find(|&t| pred(t as f64))
        .ok_or_else(|| Error::IterationCap { cap: SCAN_LIMIT, context: format!("searching for the {what} threshold") })
}

/// A run of `t = ⌈log n + s⌉` ones appears with probability at most `2^(−s)`.
pub fn runs_threshold(n: u64, s: f64) -> Result<TailBound> {
    require(n >= 2, "n", || format!("{n} < 2"))?;
    nonneg_s(s)?;
    let t = ((n as f64).log2() + s).ceil();
    Ok(TailBound::from_savings("runs", s).param("n", n as f64).param("s", s).threshold(t).detail("t", t))
}

/// `Pr{run of t ones} ≤ n 2^(−t)`, the same bound read at a given `t`.
pub fn runs_tail(n: u64, t: u64) -> Result<TailBound> {
    require(n >= 1, "n", || "must be positive".into())?;
    let s = t as f64 - (n as f64).log2();
    Ok(TailBound::from_savings("runs", s).param("n", n as f64).param("t", t as f64).threshold(t as f64))
}

/// A clique or independent set of size `t = ⌈3 log n + √(2s)⌉` in `G(n, ½)`.
pub fn ramsey_threshold(n: u64, s: f64) -> Result<TailBound> {
    require(n >= 3, "n", || format!("{n} < 3"))?;
    nonneg_s(s)?;
    let t = (3.0 * (n as f64).log2() + (2.0 * s).sqrt()).ceil();
    Ok(TailBound::from_savings("ramsey", s)
        .param("n", n as f64)
        .param("s", s)
        .threshold(t)
        .detail("t", t)
        .detail("code_savings", ramsey_code_savings(n, t)))
}

/// Bits the clique code saves at size `t`: `(t² − t − 2t log n)/2 − 1`.
pub fn ramsey_code_savings(n: u64, t: f64) -> f64 {
    0.5 * (t * t - t - 2.0 * t * (n as f64).log2()) - 1.0
}

/// The coarse variant: at `t = ⌈4 log n⌉` the code saves at least `log² n`
/// bits once `log n ≥ 1`, so the probability is at most `n^(−log n)`.
pub fn ramsey_intro(n: u64) -> Result<TailBound> {
    require(n >= 3, "n", || format!("{n} < 3"))?;
    let log_n = (n as f64).log2();
    let t = (4.0 * log_n).ceil();
    let s = ramsey_code_savings(n, t);
    Ok(TailBound::from_savings("ramsey-intro", s)
        .param("n", n as f64)
        .threshold(t)
        .detail("t", t)
        .detail("claimed_probability", (-log_n * log_n).exp2()))
}

/// Smallest `t ≥ 3` with `t log(t/e) ≥ log n + s`: some urn gets more than
/// `t` of `n` balls with probability at most `2^(−s)`.
pub fn urns_threshold(n: u64, s: f64) -> Result<TailBound> {
    require(n >= 2, "n", || format!("{n} < 2"))?;
    nonneg_s(s)?;
    let target = (n as f64).log2() + s;
    let t = scan(3, "urns", |t| t * (t / E).log2() >= target)? as f64;
    Ok(TailBound::from_savings("urns", s).param("n", n as f64).param("s", s).threshold(t).detail("t", t))
}

/// Savings of the urn code at occupancy `t`: `t log(t/e) − log n`.
pub fn urns_savings(n: u64, t: u64) -> f64 {
    let t = t as f64;
    let spread = if t == 0.0 { 0.0 } else { t * (t / E).log2() };
    spread - (n as f64).log2()
}

/// `Pr{some urn holds at least t balls} ≤ 2^(−(t log(t/e) − log n))`.
pub fn urns_tail(n: u64, t: u64) -> Result<TailBound> {
    require(n >= 1, "n", || "must be positive".into())?;
    Ok(TailBound::from_savings("urns", urns_savings(n, t))
        .param("n", n as f64)
        .param("t", t as f64)
        .threshold(t as f64))
}

fn linear_probing_slack(c: f64, t: f64) -> f64 {
    (t - 1.0) * (c / E).log2() - t.log2() - 3.0
}

/// Smallest `t ≥ 2` with `(t − 1) log(c/e) − log t − 3 ≥ s`. The block holding
/// a fixed key has size exactly `t` with probability at most `2^(−s)`.
pub fn linear_probing_threshold(c: f64, s: f64) -> Result<TailBound> {
    require(c > E, "c", || format!("{c} <= e"))?;
    nonneg_s(s)?;
    let t = scan(2, "linear probing", |t| linear_probing_slack(c, t) >= s)? as f64;
    Ok(TailBound::from_savings("linear-probing", s).param("c", c).param("s", s).threshold(t).detail("t", t))
}

/// Savings the linear probing code achieves for a block of size `t`, or the
/// bound on `Pr{block size = t}` read the other way round.
pub fn linear_probing_block_bound(c: f64, t: u64) -> Result<TailBound> {
    require(c > E, "c", || format!("{c} <= e"))?;
    require(t >= 2, "t", || format!("{t} < 2"))?;
    let s = linear_probing_slack(c, t as f64);
    Ok(TailBound::from_savings("linear-probing-block", s).param("c", c).param("t", t as f64).threshold(t as f64))
}

/// Smallest `t_0 ≥ 1` for which every block size `T = t + t_0` gets the
/// bound `2^(−t log(c/e)/2)` from [`linear_probing_threshold`].
pub fn linear_probing_t0(c: f64) -> Result<u64> {
    require(c > E, "c", || format!("{c} <= e"))?;
    let l = (c / E).log2();
    // Need t_0 l / 2 ≥ 3 and g(T) = T l/2 − l − log T − 3 ≥ 0 for all T > t_0.
    // g is increasing once T ≥ 2/(l ln 2), so checking up to there suffices.
    let floor = (6.0 / l).ceil().max(1.0) as u64;
    let knee = (2.0 / (l * LN_2)).ceil() as u64 + 1;
    let g = |t: f64| t * l / 2.0 - l - t.log2() - 3.0;
    scan(floor, "linear probing t0", |t0| {
        let hi = (knee as f64).max(t0 + 1.0);
        g(t0 + 1.0) >= 0.0 && (t0 as u64 + 1..=hi as u64).all(|t| g(t as f64) >= 0.0)
    })
}

/// `t_0 + Σ_{t ≥ 1} (t + t_0)(c/e)^(−t/2)`, in closed form.
pub fn linear_probing_search_bound(c: f64, t0: Option<u64>) -> Result<TailBound> {
    let t0 = match t0 {
        Some(t) => t,
        None => linear_probing_t0(c)?,
    };
    let r = (c / E).powf(-0.5);
    let t0f = t0 as f64;
    let value = t0f + r / (1.0 - r).powi(2) + t0f * r / (1.0 - r);
    Ok(TailBound::from_savings("linear-probing-search", 0.0)
        .param("c", c)
        .param("t0", t0f)
        .detail("expected_search", value)
        .asymptotic(true))
}

/// Cuckoo hashing: an edge-simple path of length `s + log n + K1` has
/// probability at most `2^(−s)`; a rehash has probability about `K2/n`.
pub fn cuckoo_tails(n: u64, s: f64, k1: f64, k2: f64) -> Result<TailBound> {
    require(n >= 2, "n", || format!("{n} < 2"))?;
    nonneg_s(s)?;
    let path = s + (n as f64).log2() + k1;
    Ok(TailBound::from_savings("cuckoo", s)
        .param("n", n as f64)
        .param("s", s)
        .param("k1", k1)
        .param("k2", k2)
        .threshold(path)
        .detail("path_threshold", path)
        .detail("failure_bound", (k2 / n as f64).min(1.0))
        .asymptotic(true))
}

/// 2-choice hashing into `cn` urns: components of `(s + log n + K)/log(c/8)`
/// vertices and loads above `⌈log log n⌉ + d`.
pub fn two_choice_thresholds(n: u64, c: f64, s: f64, k: f64, d: f64) -> Result<TailBound> {
    require(c > 8.0, "c", || format!("{c} <= 8"))?;
    require(n >= 4, "n", || format!("{n} < 4"))?;
    nonneg_s(s)?;
    let log_n = (n as f64).log2();
    let component = (s + log_n + k) / (c / 8.0).log2();
    let maxload = log_n.log2().ceil() + d;
    Ok(TailBound::from_savings("two-choice", s)
        .param("n", n as f64)
        .param("c", c)
        .param("s", s)
        .param("k", k)
        .param("d", d)
        .threshold(component)
        .detail("component_threshold", component)
        .detail("maxload_threshold", maxload)
        .asymptotic(true))
}

/// `β = (3/2) log(3/2) + (5/2) log e`.
pub fn expander_beta() -> f64 {
    1.5 * 1.5f64.log2() + 2.5 * LOG2_E
}

/// `(1/2)^(2β)`: below this α the large-`k` savings grow linearly in `n`.
pub fn expander_alpha_threshold() -> f64 {
    (-2.0 * expander_beta()).exp2()
}

/// `s(k) = (k/2) log n − (k/2) log k − βk − 2 log k − C`.
pub fn expander_savings(n: u64, k: u64, constant: f64) -> Result<TailBound> {
    require(k >= 1 && k <= n, "k", || format!("{k} is not in [1, {n}]"))?;
    let (nf, kf) = (n as f64, k as f64);
    let s = kf / 2.0 * nf.log2() - kf / 2.0 * kf.log2() - expander_beta() * kf - 2.0 * kf.log2() - constant;
    Ok(TailBound::from_savings("expander", s)
        .param("n", nf)
        .param("k", kf)
        .param("constant", constant)
        .detail("beta", expander_beta())
        .detail("alpha_threshold", expander_alpha_threshold())
        .asymptotic(true))
}

fn check_alpha(alpha: f64) -> Result<()> {
    require(alpha > 0.0 && alpha < 1.0 / (E * E), "alpha", || format!("{alpha} is not in (0, 1/e²)"))
}

/// At most `αn² − n + 2` inversions: probability `2^(n log(αe²) + K log n)`.
pub fn inversions_tail(n: u64, alpha: f64, k: f64) -> Result<TailBound> {
    require(n >= 2, "n", || format!("{n} < 2"))?;
    check_alpha(alpha)?;
    let nf = n as f64;
    let exponent = nf * (alpha * E * E).log2() + k * nf.log2();
    Ok(TailBound::from_savings("inversions", -exponent)
        .param("n", nf)
        .param("alpha", alpha)
        .param("k", k)
        .threshold(alpha * nf * nf - nf + 2.0)
        .detail("exponent", exponent)
        .asymptotic(true))
}

/// The same event priced by the insertion-sort code itself, with nothing
/// hidden: `s = log n! − log n² − log C(M + n − 2, n − 2)` for
/// `M = ⌊αn² − n + 2⌋`. Valid for any `α > 0`; an empty event gets `s = ∞`.
pub fn inversions_code_bound(n: u64, alpha: f64) -> Result<TailBound> {
    require(n >= 2, "n", || format!("{n} < 2"))?;
    require(alpha > 0.0, "alpha", || format!("{alpha} <= 0"))?;
    let nf = n as f64;
    let max_m = (alpha * nf * nf - nf + 2.0).floor();
    let s = if max_m < 0.0 {
        f64::INFINITY
    } else {
        log_factorial(n) - 2.0 * nf.log2() - log_binomial(max_m as u64 + n - 2, n - 2)
    };
    Ok(TailBound::from_savings("inversions-code", s).param("n", nf).param("alpha", alpha).threshold(max_m))
}

/// At least `c log n` records: probability `2^(−c(1 − H(1/c)) log n + K log log n)`.
pub fn records_tail(n: u64, c: f64, k: f64) -> Result<TailBound> {
    require(c > 2.0, "c", || format!("{c} <= 2"))?;
    require(n >= 4, "n", || format!("{n} < 4"))?;
    let log_n = (n as f64).log2();
    let rate = records_rate(c)?;
    let exponent = -rate * log_n + k * log_n.log2();
    Ok(TailBound::from_savings("records", -exponent)
        .param("n", n as f64)
        .param("c", c)
        .param("k", k)
        .threshold(c * log_n)
        .detail("rate", rate)
        .detail("exponent", exponent)
        .asymptotic(true))
}

/// `c(1 − H(1/c))`.
pub fn records_rate(c: f64) -> Result<f64> {
    require(c > 2.0, "c", || format!("{c} <= 2"))?;
    Ok(c * (1.0 - binary_entropy(1.0 / c)?))
}

/// `(c(1 − H(1/(c log(4/3)))), value > 2)`.
pub fn bst_height_constant_check(c: f64) -> Result<(f64, bool)> {
    let floor = 2.0 / (4.0f64 / 3.0).log2();
    require(c > floor, "c", || format!("{c} <= 2/log(4/3) = {floor}"))?;
    let lhs = c * (1.0 - binary_entropy(1.0 / (c * (4.0f64 / 3.0).log2()))?);
    Ok((lhs, lhs > 2.0))
}

/// `Pr{n_1(x) ≤ (1 − ε)n/2} ≤ e^(−ε²n/2)`.
pub fn chernoff_basic(n: u64, eps: f64) -> Result<TailBound> {
    require(n >= 1, "n", || "must be positive".into())?;
    require(eps >= 0.0, "eps", || format!("{eps} is negative"))?;
    let s = eps * eps * n as f64 / (2.0 * LN_2);
    Ok(TailBound::from_savings("chernoff-basic", s).param("n", n as f64).param("eps", eps))
}

/// `Pr{B ≤ (p − ε)n} ≤ 2^(−n D(p − ε ‖ p))` for `B ~ Binomial(n, p)`.
pub fn chernoff_kl(n: u64, p: f64, eps: f64) -> Result<TailBound> {
    require(p > 0.0 && p < 1.0, "p", || format!("{p} is not in (0, 1)"))?;
    require(eps >= 0.0 && eps <= p, "eps", || format!("{eps} is not in [0, {p}]"))?;
    let s = n as f64 * kl_divergence(p - eps, p)?;
    Ok(TailBound::from_savings("chernoff-kl", s)
        .param("n", n as f64)
        .param("p", p)
        .param("eps", eps)
        .threshold((p - eps) * n as f64))
}

/// A cycle of length at least `(s + log n)/log(1/(3p))` in the `√n × √n`
/// torus with edge probability `p < 1/3`.
pub fn percolation_cycle_tail(n: u64, p: f64, s: f64) -> Result<TailBound> {
    let root = (n as f64).sqrt().round() as u64;
    require(root * root == n && n > 0, "n", || format!("{n} is not a perfect square"))?;
    require(p > 0.0 && p < 1.0 / 3.0, "p", || format!("{p} is not in (0, 1/3)"))?;
    nonneg_s(s)?;
    let len = (s + (n as f64).log2()) / (1.0 / (3.0 * p)).log2();
    Ok(TailBound::from_savings("percolation", s)
        .param("n", n as f64)
        .param("p", p)
        .param("s", s)
        .threshold(len)
        .detail("min_length", len))
}

/// The same bound read at a given cycle length: savings
/// `len·log(1/(3p)) − log n`, clamped to probability 1 when negative.
pub fn percolation_length_tail(n: u64, p: f64, len: u64) -> Result<TailBound> {
    let root = (n as f64).sqrt().round() as u64;
    require(root * root == n && n > 0, "n", || format!("{n} is not a perfect square"))?;
    require(p > 0.0 && p < 1.0 / 3.0, "p", || format!("{p} is not in (0, 1/3)"))?;
    let s = len as f64 * (1.0 / (3.0 * p)).log2() - (n as f64).log2();
    Ok(TailBound::from_savings("percolation", s)
        .param("n", n as f64)
        .param("p", p)
        .param("len", len as f64)
        .threshold(len as f64)
        .detail("min_length", len as f64))
}

/// `G(n, c/n)` has a triangle with probability at most `c³`.
pub fn triangles_down(n: u64, c: f64) -> Result<TailBound> {
    require(c > 0.0, "c", || format!("{c} <= 0"))?;
    let b = TailBound::from_savings("triangles-down", -3.0 * c.log2()).param("c", c);
    let b = if n > 0 { b.param("n", n as f64) } else { b };
    let lower = (1.0 - c.powi(3)).max(0.0);
    Ok(b.detail("lower_no_triangle", lower))
}

/// `G(n, c/n)` is triangle-free with probability at most `2^(−K c³)`; the
/// theorem only asserts some `K > 0` for `c ≤ (log n)^(1/3)`.
pub fn triangles_up(n: u64, c: f64, k: f64) -> Result<TailBound> {
    require(c > 0.0, "c", || format!("{c} <= 0"))?;
    require(n >= 2, "n", || format!("{n} < 2"))?;
    let exponent = k * c.powi(3);
    let valid = c <= (n as f64).log2().cbrt();
    Ok(TailBound::from_savings("triangles-up", exponent)
        .param("n", n as f64)
        .param("c", c)
        .param("k", k)
        .detail("upper_exists_exponent", exponent)
        .detail("in_region", valid as u8 as f64)
        .asymptotic(true))
}

/// Both triangle statements for one `(n, c)`.
pub fn triangle_bounds(n: u64, c: f64, k: f64) -> Result<(f64, f64)> {
    let down = triangles_down(n, c)?;
    let up = triangles_up(n, c, k)?;
    Ok((down.details["lower_no_triangle"], up.details["upper_exists_exponent"]))
}

/// Checks the intersection-degree precondition `r < 2^(k − 3)`.
pub fn moser_precondition(k: u32, r: u64) -> Result<()> {
    require((3..67).contains(&k), "k", || format!("{k} is not in [3, 66]"))?;
    require((r as u128) < 1u128 << (k - 3), "r", || format!("{r} is not below 2^(k-3) = {}", 1u128 << (k - 3)))
}

/// Fix is called at least `⌈s + m log m⌉` times with probability at most `2^(−s)`.
pub fn moser_tail(m: u64, s: f64) -> Result<TailBound> {
    require(m >= 1, "m", || "must be positive".into())?;
    nonneg_s(s)?;
    let t = (s + m as f64 * (m as f64).log2()).ceil();
    Ok(TailBound::from_savings("moser", s).param("m", m as f64).param("s", s).threshold(t).detail("fix_threshold", t))
}

/// A parameter a registered calculator accepts.
#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: Option<f64>,
    pub help: &'static str,
}

pub(crate) const fn req(name: &'static str, help: &'static str) -> ParamSpec {
    ParamSpec { name, default: None, help }
}

pub(crate) const fn opt(name: &'static str, default: f64, help: &'static str) -> ParamSpec {
    ParamSpec { name, default: Some(default), help }
}

#[derive(Debug, Clone, Copy)]
pub struct BoundSpec {
    pub id: &'static str,
    pub about: &'static str,
    pub params: &'static [ParamSpec],
}

pub const DEFAULT_CUCKOO_K1: f64 = 4.0;
pub const DEFAULT_CUCKOO_K2: f64 = 1.0;
pub const DEFAULT_TWO_CHOICE_K: f64 = 0.0;
pub const DEFAULT_TWO_CHOICE_D: f64 = 3.0;
pub const DEFAULT_INVERSIONS_K: f64 = 2.0;
pub const DEFAULT_RECORDS_K: f64 = 1.0;
pub const DEFAULT_TRIANGLES_K: f64 = 0.125;

pub const BOUNDS: &[BoundSpec] = &[
    BoundSpec {
        id: "runs",
        about: "run of t ones in n random bits",
        params: &[req("n", "string length"), req("s", "savings in bits")],
    },
    BoundSpec {
        id: "ramsey",
        about: "clique or independent set in G(n,1/2)",
        params: &[req("n", "vertices"), req("s", "savings in bits")],
    },
    BoundSpec {
        id: "ramsey-intro",
        about: "clique or independent set of size 4 log n",
        params: &[req("n", "vertices")],
    },
    BoundSpec {
        id: "urns",
        about: "max load of n balls in n urns",
        params: &[req("n", "balls and urns"), req("s", "savings in bits")],
    },
    BoundSpec {
        id: "linear-probing",
        about: "block size in linear probing, table size cn",
        params: &[req("c", "load factor inverse, > e"), req("s", "savings in bits")],
    },
    BoundSpec {
        id: "linear-probing-search",
        about: "expected search time series",
        params: &[
            req("c", "load factor inverse, > e"),
            opt("t0", 0.0, "series offset; 0 picks the smallest valid one"),
        ],
    },
    BoundSpec {
        id: "cuckoo",
        about: "cuckoo path length and rehash probability",
        params: &[
            req("n", "keys"),
            req("s", "savings in bits"),
            opt("k1", DEFAULT_CUCKOO_K1, "additive path constant"),
            opt("k2", DEFAULT_CUCKOO_K2, "rehash constant"),
        ],
    },
    BoundSpec {
        id: "two-choice",
        about: "2-choice component size and max load",
        params: &[
            req("n", "keys"),
            req("c", "table factor, > 8"),
            req("s", "savings in bits"),
            opt("k", DEFAULT_TWO_CHOICE_K, "additive component constant"),
            opt("d", DEFAULT_TWO_CHOICE_D, "additive load constant"),
        ],
    },
    BoundSpec {
        id: "expander",
        about: "savings s(k) for a non-expanding set of size k",
        params: &[req("n", "left vertices"), req("k", "set size"), opt("constant", 0.0, "the O(1) term")],
    },
    BoundSpec {
        id: "inversions",
        about: "few inversions in a random permutation",
        params: &[
            req("n", "length"),
            req("alpha", "in (0, 1/e^2)"),
            opt("k", DEFAULT_INVERSIONS_K, "O(log n) coefficient"),
        ],
    },
    BoundSpec {
        id: "inversions-code",
        about: "few inversions, priced exactly by the insertion sort code",
        params: &[req("n", "length"), req("alpha", "positive")],
    },
    BoundSpec {
        id: "records",
        about: "at least c log n records",
        params: &[req("n", "length"), req("c", "> 2"), opt("k", DEFAULT_RECORDS_K, "O(log log n) coefficient")],
    },
    BoundSpec {
        id: "bst-height",
        about: "height constant check c(1 - H(1/(c log(4/3)))) > 2",
        params: &[req("c", "> 2/log(4/3)")],
    },
    BoundSpec {
        id: "chernoff-basic",
        about: "fair coin lower tail",
        params: &[req("n", "flips"), req("eps", "relative deviation")],
    },
    BoundSpec {
        id: "chernoff-kl",
        about: "binomial lower tail via KL divergence",
        params: &[req("n", "trials"), req("p", "success probability"), req("eps", "deviation in [0, p]")],
    },
    BoundSpec {
        id: "percolation",
        about: "long cycle in the percolated torus",
        params: &[
            req("n", "vertices, a perfect square"),
            req("p", "edge probability < 1/3"),
            req("s", "savings in bits"),
        ],
    },
    BoundSpec {
        id: "triangles-down",
        about: "a triangle in G(n, c/n)",
        params: &[req("c", "positive"), opt("n", 0.0, "vertices, informational")],
    },
    BoundSpec {
        id: "triangles-up",
        about: "no triangle in G(n, c/n)",
        params: &[req("n", "vertices"), req("c", "positive"), opt("k", DEFAULT_TRIANGLES_K, "exponent constant")],
    },
    BoundSpec {
        id: "moser",
        about: "number of Fix calls in Moser's algorithm",
        params: &[
            req("m", "clauses"),
            req("s", "savings in bits"),
            opt("k", 0.0, "clause width, checked with r when given"),
            opt("r", 0.0, "intersection degree"),
        ],
    },
];

pub fn spec(id: &str) -> Option<&'static BoundSpec> {
    BOUNDS.iter().find(|b| b.id == id)
}

/// Fills defaults and rejects unknown or missing parameters.
pub fn resolve_params(
    id: &str,
    params: &[ParamSpec],
    given: &BTreeMap<String, f64>,
) -> Result<BTreeMap<&'static str, f64>> {
    if let Some(unknown) = given.keys().find(|k| !params.iter().any(|p| p.name == k.as_str())) {
        let known: Vec<_> = params.iter().map(|p| p.name).collect();
        return Err(Error::arg(
            "params",
            format!("`{id}` takes no parameter `{unknown}` (known: {})", known.join(", ")),
        ));
    }
    params
        .iter()
        .map(|p| match given.get(p.name).copied().or(p.default) {
            Some(v) => Ok((p.name, v)),
            None => Err(Error::arg("params", format!("`{id}` needs `{}` ({})", p.name, p.help))),
        })
        .collect()
}

/// Reads a parameter that must be a nonnegative integer.
pub(crate) fn uint(p: &BTreeMap<&'static str, f64>, name: &'static str) -> Result<u64> {
    let v = p[name];
    require(v >= 0.0 && v.fract() == 0.0 && v < 2f64.powi(63), name, || format!("{v} is not a nonnegative integer"))?;
    Ok(v as u64)
}

/// Evaluates a registered calculator by id.
pub fn evaluate(id: &str, given: &BTreeMap<String, f64>) -> Result<TailBound> {
    let spec = spec(id).ok_or_else(|| {
        let ids: Vec<_> = BOUNDS.iter().map(|b| b.id).collect();
        Error::arg("theorem", format!("unknown id `{id}` (valid: {})", ids.join(", ")))
    })?;
    let p = resolve_params(spec.id, spec.params, given)?;
    match id {
        "runs" => runs_threshold(uint(&p, "n")?, p["s"]),
        "ramsey" => ramsey_threshold(uint(&p, "n")?, p["s"]),
        "ramsey-intro" => ramsey_intro(uint(&p, "n")?),
        "urns" => urns_threshold(uint(&p, "n")?, p["s"]),
        "linear-probing" => linear_probing_threshold(p["c"], p["s"]),
        "linear-probing-search" => {
            let t0 = uint(&p, "t0")?;
            linear_probing_search_bound(p["c"], (t0 > 0).then_some(t0))
        }
        "cuckoo" => cuckoo_tails(uint(&p, "n")?, p["s"], p["k1"], p["k2"]),
        "two-choice" => two_choice_thresholds(uint(&p, "n")?, p["c"], p["s"], p["k"], p["d"]),
        "expander" => expander_savings(uint(&p, "n")?, uint(&p, "k")?, p["constant"]),
        "inversions" => inversions_tail(uint(&p, "n")?, p["alpha"], p["k"]),
        "inversions-code" => inversions_code_bound(uint(&p, "n")?, p["alpha"]),
        "records" => records_tail(uint(&p, "n")?, p["c"], p["k"]),
        "bst-height" => {
            let (lhs, ok) = bst_height_constant_check(p["c"])?;
            Ok(TailBound::from_savings("bst-height", 0.0)
                .param("c", p["c"])
                .detail("lhs", lhs)
                .detail("ok", ok as u8 as f64))
        }
        "chernoff-basic" => chernoff_basic(uint(&p, "n")?, p["eps"]),
        "chernoff-kl" => chernoff_kl(uint(&p, "n")?, p["p"], p["eps"]),
        "percolation" => percolation_cycle_tail(uint(&p, "n")?, p["p"], p["s"]),
        "triangles-down" => triangles_down(uint(&p, "n")?, p["c"]),
        "triangles-up" => triangles_up(uint(&p, "n")?, p["c"], p["k"]),
        "moser" => {
            let (k, r) = (uint(&p, "k")?, uint(&p, "r")?);
            if k > 0 {
                moser_precondition(k as u32, r)?;
            }
            let b = moser_tail(uint(&p, "m")?, p["s"])?;
            Ok(if k > 0 { b.param("k", k as f64).param("r", r as f64) } else { b })
        }
        _ => unreachable!("every registered id is handled"),
    }
}
