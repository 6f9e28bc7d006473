//! Fixed batteries of checks with pinned seeds: `acceptance` runs criteria
//! 1 to 9, `quick` the cheap exact ones plus three short simulations.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bitcodes::{shannon_fano_build, FiniteDensity, IntegerCode, KraftFamily};
use crate::bounds::{
    bst_height_constant_check, chernoff_basic, chernoff_kl, expander_alpha_threshold, expander_beta,
    inversions_code_bound, inversions_tail, runs_threshold, urns_tail,
};
use crate::entropy::binary_entropy;
use crate::error::{Error, Result};
use crate::experiments::{
    exhaustive_inversions, inversion_distribution, run_experiment, sim_runs, sim_urns, ExperimentReport, RngSpec,
};
use crate::ledger::random_partial_code;
use crate::witnesses::{domain, roundtrip, CliqueCodec, InsSortCodec, Roundtrip, RunsCodec, UrnsCodec, VertexEncoding};

/// One named yes/no fact inside a criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub reports: Vec<ExperimentReport>,
    /// Constants fitted from asymptotic-info runs, kept for regression.
    pub fitted: BTreeMap<String, f64>,
    pub wall_ms: u64,
}

impl CriterionResult {
    /// `criterion <id> <title>: PASS|FAIL (<n>/<m> checks[, first failure])`.
    pub fn line(&self) -> String {
        let ok = self.checks.iter().filter(|c| c.passed).count();
        let name = match self.id.parse::<u32>() {
            Ok(_) => format!("criterion {} {}", self.id, self.title),
            Err(_) => self.title.to_string(),
        };
        let mut line = format!(
            "{}: {} ({}/{} checks, {} ms)",
            name,
            if self.passed { "PASS" } else { "FAIL" },
            ok,
            self.checks.len(),
            self.wall_ms
        );
        if let Some(bad) = self.checks.iter().find(|c| !c.passed) {
            line.push_str(&format!("; first failure: {}: {}", bad.label, bad.detail));
        }
        line
    }
}

pub const SUITES: [&str; 2] = ["acceptance", "quick"];

pub const CRITERIA: [(&str, &str); 9] = [
    ("1", "codec exactness"),
    ("2", "Kraft sums"),
    ("3", "uniform encoding counting"),
    ("4", "exhaustive theorem checks"),
    ("5", "witness codec roundtrips"),
    ("6", "KL-Chernoff exactness"),
    ("7", "Monte Carlo theorem checks"),
    ("8", "asymptotic-info reports"),
    ("9", "numeric spot values"),
];

/// Accumulates checks for one criterion.
struct Sheet {
    checks: Vec<Check>,
    reports: Vec<ExperimentReport>,
    fitted: BTreeMap<String, f64>,
}

impl Sheet {
    fn new() -> Self {
        Sheet { checks: Vec::new(), reports: Vec::new(), fitted: BTreeMap::new() }
    }

    fn check(&mut self, label: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { label: label.into(), passed, detail: detail.into() });
    }

    fn report(&mut self, label: impl Into<String>, r: ExperimentReport) {
        let detail = format!(
            "{}/{} = {:.6} vs bound {:.6} (3σ = {:.2e}), verdict {}",
            r.exceed_count,
            r.trials,
            r.empirical_prob,
            r.bound.probability,
            3.0 * r.mc_stderr,
            r.verdict
        );
        self.check(label, r.passed(), detail);
        self.reports.push(r);
    }

    fn roundtrip(&mut self, label: impl Into<String>, rt: Roundtrip, expected_domain: Option<u64>) {
        let size_ok = expected_domain.is_none_or(|d| d == rt.domain);
        let ok = rt.failures == 0 && rt.distinct == rt.domain && size_ok && rt.domain > 0;
        self.check(
            label,
            ok,
            format!("domain {}, skipped {}, failures {}, distinct {}", rt.domain, rt.skipped, rt.failures, rt.distinct),
        );
    }

    fn deadline(&mut self, start: Instant, limit_ms: u64) {
        let ms = start.elapsed().as_millis() as u64;
        self.check(format!("runtime < {limit_ms} ms"), ms < limit_ms, format!("{ms} ms"));
    }

    fn finish(self, id: &'static str, start: Instant) -> CriterionResult {
        let title = CRITERIA.iter().find(|c| c.0 == id).map_or("fast simulations", |c| c.1);
        CriterionResult {
            id,
            title,
            passed: self.checks.iter().all(|c| c.passed) && self.reports.iter().all(ExperimentReport::passed),
            checks: self.checks,
            reports: self.reports,
            fitted: self.fitted,
            wall_ms: start.elapsed().as_millis() as u64,
        }
    }
}

fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
    kv.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

/// Runs one acceptance criterion by id (`"1"` to `"9"`).
pub fn criterion(id: &str) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut sheet = Sheet::new();
    let id = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .map(|c| c.0)
        .ok_or_else(|| Error::arg("criterion", format!("unknown id `{id}` (valid: 1 to {})", CRITERIA.len())))?;
    match id {
        "1" => codec_exactness(&mut sheet, start)?,
        "2" => kraft_sums(&mut sheet)?,
        "3" => uniform_counting(&mut sheet),
        "4" => exhaustive_theorems(&mut sheet, start)?,
        "5" => witness_roundtrips(&mut sheet)?,
        "6" => kl_chernoff(&mut sheet)?,
        "7" => monte_carlo(&mut sheet, start)?,
        "8" => asymptotic_info(&mut sheet)?,
        "9" => spot_values(&mut sheet)?,
        _ => unreachable!(),
    }
    Ok(sheet.finish(id, start))
}

/// Runs a named suite.
pub fn run_suite(name: &str) -> Result<Vec<CriterionResult>> {
    match name {
        "acceptance" => CRITERIA.iter().map(|c| criterion(c.0)).collect(),
        "quick" => {
            let mut out: Vec<CriterionResult> =
                ["1", "2", "3", "5"].iter().map(|id| criterion(id)).collect::<Result<_>>()?;
            out.push(fast_simulations()?);
            Ok(out)
        }
        _ => Err(Error::arg("suite", format!("unknown suite `{name}` (valid: {})", SUITES.join(", ")))),
    }
}

/// Fitted constants of every result, keyed `<criterion>.<name>`.
pub fn fitted_constants(results: &[CriterionResult]) -> BTreeMap<String, f64> {
    results.iter().flat_map(|r| r.fitted.iter().map(move |(k, v)| (format!("{}.{k}", r.id), *v))).collect()
}

const CODEC_RANGE: u64 = 65_536;

fn codec_exactness(sheet: &mut Sheet, start: Instant) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for code in IntegerCode::ALL {
        let mut failures = 0u64;
        for i in 1..=CODEC_RANGE {
            let c = code.encode(i)?;
            if code.decode_exact(&c).ok() != Some(i) || code.codeword_len(i)? != c.len() {
                failures += 1;
            }
        }
        sheet.check(format!("{} on [1, {CODEC_RANGE}]", code.name()), failures == 0, format!("{failures} failures"));
        let values: Vec<u64> = (0..100).map(|_| rng.gen_range(1..=CODEC_RANGE)).collect();
        let stream = code.encode_stream(&values)?;
        let back = code.decode_stream(&stream);
        sheet.check(
            format!("{} stream of 100", code.name()),
            back.as_ref().ok() == Some(&values),
            format!("{} bits", stream.len()),
        );
    }
    sheet.deadline(start, 5_000);
    Ok(())
}

fn kraft_sums(sheet: &mut Sheet) -> Result<()> {
    let unary = KraftFamily::Unary.analytic_sum();
    sheet.check("unary analytic sum", unary == 1.0, format!("{unary}"));
    let gamma = KraftFamily::EliasGamma.analytic_sum();
    sheet.check("elias-gamma analytic sum", gamma == 0.5, format!("{gamma}"));
    // Partial sums over whole length classes are dyadic, so f64 holds them exactly.
    let partial = |code: IntegerCode, hi: u64| -> Result<f64> {
        (code.min_value()..hi).map(|i| Ok((-(code.codeword_len(i)? as f64)).exp2())).sum()
    };
    let u = partial(IntegerCode::Unary, 40)?;
    sheet.check("unary partial sum to 39", u == 1.0 - (-40f64).exp2(), format!("{u}"));
    let g = partial(IntegerCode::EliasGamma, 1 << 20)?;
    sheet.check("elias-gamma partial sum below 2^20", g == 0.5 - (-21f64).exp2(), format!("{g}"));

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let size = rng.gen_range(1..=300usize);
        // Spread masses over many orders of magnitude so lengths vary.
        let raw: Vec<f64> = (0..size).map(|_| (-rng.gen_range(0.0..30.0f64)).exp2()).collect();
        let total: f64 = raw.iter().sum();
        let density = FiniteDensity::new(raw.iter().map(|w| w / total).collect())?;
        worst = worst.max(shannon_fano_build(&density)?.kraft_sum());
    }
    sheet.check("Shannon-Fano Kraft sum over 100 densities", worst <= 1.0 + 1e-12, format!("max {worst}"));
    Ok(())
}

fn uniform_counting(sheet: &mut Sheet) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut violations = [0u32; 3];
    let mut worst = [0.0f64; 3];
    for _ in 0..1000 {
        let table = random_partial_code(&mut rng, 256);
        for s in 1..=3usize {
            let count = table.count_at_most(8 - s);
            worst[s - 1] = worst[s - 1].max(count as f64 / 256.0);
            if count << s > 256 {
                violations[s - 1] += 1;
            }
        }
    }
    for s in 1..=3 {
        sheet.check(
            format!("s = {s}"),
            violations[s - 1] == 0,
            format!("{} violations, largest fraction {} vs {}", violations[s - 1], worst[s - 1], (-(s as f64)).exp2()),
        );
    }
}

fn exhaustive_theorems(sheet: &mut Sheet, start: Instant) -> Result<()> {
    let none = RngSpec::new(0);
    for s in 0..=12u32 {
        let b = runs_threshold(12, s as f64)?;
        let t = b.threshold.unwrap() as usize;
        if t > 12 {
            break;
        }
        let r = sim_runs(12, t, None, &none)?;
        let exact = r.empirical_prob;
        sheet.check(
            format!("runs n = 12, s = {s}, t = {t}: 2^-s"),
            exact <= b.probability,
            format!("{exact} vs {}", b.probability),
        );
        sheet.report(format!("runs n = 12, t = {t}: n 2^-t"), r);
    }
    for n in 4..=6usize {
        for t in 3..=n {
            sheet.report(format!("urns n = {n}, load > {t}"), sim_urns(n, t, None, &none)?);
            // The code itself certifies the stronger event `load ≥ t`.
            let at_least = domain::urn_assignments(n)
                .filter(|b| {
                    let mut load = vec![0usize; n];
                    b.iter().for_each(|&u| load[u] += 1);
                    load.iter().any(|&l| l >= t)
                })
                .count();
            let p = at_least as f64 / (n as f64).powi(n as i32);
            let bound = urns_tail(n as u64, t as u64)?.probability;
            sheet.check(format!("urns n = {n}, load >= {t}"), p <= bound, format!("{p} vs {bound}"));
        }
    }
    for alpha in [0.05, 0.1] {
        let dist = inversion_distribution(7)?;
        let theorem = inversions_tail(7, alpha, crate::bounds::DEFAULT_INVERSIONS_K)?;
        let limit = theorem.threshold.unwrap();
        let hits: u64 = dist.iter().enumerate().filter(|&(m, _)| m as f64 <= limit).map(|(_, c)| c).sum();
        let p = hits as f64 / 5040.0;
        sheet.check(
            format!("inversions n = 7, alpha = {alpha}, asymptotic form"),
            p <= theorem.probability,
            format!("{hits}/5040 with at most {limit:.3} inversions vs {}", theorem.probability),
        );
        sheet.report(format!("inversions n = 7, alpha = {alpha}, code bound"), exhaustive_inversions(7, alpha)?);
    }
    // Every integer cutoff M, priced by the insertion sort code.
    let dist = inversion_distribution(7)?;
    let mut cumulative = 0u64;
    let mut bad = Vec::new();
    for (m, &c) in dist.iter().enumerate() {
        cumulative += c;
        let alpha = (m as f64 + 5.5) / 49.0;
        let bound = inversions_code_bound(7, alpha)?;
        if bound.threshold.unwrap().floor() as usize != m {
            bad.push(format!("alpha {alpha} maps to cutoff {}", bound.threshold.unwrap()));
        } else if cumulative as f64 / 5040.0 > bound.probability {
            bad.push(format!("M = {m}: {cumulative}/5040 > {}", bound.probability));
        }
    }
    sheet.check(
        "inversions n = 7, every cutoff M",
        bad.is_empty(),
        if bad.is_empty() { "22 cutoffs".into() } else { bad.join("; ") },
    );
    sheet.deadline(start, 120_000);
    Ok(())
}

fn witness_roundtrips(sheet: &mut Sheet) -> Result<()> {
    sheet.roundtrip("runs n = 12, t = 5", roundtrip(&RunsCodec::new(12, 5)?, domain::bit_strings(12)), None);
    sheet.roundtrip("urns n = 4, t = 3", roundtrip(&UrnsCodec::new(4, 3)?, domain::urn_assignments(4)), None);
    for enc in [VertexEncoding::Indices, VertexEncoding::SubsetRank] {
        let rt = roundtrip(&CliqueCodec::new(5, 3, enc)?, domain::graphs(5));
        let total = rt.domain + rt.skipped;
        sheet.check(format!("clique n = 5 graphs enumerated ({enc:?})"), total == 1024, format!("{total}"));
        sheet.roundtrip(format!("clique n = 5, t = 3 ({enc:?})"), rt, None);
    }
    for n in 1..=6usize {
        let expected = (1..=n as u64).product();
        sheet.roundtrip(
            format!("inssort n = {n}"),
            roundtrip(&InsSortCodec::new(n)?, domain::permutations(n)),
            Some(expected),
        );
    }
    Ok(())
}

/// `Pr{Binomial(n, P/10) ≤ K}` as an exact integer over `10^n`.
fn binomial_tail_tenths(n: u32, p_tenths: u128, k: u32) -> f64 {
    let mut c = 1u128;
    let mut sum = 0u128;
    for i in 0..=k.min(n) {
        sum += c * p_tenths.pow(i) * (10 - p_tenths).pow(n - i);
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    sum as f64 / 10f64.powi(n as i32)
}

fn kl_chernoff(sheet: &mut Sheet) -> Result<()> {
    const N: u32 = 20;
    for p_tenths in [3u128, 5, 7] {
        let p = p_tenths as f64 / 10.0;
        let mut violations = Vec::new();
        for i in 0..10u128 {
            let eps = p * i as f64 / 10.0;
            // (p − ε)n = P(10 − i)n/100 with p = P/10, ε = ip/10.
            let k = (p_tenths * (10 - i) * N as u128 / 100) as u32;
            let tail = binomial_tail_tenths(N, p_tenths, k);
            let bound = chernoff_kl(N as u64, p, eps)?.probability;
            if tail > bound {
                violations.push(format!("eps {eps}: {tail} > {bound}"));
            }
        }
        sheet.check(
            format!("p = {p}, 10 eps"),
            violations.is_empty(),
            if violations.is_empty() { "0 violations".into() } else { violations.join("; ") },
        );
    }
    // Fair coin: the relative deviation ε of the basic bound is an absolute
    // deviation ε/2 from p = 1/2.
    let mut violations = Vec::new();
    for i in 0..10 {
        let eps = i as f64 / 10.0;
        let kl = chernoff_kl(N as u64, 0.5, eps / 2.0)?.probability;
        let basic = chernoff_basic(N as u64, eps)?.probability;
        if kl > basic {
            violations.push(format!("eps {eps}: {kl} > {basic}"));
        }
    }
    sheet.check(
        "KL below e^(-eps^2 n/2) at p = 1/2",
        violations.is_empty(),
        if violations.is_empty() { "0 violations".into() } else { violations.join("; ") },
    );
    Ok(())
}

/// Experiment id, parameters, trials, seed.
type Run<'a> = (&'a str, &'a [(&'a str, f64)], u64, u64);

fn monte_carlo(sheet: &mut Sheet, start: Instant) -> Result<()> {
    let runs: [Run; 7] = [
        ("runs", &[("n", 1024.0), ("s", 10.0)], 100_000, 42),
        ("urns", &[("n", 1024.0), ("s", 3.0)], 100_000, 43),
        ("linear-probing", &[("n", 1000.0), ("c", 4.0), ("s", 2.0)], 10_000, 44),
        ("ramsey", &[("n", 16.0), ("s", 2.0)], 10_000, 45),
        ("triangles", &[("n", 200.0), ("c", 0.2)], 10_000, 1),
        ("percolation", &[("side", 8.0), ("p", 0.25), ("s", 4.0)], 10_000, 46),
        ("moser", &[("k", 8.0), ("m", 32.0), ("r", 7.0), ("s", 30.0)], 100, 7),
    ];
    for (id, kv, trials, seed) in runs {
        let r = run_experiment(id, &params(kv), Some(trials), seed)?;
        if id == "moser" {
            let unsat = r.stats.get("unsatisfied_results").copied().unwrap_or(f64::NAN);
            sheet.check("moser: all 100 assignments satisfy", unsat == 0.0, format!("{unsat} unsatisfied"));
            sheet.check(
                "moser: threshold never reached",
                r.exceed_count == 0,
                format!("{} exceedances", r.exceed_count),
            );
        }
        if id == "triangles" {
            let b = r.bound.probability;
            sheet.check("triangles: bound is c^3", (b - 0.008).abs() < 1e-12, format!("{b}"));
        }
        sheet.report(id, r);
    }
    sheet.deadline(start, 600_000);
    Ok(())
}

/// Sizes used by the 2-choice fit, with trial counts scaled so each size
/// costs about the same.
const TWO_CHOICE_SIZES: [(u32, u64); 3] = [(12, 1000), (14, 300), (16, 100)];

fn asymptotic_info(sheet: &mut Sheet) -> Result<()> {
    for n in [250.0, 500.0, 1000.0] {
        let r = run_experiment("cuckoo", &params(&[("n", n)]), Some(10_000), 8)?;
        sheet.fitted.insert(format!("cuckoo.k2.n{n}"), r.stats["fitted_k2"]);
        sheet.fitted.insert(format!("cuckoo.rehash_rate.n{n}"), r.empirical_prob);
        sheet.report(format!("cuckoo n = {n}"), r);
    }
    for (log_n, trials) in TWO_CHOICE_SIZES {
        let n = (1u64 << log_n) as f64;
        let r = run_experiment("two-choice", &params(&[("n", n), ("c", 16.0)]), Some(trials), 9)?;
        sheet.fitted.insert(format!("two_choice.d.n2^{log_n}"), r.stats["fitted_d"]);
        sheet.fitted.insert(format!("two_choice.max_load.n2^{log_n}"), r.stats["max_load"]);
        sheet.report(format!("two-choice n = 2^{log_n}"), r);
    }
    let bst = run_experiment("bst-height", &params(&[("n", 1024.0), ("c", 9.943483)]), Some(10_000), 10)?;
    sheet.check(
        "bst-height: no exceedance at n = 1024",
        bst.exceed_count == 0,
        format!("max height {}", bst.stats["max_height"]),
    );
    sheet.fitted.insert("bst.max_height_over_log_n".into(), bst.stats["max_height_over_log_n"]);
    sheet.report("bst-height", bst);

    let rec = run_experiment("records", &params(&[("n", 1024.0), ("c", 3.0)]), Some(10_000), 11)?;
    sheet.fitted.insert("records.k".into(), rec.stats["fitted_k"]);
    sheet.fitted.insert("records.exceed_rate".into(), rec.empirical_prob);
    sheet.fitted.insert("records.rate".into(), rec.bound.details["rate"]);
    sheet.report("records", rec);

    let exp = run_experiment("expander", &params(&[("n", 20.0), ("kmax", 2.0)]), Some(10_000), 12)?;
    let (rate, oracle, sigma) = (exp.stats["k1_rate"], exp.stats["k1_oracle"], exp.stats["k1_sigma"]);
    sheet.check(
        "expander: single-vertex rate within 3 sigma of oracle",
        (rate - oracle).abs() <= 3.0 * sigma,
        format!("{rate} vs {oracle} (sigma {sigma})"),
    );
    sheet.fitted.insert("expander.k1_rate".into(), rate);
    sheet.report("expander", exp);
    Ok(())
}

fn spot_values(sheet: &mut Sheet) -> Result<()> {
    let h = binary_entropy(0.5)?;
    sheet.check("H(1/2) = 1", h == 1.0, format!("{h}"));
    let (hi, hi_ok) = bst_height_constant_check(9.943483)?;
    sheet.check("bst constant 9.943483 clears 2", hi_ok, format!("{hi}"));
    let (lo, lo_ok) = bst_height_constant_check(9.9)?;
    sheet.check("bst constant 9.9 falls below 2", !lo_ok && lo < 2.0, format!("{lo}"));
    let beta = expander_beta();
    sheet.check("beta", (beta - 4.48418).abs() <= 1e-4, format!("{beta}"));
    let alpha = expander_alpha_threshold();
    sheet.check("alpha threshold", (alpha - 0.002).abs() <= 5e-4, format!("{alpha}"));
    Ok(())
}

fn fast_simulations() -> Result<CriterionResult> {
    let start = Instant::now();
    let mut sheet = Sheet::new();
    sheet.report("runs", run_experiment("runs", &params(&[("n", 1024.0), ("t", 20.0)]), Some(10_000), 42)?);
    sheet.report("triangles", run_experiment("triangles", &params(&[("n", 200.0), ("c", 0.2)]), Some(10_000), 1)?);
    let moser = run_experiment("moser", &params(&[]), Some(100), 7)?;
    sheet.check("moser: all assignments satisfy", moser.stats["unsatisfied_results"] == 0.0, "");
    sheet.report("moser", moser);
    Ok(sheet.finish("fast", start))
}
