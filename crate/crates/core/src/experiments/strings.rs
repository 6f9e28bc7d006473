use rand::Rng;

use super::{histogram, run_trials, ExperimentReport, RngSpec};
use crate::bounds::{runs_tail, urns_tail};
use crate::error::{Error, Result};

/// Largest `n` for which every `n`-bit string is enumerated.
pub const MAX_EXHAUSTIVE_RUNS: usize = 30;
/// Largest `n` for which all `n^n` urn assignments are enumerated.
pub const MAX_EXHAUSTIVE_URNS: usize = 8;

fn has_run_word(x: u64, t: usize) -> bool {
    let mut y = x;
    for i in 1..t {
        y &= x >> i;
        if y == 0 {
            return false;
        }
    }
    y != 0
}

/// Longest run of ones in the first `n` bits of `words`.
fn longest_run(words: &[u64], n: usize) -> usize {
    let (mut best, mut cur) = (0, 0);
    for i in 0..n {
        if words[i / 64] >> (i % 64) & 1 == 1 {
            cur += 1;
            best = best.max(cur);
        } else {
            cur = 0;
        }
    }
    best
}

/// Strings of `n` fair bits containing a run of `t` ones.
///
/// With `trials = None` all `2^n` strings are enumerated (`n ≤ 30`) and the
/// probability is exact.
pub fn sim_runs(n: usize, t: usize, trials: Option<u64>, rng: &RngSpec) -> Result<ExperimentReport> {
    if n == 0 {
        return Err(Error::arg("n", "must be positive"));
    }
    let bound = runs_tail(n as u64, t as u64)?;
    let report = match trials {
        None => {
            if n > MAX_EXHAUSTIVE_RUNS {
                return Err(Error::range(n, format!("<= {MAX_EXHAUSTIVE_RUNS} for exhaustive mode")));
            }
            let hits = if t == 0 { 1u64 << n } else { (0u64..1 << n).filter(|&x| has_run_word(x, t)).count() as u64 };
            ExperimentReport::new("runs", 1 << n, hits, bound, None)
        }
        Some(trials) => {
            let runs = run_trials(rng, trials, |r| {
                let words: Vec<u64> = (0..n.div_ceil(64)).map(|_| r.gen()).collect();
                longest_run(&words, n) as u64
            });
            let hits = runs.iter().filter(|&&l| l >= t as u64).count() as u64;
            ExperimentReport::new("runs", trials, hits, bound, Some(rng.master_seed)).histogram(histogram(runs))
        }
    };
    Ok(report.param("n", n as f64).param("t", t as f64))
}

fn max_load(b: &[usize], loads: &mut [u32]) -> u32 {
    loads.fill(0);
    for &u in b {
        loads[u] += 1;
    }
    loads.iter().copied().max().unwrap_or(0)
}

/// `n` balls into `n` urns; the event is some urn holding more than `t`.
///
/// `trials = None` enumerates all `n^n` assignments (`n ≤ 8`). The bound is
/// the one for "at least `t`", which covers the smaller event.
pub fn sim_urns(n: usize, t: usize, trials: Option<u64>, rng: &RngSpec) -> Result<ExperimentReport> {
    if n == 0 {
        return Err(Error::arg("n", "must be positive"));
    }
    let bound = urns_tail(n as u64, t as u64)?;
    let report = match trials {
        None => {
            if n > MAX_EXHAUSTIVE_URNS {
                return Err(Error::range(n, format!("<= {MAX_EXHAUSTIVE_URNS} for exhaustive mode")));
            }
            let total = (n as u64).pow(n as u32);
            let mut b = vec![0usize; n];
            let mut loads = vec![0u32; n];
            let mut maxima = Vec::with_capacity(total as usize);
            for _ in 0..total {
                maxima.push(max_load(&b, &mut loads) as u64);
                // Next assignment in base n, least significant ball first.
                for slot in b.iter_mut() {
                    *slot += 1;
                    if *slot < n {
                        break;
                    }
                    *slot = 0;
                }
            }
            let hits = maxima.iter().filter(|&&m| m > t as u64).count() as u64;
            ExperimentReport::new("urns", total, hits, bound, None).histogram(histogram(maxima))
        }
        Some(trials) => {
            let maxima = run_trials(rng, trials, |r| {
                let b: Vec<usize> = (0..n).map(|_| r.gen_range(0..n)).collect();
                max_load(&b, &mut vec![0; n]) as u64
            });
            let hits = maxima.iter().filter(|&&m| m > t as u64).count() as u64;
            ExperimentReport::new("urns", trials, hits, bound, Some(rng.master_seed)).histogram(histogram(maxima))
        }
    };
    Ok(report.param("n", n as f64).param("t", t as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcodes::BitString;
    use crate::witnesses::first_run;

    #[test]
    fn run_detection_agrees_with_first_run() {
        for x in 0u64..1 << 10 {
            let bits: BitString = (0..10).map(|i| x >> i & 1 == 1).collect();
            for t in 1..=10 {
                assert_eq!(has_run_word(x, t), first_run(&bits, t).is_some());
                assert_eq!(longest_run(&[x], 10) >= t, first_run(&bits, t).is_some());
            }
        }
    }

    #[test]
    fn exhaustive_runs() {
        let spec = RngSpec::new(0);
        let r = sim_runs(4, 4, None, &spec).unwrap();
        assert_eq!((r.exceed_count, r.trials), (1, 16));
        assert_eq!(r.empirical_prob, 1.0 / 16.0);
        // Strings of length 12 with a run of 5, by the standard recurrence.
        let mut free = [0u64; 13];
        for (len, slot) in free.iter_mut().enumerate() {
            *slot = if len < 5 { 1 << len } else { 0 };
        }
        for len in 5..=12 {
            free[len] = (1..=5).map(|k| free[len - k]).sum();
        }
        let r = sim_runs(12, 5, None, &spec).unwrap();
        assert_eq!(r.exceed_count, 4096 - free[12]);
        assert!(r.passed());
    }

    #[test]
    fn exhaustive_urns() {
        let spec = RngSpec::new(0);
        let r = sim_urns(1, 0, None, &spec).unwrap();
        assert_eq!(r.empirical_prob, 1.0);
        // Some urn with ≥ 3 of 4 balls: 4 urns × (4·3 + 1) assignments.
        let r = sim_urns(4, 2, None, &spec).unwrap();
        assert_eq!((r.exceed_count, r.trials), (52, 256));
    }

    #[test]
    fn monte_carlo_replays() {
        let spec = RngSpec::new(9);
        let a = sim_runs(256, 9, Some(500), &spec).unwrap();
        let b = sim_runs(256, 9, Some(500), &spec).unwrap();
        assert_eq!(a, b);
        let u = sim_urns(64, 4, Some(500), &spec).unwrap();
        assert_eq!(u.histogram.values().sum::<u64>(), 500);
    }
}
