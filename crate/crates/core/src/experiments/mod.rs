//! Monte Carlo and exhaustive simulators for the random processes the bounds
//! talk about, each reporting against the matching [`TailBound`].

mod format;
mod graphs;
mod hashing;
mod moser;
mod permutations;
mod registry;
mod strings;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ledger::TailBound;

pub use format::{fmt_g17, to_csv, to_json, to_json_value, write_json};
pub use graphs::{
    search_long_cycle, sim_percolation, sim_percolation_components, sim_ramsey, sim_triangles, CycleSearch, Torus,
};
pub use hashing::{sim_cuckoo, sim_expander, sim_linear_probing, sim_two_choice, CuckooTable, LinearProbingTable};
pub use moser::{gen_bounded_overlap_cnf, moser_solve, sim_moser, CnfFormula, Literal, MoserRun, MAX_FIX_CALLS};
pub use permutations::{
    bst_height, find_comparisons, inversion_distribution, record_count, report_bst, report_find, report_inversions,
    report_records, sim_permutation_stats, PermutationSample,
};
pub use registry::{exhaustive_inversions, run_experiment, ExperimentSpec, EXPERIMENTS};
pub use strings::{sim_runs, sim_urns};

/// Per-trial generators derived from one master seed.
///
/// Trial `i` gets a ChaCha8 generator keyed by `master_seed` (expanded to a
/// 256-bit key by `seed_from_u64`) on stream `i`. ChaCha streams under one key
/// are independent keystreams, so trials never share randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RngSpec {
    pub master_seed: u64,
}

impl RngSpec {
    pub fn new(master_seed: u64) -> Self {
        RngSpec { master_seed }
    }

    pub fn stream(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(trial);
        rng
    }
}

/// Runs `trials` independent trials, in parallel, returning outcomes in trial order.
pub fn run_trials<T, F>(rng: &RngSpec, trials: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    (0..trials).into_par_iter().map(|i| f(&mut rng.stream(i))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    AsymptoticInfo,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::AsymptoticInfo => "asymptotic-info",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of one experiment against one bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub experiment: String,
    pub params: BTreeMap<String, f64>,
    pub trials: u64,
    /// `None` for exhaustive runs, which use no randomness.
    pub seed: Option<u64>,
    pub exhaustive: bool,
    pub exceed_count: u64,
    pub empirical_prob: f64,
    pub bound: TailBound,
    pub mc_stderr: f64,
    pub verdict: Verdict,
    pub stats: BTreeMap<String, f64>,
    pub histogram: BTreeMap<u64, u64>,
    pub notes: Vec<String>,
    pub wall_ms: u64,
}

impl ExperimentReport {
    /// Derives the empirical probability, its standard error and the verdict.
    ///
    /// Exhaustive runs compare exact numbers, so they get no `3σ` slack.
    pub fn new(
        experiment: impl Into<String>,
        trials: u64,
        exceed_count: u64,
        bound: TailBound,
        seed: Option<u64>,
    ) -> Self {
        let p = if trials == 0 { 0.0 } else { exceed_count as f64 / trials as f64 };
        let stderr = if trials == 0 { 0.0 } else { (p * (1.0 - p) / trials as f64).sqrt() };
        let exhaustive = seed.is_none();
        let verdict = if bound.asymptotic {
            Verdict::AsymptoticInfo
        } else {
            let slack = if exhaustive { 0.0 } else { 3.0 * stderr };
            if p <= bound.probability + slack {
                Verdict::Pass
            } else {
                Verdict::Fail
            }
        };
        ExperimentReport {
            experiment: experiment.into(),
            params: BTreeMap::new(),
            trials,
            seed,
            exhaustive,
            exceed_count,
            empirical_prob: p,
            bound,
            mc_stderr: stderr,
            verdict,
            stats: BTreeMap::new(),
            histogram: BTreeMap::new(),
            notes: Vec::new(),
            wall_ms: 0,
        }
    }

    pub fn param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.into(), value);
        self
    }

    pub fn stat(mut self, name: &str, value: f64) -> Self {
        self.stats.insert(name.into(), value);
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn histogram(mut self, histogram: BTreeMap<u64, u64>) -> Self {
        self.histogram = histogram;
        self
    }

    /// Turns any verdict into a failure when a side check breaks.
    pub fn fail_if(mut self, broken: bool, why: impl Into<String>) -> Self {
        if broken {
            self.verdict = Verdict::Fail;
            self.notes.push(why.into());
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

/// Counts values, for histograms that merge in any order.
pub(crate) fn histogram<I: IntoIterator<Item = u64>>(values: I) -> BTreeMap<u64, u64> {
    let mut h = BTreeMap::new();
    for v in values {
        *h.entry(v).or_insert(0) += 1;
    }
    h
}

/// Disjoint-set forest with per-root vertex and edge counts.
pub(crate) struct Components {
    parent: Vec<u32>,
    vertices: Vec<u32>,
    edges: Vec<u32>,
}

impl Components {
    pub(crate) fn new(n: usize) -> Self {
        Components { parent: (0..n as u32).collect(), vertices: vec![1; n], edges: vec![0; n] }
    }

    pub(crate) fn find(&mut self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            let up = self.parent[self.parent[v as usize] as usize];
            self.parent[v as usize] = up;
            v = up;
        }
        v
    }

    pub(crate) fn add_edge(&mut self, u: u32, v: u32) {
        let (a, b) = (self.find(u), self.find(v));
        if a == b {
            self.edges[a as usize] += 1;
            return;
        }
        let (big, small) = if self.vertices[a as usize] >= self.vertices[b as usize] { (a, b) } else { (b, a) };
        self.parent[small as usize] = big;
        self.vertices[big as usize] += self.vertices[small as usize];
        self.edges[big as usize] += self.edges[small as usize] + 1;
    }

    /// `(vertices, edges)` of every component.
    pub(crate) fn sizes(&mut self) -> Vec<(u32, u32)> {
        (0..self.parent.len() as u32)
            .filter(|&v| self.parent[v as usize] == v)
            .map(|r| (self.vertices[r as usize], self.edges[r as usize]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_replay_and_differ() {
        let spec = RngSpec::new(42);
        let a: Vec<u64> = (0..4).map(|_| spec.stream(3).gen()).collect();
        let b: Vec<u64> = (0..4).map(|_| spec.stream(3).gen()).collect();
        assert_eq!(a, b);
        assert_ne!(spec.stream(3).gen::<u64>(), spec.stream(4).gen::<u64>());
        assert_ne!(spec.stream(0).gen::<u64>(), RngSpec::new(43).stream(0).gen::<u64>());
    }

    #[test]
    fn trials_come_back_in_order() {
        let spec = RngSpec::new(1);
        let par = run_trials(&spec, 200, |r| r.gen::<u32>());
        let seq: Vec<u32> = (0..200).map(|i| spec.stream(i).gen()).collect();
        assert_eq!(par, seq);
    }

    #[test]
    fn verdict_rule() {
        let b = TailBound::from_savings("x", 2.0);
        let r = ExperimentReport::new("x", 100, 30, b.clone(), Some(1));
        // 0.30 ≤ 0.25 + 3·sqrt(0.3·0.7/100) = 0.387
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(ExperimentReport::new("x", 100, 40, b.clone(), Some(1)).verdict, Verdict::Fail);
        assert_eq!(ExperimentReport::new("x", 100, 26, b.clone(), None).verdict, Verdict::Fail);
        assert_eq!(ExperimentReport::new("x", 100, 25, b.clone(), None).verdict, Verdict::Pass);
        let a = b.asymptotic(true);
        assert_eq!(ExperimentReport::new("x", 100, 100, a, Some(1)).verdict, Verdict::AsymptoticInfo);
    }

    #[test]
    fn components() {
        let mut c = Components::new(5);
        c.add_edge(0, 1);
        c.add_edge(1, 2);
        c.add_edge(2, 0);
        c.add_edge(3, 3);
        let mut sizes = c.sizes();
        sizes.sort();
        assert_eq!(sizes, vec![(1, 0), (1, 1), (3, 3)]);
    }
}
