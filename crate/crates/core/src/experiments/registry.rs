use std::collections::BTreeMap;
use std::time::Instant;

use super::*;
use crate::bounds::{opt, req, resolve_params, uint, urns_threshold, ParamSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct ExperimentSpec {
    pub id: &'static str,
    pub about: &'static str,
    pub params: &'static [ParamSpec],
    pub default_trials: u64,
}

const EXHAUSTIVE: ParamSpec = opt("exhaustive", 0.0, "1 enumerates the whole sample space instead of sampling");

pub const EXPERIMENTS: &[ExperimentSpec] = &[
    ExperimentSpec {
        id: "runs",
        about: "runs of ones in n fair bits",
        default_trials: 100_000,
        params: &[
            req("n", "string length"),
            opt("t", 0.0, "run length; 0 derives it from s"),
            opt("s", 10.0, "savings used when t = 0"),
            EXHAUSTIVE,
        ],
    },
    ExperimentSpec {
        id: "urns",
        about: "max load of n balls in n urns, event load > t",
        default_trials: 100_000,
        params: &[
            req("n", "balls and urns"),
            opt("t", 0.0, "load; 0 derives it from s"),
            opt("s", 3.0, "savings used when t = 0"),
            EXHAUSTIVE,
        ],
    },
    ExperimentSpec {
        id: "linear-probing",
        about: "block size around one key in linear probing",
        default_trials: 10_000,
        params: &[opt("n", 1000.0, "keys"), opt("c", 4.0, "slots per key"), opt("s", 2.0, "savings")],
    },
    ExperimentSpec {
        id: "cuckoo",
        about: "rehash frequency and insertion steps in cuckoo hashing",
        default_trials: 10_000,
        params: &[
            req("n", "keys"),
            opt("max_loop", 0.0, "MaxLoop; 0 means ceil(4 log n + 10)"),
            opt("s", 20.0, "savings for the step bound"),
            opt("k1", crate::bounds::DEFAULT_CUCKOO_K1, "path constant"),
            opt("k2", crate::bounds::DEFAULT_CUCKOO_K2, "rehash constant"),
        ],
    },
    ExperimentSpec {
        id: "two-choice",
        about: "max load and components in 2-choice hashing",
        default_trials: 1_000,
        params: &[
            req("n", "keys"),
            opt("c", 16.0, "urns per key"),
            opt("s", 10.0, "savings for the component threshold"),
            opt("k", crate::bounds::DEFAULT_TWO_CHOICE_K, "component constant"),
            opt("d", crate::bounds::DEFAULT_TWO_CHOICE_D, "load constant"),
        ],
    },
    ExperimentSpec {
        id: "expander",
        about: "small non-expanding sets in random 3-left-regular bipartite graphs",
        default_trials: 1_000,
        params: &[
            opt("n", 100.0, "vertices per side"),
            opt("alpha", 1.0, "largest set as a fraction of n"),
            opt("kmax", 3.0, "largest set size checked"),
            opt("constant", 0.0, "O(1) term of the savings"),
        ],
    },
    ExperimentSpec {
        id: "inversions",
        about: "permutations with few inversions",
        default_trials: 10_000,
        params: &[
            req("n", "length"),
            opt("alpha", 0.05, "inversion budget factor"),
            opt("k", crate::bounds::DEFAULT_INVERSIONS_K, "O(log n) coefficient"),
            EXHAUSTIVE,
        ],
    },
    ExperimentSpec {
        id: "records",
        about: "permutations with many records",
        default_trials: 10_000,
        params: &[
            req("n", "length"),
            opt("c", 3.0, "records per log n"),
            opt("k", crate::bounds::DEFAULT_RECORDS_K, "O(log log n) coefficient"),
        ],
    },
    ExperimentSpec {
        id: "bst-height",
        about: "height of the binary search tree of a permutation",
        default_trials: 10_000,
        params: &[req("n", "length"), opt("c", 9.943483, "height per log n")],
    },
    ExperimentSpec {
        id: "find",
        about: "comparisons made by Hoare's Find",
        default_trials: 10_000,
        params: &[
            req("n", "length"),
            opt("c", 4.0, "comparisons per element"),
            opt("k", 0.0, "rank sought; 0 draws it uniformly"),
        ],
    },
    ExperimentSpec {
        id: "ramsey",
        about: "cliques or independent sets in G(n, 1/2)",
        default_trials: 10_000,
        params: &[
            req("n", "vertices, at most 24"),
            opt("s", 2.0, "savings used when t = 0"),
            opt("t", 0.0, "set size; 0 derives it from s"),
            EXHAUSTIVE,
        ],
    },
    ExperimentSpec {
        id: "triangles",
        about: "triangles in G(n, c/n)",
        default_trials: 10_000,
        params: &[req("n", "vertices"), req("c", "expected degree")],
    },
    ExperimentSpec {
        id: "percolation",
        about: "long cycles in the percolated torus",
        default_trials: 10_000,
        params: &[
            opt("side", 8.0, "torus side, at most 12"),
            opt("p", 0.25, "edge probability, below 1/3"),
            opt("s", 4.0, "savings"),
            opt("max_len", 0.0, "cycle length; 0 derives it from s"),
            opt("budget", 1e7, "path extensions per search"),
        ],
    },
    ExperimentSpec {
        id: "percolation-components",
        about: "two largest components of the percolated torus",
        default_trials: 1_000,
        params: &[opt("side", 20.0, "torus side"), opt("p", 0.7, "edge probability")],
    },
    ExperimentSpec {
        id: "moser",
        about: "Fix calls of Moser's algorithm on bounded-overlap k-CNF",
        default_trials: 100,
        params: &[
            opt("k", 8.0, "clause width"),
            opt("m", 32.0, "clauses"),
            opt("r", 7.0, "overlap bound, below 2^(k-3)"),
            opt("s", 30.0, "savings"),
        ],
    },
];

pub fn spec(id: &str) -> Option<&'static ExperimentSpec> {
    EXPERIMENTS.iter().find(|e| e.id == id)
}

/// Runs a registered experiment. `trials = None` uses the default count;
/// exhaustive mode ignores both `trials` and `seed`.
pub fn run_experiment(
    id: &str,
    given: &BTreeMap<String, f64>,
    trials: Option<u64>,
    seed: u64,
) -> Result<ExperimentReport> {
    let spec = spec(id).ok_or_else(|| {
        let ids: Vec<_> = EXPERIMENTS.iter().map(|e| e.id).collect();
        Error::arg("experiment", format!("unknown id `{id}` (valid: {})", ids.join(", ")))
    })?;
    let p = resolve_params(spec.id, spec.params, given)?;
    let trials = trials.unwrap_or(spec.default_trials);
    if trials == 0 {
        return Err(Error::arg("trials", "must be positive"));
    }
    let rng = RngSpec::new(seed);
    let exhaustive = p.get("exhaustive").is_some_and(|&e| e != 0.0);
    let mode = (!exhaustive).then_some(trials);
    let start = Instant::now();
    let mut report = match id {
        "runs" => {
            let n = uint(&p, "n")?;
            let t = match uint(&p, "t")? {
                0 => crate::bounds::runs_threshold(n, p["s"])?.threshold.unwrap() as u64,
                t => t,
            };
            sim_runs(n as usize, t as usize, mode, &rng)?
        }
        "urns" => {
            let n = uint(&p, "n")?;
            let t = match uint(&p, "t")? {
                0 => urns_threshold(n, p["s"])?.threshold.unwrap() as u64,
                t => t,
            };
            sim_urns(n as usize, t as usize, mode, &rng)?
        }
        "linear-probing" => sim_linear_probing(uint(&p, "n")? as usize, p["c"], p["s"], trials, &rng)?,
        "cuckoo" => {
            let n = uint(&p, "n")? as usize;
            let max_loop = match uint(&p, "max_loop")? {
                0 => (4.0 * (n.max(2) as f64).log2() + 10.0).ceil() as usize,
                l => l as usize,
            };
            sim_cuckoo(n, max_loop, p["s"], p["k1"], p["k2"], trials, &rng)?
        }
        "two-choice" => sim_two_choice(uint(&p, "n")? as usize, p["c"], p["s"], p["k"], p["d"], trials, &rng)?,
        "expander" => {
            sim_expander(uint(&p, "n")? as usize, p["alpha"], uint(&p, "kmax")? as usize, p["constant"], trials, &rng)?
        }
        "inversions" if exhaustive => exhaustive_inversions(uint(&p, "n")? as usize, p["alpha"])?,
        "inversions" => {
            report_inversions(&sim_permutation_stats(uint(&p, "n")? as usize, trials, None, &rng)?, p["alpha"], p["k"])?
        }
        "records" => {
            report_records(&sim_permutation_stats(uint(&p, "n")? as usize, trials, None, &rng)?, p["c"], p["k"])?
        }
        "bst-height" => report_bst(&sim_permutation_stats(uint(&p, "n")? as usize, trials, None, &rng)?, p["c"])?,
        "find" => {
            let k = uint(&p, "k")? as usize;
            let sample = sim_permutation_stats(uint(&p, "n")? as usize, trials, (k > 0).then_some(k), &rng)?;
            report_find(&sample, p["c"])?
        }
        "ramsey" => sim_ramsey(uint(&p, "n")? as usize, uint(&p, "t")? as usize, p["s"], mode, &rng)?,
        "triangles" => sim_triangles(uint(&p, "n")? as usize, p["c"], trials, &rng)?,
        "percolation" => sim_percolation(
            uint(&p, "side")? as usize,
            p["p"],
            p["s"],
            uint(&p, "max_len")? as usize,
            uint(&p, "budget")?,
            trials,
            &rng,
        )?,
        "percolation-components" => sim_percolation_components(uint(&p, "side")? as usize, p["p"], trials, &rng)?,
        "moser" => {
            sim_moser(uint(&p, "k")? as usize, uint(&p, "m")? as usize, uint(&p, "r")? as usize, p["s"], trials, &rng)?
        }
        _ => unreachable!("every registered id is handled"),
    };
    report.wall_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

/// All `n!` permutations against the code-based bound for "at most
/// `αn² − n + 2` inversions", which has no hidden constants.
pub fn exhaustive_inversions(n: usize, alpha: f64) -> Result<ExperimentReport> {
    let dist = inversion_distribution(n)?;
    let bound = crate::bounds::inversions_code_bound(n as u64, alpha)?;
    let limit = bound.threshold.unwrap();
    let total: u64 = dist.iter().sum();
    let hits: u64 = dist.iter().enumerate().filter(|&(m, _)| m as f64 <= limit).map(|(_, &c)| c).sum();
    Ok(ExperimentReport::new("inversions", total, hits, bound, None)
        .param("n", n as f64)
        .param("alpha", alpha)
        .histogram(dist.iter().enumerate().map(|(m, &c)| (m as u64, c)).collect()))
}
