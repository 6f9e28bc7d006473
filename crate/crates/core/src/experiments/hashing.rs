use std::f64::consts::E;

use rand::Rng;

use super::{histogram, run_trials, Components, ExperimentReport, RngSpec};
use crate::bounds::{
    cuckoo_tails, expander_savings, linear_probing_block_bound, linear_probing_threshold, two_choice_thresholds,
};
use crate::error::{Error, Result};
use crate::ledger::TailBound;

const EMPTY: u32 = u32::MAX;

/// A linear probing table of size `m` holding keys `0..n`.
#[derive(Debug, Clone)]
pub struct LinearProbingTable {
    pub slots: Vec<u32>,
    pub hash: Vec<u32>,
    pub home: Vec<u32>,
}

impl LinearProbingTable {
    /// Inserts `0..hash.len()` in order, each at the first free slot at or
    /// after its hash, wrapping around.
    pub fn build(m: usize, hash: Vec<u32>) -> Result<Self> {
        if hash.len() >= m {
            return Err(Error::arg("m", format!("{m} slots cannot hold {} keys with one to spare", hash.len())));
        }
        let mut slots = vec![EMPTY; m];
        let mut home = Vec::with_capacity(hash.len());
        for (x, &h) in hash.iter().enumerate() {
            let mut pos = h as usize;
            while slots[pos] != EMPTY {
                pos = (pos + 1) % m;
            }
            slots[pos] = x as u32;
            home.push(pos as u32);
        }
        Ok(LinearProbingTable { slots, hash, home })
    }

    /// Size of the maximal run of occupied slots containing key `x`.
    pub fn block_size(&self, x: usize) -> usize {
        let m = self.slots.len();
        let at = self.home[x] as usize;
        let mut size = 1;
        let mut i = (at + m - 1) % m;
        while self.slots[i] != EMPTY {
            size += 1;
            i = (i + m - 1) % m;
        }
        let mut i = (at + 1) % m;
        while self.slots[i] != EMPTY {
            size += 1;
            i = (i + 1) % m;
        }
        size
    }

    /// Slots probed by a search for `x`, or `None` if an empty slot comes first.
    pub fn search(&self, x: usize) -> Option<usize> {
        let m = self.slots.len();
        let mut pos = self.hash[x] as usize;
        for probes in 1..=m {
            match self.slots[pos] {
                EMPTY => return None,
                k if k as usize == x => return Some(probes),
                _ => pos = (pos + 1) % m,
            }
        }
        None
    }
}

/// Linear probing with `n` keys in `⌈cn⌉` slots. The event is "the block
/// containing key 0 has exactly `t` slots", with `t` from the threshold for
/// savings `s`; every other block size is also checked against its own bound.
pub fn sim_linear_probing(n: usize, c: f64, s: f64, trials: u64, rng: &RngSpec) -> Result<ExperimentReport> {
    if n == 0 || c <= 1.0 {
        return Err(Error::arg("c", format!("need n >= 1 and c > 1, got n = {n}, c = {c}")));
    }
    let m = (c * n as f64).ceil() as usize;
    let outcomes = run_trials(rng, trials, |r| {
        let hash = (0..n).map(|_| r.gen_range(0..m as u32)).collect();
        let table = LinearProbingTable::build(m, hash).expect("m > n");
        let lost = (0..n).filter(|&x| table.search(x).is_none()).count();
        (table.block_size(0) as u64, table.search(0).unwrap_or(0) as u64, lost)
    });
    let blocks = histogram(outcomes.iter().map(|o| o.0));
    let lost: usize = outcomes.iter().map(|o| o.2).sum();
    let mean_search = outcomes.iter().map(|o| o.1 as f64).sum::<f64>() / trials.max(1) as f64;
    let mean_block = outcomes.iter().map(|o| o.0 as f64).sum::<f64>() / trials.max(1) as f64;
    let seed = Some(rng.master_seed);

    let report = if c > E {
        let bound = linear_probing_threshold(c, s)?;
        let t = bound.threshold.unwrap() as u64;
        let hits = blocks.get(&t).copied().unwrap_or(0);
        // Every block size t ≥ 2 has its own non-asymptotic bound.
        let mut violations = 0;
        for (&size, &count) in blocks.range(2..) {
            let b = linear_probing_block_bound(c, size)?.probability;
            let p = count as f64 / trials as f64;
            if p > b + 3.0 * (p * (1.0 - p) / trials as f64).sqrt() {
                violations += 1;
            }
        }
        ExperimentReport::new("linear-probing", trials, hits, bound, seed)
            .stat("block_bound_violations", violations as f64)
            .fail_if(violations > 0, "a block size exceeded its own bound")
    } else {
        let bound = TailBound::from_savings("linear-probing", 0.0).param("c", c).asymptotic(true);
        ExperimentReport::new("linear-probing", trials, 0, bound, seed)
            .note("c <= e: no bound applies, statistics only")
    };
    Ok(report
        .param("n", n as f64)
        .param("c", c)
        .param("s", s)
        .stat("mean_search", mean_search)
        .stat("mean_block", mean_block)
        .stat("max_block", *blocks.keys().last().unwrap_or(&0) as f64)
        .stat("unfindable_keys", lost as f64)
        .fail_if(lost > 0, "a key was not findable after construction")
        .histogram(blocks))
}

/// Two arrays of `m` slots and hash values for keys `0..n`.
#[derive(Debug, Clone)]
pub struct CuckooTable {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub h: Vec<u32>,
    pub g: Vec<u32>,
    pub max_loop: usize,
}

impl CuckooTable {
    pub fn new<R: Rng + ?Sized>(n: usize, m: usize, max_loop: usize, rng: &mut R) -> Self {
        let mut t = CuckooTable { a: vec![EMPTY; m], b: vec![EMPTY; m], h: vec![0; n], g: vec![0; n], max_loop };
        t.resample(rng);
        t
    }

    fn resample<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let m = self.a.len() as u32;
        for x in 0..self.h.len() {
            self.h[x] = rng.gen_range(0..m);
            self.g[x] = rng.gen_range(0..m);
        }
    }

    /// One insertion attempt without rehashing: `Ok(steps)` on success, or
    /// the key left without a slot after `max_loop` rounds.
    pub fn try_insert(&mut self, mut x: u32) -> std::result::Result<usize, u32> {
        if self.a[self.h[x as usize] as usize] == x || self.b[self.g[x as usize] as usize] == x {
            return Ok(0);
        }
        let mut steps = 0;
        for _ in 0..self.max_loop {
            steps += 1;
            let slot = &mut self.a[self.h[x as usize] as usize];
            if *slot == EMPTY {
                *slot = x;
                return Ok(steps);
            }
            std::mem::swap(&mut x, slot);
            steps += 1;
            let slot = &mut self.b[self.g[x as usize] as usize];
            if *slot == EMPTY {
                *slot = x;
                return Ok(steps);
            }
            std::mem::swap(&mut x, slot);
        }
        Err(x)
    }

    fn cuckoo_graph(&self) -> Components {
        let m = self.a.len() as u32;
        let mut c = Components::new(2 * m as usize);
        for (&h, &g) in self.h.iter().zip(&self.g) {
            c.add_edge(h, m + g);
        }
        c
    }
}

/// Consecutive failed rebuilds before a trial gives up.
pub const REHASH_CAP: usize = 50;

struct CuckooTrial {
    rehashes: u64,
    max_steps: u64,
    excess: bool,
    largest: u32,
    capped: bool,
}

fn cuckoo_trial<R: Rng + ?Sized>(n: usize, max_loop: usize, rng: &mut R) -> CuckooTrial {
    let mut t = CuckooTable::new(n, 2 * n, max_loop, rng);
    let sizes = t.cuckoo_graph().sizes();
    let excess = sizes.iter().any(|&(v, e)| e > v);
    let largest = sizes.iter().map(|&(v, _)| v).max().unwrap_or(0);
    let mut out = CuckooTrial { rehashes: 0, max_steps: 0, excess, largest, capped: false };
    for x in 0..n as u32 {
        match t.try_insert(x) {
            Ok(steps) => out.max_steps = out.max_steps.max(steps as u64),
            Err(_) => {
                // Rehash: fresh hash values for every key, rebuilt from scratch.
                let mut failures = 0;
                loop {
                    out.rehashes += 1;
                    t.resample(rng);
                    t.a.fill(EMPTY);
                    t.b.fill(EMPTY);
                    let mut ok = true;
                    for y in 0..=x {
                        match t.try_insert(y) {
                            Ok(steps) => out.max_steps = out.max_steps.max(steps as u64),
                            Err(_) => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if ok {
                        break;
                    }
                    failures += 1;
                    if failures >= REHASH_CAP {
                        out.capped = true;
                        return out;
                    }
                }
            }
        }
    }
    out
}

/// Cuckoo hashing of `n` keys into two arrays of `2n` slots. The event is
/// "at least one rehash"; its `O(1/n)` bound has an unknown constant, so the
/// report fits it. Insertion step counts are checked against twice the
/// path-length threshold at savings `s`.
pub fn sim_cuckoo(
    n: usize,
    max_loop: usize,
    s: f64,
    k1: f64,
    k2: f64,
    trials: u64,
    rng: &RngSpec,
) -> Result<ExperimentReport> {
    if n < 2 || max_loop == 0 {
        return Err(Error::arg("n", format!("need n >= 2 and max_loop >= 1, got {n}, {max_loop}")));
    }
    let tails = cuckoo_tails(n as u64, s, k1, k2)?;
    let step_bound = 2.0 * tails.details["path_threshold"];
    let outcomes = run_trials(rng, trials, |r| cuckoo_trial(n, max_loop, r));
    let hits = outcomes.iter().filter(|o| o.rehashes > 0).count() as u64;
    let excess = outcomes.iter().filter(|o| o.excess).count() as f64 / trials as f64;
    let capped = outcomes.iter().filter(|o| o.capped).count();
    let max_steps = outcomes.iter().map(|o| o.max_steps).max().unwrap_or(0);
    let over = outcomes.iter().filter(|o| o.max_steps as f64 > step_bound).count();
    let rate = hits as f64 / trials as f64;
    let bound = TailBound::from_savings("cuckoo-rehash", (n as f64 / k2).log2())
        .param("n", n as f64)
        .param("k2", k2)
        .asymptotic(true);
    let mut report = ExperimentReport::new("cuckoo", trials, hits, bound, Some(rng.master_seed))
        .param("n", n as f64)
        .param("max_loop", max_loop as f64)
        .param("s", s)
        .param("k1", k1)
        .stat("rehash_rate", rate)
        .stat("fitted_k2", rate * n as f64)
        .stat("excess_rate", excess)
        .stat("fitted_excess_k", excess * n as f64)
        .stat("max_steps", max_steps as f64)
        .stat("step_bound", step_bound)
        .stat("step_bound_exceeded", over as f64)
        .stat("rehash_cap_hits", capped as f64)
        .stat("mean_largest_component", outcomes.iter().map(|o| o.largest as f64).sum::<f64>() / trials as f64);
    if capped > 0 {
        report = report.note(format!("{capped} trials hit the cap of {REHASH_CAP} consecutive rehashes"));
    }
    Ok(report)
}

/// 2-choice hashing of `n` keys into `⌈cn⌉` urns, ties going to `h(x)`.
/// The event is "largest component of the hash multigraph above the
/// component threshold".
pub fn sim_two_choice(
    n: usize,
    c: f64,
    s: f64,
    k: f64,
    d: f64,
    trials: u64,
    rng: &RngSpec,
) -> Result<ExperimentReport> {
    if n == 0 || c <= 0.0 {
        return Err(Error::arg("c", format!("need n >= 1 and c > 0, got n = {n}, c = {c}")));
    }
    let m = (c * n as f64).ceil() as usize;
    let outcomes = run_trials(rng, trials, |r| {
        let mut load = vec![0u32; m];
        let mut graph = Components::new(m);
        for _ in 0..n {
            let (h, g) = (r.gen_range(0..m as u32), r.gen_range(0..m as u32));
            let pick = if load[h as usize] <= load[g as usize] { h } else { g };
            load[pick as usize] += 1;
            graph.add_edge(h, g);
        }
        let sizes = graph.sizes();
        let largest = sizes.iter().map(|&(v, _)| v).max().unwrap_or(0);
        let excess = sizes.iter().any(|&(v, e)| e > v);
        (load.into_iter().max().unwrap_or(0) as u64, largest as u64, excess)
    });
    let loads = histogram(outcomes.iter().map(|o| o.0));
    let max_load = *loads.keys().last().unwrap_or(&0) as f64;
    let excess = outcomes.iter().filter(|o| o.2).count() as f64 / trials as f64;
    let largest = outcomes.iter().map(|o| o.1).max().unwrap_or(0) as f64;
    let (bound, loglog) = if c > 8.0 && n >= 4 {
        let b = two_choice_thresholds(n as u64, c, s, k, d)?;
        let ll = (n as f64).log2().log2().ceil();
        (b, ll)
    } else {
        let b = TailBound::from_savings("two-choice", 0.0).asymptotic(true);
        (b, (n.max(2) as f64).log2().log2().ceil().max(0.0))
    };
    let threshold = bound.details.get("component_threshold").copied().unwrap_or(f64::INFINITY);
    let hits = outcomes.iter().filter(|o| o.1 as f64 > threshold).count() as u64;
    Ok(ExperimentReport::new("two-choice", trials, hits, bound, Some(rng.master_seed))
        .param("n", n as f64)
        .param("c", c)
        .param("s", s)
        .param("k", k)
        .param("d", d)
        .stat("max_load", max_load)
        .stat("mean_max_load", outcomes.iter().map(|o| o.0 as f64).sum::<f64>() / trials as f64)
        .stat("ceil_loglog_n", loglog)
        .stat("fitted_d", max_load - loglog)
        .stat("largest_component", largest)
        .stat("excess_rate", excess)
        .histogram(loads))
}

/// Random bipartite graphs with `n` left and `n` right vertices, each left
/// vertex picking 3 right neighbours independently (repeats allowed). Every
/// left set of size `1..=min(kmax, ⌊αn⌋)` is checked for `|N(A)| ≥ 3|A|/2`.
pub fn sim_expander(
    n: usize,
    alpha: f64,
    kmax: usize,
    constant: f64,
    trials: u64,
    rng: &RngSpec,
) -> Result<ExperimentReport> {
    if n == 0 {
        return Err(Error::arg("n", "must be positive"));
    }
    let top = kmax.min((alpha * n as f64).floor() as usize).min(n);
    let outcomes = run_trials(rng, trials, |r| {
        let nbrs: Vec<[u32; 3]> = (0..n).map(|_| [0; 3].map(|_| r.gen_range(0..n as u32))).collect();
        let mut set = Vec::with_capacity(top);
        let mut violated = vec![false];
        violated.extend((1..=top).map(|k| subsets_violate(&nbrs, k, 0, &mut set)));
        violated
    });
    let mut per_k = vec![0u64; top + 1];
    let mut hits = 0;
    for v in &outcomes {
        hits += v.iter().any(|&b| b) as u64;
        for (k, &b) in v.iter().enumerate() {
            per_k[k] += b as u64;
        }
    }
    let mut savings_sum = 0.0;
    for k in 1..=top {
        savings_sum += expander_savings(n as u64, k as u64, constant)?.probability;
    }
    let bound = TailBound::from_savings("expander", -savings_sum.log2()).param("n", n as f64).asymptotic(true);
    let oracle = 1.0 - (1.0 - 1.0 / (n as f64 * n as f64)).powi(n as i32);
    let k1 = if top >= 1 { per_k[1] as f64 / trials as f64 } else { 0.0 };
    let sigma = (oracle * (1.0 - oracle) / trials as f64).sqrt();
    let mut report = ExperimentReport::new("expander", trials, hits, bound, Some(rng.master_seed))
        .param("n", n as f64)
        .param("alpha", alpha)
        .param("kmax", kmax as f64)
        .param("constant", constant)
        .stat("k1_rate", k1)
        .stat("k1_oracle", oracle)
        .stat("k1_sigma", sigma)
        .stat("k1_within_3sigma", ((k1 - oracle).abs() <= 3.0 * sigma) as u8 as f64);
    for (k, &count) in per_k.iter().enumerate().skip(1) {
        report = report.stat(&format!("k{k}_violations"), count as f64);
    }
    Ok(report)
}

/// Whether some `k`-subset of left vertices `≥ from`, extending `set`, has
/// fewer than `3k/2` distinct neighbours.
fn subsets_violate(nbrs: &[[u32; 3]], k: usize, from: usize, set: &mut Vec<usize>) -> bool {
    if set.len() == k {
        let mut seen: Vec<u32> = set.iter().flat_map(|&v| nbrs[v]).collect();
        seen.sort_unstable();
        seen.dedup();
        return 2 * seen.len() < 3 * k;
    }
    for v in from..nbrs.len() - (k - set.len() - 1) {
        set.push(v);
        let hit = subsets_violate(nbrs, k, v + 1, set);
        set.pop();
        if hit {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn linear_probing_table() {
        // Keys 0, 1, 2 all hash to slot 3 of 5; the run wraps around.
        let t = LinearProbingTable::build(5, vec![3, 3, 3]).unwrap();
        assert_eq!(t.slots, vec![2, EMPTY, EMPTY, 0, 1]);
        assert_eq!(t.block_size(0), 3);
        assert_eq!(t.search(2), Some(3));
        let one = LinearProbingTable::build(4, vec![2]).unwrap();
        assert_eq!(one.block_size(0), 1);
        assert!(LinearProbingTable::build(3, vec![0, 1, 2]).is_err());
    }

    #[test]
    fn single_key() {
        let spec = RngSpec::new(3);
        let r = sim_linear_probing(1, 4.0, 2.0, 50, &spec).unwrap();
        assert_eq!(r.histogram.keys().copied().collect::<Vec<_>>(), vec![1]);
        let r = sim_two_choice(1, 16.0, 1.0, 0.0, 3.0, 20, &spec).unwrap();
        assert_eq!(r.stats["max_load"], 1.0);
    }

    #[test]
    fn cuckoo_insert_follows_the_pseudocode() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut t = CuckooTable::new(3, 2, 10, &mut rng);
        t.h = vec![0, 0, 0];
        t.g = vec![0, 1, 1];
        assert_eq!(t.try_insert(0), Ok(1));
        // 1 evicts 0 from A[0]; 0 goes to B[0].
        assert_eq!(t.try_insert(1), Ok(2));
        assert_eq!((t.a[0], t.b[0]), (1, 0));
        assert_eq!(t.try_insert(1), Ok(0));
        // 2 evicts 1, 1 lands in B[1].
        assert_eq!(t.try_insert(2), Ok(2));
        assert_eq!((t.a[0], t.b[1]), (2, 1));
        let mut full = CuckooTable::new(3, 1, 4, &mut rng);
        full.h = vec![0; 3];
        full.g = vec![0; 3];
        assert_eq!(full.try_insert(0), Ok(1));
        assert_eq!(full.try_insert(1), Ok(2));
        assert!(full.try_insert(2).is_err());
    }

    #[test]
    fn cuckoo_small() {
        let r = sim_cuckoo(2, 10, 20.0, 4.0, 1.0, 200, &RngSpec::new(5)).unwrap();
        assert_eq!(r.stats["rehash_cap_hits"], 0.0);
        assert_eq!(r.stats["step_bound_exceeded"], 0.0);
    }

    #[test]
    fn expander_subsets() {
        let nbrs = [[0, 0, 0], [1, 2, 3]];
        let mut set = Vec::new();
        assert!(subsets_violate(&nbrs, 1, 0, &mut set));
        assert!(!subsets_violate(&nbrs[1..], 1, 0, &mut set));
        // {0, 1} has 4 neighbours, 4 ≥ 3.
        assert!(!subsets_violate(&nbrs, 2, 0, &mut set));
        let r = sim_expander(10, 0.0, 3, 0.0, 5, &RngSpec::new(1)).unwrap();
        assert_eq!(r.exceed_count, 0, "no subsets to check");
    }
}
