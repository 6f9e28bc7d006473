use rand::Rng;

use super::{histogram, run_trials, Components, ExperimentReport, RngSpec};
use crate::bitcodes::BitString;
use crate::bounds::{
    percolation_cycle_tail, percolation_length_tail, ramsey_code_savings, ramsey_threshold, triangles_down,
};
use crate::error::{Error, Result};
use crate::ledger::TailBound;
use crate::witnesses::{find_clique_or_independent_set, Graph, MAX_FINDER_VERTICES};

/// Largest `n` for which every graph on `n` vertices is enumerated.
pub const MAX_EXHAUSTIVE_RAMSEY: usize = 7;

/// `G(n, 1/2)` containing a clique or independent set of size `t`.
///
/// `t = 0` takes `t` from the threshold for savings `s`, whose bound is
/// `2^(−s)`; an explicit `t` is priced by the code's own savings. With
/// `trials = None` all `2^C(n,2)` graphs are enumerated.
pub fn sim_ramsey(n: usize, t: usize, s: f64, trials: Option<u64>, rng: &RngSpec) -> Result<ExperimentReport> {
    if n > MAX_FINDER_VERTICES {
        return Err(Error::range(n, format!("<= {MAX_FINDER_VERTICES} vertices for exhaustive clique search")));
    }
    let (t, bound) = if t == 0 {
        let b = ramsey_threshold(n as u64, s)?;
        (b.threshold.unwrap() as usize, b)
    } else {
        let b = TailBound::from_savings("ramsey", ramsey_code_savings(n as u64, t as f64))
            .param("n", n as f64)
            .threshold(t as f64);
        (t, b)
    };
    let pairs = n * n.saturating_sub(1) / 2;
    let found = |bits: &BitString| -> bool {
        t <= n && find_clique_or_independent_set(&Graph::from_upper_bits(n, bits).unwrap(), t).unwrap().is_some()
    };
    let report = match trials {
        None => {
            if n > MAX_EXHAUSTIVE_RAMSEY {
                return Err(Error::range(n, format!("<= {MAX_EXHAUSTIVE_RAMSEY} for exhaustive mode")));
            }
            let hits = (0u64..1 << pairs)
                .filter(|&code| found(&(0..pairs).map(|i| code >> i & 1 == 1).collect()))
                .count() as u64;
            ExperimentReport::new("ramsey", 1 << pairs, hits, bound, None)
        }
        Some(trials) => {
            let hits = run_trials(rng, trials, |r| found(&(0..pairs).map(|_| r.gen::<bool>()).collect()));
            let hits = hits.into_iter().filter(|&h| h).count() as u64;
            ExperimentReport::new("ramsey", trials, hits, bound, Some(rng.master_seed))
        }
    };
    Ok(report.param("n", n as f64).param("t", t as f64).param("s", s))
}

fn sample_gnp<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                g.set_edge(u, v, true);
            }
        }
    }
    g
}

/// `G(n, c/n)` containing a triangle, against `Pr ≤ c³`. The triangle-free
/// frequency is also reported with the fitted `K` of `2^(−K c³)`.
pub fn sim_triangles(n: usize, c: f64, trials: u64, rng: &RngSpec) -> Result<ExperimentReport> {
    if n < 3 || c <= 0.0 || c > n as f64 {
        return Err(Error::arg("c", format!("need n >= 3 and 0 < c <= n, got n = {n}, c = {c}")));
    }
    let p = c / n as f64;
    let bound = triangles_down(n as u64, c)?;
    let lower = bound.details["lower_no_triangle"];
    let hits = run_trials(rng, trials, |r| sample_gnp(n, p, r).has_triangle());
    let hits = hits.into_iter().filter(|&h| h).count() as u64;
    let free = 1.0 - hits as f64 / trials as f64;
    let fitted = if free > 0.0 { -free.log2() / c.powi(3) } else { f64::INFINITY };
    Ok(ExperimentReport::new("triangles", trials, hits, bound, Some(rng.master_seed))
        .param("n", n as f64)
        .param("c", c)
        .stat("triangle_free_rate", free)
        .stat("lower_no_triangle", lower)
        .stat("fitted_k", fitted))
}

/// The `r × r` torus grid graph; edge `2v` goes right from `v`, `2v + 1` down.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Torus {
    pub side: usize,
}

impl Torus {
    pub fn new(side: usize) -> Result<Self> {
        if side < 3 {
            return Err(Error::range(side, ">= 3, so the torus has no parallel edges"));
        }
        Ok(Torus { side })
    }

    pub fn vertices(&self) -> usize {
        self.side * self.side
    }

    /// Endpoints of edge `e`.
    pub fn edge(&self, e: usize) -> (usize, usize) {
        let v = e / 2;
        let (i, j) = (v / self.side, v % self.side);
        let w = if e.is_multiple_of(2) {
            i * self.side + (j + 1) % self.side
        } else {
            ((i + 1) % self.side) * self.side + j
        };
        (v, w)
    }

    pub fn sample<R: Rng + ?Sized>(&self, p: f64, rng: &mut R) -> Vec<bool> {
        (0..2 * self.vertices()).map(|_| rng.gen::<f64>() < p).collect()
    }

    fn adjacency(&self, open: &[bool]) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices()];
        for (e, _) in open.iter().enumerate().filter(|(_, &o)| o) {
            let (u, v) = self.edge(e);
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    /// Component sizes, largest first.
    pub fn component_sizes(&self, open: &[bool]) -> Vec<u32> {
        let mut c = Components::new(self.vertices());
        for (e, _) in open.iter().enumerate().filter(|(_, &o)| o) {
            let (u, v) = self.edge(e);
            c.add_edge(u as u32, v as u32);
        }
        let mut sizes: Vec<u32> = c.sizes().into_iter().map(|(v, _)| v).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleSearch {
    Found,
    Absent,
    /// The node budget ran out first; says nothing about absence.
    Inconclusive,
}

/// Looks for a simple cycle with at least `min_len` edges.
///
/// Only the 2-core can hold cycles, so degree-1 vertices are peeled first.
/// Each cycle is then searched from its smallest vertex `u`, extending simple
/// paths through vertices above `u`, until `budget` path extensions are used.
pub fn search_long_cycle(adj: &[Vec<usize>], min_len: usize, budget: u64) -> CycleSearch {
    let n = adj.len();
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut alive = vec![true; n];
    let mut stack: Vec<usize> = (0..n).filter(|&v| degree[v] < 2).collect();
    while let Some(v) = stack.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &w in &adj[v] {
            if alive[w] {
                degree[w] -= 1;
                if degree[w] < 2 {
                    stack.push(w);
                }
            }
        }
    }
    if alive.iter().filter(|&&a| a).count() < min_len.max(3) {
        return CycleSearch::Absent;
    }
    let mut used = 0u64;
    let mut on_path = vec![false; n];
    for u in (0..n).filter(|&u| alive[u]) {
        on_path[u] = true;
        let r = extend(adj, &alive, u, u, 0, min_len.max(3), &mut on_path, &mut used, budget);
        on_path[u] = false;
        if r != CycleSearch::Absent {
            return r;
        }
    }
    CycleSearch::Absent
}

#[allow(clippy::too_many_arguments)]
fn extend(
    adj: &[Vec<usize>],
    alive: &[bool],
    start: usize,
    at: usize,
    len: usize,
    min_len: usize,
    on_path: &mut [bool],
    used: &mut u64,
    budget: u64,
) -> CycleSearch {
    for &w in &adj[at] {
        if w == start && len + 1 >= min_len && len >= 2 {
            return CycleSearch::Found;
        }
        if w <= start || !alive[w] || on_path[w] {
            continue;
        }
        *used += 1;
        if *used > budget {
            return CycleSearch::Inconclusive;
        }
        on_path[w] = true;
        let r = extend(adj, alive, start, w, len + 1, min_len, on_path, used, budget);
        on_path[w] = false;
        if r != CycleSearch::Absent {
            return r;
        }
    }
    CycleSearch::Absent
}

/// Largest torus side the cycle search accepts.
pub const MAX_CYCLE_SIDE: usize = 12;

/// Percolated `side × side` torus with a cycle of at least the threshold
/// length for savings `s` (or `max_len` if nonzero). Inconclusive searches
/// count as exceedances.
pub fn sim_percolation(
    side: usize,
    p: f64,
    s: f64,
    max_len: usize,
    budget: u64,
    trials: u64,
    rng: &RngSpec,
) -> Result<ExperimentReport> {
    let torus = Torus::new(side)?;
    if side > MAX_CYCLE_SIDE {
        return Err(Error::range(side, format!("<= {MAX_CYCLE_SIDE} for cycle search")));
    }
    let n = torus.vertices() as u64;
    let bound =
        if max_len > 0 { percolation_length_tail(n, p, max_len as u64)? } else { percolation_cycle_tail(n, p, s)? };
    let min_len = bound.threshold.unwrap().ceil() as usize;
    let outcomes = run_trials(rng, trials, |r| {
        let open = torus.sample(p, r);
        search_long_cycle(&torus.adjacency(&open), min_len, budget)
    });
    let found = outcomes.iter().filter(|&&o| o == CycleSearch::Found).count() as u64;
    let unsure = outcomes.iter().filter(|&&o| o == CycleSearch::Inconclusive).count() as u64;
    let mut report = ExperimentReport::new("percolation", trials, found + unsure, bound, Some(rng.master_seed))
        .param("side", side as f64)
        .param("p", p)
        .param("s", s)
        .param("max_len", max_len as f64)
        .param("budget", budget as f64)
        .stat("min_cycle_length", min_len as f64)
        .stat("found", found as f64)
        .stat("inconclusive", unsure as f64);
    if unsure > 0 {
        report = report.note(format!("{unsure} searches ran out of budget and were counted as cycles"));
    }
    Ok(report)
}

/// Sizes of the two largest components of the percolated torus. The event
/// is a second component larger than `log² n`.
pub fn sim_percolation_components(side: usize, p: f64, trials: u64, rng: &RngSpec) -> Result<ExperimentReport> {
    let torus = Torus::new(side)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::arg("p", format!("{p} is not a probability")));
    }
    let n = torus.vertices() as f64;
    let limit = n.log2().powi(2);
    let pairs = run_trials(rng, trials, |r| {
        let sizes = torus.component_sizes(&torus.sample(p, r));
        (sizes[0] as u64, sizes.get(1).copied().unwrap_or(0) as u64)
    });
    let hits = pairs.iter().filter(|&&(_, b)| b as f64 > limit).count() as u64;
    let bound = TailBound::from_savings("percolation-components", 0.0).threshold(limit).asymptotic(true);
    let mean = |f: fn(&(u64, u64)) -> u64| pairs.iter().map(|x| f(x) as f64).sum::<f64>() / trials as f64;
    Ok(ExperimentReport::new("percolation-components", trials, hits, bound, Some(rng.master_seed))
        .param("side", side as f64)
        .param("p", p)
        .stat("mean_largest", mean(|x| x.0))
        .stat("mean_second", mean(|x| x.1))
        .stat("max_second", pairs.iter().map(|x| x.1).max().unwrap_or(0) as f64)
        .stat("log2_n_squared", limit)
        .histogram(histogram(pairs.iter().map(|x| x.1))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Vec<Vec<usize>> {
        (0..n).map(|v| vec![(v + n - 1) % n, (v + 1) % n]).collect()
    }

    #[test]
    fn cycle_search() {
        let c8 = cycle(8);
        assert_eq!(search_long_cycle(&c8, 8, 1000), CycleSearch::Found);
        assert_eq!(search_long_cycle(&c8, 9, 1000), CycleSearch::Absent);
        assert_eq!(search_long_cycle(&c8, 3, 1), CycleSearch::Inconclusive);
        let path: Vec<Vec<usize>> = vec![vec![1], vec![0, 2], vec![1]];
        assert_eq!(search_long_cycle(&path, 2, 10), CycleSearch::Absent);
        // Two triangles sharing vertex 0: no cycle of length 4 or more.
        let bowtie = vec![vec![1, 2, 3, 4], vec![0, 2], vec![0, 1], vec![0, 4], vec![0, 3]];
        assert_eq!(search_long_cycle(&bowtie, 3, 100), CycleSearch::Found);
        assert_eq!(search_long_cycle(&bowtie, 4, 100), CycleSearch::Absent);
    }

    #[test]
    fn torus() {
        let t = Torus::new(3).unwrap();
        assert_eq!(t.edge(0), (0, 1));
        assert_eq!(t.edge(5), (2, 5));
        assert_eq!(t.edge(4), (2, 0));
        assert_eq!(t.edge(17), (8, 2));
        let all = vec![true; 18];
        assert_eq!(t.component_sizes(&all), vec![9]);
        // The full 4×4 torus has a Hamiltonian cycle.
        let t4 = Torus::new(4).unwrap();
        assert_eq!(search_long_cycle(&t4.adjacency(&[true; 32]), 16, 1_000_000), CycleSearch::Found);
        assert_eq!(search_long_cycle(&t4.adjacency(&[true; 32]), 17, 10_000_000), CycleSearch::Absent);
        assert!(Torus::new(2).is_err());
    }

    #[test]
    fn no_edges() {
        let r = sim_percolation(8, 1e-9, 4.0, 0, 1000, 20, &RngSpec::new(0)).unwrap();
        assert_eq!(r.exceed_count, 0);
        let r = sim_percolation_components(5, 0.0, 5, &RngSpec::new(0)).unwrap();
        assert_eq!(r.stats["mean_largest"], 1.0);
    }

    #[test]
    fn ramsey_small() {
        // Every graph on 6 vertices has a triangle or an independent 3-set.
        let r = sim_ramsey(6, 3, 0.0, None, &RngSpec::new(0)).unwrap();
        assert_eq!((r.exceed_count, r.trials), (1 << 15, 1 << 15));
        // On 5 vertices, exactly the 12 labelled 5-cycles avoid both.
        let r = sim_ramsey(5, 3, 0.0, None, &RngSpec::new(0)).unwrap();
        assert_eq!(r.exceed_count, 1024 - 12);
        assert!(sim_ramsey(25, 3, 0.0, Some(1), &RngSpec::new(0)).is_err());
    }

    #[test]
    fn triangles_on_k3() {
        let mut g = Graph::empty(3);
        for (u, v) in [(0, 1), (1, 2), (0, 2)] {
            g.set_edge(u, v, true);
        }
        assert!(g.has_triangle());
        let r = sim_triangles(3, 3.0, 10, &RngSpec::new(0)).unwrap();
        assert_eq!(r.exceed_count, 10);
    }
}
