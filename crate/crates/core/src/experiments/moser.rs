use rand::Rng;

use super::{run_trials, ExperimentReport, RngSpec};
use crate::bounds::{moser_precondition, moser_tail};
use crate::error::{Error, Result};

/// Fix calls allowed before [`moser_solve`] gives up.
pub const MAX_FIX_CALLS: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Literal {
    pub var: u32,
    pub negated: bool,
}

impl Literal {
    pub fn holds(&self, assignment: &[bool]) -> bool {
        assignment[self.var as usize] != self.negated
    }
}

/// A k-CNF formula. `neighbours[i]` lists, in increasing order, every clause
/// sharing a variable with clause `i`, including `i` itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub k: usize,
    pub clauses: Vec<Vec<Literal>>,
    neighbours: Vec<Vec<u32>>,
    /// Most other clauses any one clause shares a variable with.
    pub intersection_degree: usize,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        let k = clauses.first().map_or(0, Vec::len);
        let mut by_var: Vec<Vec<u32>> = vec![Vec::new(); num_vars];
        for (i, c) in clauses.iter().enumerate() {
            if c.len() != k {
                return Err(Error::arg("clauses", format!("clause {i} has {} literals, expected {k}", c.len())));
            }
            let mut vars: Vec<u32> = c.iter().map(|l| l.var).collect();
            vars.sort_unstable();
            vars.dedup();
            if vars.len() != k {
                return Err(Error::arg("clauses", format!("clause {i} repeats a variable")));
            }
            for &v in &vars {
                let list =
                    by_var.get_mut(v as usize).ok_or_else(|| Error::range(v, format!("< {num_vars} variables")))?;
                list.push(i as u32);
            }
        }
        let neighbours: Vec<Vec<u32>> = clauses
            .iter()
            .map(|c| {
                let mut ns: Vec<u32> = c.iter().flat_map(|l| by_var[l.var as usize].iter().copied()).collect();
                ns.sort_unstable();
                ns.dedup();
                ns
            })
            .collect();
        let intersection_degree = neighbours.iter().map(|ns| ns.len() - 1).max().unwrap_or(0);
        Ok(CnfFormula { num_vars, k, clauses, neighbours, intersection_degree })
    }

    pub fn satisfied(&self, clause: usize, assignment: &[bool]) -> bool {
        self.clauses[clause].iter().any(|l| l.holds(assignment))
    }

    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        (0..self.clauses.len()).all(|i| self.satisfied(i, assignment))
    }

    pub fn neighbours(&self, clause: usize) -> &[u32] {
        &self.neighbours[clause]
    }
}

/// `m` clauses of width `k` on sliding windows of variables.
///
/// Clause `i` covers variables `[i·d, i·d + k)` with stride
/// `d = ⌈k/(⌊r/2⌋ + 1)⌉`, so it overlaps at most `⌊r/2⌋` clauses on each
/// side. Signs are uniform.
pub fn gen_bounded_overlap_cnf<R: Rng + ?Sized>(k: usize, m: usize, r: usize, rng: &mut R) -> Result<CnfFormula> {
    if k < 4 {
        return Err(Error::range(k, ">= 4"));
    }
    if m == 0 {
        return Err(Error::arg("m", "must be positive"));
    }
    moser_precondition(k as u32, r as u64)?;
    let stride = k.div_ceil(r / 2 + 1);
    let num_vars = (m - 1)
        .checked_mul(stride)
        .and_then(|x| x.checked_add(k))
        .filter(|&v| v <= u32::MAX as usize)
        .ok_or_else(|| Error::Infeasible(format!("k = {k}, m = {m}, r = {r} needs more than 2^32 variables")))?;
    let clauses = (0..m)
        .map(|i| (0..k).map(|j| Literal { var: (i * stride + j) as u32, negated: rng.gen() }).collect())
        .collect();
    let phi = CnfFormula::new(num_vars, clauses)?;
    debug_assert!(phi.intersection_degree <= r);
    Ok(phi)
}

/// What one run of the solver did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoserRun {
    pub assignment: Vec<bool>,
    pub fix_calls: u64,
    /// Top-level calls made by Solve.
    pub roots: u64,
    /// Deepest nesting of Fix, with top-level calls at depth 1.
    pub max_depth: u64,
}

/// Solve: start from a uniform assignment; while some clause is false, Fix
/// the lowest-indexed one. Fix(C): resample C's variables, then while some
/// clause sharing a variable with C (C included) is false, Fix the
/// lowest-indexed one. Recursion runs on an explicit stack.
pub fn moser_solve<R: Rng + ?Sized>(phi: &CnfFormula, rng: &mut R) -> Result<MoserRun> {
    let mut a: Vec<bool> = (0..phi.num_vars).map(|_| rng.gen()).collect();
    let mut run = MoserRun { assignment: Vec::new(), fix_calls: 0, roots: 0, max_depth: 0 };
    let mut stack: Vec<usize> = Vec::new();
    let mut resample = |c: usize, a: &mut Vec<bool>, run: &mut MoserRun| -> Result<()> {
        run.fix_calls += 1;
        if run.fix_calls > MAX_FIX_CALLS {
            return Err(Error::IterationCap {
                cap: MAX_FIX_CALLS,
                context: format!("Fix on a formula with {} clauses", phi.clauses.len()),
            });
        }
        for l in &phi.clauses[c] {
            a[l.var as usize] = rng.gen();
        }
        Ok(())
    };
    let mut next_root = 0;
    // Fix never leaves a clause false that was true before it started, so
    // clauses below the last root need no rescan.
    while let Some(root) = (next_root..phi.clauses.len()).find(|&i| !phi.satisfied(i, &a)) {
        next_root = root;
        run.roots += 1;
        resample(root, &mut a, &mut run)?;
        stack.push(root);
        while let Some(&c) = stack.last() {
            run.max_depth = run.max_depth.max(stack.len() as u64);
            match phi.neighbours(c).iter().map(|&d| d as usize).find(|&d| !phi.satisfied(d, &a)) {
                Some(d) => {
                    resample(d, &mut a, &mut run)?;
                    stack.push(d);
                }
                None => {
                    stack.pop();
                }
            }
        }
    }
    run.assignment = a;
    Ok(run)
}

/// Fresh bounded-overlap formulas solved once each. The event is at least
/// `⌈s + m log m⌉` Fix calls; every returned assignment is re-checked.
pub fn sim_moser(k: usize, m: usize, r: usize, s: f64, trials: u64, rng: &RngSpec) -> Result<ExperimentReport> {
    let bound = moser_tail(m as u64, s)?;
    let limit = bound.threshold.unwrap();
    let runs = run_trials(rng, trials, |g| -> Result<(u64, u64, bool, usize)> {
        let phi = gen_bounded_overlap_cnf(k, m, r, g)?;
        let run = moser_solve(&phi, g)?;
        Ok((run.fix_calls, run.max_depth, phi.evaluate(&run.assignment), phi.intersection_degree))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let hits = runs.iter().filter(|r| r.0 as f64 >= limit).count() as u64;
    let unsat = runs.iter().filter(|r| !r.2).count();
    Ok(ExperimentReport::new("moser", trials, hits, bound, Some(rng.master_seed))
        .param("k", k as f64)
        .param("m", m as f64)
        .param("r", r as f64)
        .param("s", s)
        .stat("max_fix_calls", runs.iter().map(|r| r.0).max().unwrap_or(0) as f64)
        .stat("mean_fix_calls", runs.iter().map(|r| r.0 as f64).sum::<f64>() / trials.max(1) as f64)
        .stat("max_depth", runs.iter().map(|r| r.1).max().unwrap_or(0) as f64)
        .stat("max_intersection_degree", runs.iter().map(|r| r.3).max().unwrap_or(0) as f64)
        .stat("unsatisfied_results", unsat as f64)
        .fail_if(unsat > 0, "an assignment returned by the solver does not satisfy its formula"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lit(var: u32, negated: bool) -> Literal {
        Literal { var, negated }
    }

    #[test]
    fn windows() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let phi = gen_bounded_overlap_cnf(4, 5, 0, &mut rng).unwrap();
        assert_eq!((phi.num_vars, phi.intersection_degree), (20, 0));
        let phi = gen_bounded_overlap_cnf(8, 32, 7, &mut rng).unwrap();
        assert!(phi.intersection_degree <= 7);
        assert_eq!(phi.intersection_degree, 6);
        assert!(gen_bounded_overlap_cnf(8, 32, 32, &mut rng).is_err());
        assert!(gen_bounded_overlap_cnf(3, 4, 0, &mut rng).is_err());
        for r in 0..16 {
            let phi = gen_bounded_overlap_cnf(7, 40, r, &mut rng).unwrap();
            assert!(phi.intersection_degree <= r, "r = {r}");
        }
    }

    #[test]
    fn already_satisfied() {
        let phi = CnfFormula::new(3, Vec::new()).unwrap();
        let run = moser_solve(&phi, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(run.fix_calls, 0);
        // Fix is called exactly when the initial assignment fails the clause.
        let phi = CnfFormula::new(2, vec![vec![lit(0, false), lit(1, false)]]).unwrap();
        for seed in 0..20 {
            let mut probe = ChaCha8Rng::seed_from_u64(seed);
            let a: Vec<bool> = (0..2).map(|_| probe.gen()).collect();
            let run = moser_solve(&phi, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert_eq!(run.fix_calls == 0, phi.evaluate(&a));
            assert!(phi.evaluate(&run.assignment));
        }
    }

    #[test]
    fn rejects_bad_clauses() {
        assert!(CnfFormula::new(2, vec![vec![lit(0, false), lit(0, true)]]).is_err());
        assert!(CnfFormula::new(2, vec![vec![lit(0, false), lit(2, true)]]).is_err());
        assert!(CnfFormula::new(3, vec![vec![lit(0, false)], vec![lit(1, false), lit(2, false)]]).is_err());
    }

    #[test]
    fn solves_overlapping_formulas() {
        let r = sim_moser(8, 32, 7, 30.0, 30, &RngSpec::new(7)).unwrap();
        assert_eq!(r.stats["unsatisfied_results"], 0.0);
        assert!(r.passed());
    }
}
