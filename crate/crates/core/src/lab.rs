//! Monte Carlo checks of the anti-concentration lemma, the smoothed-runtime
//! experiment harness, and the ε-improving window census.
//!
//! Seeding is counter based: trial `j` of cell `i` uses
//! `derive_seed(base, &[i, j])`, and Monte Carlo chunk `c` uses
//! `derive_seed(seed, &[c])`, so results do not depend on thread count or
//! scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arcs::{find_arcs, MoveSequence};
use crate::csp::{reduce_max2sat, Assignment, Bfop, Clause, Literal};
use crate::error::{Error, Result};
use crate::flip::{default_step_cap, run_dynamics, verify_trace, FlipTrace, MaxCut, PivotRule};
use crate::generate::{bounded_degree, erdos_renyi};
use crate::instance::{Configuration, DistributionSpec, Graph, WeightedInstance};
use crate::rank::{find_dependency, rank_dense};
use crate::rng::{derive_seed, rng_from_seed};

/// z-score of a two-sided 99% normal interval.
pub const Z99: f64 = 2.576;

const MC_CHUNK: usize = 1 << 16;

#[derive(Clone, Debug, Serialize)]
pub struct McReport {
    pub k: usize,
    pub samples: usize,
    pub hits: usize,
    pub probability: f64,
    /// Largest density among the coordinate distributions.
    pub phi: f64,
    pub eps: f64,
    /// `(φ ε)^k`.
    pub bound: f64,
    /// Binomial 99% half-width `Z99 * sqrt(p (1 - p) / N)`.
    pub ci_half_width: f64,
}

/// Empirical `Pr[⟨r_i, X⟩ ∈ [0, ε] for all i]` with `X_j ~ dists[j]` independent.
///
/// Refuses linearly dependent vectors, reporting an integer dependency.
pub fn mc_lemma_probability(
    vectors: &[Vec<i64>],
    dists: &[DistributionSpec],
    eps: f64,
    samples: usize,
    seed: u64,
) -> Result<McReport> {
    if vectors.is_empty() || samples == 0 {
        return Err(Error::validation("need at least one vector and one sample"));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::validation(format!("eps must be positive, got {eps}")));
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != dists.len()) {
        return Err(Error::validation(format!("vector of length {} for {} coordinates", v.len(), dists.len())));
    }
    if rank_dense(vectors) < vectors.len() {
        let dep = find_dependency(vectors).expect("rank deficient set has a dependency");
        let coeffs: Vec<String> = dep.iter().map(|c| c.to_string()).collect();
        return Err(Error::Refused(format!("vectors are linearly dependent: coefficients [{}]", coeffs.join(", "))));
    }
    let chunks = samples.div_ceil(MC_CHUNK);
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng_from_seed(derive_seed(seed, &[c as u64]));
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut x = vec![0.0; dists.len()];
            let mut hits = 0;
            for _ in 0..count {
                for (xj, d) in x.iter_mut().zip(dists) {
                    *xj = d.sample(&mut rng);
                }
                let inside = vectors.iter().all(|r| {
                    let s: f64 = r.iter().zip(&x).map(|(&a, &b)| a as f64 * b).sum();
                    (0.0..=eps).contains(&s)
                });
                hits += usize::from(inside);
            }
            hits
        })
        .sum();
    let p = hits as f64 / samples as f64;
    let phi = dists.iter().map(DistributionSpec::density).fold(0.0, f64::max);
    Ok(McReport {
        k: vectors.len(),
        samples,
        hits,
        probability: p,
        phi,
        eps,
        bound: (phi * eps).powi(vectors.len() as i32),
        ci_half_width: Z99 * (p * (1.0 - p) / samples as f64).sqrt(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum Family {
    Complete,
    ErdosRenyi {
        p: f64,
    },
    BoundedDegree {
        degree: usize,
    },
    /// Random Max-2SAT with `clauses_per_var * n` two-literal clauses.
    Max2Sat {
        clauses_per_var: usize,
    },
}

impl Family {
    pub fn label(&self) -> String {
        match self {
            Family::Complete => "complete".into(),
            Family::ErdosRenyi { p } => format!("er({p})"),
            Family::BoundedDegree { degree } => format!("deg({degree})"),
            Family::Max2Sat { clauses_per_var } => format!("max2sat({clauses_per_var})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub family: Family,
    pub sizes: Vec<usize>,
    /// Density bounds; weights are uniform on an interval of length `1/φ` centred at 0.
    pub phis: Vec<f64>,
    pub rule: PivotRule,
    pub trials: usize,
    pub base_seed: u64,
    /// Defaults to `10 n^3`.
    #[serde(default)]
    pub step_cap: Option<usize>,
    /// Explicit `(n, φ)` cells; replaces the `sizes × phis` grid when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<(usize, f64)>>,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        let cells = self.cells();
        if self.trials == 0 || cells.is_empty() {
            return Err(Error::validation("plan needs trials >= 1 and at least one (n, phi) cell"));
        }
        for &(n, phi) in &cells {
            DistributionSpec::with_density(0.0, phi)?;
            if n < 2 {
                return Err(Error::validation(format!("size {n} below 2")));
            }
        }
        Ok(())
    }

    pub fn cells(&self) -> Vec<(usize, f64)> {
        match &self.cells {
            Some(c) => c.clone(),
            None => self.sizes.iter().flat_map(|&n| self.phis.iter().map(move |&phi| (n, phi))).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrialResult {
    pub steps: usize,
    pub terminated: bool,
}

/// One CSV row per cell, fixed column order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellRow {
    pub family: String,
    pub n: usize,
    pub phi: f64,
    pub rule: String,
    pub trials: usize,
    pub max_steps: usize,
    pub mean_steps: f64,
    pub p50: usize,
    pub p90: usize,
    pub p99: usize,
    pub timeouts: usize,
}

/// Run one trial: sample an instance and a start, run FLIP, re-verify the trace.
pub fn run_trial(plan: &ExperimentPlan, n: usize, phi: f64, seed: u64) -> Result<TrialResult> {
    let mut rng = rng_from_seed(seed);
    let dist = DistributionSpec::with_density(0.0, phi)?;
    let cap = plan.step_cap.unwrap_or_else(|| default_step_cap(n));
    let run_seed = derive_seed(seed, &[1]);
    match &plan.family {
        Family::Max2Sat { clauses_per_var } => {
            use rand::Rng as _;
            let clauses: Vec<Clause<f64>> = (0..clauses_per_var * n)
                .map(|_| {
                    let x = rng.gen_range(1..=n);
                    let mut y = rng.gen_range(1..=n);
                    while y == x {
                        y = rng.gen_range(1..=n);
                    }
                    Clause {
                        lits: vec![Literal { var: x, negated: rng.gen() }, Literal { var: y, negated: rng.gen() }],
                        weight: dist.sample(&mut rng),
                    }
                })
                .collect();
            let inst = reduce_max2sat(n, &clauses)?;
            let sys = Bfop::new(&inst);
            let init = Assignment::random(n, &mut rng);
            let trace = run_dynamics(&sys, init, plan.rule, cap, run_seed);
            verify_trace(&sys, &trace)?;
            Ok(TrialResult { steps: trace.steps(), terminated: trace.terminated })
        }
        fam => {
            let graph = match fam {
                Family::Complete => Graph::complete(n),
                Family::ErdosRenyi { p } => erdos_renyi(n, *p, &mut rng)?,
                Family::BoundedDegree { degree } => bounded_degree(n, *degree, &mut rng)?,
                Family::Max2Sat { .. } => unreachable!(),
            };
            let weights = (0..graph.num_edges()).map(|_| dist.sample(&mut rng)).collect();
            let inst = WeightedInstance::new(graph, weights)?;
            let init = Configuration::random(n, &mut rng);
            let sys = MaxCut::new(&inst);
            let trace = run_dynamics(&sys, init, plan.rule, cap, run_seed);
            verify_trace(&sys, &trace)?;
            Ok(TrialResult { steps: trace.steps(), terminated: trace.terminated })
        }
    }
}

fn quantile(sorted: &[usize], q: f64) -> usize {
    let i = ((sorted.len() as f64 * q).ceil() as usize).clamp(1, sorted.len());
    sorted[i - 1]
}

/// Run every cell of the plan on `threads` workers (0 = rayon default).
pub fn run_experiment(plan: &ExperimentPlan, threads: usize) -> Result<Vec<CellRow>> {
    plan.validate()?;
    let cells = plan.cells();
    let jobs: Vec<(usize, usize)> = (0..cells.len()).flat_map(|c| (0..plan.trials).map(move |t| (c, t))).collect();
    let work = || -> Vec<Result<TrialResult>> {
        jobs.par_iter()
            .map(|&(c, t)| {
                let (n, phi) = cells[c];
                run_trial(plan, n, phi, derive_seed(plan.base_seed, &[c as u64, t as u64]))
            })
            .collect()
    };
    let results = if threads == 0 {
        work()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::validation(format!("thread pool: {e}")))?
            .install(work)
    };
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(cells.len());
    for (c, chunk) in results.chunks(plan.trials).enumerate() {
        let (n, phi) = cells[c];
        let mut steps: Vec<usize> = chunk.iter().map(|r| r.steps).collect();
        steps.sort_unstable();
        rows.push(CellRow {
            family: plan.family.label(),
            n,
            phi,
            rule: plan.rule.to_string(),
            trials: plan.trials,
            max_steps: *steps.last().unwrap(),
            mean_steps: steps.iter().sum::<usize>() as f64 / steps.len() as f64,
            p50: quantile(&steps, 0.5),
            p90: quantile(&steps, 0.9),
            p99: quantile(&steps, 0.99),
            timeouts: chunk.iter().filter(|r| !r.terminated).count(),
        });
    }
    Ok(rows)
}

pub fn rows_to_csv(rows: &[CellRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Number of length-`window` substrings of the trace that contain at least one
/// arc and whose every arc has summed endpoint gain in `(0, ε]`.
pub fn eps_improving_census(trace: &FlipTrace<f64>, eps: f64, window: usize) -> Result<usize> {
    if window == 0 {
        return Err(Error::validation("window must be at least 1"));
    }
    let m = trace.moves.len();
    if window > m {
        return Ok(0);
    }
    let seq = MoveSequence::new(trace.initial.n(), trace.moves.clone())?;
    let arcs = find_arcs(&seq);
    // per right endpoint: (left, in-range flag)
    let mut ending = vec![None; m + 1];
    for a in &arcs {
        let g = trace.gains[a.left - 1] + trace.gains[a.right - 1];
        ending[a.right] = Some((a.left, g > 0.0 && g <= eps));
    }
    let mut count = 0;
    for start in 1..=m + 1 - window {
        let end = start + window - 1;
        let mut any = false;
        let mut all = true;
        for (left, ok) in ending[start..=end].iter().flatten() {
            if *left >= start {
                any = true;
                all &= *ok;
            }
        }
        count += usize::from(any && all);
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arcs::improvement_vector;
    use crate::flip::run_flip;

    #[test]
    fn mc_single_uniform() {
        let d = DistributionSpec::uniform(-1.0, 1.0).unwrap();
        let r = mc_lemma_probability(&[vec![1]], &[d], 0.2, 200_000, 1).unwrap();
        assert!((r.probability - 0.1).abs() < 4.0 * r.ci_half_width);
        assert!((r.bound - 0.1).abs() < 1e-12);
    }

    #[test]
    fn mc_refuses_dependent() {
        let d = DistributionSpec::uniform(-1.0, 1.0).unwrap();
        let e = mc_lemma_probability(&[vec![1, 1], vec![2, 2]], &[d, d], 0.2, 10, 1).unwrap_err();
        assert!(matches!(e, Error::Refused(_)));
    }

    #[test]
    fn mc_is_thread_independent() {
        let d = DistributionSpec::uniform(-1.0, 1.0).unwrap();
        let v = vec![vec![1, 0], vec![1, 1]];
        let a = mc_lemma_probability(&v, &[d, d], 0.3, 150_000, 9).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| mc_lemma_probability(&v, &[d, d], 0.3, 150_000, 9).unwrap());
        assert_eq!(a.hits, b.hits);
    }

    #[test]
    fn plan_rejects_degenerate_density() {
        let plan = ExperimentPlan {
            family: Family::Complete,
            sizes: vec![8],
            phis: vec![f64::INFINITY],
            rule: PivotRule::First,
            trials: 1,
            base_seed: 0,
            step_cap: None,
            cells: None,
        };
        assert!(run_experiment(&plan, 1).is_err());
    }

    #[test]
    fn experiment_all_families() {
        for family in [
            Family::Complete,
            Family::ErdosRenyi { p: 0.5 },
            Family::BoundedDegree { degree: 3 },
            Family::Max2Sat { clauses_per_var: 2 },
        ] {
            let plan = ExperimentPlan {
                family,
                sizes: vec![6, 10],
                phis: vec![0.5, 2.0],
                rule: PivotRule::Random,
                trials: 5,
                base_seed: 11,
                step_cap: None,
                cells: None,
            };
            let rows = run_experiment(&plan, 2).unwrap();
            assert_eq!(rows.len(), 4);
            assert!(rows.iter().all(|r| r.timeouts == 0 && r.p50 <= r.p90 && r.p90 <= r.max_steps));
        }
    }

    fn census_oracle(inst: &WeightedInstance<f64>, trace: &FlipTrace<f64>, eps: f64, window: usize) -> usize {
        let m = trace.moves.len();
        let mut count = 0;
        for start in 0..m.saturating_sub(window - 1) {
            let sub = MoveSequence::new(inst.n(), trace.moves[start..start + window].to_vec()).unwrap();
            let init = crate::flip::replay(&trace.initial, &trace.moves, start);
            let arcs = find_arcs(&sub);
            let ok = arcs.iter().all(|a| {
                let v = improvement_vector(&sub, a, &init, inst.graph()).unwrap();
                let g = v.dot(inst.weights());
                g > 0.0 && g <= eps
            });
            count += usize::from(!arcs.is_empty() && ok);
        }
        count
    }

    #[test]
    fn census_matches_window_oracle() {
        for seed in 0..20 {
            let mut rng = rng_from_seed(seed);
            let g = Graph::complete(7);
            let w =
                (0..g.num_edges()).map(|_| DistributionSpec::uniform(-1.0, 1.0).unwrap().sample(&mut rng)).collect();
            let inst = WeightedInstance::new(g, w).unwrap();
            let init = Configuration::random(7, &mut rng);
            let t = run_flip(&inst, &init, PivotRule::Random, 10_000, seed).unwrap();
            for eps in [0.05, 0.5, 100.0] {
                for window in [1, 3, 6] {
                    // float sums may differ in the last bit near the eps boundary; these eps are far from any gain
                    assert_eq!(eps_improving_census(&t, eps, window).unwrap(), census_oracle(&inst, &t, eps, window));
                }
            }
        }
    }

    #[test]
    fn pinned_complete_graph_runs() {
        let plan = ExperimentPlan {
            family: Family::Complete,
            sizes: vec![4, 8, 16, 32],
            phis: vec![0.5],
            rule: PivotRule::Random,
            trials: 100,
            base_seed: 0,
            step_cap: None,
            cells: None,
        };
        let rows = run_experiment(&plan, 0).unwrap();
        let max: Vec<usize> = rows.iter().map(|r| r.max_steps).collect();
        assert!(rows.iter().all(|r| r.timeouts == 0));
        assert_eq!(max, vec![4, 9, 20, 34]);
        assert!(max.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn mc_standing_matrix_respects_bound() {
        let d = DistributionSpec::uniform(-1.0, 1.0).unwrap();
        let sets: [Vec<Vec<i64>>; 4] = [
            vec![vec![1]],
            vec![vec![1, 0], vec![0, 1]],
            vec![vec![1, 0], vec![1, 1]],
            vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]],
        ];
        for (i, v) in sets.iter().enumerate() {
            let r = mc_lemma_probability(v, &vec![d; v[0].len()], 0.2, 1_000_000, 40 + i as u64).unwrap();
            assert!(r.probability <= r.bound + 4.0 * r.ci_half_width, "{r:?}");
        }
    }
}
