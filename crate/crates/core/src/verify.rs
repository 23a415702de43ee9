//! Self-check of the corrected estimator against the enumeration oracle on a
//! fixed grid of small instances.

use rand::Rng;
use serde::Serialize;

use crate::dist::{rng_from_seed, Distribution};
use crate::divergence::{power_sum, DivergenceOrder};
use crate::estimators::{EstimatorConfig, Normalization};
use crate::oracle::{exact_mean_and_variance, variance_bound, EnumerationBudget, SamplingModel};
use crate::Result;

pub const GRID_K: [usize; 2] = [2, 3];
pub const GRID_N: [u64; 3] = [3, 4, 6];
pub const GRID_ALPHA: [u32; 2] = [2, 3];

/// Relative tolerance for the fixed-n mean.
pub const EXACT_TOLERANCE: f64 = 1e-12;
/// Relative tolerance for the truncated Poisson mean.
pub const POISSON_TOLERANCE: f64 = 1e-9;

/// Truncation used for Poisson moments. The neglected tail must be small
/// against the estimator values it carries, not just in probability.
pub fn verification_budget() -> EnumerationBudget {
    EnumerationBudget::new(1_000_000, 1e-30).expect("valid budget")
}

/// A reproducible pair `(p, q)` with every mass at least `0.05 / k`-ish.
pub fn random_instance(k: usize, seed: u64) -> Result<(Distribution, Distribution)> {
    let mut rng = rng_from_seed(seed);
    let mut draw = || -> Result<Distribution> {
        let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
        Distribution::from_weights(&w)
    };
    let p = draw()?;
    let q = draw()?;
    Ok((p, q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    ExactUnbiased,
    PoissonUnbiased,
    VarianceBound,
}

impl std::fmt::Display for CheckKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CheckKind::ExactUnbiased => "exact_unbiased",
            CheckKind::PoissonUnbiased => "poisson_unbiased",
            CheckKind::VarianceBound => "variance_bound",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub k: usize,
    pub n: u64,
    pub alpha: u32,
    pub check: CheckKind,
    /// Oracle value (mean or variance).
    pub observed: f64,
    /// Power sum or variance bound it is compared with.
    pub expected: f64,
    pub passed: bool,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    /// Swap the normalizations of both estimators. The checks must then fail.
    pub corrupt_normalization: bool,
    pub seed: u64,
}

/// Runs three checks on each of the 12 grid instances.
pub fn run_verification(options: VerifyOptions) -> Result<Vec<CheckResult>> {
    let budget = verification_budget();
    let mut out = Vec::new();
    for (i, &k) in GRID_K.iter().enumerate() {
        for (j, &n) in GRID_N.iter().enumerate() {
            for (l, &a) in GRID_ALPHA.iter().enumerate() {
                let (p, q) = random_instance(k, options.seed ^ (100 * i + 10 * j + l) as u64)?;
                let ord = DivergenceOrder::new(a as f64)?;
                let truth = power_sum(&p, &q, ord)?.value();
                let mut exact = EstimatorConfig::corrected(ord, Normalization::Exact)?;
                let mut poisson = EstimatorConfig::corrected(ord, Normalization::Poissonized)?;
                if options.corrupt_normalization {
                    exact = exact.with_normalization(Normalization::Poissonized);
                    poisson = poisson.with_normalization(Normalization::Exact);
                }
                let fixed = exact_mean_and_variance(&p, &q, &exact, n, SamplingModel::FixedN, &budget)?;
                let pois = exact_mean_and_variance(&p, &q, &poisson, n, SamplingModel::Poisson, &budget)?;
                let bound = variance_bound(&p, &q, ord, n)?;
                let scale = truth.max(1.0);
                let mut push = |check, observed: f64, expected: f64, passed| {
                    out.push(CheckResult {
                        k,
                        n,
                        alpha: a,
                        check,
                        observed,
                        expected,
                        passed,
                        p: p.probs().to_vec(),
                        q: q.probs().to_vec(),
                    })
                };
                push(
                    CheckKind::ExactUnbiased,
                    fixed.mean,
                    truth,
                    (fixed.mean - truth).abs() <= EXACT_TOLERANCE * scale,
                );
                push(
                    CheckKind::PoissonUnbiased,
                    pois.mean,
                    truth,
                    (pois.mean - truth).abs() <= POISSON_TOLERANCE * scale,
                );
                push(CheckKind::VarianceBound, pois.variance, bound, pois.variance <= bound);
            }
        }
    }
    Ok(out)
}
