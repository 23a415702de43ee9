//! Seeded Monte Carlo experiments: failure probabilities, scaling sweeps,
//! the distinguishing check behind the lower bound and median amplification.
//!
//! Every trial derives its seed from the master seed, so results do not
//! depend on thread scheduling.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::{sufficient_n, theorem1_condition, witness_pair_uniform, WitnessPair, DEFAULT_SLACK};
use crate::dist::{Distribution, Family};
use crate::divergence::{renyi_divergence, DivergenceOrder};
use crate::estimators::{
    estimate_divergence, median_amplify, EstimatorConfig, HistogramSampler, Method, Normalization, Poissonized,
};
use crate::numeric::{format_sig, loglog_slope};
use crate::par::map_indices;
use crate::{Error, Result};

/// Seed for trial `trial` of the experiment at alphabet size `k`. The same
/// trial index reuses its seed across sample sizes.
pub fn trial_seed(master: u64, k: usize, trial: u64) -> u64 {
    master ^ ((k as u64) << 40) ^ trial
}

/// Seed for trial `trial` of a median-amplification experiment; group `g`
/// then uses `seed ^ g`.
pub fn median_trial_seed(master: u64, trial: u64) -> u64 {
    master ^ (trial << 32)
}

/// Recipe for a distribution at a given alphabet size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyTemplate {
    /// The reference distribution itself (only for `p`).
    Reference,
    Uniform,
    Spike {
        exponent: f64,
        position: usize,
    },
    AlmostUniform {
        ratio: f64,
        seed: u64,
    },
    /// The perturbed member `p′` of the uniform-`p` witness pair for `q`
    /// (only for `p`).
    Witness,
}

impl FromStr for FamilyTemplate {
    type Err = Error;

    /// `reference`, `uniform`, `witness`, `spike:C[@POS]`,
    /// `almost_uniform:R[:SEED]`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidFamily(format!("cannot parse family {s:?}"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let (name, rest) = match s.split_once(':') {
            Some((a, b)) => (a.trim(), Some(b)),
            None => (s.trim(), None),
        };
        match (name, rest) {
            ("reference", None) => Ok(Self::Reference),
            ("uniform", None) => Ok(Self::Uniform),
            ("witness", None) => Ok(Self::Witness),
            ("spike", Some(arg)) => {
                let (c, pos) = match arg.split_once('@') {
                    Some((c, pos)) => (num(c)?, pos.trim().parse().map_err(|_| bad())?),
                    None => (num(arg)?, 0),
                };
                Ok(Self::Spike { exponent: c, position: pos })
            }
            ("almost_uniform", Some(arg)) => {
                let (r, seed) = match arg.split_once(':') {
                    Some((r, seed)) => (num(r)?, seed.trim().parse().map_err(|_| bad())?),
                    None => (num(arg)?, 0),
                };
                Ok(Self::AlmostUniform { ratio: r, seed })
            }
            _ => Err(bad()),
        }
    }
}

impl std::fmt::Display for FamilyTemplate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Reference => f.write_str("reference"),
            Self::Uniform => f.write_str("uniform"),
            Self::Witness => f.write_str("witness"),
            Self::Spike { exponent, position } => write!(f, "spike:{exponent}@{position}"),
            Self::AlmostUniform { ratio, seed } => write!(f, "almost_uniform:{ratio}:{seed}"),
        }
    }
}

impl Serialize for FamilyTemplate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FamilyTemplate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FamilyTemplate {
    /// Builds a reference distribution over `k` symbols.
    pub fn reference(&self, k: usize) -> Result<Distribution> {
        match *self {
            Self::Uniform => Family::Uniform { k }.generate(),
            Self::Spike { exponent, position } => Family::Spike { k, exponent, position }.generate(),
            Self::AlmostUniform { ratio, seed } => Family::AlmostUniform { k, ratio, seed }.generate(),
            Self::Reference | Self::Witness => {
                Err(Error::InvalidFamily(format!("{self} is only meaningful for the sampled distribution")))
            }
        }
    }

    /// Builds the sampled distribution against the reference `q`.
    pub fn sampled(&self, q: &Distribution, ord: DivergenceOrder) -> Result<Distribution> {
        match self {
            Self::Reference => Ok(q.clone()),
            Self::Witness => Ok(witness_pair_uniform(q, ord)?.p_prime),
            other => other.reference(q.k()),
        }
    }
}

/// Configuration of a sample-complexity sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub alpha: f64,
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default = "default_normalization")]
    pub normalization: Normalization,
    /// Alphabet sizes `k_min, 2·k_min, …` up to `k_max`.
    pub k_min: usize,
    pub k_max: usize,
    pub p: FamilyTemplate,
    pub q: FamilyTemplate,
    /// Sample sizes `n_min · n_factor^j`, rounded and deduplicated, up to `n_max`.
    pub n_min: u64,
    pub n_max: u64,
    #[serde(default = "default_n_factor")]
    pub n_factor: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_slack")]
    pub slack: f64,
    pub trials: u64,
    pub master_seed: u64,
}

fn default_method() -> Method {
    Method::Corrected
}
fn default_normalization() -> Normalization {
    Normalization::Exact
}
fn default_n_factor() -> f64 {
    2f64.powf(0.125)
}
fn default_delta() -> f64 {
    0.5
}
fn default_epsilon() -> f64 {
    1.0 / 3.0
}
fn default_slack() -> f64 {
    DEFAULT_SLACK
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        self.estimator()?;
        if self.k_min < 2 || self.k_max < self.k_min {
            return fail(format!("need 2 <= k_min <= k_max, got {}..{}", self.k_min, self.k_max));
        }
        if self.n_min < 1 || self.n_max < self.n_min {
            return fail(format!("need 1 <= n_min <= n_max, got {}..{}", self.n_min, self.n_max));
        }
        if !(self.n_factor > 1.0) || !self.n_factor.is_finite() {
            return fail(format!("n_factor {} must be > 1", self.n_factor));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return fail(format!("delta {} must be > 0", self.delta));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return fail(format!("epsilon {} must be in (0, 1)", self.epsilon));
        }
        if !(self.slack > 0.0) || !self.slack.is_finite() {
            return fail(format!("slack {} must be > 0", self.slack));
        }
        if self.trials < 1 {
            return fail("trials must be >= 1".into());
        }
        if matches!(self.q, FamilyTemplate::Reference | FamilyTemplate::Witness) {
            return fail(format!("q cannot be {}", self.q));
        }
        Ok(())
    }

    pub fn ord(&self) -> Result<DivergenceOrder> {
        DivergenceOrder::new(self.alpha)
    }

    pub fn estimator(&self) -> Result<EstimatorConfig> {
        EstimatorConfig::new(self.method, self.normalization, self.ord()?)
    }

    pub fn k_values(&self) -> Vec<usize> {
        std::iter::successors(Some(self.k_min), |&k| k.checked_mul(2)).take_while(|&k| k <= self.k_max).collect()
    }

    pub fn n_values(&self) -> Vec<u64> {
        geometric_grid(self.n_min, self.n_max, self.n_factor)
    }
}

/// `lo · factor^j` rounded to integers, deduplicated, capped at `hi`.
pub fn geometric_grid(lo: u64, hi: u64, factor: f64) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    let mut x = lo as f64;
    while x.round() <= hi as f64 {
        let n = x.round() as u64;
        if out.last() != Some(&n) {
            out.push(n);
        }
        x *= factor;
    }
    out
}

/// Outcome of repeated estimation at a fixed sample size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FailureStats {
    pub trials: u64,
    pub failures: u64,
    /// Mean `|D̂ − D|` over trials with a defined estimate (NaN if none).
    pub mean_abs_error_bits: f64,
}

impl FailureStats {
    pub fn probability(&self) -> f64 {
        self.failures as f64 / self.trials as f64
    }
}

fn sampler_for<'a>(p: &'a Distribution, cfg: &EstimatorConfig) -> Box<dyn HistogramSampler + 'a> {
    if cfg.wants_poissonized_samples() {
        Box::new(Poissonized(p))
    } else {
        Box::new(p.clone())
    }
}

/// Monte Carlo estimate of `Pr[|D̂ − D| > δ]`; trial `t` is seeded with
/// `seed_of(t)`.
pub fn monte_carlo_failure(
    p: &Distribution,
    q: &Distribution,
    cfg: &EstimatorConfig,
    n: u64,
    delta: f64,
    trials: u64,
    seed_of: impl Fn(u64) -> u64 + Sync + Send,
) -> Result<FailureStats> {
    let truth = renyi_divergence(p, q, cfg.ord())?;
    let sampler = sampler_for(p, cfg);
    let outcomes = map_indices(trials, |t| -> Result<Option<f64>> {
        let h = sampler.sample(n, seed_of(t))?;
        Ok(estimate_divergence(&h, q, cfg)?.bits().map(|b| (b - truth).abs()))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(summarize(&outcomes, delta))
}

fn summarize(errors: &[Option<f64>], delta: f64) -> FailureStats {
    let failures = errors.iter().filter(|e| e.is_none_or(|e| e > delta)).count() as u64;
    let defined: Vec<f64> = errors.iter().flatten().copied().collect();
    let mean_abs_error_bits =
        if defined.is_empty() { f64::NAN } else { defined.iter().sum::<f64>() / defined.len() as f64 };
    FailureStats { trials: errors.len() as u64, failures, mean_abs_error_bits }
}

/// One row of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: usize,
    pub n: u64,
    pub trials: u64,
    pub empirical_error_prob: f64,
    pub mean_abs_error_bits: f64,
    pub theorem1_lhs: f64,
    pub sufficient_n: u64,
    pub implied_lower_n: f64,
}

pub const CSV_HEADER: &str =
    "k,n,trials,empirical_error_prob,mean_abs_error_bits,theorem1_lhs,sufficient_n,implied_lower_n";

impl SweepRow {
    pub fn to_csv(&self) -> String {
        [
            self.k.to_string(),
            self.n.to_string(),
            self.trials.to_string(),
            format_sig(self.empirical_error_prob, 12),
            format_sig(self.mean_abs_error_bits, 12),
            format_sig(self.theorem1_lhs, 12),
            self.sufficient_n.to_string(),
            format_sig(self.implied_lower_n, 12),
        ]
        .join(",")
    }
}

/// Runs the sweep in `(k, n)` order. `on_row` sees each row as soon as it
/// is complete.
pub fn run_sweep(config: &ExperimentConfig, mut on_row: impl FnMut(&SweepRow)) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let ord = config.ord()?;
    let cfg = config.estimator()?;
    let mut rows = Vec::new();
    for k in config.k_values() {
        let q = config.q.reference(k)?;
        let p = config.p.sampled(&q, ord)?;
        // bound columns need an integer order; leave them empty otherwise
        let integer = ord.integer().is_ok_and(|a| a >= 2);
        let suff = if integer { sufficient_n(&p, &q, ord, config.delta, config.epsilon, config.slack)? } else { 0 };
        let lower = witness_pair_uniform(&q, ord)?.implied_n;
        for n in config.n_values() {
            let stats = monte_carlo_failure(&p, &q, &cfg, n, config.delta, config.trials, |t| {
                trial_seed(config.master_seed, k, t)
            })?;
            let row = SweepRow {
                k,
                n,
                trials: stats.trials,
                empirical_error_prob: stats.probability(),
                mean_abs_error_bits: stats.mean_abs_error_bits,
                theorem1_lhs: if integer { theorem1_condition(&p, &q, ord, n)? } else { f64::NAN },
                sufficient_n: suff,
                implied_lower_n: lower,
            };
            on_row(&row);
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Smallest swept `n` at alphabet size `k` with error probability at most
/// `threshold`.
pub fn empirical_complexity(rows: &[SweepRow], k: usize, threshold: f64) -> Option<u64> {
    rows.iter().filter(|r| r.k == k && r.empirical_error_prob <= threshold).map(|r| r.n).min()
}

/// Log-log slope of empirical complexity against `k`, over the alphabet
/// sizes where it was reached.
pub fn complexity_slope(rows: &[SweepRow], threshold: f64) -> Option<f64> {
    let mut ks: Vec<usize> = rows.iter().map(|r| r.k).collect();
    ks.dedup();
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        ks.into_iter().filter_map(|k| empirical_complexity(rows, k, threshold).map(|n| (k as f64, n as f64))).unzip();
    (xs.len() >= 2).then(|| loglog_slope(&xs, &ys))
}

/// Result of running the estimator on both members of a witness pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistinguishingCheck {
    pub n: u64,
    /// Half the divergence gap: no single estimate can be this close to both.
    pub accuracy: f64,
    pub trials: u64,
    pub failure_p: f64,
    pub failure_p_prime: f64,
    pub passed: bool,
}

/// Runs the corrected estimator with `n = ⌈implied_n / 10⌉` samples on `p`
/// and on `p′`; passes when the failure probability on either exceeds 1/3.
pub fn distinguishing_check(
    pair: &WitnessPair,
    ord: DivergenceOrder,
    trials: u64,
    master_seed: u64,
) -> Result<DistinguishingCheck> {
    if trials < 1 {
        return Err(Error::Config("trials must be >= 1".into()));
    }
    let cfg = EstimatorConfig::corrected(ord, Normalization::Exact)?;
    let n = ((pair.implied_n / 10.0).ceil() as u64).max(1);
    let accuracy = pair.divergence_gap / 2.0;
    let k = pair.q.k();
    let fp = monte_carlo_failure(&pair.p, &pair.q, &cfg, n, accuracy, trials, |t| trial_seed(master_seed, k, t))?;
    let fpp =
        monte_carlo_failure(&pair.p_prime, &pair.q, &cfg, n, accuracy, trials, |t| trial_seed(master_seed ^ 1, k, t))?;
    let (failure_p, failure_p_prime) = (fp.probability(), fpp.probability());
    Ok(DistinguishingCheck {
        n,
        accuracy,
        trials,
        failure_p,
        failure_p_prime,
        passed: failure_p.max(failure_p_prime) > 1.0 / 3.0,
    })
}

/// Failure probability of the median of `groups` estimates, each from
/// `n_per_group` samples, over `trials` seeded repetitions.
#[allow(clippy::too_many_arguments)]
pub fn median_failure(
    p: &Distribution,
    q: &Distribution,
    cfg: &EstimatorConfig,
    n_per_group: u64,
    groups: u64,
    delta: f64,
    trials: u64,
    master_seed: u64,
) -> Result<FailureStats> {
    let truth = renyi_divergence(p, q, cfg.ord())?;
    let sampler = sampler_for(p, cfg);
    let errors = (0..trials)
        .map(|t| {
            let est = median_amplify(&*sampler, q, cfg, n_per_group, groups, median_trial_seed(master_seed, t))?;
            Ok(est.bits().map(|b| (b - truth).abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(&errors, delta))
}

/// Bisects for the smallest `n` in `[lo, hi]` whose single-run failure
/// probability is at most `target`, assuming it decreases in `n`.
#[allow(clippy::too_many_arguments)]
pub fn calibrate_n(
    p: &Distribution,
    q: &Distribution,
    cfg: &EstimatorConfig,
    delta: f64,
    target: f64,
    (mut lo, mut hi): (u64, u64),
    trials: u64,
    master_seed: u64,
) -> Result<u64> {
    let prob = |n: u64| -> Result<f64> {
        Ok(monte_carlo_failure(p, q, cfg, n, delta, trials, |t| master_seed ^ t)?.probability())
    };
    if lo < 1 || hi < lo {
        return Err(Error::Config(format!("bad calibration range {lo}..{hi}")));
    }
    if prob(hi)? > target {
        return Err(Error::Config(format!("failure probability at n = {hi} is above {target}")));
    }
    while hi > lo {
        let mid = lo + (hi - lo) / 2;
        if prob(mid)? <= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(hi)
}
