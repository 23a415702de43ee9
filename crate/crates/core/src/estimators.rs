//! Sample-based estimators of power sums and divergences.
//!
//! The corrected estimator replaces the empirical power `(n_i/n)^α` by the
//! falling power `n_i(n_i−1)⋯(n_i−α+1)` divided by a normalizer:
//!
//! - [`Normalization::Poissonized`] divides by `n^α`, where `n` is the Poisson
//!   mean when the counts were Poissonized. Unbiased under Poisson sampling.
//! - [`Normalization::Exact`] divides by the falling power of the total,
//!   which is unbiased for a fixed number of multinomial samples.

use serde::{Deserialize, Serialize};

use crate::dist::Distribution;
use crate::divergence::{ln_sum_of_terms, needs_log_space, DivergenceOrder};
use crate::numeric::median_odd;
use crate::{Error, Result};

/// Symbol counts `n_i` with their total `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    counts: Vec<u64>,
    total: u64,
    /// Nominal sample size when the counts were drawn with a Poisson total.
    poisson_mean: Option<u64>,
}

impl Histogram {
    pub fn from_counts(counts: Vec<u64>) -> Self {
        let total = counts.iter().sum();
        Self { counts, total, poisson_mean: None }
    }

    pub fn poissonized(counts: Vec<u64>, mean: u64) -> Self {
        Self { poisson_mean: Some(mean), ..Self::from_counts(counts) }
    }

    /// Counts symbol indices; any index `>= k` is an error.
    pub fn from_symbols<I: IntoIterator<Item = u64>>(symbols: I, k: usize) -> Result<Self> {
        let mut counts = vec![0u64; k];
        for s in symbols {
            let slot =
                counts.get_mut(s as usize).filter(|_| s < k as u64).ok_or(Error::SymbolOutOfRange { symbol: s, k })?;
            *slot += 1;
        }
        Ok(Self::from_counts(counts))
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn poisson_mean(&self) -> Option<u64> {
        self.poisson_mean
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Plugin,
    Corrected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Poissonized,
    Exact,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Plugin => "plugin",
            Method::Corrected => "corrected",
        })
    }
}

impl std::fmt::Display for Normalization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Normalization::Poissonized => "poissonized",
            Normalization::Exact => "exact",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plugin" | "plug-in" => Ok(Method::Plugin),
            "corrected" => Ok(Method::Corrected),
            other => Err(Error::Config(format!("unknown method {other:?}"))),
        }
    }
}

impl std::str::FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poissonized" => Ok(Normalization::Poissonized),
            "exact" => Ok(Normalization::Exact),
            other => Err(Error::Config(format!("unknown normalization {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimatorConfig {
    method: Method,
    normalization: Normalization,
    ord: DivergenceOrder,
}

impl EstimatorConfig {
    pub fn new(method: Method, normalization: Normalization, ord: DivergenceOrder) -> Result<Self> {
        if method == Method::Corrected && (!ord.is_integer() || ord.alpha() < 2.0) {
            return Err(Error::NonIntegerOrder(ord.alpha()));
        }
        Ok(Self { method, normalization, ord })
    }

    pub fn plugin(ord: DivergenceOrder) -> Self {
        Self { method: Method::Plugin, normalization: Normalization::Exact, ord }
    }

    pub fn corrected(ord: DivergenceOrder, normalization: Normalization) -> Result<Self> {
        Self::new(Method::Corrected, normalization, ord)
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn ord(&self) -> DivergenceOrder {
        self.ord
    }

    /// Whether samples for this estimator should be drawn with a Poisson total.
    pub fn wants_poissonized_samples(&self) -> bool {
        self.method == Method::Corrected && self.normalization == Normalization::Poissonized
    }

    /// Same estimator with the other normalization. Used by the verification
    /// mutation check.
    pub fn with_normalization(self, normalization: Normalization) -> Self {
        Self { normalization, ..self }
    }
}

/// Outcome of a divergence estimate. `Undefined` means the estimated power
/// sum was zero (every count below `α`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimate {
    Bits(f64),
    Undefined,
}

impl Estimate {
    pub(crate) fn from_ln_power_sum(ln_m: f64, ord: DivergenceOrder) -> Self {
        if ln_m == f64::NEG_INFINITY {
            Estimate::Undefined
        } else {
            Estimate::Bits(ln_m / ((ord.alpha() - 1.0) * std::f64::consts::LN_2))
        }
    }

    pub fn bits(&self) -> Option<f64> {
        match self {
            Estimate::Bits(b) => Some(*b),
            Estimate::Undefined => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, Estimate::Bits(_))
    }

    /// The failure event of an additive `delta`-approximation; undefined
    /// estimates always fail.
    pub fn fails(&self, truth: f64, delta: f64) -> bool {
        match self {
            Estimate::Bits(b) => (b - truth).abs() > delta,
            Estimate::Undefined => true,
        }
    }
}

impl Serialize for Estimate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.bits().serialize(s)
    }
}

/// `m (m−1) ⋯ (m−a+1)`, zero when `m < a`.
///
/// Panics if the result does not fit in a `u128`; estimators use
/// [`ln_falling_power`] instead.
pub fn falling_power(m: u64, a: u32) -> u128 {
    if m < a as u64 {
        return 0;
    }
    (0..a as u64).fold(1u128, |acc, j| acc.checked_mul((m - j) as u128).expect("falling power overflows u128"))
}

/// `ln` of [`falling_power`], `-inf` when it vanishes.
pub fn ln_falling_power(m: u64, a: u32) -> f64 {
    if m < a as u64 {
        return f64::NEG_INFINITY;
    }
    (0..a as u64).map(|j| ((m - j) as f64).ln()).sum()
}

/// Natural log of the estimated power sum; `-inf` when the estimate is 0.
pub fn ln_estimate_power_sum(h: &Histogram, q: &Distribution, cfg: &EstimatorConfig) -> Result<f64> {
    if h.k() != q.k() {
        return Err(Error::DimensionMismatch(h.k(), q.k()));
    }
    q.check_strictly_positive()?;
    let alpha = cfg.ord.alpha();
    let ln_q = q.probs().iter().map(|x| x.ln());
    match cfg.method {
        Method::Plugin => {
            if h.total == 0 {
                return Err(Error::ZeroSamples);
            }
            let ln_n = (h.total as f64).ln();
            let terms: Vec<f64> = h
                .counts
                .iter()
                .zip(ln_q)
                .map(
                    |(&c, lq)| {
                        if c == 0 {
                            f64::NEG_INFINITY
                        } else {
                            alpha * ((c as f64).ln() - ln_n) + (1.0 - alpha) * lq
                        }
                    },
                )
                .collect();
            Ok(ln_sum_of_terms(&terms, needs_log_space(q)))
        }
        Method::Corrected => {
            let a = cfg.ord.integer()?;
            let ln_norm = match cfg.normalization {
                Normalization::Poissonized => {
                    let n = h.poisson_mean.unwrap_or(h.total);
                    if n == 0 {
                        return Err(Error::ZeroSamples);
                    }
                    alpha * (n as f64).ln()
                }
                Normalization::Exact => {
                    // also covers an empty Poissonized draw
                    if h.total < a as u64 {
                        return Ok(f64::NEG_INFINITY);
                    }
                    ln_falling_power(h.total, a)
                }
            };
            let terms: Vec<f64> =
                h.counts.iter().zip(ln_q).map(|(&c, lq)| ln_falling_power(c, a) + (1.0 - alpha) * lq).collect();
            Ok(ln_sum_of_terms(&terms, needs_log_space(q)) - ln_norm)
        }
    }
}

/// Estimated power sum `M̂ ≥ 0`.
pub fn estimate_power_sum(h: &Histogram, q: &Distribution, cfg: &EstimatorConfig) -> Result<f64> {
    Ok(ln_estimate_power_sum(h, q, cfg)?.exp())
}

/// `log2(M̂) / (α − 1)`, or [`Estimate::Undefined`] when `M̂ = 0`.
pub fn estimate_divergence(h: &Histogram, q: &Distribution, cfg: &EstimatorConfig) -> Result<Estimate> {
    Ok(Estimate::from_ln_power_sum(ln_estimate_power_sum(h, q, cfg)?, cfg.ord))
}

/// Source of sample histograms for amplification and experiments.
pub trait HistogramSampler: Sync {
    fn sample(&self, n: u64, seed: u64) -> Result<Histogram>;
}

impl HistogramSampler for Distribution {
    fn sample(&self, n: u64, seed: u64) -> Result<Histogram> {
        self.sample_histogram(n, seed)
    }
}

/// Draws Poissonized histograms with mean `n`.
#[derive(Debug, Clone, Copy)]
pub struct Poissonized<'a>(pub &'a Distribution);

impl HistogramSampler for Poissonized<'_> {
    fn sample(&self, n: u64, seed: u64) -> Result<Histogram> {
        self.0.sample_histogram_poissonized(n, seed)
    }
}

/// Median of `groups` independent estimates, group `g` seeded with `seed ^ g`.
///
/// The median is taken over power-sum estimates (log is monotone), with
/// undefined estimates ranked lowest.
pub fn median_amplify<S: HistogramSampler + ?Sized>(
    sampler: &S,
    q: &Distribution,
    cfg: &EstimatorConfig,
    n_per_group: u64,
    groups: u64,
    seed: u64,
) -> Result<Estimate> {
    if groups.is_multiple_of(2) {
        return Err(Error::EvenGroups(groups));
    }
    let ln_estimates = crate::par::map_indices(groups, |g| {
        let h = sampler.sample(n_per_group, seed ^ g)?;
        ln_estimate_power_sum(&h, q, cfg)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    Ok(Estimate::from_ln_power_sum(median_odd(&ln_estimates), cfg.ord))
}
