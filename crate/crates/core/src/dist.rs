//! Discrete distributions over an indexed alphabet `0..k`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Poisson};
use serde::{Deserialize, Serialize};

use crate::estimators::Histogram;
use crate::{Error, Result};

/// Absolute tolerance on `Σ p_i = 1`.
pub const SUM_TOLERANCE: f64 = 1e-9;
/// Tolerance on the perturbation balance `Σ δ'_i p_i = 0`.
pub const PERTURBATION_TOLERANCE: f64 = 1e-12;

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A probability mass function over `k ≥ 2` symbols.
///
/// The cumulative table used for inverse-CDF sampling is built once at
/// construction; values are immutable afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Distribution {
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

impl Distribution {
    /// Validates `probs` as-is (no renormalization).
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::TooFewSymbols(probs.len()));
        }
        for (index, &value) in probs.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteEntry { index });
            }
            if value < 0.0 {
                return Err(Error::NegativeEntry { index, value });
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::NotNormalized(total));
        }
        let cdf = probs
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        Ok(Self { probs, cdf })
    }

    /// Normalizes nonnegative weights into a distribution.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::TooFewSymbols(weights.len()));
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteEntry { index });
            }
            if value < 0.0 {
                return Err(Error::NegativeEntry { index, value });
            }
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::AllZero);
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::TooFewSymbols(k));
        }
        Self::new(vec![1.0 / k as f64; k])
    }

    /// Parses the line-oriented text format: one probability per line,
    /// `#` comments and blank lines ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut probs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let value: f64 =
                line.parse().map_err(|_| Error::Parse { line: i + 1, message: format!("not a number: {line:?}") })?;
            probs.push(value);
        }
        Self::new(probs)
    }

    /// Renders the text format read by [`Distribution::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.probs {
            out.push_str(&format!("{p:e}\n"));
        }
        out
    }

    pub fn k(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Index of the smallest mass (first one on ties).
    pub fn argmin(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p < self.probs[best] {
                best = i;
            }
        }
        best
    }

    pub fn min_mass(&self) -> f64 {
        self.probs[self.argmin()]
    }

    pub(crate) fn check_same_alphabet(&self, other: &Distribution) -> Result<()> {
        if self.k() != other.k() {
            return Err(Error::DimensionMismatch(self.k(), other.k()));
        }
        Ok(())
    }

    /// Errors unless every mass is strictly positive.
    pub fn check_strictly_positive(&self) -> Result<()> {
        match self.probs.iter().position(|&q| q <= 0.0) {
            Some(i) => Err(Error::ZeroReference(i)),
            None => Ok(()),
        }
    }

    /// Draws one symbol by inverse CDF.
    pub fn sample_symbol<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let i = self.cdf.partition_point(|&c| c <= u);
        if i < self.k() {
            return i;
        }
        // u landed above the rounded total; fall back to the last symbol with mass
        self.probs.iter().rposition(|&p| p > 0.0).unwrap_or(self.k() - 1)
    }

    /// Counts of `n` i.i.d. draws. Deterministic in `seed`.
    pub fn sample_histogram(&self, n: u64, seed: u64) -> Result<Histogram> {
        if n == 0 {
            return Err(Error::ZeroSamples);
        }
        let mut rng = rng_from_seed(seed);
        let mut counts = vec![0u64; self.k()];
        for _ in 0..n {
            counts[self.sample_symbol(&mut rng)] += 1;
        }
        Ok(Histogram::from_counts(counts))
    }

    /// Poissonized counts: `n_i ~ Poisson(n_mean · p_i)` independently.
    /// The returned histogram remembers `n_mean` for normalization.
    pub fn sample_histogram_poissonized(&self, n_mean: u64, seed: u64) -> Result<Histogram> {
        if n_mean == 0 {
            return Err(Error::ZeroSamples);
        }
        let mut rng = rng_from_seed(seed);
        let counts = self
            .probs
            .iter()
            .map(|&p| {
                let rate = n_mean as f64 * p;
                if rate > 0.0 {
                    // the rate is finite and positive so construction cannot fail
                    Poisson::new(rate).map(|d| d.sample(&mut rng) as u64).unwrap_or(0)
                } else {
                    0
                }
            })
            .collect();
        Ok(Histogram::poissonized(counts, n_mean))
    }

    /// `p'_i = p_i (1 + δ'_i)`.
    pub fn perturb(&self, v: &PerturbationVector) -> Result<Distribution> {
        v.validate_against(self)?;
        Distribution::new(self.probs.iter().zip(&v.deltas).map(|(p, d)| p * (1.0 + d)).collect())
    }
}

impl TryFrom<Vec<f64>> for Distribution {
    type Error = Error;

    fn try_from(probs: Vec<f64>) -> Result<Self> {
        Distribution::new(probs)
    }
}

impl From<Distribution> for Vec<f64> {
    fn from(d: Distribution) -> Self {
        d.probs
    }
}

/// Normalizes `weights`; see [`Distribution::from_weights`].
pub fn make_distribution(weights: &[f64]) -> Result<Distribution> {
    Distribution::from_weights(weights)
}

/// `½ Σ |p_i − p2_i|`.
pub fn total_variation(p: &Distribution, p2: &Distribution) -> Result<f64> {
    p.check_same_alphabet(p2)?;
    Ok(0.5 * p.probs.iter().zip(&p2.probs).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Multiplicative perturbation `δ'` of a base distribution together with
/// its magnitude `δ = Σ p_i |δ'_i|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationVector {
    deltas: Vec<f64>,
    magnitude: f64,
}

impl PerturbationVector {
    /// Builds and validates `deltas` against the base distribution `p`.
    pub fn new(p: &Distribution, deltas: Vec<f64>) -> Result<Self> {
        let magnitude = p.probs.iter().zip(&deltas).map(|(p, d)| p * d.abs()).sum();
        let v = Self { deltas, magnitude };
        v.validate_against(p)?;
        Ok(v)
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    /// Multiplies every `δ'_i` by `factor ∈ (0, 1]`.
    pub fn scaled(&self, p: &Distribution, factor: f64) -> Result<Self> {
        Self::new(p, self.deltas.iter().map(|d| d * factor).collect())
    }

    pub(crate) fn validate_against(&self, p: &Distribution) -> Result<()> {
        if self.deltas.len() != p.k() {
            return Err(Error::DimensionMismatch(self.deltas.len(), p.k()));
        }
        if let Some(i) = self.deltas.iter().position(|d| !d.is_finite() || *d < -0.5) {
            return Err(Error::InvalidPerturbation(format!("delta[{i}] = {} is below -1/2", self.deltas[i])));
        }
        let balance: f64 = p.probs.iter().zip(&self.deltas).map(|(p, d)| p * d).sum();
        if balance.abs() > PERTURBATION_TOLERANCE {
            return Err(Error::InvalidPerturbation(format!("sum of delta_i p_i is {balance}, expected 0")));
        }
        let magnitude: f64 = p.probs.iter().zip(&self.deltas).map(|(p, d)| p * d.abs()).sum();
        if (magnitude - self.magnitude).abs() > PERTURBATION_TOLERANCE {
            return Err(Error::InvalidPerturbation("stale magnitude".into()));
        }
        Ok(())
    }
}

/// Distribution families used by the bound constructions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Uniform {
        k: usize,
    },
    /// Mass `k^-exponent` at `position`, the rest spread evenly.
    Spike {
        k: usize,
        exponent: f64,
        position: usize,
    },
    /// Independent masses in `[1/(ratio·k), ratio/k]`, renormalized.
    AlmostUniform {
        k: usize,
        ratio: f64,
        seed: u64,
    },
}

impl Family {
    pub fn generate(&self) -> Result<Distribution> {
        match *self {
            Family::Uniform { k } => Distribution::uniform(k),
            Family::Spike { k, exponent, position } => spike(k, exponent, position),
            Family::AlmostUniform { k, ratio, seed } => almost_uniform(k, ratio, seed),
        }
    }
}

pub fn gen_family(family: &Family) -> Result<Distribution> {
    family.generate()
}

fn spike(k: usize, exponent: f64, position: usize) -> Result<Distribution> {
    if k < 2 {
        return Err(Error::TooFewSymbols(k));
    }
    if position >= k {
        return Err(Error::InvalidFamily(format!("spike position {position} >= k = {k}")));
    }
    if !exponent.is_finite() || exponent <= 0.0 {
        return Err(Error::InvalidFamily(format!("spike exponent {exponent} must be > 0")));
    }
    let mass = (-exponent * (k as f64).ln()).exp();
    if mass >= 1.0 {
        return Err(Error::InvalidFamily(format!("spike mass {mass} >= 1")));
    }
    let rest = (1.0 - mass) / (k - 1) as f64;
    let mut probs = vec![rest; k];
    probs[position] = mass;
    Distribution::new(probs)
}

fn almost_uniform(k: usize, ratio: f64, seed: u64) -> Result<Distribution> {
    if k < 2 {
        return Err(Error::TooFewSymbols(k));
    }
    if !(1.0..=4.0).contains(&ratio) {
        return Err(Error::InvalidFamily(format!("ratio {ratio} outside [1, 4]")));
    }
    let lo = 1.0 / (ratio * k as f64);
    let hi = ratio / k as f64;
    let mut rng = rng_from_seed(seed);
    let weights: Vec<f64> = (0..k).map(|_| if hi > lo { rng.random_range(lo..=hi) } else { lo }).collect();
    Distribution::from_weights(&weights)
}
