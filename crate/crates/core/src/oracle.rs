//! Brute-force ground truth for small instances.
//!
//! Every count vector is enumerated with its exact probability and pushed
//! through the estimator, so moments and failure probabilities come out
//! exact (fixed-n) or exact up to a certified truncated mass (Poisson).

use serde::Serialize;

use crate::dist::Distribution;
use crate::divergence::{check_pair, renyi_divergence, DivergenceOrder};
use crate::estimators::{estimate_divergence, estimate_power_sum, EstimatorConfig, Histogram};
use crate::numeric::{binomial, ln_factorial, log_sum_exp};
use crate::{Error, Result};

/// How the sample counts are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingModel {
    /// Exactly `n` i.i.d. samples (multinomial counts).
    FixedN,
    /// `n_i ~ Poisson(n · p_i)` independently.
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumerationBudget {
    max_outcomes: u64,
    truncation_mass: f64,
}

impl EnumerationBudget {
    pub fn new(max_outcomes: u64, truncation_mass: f64) -> Result<Self> {
        if max_outcomes < 1 {
            return Err(Error::InvalidBudget("max_outcomes must be >= 1".into()));
        }
        if !(truncation_mass > 0.0 && truncation_mass <= 1e-9) {
            return Err(Error::InvalidBudget(format!("truncation mass {truncation_mass} outside (0, 1e-9]")));
        }
        Ok(Self { max_outcomes, truncation_mass })
    }

    pub fn max_outcomes(&self) -> u64 {
        self.max_outcomes
    }

    pub fn truncation_mass(&self) -> f64 {
        self.truncation_mass
    }
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self { max_outcomes: 1_000_000, truncation_mass: 1e-10 }
    }
}

/// Exact first two moments of an estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    /// Total probability of the enumerated outcomes.
    pub mass: f64,
    pub outcomes: u64,
}

/// Enumerated count vectors with their probabilities.
struct Outcomes {
    histograms: Vec<Histogram>,
    weights: Vec<f64>,
}

impl Outcomes {
    fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

fn compositions(n: u64, k: usize, visit: &mut impl FnMut(&[u64])) {
    fn go(remaining: u64, slot: usize, current: &mut Vec<u64>, visit: &mut impl FnMut(&[u64])) {
        let k = current.len();
        if slot == k - 1 {
            current[slot] = remaining;
            visit(current);
            return;
        }
        for c in (0..=remaining).rev() {
            current[slot] = c;
            go(remaining - c, slot + 1, current, visit);
        }
    }
    let mut current = vec![0u64; k];
    go(n, 0, &mut current, visit);
}

fn multinomial_outcomes(p: &Distribution, n: u64, budget: &EnumerationBudget) -> Result<Outcomes> {
    let k = p.k();
    let needed = binomial(n + k as u64 - 1, k as u64 - 1);
    if needed > budget.max_outcomes as f64 {
        return Err(Error::BudgetExceeded { needed, budget: budget.max_outcomes });
    }
    let ln_p: Vec<f64> = p.probs().iter().map(|x| x.ln()).collect();
    let ln_n_fact = ln_factorial(n);
    let mut histograms = Vec::with_capacity(needed as usize);
    let mut weights = Vec::with_capacity(needed as usize);
    compositions(n, k, &mut |counts| {
        let mut ln_w = ln_n_fact;
        for (&c, &lp) in counts.iter().zip(&ln_p) {
            if c > 0 {
                ln_w += c as f64 * lp - ln_factorial(c);
            }
        }
        // ln_w is -inf (weight 0) when a zero-probability symbol has a count
        weights.push(ln_w.exp());
        histograms.push(Histogram::from_counts(counts.to_vec()));
    });
    Ok(Outcomes { histograms, weights })
}

/// Poisson(λ) probabilities for `0..=cutoff`, where `cutoff` is the smallest
/// value whose upper tail has mass below `tail`.
fn truncated_poisson(lambda: f64, tail: f64) -> Vec<f64> {
    if lambda == 0.0 {
        return vec![1.0];
    }
    let ln_lambda = lambda.ln();
    let ln_pmf = |j: u64| j as f64 * ln_lambda - lambda - ln_factorial(j);
    // extend well past the mode until terms are negligible against `tail`
    let mut pmf = Vec::new();
    let mut j = 0u64;
    loop {
        let v = ln_pmf(j).exp();
        pmf.push(v);
        if j as f64 > lambda && v < tail * 1e-6 {
            break;
        }
        j += 1;
    }
    let mut suffix = 0.0;
    let mut cutoff = pmf.len() - 1;
    // walk down from the far end: stop once the mass above `m` reaches `tail`
    for m in (0..pmf.len()).rev() {
        if suffix >= tail {
            break;
        }
        cutoff = m;
        suffix += pmf[m];
    }
    // mass strictly above `cutoff` is below `tail`
    pmf.truncate(cutoff + 1);
    pmf
}

fn poisson_outcomes(p: &Distribution, n: u64, budget: &EnumerationBudget) -> Result<Outcomes> {
    let k = p.k();
    let per_coordinate = budget.truncation_mass / k as f64;
    let tables: Vec<Vec<f64>> = p.probs().iter().map(|&pi| truncated_poisson(n as f64 * pi, per_coordinate)).collect();
    let needed: f64 = tables.iter().map(|t| t.len() as f64).product();
    if needed > budget.max_outcomes as f64 {
        return Err(Error::BudgetExceeded { needed, budget: budget.max_outcomes });
    }
    let mut histograms = Vec::with_capacity(needed as usize);
    let mut weights = Vec::with_capacity(needed as usize);
    let mut counts = vec![0usize; k];
    loop {
        let w: f64 = counts.iter().zip(&tables).map(|(&c, t)| t[c]).product();
        weights.push(w);
        histograms.push(Histogram::poissonized(counts.iter().map(|&c| c as u64).collect(), n));
        // odometer increment
        let mut slot = 0;
        loop {
            if slot == k {
                return Ok(Outcomes { histograms, weights });
            }
            counts[slot] += 1;
            if counts[slot] < tables[slot].len() {
                break;
            }
            counts[slot] = 0;
            slot += 1;
        }
    }
}

fn outcomes(p: &Distribution, n: u64, model: SamplingModel, budget: &EnumerationBudget) -> Result<Outcomes> {
    if n == 0 {
        return Err(Error::ZeroSamples);
    }
    match model {
        SamplingModel::FixedN => multinomial_outcomes(p, n, budget),
        SamplingModel::Poisson => poisson_outcomes(p, n, budget),
    }
}

/// Exact mean and variance of the power-sum estimate.
pub fn exact_mean_and_variance(
    p: &Distribution,
    q: &Distribution,
    cfg: &EstimatorConfig,
    n: u64,
    model: SamplingModel,
    budget: &EnumerationBudget,
) -> Result<Moments> {
    check_pair(p, q)?;
    let out = outcomes(p, n, model, budget)?;
    let values = out.histograms.iter().map(|h| estimate_power_sum(h, q, cfg)).collect::<Result<Vec<f64>>>()?;
    let mean: f64 = out.weights.iter().zip(&values).map(|(w, x)| w * x).sum();
    let variance: f64 = out.weights.iter().zip(&values).map(|(w, x)| w * (x - mean).powi(2)).sum();
    Ok(Moments { mean, variance, mass: out.mass(), outcomes: values.len() as u64 })
}

/// Exact probability that the divergence estimate misses `D_α(p‖q)` by more
/// than `delta` bits; undefined estimates count as misses.
#[allow(clippy::too_many_arguments)]
pub fn exact_failure_probability(
    p: &Distribution,
    q: &Distribution,
    cfg: &EstimatorConfig,
    n: u64,
    model: SamplingModel,
    delta: f64,
    budget: &EnumerationBudget,
) -> Result<f64> {
    let truth = renyi_divergence(p, q, cfg.ord())?;
    let out = outcomes(p, n, model, budget)?;
    let mut failed = 0.0;
    for (h, w) in out.histograms.iter().zip(&out.weights) {
        if estimate_divergence(h, q, cfg)?.fails(truth, delta) {
            failed += w;
        }
    }
    Ok(failed)
}

/// Upper bound on the variance of the Poissonized corrected estimator with
/// mean sample size `n`:
///
/// ```text
/// Σ_{r=0}^{α−1} C(α,r) α^{α−r} n^{−(α−r)} Σ_i p_i^{α+r} q_i^{2−2α}
/// ```
///
/// This is the per-symbol inequality `Var[N^(α)] ≤ λ^α((λ+α)^α − λ^α)` for
/// `N ~ Poisson(λ)`, expanded and summed with weights `q_i^{2−2α} n^{−2α}`.
pub fn variance_bound(p: &Distribution, q: &Distribution, ord: DivergenceOrder, n: u64) -> Result<f64> {
    let a = ord.integer()?;
    if a < 2 {
        return Err(Error::NonIntegerOrder(ord.alpha()));
    }
    if n == 0 {
        return Err(Error::ZeroSamples);
    }
    check_pair(p, q)?;
    let alpha = a as f64;
    let ln_n = (n as f64).ln();
    let mut total = 0.0;
    for r in 0..a {
        let ln_terms: Vec<f64> = p
            .probs()
            .iter()
            .zip(q.probs())
            .map(|(&pi, &qi)| {
                if pi == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    (alpha + r as f64) * pi.ln() + (2.0 - 2.0 * alpha) * qi.ln()
                }
            })
            .collect();
        let gap = (a - r) as f64;
        total += (binomial(a as u64, r as u64).ln() + gap * alpha.ln() - gap * ln_n + log_sum_exp(&ln_terms)).exp();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::theorem1_condition;
    use crate::dist::make_distribution;
    use crate::divergence::power_sum;
    use crate::estimators::Normalization;

    fn ord(a: f64) -> DivergenceOrder {
        DivergenceOrder::new(a).unwrap()
    }

    fn exact(a: f64) -> EstimatorConfig {
        EstimatorConfig::corrected(ord(a), Normalization::Exact).unwrap()
    }

    fn poissonized(a: f64) -> EstimatorConfig {
        EstimatorConfig::corrected(ord(a), Normalization::Poissonized).unwrap()
    }

    fn tight() -> EnumerationBudget {
        EnumerationBudget::new(1_000_000, 1e-30).unwrap()
    }

    #[test]
    fn budget_validation() {
        assert!(EnumerationBudget::new(0, 1e-10).is_err());
        assert!(EnumerationBudget::new(10, 0.0).is_err());
        assert!(EnumerationBudget::new(10, 1e-8).is_err());
        assert_eq!(EnumerationBudget::default().max_outcomes(), 1_000_000);
    }

    #[test]
    fn fair_coin_three_samples() {
        let p = Distribution::uniform(2).unwrap();
        let m = exact_mean_and_variance(&p, &p, &exact(2.0), 3, SamplingModel::FixedN, &Default::default()).unwrap();
        assert_eq!(m.outcomes, 4);
        assert!((m.mass - 1.0).abs() < 1e-15);
        assert!((m.mean - 1.0).abs() < 1e-15);
        // outcomes (3,0),(2,1),(1,2),(0,3) give M̂ = 2, 2/3, 2/3, 2 with weights 1,3,3,1 / 8
        let var = 0.25 * 1.0 + 0.75 * (1.0f64 / 3.0).powi(2);
        assert!((m.variance - var).abs() < 1e-15);

        let plugin = EstimatorConfig::plugin(ord(2.0));
        let b = exact_mean_and_variance(&p, &p, &plugin, 3, SamplingModel::FixedN, &Default::default()).unwrap();
        assert!((b.mean - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn point_mass_is_deterministic() {
        let p = Distribution::new(vec![1.0, 0.0, 0.0]).unwrap();
        let q = make_distribution(&[0.2, 0.3, 0.5]).unwrap();
        for n in 3..8 {
            let m =
                exact_mean_and_variance(&p, &q, &exact(3.0), n, SamplingModel::FixedN, &Default::default()).unwrap();
            assert!((m.mean - 0.2f64.powi(-2)).abs() < 1e-12);
            assert!(m.variance.abs() < 1e-18);
        }
    }

    #[test]
    fn weights_sum_to_one() {
        let p = make_distribution(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        for n in [1, 5, 20, 40] {
            let m = exact_mean_and_variance(&p, &p, &exact(2.0), n, SamplingModel::FixedN, &Default::default());
            if n >= 1 {
                let m = m.unwrap();
                assert!((m.mass - 1.0).abs() < 1e-12);
            }
        }
        let b = EnumerationBudget::default();
        let m = exact_mean_and_variance(&p, &p, &poissonized(2.0), 10, SamplingModel::Poisson, &b).unwrap();
        assert!(m.mass >= 1.0 - b.truncation_mass() && m.mass <= 1.0 + 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let p = Distribution::uniform(4).unwrap();
        let small = EnumerationBudget::new(100, 1e-10).unwrap();
        // C(23, 3) = 1771 outcomes
        assert!(matches!(
            exact_mean_and_variance(&p, &p, &exact(2.0), 20, SamplingModel::FixedN, &small),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(matches!(
            exact_mean_and_variance(&p, &p, &exact(2.0), 20, SamplingModel::Poisson, &small),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn poissonized_estimator_is_unbiased() {
        let p = make_distribution(&[0.15, 0.35, 0.5]).unwrap();
        let q = make_distribution(&[0.3, 0.3, 0.4]).unwrap();
        for a in [2.0, 3.0] {
            for n in [2, 5, 9] {
                let m = exact_mean_and_variance(&p, &q, &poissonized(a), n, SamplingModel::Poisson, &tight()).unwrap();
                let truth = power_sum(&p, &q, ord(a)).unwrap().value();
                assert!((m.mean - truth).abs() <= 1e-9, "α={a} n={n}: {} vs {truth}", m.mean);
            }
        }
    }

    /// Var[N^(α)] for N ~ Poisson(λ): Σ_{j=1}^{α} C(α,j)² j! λ^{2α−j}.
    fn poisson_falling_variance(lambda: f64, a: u32) -> f64 {
        (1..=a)
            .map(|j| {
                let c = binomial(a as u64, j as u64);
                let fact: f64 = (1..=j).map(|x| x as f64).product();
                c * c * fact * lambda.powi((2 * a - j) as i32)
            })
            .sum()
    }

    #[test]
    fn poissonized_variance_matches_closed_form() {
        let p = make_distribution(&[0.15, 0.35, 0.5]).unwrap();
        let q = make_distribution(&[0.2, 0.3, 0.5]).unwrap();
        for a in [2u32, 3] {
            for n in [3u64, 6] {
                let m = exact_mean_and_variance(&p, &q, &poissonized(a as f64), n, SamplingModel::Poisson, &tight())
                    .unwrap();
                let nf = n as f64;
                let closed: f64 = p
                    .probs()
                    .iter()
                    .zip(q.probs())
                    .map(|(&pi, &qi)| {
                        qi.powf(2.0 - 2.0 * a as f64) * poisson_falling_variance(nf * pi, a) / nf.powi(2 * a as i32)
                    })
                    .sum();
                assert!((m.variance - closed).abs() <= 1e-9 * closed, "α={a} n={n}");
                assert!(m.variance <= variance_bound(&p, &q, ord(a as f64), n).unwrap());
            }
        }
    }

    #[test]
    fn variance_bound_expansion_matches_per_symbol_form() {
        let p = make_distribution(&[0.1, 0.6, 0.3]).unwrap();
        let q = make_distribution(&[0.25, 0.25, 0.5]).unwrap();
        for a in [2u32, 3, 4] {
            for n in [1u64, 10, 1000] {
                let nf = n as f64;
                let af = a as f64;
                let per_symbol: f64 = p
                    .probs()
                    .iter()
                    .zip(q.probs())
                    .map(|(&pi, &qi)| {
                        let l = nf * pi;
                        qi.powf(2.0 - 2.0 * af) * l.powf(af) * ((l + af).powf(af) - l.powf(af)) / nf.powf(2.0 * af)
                    })
                    .sum();
                let bound = variance_bound(&p, &q, ord(af), n).unwrap();
                assert!((bound - per_symbol).abs() <= 1e-10 * per_symbol, "α={a} n={n}");
            }
        }
    }

    #[test]
    fn displayed_sum_is_half_the_exact_variance_for_order_two() {
        // Without the α^{α−r} factors the sum undershoots the true variance:
        // for α = 2 the exact Poissonized variance is exactly twice it.
        let p = make_distribution(&[0.15, 0.35, 0.5]).unwrap();
        let q = make_distribution(&[0.2, 0.3, 0.5]).unwrap();
        let n = 6;
        let m = exact_mean_and_variance(&p, &q, &poissonized(2.0), n, SamplingModel::Poisson, &tight()).unwrap();
        let big_m = power_sum(&p, &q, ord(2.0)).unwrap().value();
        let displayed = theorem1_condition(&p, &q, ord(2.0), n).unwrap() * big_m * big_m;
        assert!((m.variance / displayed - 2.0).abs() < 1e-9);
    }

    #[test]
    fn variance_bound_monotonicity() {
        let p = make_distribution(&[0.2, 0.3, 0.5]).unwrap();
        let q = Distribution::uniform(3).unwrap();
        let mut prev = f64::INFINITY;
        for n in 1..100 {
            let b = variance_bound(&p, &q, ord(3.0), n).unwrap();
            assert!(b < prev);
            prev = b;
        }
        let mut prev = 0.0;
        for c in [1.0, 2.0, 3.0, 4.0, 6.0] {
            let q = crate::dist::Family::Spike { k: 8, exponent: c, position: 0 }.generate().unwrap();
            let b = variance_bound(&p_on(8), &q, ord(2.0), 50).unwrap();
            assert!(b > prev, "c = {c}");
            prev = b;
        }
        assert!(variance_bound(&p, &q, ord(2.5), 10).is_err());
    }

    fn p_on(k: usize) -> Distribution {
        Distribution::uniform(k).unwrap()
    }

    #[test]
    fn failure_probability_boundaries() {
        let p = Distribution::uniform(2).unwrap();
        let b = EnumerationBudget::default();
        let f = exact_failure_probability(&p, &p, &exact(2.0), 4, SamplingModel::FixedN, 1e6, &b).unwrap();
        assert_eq!(f, 0.0);
        // δ = 0: only the (3,1) and (1,3) outcomes hit D = 0 exactly
        let f0 = exact_failure_probability(&p, &p, &exact(2.0), 4, SamplingModel::FixedN, 0.0, &b).unwrap();
        assert!((f0 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pinned_failure_probability() {
        // n = 4 fair coin, α = 2, δ = 0.5 bits: (4,0),(0,4) give D̂ = 1 and
        // (2,2) gives log2(2/3); both miss, total mass (1 + 1 + 6)/16
        let p = Distribution::uniform(2).unwrap();
        let f =
            exact_failure_probability(&p, &p, &exact(2.0), 4, SamplingModel::FixedN, 0.5, &Default::default()).unwrap();
        assert!((f - 0.5).abs() < 1e-15);
    }

    #[test]
    fn undefined_outcomes_count_as_failures() {
        // n = 1 < α: every outcome is undefined
        let p = Distribution::uniform(3).unwrap();
        let f = exact_failure_probability(&p, &p, &exact(2.0), 1, SamplingModel::FixedN, 100.0, &Default::default())
            .unwrap();
        assert!((f - 1.0).abs() < 1e-15);
    }

    #[test]
    fn corrected_beats_plugin_bias_on_spikes() {
        let a = ord(2.0);
        let q = crate::dist::Family::Spike { k: 3, exponent: 2.0, position: 0 }.generate().unwrap();
        let p = crate::dist::Family::Spike { k: 3, exponent: 1.0, position: 0 }.generate().unwrap();
        let truth = power_sum(&p, &q, a).unwrap().value();
        for n in [2u64, 5, 10, 30] {
            let b = EnumerationBudget::default();
            let c = exact_mean_and_variance(&p, &q, &exact(2.0), n, SamplingModel::FixedN, &b).unwrap();
            let pl =
                exact_mean_and_variance(&p, &q, &EstimatorConfig::plugin(a), n, SamplingModel::FixedN, &b).unwrap();
            assert!((c.mean - truth).abs() < (pl.mean - truth).abs(), "n={n}");
        }
    }
}
