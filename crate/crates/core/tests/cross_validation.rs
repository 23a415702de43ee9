//! The enumeration oracle and the samplers must agree wherever both run.

use renyi_core::bounds::{bound_report, spike_perturbation, witness_pair_uniform};
use renyi_core::dist::make_distribution;
use renyi_core::estimators::{estimate_power_sum, Poissonized};
use renyi_core::experiment::monte_carlo_failure;
use renyi_core::oracle::{exact_failure_probability, exact_mean_and_variance, EnumerationBudget, SamplingModel};
use renyi_core::verify::verification_budget;
use renyi_core::{Distribution, DivergenceOrder, EstimatorConfig, HistogramSampler, Normalization};

const TRIALS: u64 = 40_000;

fn ord(a: f64) -> DivergenceOrder {
    DivergenceOrder::new(a).unwrap()
}

fn instances() -> Vec<(Distribution, Distribution)> {
    vec![
        (make_distribution(&[0.2, 0.3, 0.5]).unwrap(), make_distribution(&[0.4, 0.4, 0.2]).unwrap()),
        (make_distribution(&[0.7, 0.1, 0.1, 0.1]).unwrap(), Distribution::uniform(4).unwrap()),
        (Distribution::uniform(2).unwrap(), make_distribution(&[0.9, 0.1]).unwrap()),
    ]
}

/// Sample mean, sample variance and their standard errors.
fn moments(xs: &[f64]) -> (f64, f64, f64, f64) {
    let t = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / t;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / t;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / t;
    (mean, m2, (m2 / t).sqrt(), ((m4 - m2 * m2) / t).sqrt())
}

fn check<S: HistogramSampler>(
    sampler: &S,
    p: &Distribution,
    q: &Distribution,
    cfg: &EstimatorConfig,
    n: u64,
    model: SamplingModel,
    budget: &EnumerationBudget,
) {
    let exact = exact_mean_and_variance(p, q, cfg, n, model, budget).unwrap();
    let xs: Vec<f64> =
        (0..TRIALS).map(|t| estimate_power_sum(&sampler.sample(n, t).unwrap(), q, cfg).unwrap()).collect();
    let (mean, var, se_mean, se_var) = moments(&xs);
    assert!((mean - exact.mean).abs() <= 4.0 * se_mean, "{model:?} n={n}: mean {mean} vs {}", exact.mean);
    assert!((var - exact.variance).abs() <= 4.0 * se_var, "{model:?} n={n}: var {var} vs {}", exact.variance);
}

#[test]
fn fixed_n_moments_agree() {
    let budget = EnumerationBudget::default();
    for (p, q) in instances() {
        for (a, n) in [(2.0, 5), (3.0, 8), (2.0, 20)] {
            let cfg = EstimatorConfig::corrected(ord(a), Normalization::Exact).unwrap();
            check(&p, &p, &q, &cfg, n, SamplingModel::FixedN, &budget);
            let plugin = EstimatorConfig::plugin(ord(a));
            check(&p, &p, &q, &plugin, n, SamplingModel::FixedN, &budget);
        }
    }
}

#[test]
fn poisson_moments_agree() {
    let budget = verification_budget();
    for (p, q) in instances() {
        for (a, n) in [(2.0, 4), (3.0, 6)] {
            let cfg = EstimatorConfig::corrected(ord(a), Normalization::Poissonized).unwrap();
            check(&Poissonized(&p), &p, &q, &cfg, n, SamplingModel::Poisson, &budget);
        }
    }
}

#[test]
fn failure_probabilities_agree() {
    let budget = EnumerationBudget::default();
    for (p, q) in instances() {
        let cfg = EstimatorConfig::corrected(ord(2.0), Normalization::Exact).unwrap();
        for (n, delta) in [(6, 0.3), (15, 0.2)] {
            let exact = exact_failure_probability(&p, &q, &cfg, n, SamplingModel::FixedN, delta, &budget).unwrap();
            let mc = monte_carlo_failure(&p, &q, &cfg, n, delta, TRIALS, |t| t).unwrap().probability();
            let se = (exact * (1.0 - exact) / TRIALS as f64).sqrt().max(1e-9);
            assert!((mc - exact).abs() <= 4.0 * se, "n={n}: {mc} vs {exact}");
        }
    }
}

#[test]
fn reports_serialize_flat() {
    let q = Distribution::uniform(4).unwrap();
    let p = q.clone();
    let v = spike_perturbation(&p, 0).unwrap();
    let report = bound_report(&p, &q, ord(2.0), 100, 0.5, 1.0 / 3.0, 0.25, &v).unwrap();
    let json = serde_json::to_value(report).unwrap();
    let keys: Vec<&str> = json.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys.len(), 6);
    for key in ["theorem1_lhs", "sufficient_n", "c1", "c1_raw", "c2", "lower_n"] {
        assert!(keys.contains(&key), "{key}");
    }

    let pair = witness_pair_uniform(&q, ord(2.0)).unwrap();
    let json = serde_json::to_string(&pair).unwrap();
    let back: renyi_core::WitnessPair = serde_json::from_str(&json).unwrap();
    assert_eq!(back, pair);
    assert!((back.recompute_gap(ord(2.0)).unwrap() - pair.divergence_gap).abs() < 1e-12);
}
