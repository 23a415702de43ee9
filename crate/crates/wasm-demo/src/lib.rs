//! Browser bindings. Every export returns a JSON string: the payload on
//! success, `{"error": "..."}` otherwise. The plain Rust functions behind
//! them are what the native tests call.

// `!(x > 0.0)` rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

use renyi_core::bounds::{witness_instance_spike, witness_pair_uniform};
use renyi_core::divergence::{power_sum, renyi_divergence};
use renyi_core::estimators::{estimate_divergence, estimate_power_sum};
use renyi_core::experiment::{geometric_grid, monte_carlo_failure, trial_seed, FamilyTemplate};
use renyi_core::{Distribution, DivergenceOrder, EstimatorConfig, Normalization};

/// Caps that keep a single call responsive in a browser tab.
const MAX_K: usize = 1 << 16;
const MAX_TRIALS: u32 = 20_000;
const MAX_WORK: f64 = 5e8;

type DemoResult<T> = Result<T, String>;

fn to_json<T: Serialize>(result: DemoResult<T>) -> String {
    let value = match result {
        Ok(v) => serde_json::to_value(v).unwrap_or_else(|e| serde_json::json!({ "error": e.to_string() })),
        Err(e) => serde_json::json!({ "error": e }),
    };
    value.to_string()
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn instance(k: usize, p: &str, q: &str, ord: DivergenceOrder) -> DemoResult<(Distribution, Distribution)> {
    if !(2..=MAX_K).contains(&k) {
        return Err(format!("k must be between 2 and {MAX_K}"));
    }
    let q = q.parse::<FamilyTemplate>().and_then(|t| t.reference(k)).map_err(err)?;
    let p = p.parse::<FamilyTemplate>().and_then(|t| t.sampled(&q, ord)).map_err(err)?;
    Ok((p, q))
}

fn check_work(trials: u32, n: u64, k: usize) -> DemoResult<()> {
    if trials == 0 || trials > MAX_TRIALS {
        return Err(format!("trials must be between 1 and {MAX_TRIALS}"));
    }
    if trials as f64 * (n as f64 + k as f64) > MAX_WORK {
        return Err("too much work for one call; lower trials, n or k".into());
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct EstimatorSummary {
    pub mean_bits: Option<f64>,
    pub sd_bits: Option<f64>,
    /// Mean of the power-sum estimates, whose expectation is the true power
    /// sum for the corrected estimator.
    pub mean_power_sum: f64,
    pub undefined: u32,
    pub estimates_bits: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct Comparison {
    pub truth_bits: f64,
    pub truth_power_sum: f64,
    pub corrected: EstimatorSummary,
    pub plugin: EstimatorSummary,
}

fn summarize(bits: Vec<Option<f64>>, sums: &[f64]) -> EstimatorSummary {
    let defined: Vec<f64> = bits.iter().flatten().copied().collect();
    let undefined = (bits.len() - defined.len()) as u32;
    let (mean_bits, sd_bits) = if defined.is_empty() {
        (None, None)
    } else {
        let m = defined.iter().sum::<f64>() / defined.len() as f64;
        let v = defined.iter().map(|x| (x - m).powi(2)).sum::<f64>() / defined.len() as f64;
        (Some(m), Some(v.sqrt()))
    };
    EstimatorSummary {
        mean_bits,
        sd_bits,
        mean_power_sum: sums.iter().sum::<f64>() / sums.len() as f64,
        undefined,
        estimates_bits: defined,
    }
}

/// Runs the corrected (exact normalization) and plug-in estimators on the
/// same histograms.
pub fn compare(k: usize, p: &str, q: &str, alpha: u32, n: u64, trials: u32, seed: u64) -> DemoResult<Comparison> {
    let ord = DivergenceOrder::new(alpha as f64).map_err(err)?;
    let (p, q) = instance(k, p, q, ord)?;
    check_work(trials, n, k)?;
    let corrected = EstimatorConfig::corrected(ord, Normalization::Exact).map_err(err)?;
    let plugin = EstimatorConfig::plugin(ord);
    let (mut cb, mut pb, mut cs, mut ps) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for t in 0..trials as u64 {
        let h = p.sample_histogram(n, trial_seed(seed, k, t)).map_err(err)?;
        cb.push(estimate_divergence(&h, &q, &corrected).map_err(err)?.bits());
        pb.push(estimate_divergence(&h, &q, &plugin).map_err(err)?.bits());
        cs.push(estimate_power_sum(&h, &q, &corrected).map_err(err)?);
        ps.push(estimate_power_sum(&h, &q, &plugin).map_err(err)?);
    }
    Ok(Comparison {
        truth_bits: renyi_divergence(&p, &q, ord).map_err(err)?,
        truth_power_sum: power_sum(&p, &q, ord).map_err(err)?.value(),
        corrected: summarize(cb, &cs),
        plugin: summarize(pb, &ps),
    })
}

#[derive(Debug, Serialize)]
pub struct ScalingPoint {
    pub k: usize,
    /// Lower-bound sample count for a uniform reference.
    pub uniform: f64,
    /// Lower-bound sample count for a spike reference with mass `k^-c`.
    pub spike: f64,
}

pub fn scaling(log2_k_min: u32, log2_k_max: u32, alpha: u32, c: f64) -> DemoResult<Vec<ScalingPoint>> {
    if log2_k_min < 1 || log2_k_max > 20 || log2_k_min > log2_k_max {
        return Err("need 1 <= log2 k_min <= log2 k_max <= 20".into());
    }
    let ord = DivergenceOrder::new(alpha as f64).map_err(err)?;
    (log2_k_min..=log2_k_max)
        .map(|e| {
            let k = 1usize << e;
            Ok(ScalingPoint {
                k,
                uniform: witness_pair_uniform(&Distribution::uniform(k).map_err(err)?, ord).map_err(err)?.implied_n,
                spike: witness_instance_spike(k, c, ord).map_err(err)?.implied_n,
            })
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct FailurePoint {
    pub n: u64,
    pub corrected: f64,
    pub plugin: f64,
}

/// Failure probability against `n` on a grid with ratio `2^(1/4)`.
#[allow(clippy::too_many_arguments)]
pub fn failure(
    k: usize,
    p: &str,
    q: &str,
    alpha: u32,
    delta: f64,
    n_min: u64,
    n_max: u64,
    trials: u32,
    seed: u64,
) -> DemoResult<Vec<FailurePoint>> {
    let ord = DivergenceOrder::new(alpha as f64).map_err(err)?;
    let (p, q) = instance(k, p, q, ord)?;
    if n_min < 1 || n_max < n_min {
        return Err("need 1 <= n_min <= n_max".into());
    }
    if !(delta > 0.0) {
        return Err("delta must be > 0".into());
    }
    let grid = geometric_grid(n_min, n_max, 2f64.powf(0.25));
    check_work(trials, grid.iter().sum::<u64>(), k * grid.len())?;
    let corrected = EstimatorConfig::corrected(ord, Normalization::Exact).map_err(err)?;
    let plugin = EstimatorConfig::plugin(ord);
    grid.into_iter()
        .map(|n| {
            let seeds = |t| trial_seed(seed, k, t);
            Ok(FailurePoint {
                n,
                corrected: monte_carlo_failure(&p, &q, &corrected, n, delta, trials as u64, seeds)
                    .map_err(err)?
                    .probability(),
                plugin: monte_carlo_failure(&p, &q, &plugin, n, delta, trials as u64, seeds)
                    .map_err(err)?
                    .probability(),
            })
        })
        .collect()
}

/// Corrected versus plug-in estimates on repeated samples.
#[wasm_bindgen]
pub fn compare_estimators(k: usize, p: &str, q: &str, alpha: u32, n: u64, trials: u32, seed: u64) -> String {
    to_json(compare(k, p, q, alpha, n, trials, seed))
}

/// Lower-bound sample counts against alphabet size.
#[wasm_bindgen]
pub fn lower_bound_scaling(log2_k_min: u32, log2_k_max: u32, alpha: u32, c: f64) -> String {
    to_json(scaling(log2_k_min, log2_k_max, alpha, c))
}

/// Empirical failure probability of both estimators against sample size.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn failure_curve(
    k: usize,
    p: &str,
    q: &str,
    alpha: u32,
    delta: f64,
    n_min: u64,
    n_max: u64,
    trials: u32,
    seed: u64,
) -> String {
    to_json(failure(k, p, q, alpha, delta, n_min, n_max, trials, seed))
}
