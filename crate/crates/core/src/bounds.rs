//! Sample-complexity bounds and the witness constructions behind the lower
//! bounds.
//!
//! Upper side: the sufficient condition
//!
//! ```text
//! Σ_{r=0}^{α−1} C(α,r) n^{−(α−r)} · Σ_i p_i^{α+r} q_i^{2−2α} / M_α(p,q)²  ≤  slack · ε · δ²
//! ```
//!
//! Lower side: for a multiplicative perturbation `δ'` of `p` with magnitude
//! `δ = Σ p_i |δ'_i|` and weights `w_i = p_i^α q_i^{1−α} / M_α(p,q)`,
//!
//! ```text
//! C1 = α · Σ δ'_i w_i / δ          C2 = α(α−1)/4 · Σ δ'_i² w_i / δ²
//! ```
//!
//! and any estimator needs on the order of `max(√C2, C1)` samples.

use serde::{Deserialize, Serialize};

use crate::dist::{total_variation, Distribution, Family, PerturbationVector};
use crate::divergence::{check_pair, power_sum, renyi_divergence, DivergenceOrder};
use crate::numeric::{binomial, log_sum_exp};
use crate::{Error, Result};

/// Default interpretation of "much smaller than" in the sufficient condition.
pub const DEFAULT_SLACK: f64 = 0.25;

/// Terms of the sufficient-condition sum at (possibly fractional) `n`,
/// indexed by `r = 0..α`.
fn theorem1_terms(p: &Distribution, q: &Distribution, ord: DivergenceOrder, n: f64) -> Result<Vec<f64>> {
    let a = ord.integer()?;
    if a < 2 {
        return Err(Error::NonIntegerOrder(ord.alpha()));
    }
    check_pair(p, q)?;
    let ln_m = power_sum(p, q, ord)?.ln();
    let alpha = a as f64;
    let ln_n = n.ln();
    let terms = (0..a)
        .map(|r| {
            let ln_moment: Vec<f64> = p
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
            let ln_term =
                binomial(a as u64, r as u64).ln() - (alpha - r as f64) * ln_n + log_sum_exp(&ln_moment) - 2.0 * ln_m;
            ln_term.exp()
        })
        .collect();
    Ok(terms)
}

/// Left-hand side of the sufficient sample-count condition at `n` samples.
pub fn theorem1_condition(p: &Distribution, q: &Distribution, ord: DivergenceOrder, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroSamples);
    }
    Ok(theorem1_terms(p, q, ord, n as f64)?.iter().sum())
}

/// Smallest `n` with `theorem1_condition(n) ≤ slack · ε · δ²`, found by
/// doubling then bisection. Saturates at `u64::MAX`.
pub fn sufficient_n(
    p: &Distribution,
    q: &Distribution,
    ord: DivergenceOrder,
    delta: f64,
    epsilon: f64,
    slack: f64,
) -> Result<u64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::Domain(format!("accuracy {delta} must be > 0")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("error probability {epsilon} must be in (0, 1)")));
    }
    if !(slack > 0.0) || !slack.is_finite() {
        return Err(Error::Domain(format!("slack {slack} must be > 0")));
    }
    let target = slack * epsilon * delta * delta;
    let lhs = |n: u64| -> Result<f64> { Ok(theorem1_terms(p, q, ord, n as f64)?.iter().sum()) };
    if lhs(1)? <= target {
        return Ok(1);
    }
    let mut hi: u64 = 2;
    while lhs(hi)? > target {
        if hi >= 1 << 62 {
            return Ok(u64::MAX);
        }
        hi *= 2;
    }
    // invariant: lhs(lo) > target >= lhs(hi)
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if lhs(mid)? <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// The two lower-bound constants; `c1` is clamped at zero and the signed
/// value is kept in `c1_raw`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundConstants {
    pub c1: f64,
    pub c1_raw: f64,
    pub c2: f64,
}

impl LowerBoundConstants {
    /// `max(√C2, C1)`, reported without any hidden constant.
    pub fn implied_n(&self) -> f64 {
        self.c2.sqrt().max(self.c1)
    }
}

pub fn lower_bound_constants(
    p: &Distribution,
    q: &Distribution,
    ord: DivergenceOrder,
    v: &PerturbationVector,
) -> Result<LowerBoundConstants> {
    check_pair(p, q)?;
    v.validate_against(p)?;
    let delta = v.magnitude();
    if delta <= 0.0 {
        return Err(Error::InvalidPerturbation("zero magnitude".into()));
    }
    let alpha = ord.alpha();
    let ln_m = power_sum(p, q, ord)?.ln();
    let (mut first, mut second) = (0.0, 0.0);
    for ((&pi, &qi), &d) in p.probs().iter().zip(q.probs()).zip(v.deltas()) {
        if pi == 0.0 {
            continue;
        }
        let w = (alpha * pi.ln() + (1.0 - alpha) * qi.ln() - ln_m).exp();
        first += d * w;
        second += d * d * w;
    }
    let c1_raw = alpha * first / delta;
    let c2 = alpha * (alpha - 1.0) / 4.0 * second / (delta * delta);
    Ok(LowerBoundConstants { c1: c1_raw.max(0.0), c1_raw, c2 })
}

/// Shrinks `δ'` by `min(1, 1/(2·max|δ'_i|))`. This keeps every entry in
/// `[−1/2, 1/2]`, so the perturbed masses stay within `[p_i/2, 3p_i/2]`.
fn scale_into_range(deltas: Vec<f64>) -> Vec<f64> {
    let max = deltas.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let factor = if max > 0.0 { (1.0 / (2.0 * max)).min(1.0) } else { 1.0 };
    deltas.into_iter().map(|d| d * factor).collect()
}

/// Raises the mass of `index` by half and lowers every other symbol by the
/// same relative amount, balanced so that `Σ δ'_i p_i = 0`; then scaled into
/// range.
pub fn spike_perturbation(p: &Distribution, index: usize) -> Result<PerturbationVector> {
    let pi = *p.probs().get(index).ok_or_else(|| Error::InvalidPerturbation(format!("index {index} out of range")))?;
    if pi <= 0.0 || pi >= 1.0 {
        return Err(Error::InvalidPerturbation(format!("mass {pi} at index {index} cannot be perturbed")));
    }
    let rest = -pi / (2.0 * (1.0 - pi));
    let deltas = (0..p.k()).map(|i| if i == index { 0.5 } else { rest }).collect();
    PerturbationVector::new(p, scale_into_range(deltas))
}

/// Evaluated bounds for one instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem1_lhs: f64,
    pub sufficient_n: u64,
    pub c1: f64,
    pub c1_raw: f64,
    pub c2: f64,
    pub lower_n: f64,
}

/// Upper-bound quantities at `n` together with the lower-bound constants for
/// the perturbation `v` of `p`.
#[allow(clippy::too_many_arguments)]
pub fn bound_report(
    p: &Distribution,
    q: &Distribution,
    ord: DivergenceOrder,
    n: u64,
    delta: f64,
    epsilon: f64,
    slack: f64,
    v: &PerturbationVector,
) -> Result<BoundReport> {
    let constants = lower_bound_constants(p, q, ord, v)?;
    Ok(BoundReport {
        theorem1_lhs: theorem1_condition(p, q, ord, n)?,
        sufficient_n: sufficient_n(p, q, ord, delta, epsilon, slack)?,
        c1: constants.c1,
        c1_raw: constants.c1_raw,
        c2: constants.c2,
        lower_n: constants.implied_n(),
    })
}

/// Two distributions close in total variation whose divergences to `q`
/// differ, certifying a lower bound on the sample count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessPair {
    pub p: Distribution,
    pub p_prime: Distribution,
    pub q: Distribution,
    pub tv: f64,
    pub divergence_gap: f64,
    pub implied_n: f64,
}

impl WitnessPair {
    /// `|D_α(p‖q) − D_α(p′‖q)|` recomputed from the stored distributions.
    pub fn recompute_gap(&self, ord: DivergenceOrder) -> Result<f64> {
        Ok((renyi_divergence(&self.p, &self.q, ord)? - renyi_divergence(&self.p_prime, &self.q, ord)?).abs())
    }
}

/// Uniform `p` against `q`, perturbed towards the symbol where `q` is
/// smallest: `δ'_{i0} = k/4` and `−k/(4(k−1))` elsewhere, then scaled into
/// range. The constants are scale invariant, so only `p′` depends on the
/// scaling.
pub fn witness_pair_uniform(q: &Distribution, ord: DivergenceOrder) -> Result<WitnessPair> {
    q.check_strictly_positive()?;
    let k = q.k();
    let p = Distribution::uniform(k)?;
    let i0 = q.argmin();
    let up = k as f64 / 4.0;
    let down = -(k as f64) / (4.0 * (k as f64 - 1.0));
    let raw = (0..k).map(|i| if i == i0 { up } else { down }).collect();
    let v = PerturbationVector::new(&p, scale_into_range(raw))?;
    let p_prime = p.perturb(&v)?;
    let constants = lower_bound_constants(&p, q, ord, &v)?;
    let tv = total_variation(&p, &p_prime)?;
    let divergence_gap = (renyi_divergence(&p, q, ord)? - renyi_divergence(&p_prime, q, ord)?).abs();
    debug_assert!(divergence_gap > 0.0);
    Ok(WitnessPair { p, p_prime, q: q.clone(), tv, divergence_gap, implied_n: constants.implied_n() })
}

/// Spike reference with its matching spike `p` and the implied lower bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpikeWitness {
    pub p: Distribution,
    pub q: Distribution,
    /// `q` puts mass `k^-c` on symbol 0.
    pub c: f64,
    /// `p` puts mass `k^-d` on symbol 0, `d = c(α−1)/α`.
    pub d: f64,
    pub c1: f64,
    pub c2: f64,
    pub implied_n: f64,
}

pub fn witness_instance_spike(k: usize, c: f64, ord: DivergenceOrder) -> Result<SpikeWitness> {
    if k < 2 {
        return Err(Error::TooFewSymbols(k));
    }
    if !c.is_finite() || c <= 0.0 || (k as f64).powf(-c) >= 0.5 {
        return Err(Error::InvalidFamily(format!("spike exponent {c} needs k^-c < 1/2 (k = {k})")));
    }
    let alpha = ord.alpha();
    let d = c * (alpha - 1.0) / alpha;
    let q = Family::Spike { k, exponent: c, position: 0 }.generate()?;
    let p = Family::Spike { k, exponent: d, position: 0 }.generate()?;
    let v = spike_perturbation(&p, 0)?;
    let constants = lower_bound_constants(&p, &q, ord, &v)?;
    Ok(SpikeWitness { p, q, c, d, c1: constants.c1, c2: constants.c2, implied_n: constants.implied_n() })
}

/// Sample count below which two distributions at total variation `tv` cannot
/// be told apart with advantage `1 − 2ε`: `(1 − 2ε) / tv`.
pub fn separation_samples(tv: f64, epsilon: f64) -> f64 {
    (1.0 - 2.0 * epsilon) / tv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::make_distribution;
    use crate::numeric::loglog_slope;

    fn ord(a: f64) -> DivergenceOrder {
        DivergenceOrder::new(a).unwrap()
    }

    /// Direct double loop over r and i with plain powers; no log space.
    fn theorem1_direct(p: &[f64], q: &[f64], alpha: u32, n: f64) -> f64 {
        let a = alpha as f64;
        let m: f64 = p.iter().zip(q).map(|(p, q)| p.powf(a) * q.powf(1.0 - a)).sum();
        let mut total = 0.0;
        for r in 0..alpha {
            let s: f64 = p.iter().zip(q).map(|(p, q)| p.powf(a + r as f64) / q.powf(2.0 * a - 2.0)).sum();
            total += binomial(alpha as u64, r as u64) * n.powf(-(a - r as f64)) * s / (m * m);
        }
        total
    }

    #[test]
    fn theorem1_uniform_closed_form() {
        // p = q uniform, α = 2: Σp²/q² = k, Σp³/q² = 1, M = 1 ⇒ k/n² + 2/n
        for k in [2usize, 5, 64] {
            let u = Distribution::uniform(k).unwrap();
            for n in [1u64, 3, 10, 1000] {
                let lhs = theorem1_condition(&u, &u, ord(2.0), n).unwrap();
                let closed = k as f64 / (n * n) as f64 + 2.0 / n as f64;
                assert!((lhs - closed).abs() <= 1e-12 * closed, "k={k} n={n}");
                let direct = theorem1_direct(u.probs(), u.probs(), 2, n as f64);
                assert!((lhs - direct).abs() <= 1e-12 * direct);
            }
        }
    }

    #[test]
    fn theorem1_matches_direct_summation() {
        let p = make_distribution(&[0.1, 0.3, 0.05, 0.55]).unwrap();
        let q = make_distribution(&[0.4, 0.1, 0.2, 0.3]).unwrap();
        for alpha in [2u32, 3, 4] {
            for n in [1u64, 7, 100] {
                let lhs = theorem1_condition(&p, &q, ord(alpha as f64), n).unwrap();
                let direct = theorem1_direct(p.probs(), q.probs(), alpha, n as f64);
                assert!((lhs - direct).abs() <= 1e-12 * direct);
            }
        }
    }

    #[test]
    fn theorem1_monotone_and_positive() {
        let p = make_distribution(&[0.2, 0.5, 0.3]).unwrap();
        for alpha in [2.0, 3.0] {
            let q = make_distribution(&[0.3, 0.3, 0.4]).unwrap();
            let mut prev = f64::INFINITY;
            for n in 1..200u64 {
                let lhs = theorem1_condition(&p, &q, ord(alpha), n).unwrap();
                assert!(lhs > 0.0 && lhs < prev);
                let doubled = theorem1_condition(&p, &q, ord(alpha), 2 * n).unwrap();
                assert!(lhs / doubled >= 2.0 - 1e-12);
                prev = lhs;
            }
        }
        assert!(theorem1_condition(&p, &p, ord(2.5), 10).is_err());
        assert!(theorem1_condition(&p, &p, ord(2.0), 0).is_err());
    }

    #[test]
    fn theorem1_saturates_as_reference_mass_shrinks() {
        // The condition is relative: once q_0 dominates both the power sum and
        // the variance sum, the ratio tends to Σ_r C(2,r) n^{r−2} p_0^{r−2}.
        let p = make_distribution(&[0.25, 0.25, 0.5]).unwrap();
        let n = 50.0;
        let limit = 1.0 / (n * n * 0.25 * 0.25) + 2.0 / (n * 0.25);
        let q0 = 1e-7;
        let q = Distribution::new(vec![q0, (1.0 - q0) / 2.0, (1.0 - q0) / 2.0]).unwrap();
        let lhs = theorem1_condition(&p, &q, ord(2.0), 50).unwrap();
        assert!((lhs / limit - 1.0).abs() < 1e-5, "{lhs} vs {limit}");
    }

    #[test]
    fn sufficient_n_is_minimal() {
        let p = make_distribution(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        let q = Distribution::uniform(4).unwrap();
        let (delta, eps, slack) = (0.5, 1.0 / 3.0, DEFAULT_SLACK);
        let n = sufficient_n(&p, &q, ord(2.0), delta, eps, slack).unwrap();
        let target = slack * eps * delta * delta;
        assert!(theorem1_condition(&p, &q, ord(2.0), n).unwrap() <= target);
        assert!(theorem1_condition(&p, &q, ord(2.0), n - 1).unwrap() > target);
        assert!(sufficient_n(&p, &q, ord(2.0), 0.0, eps, slack).is_err());
        assert!(sufficient_n(&p, &q, ord(2.0), delta, 1.0, slack).is_err());
        assert!(sufficient_n(&p, &q, ord(2.0), delta, eps, -1.0).is_err());
    }

    #[test]
    fn sufficient_n_slack_sensitivity_is_bounded() {
        // the slowest term decays like 1/n, so dividing the slack by 16
        // multiplies the answer by at most 16
        let q = Distribution::uniform(32).unwrap();
        for seed in 0..10 {
            let p = Family::AlmostUniform { k: 32, ratio: 3.0, seed }.generate().unwrap();
            let loose = sufficient_n(&p, &q, ord(2.0), 0.5, 0.3, 1.0).unwrap();
            let tight = sufficient_n(&p, &q, ord(2.0), 0.5, 0.3, 1.0 / 16.0).unwrap();
            assert!(tight >= loose && tight <= 16 * loose + 1, "{loose} {tight}");
        }
    }

    #[test]
    fn sufficient_n_square_root_scaling_for_uniform_reference() {
        // worst case over a sample of almost uniform p, per k
        let ks: Vec<usize> = (6..=12).map(|e| 1usize << e).collect();
        let ns: Vec<f64> = ks
            .iter()
            .map(|&k| {
                let q = Distribution::uniform(k).unwrap();
                (0..8)
                    .map(|seed| {
                        let p = Family::AlmostUniform { k, ratio: 2.0, seed }.generate().unwrap();
                        sufficient_n(&p, &q, ord(2.0), 1.0, 1.0 / 3.0, 1.0).unwrap()
                    })
                    .max()
                    .unwrap() as f64
            })
            .collect();
        let ks_f: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
        let slope = loglog_slope(&ks_f, &ns);
        assert!((slope - 0.5).abs() <= 0.1, "slope {slope}");
    }

    #[test]
    fn spike_reference_needs_superlinear_samples() {
        let a = ord(2.0);
        for e in 8..=12 {
            let k = 1usize << e;
            let q = Family::Spike { k, exponent: 3.0, position: 0 }.generate().unwrap();
            let p = Family::Spike { k, exponent: 1.5, position: 0 }.generate().unwrap();
            let n = sufficient_n(&p, &q, a, 0.5, 1.0 / 3.0, DEFAULT_SLACK).unwrap();
            assert!(n as f64 > (k as f64).powf(1.2), "k={k} n={n}");
        }
    }

    #[test]
    fn lower_bound_constants_hand_example() {
        let p = Distribution::uniform(4).unwrap();
        let third = 1.0 / 3.0;
        let v = PerturbationVector::new(&p, vec![1.0, -third, -third, -third]).unwrap();
        let c = lower_bound_constants(&p, &p, ord(2.0), &v).unwrap();
        assert!(c.c1_raw.abs() < 1e-15);
        assert_eq!(c.c1, c.c1_raw.max(0.0));
        // (2·1/4) · (1 + 3/9)/4 · 4
        assert!((c.c2 - 2.0 / 3.0).abs() < 1e-14);
        let zero = PerturbationVector::new(&p, vec![0.0; 4]).unwrap();
        assert!(lower_bound_constants(&p, &p, ord(2.0), &zero).is_err());
    }

    #[test]
    fn lower_bound_constants_are_scale_invariant() {
        let p = make_distribution(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        let q = make_distribution(&[0.05, 0.25, 0.3, 0.4]).unwrap();
        let v = spike_perturbation(&p, 0).unwrap();
        let a = lower_bound_constants(&p, &q, ord(3.0), &v).unwrap();
        let b = lower_bound_constants(&p, &q, ord(3.0), &v.scaled(&p, 0.1).unwrap()).unwrap();
        assert!((a.c1_raw - b.c1_raw).abs() <= 1e-12 * a.c1_raw.abs());
        assert!((a.c2 - b.c2).abs() <= 1e-12 * a.c2);
    }

    #[test]
    fn uniform_witness_two_symbols() {
        let q = Distribution::uniform(2).unwrap();
        let w = witness_pair_uniform(&q, ord(2.0)).unwrap();
        assert_eq!(w.p.probs(), &[0.5, 0.5]);
        assert!((w.p_prime.probs()[0] - 0.75).abs() < 1e-15);
        assert!((w.p_prime.probs()[1] - 0.25).abs() < 1e-15);
        assert!((w.divergence_gap - 1.25f64.log2()).abs() < 1e-12);
        assert!((w.recompute_gap(ord(2.0)).unwrap() - w.divergence_gap).abs() < 1e-12);
        assert_eq!(w.tv, total_variation(&w.p, &w.p_prime).unwrap());
    }

    #[test]
    fn uniform_witness_matches_spike_perturbation_shape() {
        // after scaling, the k/4 construction equals δ'_{i0} = 1/2 balanced elsewhere
        for k in [3usize, 4, 17, 256] {
            let q = Family::AlmostUniform { k, ratio: 3.0, seed: k as u64 }.generate().unwrap();
            let w = witness_pair_uniform(&q, ord(2.0)).unwrap();
            let v = spike_perturbation(&w.p, q.argmin()).unwrap();
            let alt = w.p.perturb(&v).unwrap();
            for (a, b) in alt.probs().iter().zip(w.p_prime.probs()) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn uniform_witness_lower_bound_on_general_reference() {
        // C2 ≥ const · k² · q_{i0}^{1−α} / Σ q_i^{1−α} ≥ const · k
        let a = ord(2.0);
        for e in 2..=12 {
            let k = 1usize << e;
            let q = Family::AlmostUniform { k, ratio: 4.0, seed: e as u64 }.generate().unwrap();
            let w = witness_pair_uniform(&q, a).unwrap();
            let p = &w.p;
            let i0 = q.argmin();
            let v = spike_perturbation(p, i0).unwrap();
            let c = lower_bound_constants(p, &q, a, &v).unwrap();
            let inv: f64 = q.probs().iter().map(|x| x.powf(-1.0)).sum();
            let share = q.probs()[i0].powf(-1.0) / inv;
            assert!(share >= 1.0 / k as f64);
            // constant for α = 2 and this construction: 1/8
            assert!(c.c2 >= (k * k) as f64 * share / 8.0 * (1.0 - 1e-12), "k={k}");
            assert!(c.c2 >= k as f64 / 8.0);
            assert!(c.c1 >= 0.0);
        }
    }

    #[test]
    fn spike_witness_examples() {
        let w = witness_instance_spike(64, 4.0, ord(2.0)).unwrap();
        assert_eq!(w.d, 2.0);
        assert!(witness_instance_spike(2, 0.5, ord(2.0)).is_err());
        assert!(witness_instance_spike(2, 1.0, ord(2.0)).is_err());
        assert!(witness_instance_spike(64, 0.0, ord(2.0)).is_err());
        // implied_n = Ω(k^d)
        for e in 4..=12 {
            let k = 1usize << e;
            let w = witness_instance_spike(k, 4.0, ord(2.0)).unwrap();
            assert!(w.implied_n >= (k as f64).powf(w.d) / 8.0);
        }
    }

    #[test]
    fn spike_witness_monotone_in_exponent() {
        for alpha in [1.5, 2.0, 3.0] {
            let mut prev = 0.0;
            for i in 1..=40 {
                let c = 0.25 * i as f64;
                let w = witness_instance_spike(256, c, ord(alpha)).unwrap();
                assert!(w.implied_n > prev, "α={alpha} c={c}");
                prev = w.implied_n;
            }
        }
    }

    #[test]
    fn upper_bound_dominates_lower_bound() {
        for e in 2..=14 {
            let k = 1usize << e;
            let q = Distribution::uniform(k).unwrap();
            let w = witness_pair_uniform(&q, ord(2.0)).unwrap();
            for p in [&w.p, &w.p_prime, &q] {
                let n = sufficient_n(p, &q, ord(2.0), 0.5, 1.0 / 3.0, DEFAULT_SLACK).unwrap();
                assert!(n as f64 >= w.implied_n, "k={k}");
            }
        }
    }

    #[test]
    fn bound_report_fields() {
        let p = Distribution::uniform(8).unwrap();
        let q = Distribution::uniform(8).unwrap();
        let v = spike_perturbation(&p, 0).unwrap();
        let r = bound_report(&p, &q, ord(2.0), 100, 0.5, 1.0 / 3.0, DEFAULT_SLACK, &v).unwrap();
        assert!((r.theorem1_lhs - (8.0 / 1e4 + 2.0 / 100.0)).abs() < 1e-15);
        assert_eq!(r.lower_n, r.c2.sqrt().max(r.c1));
        let json = serde_json::to_value(r).unwrap();
        for key in ["theorem1_lhs", "sufficient_n", "c1", "c2", "lower_n"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn separation_samples_formula() {
        assert!((separation_samples(0.01, 1.0 / 3.0) - 100.0 / 3.0).abs() < 1e-12);
    }
}
