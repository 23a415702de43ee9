//! Exact Rényi divergences, power sums and entropies.
//!
//! Divergences are reported in bits. The power sum is the raw quantity
//! `M_α(p, q) = Σ_i p_i^α q_i^(1−α)`, so that
//! `D_α(p‖q) = log2(M_α(p, q)) / (α − 1)`.
//!
//! Power sums are carried in natural-log form: instances with
//! `q_i = k^-c` for large `c` overflow `f64` long before their logarithm does.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::dist::Distribution;
use crate::numeric::{log_sum_exp, sum_ascending};
use crate::{Error, Result};

/// Below this reference mass, terms are combined in log space.
const LOG_SPACE_MIN_Q: f64 = 1e-100;
/// Largest `|ln term|` summed directly.
const LOG_SPACE_MAX_LN: f64 = 700.0;

/// The order `α > 1` of a divergence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct DivergenceOrder {
    alpha: f64,
    is_integer: bool,
}

impl DivergenceOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 1.0 {
            return Err(Error::InvalidOrder(alpha));
        }
        Ok(Self { alpha, is_integer: alpha.fract() == 0.0 })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn is_integer(&self) -> bool {
        self.is_integer
    }

    /// The order as an integer, or an error if it is not one.
    pub fn integer(&self) -> Result<u32> {
        if self.is_integer && self.alpha <= u32::MAX as f64 {
            Ok(self.alpha as u32)
        } else {
            Err(Error::NonIntegerOrder(self.alpha))
        }
    }
}

impl TryFrom<f64> for DivergenceOrder {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        Self::new(alpha)
    }
}

impl From<DivergenceOrder> for f64 {
    fn from(ord: DivergenceOrder) -> f64 {
        ord.alpha
    }
}

/// A strictly positive power sum, stored as its natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSum {
    ln_value: f64,
}

impl PowerSum {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value <= 0.0 {
            return Err(Error::NonPositivePowerSum(value));
        }
        Ok(Self { ln_value: value.ln() })
    }

    pub fn from_ln(ln_value: f64) -> Result<Self> {
        if ln_value.is_nan() || ln_value == f64::NEG_INFINITY {
            return Err(Error::NonPositivePowerSum(ln_value.exp()));
        }
        Ok(Self { ln_value })
    }

    /// The sum itself; may be `inf` for extreme references.
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }

    pub fn ln(&self) -> f64 {
        self.ln_value
    }

    /// `log2(M) / (α − 1)`.
    pub fn to_divergence(&self, ord: DivergenceOrder) -> f64 {
        self.ln_value / ((ord.alpha - 1.0) * LN_2)
    }
}

/// Combines per-symbol log-terms into `ln Σ exp(term)`: direct ascending
/// summation when every term is representable, max-shifted log-sum-exp
/// otherwise.
pub(crate) fn ln_sum_of_terms(ln_terms: &[f64], force_log_space: bool) -> f64 {
    let representable = ln_terms.iter().all(|t| *t == f64::NEG_INFINITY || t.abs() <= LOG_SPACE_MAX_LN);
    if force_log_space || !representable {
        return log_sum_exp(ln_terms);
    }
    let mut direct: Vec<f64> = ln_terms.iter().map(|t| t.exp()).collect();
    sum_ascending(&mut direct).ln()
}

pub(crate) fn needs_log_space(q: &Distribution) -> bool {
    q.probs().iter().any(|&x| x < LOG_SPACE_MIN_Q)
}

/// `α ln p_i + (1 − α) ln q_i`, with `-inf` where `p_i = 0`.
fn ln_power_sum_terms(p: &Distribution, q: &Distribution, alpha: f64) -> Vec<f64> {
    p.probs()
        .iter()
        .zip(q.probs())
        .map(|(&pi, &qi)| if pi == 0.0 { f64::NEG_INFINITY } else { alpha * pi.ln() + (1.0 - alpha) * qi.ln() })
        .collect()
}

pub(crate) fn check_pair(p: &Distribution, q: &Distribution) -> Result<()> {
    p.check_same_alphabet(q)?;
    q.check_strictly_positive()
}

/// `M_α(p, q) = Σ_i p_i^α q_i^(1−α)`.
pub fn power_sum(p: &Distribution, q: &Distribution, ord: DivergenceOrder) -> Result<PowerSum> {
    check_pair(p, q)?;
    let terms = ln_power_sum_terms(p, q, ord.alpha);
    PowerSum::from_ln(ln_sum_of_terms(&terms, needs_log_space(q)))
}

/// `D_α(p‖q)` in bits.
pub fn renyi_divergence(p: &Distribution, q: &Distribution, ord: DivergenceOrder) -> Result<f64> {
    Ok(power_sum(p, q, ord)?.to_divergence(ord))
}

/// Rényi entropy in bits, via the divergence to the uniform distribution.
pub fn renyi_entropy(p: &Distribution, ord: DivergenceOrder) -> Result<f64> {
    let uniform = Distribution::uniform(p.k())?;
    Ok((p.k() as f64).log2() - renyi_divergence(p, &uniform, ord)?)
}

/// `−log2(Σ p_i^α) / (α − 1)`, evaluated directly.
pub fn renyi_entropy_direct(p: &Distribution, ord: DivergenceOrder) -> f64 {
    let terms: Vec<f64> =
        p.probs().iter().map(|&x| if x == 0.0 { f64::NEG_INFINITY } else { ord.alpha * x.ln() }).collect();
    -ln_sum_of_terms(&terms, false) / ((ord.alpha - 1.0) * LN_2)
}

/// `d = log2(m) / (α − 1)`.
pub fn divergence_from_power_sum(m: f64, ord: DivergenceOrder) -> Result<f64> {
    Ok(PowerSum::new(m)?.to_divergence(ord))
}

/// `m = 2^((α − 1) d)`.
pub fn power_sum_from_divergence(d: f64, ord: DivergenceOrder) -> PowerSum {
    PowerSum { ln_value: (ord.alpha - 1.0) * d * LN_2 }
}

/// First-order additive divergence error (bits) caused by a relative
/// power-sum error `δ_mult`: `δ_mult / ((α − 1) ln 2)`. Requires `|δ_mult| < 1/2`.
pub fn error_conversion(delta_mult: f64, ord: DivergenceOrder) -> Result<f64> {
    if !(delta_mult.abs() < 0.5) {
        return Err(Error::Domain(format!("|{delta_mult}| must be < 1/2")));
    }
    Ok(delta_mult / ((ord.alpha - 1.0) * LN_2))
}

/// Inverse of [`error_conversion`]: `(α − 1) ln 2 · δ_add`. Requires `|δ_add| < 1/2`.
pub fn error_conversion_inverse(delta_add: f64, ord: DivergenceOrder) -> Result<f64> {
    if !(delta_add.abs() < 0.5) {
        return Err(Error::Domain(format!("|{delta_add}| must be < 1/2")));
    }
    Ok(delta_add * (ord.alpha - 1.0) * LN_2)
}
