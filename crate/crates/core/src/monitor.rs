//! Sliding-window divergence monitor for symbol streams.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::dist::Distribution;
use crate::divergence::DivergenceOrder;
use crate::estimators::{estimate_divergence, EstimatorConfig, Histogram, Normalization};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorConfig {
    pub window: usize,
    pub stride: usize,
    /// Alarm when the windowed estimate exceeds this many bits.
    pub threshold: f64,
    pub alpha: f64,
}

impl MonitorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window == 0 || self.stride == 0 || self.stride > self.window {
            return Err(Error::Config(format!(
                "need 1 <= stride <= window, got stride {} and window {}",
                self.stride, self.window
            )));
        }
        if !(self.threshold >= 0.0) || !self.threshold.is_finite() {
            return Err(Error::Config(format!("threshold {} must be >= 0", self.threshold)));
        }
        Ok(())
    }
}

/// One emitted score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonitorRecord {
    /// Number of stream items consumed so far, invalid ones included.
    pub position: u64,
    /// `None` when the window histogram leaves the estimate undefined.
    pub estimate_bits: Option<f64>,
    pub alarm: bool,
    /// Out-of-alphabet items skipped since the previous record.
    pub invalid_symbols: u64,
}

/// Scores the most recent `window` valid symbols against a reference,
/// every `stride` symbols. Undefined estimates raise an alarm.
#[derive(Debug, Clone)]
pub struct StreamMonitor {
    reference: Distribution,
    config: MonitorConfig,
    estimator: EstimatorConfig,
    window: VecDeque<usize>,
    counts: Vec<u64>,
    position: u64,
    since_record: usize,
    invalid: u64,
    emitted_any: bool,
}

impl StreamMonitor {
    pub fn new(reference: Distribution, config: MonitorConfig) -> Result<Self> {
        config.validate()?;
        reference.check_strictly_positive()?;
        let estimator = EstimatorConfig::corrected(DivergenceOrder::new(config.alpha)?, Normalization::Exact)?;
        let k = reference.k();
        Ok(Self {
            reference,
            config,
            estimator,
            window: VecDeque::with_capacity(config.window),
            counts: vec![0; k],
            position: 0,
            since_record: 0,
            invalid: 0,
            emitted_any: false,
        })
    }

    /// Consumes one stream item, returning a record when one is due.
    pub fn push(&mut self, symbol: u64) -> Result<Option<MonitorRecord>> {
        self.position += 1;
        let k = self.counts.len();
        if symbol >= k as u64 {
            self.invalid += 1;
            return Ok(None);
        }
        let s = symbol as usize;
        self.window.push_back(s);
        self.counts[s] += 1;
        if self.window.len() > self.config.window {
            let old = self.window.pop_front().expect("window is non-empty");
            self.counts[old] -= 1;
        }
        if self.window.len() < self.config.window {
            return Ok(None);
        }
        self.since_record += 1;
        let due = if self.emitted_any { self.since_record == self.config.stride } else { true };
        if !due {
            return Ok(None);
        }
        self.since_record = 0;
        self.emitted_any = true;
        let h = Histogram::from_counts(self.counts.clone());
        let estimate = estimate_divergence(&h, &self.reference, &self.estimator)?;
        let alarm = estimate.bits().is_none_or(|b| b > self.config.threshold);
        let record = MonitorRecord {
            position: self.position,
            estimate_bits: estimate.bits(),
            alarm,
            invalid_symbols: std::mem::take(&mut self.invalid),
        };
        Ok(Some(record))
    }

    /// Runs the monitor over a whole stream.
    pub fn run(&mut self, symbols: impl IntoIterator<Item = u64>) -> Result<Vec<MonitorRecord>> {
        let mut out = Vec::new();
        for s in symbols {
            if let Some(r) = self.push(s)? {
                out.push(r);
            }
        }
        Ok(out)
    }
}

/// Position of the first alarm strictly after `change_point`, if any.
pub fn first_alarm_after(records: &[MonitorRecord], change_point: u64) -> Option<u64> {
    records.iter().find(|r| r.alarm && r.position > change_point).map(|r| r.position)
}

/// A stream of `before` symbols from `q` followed by `after` from `p`.
pub fn change_point_stream(q: &Distribution, p: &Distribution, before: usize, after: usize, seed: u64) -> Vec<u64> {
    let mut rng = crate::dist::rng_from_seed(seed);
    let mut out = Vec::with_capacity(before + after);
    out.extend((0..before).map(|_| q.sample_symbol(&mut rng) as u64));
    out.extend((0..after).map(|_| p.sample_symbol(&mut rng) as u64));
    out
}
