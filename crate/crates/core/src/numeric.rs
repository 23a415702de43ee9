//! Small numerical helpers shared across modules.

use std::cmp::Ordering;

/// Sums `values` in order of increasing magnitude.
pub fn sum_ascending(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap_or(Ordering::Equal));
    values.iter().sum()
}

/// `ln Σ exp(x_i)` with the maximum shifted out. Terms equal to `-inf`
/// contribute nothing; an empty or all `-inf` input returns `-inf`.
pub fn log_sum_exp(ln_terms: &[f64]) -> f64 {
    let max = ln_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let mut shifted: Vec<f64> = ln_terms.iter().filter(|t| **t > f64::NEG_INFINITY).map(|t| (t - max).exp()).collect();
    max + sum_ascending(&mut shifted).ln()
}

pub fn ln_factorial(m: u64) -> f64 {
    // exact summation is fine for the sizes enumerated here
    if m < 2 {
        return 0.0;
    }
    (2..=m).map(|i| (i as f64).ln()).sum()
}

/// Binomial coefficient as a float.
pub fn binomial(n: u64, r: u64) -> f64 {
    if r > n {
        return 0.0;
    }
    let r = r.min(n - r);
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in lx.iter().zip(&ly) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Median of an odd-length slice; `NaN`s are not expected.
pub fn median_odd(values: &[f64]) -> f64 {
    assert!(values.len() % 2 == 1, "median_odd needs an odd count");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    sorted[sorted.len() / 2]
}

/// Rounds to `digits` significant digits and prints the shortest decimal
/// representation of the rounded value.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x);
    format!("{rounded}")
}
