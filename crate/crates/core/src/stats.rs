//! Summary statistics for trajectories.
//!
//! [`moments`] mixes two conventions on purpose: the standard deviation uses
//! the population (`n`) divisor, while skewness and excess kurtosis use the
//! bias-corrected sample estimators `G1` and `G2`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Mean of the last `tail` entries.
pub fn tail_mean(series: &[f64], tail: usize) -> Result<f64> {
    if tail == 0 || tail > series.len() {
        return Err(Error::param(
            "tail",
            format!("must lie in [1, {}], got {tail}", series.len()),
        ));
    }
    let window = &series[series.len() - tail..];
    Ok(window.iter().sum::<f64>() / tail as f64)
}

/// `|x - x*| / x*`.
pub fn relative_error(simulated: f64, theoretical: f64) -> Result<f64> {
    if theoretical == 0.0 {
        return Err(Error::Undefined(
            "relative error against a zero reference".into(),
        ));
    }
    Ok((simulated - theoretical).abs() / theoretical.abs())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentReport {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    /// Bias-corrected sample skewness.
    pub skewness: f64,
    /// Bias-corrected sample excess kurtosis.
    pub kurtosis: f64,
}

pub fn moments(sample: &[f64]) -> Result<MomentReport> {
    let n = sample.len();
    if n < 4 {
        return Err(Error::InsufficientSample { needed: 4, got: n });
    }
    let nf = n as f64;
    let mean = sample.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in sample {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    if m2 == 0.0 {
        return Err(Error::Undefined(
            "skewness and kurtosis of a constant sample".into(),
        ));
    }
    let std = (m2 / nf).sqrt();
    let sample_var = m2 / (nf - 1.0);
    let skewness = nf / ((nf - 1.0) * (nf - 2.0)) * m3 / sample_var.powf(1.5);
    let kurtosis = nf * (nf + 1.0) * (nf - 1.0) / ((nf - 2.0) * (nf - 3.0)) * m4 / (m2 * m2)
        - 3.0 * (nf - 1.0) * (nf - 1.0) / ((nf - 2.0) * (nf - 3.0));
    Ok(MomentReport {
        mean,
        std,
        skewness,
        kurtosis,
    })
}

/// Empirical distribution of an integer sample.
pub fn histogram(sample: &[i64]) -> Result<BTreeMap<i64, f64>> {
    if sample.is_empty() {
        return Err(Error::InsufficientSample { needed: 1, got: 0 });
    }
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for &x in sample {
        *counts.entry(x).or_default() += 1;
    }
    let total = sample.len() as f64;
    Ok(counts
        .into_iter()
        .map(|(k, c)| (k, c as f64 / total))
        .collect())
}

/// Largest minus smallest value.
pub fn range(values: &[f64]) -> f64 {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

/// Population standard deviation; zero for an empty slice.
pub fn population_std(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}
