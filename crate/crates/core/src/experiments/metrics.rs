//! Estimation error and interval coverage for one replicate.

use crate::error::{Error, Result};
use crate::horseshoe::ChainResult;
use crate::linalg::{norm2, DenseMatrix};

/// ℓ1, ℓ2 and prediction error of one point estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointErrors {
    pub l1: f64,
    pub l2: f64,
    /// `‖Xβ̂ − Xβ₀‖₂`
    pub pred: f64,
}

/// An exact `covered / total` count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Coverage {
    pub covered: usize,
    pub total: usize,
}

impl Coverage {
    /// Fraction covered; an empty group counts as fully covered.
    pub fn fraction(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.covered as f64 / self.total as f64
        }
    }

    pub fn merge(self, other: Coverage) -> Coverage {
        Coverage {
            covered: self.covered + other.covered,
            total: self.total + other.total,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateMetrics {
    /// Errors of the posterior mean.
    pub mean_errors: PointErrors,
    /// Errors of the pointwise posterior median.
    pub median_errors: PointErrors,
    pub signal_coverage: Coverage,
    pub noise_coverage: Coverage,
    pub signal_length_mean: f64,
    pub noise_length_mean: f64,
}

pub fn point_errors(estimate: &[f64], beta0: &[f64], x: &DenseMatrix) -> Result<PointErrors> {
    if estimate.len() != beta0.len() {
        return Err(Error::dims("point_errors", beta0.len(), estimate.len()));
    }
    if x.cols() != beta0.len() {
        return Err(Error::dims("point_errors: columns of X", beta0.len(), x.cols()));
    }
    let diff: Vec<f64> = estimate.iter().zip(beta0).map(|(a, b)| a - b).collect();
    Ok(PointErrors {
        l1: diff.iter().map(|d| d.abs()).sum(),
        l2: norm2(&diff),
        pred: norm2(&x.matvec(&diff)?),
    })
}

/// Coordinates with `β₀_j ≠ 0` form the signal group, the rest the noise
/// group.
pub fn compute_metrics(result: &ChainResult, beta0: &[f64], x: &DenseMatrix) -> Result<ReplicateMetrics> {
    if result.summaries.len() != beta0.len() {
        return Err(Error::dims("compute_metrics", beta0.len(), result.summaries.len()));
    }
    let mean_errors = point_errors(&result.posterior_mean(), beta0, x)?;
    let median_errors = point_errors(&result.posterior_median(), beta0, x)?;
    let mut signal = Coverage::default();
    let mut noise = Coverage::default();
    let (mut signal_len, mut noise_len) = (0.0, 0.0);
    for (s, &b) in result.summaries.iter().zip(beta0) {
        let (group, len) = if b != 0.0 {
            (&mut signal, &mut signal_len)
        } else {
            (&mut noise, &mut noise_len)
        };
        group.total += 1;
        group.covered += usize::from(s.covers(b));
        *len += s.length();
    }
    let mean_or_zero = |sum: f64, c: Coverage| if c.total == 0 { 0.0 } else { sum / c.total as f64 };
    Ok(ReplicateMetrics {
        mean_errors,
        median_errors,
        signal_coverage: signal,
        noise_coverage: noise,
        signal_length_mean: mean_or_zero(signal_len, signal),
        noise_length_mean: mean_or_zero(noise_len, noise),
    })
}
