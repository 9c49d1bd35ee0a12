//! Posterior summaries over stored draws.

use crate::linalg::DenseMatrix;

/// Per-coefficient posterior summary with an equal-tailed interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefSummary {
    pub mean: f64,
    pub median: f64,
    pub lower: f64,
    pub upper: f64,
}

impl CoefSummary {
    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn covers(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// Linear-interpolation quantile of sorted data (R's type 7). Monotone in
/// `prob`, so quantiles at increasing levels never cross.
pub fn quantile_sorted(sorted: &[f64], prob: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let h = (sorted.len() - 1) as f64 * prob.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Mean, median and the `level` equal-tailed interval of every column.
pub fn summarize_columns(draws: &DenseMatrix, level: f64) -> Vec<CoefSummary> {
    let tail = (1.0 - level) / 2.0;
    let n = draws.rows();
    let mut column = Vec::with_capacity(n);
    (0..draws.cols())
        .map(|j| {
            column.clear();
            column.extend((0..n).map(|i| draws[(i, j)]));
            let mean = column.iter().sum::<f64>() / n as f64;
            column.sort_by(f64::total_cmp);
            CoefSummary {
                mean,
                median: quantile_sorted(&column, 0.5),
                lower: quantile_sorted(&column, tail),
                upper: quantile_sorted(&column, 1.0 - tail),
            }
        })
        .collect()
}
