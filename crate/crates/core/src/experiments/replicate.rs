//! Independent simulation replicates and their aggregate table.

use rayon::prelude::*;

use super::design::{gen_design, SimDesign};
use super::metrics::{compute_metrics, Coverage, ReplicateMetrics};
use crate::error::{Error, Result};
use crate::horseshoe::{run_chain_with, ChainConfig, RegressionData};
use crate::rng::RngStream;

/// Column names of [`ReplicateMetrics::values`].
pub const METRIC_NAMES: [&str; 10] = [
    "l1_mean",
    "l2_mean",
    "pred_mean",
    "l1_median",
    "l2_median",
    "pred_median",
    "signal_coverage",
    "noise_coverage",
    "signal_length",
    "noise_length",
];

impl ReplicateMetrics {
    pub fn values(&self) -> [f64; 10] {
        [
            self.mean_errors.l1,
            self.mean_errors.l2,
            self.mean_errors.pred,
            self.median_errors.l1,
            self.median_errors.l2,
            self.median_errors.pred,
            self.signal_coverage.fraction(),
            self.noise_coverage.fraction(),
            self.signal_length_mean,
            self.noise_length_mean,
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateOutcome {
    pub index: usize,
    pub signal_positions: Vec<usize>,
    /// A failed chain is recorded here instead of aborting the study.
    pub metrics: Result<ReplicateMetrics>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub succeeded: usize,
    pub failed: usize,
    /// Mean of each metric over successful replicates, in [`METRIC_NAMES`] order.
    pub mean: [f64; 10],
    /// Standard error of each mean (0 with a single replicate).
    pub se: [f64; 10],
    /// Coverage counts pooled over replicates.
    pub pooled_signal: Coverage,
    pub pooled_noise: Coverage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateReport {
    pub design: SimDesign,
    pub rows: Vec<ReplicateOutcome>,
    pub aggregate: Aggregate,
}

/// Stream ids used by replicate `index`: data generation, then the chain.
/// Stream 0 stays reserved for single-chain runs.
pub fn replicate_streams(index: usize) -> (u64, u64) {
    let base = 2 * index as u64;
    (base + 1, base + 2)
}

pub fn run_replicate(design: &SimDesign, cfg: &ChainConfig, index: usize) -> ReplicateOutcome {
    let (data_stream, chain_stream) = replicate_streams(index);
    let mut data_rng = RngStream::new(cfg.seed, data_stream);
    let sim = match gen_design(design, &mut data_rng) {
        Ok(sim) => sim,
        Err(e) => {
            return ReplicateOutcome {
                index,
                signal_positions: Vec::new(),
                metrics: Err(e),
            }
        }
    };
    let metrics = RegressionData::new(sim.x.clone(), sim.y.clone()).and_then(|data| {
        let mut rng = RngStream::new(cfg.seed, chain_stream);
        let result = run_chain_with(&data, cfg, &mut rng)?;
        compute_metrics(&result, &sim.beta0, &sim.x)
    });
    ReplicateOutcome {
        index,
        signal_positions: sim.signal_positions,
        metrics,
    }
}

/// Runs `design.n_replicates` replicates on up to `threads` worker threads.
/// Output order and values do not depend on the thread count.
pub fn run_replicates(design: &SimDesign, cfg: &ChainConfig, threads: usize) -> Result<ReplicateReport> {
    design.validate()?;
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let rows: Vec<ReplicateOutcome> = pool.install(|| {
        (0..design.n_replicates)
            .into_par_iter()
            .map(|r| run_replicate(design, cfg, r))
            .collect()
    });
    let aggregate = aggregate(&rows);
    Ok(ReplicateReport {
        design: design.clone(),
        rows,
        aggregate,
    })
}

pub fn aggregate(rows: &[ReplicateOutcome]) -> Aggregate {
    let ok: Vec<&ReplicateMetrics> = rows.iter().filter_map(|r| r.metrics.as_ref().ok()).collect();
    let k = ok.len();
    let mut mean = [0.0; 10];
    let mut se = [0.0; 10];
    let mut pooled_signal = Coverage::default();
    let mut pooled_noise = Coverage::default();
    for m in &ok {
        for (acc, v) in mean.iter_mut().zip(m.values()) {
            *acc += v / k as f64;
        }
        pooled_signal = pooled_signal.merge(m.signal_coverage);
        pooled_noise = pooled_noise.merge(m.noise_coverage);
    }
    if k > 1 {
        for m in &ok {
            for ((acc, v), mu) in se.iter_mut().zip(m.values()).zip(mean) {
                *acc += (v - mu).powi(2);
            }
        }
        for s in se.iter_mut() {
            *s = (*s / (k - 1) as f64 / k as f64).sqrt();
        }
    }
    if k == 0 {
        mean = [f64::NAN; 10];
        se = [f64::NAN; 10];
    }
    Aggregate {
        succeeded: k,
        failed: rows.len() - k,
        mean,
        se,
        pooled_signal,
        pooled_noise,
    }
}
